"""SIM808 session state and command execution.

Every completed command answers with exactly one terminal line: `OK`,
`ERROR` or `+CMS ERROR: <n>`. `AT+CMGS` is completed by its payload, so its
terminal line comes from submit_sms_body (or cancel_sms).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

from rsxml import Logger

from util.sim_time import gnss_utc, sms_timestamp

from .at_parser import AtCommand, Verb
from .network import STATUS_NETWORK_ERROR, HttpAttempt, VirtualNetwork
from .sms import SMS_MAX_CHARS, SmsMessage

OK = "OK"
ERROR = "ERROR"
PROMPT = "> "
CMS_MEMORY_FAILURE = "+CMS ERROR: 321"
CMS_INVALID_LENGTH = "+CMS ERROR: 305"
CMS_NETWORK_FAILURE = "+CMS ERROR: 500"
AT_NETWORK_ERROR = 601
BEARER_IP = "10.64.0.1"

TERMINAL_LINES = (OK, ERROR)


def is_terminal(line: str) -> bool:
    return line in TERMINAL_LINES or line.startswith("+CMS ERROR")


class HttpState(StrEnum):
    IDLE = "Idle"
    INITIALIZED = "Initialized"
    PARAMS_SET = "ParamsSet"
    ACTION_PENDING = "ActionPending"


@dataclass
class ModemSession:
    own_number: str
    text_mode: bool = False
    registered: bool = True
    gnss_on: bool = False
    bearer_open: bool = False
    http: HttpState = HttpState.IDLE
    http_url: str | None = None
    http_response: tuple[int, str] | None = None
    pending_sms_to: str | None = None
    next_sms_ref: int = 1

    @property
    def in_prompt(self) -> bool:
        return self.pending_sms_to is not None


def _cmgr(cmd: AtCommand, session: ModemSession, network: VirtualNetwork) -> list[str]:
    if not session.text_mode:
        return [ERROR]
    stored = network.read_stored(session.own_number, cmd.args[0])
    if stored is None:
        return [CMS_MEMORY_FAILURE]
    status = "REC READ" if stored.read else "REC UNREAD"
    msg = stored.message
    return [f'+CMGR: "{status}","{msg.sender}","","{sms_timestamp(msg.t_ms)}"', msg.body, OK]


def _cgnsinf(session: ModemSession, network: VirtualNetwork, now_ms: int) -> list[str]:
    if not session.gnss_on:
        return ["+CGNSINF: 0,0,,,", OK]
    fix = network.gnss_fix(now_ms)
    if not fix.valid:
        return [f"+CGNSINF: 1,0,{gnss_utc(now_ms)},,", OK]
    return [f"+CGNSINF: 1,1,{gnss_utc(now_ms)},{fix.lat:.6f},{fix.lon:.6f}", OK]


def _sapbr(cmd: AtCommand, session: ModemSession) -> list[str]:
    kind, cid = cmd.args[0], cmd.args[1]
    if cid != 1:
        return [ERROR]
    match kind, len(cmd.args):
        case 3, 4:
            return [OK] if cmd.args[2] in ("CONTYPE", "APN", "USER", "PWD") else [ERROR]
        case 1, 2:
            if not session.registered or session.bearer_open:
                return [ERROR]
            session.bearer_open = True
            return [OK]
        case 0, 2:
            if not session.bearer_open:
                return [ERROR]
            session.bearer_open = False
            return [OK]
        case 2, 2:
            status, ip = (1, BEARER_IP) if session.bearer_open else (3, "0.0.0.0")
            return [f'+SAPBR: 1,{status},"{ip}"', OK]
    return [ERROR]


def _httppara(cmd: AtCommand, session: ModemSession) -> list[str]:
    if session.http not in (HttpState.INITIALIZED, HttpState.PARAMS_SET):
        return [ERROR]
    name, value = cmd.args
    match str(name).upper():
        case "URL" if isinstance(value, str) and value:
            session.http_url = value
            session.http = HttpState.PARAMS_SET
            return [OK]
        case "CID" if value == 1:
            return [OK]
    return [ERROR]


def _httpaction(cmd: AtCommand, session: ModemSession, network: VirtualNetwork,
                now_ms: int) -> tuple[list[str], list[HttpAttempt]]:
    method = cmd.args[0]
    if method not in (0, 1) or session.http is not HttpState.PARAMS_SET or not session.bearer_open:
        return [ERROR], []
    session.http = HttpState.ACTION_PENDING
    status, body = network.http_request(session.http_url, now_ms)
    attempt = network.http_attempts[-1]
    session.http = HttpState.PARAMS_SET
    if status == STATUS_NETWORK_ERROR:
        session.http_response = None
        return [OK, f"+HTTPACTION: {method},{AT_NETWORK_ERROR},0"], [attempt]
    session.http_response = (status, body)
    return [OK, f"+HTTPACTION: {method},{status},{len(body)}"], [attempt]


def execute(cmd: AtCommand, session: ModemSession, network: VirtualNetwork,
            now_ms: int) -> tuple[ModemSession, list[str], list[HttpAttempt]]:
    """Run one parsed command.

    Returns:
        tuple: the session (mutated in place), response lines, and the HTTP
        attempts the command put on the network
    """
    if session.in_prompt:
        return session, [ERROR], []

    side_effects: list[HttpAttempt] = []
    match cmd.verb:
        case Verb.AT:
            lines = [OK]
        case Verb.CMGF:
            if cmd.args[0] in (0, 1):
                session.text_mode = cmd.args[0] == 1
                lines = [OK]
            else:
                lines = [ERROR]
        case Verb.CMGS:
            if not session.registered or not session.text_mode or not cmd.args[0]:
                lines = [ERROR]
            else:
                session.pending_sms_to = cmd.args[0]
                lines = [PROMPT]
        case Verb.CMGR:
            lines = _cmgr(cmd, session, network)
        case Verb.CREG_QUERY:
            lines = [f"+CREG: 0,{1 if session.registered else 0}", OK]
        case Verb.CGNSPWR:
            if cmd.args[0] in (0, 1):
                session.gnss_on = cmd.args[0] == 1
                lines = [OK]
            else:
                lines = [ERROR]
        case Verb.CGNSINF:
            lines = _cgnsinf(session, network, now_ms)
        case Verb.SAPBR:
            lines = _sapbr(cmd, session)
        case Verb.HTTPINIT:
            if session.http is HttpState.IDLE:
                session.http = HttpState.INITIALIZED
                lines = [OK]
            else:
                lines = [ERROR]
        case Verb.HTTPPARA:
            lines = _httppara(cmd, session)
        case Verb.HTTPACTION:
            lines, side_effects = _httpaction(cmd, session, network, now_ms)
        case Verb.HTTPREAD:
            if session.http is HttpState.PARAMS_SET and session.http_response is not None:
                body = session.http_response[1]
                lines = [f"+HTTPREAD: {len(body)}", body, OK]
            else:
                lines = [ERROR]
        case Verb.HTTPTERM:
            if session.http is HttpState.IDLE:
                lines = [ERROR]
            else:
                session.http = HttpState.IDLE
                session.http_url = None
                session.http_response = None
                lines = [OK]
        case _:
            lines = [ERROR]
    return session, lines, side_effects


def submit_sms_body(session: ModemSession, network: VirtualNetwork, body: bytes,
                    now_ms: int) -> tuple[ModemSession, list[str]]:
    """Complete a CMGS prompt with a payload ending in 0x1A"""
    if not session.in_prompt:
        return session, [ERROR]
    to = session.pending_sms_to
    session.pending_sms_to = None
    payload = body[:-1] if body.endswith(b"\x1a") else body
    text = payload.decode("latin-1")
    if len(text) > SMS_MAX_CHARS:
        return session, [CMS_INVALID_LENGTH]
    delivered = network.submit_sms(SmsMessage(sender=session.own_number, to=to, body=text, t_ms=now_ms))
    if not delivered:
        Logger('ModemSession').debug(f"t={now_ms} SMS to {to} failed at the network")
        return session, [CMS_NETWORK_FAILURE]
    ref = session.next_sms_ref
    session.next_sms_ref += 1
    return session, [f"+CMGS: {ref}", OK]


def cancel_sms(session: ModemSession) -> tuple[ModemSession, list[str]]:
    """ESC during the prompt abandons the message"""
    session.pending_sms_to = None
    return session, [OK]
