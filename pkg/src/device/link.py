"""Communication link between the firmware and the modem.

Stands for the second controller of the device: it turns SendSms and
HttpUpdate effects into AT command sequences, polls GNSS, and reads inbound
SMS announced by +CMTI.
"""
from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass, field

from rsxml import Logger

from modem.network import HttpAttempt
from modem.sim808 import CTRL_Z, Sim808
from modem.sms import SmsMessage

from .effects import Effect, HttpUpdate, SendSms
from .geo import GeoFix

CMTI_PATTERN = re.compile(r'^\+CMTI: "SM",(\d+)$')
CMGR_PATTERN = re.compile(r'^\+CMGR: "(REC UNREAD|REC READ)","([^"]*)"')
HTTPACTION_PATTERN = re.compile(r"^\+HTTPACTION: (\d+),(\d+),(\d+)$")

BOOT_SEQUENCE = (
    "AT",
    "AT+CMGF=1",
    "AT+CGNSPWR=1",
    'AT+SAPBR=3,1,"CONTYPE","GPRS"',
    "AT+SAPBR=1,1",
    "AT+CREG?",
)


@dataclass
class DispatchResult:
    sms_sent: list[SendSms] = field(default_factory=list)
    sms_failed: list[SendSms] = field(default_factory=list)
    uploads: list[HttpAttempt] = field(default_factory=list)
    upload_errors: int = 0


class CommLink:

    def __init__(self, modem: Sim808):
        self.modem = modem
        self._log = Logger('CommLink')

    def boot(self, now_ms: int) -> bool:
        """Bring the modem into text mode with GNSS and the GPRS bearer up"""
        ok = True
        for command in BOOT_SEQUENCE:
            lines = self.modem.command(command, now_ms)
            if "OK" not in lines:
                self._log.warning(f"Boot command {command} failed: {lines}")
                ok = False
        return ok

    def poll_gnss(self, now_ms: int) -> GeoFix:
        for line in self.modem.command("AT+CGNSINF", now_ms):
            if line.startswith("+CGNSINF: "):
                return parse_cgnsinf(line, now_ms)
        return GeoFix.invalid(now_ms)

    def collect_inbound(self, now_ms: int) -> list[SmsMessage]:
        """Read every message announced since the last call, in announcement order"""
        messages = []
        for urc in self.modem.read_unsolicited():
            m = CMTI_PATTERN.match(urc)
            if not m:
                continue
            lines = self.modem.command(f"AT+CMGR={m.group(1)}", now_ms)
            if len(lines) < 3 or lines[-1] != "OK":
                self._log.warning(f"Could not read stored SMS {m.group(1)}: {lines}")
                continue
            header = CMGR_PATTERN.match(lines[0])
            if header is None:
                continue
            messages.append(SmsMessage(sender=header.group(2), to=self.modem.own_number, body=lines[1], t_ms=now_ms))
        return messages

    def send_sms(self, effect: SendSms, now_ms: int) -> bool:
        prompt = self.modem.command(f'AT+CMGS="{effect.to}"', now_ms)
        if prompt != ["> "]:
            self._log.warning(f"CMGS refused for {effect.to}: {prompt}")
            return False
        lines = self.modem.write(effect.body.encode("latin-1") + CTRL_Z, now_ms)
        return bool(lines) and lines[-1] == "OK"

    def upload(self, effect: HttpUpdate, now_ms: int) -> HttpAttempt | None:
        """One HTTP GET through the modem. None when the modem refused before anything was transmitted"""
        if self.modem.command("AT+HTTPINIT", now_ms) != ["OK"]:
            # a previous session was left open
            self.modem.command("AT+HTTPTERM", now_ms)
            if self.modem.command("AT+HTTPINIT", now_ms) != ["OK"]:
                return None
        attempt = None
        if (self.modem.command('AT+HTTPPARA="CID",1', now_ms) == ["OK"]
                and self.modem.command(f'AT+HTTPPARA="URL","{effect.url}"', now_ms) == ["OK"]):
            before = len(self.modem.attempts)
            lines = self.modem.command("AT+HTTPACTION=0", now_ms)
            if len(self.modem.attempts) > before:
                attempt = self.modem.attempts[-1]
            status = next((HTTPACTION_PATTERN.match(x) for x in lines if HTTPACTION_PATTERN.match(x)), None)
            if status is not None and status.group(2) == "200":
                self.modem.command("AT+HTTPREAD", now_ms)
        self.modem.command("AT+HTTPTERM", now_ms)
        return attempt

    def dispatch(self, effects: Sequence[Effect], now_ms: int) -> DispatchResult:
        result = DispatchResult()
        for effect in effects:
            if isinstance(effect, SendSms):
                if self.send_sms(effect, now_ms):
                    result.sms_sent.append(effect)
                else:
                    result.sms_failed.append(effect)
            elif isinstance(effect, HttpUpdate):
                attempt = self.upload(effect, now_ms)
                if attempt is None:
                    result.upload_errors += 1
                else:
                    result.uploads.append(attempt)
        return result


def parse_cgnsinf(line: str, now_ms: int) -> GeoFix:
    """GeoFix from `+CGNSINF: <run>,<fix>,<utc>,<lat>,<lon>`"""
    fields = line.split(": ", 1)[1].split(",")
    if len(fields) < 5 or fields[1] != "1" or not fields[3] or not fields[4]:
        return GeoFix.invalid(now_ms)
    try:
        return GeoFix(lat=float(fields[3]), lon=float(fields[4]), valid=True, t_ms=now_ms)
    except ValueError:
        return GeoFix.invalid(now_ms)
