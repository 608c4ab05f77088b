"""Serial front end of the emulated SIM808.

Bytes written by the device are framed into CR-terminated command lines, or,
while a CMGS prompt is open, into a payload ending at 0x1A (send) or 0x1B
(cancel). Every exchange is appended to a transcript with `>> ` / `<< `
prefixes; modem lines keep their CRLF.
"""
from __future__ import annotations

from pathlib import Path

from rsxml import Logger

from .at_parser import ParseFailure, parse_at_line
from .network import HttpAttempt, VirtualNetwork
from .session import ERROR, ModemSession, cancel_sms, execute, submit_sms_body
from .sms import SMS_MAX_CHARS

CR = b"\r"
CTRL_Z = b"\x1a"
ESC = b"\x1b"
MAX_LINE_BYTES = 556


class Sim808:

    def __init__(self, network: VirtualNetwork, own_number: str, record_transcript: bool = True):
        self.network = network
        self.own_number = own_number
        self.session = ModemSession(own_number=own_number)
        self.record_transcript = record_transcript
        self.transcript: list[str] = []
        self.attempts: list[HttpAttempt] = []
        self._buffer = b""
        self._overflowed = False
        self._unsolicited: list[str] = []
        self._log = Logger('SIM808')

    # network side

    def notify(self, lines: list[str]) -> None:
        """Queue unsolicited result codes for the device"""
        self._unsolicited.extend(lines)
        self._record_modem(lines)

    # device side

    def read_unsolicited(self) -> list[str]:
        lines, self._unsolicited = self._unsolicited, []
        return lines

    def write(self, data: bytes, now_ms: int) -> list[str]:
        """Feed device bytes; returns the modem lines produced by every completed command or payload"""
        self._record_device(data)
        self._buffer += data
        responses: list[str] = []
        while True:
            if self._overflowed:
                ends = [i for i in (self._buffer.find(CTRL_Z), self._buffer.find(ESC)) if i >= 0]
                if not ends:
                    self._buffer = b""
                    break
                self._buffer = self._buffer[min(ends) + 1:]
                self._overflowed = False
                continue
            if self.session.in_prompt:
                ends = [i for i in (self._buffer.find(CTRL_Z), self._buffer.find(ESC)) if i >= 0]
                if not ends:
                    if len(self._buffer) > SMS_MAX_CHARS:
                        # too long to ever be sent; the rest of the payload is swallowed up to its terminator
                        self._log.warning(f"Prompt payload exceeds {SMS_MAX_CHARS} bytes without a terminator")
                        self.session, lines = submit_sms_body(self.session, self.network, self._buffer, now_ms)
                        responses.extend(lines)
                        self._buffer = b""
                        self._overflowed = True
                    break
                pos = min(ends)
                chunk, self._buffer = self._buffer[:pos + 1], self._buffer[pos + 1:]
                if chunk.endswith(ESC):
                    self.session, lines = cancel_sms(self.session)
                else:
                    self.session, lines = submit_sms_body(self.session, self.network, chunk, now_ms)
            else:
                pos = self._buffer.find(CR)
                if pos < 0:
                    if len(self._buffer) > MAX_LINE_BYTES:
                        self._log.warning(f"Discarding {len(self._buffer)} unterminated bytes")
                        self._buffer = b""
                    break
                line, self._buffer = self._buffer[:pos + 1], self._buffer[pos + 1:]
                if not line.strip():
                    continue
                cmd = parse_at_line(line)
                if isinstance(cmd, ParseFailure):
                    self._log.debug(f"Parse failure ({cmd.reason}): {cmd.line!r}")
                    lines = [ERROR]
                else:
                    self.session, lines, attempts = execute(cmd, self.session, self.network, now_ms)
                    self.attempts.extend(attempts)
            responses.extend(lines)
        self._record_modem(responses)
        return responses

    def command(self, text: str, now_ms: int) -> list[str]:
        return self.write(text.encode("ascii") + CR, now_ms)

    # transcript

    def _record_device(self, data: bytes) -> None:
        if self.record_transcript:
            self.transcript.append(">> " + data.decode("latin-1") + "\n")

    def _record_modem(self, lines: list[str]) -> None:
        if self.record_transcript:
            self.transcript.extend("<< " + line + "\r\n" for line in lines)

    def write_transcript(self, path: Path | str) -> Path:
        path = Path(path)
        with open(path, "w", encoding="latin-1", newline="") as f:
            f.writelines(self.transcript)
        return path
