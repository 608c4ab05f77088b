"""SIM808 emulator: AT parser, session state machine, virtual GSM network and GNSS track."""

from .sms import SMS_MAX_CHARS, SmsMessage
from .at_parser import SIGNATURES, AtCommand, ParseFailure, Verb, format_at_command, parse_at_line
from .gnss import GnssTrack, Waypoint
from .network import (
    DEFAULT_HTTP_LOSS,
    GSM_BANDS,
    DroppedRecord,
    HttpAttempt,
    LossModel,
    LossRoller,
    VirtualNetwork,
    as_probability,
    http_bridge,
)
from .session import HttpState, ModemSession, execute, is_terminal, submit_sms_body
from .sim808 import Sim808

__all__ = [
    "DEFAULT_HTTP_LOSS",
    "GSM_BANDS",
    "SIGNATURES",
    "SMS_MAX_CHARS",
    "AtCommand",
    "DroppedRecord",
    "GnssTrack",
    "HttpAttempt",
    "HttpState",
    "LossModel",
    "LossRoller",
    "ModemSession",
    "ParseFailure",
    "Sim808",
    "SmsMessage",
    "Verb",
    "VirtualNetwork",
    "Waypoint",
    "as_probability",
    "execute",
    "format_at_command",
    "http_bridge",
    "is_terminal",
    "parse_at_line",
    "submit_sms_body",
]
