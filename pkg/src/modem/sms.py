"""Text messages as carried by the virtual network."""
from dataclasses import dataclass

SMS_MAX_CHARS = 160
CTRL_Z = 0x1A


@dataclass(frozen=True)
class SmsMessage:
    """One single-part text message. `sender` is the originating number."""
    sender: str
    to: str
    body: str
    t_ms: int

    def __post_init__(self):
        if len(self.body) > SMS_MAX_CHARS:
            raise ValueError(f"SMS body is {len(self.body)} characters, limit is {SMS_MAX_CHARS}")
        if chr(CTRL_Z) in self.body:
            raise ValueError("SMS body must not contain the 0x1A terminator")

    def to_record(self) -> dict:
        return {"t_ms": self.t_ms, "from": self.sender, "to": self.to, "body": self.body}
