"""JSON-lines snapshot of a channel feed, one FeedEntry per line."""
import json
from collections.abc import Sequence
from pathlib import Path

from .channel import FeedEntry


def save_snapshot(entries: Sequence[FeedEntry], path: Path | str) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for entry in entries:
            f.write(json.dumps(entry.to_record(), sort_keys=True) + "\n")
    return path


def load_snapshot(path: Path | str) -> list[FeedEntry]:
    entries = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                entries.append(FeedEntry.from_record(json.loads(line)))
    return entries
