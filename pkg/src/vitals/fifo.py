"""Sensor-side sample buffer read by the controller in bursts."""
from collections import deque
from collections.abc import Iterable

from rsxml import Logger

from .types import PpgSample

DEFAULT_FIFO_CAPACITY = 16


class SampleFifo:
    """Bounded first-in, first-out buffer. A push into a full buffer drops the oldest sample."""

    def __init__(self, capacity: int = DEFAULT_FIFO_CAPACITY):
        if capacity <= 0:
            raise ValueError(f"FIFO capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.overflows = 0
        self._entries: deque[PpgSample] = deque()
        self._log = Logger('SampleFifo')

    def __len__(self) -> int:
        return len(self._entries)

    def push(self, sample: PpgSample) -> None:
        if len(self._entries) == self.capacity:
            dropped = self._entries.popleft()
            self.overflows += 1
            if self.overflows == 1:
                self._log.warning(f"FIFO overflow, dropped sample t={dropped.t_ms}; controller is reading too slowly")
            else:
                self._log.debug(f"FIFO overflow, dropped sample t={dropped.t_ms} (total {self.overflows})")
        self._entries.append(sample)

    def extend(self, samples: Iterable[PpgSample]) -> None:
        for sample in samples:
            self.push(sample)

    def pop(self) -> PpgSample:
        if not self._entries:
            raise IndexError("pop from empty FIFO")
        return self._entries.popleft()

    def drain(self) -> list[PpgSample]:
        """Burst read: everything currently buffered, oldest first"""
        out = list(self._entries)
        self._entries.clear()
        return out
