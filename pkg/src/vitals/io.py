"""CSV persistence of sample streams: header `t_ms,red,ir`, decimal integers."""
from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from .types import PpgSample

SAMPLE_COLUMNS = ["t_ms", "red", "ir"]


def samples_to_frame(samples: Sequence[PpgSample]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "t_ms": [s.t_ms for s in samples],
            "red": [s.red for s in samples],
            "ir": [s.ir for s in samples],
        },
        columns=SAMPLE_COLUMNS,
        dtype="int64",
    )


def write_samples_csv(samples: Sequence[PpgSample], path: Path | str) -> Path:
    path = Path(path)
    samples_to_frame(samples).to_csv(path, index=False, lineterminator="\n")
    return path


def read_samples_csv(path: Path | str) -> list[PpgSample]:
    """Load a stream written by write_samples_csv. Rejects missing columns and non-increasing timestamps"""
    df = pd.read_csv(path, dtype="int64")
    missing = [c for c in SAMPLE_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    if len(df) > 1 and not (df["t_ms"].diff().iloc[1:] > 0).all():
        raise ValueError(f"{path}: t_ms must be strictly increasing")
    return [PpgSample(int(t), int(r), int(i)) for t, r, i in df[SAMPLE_COLUMNS].itertuples(index=False)]
