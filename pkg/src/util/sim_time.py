"""Render simulation-clock milliseconds as calendar timestamps.

The simulated clock starts at SIM_EPOCH so transcripts and feeds never depend on wall-clock time.
"""
from datetime import UTC, datetime, timedelta

SIM_EPOCH = datetime(2020, 1, 1, tzinfo=UTC)


def sim_datetime(t_ms: int) -> datetime:
    return SIM_EPOCH + timedelta(milliseconds=int(t_ms))


def iso_timestamp(t_ms: int) -> str:
    """ThingSpeak style `2020-01-01T00:00:48Z`"""
    return sim_datetime(t_ms).strftime('%Y-%m-%dT%H:%M:%SZ')


def gnss_utc(t_ms: int) -> str:
    """GNSS UTC field, `yyyyMMddhhmmss.sss`"""
    dt = sim_datetime(t_ms)
    return dt.strftime('%Y%m%d%H%M%S') + f".{dt.microsecond // 1000:03d}"


def sms_timestamp(t_ms: int) -> str:
    """SMS service-centre stamp, `yy/MM/dd,hh:mm:ss+zz`"""
    return sim_datetime(t_ms).strftime('%y/%m/%d,%H:%M:%S') + "+00"
