"""Scenario files: one YAML document describing a complete simulated run.

Times in the file are seconds; everything is converted to integer
milliseconds on load. Probabilities are decimals or "a/b" fractions.

    name: nominal-hour
    seed: 8
    duration_s: 3600
    sample_hz: 100
    device:
      own_number: "+593990000001"
      api_key: ABCDEFGH12345678
      contacts: ["+593991111111"]
      nominal_bpm: [60, 100]
    segments:
      - {start_s: 0, target_bpm: 75}
    button_presses_s: [20]
    inbound_sms:
      - {t_s: 70, from: "+593991234567", body: "CFG CONTACT ADD +593991234567"}
    gnss: {static: [-2.2269, -80.859], acquire_s: 0}
    network: {loss_model: bernoulli, http_loss_prob: 2/75, sms_loss_prob: 0}
    battery: {capacity_mah: 1800, draw_ma: 200}
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import yaml
from rsxml import Logger

from device import BpmRange, ConfigError, DeviceConfig
from modem import GSM_BANDS, GnssTrack, LossModel, Waypoint, as_probability
from modem.sms import SmsMessage
from power import DEFAULT_CAPACITY_MAH, DEFAULT_DRAW_MA, BatteryState, PowerError
from vitals import DEFAULT_FIFO_CAPACITY, DEFAULT_SAMPLE_HZ, ProfileError, VitalsProfile
from vitals.synth import MAX_SAMPLE_HZ, MIN_SAMPLE_HZ

SCENARIO_DIR = Path(__file__).parent / "scenarios"
DEFAULT_TICK_MS = 100
DEFAULT_GNSS_POLL_S = 30
PROFILE_KEYS = ("target_bpm", "spo2_ratio_r", "dc_red", "dc_ir", "ac_amplitude", "noise_amplitude", "contact")


class ScenarioError(ValueError):
    """A scenario that cannot be run. `problems` lists every validation failure found"""

    def __init__(self, problems: list[str], source: str = "scenario"):
        self.problems = list(problems)
        self.message = f"{source} is invalid: " + "; ".join(self.problems)
        super().__init__(self.message)


@dataclass(frozen=True)
class Segment:
    start_ms: int
    profile: VitalsProfile


@dataclass(frozen=True)
class ScheduledSms:
    t_ms: int
    message: SmsMessage


@dataclass(frozen=True)
class NetworkSettings:
    loss_model: LossModel = LossModel.BERNOULLI
    http_loss_prob: Fraction = Fraction(0)
    sms_loss_prob: Fraction = Fraction(0)
    band: int = 900


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    duration_ms: int
    config: DeviceConfig
    segments: tuple[Segment, ...]
    sample_hz: int = DEFAULT_SAMPLE_HZ
    tick_ms: int = DEFAULT_TICK_MS
    gnss_poll_ms: int = DEFAULT_GNSS_POLL_S * 1000
    fifo_capacity: int = DEFAULT_FIFO_CAPACITY
    button_presses_ms: tuple[int, ...] = ()
    inbound_sms: tuple[ScheduledSms, ...] = ()
    gnss_track: GnssTrack = field(default_factory=GnssTrack.none, compare=False)
    network: NetworkSettings = field(default_factory=NetworkSettings)
    battery: BatteryState = field(default_factory=BatteryState)
    description: str = ""

    @property
    def run_name(self) -> str:
        return f"{self.name}-seed{self.seed}"

    def segment_end_ms(self, index: int) -> int:
        if index + 1 < len(self.segments):
            return self.segments[index + 1].start_ms
        return self.duration_ms

    def with_seed(self, seed: int) -> Scenario:
        return replace(self, seed=seed)


def _ms(value, key: str, problems: list[str]) -> int | None:
    try:
        seconds = Fraction(str(value))
    except (TypeError, ValueError):
        problems.append(f"{key} must be a number of seconds, got {value!r}")
        return None
    return int(round(seconds * 1000))


def _mapping(raw, key: str, problems: list[str]) -> Mapping | None:
    """raw when it is a mapping (None counts as empty); otherwise a problem is recorded"""
    if raw is None:
        return {}
    if not isinstance(raw, Mapping):
        problems.append(f"{key} must be a mapping, got {raw!r}")
        return None
    return raw


def _items(raw, key: str, problems: list[str]) -> list:
    if raw is None:
        return []
    if not isinstance(raw, list):
        problems.append(f"{key} must be a list, got {raw!r}")
        return []
    return raw


def _profile(raw: Mapping, index: int, problems: list[str]) -> VitalsProfile | None:
    unknown = set(raw) - set(PROFILE_KEYS) - {"start_s"}
    if unknown:
        problems.append(f"segment {index}: unknown keys {sorted(unknown)}")
    try:
        return VitalsProfile(**{k: raw[k] for k in PROFILE_KEYS if k in raw})
    except (ProfileError, TypeError, ValueError) as exc:
        problems.append(f"segment {index}: {getattr(exc, 'message', exc)}")
        return None


def _device(raw, problems: list[str]) -> DeviceConfig | None:
    section = _mapping(raw, "device", problems)
    if section is None:
        return None
    raw = dict(section)
    nominal = raw.pop("nominal_bpm", None)
    try:
        if nominal is not None:
            low, high = nominal
            raw["nominal_bpm"] = BpmRange(int(low), int(high))
        return DeviceConfig(**raw)
    except ConfigError as exc:
        problems.append(f"device: {exc.message}")
    except (TypeError, ValueError) as exc:
        problems.append(f"device: {exc}")
    return None


def _gnss(raw, problems: list[str]) -> GnssTrack:
    raw = _mapping(raw, "gnss", problems)
    if not raw:
        return GnssTrack.none()
    acquire = _ms(raw.get("acquire_s", 0), "gnss.acquire_s", problems) or 0
    if "static" in raw:
        try:
            lat, lon = (float(v) for v in raw["static"])
        except (TypeError, ValueError):
            problems.append("gnss.static must be [lat, lon]")
            return GnssTrack.none()
        if not (-90 <= lat <= 90 and -180 <= lon <= 180):
            problems.append(f"gnss.static out of range: {lat}, {lon}")
        return GnssTrack.static(lat, lon, acquire_ms=acquire)
    waypoints = []
    for i, wp in enumerate(_items(raw.get("waypoints"), "gnss.waypoints", problems)):
        if _mapping(wp, f"gnss.waypoints[{i}]", problems) is None:
            continue
        t_ms = _ms(wp.get("t_s"), f"gnss.waypoints[{i}].t_s", problems)
        try:
            lat, lon = float(wp["lat"]), float(wp["lon"])
        except (KeyError, TypeError, ValueError):
            problems.append(f"gnss.waypoints[{i}] needs numeric lat and lon")
            continue
        if t_ms is not None:
            waypoints.append(Waypoint(t_ms, lat, lon))
    return GnssTrack(waypoints, acquire_ms=acquire)


def _network(raw, problems: list[str]) -> NetworkSettings:
    raw = _mapping(raw, "network", problems)
    if raw is None:
        return NetworkSettings()
    try:
        settings = NetworkSettings(
            loss_model=LossModel(raw.get("loss_model", LossModel.BERNOULLI)),
            http_loss_prob=as_probability(raw.get("http_loss_prob", 0)),
            sms_loss_prob=as_probability(raw.get("sms_loss_prob", 0)),
            band=int(raw.get("band", 900)),
        )
    except (TypeError, ValueError) as exc:
        problems.append(f"network: {exc}")
        return NetworkSettings()
    if settings.band not in GSM_BANDS:
        problems.append(f"network.band must be one of {GSM_BANDS}")
    return settings


def scenario_from_dict(data: Mapping, source: str = "scenario") -> Scenario:
    """Validate a parsed scenario document

    Raises:
        ScenarioError: listing every problem found
    """
    if not isinstance(data, Mapping):
        raise ScenarioError(["document must be a mapping"], source)
    problems: list[str] = []

    name = str(data.get("name") or Path(source).stem)
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        problems.append(f"seed must be a non-negative integer, got {seed!r}")
        seed = 0
    duration_ms = _ms(data.get("duration_s"), "duration_s", problems)
    if duration_ms is not None and duration_ms < 0:
        problems.append("duration_s must not be negative")
    duration_ms = max(duration_ms or 0, 0)

    sample_hz = data.get("sample_hz", DEFAULT_SAMPLE_HZ)
    tick_ms = data.get("tick_ms", DEFAULT_TICK_MS)
    fifo_capacity = data.get("fifo_capacity", DEFAULT_FIFO_CAPACITY)
    for key, value in (("sample_hz", sample_hz), ("tick_ms", tick_ms), ("fifo_capacity", fifo_capacity)):
        if not isinstance(value, int) or value <= 0:
            problems.append(f"{key} must be a positive integer, got {value!r}")
    if isinstance(sample_hz, int) and not MIN_SAMPLE_HZ <= sample_hz <= MAX_SAMPLE_HZ:
        problems.append(f"sample_hz must lie in [{MIN_SAMPLE_HZ}, {MAX_SAMPLE_HZ}], got {sample_hz}")
    gnss_poll_ms = _ms(data.get("gnss_poll_s", DEFAULT_GNSS_POLL_S), "gnss_poll_s", problems)
    if gnss_poll_ms is not None and gnss_poll_ms <= 0:
        problems.append("gnss_poll_s must be positive")

    config = _device(data.get("device"), problems)

    segments = []
    raw_segments = _items(data.get("segments"), "segments", problems)
    if not raw_segments:
        problems.append("at least one segment is required")
    for i, raw in enumerate(raw_segments):
        if _mapping(raw, f"segments[{i}]", problems) is None:
            continue
        start = _ms(raw.get("start_s"), f"segments[{i}].start_s", problems)
        profile = _profile(raw, i, problems)
        if start is not None and profile is not None:
            segments.append(Segment(start, profile))
    if segments:
        starts = [s.start_ms for s in segments]
        if starts[0] != 0:
            problems.append("the first segment must start at 0")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            problems.append("segment starts must be strictly increasing")
        if len(starts) > 1 and starts[-1] >= duration_ms:
            problems.append("every segment must start before the end of the run")

    presses = []
    for i, t in enumerate(_items(data.get("button_presses_s"), "button_presses_s", problems)):
        t_ms = _ms(t, f"button_presses_s[{i}]", problems)
        if t_ms is not None:
            presses.append(t_ms)

    inbound = []
    own_number = config.own_number if config else ""
    for i, raw in enumerate(_items(data.get("inbound_sms"), "inbound_sms", problems)):
        if _mapping(raw, f"inbound_sms[{i}]", problems) is None:
            continue
        t_ms = _ms(raw.get("t_s"), f"inbound_sms[{i}].t_s", problems)
        try:
            msg = SmsMessage(sender=str(raw["from"]), to=str(raw.get("to", own_number)),
                             body=str(raw["body"]), t_ms=t_ms or 0)
        except (KeyError, ValueError) as exc:
            problems.append(f"inbound_sms[{i}]: {exc}")
            continue
        if t_ms is not None:
            inbound.append(ScheduledSms(t_ms, msg))

    for t_ms in presses + [s.t_ms for s in inbound]:
        if not 0 <= t_ms <= duration_ms:
            problems.append(f"event at {t_ms} ms lies outside the run [0, {duration_ms}] ms")

    gnss_track = _gnss(data.get("gnss"), problems)
    network = _network(data.get("network"), problems)

    battery_raw = _mapping(data.get("battery"), "battery", problems) or {}
    try:
        battery = BatteryState(capacity_mah=battery_raw.get("capacity_mah", DEFAULT_CAPACITY_MAH),
                               draw_ma=battery_raw.get("draw_ma", DEFAULT_DRAW_MA))
    except PowerError as exc:
        problems.append(f"battery: {exc.message}")
        battery = BatteryState()

    if problems:
        raise ScenarioError(problems, source)

    return Scenario(
        name=name,
        seed=seed,
        duration_ms=duration_ms,
        config=config,
        segments=tuple(segments),
        sample_hz=sample_hz,
        tick_ms=tick_ms,
        gnss_poll_ms=gnss_poll_ms,
        fifo_capacity=fifo_capacity,
        button_presses_ms=tuple(sorted(presses)),
        inbound_sms=tuple(sorted(inbound, key=lambda s: s.t_ms)),
        gnss_track=gnss_track,
        network=network,
        battery=battery,
        description=str(data.get("description", "")),
    )


def load_scenario(path: Path | str) -> Scenario:
    path = Path(path)
    log = Logger('Scenario')
    log.debug(f"Loading scenario {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ScenarioError([f"not valid YAML: {exc}"], str(path)) from exc
    return scenario_from_dict(data, str(path))


def bundled_scenarios() -> dict[str, Path]:
    """Scenario name -> file for every scenario shipped with the harness"""
    return {p.stem: p for p in sorted(SCENARIO_DIR.glob("*.yaml"))}


def resolve_scenario(name_or_path: str | Path) -> Path:
    """A path to an existing file, or the name of a bundled scenario"""
    path = Path(name_or_path)
    if path.is_file():
        return path
    bundled = bundled_scenarios()
    if str(name_or_path) in bundled:
        return bundled[str(name_or_path)]
    raise ScenarioError([f"no scenario file or bundled scenario named '{name_or_path}'"], str(name_or_path))
