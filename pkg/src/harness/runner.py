"""Deterministic simulation of one scenario on a single event clock.

Each tick, in order: battery drain, sensor samples into the FIFO and a burst
read, scheduled inbound SMS, SMS retrieval over AT, GNSS poll, button
presses, the firmware step, and the link executing SendSms / HttpUpdate
effects through the modem.
"""
from __future__ import annotations

import json
from collections.abc import Iterator
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd
from rsxml import Logger
from rsxml.util import safe_makedirs

from device import AlertRaised, DeviceState, Effect, TickInputs, tick
from device.link import CommLink
from modem import Sim808, VirtualNetwork
from power import BatteryDepleted, DataLedger, drain, power_report, projection_report, record_upload
from telemetry import TelemetryService, delivery_report, save_snapshot
from vitals import PpgSample, PpgSynthesizer, SampleFifo, VitalsReading

from .compare import compare_to_reference, comparison_frame, deltas
from .run_report import RunReport
from .scenario import Scenario

ARTIFACTS = (
    "effects.jsonl",
    "serial.log",
    "telemetry.jsonl",
    "vitals.csv",
    "network.jsonl",
    "report.json",
    "power_report.json",
    "comparison.csv",
)


@dataclass(frozen=True)
class RunResult:
    report: RunReport
    run_dir: Path | None
    effects: list[dict]
    readings: list[VitalsReading]


def sample_stream(scenario: Scenario, seed: np.random.SeedSequence) -> Iterator[PpgSample]:
    """Samples of every segment in time order, one child seed per segment"""
    children = seed.spawn(len(scenario.segments))
    for index, (segment, child) in enumerate(zip(scenario.segments, children)):
        end = scenario.segment_end_ms(index)
        if end <= segment.start_ms:
            continue
        synth = PpgSynthesizer(segment.profile, end - segment.start_ms, scenario.sample_hz,
                               seed=child, start_ms=segment.start_ms)
        yield from synth.samples()


class Simulation:
    """Everything one run owns. Call run() once."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        sensor_seed, network_seed = np.random.SeedSequence(scenario.seed).spawn(2)
        self._samples = sample_stream(scenario, sensor_seed)
        self._pending: PpgSample | None = next(self._samples, None)

        self.telemetry = TelemetryService()
        self.channel = self.telemetry.create_channel(scenario.config.api_key, name=scenario.name)
        net = scenario.network
        self.network = VirtualNetwork(
            seed=network_seed,
            sms_loss_prob=net.sms_loss_prob,
            http_loss_prob=net.http_loss_prob,
            loss_model=net.loss_model,
            gnss_track=scenario.gnss_track,
            band=net.band,
            telemetry=self.telemetry,
        )
        self.modem = Sim808(self.network, scenario.config.own_number)
        self.network.attach(self.modem)
        self.link = CommLink(self.modem)
        self.fifo = SampleFifo(scenario.fifo_capacity)
        self.state = DeviceState(config=scenario.config)
        self.battery = scenario.battery
        self.ledger = DataLedger()

        self.effects: list[dict] = []
        self.readings: list[VitalsReading] = []
        self.alerts = []
        self.sms_sent = 0
        self.end_ms = 0
        self.depleted: BatteryDepleted | None = None
        self._log = Logger('Simulation')

    def _samples_until(self, now_ms: int) -> list[PpgSample]:
        while self._pending is not None and self._pending.t_ms <= now_ms:
            self.fifo.push(self._pending)
            self._pending = next(self._samples, None)
        return self.fifo.drain()

    def _record(self, effects: list[Effect]) -> None:
        for effect in effects:
            self.effects.append(effect.to_record())
            if isinstance(effect, AlertRaised) and effect.alert is not None:
                self.alerts.append(effect.alert)

    def run(self) -> None:
        s = self.scenario
        self._log.info(f"Running {s.run_name}: {s.duration_ms / 1000:g} s at {s.sample_hz} Hz, tick {s.tick_ms} ms")
        self.link.boot(0)
        presses = list(s.button_presses_ms)
        inbound = list(s.inbound_sms)
        next_gnss_ms = 0
        prev_ms = 0

        for now in range(0, s.duration_ms + 1, s.tick_ms):
            self.battery = drain(self.battery, now - prev_ms)
            prev_ms = now
            if self.battery.depleted:
                self.depleted = BatteryDepleted(self.battery.depleted_at_ms, self.battery.consumed_mah)
                self.effects.append(self.depleted.to_record())
                self.end_ms = self.battery.depleted_at_ms
                self._log.info(f"Device halted at {self.end_ms} ms: battery depleted")
                break
            self.end_ms = now

            samples = self._samples_until(now)
            while inbound and inbound[0].t_ms <= now:
                self.network.deliver_inbound(inbound.pop(0).message)
            messages = self.link.collect_inbound(now)
            fix = None
            if now >= next_gnss_ms:
                fix = self.link.poll_gnss(now)
                next_gnss_ms += s.gnss_poll_ms
            pressed = 0
            while presses and presses[0] <= now:
                presses.pop(0)
                pressed += 1

            self.state, effects = tick(self.state, now, TickInputs(samples, pressed, messages, fix))
            if self.state.last_reading_ms == now and self.state.last_reading is not None:
                self.readings.append(self.state.last_reading)
            self._record(effects)

            result = self.link.dispatch(effects, now)
            self.sms_sent += len(result.sms_sent)
            for attempt in result.uploads:
                self.ledger = record_upload(self.ledger, attempt.t_ms, attempted=True, delivered=attempt.delivered)

        self._log.info(f"Run finished at {self.end_ms} ms: {len(self.network.http_attempts)} upload attempt(s), "
                       f"{len(self.alerts)} alert(s)")

    def oracle_errors(self) -> list[int]:
        """|bpm - target| for Good readings whose whole window lies inside one contact segment"""
        s = self.scenario
        window = s.config.vitals_window_ms
        errors = []
        for reading in self.readings:
            if not reading.is_good:
                continue
            for index, segment in enumerate(s.segments):
                if segment.start_ms <= reading.t_ms - window and reading.t_ms <= s.segment_end_ms(index):
                    if segment.profile.contact:
                        errors.append(abs(reading.bpm - round(segment.profile.target_bpm)))
                    break
        return errors

    def report(self) -> RunReport:
        attempted = len(self.network.http_attempts)
        delivery = delivery_report(self.telemetry, self.channel.id, attempted)
        projection = projection_report(self.ledger, self.end_ms)
        errors = self.oracle_errors()
        report = RunReport(
            scenario=self.scenario.name,
            seed=self.scenario.seed,
            duration_ms=self.scenario.duration_ms,
            end_ms=self.end_ms,
            uploads_attempted=attempted,
            uploads_received=delivery.received,
            success_ratio=delivery.success_ratio,
            alerts=tuple(self.alerts),
            sms_sent=self.sms_sent,
            endurance_hours=self.battery.endurance_hours,
            kb_per_hour=projection.kb_per_hour,
            mb_per_day=projection.mb_per_day,
            readings_good=sum(1 for r in self.readings if r.is_good),
            fifo_overflows=self.fifo.overflows,
            battery_depleted_at_ms=None if self.depleted is None else self.depleted.t_ms,
            oracle_bpm_mae=float(Fraction(sum(errors), len(errors))) if errors else None,
            oracle_readings=len(errors),
        )
        return replace(report, deltas=deltas(compare_to_reference(report)))

    def write_artifacts(self, run_dir: Path, report: RunReport) -> Path:
        safe_makedirs(str(run_dir))
        with open(run_dir / "effects.jsonl", "w", encoding="utf-8", newline="\n") as f:
            for record in self.effects:
                f.write(json.dumps(record, sort_keys=True) + "\n")
        self.modem.write_transcript(run_dir / "serial.log")
        save_snapshot(self.telemetry.snapshot(self.channel.id), run_dir / "telemetry.jsonl")

        good = [r for r in self.readings if r.is_good]
        vitals = pd.DataFrame({
            "t_ms": pd.Series([r.t_ms for r in good], dtype="int64"),
            "bpm": pd.Series([r.bpm for r in good], dtype="int64"),
            "spo2": pd.Series([r.spo2_pct for r in good], dtype="int64"),
        })
        vitals.to_csv(run_dir / "vitals.csv", index=False, lineterminator="\n")

        with open(run_dir / "network.jsonl", "w", encoding="utf-8", newline="\n") as f:
            for record in self.network.ledger_records():
                f.write(json.dumps(record, sort_keys=True) + "\n")
        with open(run_dir / "report.json", "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        counts = self.network.counts()["http"]
        power = power_report(self.battery, self.ledger, self.end_ms,
                             attempts=counts["submitted"], delivered=counts["delivered"])
        with open(run_dir / "power_report.json", "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(power, indent=2, sort_keys=True) + "\n")
        comparison_frame(compare_to_reference(report)).to_csv(run_dir / "comparison.csv", index=False, lineterminator="\n")
        return run_dir


def run(scenario: Scenario, output_dir: Path | str | None = None) -> RunResult:
    """Simulate a validated scenario; with output_dir, write artifacts to <output_dir>/<name>-seed<seed>/

    Returns:
        RunResult: the report, run directory, effect records and every reading taken
    """
    sim = Simulation(scenario)
    sim.run()
    report = sim.report()
    run_dir = None
    if output_dir is not None:
        run_dir = sim.write_artifacts(Path(output_dir) / scenario.run_name, report)
        Logger('Simulation').info(f"Artifacts written to {run_dir}")
    return RunResult(report=report, run_dir=run_dir, effects=sim.effects, readings=sim.readings)
