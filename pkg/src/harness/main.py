# Standard library
import argparse
import json
import logging
import os
import sys
import traceback
from pathlib import Path

# 3rd party imports
from rsxml import Logger, dotenv
from rsxml.util import safe_makedirs
from termcolor import colored

from harness.__version__ import __version__
from harness.compare import ComparisonRow, compare_to_reference, comparison_frame
from harness.export import series_frame, write_series_csv
from harness.figures import comparison_table, metric_cards, vitals_chart
from harness.run_report import RunReport
from harness.runner import run
from harness.scenario import ScenarioError, load_scenario, resolve_scenario
from telemetry import RATE_LIMIT_MS, BucketUnit, TelemetryService, load_snapshot
from telemetry.server import monotonic_clock, serve as serve_http
from util.html import HtmlReport

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FLAGGED = 2


def default_output() -> Path:
    return Path(os.environ.get("DATA_ROOT", ".")) / "pulse-sim"


def print_comparison(rows: list[ComparisonRow]) -> None:
    for row in rows:
        colour = "red" if row.flagged else "green"
        print(colored(f"  {row.label:<30} ref {row.reference_text:>10}   run {row.run_text:>10}   {row.delta_text:>9}", colour))


def run_scenario(scenario_arg: str, output: Path, seed: int | None = None) -> Path:
    log = Logger('Run')
    scenario = load_scenario(resolve_scenario(scenario_arg))
    if seed is not None:
        scenario = scenario.with_seed(seed)
    log.info(f"Scenario: {scenario.name} (seed {scenario.seed})")
    result = run(scenario, output)
    report = result.report
    log.info(f"Uploads attempted {report.uploads_attempted}, received {report.uploads_received} "
             f"(ratio {report.ratio_text}); alerts {len(report.alerts)}; SMS sent {report.sms_sent}")
    print_comparison(compare_to_reference(report))
    return result.run_dir


def make_report(run_dir: Path) -> tuple[Path, bool]:
    """Render report.html and comparison.csv for a finished run.

    Returns:
        tuple[Path, bool]: the HTML path and whether any comparison row is flagged
    """
    log = Logger('Make report')
    with open(run_dir / "report.json", "r", encoding="utf-8") as f:
        report = RunReport.from_dict(json.load(f))
    entries = load_snapshot(run_dir / "telemetry.jsonl")
    rows = compare_to_reference(report)
    comparison_frame(rows).to_csv(run_dir / "comparison.csv", index=False, lineterminator="\n")

    page = HtmlReport(
        report_name=f"{report.scenario} - seed {report.seed}",
        report_type="Wearable pulse monitor simulation",
        report_dir=run_dir,
        body_template_path=Path(__file__).parent / 'templates' / 'body.html',
        css_paths=[Path(__file__).parent / 'templates' / 'report.css'],
        report_version=__version__,
    )
    if entries:
        page.add_figure("vitals", vitals_chart(series_frame(entries, BucketUnit.MINUTES)))
    page.add_html_elements('cards', metric_cards(report))
    page.add_html_elements('comparison', comparison_table(rows))
    page.add_html_elements('scenario', {"name": report.scenario, "seed": report.seed,
                                        "duration": f"{report.duration_ms / 1000:g} s"})
    page.add_html_elements('alerts', [{**a.to_dict(), "t_s": a.t_ms / 1000} for a in report.alerts])
    html_path = page.render()

    log.title('Report Generation Complete')
    print_comparison(rows)
    return html_path, any(r.flagged for r in rows)


def serve(host: str, port: int, api_key: str, snapshot: Path | None = None) -> None:
    log = Logger('Serve')
    service = TelemetryService()
    channel = service.create_channel(api_key, name="pulse-sim")
    origin = 0
    if snapshot is not None:
        entries = load_snapshot(snapshot)
        with channel.lock:
            channel.entries.extend(entries)
            channel.last_update_ms = entries[-1].created_at_ms if entries else None
        if entries:
            origin = entries[-1].created_at_ms + RATE_LIMIT_MS
        log.info(f"Loaded {len(entries)} entries from {snapshot}")
    base = monotonic_clock()
    log.info(f"Telemetry listening on http://{host}:{port} "
             f"(channel {channel.id})")
    serve_http(service, host, port, clock=lambda: origin + base())
    log.info("Telemetry server stopped")


def main():
    """ Main function to parse arguments and dispatch the verb
    """
    parser = argparse.ArgumentParser(prog="pulse-sim", description="Wearable heart-rate / SpO2 monitor simulator")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='verb', required=True)

    p_run = sub.add_parser('run', help='simulate a scenario and write its artifacts')
    p_run.add_argument('scenario', help='bundled scenario name or path to a scenario YAML file')
    p_run.add_argument('--output', type=Path, default=None, help='output root; the run directory is created inside it')
    p_run.add_argument('--seed', type=int, default=None, help='override the scenario seed')

    p_report = sub.add_parser('report', help='render the HTML report and reference comparison of a run')
    p_report.add_argument('rundir', type=Path)

    p_export = sub.add_parser('export', help='write bucketed bpm / SpO2 averages as CSV')
    p_export.add_argument('rundir', type=Path)
    p_export.add_argument('--bucket', choices=[b.value for b in BucketUnit], default=BucketUnit.MINUTES.value)
    p_export.add_argument('--n', type=int, default=1, help='bucket width in units')

    p_serve = sub.add_parser('serve', help='run the telemetry HTTP surface standalone')
    p_serve.add_argument('--host', default='127.0.0.1')
    p_serve.add_argument('--port', type=int, default=8080)
    p_serve.add_argument('--api-key', dest='api_key', default='PULSESIMWRITE001')
    p_serve.add_argument('--snapshot', type=Path, default=None, help='telemetry.jsonl to preload')
    p_serve.add_argument('--output', type=Path, default=None, help='folder for harness.log')

    # NOTE: IF WE CHANGE THESE VALUES PLEASE UPDATE ./launch.py

    args = dotenv.parse_args_env(parser)

    if args.verb in ('report', 'export'):
        output_path = Path(args.rundir).parent
    else:
        output_path = Path(args.output) if args.output else default_output()
    safe_makedirs(str(output_path))

    log = Logger('Setup')
    log.setup(log_path=output_path / 'harness.log', log_level=logging.DEBUG)
    log.title(f'pulse-sim {args.verb}')
    log.info(f"Output path: {output_path}")
    log.info(f"Version: {__version__}")

    exit_code = EXIT_OK
    try:
        match args.verb:
            case 'run':
                run_dir = run_scenario(args.scenario, output_path, args.seed)
                log.info(f"Run directory: {run_dir}")
            case 'report':
                html_path, flagged = make_report(Path(args.rundir))
                log.info(f"Report: {html_path}")
                if flagged:
                    log.warning("One or more metrics deviate from the reference values")
                    exit_code = EXIT_FLAGGED
            case 'export':
                rundir = Path(args.rundir)
                out = write_series_csv(load_snapshot(rundir / "telemetry.jsonl"),
                                       rundir / f"series-{args.bucket}.csv", args.bucket, args.n)
                log.info(f"Series written to {out}")
            case 'serve':
                serve(args.host, args.port, args.api_key, args.snapshot)

    except ScenarioError as e:
        log.error(e.message)
        for problem in e.problems:
            print(colored(f"  - {problem}", "red"))
        sys.exit(EXIT_INVALID)
    except Exception as e:
        log.error(e)
        traceback.print_exc(file=sys.stdout)
        sys.exit(EXIT_INVALID)

    sys.exit(exit_code)


if __name__ == "__main__":
    main()
