"""Interactive launcher for the pulse simulator.

Asks which verb to run and gathers its arguments (from the environment or by
prompting), then executes ``harness.main`` in-process as if it were launched
with ``python -m``. Any command-line arguments given to this launcher are
passed through unchanged instead.
"""

from __future__ import annotations

import logging
import os
import shlex
import sys
import traceback
from dataclasses import dataclass
from importlib import import_module
from pathlib import Path

import inquirer
from termcolor import colored

SRC_ROOT = Path(__file__).resolve().parents[1] / "src"
sys.path.insert(0, str(SRC_ROOT))

from util.prompt import choose_run_dir, prompt_for  # noqa: E402


@dataclass
class VerbEntry:
    """One launchable verb of the harness"""
    verb: str
    display_name: str


VERBS = [
    VerbEntry("run", "Run a scenario"),
    VerbEntry("report", "Build the HTML report of a run"),
    VerbEntry("export", "Export bucketed bpm / SpO2 CSV of a run"),
    VerbEntry("serve", "Serve the telemetry HTTP surface"),
]


def choose_verb() -> VerbEntry:
    return prompt_for([
        inquirer.List(
            "verb",
            message="What do you want to do?",
            choices=[("📋 " + entry.display_name, entry) for entry in VERBS],
        ),
    ], "verb")


def gather_arguments(entry: VerbEntry) -> list[str]:
    """Arguments for harness.main: the run verb asks harness.launch, the others pick a run directory"""
    if entry.verb == "run":
        result = import_module("harness.launch").main()
        if result is None:
            print(colored("Run setup was cancelled by user. Exiting.", "yellow"))
            sys.exit(0)
        return [str(arg) for arg in result]
    if entry.verb == "serve":
        return ["serve"]

    root = Path(os.environ.get("DATA_ROOT", ".")) / "pulse-sim"
    run_dir = choose_run_dir(root)
    args = [entry.verb, str(run_dir)]
    if entry.verb == "export":
        bucket = prompt_for([
            inquirer.List("bucket", message="Bucket size", choices=["minutes", "hours", "days"], default="minutes"),
        ], "bucket")
        args.extend(["--bucket", bucket])
    return args


def launch(extra_args: list[str]) -> int:
    """Execute harness.main within this process and return its exit code"""
    sys.argv = ["harness.main"] + extra_args
    module = import_module("harness.main")
    print(f"Arguments: {' '.join(shlex.quote(arg) for arg in sys.argv)}")
    logging.getLogger("LOGGER").propagate = False
    try:
        module.main()
        return 0
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except Exception as exc:
        print(colored(f"Error running pulse-sim: {exc}", "red"))
        traceback.print_exc()
        return 1


def main() -> int:
    if len(sys.argv) > 1:
        return launch(sys.argv[1:])
    return launch(gather_arguments(choose_verb()))


if __name__ == "__main__":
    sys.exit(main())
