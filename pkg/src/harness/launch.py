import os
from pathlib import Path

import inquirer
from termcolor import colored

from harness.scenario import bundled_scenarios


def main():
    """The purpose of this function is to return an array of arguments that will satisfy the
    main() function of the harness (the `run` verb)

    NOTE: YOU CAN BYPASS ALL THESE QUESTIONS BY SETTING ENVIRONMENT VARIABLES

    Environment variables that can be set:
        DATA_ROOT - Path to the outputs folder. A subfolder pulse-sim will be created if it does not exist (REQUIRED)
        SIM_SCENARIO - bundled scenario name or path to a scenario YAML file (optional)
        SIM_SEED - integer seed overriding the scenario's own (optional)
    """

    if not os.environ.get("DATA_ROOT"):
        raise RuntimeError(colored("\nDATA_ROOT environment variable is not set. Please set it in your .env file\n\n  e.g. DATA_ROOT=/Users/Shared/PulseSimData\n", "red"))
    data_root = Path(os.environ.get("DATA_ROOT"))

    scenario = os.environ.get("SIM_SCENARIO")
    if scenario:
        if scenario not in bundled_scenarios() and not Path(scenario).is_file():
            raise RuntimeError(
                colored(f"\nThe SIM_SCENARIO environment variable is set to '{scenario}' but that is neither a bundled scenario nor a file. Please fix or unset the variable to choose manually.\n", "red"))
    else:
        scenario_question = inquirer.prompt([
            inquirer.List(
                'scenario',
                message="Select a scenario to run",
                choices=list(bundled_scenarios()),
            ),
        ])
        if scenario_question is None:
            print("\nNo scenario selected. Exiting.\n")
            exit(0)
        scenario = scenario_question['scenario']

    args = [
        "run",
        scenario,
        "--output", data_root / "pulse-sim",
    ]

    seed = os.environ.get("SIM_SEED")
    if seed:
        if not seed.isdigit():
            raise RuntimeError(colored(f"\nSIM_SEED must be a non-negative integer, got '{seed}'\n", "red"))
        args.extend(["--seed", seed])

    return args
