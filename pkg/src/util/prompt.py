"""Interactive prompts that exit cleanly when the user cancels."""
from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping, Sequence

import inquirer
from termcolor import colored

CANCELLED = "Input cancelled by user. Exiting."


def safe_prompt(questions: Sequence[Any], *, exit_message: str = CANCELLED, exit_code: int = 0) -> Mapping[str, Any]:
    """Run an inquirer prompt; Ctrl-C or an empty answer exits with exit_code"""
    try:
        answers = inquirer.prompt(list(questions))
    except KeyboardInterrupt as exc:
        print(colored(f"KeyboardInterrupt \n{exit_message}\n", "yellow"))
        raise SystemExit(exit_code) from exc

    if answers is None:
        print(colored(f"\n{exit_message}\n", "yellow"))
        raise SystemExit(exit_code)
    return answers


def prompt_for(questions: Sequence[Any], key: str, *, exit_message: str = CANCELLED, exit_code: int = 0) -> Any:
    """Run a prompt and pull a single answer by key"""
    answers = safe_prompt(questions, exit_message=exit_message, exit_code=exit_code)
    if key not in answers:
        raise KeyError(f"Prompt did not return an answer for '{key}'.")
    return answers[key]


def run_directories(root: Path) -> list[Path]:
    """Run directories under root, newest first. A run directory holds a report.json"""
    if not root.is_dir():
        return []
    runs = [p.parent for p in root.glob("*/report.json")]
    return sorted(runs, key=lambda p: p.stat().st_mtime, reverse=True)


def choose_run_dir(root: Path) -> Path:
    runs = run_directories(root)
    if not runs:
        raise SystemExit(colored(f"\nNo runs found under {root}. Use the run verb first.\n", "red"))
    return prompt_for([
        inquirer.List("run_dir", message="Select a run", choices=[(p.name, p) for p in runs]),
    ], "run_dir")
