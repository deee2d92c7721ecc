"""Utilitário de linha de comando do laboratório."""

import argparse
import sys
from typing import Optional, Sequence

from core.settings import configure_logging
from harness.commands import accept, corrector_run, couple_check, diagnostics, field_sample, pde_run
from harness.commands import scalar_sim, sl2_sim
from shared.exceptions.handlers import EXIT_OK, exit_code_for

COMMANDS = (
    sl2_sim.Command,
    scalar_sim.Command,
    field_sample.Command,
    couple_check.Command,
    corrector_run.Command,
    pde_run.Command,
    accept.Command,
    diagnostics.Command,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sl2lab", description=__doc__)
    subparsers = parser.add_subparsers(dest="command_name", required=True)
    for command_class in COMMANDS:
        command_class().create_parser(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Executa um comando e devolve o exit code (0, 1, 2 ou 3)."""
    configure_logging()
    options = vars(build_parser().parse_args(argv))
    command = options.pop("command")
    try:
        return command.execute(options) or EXIT_OK
    except Exception as exc:
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
