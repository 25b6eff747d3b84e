import click

from src.controllers.cli_controller import (
  cfl_scan_command,
  conserve_command,
  converge_command,
  mesh_group,
  perf_command,
  run_command,
)


def register_commands(cli: click.Group) -> None:
  cli.add_command(run_command)
  cli.add_command(converge_command)
  cli.add_command(cfl_scan_command)
  cli.add_command(conserve_command)
  cli.add_command(perf_command)
  cli.add_command(mesh_group)
