import click

from src.config.config import Config
from src.utils.logging_setup import configure_logging


def create_app() -> click.Group:
  @click.group(help="FB-LTS shallow-water solver on a TRiSK C-grid.")
  @click.option("--log-level", default=None, help="Overrides FBLTS_LOG_LEVEL.")
  def cli(log_level):
    configure_logging(log_level or Config.LOG_LEVEL)

  from src.routes import register_commands

  register_commands(cli)

  return cli
