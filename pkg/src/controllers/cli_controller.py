import functools
import logging
from pathlib import Path
from typing import Optional

import click
import yaml
from pydantic import ValidationError

from src.config.config import Config
from src.dtos.scenario_dtos import ScenarioConfig, Scheme
from src.repositories import OutputRepository, load_mesh, save_mesh
from src.services.errors import FbltsError, LabelingError, MeshFormatError, MeshSizingError
from src.services.harness import (
  build_scenario,
  cfl_scan,
  conservation_driver,
  convergence_driver,
  perf_driver,
  run_scenario,
)
from src.services.mesh import build_periodic_hex_mesh, validate_mesh

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class ConfigError(click.ClickException):
  exit_code = EXIT_CONFIG


class RunError(click.ClickException):
  exit_code = EXIT_RUNTIME


def load_config(path: str) -> ScenarioConfig:
  """Parse a YAML/JSON scenario file into a validated ScenarioConfig."""
  try:
    with open(path, "r", encoding="utf-8") as fh:
      raw = yaml.safe_load(fh)
  except (OSError, yaml.YAMLError) as e:
    raise ConfigError(f"cannot read config {path}: {e}")
  if not isinstance(raw, dict):
    raise ConfigError(f"config {path} must be a mapping")
  try:
    return ScenarioConfig.model_validate(raw)
  except ValidationError as e:
    raise ConfigError(f"invalid config {path}:\n{e}")


def _out_dir(out: Optional[str], config: Optional[ScenarioConfig] = None) -> Path:
  if out:
    return Path(out)
  if config is not None and config.outputDir:
    return Path(config.outputDir)
  return Path(Config.OUTPUT_DIR)


def _seed(seed: Optional[int], config: ScenarioConfig) -> int:
  if seed is not None:
    return seed
  return config.seed if config.seed is not None else Config.SEED


SETUP_ERRORS = (MeshSizingError, MeshFormatError, LabelingError)


def solver_errors(func):
  """Map solver failures to exit code 3; bad meshes, fine regions and arguments to exit 2."""

  @functools.wraps(func)
  def wrapper(*args, **kwargs):
    try:
      return func(*args, **kwargs)
    except click.ClickException:
      raise
    except SETUP_ERRORS as e:
      raise ConfigError(str(e))
    except FbltsError as e:
      logger.error("aborted: %s", e)
      raise RunError(str(e))
    except (ValidationError, ValueError) as e:
      raise ConfigError(str(e))

  return wrapper


config_option = click.option(
  "--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False),
  help="Scenario YAML/JSON file.",
)
out_option = click.option("--out", default=None, help="Output directory (FBLTS_OUTPUT_DIR if omitted).")
seed_option = click.option("--seed", default=None, type=int, help="Random seed for velocity noise.")


@click.command("run")
@config_option
@out_option
@seed_option
@solver_errors
def run_command(config_path, out, seed):
  """Step the configured scheme to runLength and write record/state CSVs."""
  config = load_config(config_path)
  scenario = build_scenario(config, seed=_seed(seed, config))
  out_dir = _out_dir(out, config)
  result = run_scenario(scenario, out_dir, progress=Config.PROGRESS)
  click.echo(f"{result.steps} steps of {config.scheme.value}; outputs in {out_dir}")


@click.command("converge")
@config_option
@out_option
@seed_option
@click.option("-M", "--subcycles", "M", default=4, show_default=True, type=click.IntRange(min=1))
@solver_errors
def converge_command(config_path, out, seed, M):
  """Temporal convergence against an RK4 reference."""
  config = load_config(config_path)
  scenario = build_scenario(config, seed=_seed(seed, config))
  table = convergence_driver(scenario, M=M)
  path = OutputRepository(_out_dir(out, config)).write_report(table, "convergence.csv")
  click.echo(table.to_string(index=False))
  click.echo(f"written to {path}")


@click.command("cfl-scan")
@config_option
@out_option
@seed_option
@click.option("--steps", default=None, type=click.IntRange(min=1), help="Coarse steps per stability trial.")
@click.option("--scheme", "schemes", multiple=True, type=click.Choice([s.value for s in Scheme]))
@solver_errors
def cfl_scan_command(config_path, out, seed, steps, schemes):
  """Maximum stable dt per scheme by bisection."""
  config = load_config(config_path)
  scenario = build_scenario(config, seed=_seed(seed, config))
  chosen = [Scheme(s) for s in schemes] or None
  table = cfl_scan(scenario, chosen, steps, default_test_steps=Config.CFL_TEST_STEPS)
  path = OutputRepository(_out_dir(out, config)).write_report(table, "cfl_scan.csv")
  click.echo(table.to_string(index=False))
  click.echo(f"written to {path}")


@click.command("conserve")
@config_option
@out_option
@seed_option
@click.option("--steps", default=None, type=click.IntRange(min=1))
@solver_errors
def conserve_command(config_path, out, seed, steps):
  """Relative drift of mass, absolute vorticity and PV volume."""
  config = load_config(config_path)
  scenario = build_scenario(config, seed=_seed(seed, config))
  report = conservation_driver(scenario, steps, progress=Config.PROGRESS)
  path = OutputRepository(_out_dir(out, config)).write_report(report.as_frame(), "conservation.csv")
  click.echo(report.as_frame().to_string(index=False))
  click.echo(f"written to {path}")


@click.command("perf")
@config_option
@out_option
@seed_option
@solver_errors
def perf_command(config_path, out, seed):
  """Wall time, eval counts and speedups of RK4, FB-RK(3,2) and FB-LTS."""
  config = load_config(config_path)
  scenario = build_scenario(config, seed=_seed(seed, config))
  table = perf_driver(scenario)
  path = OutputRepository(_out_dir(out, config)).write_report(table, "perf.csv")
  click.echo(table.to_string(index=False))
  click.echo(f"written to {path}")


@click.group("mesh")
def mesh_group():
  """Generate and check mesh files."""


@mesh_group.command("gen")
@click.option("--nx", required=True, type=int)
@click.option("--ny", required=True, type=int)
@click.option("--dc", required=True, type=float, help="Cell spacing (m).")
@click.option("--coriolis", default=1e-4, show_default=True, type=float)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Mesh JSON path.")
@solver_errors
def mesh_gen_command(nx, ny, dc, coriolis, out):
  mesh = build_periodic_hex_mesh(nx, ny, dc, coriolis=coriolis)
  path = save_mesh(mesh, out)
  click.echo(f"{mesh.nCells} cells, {mesh.nEdges} edges, {mesh.nVertices} vertices -> {path}")


@mesh_group.command("check")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@solver_errors
def mesh_check_command(path):
  """Load a mesh file and report every invariant."""
  report = validate_mesh(load_mesh(path))
  for check in report.checks:
    status = "ok" if check.passed else "FAIL"
    click.echo(f"{status:4} {check.name:24} {check.magnitude:.3e} {check.detail if not check.passed else ''}")
  if not report.conservation_hypotheses_hold:
    click.echo(f"{report.boundary_edges} boundary edges: conservation results do not apply")
  if not report.ok:
    raise RunError("mesh failed validation")
