import os
from dotenv import load_dotenv

load_dotenv()

class Config:
  """
    Configuration class for the solver.
    Environment variables (optionally from a .env file) provide run defaults that
    the CLI flags and scenario files can override.
  """

  OUTPUT_DIR = os.getenv("FBLTS_OUTPUT_DIR", "output")
  LOG_LEVEL = os.getenv("FBLTS_LOG_LEVEL", "INFO")
  SEED = int(os.getenv("FBLTS_SEED", 0))
  PROGRESS = os.getenv("FBLTS_PROGRESS", "True").lower() == "true"
  CFL_TEST_STEPS = int(os.getenv("FBLTS_CFL_TEST_STEPS", 200))
