import os
import json
import logging

from pydantic import BaseModel, Field

PROGRESS_LOGGER = "gdrr.progress"

progress_logger = logging.getLogger(PROGRESS_LOGGER)


def _env_bool(name, default):
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


class SolverSettings(BaseModel):
    log_level: str = "INFO"
    time_limit: float = Field(default=60.0, gt=0)
    threads: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    alpha: float = Field(default=1.2, gt=0)
    beta: float = Field(default=0.05, ge=0, lt=1)
    output_dir: str = "outputs"
    # scale the LAHC history length with the time limit
    scale_history: bool = True
    # one JSON record per line on the progress logger
    progress: bool = True


def load_settings():
    """Settings from GDRR_* environment variables, falling back to defaults"""
    return SolverSettings(
        log_level=os.environ.get("GDRR_LOG_LEVEL", "INFO"),
        time_limit=float(os.environ.get("GDRR_TIME_LIMIT", 60)),
        threads=int(os.environ.get("GDRR_THREADS", 1)),
        seed=int(os.environ.get("GDRR_SEED", 0)),
        alpha=float(os.environ.get("GDRR_ALPHA", 1.2)),
        beta=float(os.environ.get("GDRR_BETA", 0.05)),
        output_dir=os.environ.get("GDRR_OUTPUT_DIR", "outputs"),
        scale_history=_env_bool("GDRR_SCALE_HISTORY", True),
        progress=_env_bool("GDRR_PROGRESS", True),
    )


def setup_logging(level="INFO", progress=True):
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    progress_logger.disabled = not progress


def emit_progress(record):
    """Machine-readable progress line (goal lowered, best updated, worker finished)"""
    if progress_logger.isEnabledFor(logging.INFO):
        progress_logger.info(json.dumps(record, sort_keys=True, default=str))


def ensure_dir(path):
    if path:
        os.makedirs(path, exist_ok=True)
    return path


settings = load_settings()
