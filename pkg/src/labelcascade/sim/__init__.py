"""Deterministic end-to-end simulation harness."""

from labelcascade.sim.config import SimConfig, load_sim_config
from labelcascade.sim.harness import SimResult, gen_pool, run_simulation
from labelcascade.sim.oracle import OracleModel, OracleScorerBackend
from labelcascade.sim.workers import SimWorker, SimulatedCrowd, build_workers, sim_label

__all__ = [
    "OracleModel",
    "OracleScorerBackend",
    "SimConfig",
    "SimResult",
    "SimWorker",
    "SimulatedCrowd",
    "build_workers",
    "gen_pool",
    "load_sim_config",
    "run_simulation",
    "sim_label",
]
