"""simulate: one configured run, its diagnostics and the files it leaves behind."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import export, transforms
from .config import RunConfig, dump_run_config
from .dynamics import ModelParams, RunOutcome, SimState, initial_state, reconstruct_f, run
from .errors import ConfigError
from .grid_ops import RadialGrid
from .kernel import QuadratureSpec
from .logging_config import get_logger

logger = get_logger(__name__)

TIMESERIES = "timeseries.csv"
MONITORS = "monitors.csv"
SUMMARY = "summary.json"
SNAPSHOT_COLUMNS = ("r", "g", "gt", "f", "Phi", "Phi2")
MONITOR_COLUMNS = ("t", "modified_energy", "r2g_sup", "g3_ratio", "f_h1", "g_h1", "phi_decay",
                   "parity_defect", "ge62_residual", "boundary_fraction")


def quadrature_spec(config: RunConfig) -> QuadratureSpec:
    q = config.quadrature
    return QuadratureSpec(order=q.order, abs_tol=q.abs_tol, rel_tol=q.rel_tol, max_panels=q.max_panels)


def build_initial_state(config: RunConfig) -> SimState:
    grid = RadialGrid(config.grid.N, config.grid.R, 5)
    if grid.r[0] > config.diagnostics.r0:
        raise ConfigError(f"diagnostics.r0={config.diagnostics.r0} lies inside the first cell "
                          f"(h={grid.h:g}); refine the grid")
    params = ModelParams(N1=config.model.N1, contrast=config.model.contrast)
    return initial_state(grid, config.data, params)


class _Recorder:
    """Sink collecting diagnostics, monitors and snapshots at record times."""

    def __init__(self, config: RunConfig, spec: QuadratureSpec):
        self.config = config
        self.spec = spec
        self.r0 = config.diagnostics.r0
        self.pending = sorted(config.output.snapshot_times)
        self.timeseries: List[transforms.DiagnosticsRecord] = []
        self.monitors: List[transforms.MonitorRecord] = []
        self.snapshots: List[Tuple[float, float, Dict[str, np.ndarray]]] = []

    def __call__(self, state: SimState, step: int, dt: float) -> None:
        phi = transforms.compute_Phi(state, self.spec)
        rec = transforms.diagnostics(state, self.r0, dt, self.spec, phi)
        self.timeseries.append(rec)
        self.monitors.append(transforms.monitors(state, self.r0, self.spec, phi,
                                                 self.config.diagnostics.boundary_cells))
        logger.debug("t=%.6g E=%.12g G=%.6g coercivity=%.6g", rec.t, rec.E, rec.G, rec.coercivity)
        while self.pending and state.t >= self.pending[0] - 1e-12:
            requested = self.pending.pop(0)
            self.snapshots.append((requested, state.t, self._columns(state, phi)))

    def _columns(self, state: SimState, phi) -> Dict[str, np.ndarray]:
        f, _, _ = reconstruct_f(state)
        phi2 = transforms.compute_Phi2(state, self.spec)
        return {"r": state.grid.r, "g": state.g.values, "gt": state.gt.values, "f": f,
                "Phi": phi.values, "Phi2": phi2.values}


def _summary(config: RunConfig, outcome: RunOutcome, rec: _Recorder) -> Dict[str, Any]:
    energies = np.array([d.E for d in rec.timeseries])
    e0 = float(energies[0]) if energies.size else 0.0
    drift = float(np.max(np.abs(energies - e0)) / e0) if e0 > 0 else 0.0
    coercive = [d.coercivity for d in rec.timeseries]
    margins = [d.g1_margin for d in rec.timeseries]
    fractions = [m.boundary_fraction for m in rec.monitors]
    return {
        "outcome": outcome.model_dump(),
        "energy": {"initial": e0, "final": float(energies[-1]) if energies.size else 0.0,
                   "max_relative_drift": drift},
        "extrema": {
            "max_G": outcome.max_G,
            "min_coercivity": min(coercive) if coercive else math.nan,
            "min_g1_margin": min(margins) if margins else math.nan,
            "max_boundary_fraction": max(fractions) if fractions else 0.0,
        },
        "records": len(rec.timeseries),
        "snapshots": [{"requested": q, "t": t, "file": _snapshot_name(k)}
                      for k, (q, t, _) in enumerate(rec.snapshots)],
        "config": dump_run_config(config),
    }


def _snapshot_name(k: int) -> str:
    return f"snapshot_{k:03d}.csv"


def simulate(config: RunConfig, out_dir: Optional[Path] = None) -> Tuple[RunOutcome, Dict[str, Any]]:
    """Run `config` and write timeseries, monitors, snapshots, summary (and plots) to out_dir."""
    out = Path(out_dir or config.output.dir)
    spec = quadrature_spec(config)
    state = build_initial_state(config)
    recorder = _Recorder(config, spec)
    outcome = run(state, config.evolution, sinks=[recorder],
                  boundary_cell_count=config.diagnostics.boundary_cells,
                  boundary_fraction=config.diagnostics.boundary_fraction)

    export.write_csv(out / TIMESERIES, transforms.DiagnosticsRecord.COLUMNS,
                     (d.row() for d in recorder.timeseries))
    export.write_csv(out / MONITORS, MONITOR_COLUMNS,
                     ([m.as_dict()[c] for c in MONITOR_COLUMNS] for m in recorder.monitors))
    for k, (_, _, cols) in enumerate(recorder.snapshots):
        export.write_columns(out / _snapshot_name(k), {c: cols[c] for c in SNAPSHOT_COLUMNS})
    summary = _summary(config, outcome, recorder)
    if config.output.plots and recorder.timeseries:
        t = [d.t for d in recorder.timeseries]
        export.write_svg(out / "energy.svg", t, [d.E for d in recorder.timeseries], "E(t)")
        export.write_svg(out / "continuation.svg", t, [d.G for d in recorder.timeseries], "G(t)")
    export.write_json(out / SUMMARY, summary)
    logger.info("simulate: %s, %d records written to %s", outcome.status, len(recorder.timeseries), out)
    return outcome, summary
