"""Scattering states, defect diagnostics and the wave operator.

The scattering state is the initial datum plus the backward-transported
accumulation of the collision source over the whole (truncated) horizon;
the wave operator inverts the map by a Picard iteration on the backward
integral equation, mirroring the forward construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .collision import CollisionKernel
from .mild_solver import (
    NonConvergenceError,
    PicardResult,
    SolutionTrajectory,
    SolverConfig,
    _collision_sources,
    _Diverged,
    _trapezoid_weight,
)
from .phase_grid import DistributionFunction, NormTrace, lebesgue_norm_a
from .transport import adjoint_stream, free_stream


def _require_converged(result: PicardResult) -> None:
    if not result.converged:
        raise NonConvergenceError("trajectory is not a converged solve")


def partial_scattering_integrals(
    result: PicardResult, kernel: CollisionKernel, config: SolverConfig
) -> list[DistributionFunction]:
    """Trapezoid partial sums of the backward-transported source over [0, t_k]."""
    _require_converged(result)
    traj = result.trajectory
    sources = _collision_sources(traj.snapshots, kernel)
    dt = config.dt
    back = [adjoint_stream(src, float(t), method=config.interp)
            for src, t in zip(sources, traj.times)]
    partials = [DistributionFunction(traj.grid, np.zeros(traj.grid.shape))]
    for k in range(1, len(back)):
        acc = np.zeros(traj.grid.shape)
        for j in range(k + 1):
            acc = acc + _trapezoid_weight(j, k, dt) * back[j].values
        partials.append(DistributionFunction(traj.grid, acc))
    return partials


def scattering_state(
    result: PicardResult,
    kernel: CollisionKernel,
    config: SolverConfig,
    t_infinity: Optional[float] = None,
) -> DistributionFunction:
    """Asymptotic datum: f0 plus the full backward-transported source integral.

    The infinite upper limit is truncated at t_infinity (default: the
    trajectory horizon).  Requires a converged trajectory.
    """
    _require_converged(result)
    traj = result.trajectory
    horizon = traj.horizon if t_infinity is None else float(t_infinity)
    k = horizon / config.dt
    if abs(k - round(k)) > 1e-9 or not 0 < round(k) < len(traj.snapshots):
        raise ValueError(f"t_infinity={horizon} not on the trajectory lattice")
    k = int(round(k))
    partials = partial_scattering_integrals(result, kernel, config)
    return traj.initial + partials[k]


def scattering_defect(
    result: PicardResult,
    f_plus: DistributionFunction,
    config: SolverConfig,
) -> NormTrace:
    """Container-norm distance of the back-transported state from the asymptote."""
    traj = result.trajectory
    vals = [
        lebesgue_norm_a(adjoint_stream(s, float(t), method=config.interp) - f_plus,
                        config.inv_a)
        for s, t in zip(traj.snapshots, traj.times)
    ]
    return NormTrace(traj.times, np.array(vals))


@dataclass
class WaveResult:
    f0: DistributionFunction
    converged: bool
    diverged: bool
    iterations: int
    deltas: list[float]
    contraction_ratios: list[float]
    trajectory: SolutionTrajectory


def wave_operator(
    f_plus: DistributionFunction,
    kernel: CollisionKernel,
    config: SolverConfig,
) -> WaveResult:
    """Recover the initial datum whose solution scatters to the given state.

    Solves the backward integral equation f(t) = U(t) f+ minus the source
    accumulated over [t, T] by Picard iteration seeded with U(t) f+, and
    returns the state at time zero.  Non-convergence is flagged, not
    raised; it signals a scattering state outside the contractive ball.
    """
    from .exponents import require_usable

    require_usable(config.triplet, f_plus.grid.dim, "norm triplet")
    times = config.times
    dt = config.dt
    n_last = config.n_steps
    streamed = [free_stream(f_plus, float(t), method=config.interp) for t in times]
    current = [s.copy() for s in streamed]
    scale = max(max(lebesgue_norm_a(s, config.inv_a) for s in current), 1e-300)

    deltas: list[float] = []
    ratios: list[float] = []
    converged = False
    diverged = False
    iterations = 0
    for _ in range(config.max_iters):
        sources = _collision_sources(current, kernel)
        new = []
        failed = False
        for k in range(n_last + 1):
            acc = streamed[k].values.copy()
            # trapezoid over [t_k, T]; empty at the final snapshot
            for j in range(k, n_last + 1) if k < n_last else ():
                w = 0.5 * dt if (j == k or j == n_last) else dt
                if j == k:
                    acc = acc - w * sources[j].values
                else:
                    lagged = free_stream(sources[j], (k - j) * dt, method=config.interp)
                    acc = acc - w * lagged.values
            if not np.all(np.isfinite(acc)):
                failed = True
                break
            new.append(DistributionFunction(f_plus.grid, acc))
        if failed:
            diverged = True
            break
        iterations += 1
        delta = max(
            lebesgue_norm_a(n - c, config.inv_a) for n, c in zip(new, current)
        )
        if deltas and deltas[-1] > 0:
            ratios.append(delta / deltas[-1])
        deltas.append(delta)
        current = new
        if delta <= config.picard_tol * scale:
            converged = True
            break
        if delta > 1e6 * scale:
            diverged = True
            break

    traj = SolutionTrajectory(grid=f_plus.grid, times=times, snapshots=current)
    return WaveResult(
        f0=current[0],
        converged=converged,
        diverged=diverged,
        iterations=iterations,
        deltas=deltas,
        contraction_ratios=ratios,
        trajectory=traj,
    )
