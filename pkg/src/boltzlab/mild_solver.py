"""Picard fixed-point solver for the transport-collision integral equation.

The solution map sends a trajectory f to U(t) f0 plus the transported
accumulation of the collision source, discretized by trapezoid on the
snapshot lattice with the collision operator evaluated at snapshots
only.  Iteration starts from the free-streaming seed U(t) f0.
Non-convergence within the iteration budget is a reported outcome, not
an error: data outside the contractive regime is expected to fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .collision import CollisionKernel, collision_operator
from .exponents import ExponentTriplet, as_fraction, horizon_power, require_usable
from .phase_grid import (
    DistributionFunction,
    NormTrace,
    PhaseGrid,
    lebesgue_norm_a,
    mixed_norm_xv,
    time_norm,
)
from .transport import free_stream


class NonConvergenceError(RuntimeError):
    """Raised when an operation requires a converged solve but got none."""


@dataclass(frozen=True)
class SolverConfig:
    horizon: float
    dt: float
    picard_tol: float
    max_iters: int
    triplet: ExponentTriplet
    inv_a: Fraction
    interp: str = "cubic"

    def __post_init__(self):
        if self.horizon <= 0 or self.dt <= 0:
            raise ValueError("horizon and dt must be positive")
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(f"dt={self.dt} does not divide horizon={self.horizon}")
        if self.picard_tol <= 0:
            raise ValueError("picard_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        object.__setattr__(self, "inv_a", as_fraction(self.inv_a))
        if not 0 <= self.inv_a <= 1:
            raise ValueError(f"inv_a={self.inv_a} outside [0, 1]")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "dt": self.dt,
            "picard_tol": self.picard_tol,
            "max_iters": self.max_iters,
            "q": str(Fraction(1) / self.triplet.inv_q) if self.triplet.inv_q else "inf",
            "r": str(Fraction(1) / self.triplet.inv_r) if self.triplet.inv_r else "inf",
            "p": str(Fraction(1) / self.triplet.inv_p) if self.triplet.inv_p else "inf",
            "a": str(Fraction(1) / self.inv_a) if self.inv_a else "inf",
            "interp": self.interp,
        }


@dataclass
class SolutionTrajectory:
    grid: PhaseGrid
    times: np.ndarray
    snapshots: list[DistributionFunction]
    norm_a_trace: Optional[NormTrace] = None
    norm_rp_trace: Optional[NormTrace] = None

    def __post_init__(self):
        if len(self.snapshots) != self.times.size:
            raise ValueError("snapshot count does not match the time lattice")

    @property
    def initial(self) -> DistributionFunction:
        return self.snapshots[0]

    @property
    def horizon(self) -> float:
        return float(self.times[-1])


@dataclass
class PicardResult:
    trajectory: SolutionTrajectory
    converged: bool
    diverged: bool
    iterations: int
    deltas: list[float]
    contraction_ratios: list[float]

    @property
    def limiting_ratio(self) -> float:
        return self.contraction_ratios[-1] if self.contraction_ratios else 0.0


class _Diverged(Exception):
    pass


def _trapezoid_weight(j: int, k: int, dt: float) -> float:
    return 0.5 * dt if (j == 0 or j == k) else dt


def _collision_sources(snapshots: Sequence[DistributionFunction],
                       kernel: CollisionKernel) -> list[DistributionFunction]:
    return [collision_operator(s, kernel) for s in snapshots]


def _apply_solution_map(
    snapshots: Sequence[DistributionFunction],
    f0: DistributionFunction,
    kernel: CollisionKernel,
    config: SolverConfig,
) -> list[DistributionFunction]:
    dt = config.dt
    sources = _collision_sources(snapshots, kernel)
    out = [f0.copy()]
    for k in range(1, len(snapshots)):
        acc = free_stream(f0, k * dt, method=config.interp).values
        for j in range(k):
            lagged = free_stream(sources[j], (k - j) * dt, method=config.interp)
            acc = acc + _trapezoid_weight(j, k, dt) * lagged.values
        acc = acc + _trapezoid_weight(k, k, dt) * sources[k].values
        if not np.all(np.isfinite(acc)):
            raise _Diverged
        out.append(DistributionFunction(f0.grid, acc))
    return out


def duhamel_apply(
    traj: SolutionTrajectory,
    f0: DistributionFunction,
    kernel: CollisionKernel,
    config: SolverConfig,
) -> SolutionTrajectory:
    """One application of the solution map to a trajectory on the lattice."""
    if traj.times.size != config.n_steps + 1 or abs(traj.times[-1] - config.horizon) > 1e-9:
        raise ValueError("trajectory does not live on the configured time lattice")
    snaps = _apply_solution_map(traj.snapshots, f0, kernel, config)
    return SolutionTrajectory(grid=traj.grid, times=config.times, snapshots=snaps)


def _sup_norm_a(snapshots: Sequence[DistributionFunction], inv_a: Fraction) -> float:
    return max(lebesgue_norm_a(s, inv_a) for s in snapshots)


def attach_traces(traj: SolutionTrajectory, config: SolverConfig) -> None:
    """Record the container-norm and mixed-norm traces on a trajectory."""
    a_vals = [lebesgue_norm_a(s, config.inv_a) for s in traj.snapshots]
    rp_vals = [mixed_norm_xv(s, config.triplet.inv_r, config.triplet.inv_p)
               for s in traj.snapshots]
    traj.norm_a_trace = NormTrace(traj.times, np.array(a_vals))
    traj.norm_rp_trace = NormTrace(traj.times, np.array(rp_vals))


def space_time_norm(traj: SolutionTrajectory, config: SolverConfig) -> float:
    """Full mixed norm: exponent-q time accumulation of the (r, p) trace."""
    if traj.norm_rp_trace is None:
        attach_traces(traj, config)
    return time_norm(traj.norm_rp_trace, config.triplet.inv_q)


def picard_solve(
    f0: DistributionFunction,
    kernel: CollisionKernel,
    config: SolverConfig,
) -> PicardResult:
    """Iterate the solution map from the free-streaming seed to a fixed point.

    Convergence is declared when the sup-in-time container-norm change of
    the iterate falls below picard_tol relative to the seed scale.
    """
    require_usable(config.triplet, f0.grid.dim, "norm triplet")
    times = config.times
    current = [free_stream(f0, t, method=config.interp) for t in times]
    scale = max(_sup_norm_a(current, config.inv_a), 1e-300)

    deltas: list[float] = []
    ratios: list[float] = []
    converged = False
    diverged = False
    iterations = 0
    for _ in range(config.max_iters):
        try:
            new = _apply_solution_map(current, f0, kernel, config)
        except _Diverged:
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

    traj = SolutionTrajectory(grid=f0.grid, times=times, snapshots=current)
    attach_traces(traj, config)
    return PicardResult(
        trajectory=traj,
        converged=converged,
        diverged=diverged,
        iterations=iterations,
        deltas=deltas,
        contraction_ratios=ratios,
    )


@dataclass
class EstimateReport:
    """Empirical constants and fitted exponents from a family of runs."""

    kind: str
    records: list[dict]
    c1: Optional[float] = None
    c2: Optional[float] = None
    c3: Optional[float] = None
    fitted_exponent: Optional[float] = None
    target_exponent: Optional[float] = None
    residual: Optional[float] = None
    largest_contractive_amplitude: Optional[float] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "records": self.records}
        for name in ("c1", "c2", "c3", "fitted_exponent", "target_exponent",
                     "residual", "largest_contractive_amplitude"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        return out


def smallness_study(
    f0_base: DistributionFunction,
    kernel: CollisionKernel,
    config: SolverConfig,
    amplitudes: Sequence[float],
) -> EstimateReport:
    """Fit the solution norm against C1 ||f0|| + C2 ||f||^2 across amplitudes.

    The fit has no intercept (both sides vanish with the data), so a zero
    amplitude contributes a trivial row; at least two distinct nonzero
    amplitudes are required for the two-parameter fit to be determined.
    """
    nonzero = sorted({a for a in amplitudes if a != 0})
    if len(nonzero) < 2:
        raise ValueError("need at least two distinct nonzero amplitudes")
    records = []
    rows, rhs = [], []
    largest_ok = None
    for amp in sorted(amplitudes):
        f0 = float(amp) * f0_base
        result = picard_solve(f0, kernel, config)
        y = lebesgue_norm_a(f0, config.inv_a)
        x = space_time_norm(result.trajectory, config)
        rec = {
            "amplitude": float(amp),
            "norm_f0": y,
            "norm_qrp": x,
            "converged": result.converged,
            "limiting_ratio": result.limiting_ratio,
        }
        records.append(rec)
        if result.converged:
            rows.append([y, x * x])
            rhs.append(x)
            geometric = all(r < 1 for r in result.contraction_ratios)
            if amp != 0 and geometric:
                largest_ok = max(largest_ok or 0.0, float(amp))
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    c1, c2 = float(coef[0]), float(coef[1])

    # residual over the small-amplitude half of the converged runs
    conv = [r for r in records if r["converged"] and r["amplitude"] > 0]
    half = conv[: max(1, (len(conv) + 1) // 2)]
    rel = [
        abs(r["norm_qrp"] - (c1 * r["norm_f0"] + c2 * r["norm_qrp"] ** 2)) / r["norm_qrp"]
        for r in half
        if r["norm_qrp"] > 0
    ]
    residual = float(np.sqrt(np.mean(np.square(rel)))) if rel else None
    return EstimateReport(
        kind="smallness",
        records=records,
        c1=c1,
        c2=c2,
        residual=residual,
        largest_contractive_amplitude=largest_ok,
    )


def dual_source_triplet(triplet: ExponentTriplet, gamma, n_dim: int) -> ExponentTriplet:
    """Exponents of the space where the quadratic source is measured.

    Velocity: 2/p = 1 + gamma/N + 1/p~'; space: 1/r~' = 2/r; time pinned
    by the scaling relation of the conjugated triplet.
    """
    g = as_fraction(gamma)
    inv_p_tp = 2 * triplet.inv_p - 1 - g / n_dim
    inv_r_tp = 2 * triplet.inv_r
    inv_q_tp = 1 - Fraction(n_dim, 2) * (inv_r_tp - inv_p_tp)
    return ExponentTriplet(inv_q_tp, inv_r_tp, inv_p_tp)


def tbeta_study(
    f0: DistributionFunction,
    kernel: CollisionKernel,
    config: SolverConfig,
    horizons: Sequence[float],
) -> EstimateReport:
    """Measure the horizon scaling of the nonlinear Duhamel contribution.

    For the fixed free-streaming probe f(t) = U(t) f0, the quadratic
    source Q(f, f) is measured over [0, T] in its dual-exponent space
    (where the horizon power enters through the time pairing), and the
    ratio against ||f||^2 in the solution space is fitted log-log in T.
    The transported accumulation W(t) Q and its norm are recorded per
    horizon as diagnostics.  Requires the kernel power strictly inside
    the finite-horizon range.
    """
    target = horizon_power(kernel.gamma, f0.grid.dim)  # validates gamma range
    require_usable(config.triplet, f0.grid.dim, "norm triplet")
    dual = dual_source_triplet(config.triplet, kernel.gamma, f0.grid.dim)
    horizons = sorted(float(t) for t in horizons)
    if len(horizons) < 2:
        raise ValueError("need at least two horizons to fit an exponent")
    dt = config.dt
    ks = []
    for t_h in horizons:
        k = t_h / dt
        if abs(k - round(k)) > 1e-9:
            raise ValueError(f"horizon {t_h} is not on the dt={dt} lattice")
        ks.append(int(round(k)))
    k_max = ks[-1]
    times = np.arange(k_max + 1) * dt

    seed = [free_stream(f0, t, method=config.interp) for t in times]
    sources = _collision_sources(seed, kernel)
    source_norm = np.array(
        [mixed_norm_xv(q, dual.inv_r, dual.inv_p) for q in sources]
    )
    seed_norm = np.array(
        [mixed_norm_xv(s, config.triplet.inv_r, config.triplet.inv_p) for s in seed]
    )
    w_norm = np.zeros(k_max + 1)
    for k in range(1, k_max + 1):
        acc = free_stream(sources[0], k * dt, method=config.interp).values \
            * _trapezoid_weight(0, k, dt)
        for j in range(1, k):
            lagged = free_stream(sources[j], (k - j) * dt, method=config.interp)
            acc = acc + _trapezoid_weight(j, k, dt) * lagged.values
        acc = acc + _trapezoid_weight(k, k, dt) * sources[k].values
        w_norm[k] = mixed_norm_xv(DistributionFunction(f0.grid, acc),
                                  config.triplet.inv_r, config.triplet.inv_p)

    records = []
    log_t, log_ratio = [], []
    for t_h, k in zip(horizons, ks):
        window = times[: k + 1]
        m_dual = time_norm(NormTrace(window, source_norm[: k + 1]), dual.inv_q)
        m_w = time_norm(NormTrace(window, w_norm[: k + 1]), config.triplet.inv_q)
        n = time_norm(NormTrace(window, seed_norm[: k + 1]), config.triplet.inv_q)
        ratio = m_dual / n ** 2
        records.append({
            "horizon": t_h,
            "source_dual_norm": m_dual,
            "w_norm": m_w,
            "probe_norm": n,
            "ratio": ratio,
        })
        log_t.append(math.log(t_h))
        log_ratio.append(math.log(ratio))
    slope = float(np.polyfit(log_t, log_ratio, 1)[0])
    return EstimateReport(
        kind="horizon_power",
        records=records,
        fitted_exponent=slope,
        target_exponent=float(target),
    )


@dataclass
class LipschitzReport:
    ratio: float
    degenerate: bool
    forward: Optional[PicardResult] = None
    perturbed: Optional[PicardResult] = None


def lipschitz_check(
    f0: DistributionFunction,
    g0: DistributionFunction,
    kernel: CollisionKernel,
    config: SolverConfig,
) -> LipschitzReport:
    """Ratio of the solution-trajectory distance to the data distance."""
    den = lebesgue_norm_a(f0 - g0, config.inv_a)
    if den == 0.0:
        return LipschitzReport(ratio=0.0, degenerate=True)
    rf = picard_solve(f0, kernel, config)
    rg = picard_solve(g0, kernel, config)
    if not (rf.converged and rg.converged):
        raise NonConvergenceError("both solves must converge for the Lipschitz ratio")
    diff_vals = [
        mixed_norm_xv(a - b, config.triplet.inv_r, config.triplet.inv_p)
        for a, b in zip(rf.trajectory.snapshots, rg.trajectory.snapshots)
    ]
    num = time_norm(NormTrace(config.times, np.array(diff_vals)), config.triplet.inv_q)
    return LipschitzReport(ratio=num / den, degenerate=False, forward=rf, perturbed=rg)
