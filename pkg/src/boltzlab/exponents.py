"""Exact-rational exponent algebra for kinetic-transport admissibility.

All exponents live here as reciprocals (Fraction objects in [0, 1]; the
reciprocal 0 encodes an infinite exponent).  Every comparison is exact:
the feasibility boundaries below are measure-zero sets, so floating point
is deliberately kept out of this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

RationalLike = Union[Fraction, int, str]

#: reciprocal encoding of an infinite exponent
INF_RECIP = Fraction(0)


def as_fraction(x: RationalLike) -> Fraction:
    """Coerce ints / 'a/b' strings / Fractions to Fraction (exact)."""
    if isinstance(x, float):
        raise TypeError("floating point is not allowed in exponent arithmetic")
    return Fraction(x)


def reciprocal_of_exponent(value: RationalLike) -> Fraction:
    """Map an exponent given as a rational (or 'inf') to its reciprocal."""
    if isinstance(value, str) and value.strip().lower() in ("inf", "oo", "infinity"):
        return INF_RECIP
    v = as_fraction(value)
    if v < 1:
        raise ValueError(f"exponent must be >= 1 or 'inf', got {v}")
    return Fraction(1) / v


def exponent_of_reciprocal(inv: Fraction) -> str:
    """Render a reciprocal back as an exponent string ('inf' for 0)."""
    return "inf" if inv == 0 else str(Fraction(1) / inv)


def _check_unit_interval(name: str, value: Fraction) -> Fraction:
    if not (0 <= value <= 1):
        raise ValueError(f"{name}={value} outside [0, 1]")
    return value


@dataclass(frozen=True)
class ExponentTriplet:
    """Reciprocals (1/q, 1/r, 1/p) of a time/space/velocity exponent triplet."""

    inv_q: Fraction
    inv_r: Fraction
    inv_p: Fraction

    def __post_init__(self):
        for name in ("inv_q", "inv_r", "inv_p"):
            v = as_fraction(getattr(self, name))
            _check_unit_interval(name, v)
            object.__setattr__(self, name, v)

    @property
    def inv_a(self) -> Fraction:
        """Reciprocal of the harmonic mean of (p, r)."""
        return harmonic_mean(self.inv_p, self.inv_r)

    def conjugate(self) -> "ExponentTriplet":
        """Reciprocal-wise Hölder conjugation 1/p -> 1 - 1/p."""
        return ExponentTriplet(1 - self.inv_q, 1 - self.inv_r, 1 - self.inv_p)

    def __str__(self) -> str:
        q, r, p = (exponent_of_reciprocal(v) for v in (self.inv_q, self.inv_r, self.inv_p))
        return f"(q={q}, r={r}, p={p})"


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    is_endpoint: bool
    violated_conditions: tuple[str, ...]
    inv_a: Fraction

    def __post_init__(self):
        if self.admissible and self.violated_conditions:
            raise ValueError("admissible report cannot carry violated conditions")

    def to_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "is_endpoint": self.is_endpoint,
            "violated_conditions": list(self.violated_conditions),
            "a": exponent_of_reciprocal(self.inv_a),
            "inv_a": str(self.inv_a),
        }


def harmonic_mean(inv_p: RationalLike, inv_r: RationalLike) -> Fraction:
    """Reciprocal of the harmonic mean: returns (inv_p + inv_r) / 2, exactly."""
    ip = _check_unit_interval("inv_p", as_fraction(inv_p))
    ir = _check_unit_interval("inv_r", as_fraction(inv_r))
    return (ip + ir) / 2


def _window_bounds(inv_a: Fraction, n_dim: int) -> tuple[Fraction, Fraction]:
    """Reciprocals of the extremal exponents (p*, r*) of the admissible window.

    Two-branch formula split at a = (N+1)/N, i.e. at inv_a = N/(N+1).
    Returns (inv_p_star, inv_r_star) with the window being
    inv_a <= inv_p <= inv_p_star  and  inv_r_star <= inv_r <= inv_a.
    """
    if inv_a <= Fraction(n_dim, n_dim + 1):
        inv_p_star = Fraction(n_dim + 1, n_dim) * inv_a
        inv_r_star = Fraction(n_dim - 1, n_dim) * inv_a
    else:
        inv_p_star = Fraction(1)
        inv_r_star = 2 * inv_a - 1
    return inv_p_star, inv_r_star


def kt_admissible(triplet: ExponentTriplet, n_dim: int) -> AdmissibilityReport:
    """Check the kinetic-transport admissibility of an exponent triplet.

    Conditions, all exact: the scaling relation 1/q = (N/2)(1/p - 1/r);
    the harmonic-mean window p*(a) <= p <= a <= r <= r*(a) with the
    two-branch extremal exponents; and the one-dimensional exception
    (q, r, p) = (a, inf, a/2) which is excluded.  Triplets sitting at
    (q, r, p) = (a, r*(a), p*(a)) with (N+1)/N <= a < inf are flagged
    as endpoints (they satisfy the inequalities but the endpoint
    estimate is unavailable, so Strichartz-facing code must reject them).
    """
    if n_dim not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {n_dim}")
    violated: list[str] = []
    inv_a = triplet.inv_a
    if triplet.inv_q != Fraction(n_dim, 2) * (triplet.inv_p - triplet.inv_r):
        violated.append("scaling")
    inv_p_star, inv_r_star = _window_bounds(inv_a, n_dim)
    if not triplet.inv_p <= inv_p_star:
        violated.append("p_lower")      # p >= p*(a)
    if not triplet.inv_p >= inv_a:
        violated.append("p_upper")      # p <= a
    if not triplet.inv_r <= inv_a:
        violated.append("r_lower")      # r >= a
    if not triplet.inv_r >= inv_r_star:
        violated.append("r_upper")      # r <= r*(a)
    if n_dim == 1 and triplet.inv_r == 0 and not violated:
        violated.append("dimension_one_exception")

    is_endpoint = (
        not violated
        and 0 < inv_a <= Fraction(n_dim, n_dim + 1)
        and triplet.inv_p == Fraction(n_dim + 1, n_dim) * inv_a
        and triplet.inv_r == Fraction(n_dim - 1, n_dim) * inv_a
        and triplet.inv_q == inv_a
    )
    return AdmissibilityReport(
        admissible=not violated,
        is_endpoint=is_endpoint,
        violated_conditions=tuple(violated),
        inv_a=inv_a,
    )


def require_usable(triplet: ExponentTriplet, n_dim: int, label: str = "triplet") -> None:
    """Raise unless the triplet is admissible and not an endpoint."""
    report = kt_admissible(triplet, n_dim)
    if not report.admissible:
        raise ValueError(f"{label} {triplet} not admissible: {report.violated_conditions}")
    if report.is_endpoint:
        raise ValueError(f"{label} {triplet} is an endpoint triplet (estimate unavailable)")


def critical_interval(n_dim: int) -> tuple[Fraction, Fraction]:
    """Open interval of 1/p values parametrizing the critical-kernel family."""
    return Fraction(1, n_dim), Fraction(n_dim + 1, n_dim * n_dim)


def critical_triplets(inv_p: RationalLike, n_dim: int) -> tuple[ExponentTriplet, ExponentTriplet]:
    """Primal and dual-primed triplets for the critical kernel power gamma = 2 - N.

    The primal is (1/q, 1/r, 1/p) = (N/p - 1, 2/N - 1/p, 1/p); the
    dual-primed (1/q~', 1/r~', 1/p~') = (2/q, 2/r, 2/p - 1 - gamma/N).
    Valid on the open interval 1/N < 1/p < (N+1)/N^2 for N = 2, 3.
    """
    if n_dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {n_dim}")
    ip = as_fraction(inv_p)
    lo, hi = critical_interval(n_dim)
    if not lo < ip < hi:
        raise ValueError(f"inv_p={ip} outside the open interval ({lo}, {hi})")
    gamma = Fraction(2 - n_dim)
    primal = ExponentTriplet(n_dim * ip - 1, Fraction(2, n_dim) - ip, ip)
    dual_primed = ExponentTriplet(
        2 * primal.inv_q,
        2 * primal.inv_r,
        2 * ip - 1 - gamma / n_dim,
    )
    return primal, dual_primed


def alpha_interval(n_dim: int) -> tuple[Fraction, Fraction]:
    """Open interval of the mixing parameter for the subcritical family."""
    return Fraction(1, 2), Fraction(n_dim + 1, 2 * n_dim)


def subcritical_triplets(
    alpha: RationalLike, gamma: RationalLike, n_dim: int
) -> tuple[ExponentTriplet, ExponentTriplet]:
    """Primal and dual-primed triplets for kernel powers -N < gamma < 2 - N.

    Primal: 1/q = (2a-1)(gamma+N)/2, 1/r = (1-a)(gamma+N)/N,
    1/p = a(gamma+N)/N for the mixing parameter a in (1/2, (N+1)/(2N)).
    The dual-primed pair follows from the bilinear-estimate relations in
    the velocity and space variables, with the dual time exponent pinned
    by admissibility of the conjugated triplet.
    """
    if n_dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {n_dim}")
    g = as_fraction(gamma)
    if not -n_dim < g < 2 - n_dim:
        raise ValueError(f"gamma={g} outside the open interval ({-n_dim}, {2 - n_dim})")
    a = as_fraction(alpha)
    lo, hi = alpha_interval(n_dim)
    if not lo < a < hi:
        raise ValueError(f"alpha={a} outside the open interval ({lo}, {hi})")
    gn = g + n_dim
    primal = ExponentTriplet(
        (2 * a - 1) * gn / 2,
        (1 - a) * gn / n_dim,
        a * gn / n_dim,
    )
    inv_p_tp = 2 * primal.inv_p - 1 - g / n_dim
    inv_r_tp = 2 * primal.inv_r
    # dual time exponent from the scaling relation of the conjugated triplet
    inv_q_tp = 1 - Fraction(n_dim, 2) * (inv_r_tp - inv_p_tp)
    dual_primed = ExponentTriplet(inv_q_tp, inv_r_tp, inv_p_tp)
    return primal, dual_primed


def container_exponent(gamma: RationalLike, n_dim: int) -> Fraction:
    """Reciprocal of the data-space exponent a = 2N/(gamma+N)."""
    g = as_fraction(gamma)
    if not -n_dim < g <= 0:
        raise ValueError(f"gamma={g} outside ({-n_dim}, 0]")
    return (g + n_dim) / (2 * n_dim)


def horizon_power(gamma: RationalLike, n_dim: int) -> Fraction:
    """Power of the horizon gained by the nonlinear term: ((2-N) - gamma)/2."""
    g = as_fraction(gamma)
    if not -n_dim < g < 2 - n_dim:
        raise ValueError(f"gamma={g} outside the open interval ({-n_dim}, {2 - n_dim})")
    return (Fraction(2 - n_dim) - g) / 2


@dataclass(frozen=True)
class FeasiblePoint:
    inv_p: Fraction
    inv_r: Fraction
    inv_q: Fraction
    inv_a: Fraction


@dataclass(frozen=True)
class FeasibleRegion:
    gamma: Fraction
    n_dim: int
    mode: str
    denominator: int
    points: tuple[FeasiblePoint, ...]

    def __len__(self) -> int:
        return len(self.points)


def _feasible_at(inv_p: Fraction, inv_r: Fraction, gamma: Fraction, n_dim: int, mode: str) -> FeasiblePoint | None:
    """Evaluate the full reduced condition system at one (1/p, 1/r) point."""
    kernel_sum = 1 + gamma / n_dim
    if inv_p + inv_r != kernel_sum:                       # velocity/space pairing
        return None
    if mode == "equality":
        if inv_p + inv_r != Fraction(2, n_dim):           # time pairing, equality branch
            return None
    else:
        if not inv_p + inv_r < Fraction(2, n_dim):        # time pairing, strict branch
            return None
    gap = inv_p - inv_r
    if not 0 < gap < Fraction(1, n_dim):                  # 1/q < 1/2 with positive gap
        return None
    if not gap < kernel_sum / 2:                          # dual time exponent positive
        return None

    inv_q = Fraction(n_dim, 2) * gap
    try:
        primal = ExponentTriplet(inv_q, inv_r, inv_p)
    except ValueError:
        return None
    rep = kt_admissible(primal, n_dim)
    if not rep.admissible or rep.is_endpoint:
        return None

    inv_p_tp = 2 * inv_p - 1 - gamma / n_dim
    inv_r_tp = 2 * inv_r
    if inv_r > Fraction(1, 2):                            # r >= 2 needed for the space pairing
        return None
    if mode == "equality":
        inv_q_tp = 2 * inv_q
        if not inv_q_tp < 1:
            return None
    else:
        inv_q_tp = 1 - Fraction(n_dim, 2) * (inv_r_tp - inv_p_tp)
        if not 2 * inv_q < inv_q_tp < 1:                  # strictly positive horizon power
            return None
    try:
        dual_primed = ExponentTriplet(inv_q_tp, inv_r_tp, inv_p_tp)
    except ValueError:
        return None
    # the dual side carries the scaling relation with strict positivity;
    # the harmonic-mean window is imposed on the primal triplet only
    dual = dual_primed.conjugate()
    if not dual.inv_q > 0:
        return None
    if dual.inv_q != Fraction(n_dim, 2) * (dual.inv_p - dual.inv_r):
        return None
    return FeasiblePoint(inv_p=inv_p, inv_r=inv_r, inv_q=inv_q, inv_a=primal.inv_a)


def feasibility_scan(
    gamma: RationalLike, n_dim: int, mode: str, denominator: int = 120
) -> FeasibleRegion:
    """Brute-force scan of the condition system over a rational lattice.

    Tests every (1/p, 1/r) in the open unit square with the given
    denominator against the full reduced condition system (equality mode
    for the global-regime system, strict mode for the finite-horizon
    system), including admissibility of both the primal and the
    conjugated dual triplet with endpoints excluded.
    """
    if mode not in ("equality", "strict"):
        raise ValueError(f"mode must be 'equality' or 'strict', got {mode!r}")
    if n_dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {n_dim}")
    g = as_fraction(gamma)
    if not -n_dim < g <= 0:
        raise ValueError(f"gamma={g} outside ({-n_dim}, 0]")
    if denominator < 2:
        raise ValueError("denominator must be at least 2")

    points = []
    # the kernel pairing pins inv_r once inv_p is chosen; scan inv_p only
    kernel_sum = 1 + g / n_dim
    for k in range(1, denominator):
        inv_p = Fraction(k, denominator)
        inv_r = kernel_sum - inv_p
        if not 0 < inv_r < 1:
            continue
        if inv_r.denominator and (inv_r * denominator).denominator != 1:
            continue  # off-lattice partner
        pt = _feasible_at(inv_p, inv_r, g, n_dim, mode)
        if pt is not None:
            points.append(pt)
    points.sort(key=lambda p: p.inv_p)
    return FeasibleRegion(gamma=g, n_dim=n_dim, mode=mode, denominator=denominator, points=tuple(points))


def critical_lattice_points(n_dim: int, denominator: int) -> tuple[FeasiblePoint, ...]:
    """Closed-form lattice enumeration of the critical family (gamma = 2 - N)."""
    lo, hi = critical_interval(n_dim)
    pts = []
    for k in range(1, denominator):
        inv_p = Fraction(k, denominator)
        if not lo < inv_p < hi:
            continue
        inv_r = Fraction(2, n_dim) - inv_p
        if (inv_r * denominator).denominator != 1:
            continue
        inv_q = n_dim * inv_p - 1
        pts.append(FeasiblePoint(inv_p=inv_p, inv_r=inv_r, inv_q=inv_q,
                                 inv_a=harmonic_mean(inv_p, inv_r)))
    return tuple(sorted(pts, key=lambda p: p.inv_p))


def subcritical_lattice_points(
    gamma: RationalLike, n_dim: int, denominator: int
) -> tuple[FeasiblePoint, ...]:
    """Closed-form lattice enumeration of the subcritical family."""
    g = as_fraction(gamma)
    if not -n_dim < g < 2 - n_dim:
        raise ValueError(f"gamma={g} outside the open interval ({-n_dim}, {2 - n_dim})")
    gn = g + n_dim
    lo = gn / (2 * n_dim)                                  # alpha = 1/2
    hi = Fraction(n_dim + 1, 2 * n_dim) * gn / n_dim       # alpha = (N+1)/(2N), endpoint
    pts = []
    for k in range(1, denominator):
        inv_p = Fraction(k, denominator)
        if not lo < inv_p < hi:
            continue
        inv_r = 1 + g / n_dim - inv_p
        if (inv_r * denominator).denominator != 1:
            continue
        inv_q = Fraction(n_dim, 2) * (inv_p - inv_r)
        pts.append(FeasiblePoint(inv_p=inv_p, inv_r=inv_r, inv_q=inv_q,
                                 inv_a=harmonic_mean(inv_p, inv_r)))
    return tuple(sorted(pts, key=lambda p: p.inv_p))
