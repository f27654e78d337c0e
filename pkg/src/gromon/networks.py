"""Finite measure networks, couplings, Monge maps and distortion functionals.

A measure network is a finite point set carrying strictly positive
probability weights and a dense real-valued square table ``omega``.  When
``omega`` is a metric the network is a metric measure space; nothing here
assumes symmetry unless explicitly checked.

All containers are immutable after construction and every operation is a
pure function, so everything in this module is safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tolerances, chosen with double-precision headroom for tables up to ~1e4
# entries: mass/marginal checks, metric-axiom checks, and the support
# threshold used by the sup-distortion of a coupling.
TOL_MASS = 1e-9
TOL_METRIC = 1e-9
EPS_SUPP = 1e-12


class MarginalError(ValueError):
    """A table's row/column sums do not match the prescribed weights."""


class NotMeasurePreservingError(ValueError):
    """An assignment does not push the source weights onto the target weights."""


def check_exponent(p) -> float:
    """Validate an order parameter: a float >= 1, with ``math.inf`` allowed."""
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"exponent must satisfy p >= 1 (math.inf allowed), got {p}")
    return p


def parse_exponent(text) -> float:
    """Parse ``'inf'`` or a decimal string into a valid exponent."""
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    return check_exponent(float(t))


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


def _fsum(a: np.ndarray) -> float:
    # Exactly-rounded accumulation; keeps oracle equalities reproducible to 1e-12.
    return math.fsum(np.asarray(a, dtype=float).ravel().tolist())


def _check_weights(w: np.ndarray, what: str = "weights") -> None:
    if w.ndim != 1 or w.size == 0:
        raise ValueError(f"{what} must be a nonempty 1-d vector")
    if not np.all(np.isfinite(w)):
        raise ValueError(f"{what} must be finite")
    if np.any(w <= 0.0):
        raise ValueError(f"{what} must be strictly positive; zero-weight points are rejected")
    mass = math.fsum(w.tolist())
    if abs(mass - 1.0) > TOL_MASS:
        raise ValueError(f"{what} must sum to 1 within {TOL_MASS:g}, got {mass!r}")


@dataclass(frozen=True, eq=False)
class MeasureNetwork:
    """A finite measure network: weights (probability vector) and an n x n table."""

    weights: np.ndarray
    omega: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        _check_weights(w)
        om = np.asarray(self.omega, dtype=float)
        if om.shape != (w.size, w.size):
            raise ValueError(f"omega must be {w.size}x{w.size}, got {om.shape}")
        if not np.all(np.isfinite(om)):
            raise ValueError("omega entries must be finite")
        if self.labels is not None:
            if len(self.labels) != w.size:
                raise ValueError("labels length does not match weights")
            object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "omega", _frozen(om))

    @property
    def n(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class MetricFlag:
    """Outcome of a metric-axiom scan: verdict plus the largest violation found."""

    is_metric: bool
    max_violation: float


@dataclass(frozen=True, eq=False)
class Coupling:
    """Nonnegative table with prescribed row sums (source) and column sums (target)."""

    table: np.ndarray
    source_weights: np.ndarray
    target_weights: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        sw = np.asarray(self.source_weights, dtype=float)
        tw = np.asarray(self.target_weights, dtype=float)
        _check_weights(sw, "source_weights")
        _check_weights(tw, "target_weights")
        if t.shape != (sw.size, tw.size):
            raise ValueError(f"table must be {sw.size}x{tw.size}, got {t.shape}")
        if not np.all(np.isfinite(t)):
            raise ValueError("coupling table must be finite")
        if np.any(t < 0.0):
            raise ValueError("coupling table must be nonnegative")
        row_dev = float(np.abs(t.sum(axis=1) - sw).max())
        col_dev = float(np.abs(t.sum(axis=0) - tw).max())
        if row_dev > TOL_MASS or col_dev > TOL_MASS:
            raise MarginalError(
                f"marginal mismatch: rows off by {row_dev:g}, columns off by {col_dev:g}"
            )
        object.__setattr__(self, "table", _frozen(t))
        object.__setattr__(self, "source_weights", _frozen(sw))
        object.__setattr__(self, "target_weights", _frozen(tw))

    @property
    def shape(self) -> tuple[int, int]:
        return self.table.shape


@dataclass(frozen=True, eq=False)
class MongeMap:
    """An index map given as an assignment array with entries in {0, ..., m-1}."""

    assignment: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.intp)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("assignment must be a nonempty 1-d integer array")
        if a.min() < 0:
            raise ValueError("assignment entries must be nonnegative indices")
        object.__setattr__(self, "assignment", _frozen(a, dtype=np.intp))

    @property
    def n(self) -> int:
        return self.assignment.size


def check_measure_preserving(phi: MongeMap, source_weights, target_weights,
                             tol: float = TOL_MASS) -> None:
    """Raise unless ``phi`` pushes the source weights onto the target weights."""
    sw = np.asarray(source_weights, dtype=float)
    tw = np.asarray(target_weights, dtype=float)
    a = phi.assignment
    if a.size != sw.size:
        raise NotMeasurePreservingError(
            f"assignment length {a.size} does not match source size {sw.size}"
        )
    if a.max() >= tw.size:
        raise NotMeasurePreservingError("assignment targets out of range")
    pushed = np.bincount(a, weights=sw, minlength=tw.size)
    dev = float(np.abs(pushed - tw).max())
    if dev > tol:
        raise NotMeasurePreservingError(f"pushforward misses target weights by {dev:g}")


def _check_couples(pi: Coupling, netX: MeasureNetwork, netY: MeasureNetwork) -> None:
    if pi.shape != (netX.n, netY.n):
        raise MarginalError(f"coupling shape {pi.shape} does not match ({netX.n}, {netY.n})")
    row_dev = float(np.abs(pi.table.sum(axis=1) - netX.weights).max())
    col_dev = float(np.abs(pi.table.sum(axis=0) - netY.weights).max())
    if row_dev > TOL_MASS or col_dev > TOL_MASS:
        raise MarginalError(
            f"coupling does not couple these networks: rows off by {row_dev:g}, "
            f"columns off by {col_dev:g}"
        )


def product_coupling(netX: MeasureNetwork, netY: MeasureNetwork) -> Coupling:
    """The independent coupling w_i * v_j; always feasible."""
    return Coupling(np.outer(netX.weights, netY.weights), netX.weights, netY.weights)


def simplex_network(n: int) -> MeasureNetwork:
    """Uniform n-point space with the discrete metric (0 on the diagonal, 1 off)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    omega = np.ones((n, n)) - np.eye(n)
    return MeasureNetwork(np.full(n, 1.0 / n), omega)


def one_point_network() -> MeasureNetwork:
    return simplex_network(1)


def pseudometric_violation(omega: np.ndarray) -> float:
    """Largest violation of symmetry, zero diagonal, nonnegativity or triangles."""
    om = np.asarray(omega, dtype=float)
    sym = float(np.abs(om - om.T).max())
    diag = float(np.abs(np.diag(om)).max())
    neg = float(max(0.0, -om.min()))
    # tri[i,j,k] = om[i,j] - om[i,k] - om[k,j]
    tri = float(max(0.0, (om[:, :, None] - om[:, None, :] - om.T[None, :, :]).max()))
    return max(sym, diag, neg, tri)


def validate_network(net: MeasureNetwork, tol_metric: float = TOL_METRIC) -> MetricFlag:
    """Scan all metric axioms of ``net.omega``; report verdict and worst violation."""
    om = net.omega
    violation = pseudometric_violation(om)
    distinct = True
    if net.n > 1:
        off = om[~np.eye(net.n, dtype=bool)]
        distinct = bool(off.min() > tol_metric)
    return MetricFlag(is_metric=bool(violation <= tol_metric and distinct),
                      max_violation=violation)


def distortion_p(netX: MeasureNetwork, netY: MeasureNetwork, pi: Coupling,
                 p, eps_supp: float = EPS_SUPP) -> float:
    """p-distortion of a coupling.

    For finite p this is the L^p norm, under the product of the coupling with
    itself, of the mismatch |omega_X(i,k) - omega_Y(j,l)|.  For p = inf it is
    the sup of the mismatch over ordered pairs of support cells, where the
    support consists of table entries strictly above ``eps_supp``.
    """
    p = check_exponent(p)
    _check_couples(pi, netX, netY)
    t = pi.table
    if math.isinf(p):
        rows, cols = np.nonzero(t > eps_supp)
        dx = netX.omega[np.ix_(rows, rows)]
        dy = netY.omega[np.ix_(cols, cols)]
        return float(np.abs(dx - dy).max())
    diff = np.abs(netX.omega[:, None, :, None] - netY.omega[None, :, None, :]) ** p
    terms = diff * t[:, :, None, None] * t[None, None, :, :]
    return _fsum(terms) ** (1.0 / p)


def distortion_map(netX: MeasureNetwork, netY: MeasureNetwork, phi: MongeMap, p) -> float:
    """p-distortion of a measure-preserving map, via the simplified double sum.

    Equals ``distortion_p`` of the induced coupling; the double-sum form skips
    building the coupling table.
    """
    p = check_exponent(p)
    check_measure_preserving(phi, netX.weights, netY.weights)
    a = phi.assignment
    pulled = netY.omega[np.ix_(a, a)]
    if math.isinf(p):
        return float(np.abs(netX.omega - pulled).max())
    w = netX.weights
    terms = np.abs(netX.omega - pulled) ** p * np.outer(w, w)
    return _fsum(terms) ** (1.0 / p)


def coupling_from_map(phi: MongeMap, source_weights, target_weights) -> Coupling:
    """The sparse coupling induced by a measure-preserving map."""
    sw = np.asarray(source_weights, dtype=float)
    tw = np.asarray(target_weights, dtype=float)
    check_measure_preserving(phi, sw, tw)
    table = np.zeros((sw.size, tw.size))
    table[np.arange(sw.size), phi.assignment] = sw
    return Coupling(table, sw, tw)


def size_p(net: MeasureNetwork, p) -> float:
    """p-size of a network: the L^p norm of |omega| under weights x weights."""
    p = check_exponent(p)
    if math.isinf(p):
        return float(np.abs(net.omega).max())
    w = net.weights
    terms = np.abs(net.omega) ** p * np.outer(w, w)
    return _fsum(terms) ** (1.0 / p)


def pullback_network(net_metric: MeasureNetwork, rho: MongeMap,
                     source_weights) -> MeasureNetwork:
    """Pull a metric back along a measure-preserving map.

    The result lives on the source index set and carries
    ``omega(z, z') = d(rho(z), rho(z'))``; it is always a pseudometric (zeros
    off the diagonal are permitted).
    """
    flag = validate_network(net_metric)
    if not flag.is_metric:
        raise ValueError(
            f"pullback requires a metric network (worst axiom violation {flag.max_violation:g})"
        )
    sw = np.asarray(source_weights, dtype=float)
    check_measure_preserving(rho, sw, net_metric.weights)
    a = rho.assignment
    return MeasureNetwork(sw, net_metric.omega[np.ix_(a, a)])
