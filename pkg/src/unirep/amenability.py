"""Random-walk and almost-invariant-vector probes of amenability.

The probes are one-sided numerical certificates: return probabilities of
the symmetric walk (exact rational convolution up to a configurable
step), the smallest eigenvalue of the averaged shift-defect form on
Cayley balls, and a certified interval for the walk's spectral radius.
For the free kinds on their standard generators the walk distribution is
constant on spheres, so the convolution runs on the exact radial chain
instead of the full (exponentially growing) support.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, PreconditionError, ResourceLimitError
from .groups import (
    Ball,
    FreeGroupOracle,
    GroupOracle,
    ball,
    symmetric_generators,
)
from .reps import Regular
from .vectors import SparseVector

DEFAULT_EXACT_STEPS = 40
DEFAULT_SUPPORT_CAP = 100_000
RATIO_SLACK = 1e-12


@dataclass
class ReturnProbabilityTable:
    """Return probabilities p_{2n}(e) of the symmetric walk with estimator traces."""

    n_max: int
    p: dict            # even step -> Fraction (exact) or float
    exact_through: int
    root_estimates: dict = field(default_factory=dict)   # 2n -> p^{1/(2n)}
    ratio_estimates: dict = field(default_factory=dict)  # 2n -> sqrt(p_{2n+2}/p_{2n})

    def __post_init__(self):
        steps = sorted(self.p)
        if steps[0] != 0 or self.p[0] != 1:
            raise PreconditionError("return probabilities must start at p_0 = 1")
        for s in steps:
            value = float(self.p[s])
            if not (0 < value <= 1):
                raise PreconditionError(f"return probability out of range at step {s}")
            if s > 0:
                self.root_estimates[s] = value ** (1.0 / s)
        for a, b in zip(steps, steps[1:]):
            ratio = (float(self.p[b]) / float(self.p[a])) ** 0.5
            if ratio > 1 + RATIO_SLACK:
                raise PreconditionError(f"ratio estimator exceeds 1 at step {a}")
            self.ratio_estimates[a] = ratio

    @property
    def final_ratio(self) -> float:
        return self.ratio_estimates[max(self.ratio_estimates)]

    @property
    def final_root(self) -> float:
        return self.root_estimates[max(self.root_estimates)]


def _free_radial_returns(rank: int, n_max: int) -> dict:
    """Exact distances-to-identity chain of the walk on a free group.

    The step distribution is uniform on the unit sphere and convolution
    preserves constancy on spheres, so tracking per-sphere mass is exact.
    """
    d = Fraction(2 * rank)
    out_frac = Fraction(2 * rank - 1) / d
    in_frac = Fraction(1) / d
    mass = {0: Fraction(1)}
    p = {0: Fraction(1)}
    for step in range(1, n_max + 1):
        new: dict = {}
        for k, m in mass.items():
            if k == 0:
                new[1] = new.get(1, Fraction(0)) + m
            else:
                new[k + 1] = new.get(k + 1, Fraction(0)) + m * out_frac
                new[k - 1] = new.get(k - 1, Fraction(0)) + m * in_frac
        mass = new
        if step % 2 == 0:
            p[step] = mass.get(0, Fraction(0))
    return p


def return_probabilities(oracle: GroupOracle, S=None, n_max: int = DEFAULT_EXACT_STEPS,
                         exact_steps: int = DEFAULT_EXACT_STEPS,
                         support_cap: int = DEFAULT_SUPPORT_CAP) -> ReturnProbabilityTable:
    """p_{2n}(e) for the uniform walk on S union S^-1, exact up to ``exact_steps``.

    The walk distribution is convolved on explicit group elements with no
    truncation; rational arithmetic is used through ``exact_steps`` and
    double precision beyond. Exceeding ``support_cap`` raises a resource
    error naming the step reached.
    """
    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    steps = symmetric_generators(oracle, S)
    if not steps:
        p = {s: Fraction(1) for s in range(0, n_max + 1, 2)}
        return ReturnProbabilityTable(n_max, p, n_max)
    if isinstance(oracle, FreeGroupOracle) and set(steps) == set(
        symmetric_generators(oracle)
    ):
        p = _free_radial_returns(oracle.rank, n_max)
        return ReturnProbabilityTable(n_max, p, n_max)
    e = oracle.identity()
    weight = Fraction(1, len(steps))
    dist = {e: Fraction(1)}
    exact = True
    p = {0: Fraction(1)}
    for step in range(1, n_max + 1):
        if exact and step > exact_steps:
            dist = {x: float(m) for x, m in dist.items()}
            exact = False
        new: dict = {}
        w = weight if exact else float(weight)
        for x, m in dist.items():
            mw = m * w
            for s in steps:
                y = oracle.multiply(s, x)
                new[y] = new.get(y, 0) + mw
        if len(new) > support_cap:
            raise ResourceLimitError(
                f"walk support {len(new)} exceeds cap {support_cap} at step {step}"
            )
        dist = new
        if step % 2 == 0:
            p[step] = dist.get(e, Fraction(0) if exact else 0.0)
    return ReturnProbabilityTable(n_max, p, min(n_max, exact_steps))


def _compressed_markov(oracle, S, r, ball_cap):
    """Index arrays of the ball-compressed averaged shift operator."""
    B = ball(oracle, r, ball_cap)
    steps = symmetric_generators(oracle, S)
    index = {x: i for i, x in enumerate(B.elements)}
    rows, cols = [], []
    for x, ix in index.items():
        for s in steps:
            y = oracle.multiply(s, x)
            iy = index.get(y)
            if iy is not None:
                rows.append(iy)
                cols.append(ix)
    return B, len(steps), np.asarray(rows), np.asarray(cols)


def _top_eigenpair(matvec, dim, tol, max_iter):
    """Power iteration for the top eigenvalue of a PSD operator.

    Starts from the constant vector, which has positive overlap with the
    Perron eigenvector of a connected nonnegative operator. Returns the
    Rayleigh quotient and residual norm; the Rayleigh quotient of any
    vector is a certified lower bound for the top eigenvalue.
    """
    v = np.full(dim, 1.0 / dim ** 0.5)
    rayleigh = 0.0
    for it in range(1, max_iter + 1):
        w = matvec(v)
        rayleigh = float(np.real(np.dot(v, w)))
        residual = float(np.linalg.norm(w - rayleigh * v))
        if residual <= tol:
            return rayleigh, residual, v, it
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0, 0.0, v, it
        v = w / norm
    raise ConvergenceError(
        f"power iteration did not reach residual {tol} in {max_iter} steps",
        best=rayleigh,
    )


@dataclass
class DefectReport:
    """Smallest averaged squared shift defect over unit vectors on a Cayley ball."""

    radius: int
    min_avg_sq_defect: float
    argmin: SparseVector
    residual: float
    certified_lower_bound: float
    certified_lower_bound_used: bool
    iterations: int


def min_defect(oracle: GroupOracle, S=None, r: int = 4, tol: float = 1e-9,
               max_iter: int = 500_000, ball_cap: int = DEFAULT_SUPPORT_CAP) -> DefectReport:
    """Minimum of (1/|S+S^-1|) sum_s ||shift_s(w) - w||^2 over unit w on the ball.

    The quadratic form equals 2(I - M) with M the ball-compressed averaged
    shift operator, assembled exactly from ball adjacency; its smallest
    eigenvalue is located by shifted power iteration with a residual-based
    certificate: the true minimum lies within ``residual`` of the value.
    """
    if r < 0:
        raise PreconditionError("radius must be non-negative")
    space = Regular(oracle)
    steps = symmetric_generators(oracle, S)
    if not steps:
        e = oracle.identity()
        return DefectReport(r, 0.0, SparseVector(space, {(0, e): 1.0}), 0.0, 0.0, True, 0)
    B, deg, rows, cols = _compressed_markov(oracle, S, r, ball_cap)
    dim = len(B.elements)

    def matvec(v):
        # 2I + 2M, the positive shift of the defect form 2(I - M)
        mv = np.zeros(dim)
        np.add.at(mv, rows, v[cols])
        return 2.0 * v + 2.0 * mv / deg

    top, residual, vec, iters = _top_eigenpair(matvec, dim, tol, max_iter)
    value = 4.0 - top
    argmin = SparseVector(space, {(0, x): vec[i] for i, x in enumerate(B.elements)})
    lower = max(0.0, value - residual)
    return DefectReport(r, value, argmin, residual, lower, residual <= tol, iters)


@dataclass
class SpectralRadiusInterval:
    """Certified interval for the norm of the averaged shift operator."""

    radius: int
    lower: float
    upper: float
    lower_residual: float
    iterations: int
    table: ReturnProbabilityTable | None = None

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper


def _certified_upper(oracle, S) -> float:
    """Upper bound for the walk's spectral radius.

    The operator norm of an average of unitaries is at most 1. On a free
    group with its standard generators the Cayley graph is the 2k-regular
    tree, where the weight function (2k-1)^(-|x|/2) witnesses the sharp
    Schur-test bound sqrt(2k-1)/k.
    """
    if isinstance(oracle, FreeGroupOracle) and set(symmetric_generators(oracle, S)) == set(
        symmetric_generators(oracle)
    ):
        k = oracle.rank
        return (2 * k - 1) ** 0.5 / k
    return 1.0


def spectral_radius_bound(oracle: GroupOracle, S=None, r: int = 6, n_max: int | None = None,
                          tol: float = 1e-9, max_iter: int = 500_000,
                          ball_cap: int = DEFAULT_SUPPORT_CAP,
                          exact_steps: int = DEFAULT_EXACT_STEPS,
                          support_cap: int = DEFAULT_SUPPORT_CAP) -> SpectralRadiusInterval:
    """Certified spectral-radius interval from ball compression and norm bounds.

    The lower end is the Rayleigh quotient of the converged power-iteration
    vector for the ball-compressed averaged shift operator (any Rayleigh
    quotient is a true lower bound); the upper end is a certified norm
    bound. Optionally attaches the return-probability table with its
    monotone ratio trace for ``n_max`` steps.
    """
    steps = symmetric_generators(oracle, S)
    table = None
    if n_max is not None:
        table = return_probabilities(oracle, S, n_max, exact_steps, support_cap)
    if not steps:
        return SpectralRadiusInterval(r, 1.0, 1.0, 0.0, 0, table)
    B, deg, rows, cols = _compressed_markov(oracle, S, r, ball_cap)
    dim = len(B.elements)

    def matvec(v):
        # I + M keeps the spectrum nonnegative for the power iteration
        mv = np.zeros(dim)
        np.add.at(mv, rows, v[cols])
        return v + mv / deg

    top, residual, _vec, iters = _top_eigenpair(matvec, dim, tol, max_iter)
    lower = top - 1.0
    upper = _certified_upper(oracle, S)
    return SpectralRadiusInterval(r, lower, min(1.0, max(upper, lower)), residual, iters, table)
