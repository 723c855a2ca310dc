"""Finite containment data: Gram functions, discrepancy, and witness search.

A Gram function records, for a finite element set F and vectors
v_1..v_n, the matrices M[g]_{ij} = <rep(g) v_i, v_j>. One representation
approximately contains another's finite data when witnesses in it
reproduce the target Gram function entrywise within a tolerance; this
module searches for such witnesses over explicit finite-dimensional
subspaces, builds almost-invariant box vectors for the amenable group
kinds with a certified defect, and transfers witnesses from an explicit
extension back into a stack of shift copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import itertools

import numpy as np

from .errors import (
    KindMismatchError,
    PreconditionError,
    ResourceLimitError,
    UnsupportedKindError,
)
from .groups import GroupOracle, ball, symmetric_generators
from .reps import (
    DirectSum,
    Multiple,
    Regular,
    Representation,
    Subspace,
    Trivial,
)
from .vectors import SparseVector, delta, inner, orthonormalize

GRAM_SYMMETRY_TOL = 1e-8
DEFAULT_SUPPORT_CAP = 100_000
DEFAULT_FRESH_CAP = 256


@dataclass
class GramFunction:
    """Matrices g -> <rep(g)v_i, v_j> over a finite ordered element set F."""

    oracle: GroupOracle | None
    F: list
    n: int
    M: dict

    def __post_init__(self):
        if not self.F:
            raise PreconditionError("Gram function needs a nonempty element set")
        if len(set(map(repr, self.F))) != len(self.F):
            raise PreconditionError("Gram function element set has duplicates")
        for g in self.F:
            A = np.asarray(self.M[g], dtype=complex)
            if A.shape != (self.n, self.n):
                raise PreconditionError(f"Gram matrix at {g!r} has wrong shape {A.shape}")
            self.M[g] = A
        if self.oracle is not None:
            e = self.oracle.identity()
            if e in self.M:
                A = self.M[e]
                if np.max(np.abs(A - A.conj().T)) > GRAM_SYMMETRY_TOL:
                    raise PreconditionError("Gram matrix at the identity is not Hermitian")
                if np.min(np.linalg.eigvalsh((A + A.conj().T) / 2)) < -GRAM_SYMMETRY_TOL:
                    raise PreconditionError("Gram matrix at the identity is not PSD")
            for g in self.F:
                ginv = self.oracle.invert(g)
                if ginv in self.M:
                    if np.max(np.abs(self.M[ginv] - self.M[g].conj().T)) > GRAM_SYMMETRY_TOL:
                        raise PreconditionError(
                            f"Gram matrices at {g!r} and its inverse are not adjoint"
                        )

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(self.M[g]))) for g in self.F)


def gram(rep: Representation, vectors, F, oracle=None) -> GramFunction:
    """Gram function of the vectors under ``rep`` over the element set ``F``."""
    vectors = list(vectors)
    if not vectors:
        raise PreconditionError("gram needs at least one vector")
    for v in vectors:
        if v.space != rep:
            raise KindMismatchError("gram vector lives outside the representation space")
    F = list(F)
    M = {}
    for g in F:
        moved = [rep.apply(g, v) for v in vectors]
        # M[g][i][j] = <rep(g)v_i, v_j>
        M[g] = np.array([[inner(mv, w) for w in vectors] for mv in moved], dtype=complex)
    return GramFunction(oracle if oracle is not None else rep.oracle, F, len(vectors), M)


def discrepancy(target: GramFunction, rep: Representation, witnesses) -> float:
    """Max-abs deviation of the witnesses' Gram function from the target."""
    witnesses = list(witnesses)
    if len(witnesses) != target.n:
        raise PreconditionError(
            f"expected {target.n} witnesses, got {len(witnesses)}"
        )
    worst = 0.0
    for g in target.F:
        moved = [rep.apply(g, w) for w in witnesses]
        for i in range(target.n):
            for j in range(target.n):
                dev = abs(complex(target.M[g][i, j]) - inner(moved[i], witnesses[j]))
                if dev > worst:
                    worst = dev
    return float(worst)


def trivial_target(oracle: GroupOracle, F=None) -> GramFunction:
    """Gram data of one invariant unit vector: M[g] = [[1]] over F.

    The default F is the identity together with the symmetric generating
    set; keeping the identity pins the witness norm, without which the
    data can be matched by rescaling alone.
    """
    if F is None:
        F = [oracle.identity()] + symmetric_generators(oracle)
    F = list(F)
    return GramFunction(oracle, F, 1, {g: np.array([[1.0 + 0j]]) for g in F})


@dataclass
class WitnessReport:
    witnesses: list
    discrepancy: float
    iterations: int
    converged: bool


def _objective_and_gradient(C, tensors, targets):
    """Sum of squared deviations and its matrix gradient for coefficients C."""
    f = 0.0
    G = np.zeros_like(C)
    worst = 0.0
    for T, M in zip(tensors, targets):
        D = C @ T @ C.conj().T - M
        f += float(np.sum(np.abs(D) ** 2))
        worst = max(worst, float(np.max(np.abs(D))))
        G += D.conj().T @ C @ T + D @ C @ T.conj().T
    return f, 2.0 * G, worst


def search_witness(target: GramFunction, pi: Representation, basis: Subspace,
                   tol: float, budget: int = 1500, seed: int = 0,
                   restarts: int = 8) -> WitnessReport:
    """Search for witness vectors in the span of ``basis``.

    Minimizes the smooth sum-of-squares surrogate of the max-abs deviation
    by gradient descent with backtracking line search, restarting from
    seeded random coefficient matrices; the best restart wins, ties going
    to the earliest. The reported discrepancy is always the recomputed
    max-abs deviation of the returned witnesses.
    """
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    K = basis.dim
    if K == 0:
        raise PreconditionError("witness search needs a nonempty basis")
    n = target.n
    tensors = []
    targets = []
    for g in target.F:
        moved = [pi.apply(g, b) for b in basis.basis]
        T = np.array([[inner(mb, b) for b in basis.basis] for mb in moved], dtype=complex)
        tensors.append(T)
        targets.append(target.M[g])
    rng = np.random.default_rng(seed)
    scale = max(target.max_abs(), 1e-6) ** 0.5 / max(K, 1) ** 0.5
    best_C, best_disc, total_iters = None, float("inf"), 0
    for _ in range(max(1, restarts)):
        C = scale * (rng.standard_normal((n, K)) + 1j * rng.standard_normal((n, K)))
        f, G, worst = _objective_and_gradient(C, tensors, targets)
        step = 1.0
        for _ in range(max(1, budget)):
            total_iters += 1
            if worst <= tol:
                break
            gnorm2 = float(np.sum(np.abs(G) ** 2))
            if gnorm2 <= 1e-24 * (1.0 + f):
                break
            accepted = False
            while step > 1e-18:
                C_new = C - step * G
                f_new, G_new, worst_new = _objective_and_gradient(C_new, tensors, targets)
                if f_new <= f - 1e-4 * step * gnorm2:
                    C, f, G, worst = C_new, f_new, G_new, worst_new
                    step *= 1.5
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
        if worst < best_disc:
            best_disc, best_C = worst, C
        if best_disc <= tol:
            break
    witnesses = [basis.from_coords(best_C[i]) for i in range(n)]
    disc = discrepancy(target, pi, witnesses)
    return WitnessReport(witnesses, disc, total_iters, bool(disc <= tol))


def ball_delta_basis(rep: Representation, r: int, copy: int = 0,
                     cap: int = DEFAULT_SUPPORT_CAP) -> Subspace:
    """Delta vectors on the Cayley ball of one shift copy; exactly orthonormal."""
    atom = rep.resolve(copy)
    if not isinstance(atom, Regular):
        raise PreconditionError("ball basis requires a shift copy at the given index")
    B = ball(atom.oracle, r, cap)
    return Subspace(rep, [delta(rep, copy, x) for x in B.elements], validate=False)


def _box_support(oracle, N):
    """Box over the free coordinates, full range over torsion coordinates."""
    ranges = [range(N) if m == 0 else range(m) for m in oracle.moduli]
    return [tuple(t) for t in itertools.product(*ranges)]


def _box_defect_sq(oracle, g, N) -> Fraction:
    """Exact squared shift defect of the normalized box indicator."""
    overlap = Fraction(1)
    for c, m in zip(g, oracle.moduli):
        if m == 0:
            if abs(c) >= N:
                return Fraction(2)
            overlap *= Fraction(N - abs(c), N)
        # torsion coordinates wrap, so they never lose overlap
    return 2 * (1 - overlap)


def shift_defect_exact(oracle, support, g) -> Fraction:
    """Exact squared defect of a normalized indicator under one shift."""
    support = set(support)
    shifted = {oracle.multiply(g, x) for x in support}
    return Fraction(len(shifted ^ support), len(support))


def folner_witness(oracle: GroupOracle, F, eps: float,
                   support_cap: int = DEFAULT_SUPPORT_CAP) -> SparseVector:
    """Normalized indicator of an almost-invariant finite set, certified.

    Finite-table oracles return the whole group (defect exactly zero).
    Abelian oracles return a box over the free coordinates, with the
    smallest side length whose exact squared shift defect is at most
    ``eps`` for every element of F; the defect is re-derived by exact
    counting before the vector is returned.
    """
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    F = list(F)
    for g in F:
        oracle.check_element(g)
    space = Regular(oracle)
    if oracle.kind == "finite-table":
        n = oracle.n
        amp = 1.0 / n ** 0.5
        return SparseVector(space, {(0, x): amp for x in range(n)})
    if oracle.kind != "fg-abelian":
        raise UnsupportedKindError(
            f"no almost-invariant set construction for kind '{oracle.kind}'"
        )
    free_dims = sum(1 for m in oracle.moduli if m == 0)
    torsion_size = 1
    for m in oracle.moduli:
        if m:
            torsion_size *= m
    if free_dims == 0:
        support = _box_support(oracle, 1)
        amp = 1.0 / len(support) ** 0.5
        return SparseVector(space, {(0, x): amp for x in support})
    eps_frac = Fraction(eps).limit_denominator(10**12)
    N = 1
    for g in F:
        for c, m in zip(g, oracle.moduli):
            if m == 0:
                N = max(N, abs(c) + 1)
    while True:
        if N ** free_dims * torsion_size > support_cap:
            raise ResourceLimitError(
                f"box support {N ** free_dims * torsion_size} exceeds cap {support_cap}"
            )
        if all(_box_defect_sq(oracle, g, N) <= eps_frac for g in F):
            break
        N += 1
    support = _box_support(oracle, N)
    # certify by exact counting on the realized support
    for g in F:
        exact = shift_defect_exact(oracle, support, g)
        assert exact == _box_defect_sq(oracle, g, N)
        if exact > eps_frac:
            raise PreconditionError("certified defect bound violated (unreachable)")
    amp = 1.0 / len(support) ** 0.5
    return SparseVector(space, {(0, x): amp for x in support})


def _tail_structure(rho):
    """Split rho into (head parts, infinite shift tail); validate the shape."""
    if not isinstance(rho, DirectSum) or len(rho.parts) < 2:
        raise PreconditionError(
            "transfer expects a direct sum ending in an infinite stack of shift copies"
        )
    tail = rho.parts[-1]
    if not (isinstance(tail, Multiple) and tail.count is None
            and isinstance(tail.base, Regular)):
        raise PreconditionError(
            "transfer expects the last summand to be an infinite stack of shift copies"
        )
    return rho.parts[:-1], tail


def transfer_witness(rho: Representation, params, targets, F, eps: float,
                     fresh_cap: int = DEFAULT_FRESH_CAP,
                     support_cap: int = DEFAULT_SUPPORT_CAP) -> WitnessReport:
    """Realize extension data inside untouched shift copies.

    ``rho`` must be a direct sum whose last summand is an infinite stack
    of shift copies; the other summands form the explicit extension
    (common part plus complement). Parameters must be supported in the
    common part plus finitely many stack copies. Each target splits into
    its projection onto that subspace (kept verbatim) and a remainder
    whose Gram data is reproduced in fresh stack copies by tensoring with
    an almost-invariant box vector; the per-entry error is exactly
    max|M| * defect^2 / 2, which the box size is chosen to keep below
    ``eps``.
    """
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    head_parts, tail = _tail_structure(rho)
    oracle = tail.base.oracle
    if oracle.kind not in ("finite-table", "fg-abelian"):
        raise UnsupportedKindError(
            f"transfer needs an amenable oracle kind, got '{oracle.kind}'"
        )
    params = list(params)
    targets = list(targets)
    for v in params + targets:
        if v.space != rho:
            raise KindMismatchError("transfer vectors must live in the extension space")
    F = list(F)
    tail_offset = rho.part_offset(len(rho.parts) - 1)
    common_leaf_end = rho.part_offset(1)

    def tail_copy(leaf):
        return None if leaf < tail_offset else leaf - tail_offset

    # number of stack copies spanned by the parameters
    l = 0
    for v in params:
        for (leaf, _), _amp in v.entries.items():
            c = tail_copy(leaf)
            if c is not None:
                l = max(l, c + 1)
            elif leaf >= common_leaf_end:
                raise PreconditionError(
                    "parameters must be supported in the common part and the shift stack"
                )

    def in_kept_subspace(key):
        leaf = key[0]
        c = tail_copy(leaf)
        if c is None:
            return leaf < common_leaf_end
        return c < l

    kept = []
    remainders = []
    max_touched = l - 1
    for v in targets:
        for (leaf, _), _amp in v.entries.items():
            c = tail_copy(leaf)
            if c is not None:
                max_touched = max(max_touched, c)
        u = v.restrict(in_kept_subspace)
        kept.append(u)
        remainders.append(v - u)
    witnesses = list(params) + list(kept)
    total_target = gram(rho, params + targets, F, oracle=oracle)

    if any(not w.is_zero() for w in remainders):
        m = len(targets)
        rem_gram = gram(rho, remainders, F, oracle=oracle)
        max_m = max(rem_gram.max_abs(), 1e-12)
        eps_box = eps / max(1.0, max_m)
        f_vec = folner_witness(oracle, F, eps_box, support_cap=support_cap)
        phi = [x for (_c, x) in f_vec.entries.keys()]
        f_amp = 1.0 / len(phi) ** 0.5
        shifted = []
        labels = []
        for i, w in enumerate(remainders):
            for h in phi:
                shifted.append(rho.apply(oracle.invert(h), w))
                labels.append((i, h))
        frame = orthonormalize(shifted, drop_tol=1e-10)
        if len(frame) > fresh_cap:
            raise ResourceLimitError(
                f"transfer needs {len(frame)} fresh copies, cap is {fresh_cap}"
            )
        tail.note_used(max_touched)
        fresh = [tail.fresh_copy() for _ in frame]
        coeffs = {}
        for (i, h), sv in zip(labels, shifted):
            coeffs[(i, h)] = [inner(sv, e) for e in frame]
        new_witnesses = []
        for i in range(m):
            entries = {}
            for h in phi:
                row = coeffs[(i, h)]
                for k, c in enumerate(row):
                    amp = f_amp * c
                    if amp != 0:
                        entries[(tail_offset + fresh[k], h)] = \
                            entries.get((tail_offset + fresh[k], h), 0) + amp
            new_witnesses.append(kept[i] + SparseVector(rho, entries))
        witnesses = list(params) + new_witnesses
    disc = discrepancy(total_target, rho, witnesses)
    return WitnessReport(witnesses, disc, 0, bool(disc <= eps))
