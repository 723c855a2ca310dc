"""Unitary representation constructors and exact vector actions.

A representation is a tree whose atoms are ``Regular`` (left shift on
square-summable functions of the group), ``Trivial`` (identity action on
a finite-dimensional space), and ``MatrixRep`` (explicit unitary
generator matrices). Composites are ``DirectSum`` and ``Multiple``; an
infinite multiple is lazy and only ever touches finitely many copies.

Vector entries are addressed by the global leaf index ("copy index") of
the atom they belong to, obtained by depth-first enumeration of the
tree. A part with infinitely many leaves is only allowed in the last
position of every enclosing direct sum so all other offsets stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KindMismatchError, PreconditionError
from .groups import GroupOracle, symmetric_generators
from .vectors import SparseVector, delta, inner, orthonormalize

UNITARY_TOL = 1e-10
RELATION_TOL = 1e-8


class Representation:
    """Base class; concrete kinds implement leaf bookkeeping and atom actions."""

    oracle: GroupOracle | None = None

    # -- leaf bookkeeping ---------------------------------------------------
    def leaf_count(self) -> int | None:
        """Number of atoms in the tree, None when infinite."""
        raise NotImplementedError

    def resolve(self, copy: int):
        """Atom at global leaf index ``copy``."""
        raise NotImplementedError

    def total_dim(self) -> int | None:
        """Hilbert dimension, None when infinite."""
        raise NotImplementedError

    # -- action ---------------------------------------------------------------
    def apply(self, g, v: SparseVector) -> SparseVector:
        """Act by the group element ``g``; exact for regular and trivial atoms."""
        if v.space != self:
            raise KindMismatchError("vector does not belong to this representation's space")
        if self.oracle is not None:
            self.oracle.check_element(g)
        buckets: dict[int, dict] = {}
        for (copy, key), amp in v.entries.items():
            buckets.setdefault(copy, {})[key] = amp
        out = {}
        for copy, local in buckets.items():
            atom = self.resolve(copy)
            for key, amp in atom.leaf_apply(g, local).items():
                if amp != 0:
                    out[(copy, key)] = amp
        return SparseVector(self, out)

    # -- canonical basis (finite-dimensional trees only) ----------------------
    def basis_keys(self) -> list:
        if self.total_dim() is None:
            raise PreconditionError("representation is infinite-dimensional")
        keys = []
        for copy in range(self.leaf_count()):
            atom = self.resolve(copy)
            keys.extend((copy, k) for k in atom.leaf_basis_keys())
        return keys

    def canonical_basis(self) -> list:
        return [delta(self, c, k) for c, k in self.basis_keys()]

    def __repr__(self):
        return f"<{type(self).__name__}>"


class Regular(Representation):
    """Left-shift action on finitely supported functions of the group."""

    def __init__(self, oracle: GroupOracle):
        self.oracle = oracle

    def leaf_count(self):
        return 1

    def resolve(self, copy):
        if copy != 0:
            raise PreconditionError(f"copy index {copy} out of range for a single leaf")
        return self

    def total_dim(self):
        return self.oracle.order()

    def leaf_apply(self, g, local):
        mult = self.oracle.multiply
        return {mult(g, x): amp for x, amp in local.items()}

    def leaf_basis_keys(self):
        return self.oracle.elements_in_order()

    def __eq__(self, other):
        return isinstance(other, Regular) and other.oracle == self.oracle

    def __hash__(self):
        return hash(("regular", self.oracle))


class Trivial(Representation):
    """Identity action on a finite-dimensional space; compatible with any group."""

    def __init__(self, dim: int):
        if not isinstance(dim, int) or dim < 1:
            raise PreconditionError("trivial representation needs dimension >= 1")
        self.dim = dim

    def leaf_count(self):
        return 1

    def resolve(self, copy):
        if copy != 0:
            raise PreconditionError(f"copy index {copy} out of range for a single leaf")
        return self

    def total_dim(self):
        return self.dim

    def leaf_apply(self, g, local):
        for k in local:
            if not (isinstance(k, int) and 0 <= k < self.dim):
                raise KindMismatchError(f"coordinate {k!r} out of range for dim {self.dim}")
        return dict(local)

    def leaf_basis_keys(self):
        return list(range(self.dim))

    def __eq__(self, other):
        return isinstance(other, Trivial) and other.dim == self.dim

    def __hash__(self):
        return hash(("trivial", self.dim))


class MatrixRep(Representation):
    """Finite-dimensional representation given by one unitary matrix per generator.

    Generator matrices must be unitary to ``unitary_tol``; every word in
    ``relations`` (signed generator letters) must evaluate to the identity
    within ``relation_tol``. Kind-specific relations are checked
    automatically: commutators and torsion powers for abelian oracles,
    the rewriting rules for presented oracles, and sampled table products
    for finite-table oracles.
    """

    def __init__(self, oracle, matrices, relations=(), unitary_tol=UNITARY_TOL,
                 relation_tol=RELATION_TOL):
        if oracle is None:
            raise PreconditionError("matrix representation needs a group oracle")
        self.oracle = oracle
        mats = [np.asarray(m, dtype=complex) for m in matrices]
        if len(mats) != len(oracle.generators):
            raise PreconditionError(
                f"expected {len(oracle.generators)} generator matrices, got {len(mats)}"
            )
        if not mats:
            raise PreconditionError("matrix representation needs at least one generator")
        d = mats[0].shape[0]
        for U in mats:
            if U.shape != (d, d):
                raise PreconditionError("generator matrices must be square and same size")
            defect = np.max(np.abs(U.conj().T @ U - np.eye(d)))
            if defect > unitary_tol:
                raise PreconditionError(f"generator matrix not unitary: defect {defect:.3g}")
        self.matrices = mats
        self.dim = d
        self._element_cache: dict = {}
        for word in self._automatic_relations() + [tuple(w) for w in relations]:
            E = self.evaluate_word(word)
            defect = np.max(np.abs(E - np.eye(d)))
            if defect > relation_tol:
                raise PreconditionError(
                    f"relation {word} violated: defect {defect:.3g}"
                )
        self._table_spot_check(relation_tol)

    def _automatic_relations(self):
        rels = []
        kind = self.oracle.kind
        if kind == "fg-abelian":
            k = len(self.oracle.generators)
            for i in range(1, k + 1):
                for j in range(i + 1, k + 1):
                    rels.append((i, j, -i, -j))
            for i, g in enumerate(self.oracle.generators, start=1):
                order = self.oracle.generator_order(g)
                if order:
                    rels.append((i,) * order)
        elif kind == "rewriting-presented":
            for lhs, rhs in self.oracle.user_rules:
                inv_rhs = tuple(-x for x in reversed(rhs))
                rels.append(lhs + inv_rhs)
        return rels

    def _table_spot_check(self, tol):
        if self.oracle.kind != "finite-table":
            return
        n = self.oracle.n
        if n <= 32:
            pairs = [(a, b) for a in range(n) for b in range(n)]
        else:
            rng = np.random.default_rng(12345)
            pairs = [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(500)]
        for a, b in pairs:
            lhs = self.matrix_of(a) @ self.matrix_of(b)
            rhs = self.matrix_of(self.oracle.multiply(a, b))
            if np.max(np.abs(lhs - rhs)) > tol:
                raise PreconditionError(
                    f"generator matrices do not respect the table at pair {(a, b)}"
                )

    def evaluate_word(self, word) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex)
        for letter in word:
            U = self.matrices[abs(letter) - 1]
            out = out @ (U if letter > 0 else U.conj().T)
        return out

    def matrix_of(self, g) -> np.ndarray:
        if g not in self._element_cache:
            self._element_cache[g] = self.evaluate_word(self.oracle.as_word(g))
        return self._element_cache[g]

    def leaf_count(self):
        return 1

    def resolve(self, copy):
        if copy != 0:
            raise PreconditionError(f"copy index {copy} out of range for a single leaf")
        return self

    def total_dim(self):
        return self.dim

    def leaf_apply(self, g, local):
        vec = np.zeros(self.dim, dtype=complex)
        for k, amp in local.items():
            if not (isinstance(k, int) and 0 <= k < self.dim):
                raise KindMismatchError(f"coordinate {k!r} out of range for dim {self.dim}")
            vec[k] = amp
        w = self.matrix_of(g) @ vec
        return {int(i): complex(w[i]) for i in np.nonzero(w)[0]}

    def leaf_basis_keys(self):
        return list(range(self.dim))

    def __eq__(self, other):
        return (
            isinstance(other, MatrixRep)
            and other.oracle == self.oracle
            and other.dim == self.dim
            and all(np.array_equal(a, b) for a, b in zip(other.matrices, self.matrices))
        )

    def __hash__(self):
        return hash(("matrix", self.oracle, self.dim))


def _common_oracle(parts):
    oracle = None
    for p in parts:
        if p.oracle is None:
            continue
        if oracle is None:
            oracle = p.oracle
        elif oracle != p.oracle:
            raise KindMismatchError("direct sum parts use incompatible group oracles")
    return oracle


class DirectSum(Representation):
    """Blockwise action on the direct sum of the parts."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise PreconditionError("direct sum needs at least one part")
        for p in parts[:-1]:
            if p.leaf_count() is None:
                raise PreconditionError(
                    "a part with infinitely many copies must come last in a direct sum"
                )
        self.parts = parts
        self.oracle = _common_oracle(parts)

    def leaf_count(self):
        total = 0
        for p in self.parts:
            c = p.leaf_count()
            if c is None:
                return None
            total += c
        return total

    def resolve(self, copy):
        if copy < 0:
            raise PreconditionError(f"copy index {copy} out of range")
        rest = copy
        for p in self.parts:
            c = p.leaf_count()
            if c is None or rest < c:
                return p.resolve(rest)
            rest -= c
        raise PreconditionError(f"copy index {copy} out of range")

    def part_offset(self, index: int) -> int:
        """Global leaf index where part ``index`` starts."""
        if not (0 <= index < len(self.parts)):
            raise PreconditionError(f"part index {index} out of range")
        offset = 0
        for p in self.parts[:index]:
            c = p.leaf_count()
            if c is None:
                raise PreconditionError("cannot embed after an infinite part")
            offset += c
        return offset

    def total_dim(self):
        total = 0
        for p in self.parts:
            d = p.total_dim()
            if d is None:
                return None
            total += d
        return total

    def __eq__(self, other):
        return isinstance(other, DirectSum) and other.parts == self.parts

    def __hash__(self):
        return hash(("direct-sum", tuple(self.parts)))


class Multiple(Representation):
    """``count`` copies of a base representation; ``count=None`` means countably many.

    Infinite multiples are lazy: copies exist only through their leaf
    indices. ``fresh_copy`` hands out the lowest copy index never touched
    through it; callers that inject vectors directly should first advance
    the counter with ``note_used``.
    """

    def __init__(self, base: Representation, count: int | None):
        if base.leaf_count() is None:
            raise PreconditionError("cannot take multiples of an already infinite stack")
        if count is not None and (not isinstance(count, int) or count < 1):
            raise PreconditionError("copy count must be a positive integer or None")
        self.base = base
        self.count = count
        self.oracle = base.oracle
        self._next_fresh = 0

    def leaf_count(self):
        if self.count is None:
            return None
        return self.count * self.base.leaf_count()

    def resolve(self, copy):
        if copy < 0:
            raise PreconditionError(f"copy index {copy} out of range")
        bl = self.base.leaf_count()
        j = copy // bl
        if self.count is not None and j >= self.count:
            raise PreconditionError(
                f"copy index {copy} addresses copy {j} of a {self.count}-fold multiple"
            )
        return self.base.resolve(copy % bl)

    def total_dim(self):
        if self.count is None:
            return None
        d = self.base.total_dim()
        return None if d is None else d * self.count

    def fresh_copy(self) -> int:
        j = self._next_fresh
        if self.count is not None and j >= self.count:
            raise PreconditionError("no untouched copies left in a finite multiple")
        self._next_fresh += 1
        return j

    def note_used(self, copy: int):
        self._next_fresh = max(self._next_fresh, copy + 1)

    def __eq__(self, other):
        return (
            isinstance(other, Multiple)
            and other.base == self.base
            and other.count == self.count
        )

    def __hash__(self):
        return hash(("multiple", self.base, self.count))


def direct_sum(*parts) -> DirectSum:
    if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
        parts = tuple(parts[0])
    return DirectSum(parts)


def multiple(rep: Representation, count: int | None) -> Multiple:
    return Multiple(rep, count)


def embed(rep: Representation, index: int, v: SparseVector) -> SparseVector:
    """Isometric inclusion of part/copy ``index`` into the composite space."""
    if isinstance(rep, DirectSum):
        if v.space != rep.parts[index]:
            raise KindMismatchError("vector does not belong to the addressed summand")
        offset = rep.part_offset(index)
    elif isinstance(rep, Multiple):
        if v.space != rep.base:
            raise KindMismatchError("vector does not belong to the base representation")
        if index < 0 or (rep.count is not None and index >= rep.count):
            raise PreconditionError(f"copy index {index} out of range")
        offset = index * rep.base.leaf_count()
        rep.note_used(index)
    else:
        if index != 0 or v.space != rep:
            raise KindMismatchError("atomic representation admits only the identity embedding")
        return v
    return SparseVector(rep, {(c + offset, k): amp for (c, k), amp in v.entries.items()})


class Subspace:
    """Finite-dimensional closed subspace given by an orthonormal basis."""

    def __init__(self, ambient: Representation, basis, *, validate=True, tol=1e-10):
        self.ambient = ambient
        self.basis = list(basis)
        for b in self.basis:
            if b.space != ambient:
                raise KindMismatchError("basis vector lives outside the ambient space")
        if validate:
            for i, u in enumerate(self.basis):
                for j, v in enumerate(self.basis[: i + 1]):
                    target = 1.0 if i == j else 0.0
                    if abs(inner(u, v) - target) > tol:
                        raise PreconditionError(
                            f"subspace basis not orthonormal at pair ({i}, {j})"
                        )

    @classmethod
    def orthonormalized(cls, ambient, vectors, drop_tol=1e-10):
        return cls(ambient, orthonormalize(vectors, drop_tol), validate=False)

    @property
    def dim(self):
        return len(self.basis)

    def coords(self, v: SparseVector) -> np.ndarray:
        return np.array([inner(v, b) for b in self.basis], dtype=complex)

    def from_coords(self, c) -> SparseVector:
        out = SparseVector(self.ambient, {})
        for coeff, b in zip(c, self.basis):
            if coeff != 0:
                out = out + complex(coeff) * b
        return out

    def project(self, v: SparseVector) -> SparseVector:
        if v.space != self.ambient:
            raise KindMismatchError("vector lives outside this subspace's ambient space")
        return self.from_coords(self.coords(v))

    def residual(self, v: SparseVector) -> SparseVector:
        return v - self.project(v)


class Embedding:
    """Linear isometry from a finite-dimensional representation into another.

    ``images`` are the images of the source's canonical basis; they must
    be orthonormal in the target (checked to ``tol``). Equivariance is a
    separate check used as a precondition by amalgamation.
    """

    def __init__(self, source, target, images, *, validate=True, tol=1e-10):
        if source.total_dim() is None:
            raise PreconditionError("embedding source must be finite-dimensional")
        images = list(images)
        if len(images) != source.total_dim():
            raise PreconditionError(
                f"expected {source.total_dim()} basis images, got {len(images)}"
            )
        for w in images:
            if w.space != target:
                raise KindMismatchError("image vector lives outside the target space")
        if validate:
            for i, u in enumerate(images):
                for j, v in enumerate(images[: i + 1]):
                    t = 1.0 if i == j else 0.0
                    if abs(inner(u, v) - t) > tol:
                        raise PreconditionError(
                            f"embedding is not isometric at image pair ({i}, {j})"
                        )
        self.source = source
        self.target = target
        self.images = images
        self._index = {key: i for i, key in enumerate(source.basis_keys())}

    @classmethod
    def identity(cls, rep):
        return cls(rep, rep, rep.canonical_basis(), validate=False)

    @classmethod
    def into_summand(cls, sum_rep: DirectSum, part_index: int):
        part = sum_rep.parts[part_index]
        images = [embed(sum_rep, part_index, b) for b in part.canonical_basis()]
        return cls(part, sum_rep, images, validate=False)

    def __call__(self, v: SparseVector) -> SparseVector:
        if v.space != self.source:
            raise KindMismatchError("vector does not belong to the embedding source")
        out = SparseVector(self.target, {})
        for key, amp in v.entries.items():
            out = out + amp * self.images[self._index[key]]
        return out

    def equivariance_defect(self):
        """Worst generator and defect of intertwining over the source basis."""
        gens = self.source.oracle.generators if self.source.oracle else []
        if not gens and self.target.oracle is not None:
            gens = self.target.oracle.generators
        worst_s, worst = None, 0.0
        basis = self.source.canonical_basis()
        for s in gens:
            for b in basis:
                d = (self.target.apply(s, self(b)) - self(self.source.apply(s, b))).norm()
                if d > worst:
                    worst_s, worst = s, d
        return worst_s, worst


@dataclass
class Amalgam:
    """Composite of two extensions glued over a common subrepresentation."""

    rep: Representation
    embed_first: Embedding
    embed_second: Embedding


def _complement_rep(big: Representation, images, oracle, tol):
    """Orthocomplement of the embedded subspace, compressed to a matrix action."""
    comp = []
    for b in big.canonical_basis():
        w = b
        for _ in range(2):
            for q in list(images) + comp:
                w = w - inner(w, q) * q
        n = w.norm()
        if n >= 1e-10:
            comp.append(w * (1.0 / n))
    if not comp:
        return None, []
    if oracle is None:
        return Trivial(len(comp)), comp
    mats = []
    for s in oracle.generators:
        U = np.array(
            [[inner(big.apply(s, q_j), q_i) for q_j in comp] for q_i in comp],
            dtype=complex,
        )
        mats.append(U)
    return MatrixRep(oracle, mats, unitary_tol=max(UNITARY_TOL, 10 * tol)), comp


def amalgamate(pi: Representation, into_first: Embedding, into_second: Embedding,
               tol: float = 1e-8) -> Amalgam:
    """Glue two extensions of ``pi`` over their common copy of ``pi``.

    Both embeddings must be isometries of ``pi`` onto generator-invariant
    subspaces, intertwining the actions within ``tol``; the result acts as
    ``pi`` on the common part and by the compressed complement actions on
    the rest, together with isometric equivariant inclusions of both
    factors.
    """
    for emb, label in ((into_first, "first"), (into_second, "second")):
        if emb.source != pi:
            raise PreconditionError(f"{label} embedding does not start from the common part")
        if emb.target.total_dim() is None:
            raise PreconditionError("amalgamation requires finite-dimensional factors")
        s, d = emb.equivariance_defect()
        if d > tol:
            raise PreconditionError(
                f"embedded copy is not invariant in the {label} factor: "
                f"worst generator {s} with defect {d:.3g}"
            )
    oracle = _common_oracle([pi, into_first.target, into_second.target])
    comp_rep_1, comp_basis_1 = _complement_rep(into_first.target, into_first.images, oracle, tol)
    comp_rep_2, comp_basis_2 = _complement_rep(into_second.target, into_second.images, oracle, tol)

    parts = [pi]
    offsets = {}
    if comp_rep_1 is not None:
        offsets["first"] = len(parts)
        parts.append(comp_rep_1)
    if comp_rep_2 is not None:
        offsets["second"] = len(parts)
        parts.append(comp_rep_2)
    amalgam = DirectSum(parts)

    pi_basis_in_amalgam = [embed(amalgam, 0, b) for b in pi.canonical_basis()]

    def factor_embedding(emb, comp_basis, part_key):
        # complement parts are single-leaf atoms, so their keys are coordinates
        off = amalgam.part_offset(offsets[part_key]) if part_key in offsets else None
        images = []
        for b in emb.target.canonical_basis():
            img = SparseVector(amalgam, {})
            for k, w in enumerate(emb.images):
                c = inner(b, w)
                if c != 0:
                    img = img + c * pi_basis_in_amalgam[k]
            for i, q in enumerate(comp_basis):
                c = inner(b, q)
                if c != 0:
                    img = img + c * delta(amalgam, off, i)
            images.append(img)
        return Embedding(emb.target, amalgam, images, validate=False)

    emb1 = factor_embedding(into_first, comp_basis_1, "first")
    emb2 = factor_embedding(into_second, comp_basis_2, "second")
    return Amalgam(amalgam, emb1, emb2)
