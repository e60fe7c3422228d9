"""Metabolic symplectic/unitary k-spaces and the local hyperbolic-plane model.

Subspaces are kept in reduced row-echelon form, so each subspace has a
unique representation and equality is structural comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf import FieldParams, Flavor, FqElem

Vector = tuple[FqElem, ...]
Matrix = tuple[Vector, ...]


def rref(rows: list[list[FqElem]]) -> Matrix:
    """Reduced row-echelon form with zero rows dropped."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    piv = 0
    for col in range(ncols):
        sel = next((i for i in range(piv, nrows) if rows[i][col]), None)
        if sel is None:
            continue
        rows[piv], rows[sel] = rows[sel], rows[piv]
        scale = rows[piv][col].inv()
        rows[piv] = [scale * v for v in rows[piv]]
        for i in range(nrows):
            if i != piv and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[piv])]
        piv += 1
        if piv == nrows:
            break
    return tuple(tuple(r) for r in rows[:piv])


@dataclass(frozen=True)
class Subspace:
    """A subspace of k^ambient_dim given by its canonical echelon basis."""

    ambient_dim: int
    basis: Matrix

    @classmethod
    def from_vectors(cls, vectors, ambient_dim: int) -> "Subspace":
        vectors = [list(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise ValueError("vector length does not match the ambient dimension")
        return cls(ambient_dim=ambient_dim, basis=rref(vectors))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __str__(self) -> str:
        rows = ["(" + ", ".join(str(v) for v in row) + ")" for row in self.basis]
        return "span{" + ", ".join(rows) + "}"


@dataclass(frozen=True)
class HermitianSpace:
    """A non-degenerate sesquilinear k-space with Gram matrix `gram`.

    Symplectic flavor: the form is alternating (zero diagonal plus
    skew-symmetry, which is the correct condition also when p = 2).
    Unitary flavor: the Gram matrix is hermitian under conjugation.
    """

    field: FieldParams
    dim: int
    gram: Matrix

    def __post_init__(self):
        if self.dim < 1 or len(self.gram) != self.dim:
            raise ValueError("gram matrix does not match the stated dimension")
        for row in self.gram:
            if len(row) != self.dim:
                raise ValueError("gram matrix is not square")
        if len(rref([list(r) for r in self.gram])) != self.dim:
            raise ValueError("degenerate Gram matrix")
        if self.field.flavor is Flavor.SYMPLECTIC:
            for i in range(self.dim):
                if self.gram[i][i]:
                    raise ValueError("symplectic Gram matrix must have zero diagonal")
                for j in range(self.dim):
                    if self.gram[j][i] != -self.gram[i][j]:
                        raise ValueError("symplectic Gram matrix must be skew-symmetric")
        else:
            for i in range(self.dim):
                for j in range(self.dim):
                    if self.gram[j][i] != self.gram[i][j].conj():
                        raise ValueError("unitary Gram matrix must be hermitian")


def hyperbolic_plane(field: FieldParams) -> HermitianSpace:
    """The standard 2-dimensional metabolic space for the given flavor."""
    one = field.one()
    zero = field.zero()
    if field.flavor is Flavor.SYMPLECTIC:
        gram = ((zero, one), (-one, zero))
    else:
        gram = ((zero, one), (one, zero))
    return HermitianSpace(field=field, dim=2, gram=gram)


def metabolic_space(field: FieldParams, blocks: int) -> HermitianSpace:
    """Orthogonal sum of `blocks` hyperbolic planes (dimension 2*blocks)."""
    if blocks < 1:
        raise ValueError("need at least one hyperbolic block")
    plane = hyperbolic_plane(field)
    dim = 2 * blocks
    zero = field.zero()
    gram = [[zero] * dim for _ in range(dim)]
    for b in range(blocks):
        for i in range(2):
            for j in range(2):
                gram[2 * b + i][2 * b + j] = plane.gram[i][j]
    return HermitianSpace(field=field, dim=dim, gram=tuple(tuple(r) for r in gram))


def evaluate_form(space: HermitianSpace, x, y) -> FqElem:
    """h(x, y), linear in x and conjugate-linear in y."""
    if len(x) != space.dim or len(y) != space.dim:
        raise ValueError("vector length does not match the space dimension")
    acc = space.field.zero()
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j, yj in enumerate(y):
            if yj:
                acc = acc + xi * space.gram[i][j] * yj.conj()
    return acc


def _null_space(constraints: list[list[FqElem]], field: FieldParams, dim: int) -> Subspace:
    reduced = rref(constraints)
    pivots = []
    for row in reduced:
        pivots.append(next(j for j, v in enumerate(row) if v))
    free = [j for j in range(dim) if j not in pivots]
    zero, one = field.zero(), field.one()
    basis = []
    for f in free:
        vec = [zero] * dim
        vec[f] = one
        for i, pcol in enumerate(pivots):
            vec[pcol] = -reduced[i][f]
        basis.append(vec)
    return Subspace.from_vectors(basis, dim)


def orthogonal_complement(space: HermitianSpace, sub: Subspace) -> Subspace:
    """All v with h(x, v) = 0 for every x in the subspace."""
    if sub.ambient_dim != space.dim:
        raise ValueError("subspace does not live in this space")
    constraints = []
    for x in sub.basis:
        w = [space.field.zero()] * space.dim
        for j in range(space.dim):
            acc = space.field.zero()
            for i in range(space.dim):
                if x[i]:
                    acc = acc + x[i] * space.gram[i][j]
            # h(x, v) = sum_j w_j conj(v_j) vanishes iff sum_j conj(w_j) v_j does
            w[j] = acc.conj()
        constraints.append(w)
    return _null_space(constraints, space.field, space.dim)


def is_maximal_isotropic(space: HermitianSpace, sub: Subspace) -> bool:
    return sub == orthogonal_complement(space, sub)


def enumerate_isotropic_lines(space: HermitianSpace) -> list[Subspace]:
    """All isotropic lines of a 2-dimensional space, in canonical order.

    Lines are ordered lexicographically by the integer encoding of their
    canonical basis vector, which makes downstream fiber maps stable.
    """
    if space.dim != 2:
        raise ValueError("isotropic-line enumeration requires dimension 2")
    field = space.field
    one, zero = field.one(), field.zero()
    reps = [(zero, one)] + [(one, t) for t in field.elements()]
    lines = []
    for v in reps:
        if not evaluate_form(space, v, v):
            lines.append(Subspace.from_vectors([v], 2))
    lines.sort(key=lambda line: tuple(e.encode() for e in line.basis[0]))
    return lines


@dataclass(frozen=True)
class LocalPlane:
    """Hyperbolic plane with one unramified line and p ramified lines."""

    space: HermitianSpace
    unramified_line: Subspace
    ramified_lines: tuple[Subspace, ...]


def build_local_plane(field: FieldParams) -> LocalPlane:
    """Standard hyperbolic plane; the first enumerated isotropic line is
    declared unramified, the remaining p are the ramified lines."""
    space = hyperbolic_plane(field)
    lines = enumerate_isotropic_lines(space)
    if len(lines) != field.p + 1:
        raise ValueError(f"expected {field.p + 1} isotropic lines, found {len(lines)}")
    return LocalPlane(space=space, unramified_line=lines[0], ramified_lines=tuple(lines[1:]))


def fiber_size(p: int, n: int) -> int:
    """Number of order-p^n totally ramified characters mapping to one line."""
    return p ** (2 * n - 2) * (p - 1)


def kummer_line_of_character(plane: LocalPlane, fiber_index: int, n: int, p: int) -> Subspace:
    """Map a character index onto the ramified lines in equal-size blocks.

    Indices run over the p^(2n-1)(p-1) totally ramified characters of
    order p^n; each ramified line receives exactly p^(2n-2)(p-1) of them.
    """
    if p != plane.space.field.p:
        raise ValueError("p does not match the plane's field")
    if n < 1:
        raise ValueError("character order exponent n must be >= 1")
    block = fiber_size(p, n)
    total = p * block
    if not 0 <= fiber_index < total:
        raise ValueError(f"fiber index {fiber_index} out of range [0, {total})")
    return plane.ramified_lines[fiber_index // block]
