"""Exact integer linear algebra for finitely generated abelian groups.

Groups are given by presentations: a number of generators and a matrix of
relation rows.  All structural questions (equality of elements, isomorphy,
kernels, cokernels) reduce to Smith normal form computations over Z, done
in arbitrary precision.

Conventions
-----------
Elements are integer row vectors over the generators.  A homomorphism is an
integer matrix ``M`` with one row per source generator; it acts by ``x @ M``.
Relation matrices are stored row-wise and unreduced; canonical data is
computed lazily and cached.

>>> Z = FinAbGroup(1)
>>> Z2 = FinAbGroup(1, [(2,)])
>>> Z.canonical_form()
(1, ())
>>> Z2.canonical_form()
(0, (2,))
>>> tensor(Z2, FinAbGroup(1, [(3,)])).group.canonical_form()
(0, ())
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

Matrix = tuple[tuple[int, ...], ...]


class IllFormedHom(ValueError):
    """Raised when a homomorphism matrix does not respect relations."""


# ---------------------------------------------------------------------------
# integer matrices


def mat(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero_matrix(m: int, n: int) -> Matrix:
    return tuple((0,) * n for _ in range(m))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("shape mismatch in mat_mul")
    if not b:
        return tuple(() for _ in a)
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def vec_mat(v: Sequence[int], m: Matrix) -> tuple[int, ...]:
    if m and len(v) != len(m):
        raise ValueError("shape mismatch in vec_mat")
    if not m:
        return ()
    cols = len(m[0])
    return tuple(sum(v[i] * m[i][j] for i in range(len(v))) for j in range(cols))


def vstack(*mats: Matrix) -> Matrix:
    out: list[tuple[int, ...]] = []
    for m in mats:
        out.extend(m)
    return tuple(out)


def determinant(m: Matrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(m: Matrix) -> bool:
    return abs(determinant(m)) == 1


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Diagonalize an integer matrix: returns ``(D, U, V)`` with ``D = U m V``.

    ``U`` and ``V`` are unimodular and the diagonal of ``D`` satisfies
    ``d1 | d2 | ...`` with nonnegative entries.  Pivots are chosen by minimal
    absolute value, which keeps coefficient growth tame.

    >>> D, U, V = smith_normal_form(mat([[2, 4], [6, 8]]))
    >>> [D[i][i] for i in range(2)]
    [2, 4]
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    d = [list(r) for r in m]
    u = [list(r) for r in identity_matrix(rows)]
    v = [list(r) for r in identity_matrix(cols)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        d[dst] = [x + c * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, c):
        for r in d:
            r[dst] += c * r[src]
        for r in v:
            r[dst] += c * r[src]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(rows, cols):
        # minimal-absolute-value pivot in the remaining block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = d[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            # clear column t by euclidean row steps
            dirty = False
            for i in range(t + 1, rows):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    add_row(i, t, -q)
                    if d[i][t] != 0:
                        swap_rows(i, t)
                        dirty = True
            if dirty:
                continue
            for j in range(t + 1, cols):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    add_col(j, t, -q)
                    if d[t][j] != 0:
                        swap_cols(j, t)
                        break
            else:
                break
        # enforce divisibility of the remaining block by the pivot
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if d[i][j] % d[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        if d[t][t] < 0:
            negate_row(t)
        t += 1
    return mat(d), mat(u), mat(v)


def solve_left(a: Matrix, target: Sequence[int]) -> Optional[tuple[int, ...]]:
    """One integer solution ``z`` of ``z a = target``, or ``None``.

    >>> solve_left(mat([[2, 0], [0, 3]]), (4, 9))
    (2, 3)
    >>> solve_left(mat([[2]]), (1,)) is None
    True
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if len(target) != cols:
        raise ValueError("target length mismatch")
    if rows == 0:
        return () if all(x == 0 for x in target) else None
    d, u, v = smith_normal_form(a)
    s = vec_mat(target, v)
    w = [0] * rows
    for j in range(cols):
        dj = d[j][j] if j < rows else 0
        if dj != 0:
            if s[j] % dj != 0:
                return None
            if j < rows:
                w[j] = s[j] // dj
        else:
            if s[j] != 0:
                return None
    return vec_mat(w, u)


def kernel_basis(a: Matrix) -> Matrix:
    """Rows spanning the left kernel ``{z : z a = 0}``."""
    rows = len(a)
    if rows == 0:
        return ()
    d, u, _ = smith_normal_form(a)
    cols = len(a[0])
    out = []
    for i in range(rows):
        di = d[i][i] if i < cols else 0
        if di == 0:
            out.append(u[i])
    return mat(out)


def lattice_member(vec: Sequence[int], lattice_rows: Matrix) -> bool:
    """Whether ``vec`` lies in the integer row span of ``lattice_rows``."""
    if not lattice_rows:
        return all(x == 0 for x in vec)
    return solve_left(lattice_rows, vec) is not None


def lattice_preimage(m: Matrix, lattice_rows: Matrix) -> Matrix:
    """Rows spanning ``{x : x m  in  rowspan(lattice_rows)}``."""
    p = len(m)
    if p == 0:
        return ()
    stacked = vstack(m, lattice_rows)
    ker = kernel_basis(stacked)
    return mat(row[:p] for row in ker)


# ---------------------------------------------------------------------------
# groups, elements, homomorphisms


class FinAbGroup:
    """A finitely generated abelian group given by a presentation.

    Two presentations of isomorphic groups have the same canonical form
    (free rank plus the chain of invariant factors, each >= 2).
    """

    __slots__ = ("n", "relations", "_canon")

    def __init__(self, n_generators: int, relations: Iterable[Iterable[int]] = ()):
        self.n = int(n_generators)
        rel = mat(relations)
        for row in rel:
            if len(row) != self.n:
                raise ValueError("relation length does not match generator count")
        self.relations = rel
        self._canon = None

    # -- canonical data

    def _canonical(self):
        if self._canon is None:
            if self.relations:
                d, _, v = smith_normal_form(self.relations)
                k = min(len(self.relations), self.n)
                mods = tuple(
                    (d[j][j] if j < k else 0) for j in range(self.n)
                )
            else:
                v = identity_matrix(self.n)
                mods = (0,) * self.n
            self._canon = (v, mods)
        return self._canon

    def moduli(self) -> tuple[int, ...]:
        """Per-coordinate moduli in the diagonalized basis (0 = free)."""
        return self._canonical()[1]

    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.moduli() if d >= 2)

    def free_rank(self) -> int:
        return sum(1 for d in self.moduli() if d == 0)

    def canonical_form(self) -> tuple[int, tuple[int, ...]]:
        return (self.free_rank(), self.invariant_factors())

    def is_trivial(self) -> bool:
        return self.canonical_form() == (0, ())

    def canonical_coords(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative of an element in the diagonalized basis.

        Free coordinates pass through; torsion coordinates land in [0, d).
        Coordinates with modulus 1 are dropped.
        """
        if len(coords) != self.n:
            raise ValueError("coordinate length mismatch")
        v, mods = self._canonical()
        y = vec_mat(coords, v)
        out = []
        for yj, dj in zip(y, mods):
            if dj == 1:
                continue
            out.append(yj % dj if dj > 1 else yj)
        return tuple(out)

    def is_zero(self, coords: Sequence[int]) -> bool:
        return all(c == 0 for c in self.canonical_coords(coords))

    # -- elements

    def element(self, coords: Sequence[int]) -> "AbElement":
        return AbElement(self, tuple(int(c) for c in coords))

    def zero(self) -> "AbElement":
        return self.element((0,) * self.n)

    def generator(self, i: int) -> "AbElement":
        return self.element(tuple(1 if j == i else 0 for j in range(self.n)))

    def generators(self) -> list["AbElement"]:
        return [self.generator(i) for i in range(self.n)]

    def elements(self) -> list["AbElement"]:
        """All elements; only for finite groups."""
        if self.free_rank() > 0:
            raise ValueError("group is infinite")
        out = [self.zero()]
        seen = {out[0].canonical()}
        frontier = [out[0]]
        gens = self.generators()
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    s = e + g
                    c = s.canonical()
                    if c not in seen:
                        seen.add(c)
                        out.append(s)
                        nxt.append(s)
            frontier = nxt
        return out

    def bounded_elements(self, bound: int) -> Iterable["AbElement"]:
        """Elements with generator coefficients in [-bound, bound].

        Deterministic order: increasing max-norm, then lexicographic.
        """
        if self.n == 0:
            yield self.zero()
            return
        for b in range(bound + 1):
            for coords in _coords_with_max_norm(self.n, b):
                yield self.element(coords)

    # -- structural equality

    def __eq__(self, other):
        return (
            isinstance(other, FinAbGroup)
            and self.n == other.n
            and self.relations == other.relations
        )

    def __hash__(self):
        return hash((self.n, self.relations))

    def __repr__(self):
        rank, factors = self.canonical_form()
        parts = ["Z"] * rank + [f"Z/{d}" for d in factors]
        return "FinAbGroup<%s>" % (" + ".join(parts) if parts else "0")


def _coords_with_max_norm(n: int, b: int):
    """Integer vectors of length n with max-norm exactly b, lexicographic."""
    if b == 0:
        yield (0,) * n
        return

    def rec(prefix, hit):
        if len(prefix) == n:
            if hit:
                yield tuple(prefix)
            return
        rest = n - len(prefix) - 1
        for c in range(-b, b + 1):
            if not hit and abs(c) < b and rest == 0:
                continue
            yield from rec(prefix + [c], hit or abs(c) == b)

    yield from rec([], False)


@dataclass(frozen=True)
class AbElement:
    """An element of a :class:`FinAbGroup`, compared by canonical form."""

    group: FinAbGroup
    coords: tuple[int, ...]

    def canonical(self) -> tuple[int, ...]:
        return self.group.canonical_coords(self.coords)

    def is_zero(self) -> bool:
        return self.group.is_zero(self.coords)

    def __add__(self, other: "AbElement") -> "AbElement":
        if self.group != other.group:
            raise ValueError("elements of different groups")
        return AbElement(
            self.group, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self) -> "AbElement":
        return AbElement(self.group, tuple(-a for a in self.coords))

    def __sub__(self, other: "AbElement") -> "AbElement":
        return self + (-other)

    def scale(self, c: int) -> "AbElement":
        return AbElement(self.group, tuple(c * a for a in self.coords))

    def __eq__(self, other):
        return (
            isinstance(other, AbElement)
            and self.group == other.group
            and self.canonical() == other.canonical()
        )

    def __hash__(self):
        return hash((self.group, self.canonical()))

    def __repr__(self):
        return f"AbElement{self.coords}"


class AbHom:
    """A homomorphism between presented groups, as a matrix on generators."""

    __slots__ = ("src", "tgt", "matrix")

    def __init__(self, src: FinAbGroup, tgt: FinAbGroup, matrix: Iterable[Iterable[int]]):
        self.src = src
        self.tgt = tgt
        self.matrix = mat(matrix)
        if len(self.matrix) != src.n:
            raise ValueError("matrix row count must equal source generators")
        for row in self.matrix:
            if len(row) != tgt.n:
                raise ValueError("matrix column count must equal target generators")

    @staticmethod
    def identity(g: FinAbGroup) -> "AbHom":
        return AbHom(g, g, identity_matrix(g.n))

    @staticmethod
    def zero(src: FinAbGroup, tgt: FinAbGroup) -> "AbHom":
        return AbHom(src, tgt, zero_matrix(src.n, tgt.n))

    def __call__(self, e: AbElement) -> AbElement:
        if e.group != self.src:
            raise ValueError("element not in source group")
        return AbElement(self.tgt, vec_mat(e.coords, self.matrix))

    def apply_coords(self, coords: Sequence[int]) -> tuple[int, ...]:
        return vec_mat(coords, self.matrix)

    def then(self, other: "AbHom") -> "AbHom":
        """Composite ``other after self``."""
        if self.tgt != other.src:
            raise ValueError("non-composable homs")
        return AbHom(self.src, other.tgt, mat_mul(self.matrix, other.matrix))

    def __add__(self, other: "AbHom") -> "AbHom":
        if self.src != other.src or self.tgt != other.tgt:
            raise ValueError("hom shapes differ")
        return AbHom(
            self.src,
            self.tgt,
            tuple(
                tuple(a + b for a, b in zip(r1, r2))
                for r1, r2 in zip(self.matrix, other.matrix)
            ),
        )

    def __sub__(self, other: "AbHom") -> "AbHom":
        return self + AbHom(other.src, other.tgt, tuple(tuple(-x for x in r) for r in other.matrix))

    def is_well_defined(self) -> bool:
        return all(
            lattice_member(vec_mat(r, self.matrix), self.tgt.relations)
            for r in self.src.relations
        )

    def check(self) -> "AbHom":
        if not self.is_well_defined():
            raise IllFormedHom("matrix does not respect source relations")
        return self

    def __eq__(self, other):
        """Equality as homomorphisms: matrices agree modulo target relations."""
        if not isinstance(other, AbHom):
            return False
        if self.src != other.src or self.tgt != other.tgt:
            return False
        return all(
            self.tgt.is_zero(tuple(a - b for a, b in zip(r1, r2)))
            for r1, r2 in zip(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash(
            (self.src, self.tgt, tuple(self.tgt.canonical_coords(r) for r in self.matrix))
        )

    # -- kernels / cokernels / inverses

    def cokernel(self) -> FinAbGroup:
        return FinAbGroup(self.tgt.n, vstack(self.matrix, self.tgt.relations))

    def kernel(self) -> tuple[FinAbGroup, "AbHom"]:
        """The kernel with its inclusion into the source."""
        k = lattice_preimage(self.matrix, self.tgt.relations)
        rels = lattice_preimage(k, self.src.relations) if k else ()
        grp = FinAbGroup(len(k), rels)
        return grp, AbHom(grp, self.src, k)

    def is_injective(self) -> bool:
        k = lattice_preimage(self.matrix, self.tgt.relations)
        return all(lattice_member(row, self.src.relations) for row in k)

    def is_surjective(self) -> bool:
        return self.cokernel().is_trivial()

    def is_iso(self) -> bool:
        """Two-sided invertibility, via kernel and cokernel triviality."""
        self.check()
        return self.is_surjective() and self.is_injective()

    def inverse(self) -> "AbHom":
        self.check()
        stacked = vstack(self.matrix, self.tgt.relations)
        rows = []
        for j in range(self.tgt.n):
            e = tuple(1 if i == j else 0 for i in range(self.tgt.n))
            z = solve_left(stacked, e)
            if z is None:
                raise ValueError("hom is not surjective, no inverse")
            rows.append(z[: self.src.n])
        inv = AbHom(self.tgt, self.src, rows)
        if not inv.is_well_defined():
            raise ValueError("hom is not injective, no inverse")
        if not (self.then(inv) == AbHom.identity(self.src)):
            raise ValueError("hom is not invertible")
        return inv


# ---------------------------------------------------------------------------
# direct sums and tensor products


def direct_sum(groups: Sequence[FinAbGroup]) -> FinAbGroup:
    """Block presentation of the direct sum.

    >>> direct_sum([FinAbGroup(1, [(2,)]), FinAbGroup(1, [(4,)])]).canonical_form()
    (0, (2, 4))
    """
    n = sum(g.n for g in groups)
    rels = []
    offset = 0
    for g in groups:
        for r in g.relations:
            row = [0] * n
            row[offset : offset + g.n] = list(r)
            rels.append(row)
        offset += g.n
    return FinAbGroup(n, rels)


def direct_sum_with_maps(
    groups: Sequence[FinAbGroup],
) -> tuple[FinAbGroup, list[AbHom], list[AbHom]]:
    """Direct sum together with the canonical injections and projections."""
    total = direct_sum(groups)
    injections = []
    projections = []
    offset = 0
    for g in groups:
        inj = [[0] * total.n for _ in range(g.n)]
        for i in range(g.n):
            inj[i][offset + i] = 1
        proj = [[0] * g.n for _ in range(total.n)]
        for i in range(g.n):
            proj[offset + i][i] = 1
        injections.append(AbHom(g, total, inj))
        projections.append(AbHom(total, g, proj))
        offset += g.n
    return total, injections, projections


@dataclass(frozen=True)
class TensorProduct:
    """Tensor product presentation plus the bilinear pairing on generators."""

    group: FinAbGroup
    left: FinAbGroup
    right: FinAbGroup

    def pair_index(self, i: int, j: int) -> int:
        return i * self.right.n + j

    def of(self, x: AbElement, y: AbElement) -> AbElement:
        if x.group != self.left or y.group != self.right:
            raise ValueError("elements not in tensor factors")
        coords = [0] * self.group.n
        for i, xi in enumerate(x.coords):
            if xi == 0:
                continue
            for j, yj in enumerate(y.coords):
                if yj:
                    coords[self.pair_index(i, j)] += xi * yj
        return self.group.element(coords)


def tensor(g: FinAbGroup, h: FinAbGroup) -> TensorProduct:
    """Presentation of ``g (x) h`` on generator pairs.

    >>> t = tensor(FinAbGroup(2), FinAbGroup(1, [(2,)]))
    >>> t.group.canonical_form()
    (0, (2, 2))
    """
    n = g.n * h.n
    rels = []
    for r in g.relations:
        for j in range(h.n):
            row = [0] * n
            for i in range(g.n):
                row[i * h.n + j] = r[i]
            rels.append(row)
    for s in h.relations:
        for i in range(g.n):
            row = [0] * n
            for j in range(h.n):
                row[i * h.n + j] = s[j]
            rels.append(row)
    return TensorProduct(FinAbGroup(n, rels), g, h)


# ---------------------------------------------------------------------------
# JSON encoding


def group_to_json(g: FinAbGroup) -> dict:
    return {"generators": g.n, "relations": [list(r) for r in g.relations]}


def group_from_json(obj: dict) -> FinAbGroup:
    return FinAbGroup(obj["generators"], obj.get("relations", []))


def hom_to_json(h: AbHom) -> dict:
    return {"matrix": [list(r) for r in h.matrix]}


def hom_from_json(obj: dict, src: FinAbGroup, tgt: FinAbGroup) -> AbHom:
    return AbHom(src, tgt, obj["matrix"])
