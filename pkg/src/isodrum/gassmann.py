"""Finite permutation groups, SL(3, 2) and its Gassmann pair.

Everything here is exact: permutations are tuples of ints, linear algebra
runs over the rationals.  Permutations act on the right, ``x . (p q) =
(x . p) . q``, so ``compose(p, q)[x] == q[p[x]]``.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy

Permutation = tuple  # tuple[int, ...] of images, 0-based


class GroupError(ValueError):
    pass


class IntertwinerError(ArithmeticError):
    """No invertible intertwiner exists between the given representations."""


def identity(degree: int) -> Permutation:
    return tuple(range(degree))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply ``p`` first, then ``q``."""
    return tuple(q[i] for i in p)


def inverse(p: Permutation) -> Permutation:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def conjugate(g: Permutation, h: Permutation) -> Permutation:
    """Return ``g h g^-1``."""
    return compose(compose(g, h), inverse(g))


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def fixed_points(p: Permutation) -> list[int]:
    return [i for i, j in enumerate(p) if i == j]


def element_order(p: Permutation) -> int:
    q, k = p, 1
    e = identity(len(p))
    while q != e:
        q = compose(q, p)
        k += 1
    return k


def permutation_matrix(p: Permutation) -> np.ndarray:
    """Matrix ``P`` with ``(P f)[x] = f[x . p]``; ``P(p) P(q) = P(p q)``."""
    n = len(p)
    m = np.zeros((n, n), dtype=np.int64)
    m[np.arange(n), list(p)] = 1
    return m


@dataclass(frozen=True)
class PermutationGroup:
    generators: tuple
    elements: tuple
    degree: int
    _index: dict = field(default=None, repr=False, compare=False)

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence[int]]) -> "PermutationGroup":
        gens = tuple(tuple(g) for g in generators)
        if not gens:
            raise GroupError("at least one generator is required")
        degree = len(gens[0])
        for g in gens:
            if len(g) != degree or not is_permutation(g):
                raise GroupError(f"not a permutation of degree {degree}: {g}")
        e = identity(degree)
        seen = {e}
        queue = deque([e])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        elements = tuple(sorted(seen))
        index = {g: i for i, g in enumerate(elements)}
        return cls(gens, elements, degree, index)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Permutation:
        return identity(self.degree)

    def index(self, g: Permutation) -> int:
        return self._index[g]

    def __contains__(self, g) -> bool:
        return tuple(g) in self._index

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def orbit(self, point: int) -> set[int]:
        orbit = {point}
        queue = deque([point])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = g[x]
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        return orbit

    def subgroup(self, elements: Iterable[Sequence[int]]) -> "Subgroup":
        return Subgroup.from_elements(self, elements)

    def generated_subgroup(self, generators: Iterable[Sequence[int]]) -> "Subgroup":
        gens = [tuple(g) for g in generators]
        if not gens:
            return Subgroup(frozenset([self.identity]), self)
        return Subgroup.from_elements(self, PermutationGroup.from_generators(gens).elements)


@dataclass(frozen=True)
class Subgroup:
    elements: frozenset
    parent: PermutationGroup = field(repr=False, compare=False)

    @classmethod
    def from_elements(cls, parent: PermutationGroup, elements) -> "Subgroup":
        members = frozenset(tuple(g) for g in elements)
        if not members:
            raise GroupError("a subgroup is never empty")
        for g in members:
            if g not in parent:
                raise GroupError(f"{g} is not an element of the parent group")
        if parent.identity not in members:
            raise GroupError("subgroup does not contain the identity")
        for g in members:
            if inverse(g) not in members:
                raise GroupError("subgroup is not closed under inverses")
            for h in members:
                if compose(g, h) not in members:
                    raise GroupError("subgroup is not closed under composition")
        return cls(members, parent)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def __contains__(self, g) -> bool:
        return tuple(g) in self.elements

    def __iter__(self):
        return iter(sorted(self.elements))

    def conjugate_by(self, g: Permutation) -> "Subgroup":
        return Subgroup(frozenset(conjugate(g, h) for h in self.elements), self.parent)


# ---------------------------------------------------------------------------
# SL(3, 2) acting on the Fano plane

# Points of PG(2, 2) are the nonzero vectors of F_2^3, encoded as bitmasks
# 1..7; point index = mask - 1.  Planes (lines of the Fano plane) are encoded
# by their normal vector u, plane = {v : u.v = 0}, index = mask(u) - 1.


def _mat_vec(m: tuple, v: int) -> int:
    out = 0
    for row in range(3):
        bit = bin(m[row] & v).count("1") & 1
        out |= bit << row
    return out


def _invertible_f2_matrices() -> list[tuple]:
    """All 3x3 matrices over F_2 with nonzero determinant, rows as bitmasks."""
    mats = []
    for rows in itertools.product(range(1, 8), repeat=3):
        images = {_mat_vec(rows, v) for v in range(1, 8)}
        if len(images) == 7:
            mats.append(rows)
    return mats


def _transpose(m: tuple) -> tuple:
    return tuple(
        sum(((m[r] >> c) & 1) << r for r in range(3)) for c in range(3)
    )


def fano_points() -> list[tuple[int, int, int]]:
    """Coordinates of the 7 points, indexed like the permutation action."""
    return [tuple((v >> k) & 1 for k in range(3)) for v in range(1, 8)]


def fano_lines() -> list[frozenset]:
    """Point sets of the 7 planes, indexed like the plane action."""
    return [
        frozenset(v - 1 for v in range(1, 8) if bin(u & v).count("1") % 2 == 0)
        for u in range(1, 8)
    ]


@lru_cache(maxsize=None)
def _sl3_f2_tables() -> tuple[PermutationGroup, dict]:
    point_perms = []
    plane_of = {}
    lines = fano_lines()
    line_index = {line: i for i, line in enumerate(lines)}
    for m in _invertible_f2_matrices():
        p = tuple(_mat_vec(m, v) - 1 for v in range(1, 8))
        q = tuple(line_index[frozenset(p[x] for x in line)] for line in lines)
        point_perms.append(p)
        plane_of[p] = q
    # two generators suffice; pick them from the matrices deterministically
    group = PermutationGroup.from_generators(point_perms)
    gens = _two_generators(group)
    group = PermutationGroup.from_generators(gens)
    return group, plane_of


def _two_generators(group: PermutationGroup) -> list[Permutation]:
    for a in group.elements:
        if element_order(a) != 2:
            continue
        for b in group.elements:
            if element_order(b) != 3:
                continue
            if len(PermutationGroup.from_generators([a, b])) == len(group):
                return [a, b]
    return list(group.elements)


def sl3_f2() -> PermutationGroup:
    """SL(3, 2) as a permutation group of degree 7 on the points of the Fano plane."""
    return _sl3_f2_tables()[0]


def plane_action(g: Permutation) -> Permutation:
    """Permutation induced by ``g`` on the 7 planes (lines of the Fano plane)."""
    return _sl3_f2_tables()[1][tuple(g)]


def point_stabilizer(group: PermutationGroup, point: int = 0) -> Subgroup:
    return Subgroup(frozenset(g for g in group if g[point] == point), group)


def plane_stabilizer(group: PermutationGroup, plane: int = 0) -> Subgroup:
    return Subgroup(frozenset(g for g in group if plane_action(g)[plane] == plane), group)


def gassmann_pair() -> tuple[PermutationGroup, Subgroup, Subgroup]:
    """``(G, H, K)`` with H a point stabilizer and K a plane stabilizer of SL(3, 2)."""
    G = sl3_f2()
    return G, point_stabilizer(G, 0), plane_stabilizer(G, 0)


# ---------------------------------------------------------------------------
# conjugacy


@dataclass(frozen=True)
class ConjugacyClassTable:
    classes: tuple  # of frozensets, ordered by representative
    representatives: tuple
    class_of: dict = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def counts(self, subgroup: Subgroup | Iterable) -> tuple[int, ...]:
        """Number of elements of ``subgroup`` in each class."""
        counts = [0] * len(self.classes)
        for h in subgroup:
            counts[self.class_of[h]] += 1
        return tuple(counts)


@lru_cache(maxsize=32)
def conjugacy_classes(group: PermutationGroup) -> ConjugacyClassTable:
    class_of: dict = {}
    classes = []
    for g in group.elements:
        if g in class_of:
            continue
        cls = frozenset(conjugate(x, g) for x in group.elements)
        for h in cls:
            class_of[h] = len(classes)
        classes.append(cls)
    reps = tuple(min(c) for c in classes)
    return ConjugacyClassTable(tuple(classes), reps, class_of)


def is_almost_conjugate(group: PermutationGroup, H: Subgroup, K: Subgroup) -> bool:
    """True iff every conjugacy class meets ``H`` and ``K`` equally often."""
    table = conjugacy_classes(group)
    return table.counts(H) == table.counts(K)


def find_conjugator(group: PermutationGroup, H: Subgroup, K: Subgroup):
    """Some ``g`` with ``g H g^-1 == K``, or None after trying every element."""
    if H.order != K.order:
        return None
    target = K.elements
    for g in group.elements:
        if all(conjugate(g, h) in target for h in H.elements):
            return g
    return None


def is_conjugate(group: PermutationGroup, H: Subgroup, K: Subgroup) -> bool:
    return find_conjugator(group, H, K) is not None


# ---------------------------------------------------------------------------
# coset actions


@dataclass(frozen=True)
class CosetAction:
    """Right translation action of a group on the right cosets ``H x``.

    Coset 0 is ``H`` itself; the others are numbered by their smallest
    element in the group's sorted order.
    """

    subgroup: Subgroup
    cosets: tuple  # of frozensets
    action: dict = field(repr=False, compare=False)  # element -> Permutation of coset labels

    @property
    def index(self) -> int:
        return len(self.cosets)

    def __call__(self, g: Permutation) -> Permutation:
        return self.action[tuple(g)]

    def matrix(self, g: Permutation) -> np.ndarray:
        return permutation_matrix(self(g))

    def fixed_count(self, g: Permutation) -> int:
        return len(fixed_points(self(g)))

    def coset_of(self, g: Permutation) -> int:
        for i, c in enumerate(self.cosets):
            if g in c:
                return i
        raise GroupError(f"{g} lies in no coset")


def coset_action(group: PermutationGroup, H: Subgroup) -> CosetAction:
    label: dict = {}
    cosets: list[frozenset] = []
    for x in (group.identity,) + group.elements:
        if x in label:
            continue
        coset = frozenset(compose(h, x) for h in H.elements)
        for y in coset:
            label[y] = len(cosets)
        cosets.append(coset)
    reps = [min(c) for c in cosets]
    action = {
        g: tuple(label[compose(r, g)] for r in reps) for g in group.elements
    }
    return CosetAction(H, tuple(cosets), action)


def permutation_character(action: CosetAction, group: PermutationGroup) -> dict:
    return {g: action.fixed_count(g) for g in group.elements}


# ---------------------------------------------------------------------------
# exact intertwiners


def _as_int_matrices(mats) -> list[np.ndarray]:
    return [np.asarray(m, dtype=object) for m in mats]


def intertwining_space(source: Sequence, target: Sequence) -> list[sympy.Matrix]:
    """Rational basis of ``{T : T S_i = R_i T for all i}``.

    ``source`` and ``target`` are equally long lists of square integer
    matrices (``S_i`` of size n, ``R_i`` of size m); T is m x n.
    """
    if len(source) != len(target):
        raise ValueError("source and target need the same number of matrices")
    source = [sympy.Matrix(np.asarray(s, dtype=object).tolist()) for s in source]
    target = [sympy.Matrix(np.asarray(r, dtype=object).tolist()) for r in target]
    n = source[0].shape[0]
    m = target[0].shape[0]
    rows = []
    for S, R in zip(source, target):
        # (T S - R T)[a, b] = sum_k T[a,k] S[k,b] - sum_k R[a,k] T[k,b]
        for a in range(m):
            for b in range(n):
                row = [0] * (m * n)
                for k in range(n):
                    if S[k, b]:
                        row[a * n + k] += S[k, b]
                for k in range(m):
                    if R[a, k]:
                        row[k * n + b] -= R[a, k]
                if any(row):
                    rows.append(row)
    system = sympy.Matrix(rows) if rows else sympy.zeros(1, m * n)
    return [sympy.Matrix(m, n, list(v)) for v in system.nullspace()]


@dataclass(frozen=True)
class Intertwiner:
    """Exact intertwiner ``T`` plus its orthogonal (polar) normalization.

    ``matrix`` holds rationals.  ``T T^t`` is generally not a multiple of
    the identity for any rational choice, so the orthogonal version lives
    in floating point: ``orthogonal = T (T^t T)^(-1/2)``, which still
    intertwines because ``T^t T`` commutes with the source representation.
    ``scale`` is ``|det T|^(1/n)``, the factor a conformal T would carry.
    """

    matrix: tuple  # tuple of tuples of Fraction

    @property
    def size(self) -> int:
        return len(self.matrix)

    def as_sympy(self) -> sympy.Matrix:
        return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in self.matrix])

    def integer_form(self) -> tuple[np.ndarray, int]:
        """``(N, d)`` with integer ``N`` and ``T == N / d``."""
        den = 1
        for row in self.matrix:
            for x in row:
                den = den * x.denominator // _gcd(den, x.denominator)
        N = np.array([[int(x * den) for x in row] for row in self.matrix], dtype=object)
        return N, den

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix])

    @property
    def scale(self) -> float:
        det = abs(float(self.as_sympy().det()))
        return det ** (1.0 / self.size)

    def orthogonal(self) -> np.ndarray:
        T = self.as_float()
        w, V = np.linalg.eigh(T.T @ T)
        return T @ (V / np.sqrt(w)) @ V.T

    def intertwines(self, source: Sequence, target: Sequence) -> bool:
        """Exact check of ``T S == R T`` for every pair."""
        N, _ = self.integer_form()
        for S, R in zip(_as_int_matrices(source), _as_int_matrices(target)):
            if not np.array_equal(N.dot(S), R.dot(N)):
                return False
        return True

    def to_json(self) -> list:
        return [[[x.numerator, x.denominator] for x in row] for row in self.matrix]

    @classmethod
    def from_json(cls, data) -> "Intertwiner":
        return cls(tuple(tuple(Fraction(a, b) for a, b in row) for row in data))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _to_fraction_rows(M: sympy.Matrix) -> tuple:
    return tuple(
        tuple(Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in M.row(i))
        for i in range(M.rows)
    )


def solve_intertwiner(source: Sequence, target: Sequence, seed: int = 0, attempts: int = 200) -> Intertwiner:
    """An invertible rational intertwiner for two matrix representations.

    Basis vectors of the solution space are tried first, then sums of
    pairs, then random small-integer combinations from a seeded RNG.
    """
    basis = intertwining_space(source, target)
    if not basis:
        raise IntertwinerError("the representations admit no nonzero intertwiner")
    if basis[0].rows != basis[0].cols:
        raise IntertwinerError("representations of different dimension")
    candidates = list(basis)
    candidates += [a + b for a, b in itertools.combinations(basis, 2)]
    rng = random.Random(seed)
    for _ in range(attempts):
        candidates.append(sum((rng.randint(-3, 3) * b for b in basis), sympy.zeros(*basis[0].shape)))
    for T in candidates:
        if T.det() != 0:
            T = T / _content(T)
            return Intertwiner(_to_fraction_rows(T))
    raise IntertwinerError("no invertible element found in the intertwining space")


def _content(T: sympy.Matrix):
    """Positive rational g with T / g integral and primitive, sign fixed by the first nonzero entry."""
    entries = [x for x in T if x != 0]
    dens = [sympy.fraction(x)[1] for x in entries]
    lcm = sympy.ilcm(*dens) if len(dens) > 1 else dens[0]
    ints = [int(x * lcm) for x in entries]
    g = sympy.igcd(*ints) if len(ints) > 1 else abs(ints[0])
    sign = 1 if ints[0] > 0 else -1
    return sympy.Rational(sign * g, lcm)


def intertwiner(group: PermutationGroup, H: Subgroup, K: Subgroup, seed: int = 0) -> Intertwiner:
    """Invertible ``T`` with ``T rho_H(g) = rho_K(g) T`` for all ``g``.

    Solved on the generators, then checked on every element.
    """
    if H.index != K.index:
        raise IntertwinerError("subgroups of different index")
    act_h = coset_action(group, H)
    act_k = coset_action(group, K)
    src = [act_h.matrix(g) for g in group.generators]
    dst = [act_k.matrix(g) for g in group.generators]
    T = solve_intertwiner(src, dst, seed=seed)
    if not T.intertwines([act_h.matrix(g) for g in group], [act_k.matrix(g) for g in group]):
        raise IntertwinerError("intertwining fails off the generators")
    return T


def gassmann_report(group: PermutationGroup, H: Subgroup, K: Subgroup, seed: int = 0) -> dict:
    """Summary of the Gassmann certificate, ready for ``json.dumps``."""
    table = conjugacy_classes(group)
    almost = is_almost_conjugate(group, H, K)
    report = {
        "group_order": group.order,
        "class_sizes": table.sizes,
        "class_representatives": [list(r) for r in table.representatives],
        "H": {"order": H.order, "index": H.index, "class_counts": list(table.counts(H))},
        "K": {"order": K.order, "index": K.index, "class_counts": list(table.counts(K))},
        "almost_conjugate": almost,
        "conjugate": is_conjugate(group, H, K),
        "intertwiner": None,
    }
    if almost:
        report["intertwiner"] = intertwiner(group, H, K, seed=seed).to_json()
    return report
