"""Permutation groups acting on state indices.

Group elements are image tuples: ``g[i]`` is the image of index ``i``.
Composition is ``(g * h)(i) = g(h(i))``; see :func:`compose`.  A group acts on
the index space ``C^n`` through permutation matrices ``U(g) e_i = e_{g(i)}``.

Representation data is provided for abelian groups (one-dimensional
characters, arbitrary multiplicity) and for the symmetric group ``S_N`` acting
on unordered pairs, whose permutation representation splits into the trivial
irrep ``a``, the standard irrep ``b`` and the ``(N-2, 2)`` irrep ``c``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, NonInvariantGroup, UnsupportedRepresentation

MAX_ELEMENTS = 10**6
MAX_SN_PAIRS = 9
MAX_AUTOMORPHISM_DEGREE = 16


# -- permutations ------------------------------------------------------------


def identity(n: int) -> tuple:
    return tuple(range(n))


def compose(g, h) -> tuple:
    """``g * h``: apply ``h`` first, then ``g``."""
    return tuple(g[i] for i in h)


def inverse(g) -> tuple:
    inv = [0] * len(g)
    for i, gi in enumerate(g):
        inv[gi] = i
    return tuple(inv)


def from_cycles(n: int, *cycles) -> tuple:
    """Build a permutation of ``range(n)`` from 0-based cycles."""
    img = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return tuple(img)


def check_permutation(g, n: int | None = None) -> tuple:
    g = tuple(int(x) for x in g)
    if sorted(g) != list(range(len(g))) or (n is not None and len(g) != n):
        raise ValueError(f"not a permutation of range({n or len(g)}): {g}")
    return g


def permutation_matrix(g) -> np.ndarray:
    n = len(g)
    u = np.zeros((n, n))
    u[list(g), np.arange(n)] = 1.0
    return u


def moved_points(g) -> int:
    return sum(1 for i, gi in enumerate(g) if i != gi)


# -- groups --------------------------------------------------------------------


@dataclass(eq=False)
class PermutationGroup:
    """Group generated by permutations of ``range(degree)``.

    ``kind`` tags the constructions that carry representation data
    (``"cyclic"``, ``"two_orbit_cyclic"``, ``"sn_pairs"``); ``order`` may be
    supplied when it is known without enumerating the elements.
    """

    degree: int
    generators: tuple
    kind: str = "generic"
    param: int | None = None
    known_order: int | None = None
    stabilized_point: int | None = None
    _elements: list | None = field(default=None, repr=False)
    _index: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        gens = tuple(check_permutation(g, self.degree) for g in self.generators)
        self.generators = tuple(g for g in gens if g != identity(self.degree))

    @classmethod
    def from_elements(cls, degree: int, elements, **kw) -> "PermutationGroup":
        elements = [tuple(g) for g in elements]
        grp = cls(degree, tuple(elements), known_order=len(elements), **kw)
        grp._elements = elements
        grp._index = {g: k for k, g in enumerate(elements)}
        return grp

    @property
    def elements(self) -> list:
        """All elements, identity first, in breadth-first order over the generators."""
        if self._elements is None:
            if self.known_order is not None and self.known_order > MAX_ELEMENTS:
                raise BudgetExceeded(f"group order {self.known_order} exceeds {MAX_ELEMENTS}")
            e = identity(self.degree)
            seen = {e: 0}
            elems = [e]
            queue = deque([e])
            while queue:
                g = queue.popleft()
                for s in self.generators:
                    h = compose(s, g)
                    if h not in seen:
                        seen[h] = len(elems)
                        elems.append(h)
                        queue.append(h)
                        if len(elems) > MAX_ELEMENTS:
                            raise BudgetExceeded(f"group has more than {MAX_ELEMENTS} elements")
            self._elements, self._index = elems, seen
        return self._elements

    def index(self, g) -> int:
        self.elements
        return self._index[tuple(g)]

    def __contains__(self, g) -> bool:
        self.elements
        return tuple(g) in self._index

    @property
    def order(self) -> int:
        if self.known_order is not None:
            return self.known_order
        return len(self.elements)

    def __len__(self):
        return self.order

    @property
    def is_abelian(self) -> bool:
        return all(compose(a, b) == compose(b, a) for a, b in itertools.combinations(self.generators, 2))

    def stabilizer(self, point: int) -> "PermutationGroup":
        elems = [g for g in self.elements if g[point] == point]
        return PermutationGroup.from_elements(self.degree, elems, stabilized_point=point)

    def element_array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.intp).reshape(-1, self.degree)


def cyclic_group(N: int) -> PermutationGroup:
    """Cyclic shifts ``i -> i + 1 (mod N)``."""
    if N < 1:
        raise ValueError(f"invalid N={N}")
    shift = tuple((i + 1) % N for i in range(N))
    return PermutationGroup(N, (shift,), kind="cyclic", param=N, known_order=N)


def two_orbit_cyclic_group(N: int) -> PermutationGroup:
    """Simultaneous cyclic shift of indices ``0..N-1`` and ``N..2N-1``."""
    if N < 1:
        raise ValueError(f"invalid N={N}")
    shift = tuple((i + 1) % N for i in range(N)) + tuple(N + (i + 1) % N for i in range(N))
    return PermutationGroup(2 * N, (shift,), kind="two_orbit_cyclic", param=N, known_order=N)


def pair_list(N: int) -> list:
    return list(itertools.combinations(range(N), 2))


def pair_permutation(point_perm, N: int) -> tuple:
    """Permutation induced on ``pair_list(N)`` by a permutation of the ``N`` points."""
    index = {p: k for k, p in enumerate(pair_list(N))}
    return tuple(index[tuple(sorted((point_perm[i], point_perm[j])))] for i, j in pair_list(N))


def point_permutation(pair_perm, N: int) -> tuple:
    """Recover the point permutation from its induced action on pairs (``N >= 3``)."""
    pairs = pair_list(N)
    index = {p: k for k, p in enumerate(pairs)}
    img = []
    for i in range(N):
        j, k = [x for x in range(N) if x != i][:2]
        a = set(pairs[pair_perm[index[tuple(sorted((i, j)))]]])
        b = set(pairs[pair_perm[index[tuple(sorted((i, k)))]]])
        img.append((a & b).pop())
    return tuple(img)


def symmetric_group_on_pairs(N: int) -> PermutationGroup:
    """``S_N`` acting on the ``C(N, 2)`` unordered pairs of ``range(N)``."""
    if N < 4:
        raise ValueError(f"the pair action needs N >= 4, got {N}")
    if N > MAX_SN_PAIRS:
        raise BudgetExceeded(f"S_N enumeration capped at N <= {MAX_SN_PAIRS}")
    gens = (pair_permutation(from_cycles(N, [0, 1]), N), pair_permutation(from_cycles(N, list(range(N))), N))
    return PermutationGroup(math.comb(N, 2), gens, kind="sn_pairs", param=N, known_order=math.factorial(N))


def group_from_spec(spec: str, n: int | None = None) -> PermutationGroup:
    """Parse ``cyclic:N``, ``two-orbit-cyclic:N`` or ``sn-pairs:N``."""
    name, _, arg = spec.partition(":")
    try:
        N = int(arg)
    except ValueError:
        raise ValueError(f"bad group spec {spec!r}; expected e.g. cyclic:8") from None
    builders = {
        "cyclic": cyclic_group,
        "two-orbit-cyclic": two_orbit_cyclic_group,
        "sn-pairs": symmetric_group_on_pairs,
    }
    if name not in builders:
        raise ValueError(f"unknown group {name!r}; choose from {sorted(builders)}")
    grp = builders[name](N)
    if n is not None and grp.degree != n:
        raise ValueError(f"group {spec} has degree {grp.degree} but the codebook has {n} states")
    return grp


# -- invariance and automorphisms ---------------------------------------------------


def is_gram_invariant(gram, g, tol: float = 1e-12) -> bool:
    gram = np.asarray(gram)
    g = np.asarray(g, dtype=np.intp)
    if gram.shape != (g.size, g.size):
        raise ValueError("permutation and Gram sizes differ")
    return bool(np.max(np.abs(gram[np.ix_(g, g)] - gram)) <= tol)


def _entry_classes(gram, tol: float) -> np.ndarray:
    flat = np.asarray(gram).ravel()
    reps: list[complex] = []
    labels = np.empty(flat.size, dtype=np.intp)
    for k, z in enumerate(flat):
        for r, w in enumerate(reps):
            if abs(z - w) <= tol:
                labels[k] = r
                break
        else:
            labels[k] = len(reps)
            reps.append(z)
    return labels.reshape(np.shape(gram))


def _extend(labels, invariants, prefix: list) -> tuple | None:
    n = labels.shape[0]
    image = list(prefix) + [None] * (n - len(prefix))
    used = set(prefix)

    def search(k):
        if k == n:
            return True
        for p in range(n):
            if p in used or invariants[p] != invariants[k]:
                continue
            if all(labels[p, image[l]] == labels[k, l] and labels[image[l], p] == labels[l, k] for l in range(k)):
                image[k] = p
                used.add(p)
                if search(k + 1):
                    return True
                used.discard(p)
        image[k] = None
        return False

    if not all(labels[image[a], image[b]] == labels[a, b] for a in range(len(prefix)) for b in range(len(prefix))):
        return None
    return tuple(image) if search(len(prefix)) else None


def gram_automorphism_group(gram, tol: float = 1e-10, generators=None) -> PermutationGroup:
    """Group of index permutations ``g`` with ``gram[g(i), g(j)] == gram[i, j]``.

    Without ``generators`` the full group is found by a backtracking search
    along the base ``0, 1, ..., n-1`` (so ``n <= 16``); the order is the
    product of the basic orbit lengths and no element enumeration is needed.
    With ``generators`` their closure is returned after checking invariance.
    """
    gram = np.asarray(gram)
    n = gram.shape[0]
    if generators is not None:
        gens = tuple(check_permutation(g, n) for g in generators)
        for g in gens:
            if not is_gram_invariant(gram, g, tol):
                raise NonInvariantGroup(f"generator {g} does not preserve the Gram matrix")
        return PermutationGroup(n, gens)
    if n > MAX_AUTOMORPHISM_DEGREE:
        raise BudgetExceeded(f"brute-force automorphism search is capped at n <= {MAX_AUTOMORPHISM_DEGREE}; supply generators")
    labels = _entry_classes(gram, tol)
    invariants = [(labels[i, i], tuple(sorted(labels[i])), tuple(sorted(labels[:, i]))) for i in range(n)]
    gens = []
    order = 1
    for level in range(n):
        basic_orbit = 1
        prefix = list(range(level))
        for j in range(level + 1, n):
            if invariants[j] != invariants[level]:
                continue
            g = _extend(labels, invariants, prefix + [j])
            if g is not None:
                gens.append(g)
                basic_orbit += 1
        order *= basic_orbit
    return PermutationGroup(n, tuple(gens), known_order=order)


# -- orbits ----------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def orbits(G: PermutationGroup) -> list[list[int]]:
    """Orbits on ``range(degree)``, each sorted, ordered by smallest element."""
    uf = _UnionFind(G.degree)
    for g in G.generators:
        for i, gi in enumerate(g):
            uf.union(i, gi)
    classes: dict[int, list[int]] = {}
    for i in range(G.degree):
        classes.setdefault(uf.find(i), []).append(i)
    return sorted(classes.values())


def pair_orbits(G: PermutationGroup) -> np.ndarray:
    """Label matrix of the orbits of ``G`` on ordered pairs ``(i, j)``.

    Labels are consecutive integers assigned in row-major order of first
    appearance, so ``labels[0, 0] == 0``.
    """
    n = G.degree
    uf = _UnionFind(n * n)
    for g in G.generators:
        for i in range(n):
            for j in range(n):
                uf.union(i * n + j, g[i] * n + g[j])
    roots = np.array([uf.find(k) for k in range(n * n)])
    _, first = np.unique(roots, return_index=True)
    relabel = {roots[k]: r for r, k in enumerate(sorted(first))}
    return np.array([relabel[r] for r in roots]).reshape(n, n)


# -- representation data -------------------------------------------------------------------


@dataclass
class RepresentationData:
    """Irreducible content of the permutation representation of ``group``.

    ``characters[label]`` holds character values over ``group.elements``;
    only irreps with non-zero multiplicity are listed.
    """

    group: PermutationGroup
    labels: list
    dims: dict
    multiplicities: dict
    characters: dict
    projectors: dict

    def character(self, label, g) -> complex:
        return self.characters[label][self.group.index(g)]


def _abelian_characters(G: PermutationGroup) -> dict:
    elems = G.elements
    index = G._index
    gens = G.generators
    if not gens:
        return {0: np.ones(1, dtype=complex)}
    gen_orders = []
    for s in gens:
        k, h = 1, s
        while h != identity(G.degree):
            h, k = compose(s, h), k + 1
        gen_orders.append(k)
    # exponent word for every element from a BFS over generators
    words = np.zeros((len(elems), len(gens)), dtype=np.int64)
    seen = {identity(G.degree)}
    queue = deque([identity(G.degree)])
    while queue:
        g = queue.popleft()
        for j, s in enumerate(gens):
            h = compose(s, g)
            if h not in seen:
                seen.add(h)
                words[index[h]] = words[index[g]]
                words[index[h], j] += 1
                queue.append(h)
    succ = np.array([[index[compose(s, g)] for g in elems] for s in gens])
    if math.prod(gen_orders) > 10**5:
        raise BudgetExceeded("too many candidate characters")
    chars = {}
    for exps in itertools.product(*[range(o) for o in gen_orders]):
        phases = np.array([2 * np.pi * a / o for a, o in zip(exps, gen_orders)])
        values = np.exp(1j * (words @ phases))
        if all(np.allclose(values[succ[j]], values * np.exp(1j * phases[j]), atol=1e-9) for j in range(len(gens))):
            chars[exps[0] if len(gens) == 1 else exps] = values
    if len(chars) != len(elems):
        raise UnsupportedRepresentation("character enumeration did not produce |G| characters")
    return chars


def _sn_pair_characters(G: PermutationGroup) -> tuple[dict, dict]:
    N = G.param
    fix1, fix2 = [], []
    for g in G.elements:
        p = point_permutation(g, N)
        fix1.append(sum(1 for i in range(N) if p[i] == i))
        fix2.append(sum(1 for k in range(G.degree) if g[k] == k))
    fix1, fix2 = np.array(fix1, float), np.array(fix2, float)
    chars = {"a": np.ones_like(fix1, dtype=complex), "b": (fix1 - 1).astype(complex), "c": (fix2 - fix1).astype(complex)}
    dims = {"a": 1, "b": N - 1, "c": N * (N - 3) // 2}
    return chars, dims


def isotypic_projector(G: PermutationGroup, values: np.ndarray, dim: int) -> np.ndarray:
    """``(d/|G|) sum_g chi(g^-1) U(g)`` for character values over ``G.elements``."""
    elems = G.element_array()
    n = G.degree
    p = np.zeros((n, n), dtype=complex)
    coef = dim / len(elems) * np.conj(values)
    np.add.at(p, (elems, np.broadcast_to(np.arange(n), elems.shape)), np.broadcast_to(coef[:, None], elems.shape))
    return p


def characters_from_rep(G: PermutationGroup, degree: int | None = None, tol: float = 1e-9) -> RepresentationData:
    """Irreps, multiplicities, characters and isotypic projectors of ``G`` acting on indices."""
    if degree is not None and degree != G.degree:
        raise ValueError(f"group degree {G.degree} differs from {degree}")
    if G.kind == "sn_pairs":
        chars, dims = _sn_pair_characters(G)
    elif G.is_abelian:
        chars = _abelian_characters(G)
        dims = {lab: 1 for lab in chars}
    else:
        raise UnsupportedRepresentation("representation data is available for abelian groups and S_N on pairs only")
    elems = G.element_array()
    fix = np.sum(elems == np.arange(G.degree)[None, :], axis=1)
    labels, mults, projs = [], {}, {}
    for lab, values in chars.items():
        m = np.vdot(values, fix).real / len(elems)
        m_int = int(round(m))
        if abs(m - m_int) > 1e-9:
            raise UnsupportedRepresentation(f"non-integral multiplicity {m} for irrep {lab}")
        if m_int == 0:
            continue
        labels.append(lab)
        mults[lab] = m_int
        projs[lab] = isotypic_projector(G, values, dims[lab])
    rep = RepresentationData(G, labels, {lab: dims[lab] for lab in labels}, mults,
                             {lab: chars[lab] for lab in labels}, projs)
    _check_projectors(rep, tol)
    return rep


def _check_projectors(rep: RepresentationData, tol: float):
    n = rep.group.degree
    total = np.zeros((n, n), dtype=complex)
    for lab in rep.labels:
        p = rep.projectors[lab]
        if np.max(np.abs(p @ p - p)) > tol:
            raise UnsupportedRepresentation(f"projector for {lab} is not idempotent")
        if abs(np.trace(p).real - rep.multiplicities[lab] * rep.dims[lab]) > tol:
            raise UnsupportedRepresentation(f"projector trace mismatch for {lab}")
        total += p
    if np.max(np.abs(total - np.eye(n))) > tol:
        raise UnsupportedRepresentation("isotypic projectors do not resolve the identity")


# -- double cosets ----------------------------------------------------------------------


@dataclass
class DoubleCoset:
    representative: tuple
    elements: list

    def __len__(self):
        return len(self.elements)


def double_cosets(G: PermutationGroup, G0: PermutationGroup) -> list[DoubleCoset]:
    """Partition of ``G`` into double cosets ``G0 g G0``.

    The coset containing the identity comes first; the others follow in order
    of first appearance in ``G.elements``.  Each representative is the element
    moving the fewest points (ties broken lexicographically).
    """
    elems = G.elements
    for h in G0.generators:
        if h not in G:
            raise ValueError("G0 is not a subgroup of G")
    if G0.stabilized_point is not None:
        x = G0.stabilized_point
        point_class = {pt: k for k, orb in enumerate(orbits(G0)) for pt in orb}
        keys = [point_class[g[x]] for g in elems]
    else:
        index = G._index
        uf = _UnionFind(len(elems))
        for k, g in enumerate(elems):
            for h in G0.elements:
                uf.union(k, index[compose(h, g)])
                uf.union(k, index[compose(g, h)])
        keys = [uf.find(k) for k in range(len(elems))]
    groups: dict = {}
    for g, key in zip(elems, keys):
        groups.setdefault(key, []).append(g)
    return [DoubleCoset(min(members, key=lambda g: (moved_points(g), g)), members) for members in groups.values()]


def double_coset_char_sum(rep: RepresentationData, label, coset: DoubleCoset, G0: PermutationGroup) -> complex:
    """``(1/|G0|) sum_{g in coset} chi(g^-1)``."""
    values = rep.characters[label]
    total = sum(np.conj(values[rep.group.index(g)]) for g in coset.elements)
    return complex(total / G0.order)


# -- S_N acting on pairs: trivial-G0 vectors and double-coset sums ---------------------------------


def pair_rep_trivial_G0_states(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stabilizer-invariant vectors ``t``, ``u``, ``v`` in the pair basis.

    ``t`` spans the trivial irrep, ``u = s_0 + s_1`` the standard irrep and
    ``v`` the ``(N-2, 2)`` irrep, where ``s_i = sum_{j != i} |{i, j}> - (2/N) t``
    and the stabilized pair is ``{0, 1}``.
    """
    if N < 4:
        raise ValueError(f"need N >= 4, got {N}")
    pairs = pair_list(N)
    t = np.ones(len(pairs))

    def s(i):
        return np.array([1.0 if i in p else 0.0 for p in pairs]) - (2.0 / N) * t

    u = s(0) + s(1)
    e01 = np.zeros(len(pairs))
    e01[0] = 1.0
    v = e01 - u / (N - 2) - t / math.comb(N, 2)
    return t, u, v


def sn_pair_double_coset_reps(N: int) -> tuple[tuple, tuple, tuple]:
    """Pair-action images of ``e``, ``(0 2)`` and ``(0 2)(1 3)``."""
    return (
        pair_permutation(identity(N), N),
        pair_permutation(from_cycles(N, [0, 2]), N),
        pair_permutation(from_cycles(N, [0, 2], [1, 3]), N),
    )


def _vector_table(N: int) -> dict:
    t, u, v = pair_rep_trivial_G0_states(N)
    _, g1, g2 = sn_pair_double_coset_reps(N)
    sizes = (1, 2 * (N - 2), math.comb(N - 2, 2))

    def ratio(x, g):
        gx = np.zeros_like(x)
        gx[list(g)] = x
        return float(x @ gx / (x @ x))

    table = {"a": [float(s) for s in sizes]}
    for lab, x in (("b", u), ("c", v)):
        table[lab] = [1.0, sizes[1] * ratio(x, g1), sizes[2] * ratio(x, g2)]
    # the sums are integers; snapping them keeps radicands that vanish at nbar = 0 exactly zero
    for lab, row in table.items():
        snapped = [float(round(val)) for val in row]
        if max(abs(a - b) for a, b in zip(row, snapped)) > 1e-9:
            raise ArithmeticError(f"non-integral double-coset sum for {lab}: {row}")
        table[lab] = snapped
    return table


@lru_cache(maxsize=None)
def _enumerated_table(N: int) -> dict:
    G = symmetric_group_on_pairs(N)
    rep = characters_from_rep(G)
    G0 = G.stabilizer(0)
    cosets = double_cosets(G, G0)
    reps = sn_pair_double_coset_reps(N)
    ordered = [next(c for c in cosets if r in set(c.elements)) for r in reps]
    return {lab: [double_coset_char_sum(rep, lab, c, G0).real for c in ordered] for lab in ("a", "b", "c")}


def sn_pair_character_table(N: int, method: str = "vectors") -> dict:
    """Double-coset character sums ``{label: [chi(C0), chi(C1), chi(C2)]}`` for S_N on pairs.

    ``method="enumerate"`` sums characters over every element of ``S_N``;
    ``method="vectors"`` evaluates matrix elements of the stabilizer-invariant
    vectors, which works for any ``N >= 4``.
    """
    if method == "enumerate":
        return {k: list(v) for k, v in _enumerated_table(N).items()}
    if method == "vectors":
        return _vector_table(N)
    raise ValueError(f"unknown method {method!r}")
