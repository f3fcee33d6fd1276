"""Finite unital rings given by explicit operation tables.

A ring element is its carrier index (an int in ``range(ring.size)``); all
arithmetic goes through precomputed ``add``/``mul``/``neg`` tables, so every
constructor (zmod, matrix, triangular, product, quotient) yields the same
uniform exact representation.  Structural recipes are kept on the ring only
for display and serialization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .config import DEFAULT, Guards
from .errors import GuardExceeded, InvalidSpec, NotInIdeal


# ---------------------------------------------------------------------------
# Structural recipes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZmodSpec:
    n: int

    def describe(self) -> str:
        return f"zmod({self.n})"


@dataclass(frozen=True)
class MatrixSpec:
    base: "RingSpec"
    k: int

    def describe(self) -> str:
        return f"matrix({self.base.describe()},{self.k})"


@dataclass(frozen=True)
class TriangularSpec:
    base: "RingSpec"
    k: int

    def describe(self) -> str:
        return f"triangular({self.base.describe()},{self.k})"


@dataclass(frozen=True)
class ProductSpec:
    left: "RingSpec"
    right: "RingSpec"

    def describe(self) -> str:
        return f"product({self.left.describe()},{self.right.describe()})"


@dataclass(frozen=True)
class QuotientSpec:
    base: "RingSpec"
    generators: tuple  # element descriptors of the base ring

    def describe(self) -> str:
        gens = ",".join(repr(g) for g in self.generators)
        return f"quotient({self.base.describe()},[{gens}])"


@dataclass(frozen=True)
class CornerSpec:
    """Internal recipe for corner rings eRe; not part of the file schema."""

    base: "RingSpec"
    e: int

    def describe(self) -> str:
        return f"corner({self.base.describe()},{self.e})"


RingSpec = (
    ZmodSpec | MatrixSpec | TriangularSpec | ProductSpec | QuotientSpec | CornerSpec
)


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value):
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


def parse_ring_spec(obj) -> RingSpec:
    """Parse the nested dict form of a ring spec.  Unknown fields are errors."""
    if not isinstance(obj, dict):
        raise InvalidSpec(f"ring spec must be an object, got {type(obj).__name__}")
    kind = obj.get("type")
    if kind == "zmod":
        _expect_fields(obj, {"type", "n"})
        n = obj.get("n")
        if not isinstance(n, int) or n < 1:
            raise InvalidSpec("zmod requires an integer n >= 1")
        return ZmodSpec(n)
    if kind in ("matrix", "triangular"):
        _expect_fields(obj, {"type", "base", "k"})
        k = obj.get("k")
        if not isinstance(k, int) or k < 1:
            raise InvalidSpec(f"{kind} requires an integer k >= 1")
        base = parse_ring_spec(obj.get("base"))
        return MatrixSpec(base, k) if kind == "matrix" else TriangularSpec(base, k)
    if kind == "product":
        _expect_fields(obj, {"type", "left", "right"})
        return ProductSpec(parse_ring_spec(obj.get("left")),
                           parse_ring_spec(obj.get("right")))
    if kind == "quotient":
        _expect_fields(obj, {"type", "base", "ideal"})
        base = parse_ring_spec(obj.get("base"))
        ideal = obj.get("ideal")
        if not isinstance(ideal, dict):
            raise InvalidSpec("quotient requires an ideal object")
        _expect_fields(ideal, {"generators"}, where="ideal")
        gens = ideal.get("generators")
        if not isinstance(gens, list):
            raise InvalidSpec("ideal.generators must be a list")
        return QuotientSpec(base, _freeze(gens))
    raise InvalidSpec(f"unknown ring spec type {kind!r}")


def ring_spec_obj(spec: RingSpec):
    """Inverse of parse_ring_spec (canonical dict form)."""
    if isinstance(spec, ZmodSpec):
        return {"type": "zmod", "n": spec.n}
    if isinstance(spec, MatrixSpec):
        return {"type": "matrix", "base": ring_spec_obj(spec.base), "k": spec.k}
    if isinstance(spec, TriangularSpec):
        return {"type": "triangular", "base": ring_spec_obj(spec.base), "k": spec.k}
    if isinstance(spec, ProductSpec):
        return {"type": "product", "left": ring_spec_obj(spec.left),
                "right": ring_spec_obj(spec.right)}
    if isinstance(spec, QuotientSpec):
        return {"type": "quotient", "base": ring_spec_obj(spec.base),
                "ideal": {"generators": _thaw(list(spec.generators))}}
    raise InvalidSpec(f"spec {spec.describe()} has no external form")


def _expect_fields(obj: dict, allowed: set, where: str = "ring spec") -> None:
    extra = set(obj) - allowed
    if extra:
        raise InvalidSpec(f"unknown fields in {where}: {sorted(extra)}")


# ---------------------------------------------------------------------------
# FiniteRing
# ---------------------------------------------------------------------------

_LIST_MIRROR_MAX = 1024  # small rings keep list-of-list tables for fast scalar ops


@dataclass(eq=False)
class FiniteRing:
    """A finite unital ring as carrier indices plus total operation tables."""

    size: int
    npadd: np.ndarray
    npmul: np.ndarray
    npneg: np.ndarray
    zero: int
    one: int
    spec: RingSpec

    def __post_init__(self):
        self._cache: dict = {}
        if self.size <= _LIST_MIRROR_MAX:
            self._add = [list(map(int, row)) for row in self.npadd]
            self._mul = [list(map(int, row)) for row in self.npmul]
            self._neg = list(map(int, self.npneg))
        else:
            self._add = self._mul = self._neg = None

    # -- scalar arithmetic --------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a][b]
        return int(self.npadd[a, b])

    def mul(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a][b]
        return int(self.npmul[a, b])

    def neg(self, a: int) -> int:
        if self._neg is not None:
            return self._neg[a]
        return int(self.npneg[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def elements(self) -> range:
        return range(self.size)

    def describe(self) -> str:
        return self.spec.describe()

    def __repr__(self):
        return f"FiniteRing({self.describe()}, size={self.size})"

    # -- cached element sets --------------------------------------------------
    def units(self) -> tuple:
        """All elements with a two-sided inverse, ascending."""
        got = self._cache.get("units")
        if got is None:
            inv = self._cache["inverse_map"] = {}
            out = []
            one = self.one
            for u in range(self.size):
                row = self.npmul[u]
                cands = np.flatnonzero(row == one)
                for v in cands:
                    v = int(v)
                    if self.mul(v, u) == one:
                        inv[u] = v
                        out.append(u)
                        break
            got = self._cache["units"] = tuple(out)
        return got

    def inverse(self, u: int) -> Optional[int]:
        """Two-sided inverse of u, or None."""
        self.units()
        return self._cache["inverse_map"].get(u)

    def idempotents(self) -> tuple:
        got = self._cache.get("idempotents")
        if got is None:
            diag = self.npmul[np.arange(self.size), np.arange(self.size)]
            got = tuple(int(e) for e in np.flatnonzero(diag == np.arange(self.size)))
            self._cache["idempotents"] = got
        return got

    def right_multiples(self, a: int) -> tuple:
        """Sorted tuple aR."""
        return tuple(int(x) for x in np.unique(self.npmul[a]))

    def left_multiples(self, a: int) -> tuple:
        """Sorted tuple Ra."""
        return tuple(int(x) for x in np.unique(self.npmul[:, a]))


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def _table_dtype(n: int):
    return np.min_scalar_type(max(n - 1, 0))


def _check_guards(size: int, guards: Guards) -> None:
    if size > guards.carrier:
        raise GuardExceeded(
            f"carrier size {size} exceeds guard {guards.carrier}")
    if size * size > guards.table_entries:
        raise GuardExceeded(
            f"operation table with {size * size} entries exceeds guard "
            f"{guards.table_entries}")


_BUILD_CACHE: dict = {}


def build_ring(spec: RingSpec, guards: Guards = DEFAULT) -> FiniteRing:
    """Construct the ring described by spec; raises GuardExceeded / InvalidSpec.

    Builds are memoized by spec, so structurally equal recipes share one ring
    object (and therefore its caches).
    """
    cached = _BUILD_CACHE.get(spec)
    if cached is not None:
        _check_guards(cached.size, guards)
        return cached
    if isinstance(spec, ZmodSpec):
        ring = _build_zmod(spec, guards)
    elif isinstance(spec, MatrixSpec):
        ring = _build_matrix(spec, guards)
    elif isinstance(spec, TriangularSpec):
        ring = _build_triangular(spec, guards)
    elif isinstance(spec, ProductSpec):
        ring = _build_product(spec, guards)
    elif isinstance(spec, QuotientSpec):
        ring = _build_quotient(spec, guards)
    else:
        raise InvalidSpec(f"cannot build {spec!r}")
    _BUILD_CACHE[spec] = ring
    return ring


def _build_zmod(spec: ZmodSpec, guards: Guards) -> FiniteRing:
    n = spec.n
    _check_guards(n, guards)
    idx = np.arange(n)
    dt = _table_dtype(n)
    add = ((idx[:, None] + idx[None, :]) % n).astype(dt)
    mul = ((idx[:, None] * idx[None, :]) % n).astype(dt)
    neg = ((-idx) % n).astype(dt)
    return FiniteRing(n, add, mul, neg, 0, 1 % n, spec)


def _positions(k: int, triangular: bool):
    if triangular:
        return [(i, j) for i in range(k) for j in range(k) if i <= j]
    return [(i, j) for i in range(k) for j in range(k)]


def _build_matrix_like(spec, guards: Guards, triangular: bool) -> FiniteRing:
    base = build_ring(spec.base, guards)
    k = spec.k
    pos = _positions(k, triangular)
    nfree = len(pos)
    size = base.size ** nfree
    _check_guards(size, guards)

    B = base.size
    dt = _table_dtype(size)
    # digit p is the entry at pos[p]; big-endian mixed radix
    weights = np.array([B ** (nfree - 1 - p) for p in range(nfree)], dtype=np.int64)
    idx = np.arange(size, dtype=np.int64)
    digits = np.empty((size, nfree), dtype=np.int64)
    tmp = idx.copy()
    for p in reversed(range(nfree)):
        digits[:, p] = tmp % B
        tmp //= B

    badd, bmul = base.npadd.astype(np.int64), base.npmul.astype(np.int64)
    add = np.empty((size, size), dtype=dt)
    # chunk rows to bound temporaries
    chunk = max(1, min(size, (1 << 20) // max(size, 1) + 1))
    for lo in range(0, size, chunk):
        hi = min(size, lo + chunk)
        s = badd[digits[lo:hi, None, :], digits[None, :, :]]
        add[lo:hi] = (s @ weights)

    # full k*k layout for multiplication (zeros below diagonal if triangular)
    full = np.zeros((size, k, k), dtype=np.int64)
    for p, (i, j) in enumerate(pos):
        full[:, i, j] = digits[:, p]

    pos_index = {p: n for n, p in enumerate(pos)}
    mul = np.empty((size, size), dtype=dt)
    zero_b = base.zero
    for lo in range(0, size, chunk):
        hi = min(size, lo + chunk)
        A = full[lo:hi]  # (c, k, k)
        enc = np.zeros((hi - lo, size), dtype=np.int64)
        for (i, j) in pos:
            acc = np.full((hi - lo, size), zero_b, dtype=np.int64)
            for l in range(k):
                term = bmul[A[:, i, l][:, None], full[:, l, j][None, :]]
                acc = badd[acc, term]
            enc += acc * weights[pos_index[(i, j)]]
        mul[lo:hi] = enc

    negd = base.npneg.astype(np.int64)[digits]
    neg = (negd @ weights).astype(dt)

    zero = 0
    one_digits = [base.one if i == j else base.zero for (i, j) in pos]
    one = int(np.dot(np.array(one_digits, dtype=np.int64), weights))
    return FiniteRing(size, add, mul, neg, zero, one, spec)


def _build_matrix(spec: MatrixSpec, guards: Guards) -> FiniteRing:
    return _build_matrix_like(spec, guards, triangular=False)


def _build_triangular(spec: TriangularSpec, guards: Guards) -> FiniteRing:
    return _build_matrix_like(spec, guards, triangular=True)


def _build_product(spec: ProductSpec, guards: Guards) -> FiniteRing:
    lring = build_ring(spec.left, guards)
    rring = build_ring(spec.right, guards)
    nl, nr = lring.size, rring.size
    size = nl * nr
    _check_guards(size, guards)
    dt = _table_dtype(size)

    la, ra = lring.npadd.astype(np.int64), rring.npadd.astype(np.int64)
    lm, rm = lring.npmul.astype(np.int64), rring.npmul.astype(np.int64)

    def combine(lt, rt):
        # (i1*nr+i2) op (j1*nr+j2) -> pair table via kron-style broadcasting
        out = (lt[:, None, :, None] * nr + rt[None, :, None, :])
        return out.reshape(size, size).astype(dt)

    add = combine(la, ra)
    mul = combine(lm, rm)
    neg = (lring.npneg.astype(np.int64)[:, None] * nr
           + rring.npneg.astype(np.int64)[None, :]).reshape(size).astype(dt)
    zero = lring.zero * nr + rring.zero
    one = lring.one * nr + rring.one
    return FiniteRing(size, add, mul, neg, zero, one, spec)


def _build_quotient(spec: QuotientSpec, guards: Guards) -> FiniteRing:
    base = build_ring(spec.base, guards)
    gens = [element_from_descriptor(base, _thaw(g)) for g in spec.generators]
    ideal = ideal_closure(base, gens)
    qmap = quotient_by(base, ideal, guards)
    ring = qmap.target
    # replace the synthetic spec with the user's recipe for faithful round-trips
    ring.spec = spec
    return ring


# ---------------------------------------------------------------------------
# Ideals
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Ideal:
    """A two-sided ideal as an explicit carrier subset plus its generators."""

    ring: FiniteRing
    members: frozenset
    generators: tuple

    def __post_init__(self):
        mask = np.zeros(self.ring.size, dtype=bool)
        mask[list(self.members)] = True
        self.mask = mask
        self.sorted_members = tuple(sorted(self.members))

    def contains(self, x: int) -> bool:
        return bool(self.mask[x])

    def require(self, x: int) -> None:
        if not self.mask[x]:
            raise NotInIdeal(f"element {x} is not in the ideal")

    def __iter__(self):
        return iter(self.sorted_members)

    def __len__(self):
        return len(self.members)

    def is_full(self) -> bool:
        return len(self.members) == self.ring.size

    def is_zero(self) -> bool:
        return self.members == frozenset({self.ring.zero})

    def __repr__(self):
        return (f"Ideal(|I|={len(self.members)} of {self.ring.describe()}, "
                f"gens={list(self.generators)})")


def ideal_closure(ring: FiniteRing, gens: Iterable[int]) -> Ideal:
    """Smallest two-sided ideal containing gens (fixpoint over the carrier)."""
    gens = tuple(int(g) for g in gens)
    for g in gens:
        if not (0 <= g < ring.size):
            raise InvalidSpec(f"generator index {g} outside carrier")
    members = {ring.zero}
    frontier = set(gens) - members
    members |= frontier
    add, mul, neg = ring.npadd, ring.npmul, ring.npneg
    while frontier:
        new = set()
        cur = np.fromiter(members, dtype=np.int64)
        fr = np.fromiter(frontier, dtype=np.int64)
        reach = np.unique(np.concatenate([
            neg[fr],
            add[fr[:, None], cur[None, :]].ravel(),
            mul[fr, :].ravel(),          # x * r
            mul[:, fr].ravel(),          # r * x
        ]))
        for x in reach:
            x = int(x)
            if x not in members:
                new.add(x)
        members |= new
        frontier = new
    return Ideal(ring, frozenset(members), gens)


def full_ideal(ring: FiniteRing) -> Ideal:
    return Ideal(ring, frozenset(range(ring.size)), (ring.one,))


def zero_ideal(ring: FiniteRing) -> Ideal:
    return Ideal(ring, frozenset({ring.zero}), ())


def all_ideals(ring: FiniteRing) -> list:
    """Every two-sided ideal, as Ideal objects sorted by (size, members).

    Ideals of a finite ring are exactly the joins of principal ideals, so we
    close the principal ones under pairwise join.
    """
    seen = {}
    work = [ideal_closure(ring, [a]) for a in ring.elements()]
    work.append(zero_ideal(ring))
    for ideal in work:
        seen.setdefault(ideal.members, ideal)
    changed = True
    while changed:
        changed = False
        items = list(seen.values())
        for i1 in items:
            for i2 in items:
                gens = tuple(sorted(set(i1.generators) | set(i2.generators)))
                joined = ideal_closure(ring, gens)
                if joined.members not in seen:
                    seen[joined.members] = joined
                    changed = True
    return sorted(seen.values(), key=lambda i: (len(i.members), i.sorted_members))


# ---------------------------------------------------------------------------
# Quotients
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class QuotientMap:
    """Natural surjection R -> R/I with a least-preimage section."""

    source: FiniteRing
    target: FiniteRing
    image: np.ndarray    # source index -> target index
    section: np.ndarray  # target index -> least source preimage

    def pi(self, a: int) -> int:
        return int(self.image[a])

    def lift(self, b: int) -> int:
        return int(self.section[b])


def quotient_by(ring: FiniteRing, ideal: Ideal,
                guards: Guards = DEFAULT) -> QuotientMap:
    """Quotient ring of additive cosets, canonicalized by least member index."""
    key = ("quotient", ideal.members)
    got = ring._cache.get(key)
    if got is not None:
        return got

    members = np.fromiter(ideal.sorted_members, dtype=np.int64)
    cosets = ring.npadd.astype(np.int64)[:, members]  # (n, |I|)
    rep = cosets.min(axis=1)
    reps = np.unique(rep)
    qsize = len(reps)
    index_of = {int(r): i for i, r in enumerate(reps)}
    image = np.array([index_of[int(rep[a])] for a in range(ring.size)],
                     dtype=np.int64)

    dt = _table_dtype(qsize)
    add = np.empty((qsize, qsize), dtype=dt)
    mul = np.empty((qsize, qsize), dtype=dt)
    for x, rx in enumerate(reps):
        add[x] = image[ring.npadd[rx, reps]]
        mul[x] = image[ring.npmul[rx, reps]]
    neg = image[ring.npneg[reps]].astype(dt)

    spec = QuotientSpec(ring.spec,
                        tuple(element_descriptor_frozen(ring, g)
                              for g in ideal.generators))
    target = FiniteRing(qsize, add, mul, neg,
                        int(image[ring.zero]), int(image[ring.one]), spec)
    qmap = QuotientMap(ring, target, image, reps.copy())
    ring._cache[key] = qmap
    return qmap


# ---------------------------------------------------------------------------
# Corner rings eRe
# ---------------------------------------------------------------------------

def corner_ring(ring: FiniteRing, e: int):
    """Materialize the corner eRe as a FiniteRing with unit e.

    Returns (corner, embed) where embed maps corner indices to ring indices.
    """
    from .errors import NotIdempotent
    if ring.mul(e, e) != e:
        raise NotIdempotent(f"element {e} is not idempotent")
    row = ring.npmul[e]
    exe = np.unique(ring.npmul[row, e])
    embed = [int(x) for x in exe]
    index_of = {x: i for i, x in enumerate(embed)}
    m = len(embed)
    dt = _table_dtype(m)
    add = np.empty((m, m), dtype=dt)
    mul = np.empty((m, m), dtype=dt)
    neg = np.empty(m, dtype=dt)
    for i, x in enumerate(embed):
        neg[i] = index_of[ring.neg(x)]
        for j, y in enumerate(embed):
            add[i, j] = index_of[ring.add(x, y)]
            mul[i, j] = index_of[ring.mul(x, y)]
    corner = FiniteRing(m, add, mul, neg, index_of[ring.zero], index_of[e],
                        CornerSpec(ring.spec, e))
    return corner, tuple(embed)


# ---------------------------------------------------------------------------
# Regularity and simple solves
# ---------------------------------------------------------------------------

def regular_witness(ring: FiniteRing, x: int) -> Optional[int]:
    """Least y with x*y*x == x, or None."""
    xy = ring.npmul[x]                    # x*y over all y
    back = ring.npmul[xy, x]              # (x*y)*x
    hits = np.flatnonzero(back == x)
    return int(hits[0]) if len(hits) else None


def solve_right(ring: FiniteRing, a: int, target: int) -> Optional[int]:
    """Least x with a*x == target."""
    hits = np.flatnonzero(ring.npmul[a] == target)
    return int(hits[0]) if len(hits) else None


def solve_left(ring: FiniteRing, a: int, target: int) -> Optional[int]:
    """Least x with x*a == target."""
    hits = np.flatnonzero(ring.npmul[:, a] == target)
    return int(hits[0]) if len(hits) else None


def solve_pair_right(ring: FiniteRing, c: int, d: int,
                     target: int) -> Optional[tuple]:
    """Least (x, y) lexicographic with c*x + d*y == target."""
    sums = ring.npadd[ring.npmul[c][:, None], ring.npmul[d][None, :]]
    hits = np.argwhere(sums == target)
    if len(hits) == 0:
        return None
    x, y = hits[0]
    return int(x), int(y)


def solve_pair_left(ring: FiniteRing, b: int, d: int,
                    target: int) -> Optional[tuple]:
    """Least (x, y) lexicographic with x*b + y*d == target."""
    sums = ring.npadd[ring.npmul[:, b][:, None], ring.npmul[:, d][None, :]]
    hits = np.argwhere(sums == target)
    if len(hits) == 0:
        return None
    x, y = hits[0]
    return int(x), int(y)


# ---------------------------------------------------------------------------
# Element descriptors (external interface)
# ---------------------------------------------------------------------------

def element_from_descriptor(ring: FiniteRing, desc) -> int:
    """Decode an element descriptor: ints for zmod, entry lists for matrix
    types, pairs for products, base descriptors for quotients and corners."""
    spec = ring.spec
    if isinstance(spec, ZmodSpec):
        if not isinstance(desc, int):
            raise InvalidSpec(f"zmod element descriptor must be int, got {desc!r}")
        return desc % spec.n
    if isinstance(spec, (MatrixSpec, TriangularSpec)):
        base = build_ring(spec.base)
        k = spec.k
        tri = isinstance(spec, TriangularSpec)
        if (not isinstance(desc, (list, tuple)) or len(desc) != k
                or any(not isinstance(r, (list, tuple)) or len(r) != k
                       for r in desc)):
            raise InvalidSpec(f"matrix element descriptor must be a {k}x{k} list")
        entries = [[element_from_descriptor(base, desc[i][j]) for j in range(k)]
                   for i in range(k)]
        if tri:
            for i in range(k):
                for j in range(i):
                    if entries[i][j] != base.zero:
                        raise InvalidSpec(
                            "triangular element has nonzero entry below diagonal")
        pos = _positions(k, tri)
        idx = 0
        for (i, j) in pos:
            idx = idx * base.size + entries[i][j]
        return idx
    if isinstance(spec, ProductSpec):
        if not isinstance(desc, (list, tuple)) or len(desc) != 2:
            raise InvalidSpec("product element descriptor must be a pair")
        lring, rring = build_ring(spec.left), build_ring(spec.right)
        return (element_from_descriptor(lring, desc[0]) * rring.size
                + element_from_descriptor(rring, desc[1]))
    if isinstance(spec, QuotientSpec):
        base = build_ring(spec.base)
        gens = [element_from_descriptor(base, _thaw(g)) for g in spec.generators]
        qmap = quotient_by(base, ideal_closure(base, gens))
        return qmap.pi(element_from_descriptor(base, desc))
    if isinstance(spec, CornerSpec):
        raise InvalidSpec("corner rings have no external element descriptors")
    raise InvalidSpec(f"cannot decode elements of {spec!r}")


def element_descriptor(ring: FiniteRing, idx: int):
    """Canonical descriptor of a carrier index (JSON-serializable)."""
    spec = ring.spec
    if not (0 <= idx < ring.size):
        raise InvalidSpec(f"element index {idx} outside carrier")
    if isinstance(spec, ZmodSpec):
        return idx
    if isinstance(spec, (MatrixSpec, TriangularSpec)):
        base = build_ring(spec.base)
        k = spec.k
        tri = isinstance(spec, TriangularSpec)
        pos = _positions(k, tri)
        digits = []
        tmp = idx
        for _ in pos:
            digits.append(tmp % base.size)
            tmp //= base.size
        digits.reverse()
        entries = [[element_descriptor(base, base.zero) for _ in range(k)]
                   for _ in range(k)]
        for p, (i, j) in enumerate(pos):
            entries[i][j] = element_descriptor(base, digits[p])
        return entries
    if isinstance(spec, ProductSpec):
        lring, rring = build_ring(spec.left), build_ring(spec.right)
        return [element_descriptor(lring, idx // rring.size),
                element_descriptor(rring, idx % rring.size)]
    if isinstance(spec, QuotientSpec):
        base = build_ring(spec.base)
        gens = [element_from_descriptor(base, _thaw(g)) for g in spec.generators]
        qmap = quotient_by(base, ideal_closure(base, gens))
        return element_descriptor(base, qmap.lift(idx))
    raise InvalidSpec(f"cannot describe elements of {spec!r}")


def element_descriptor_frozen(ring: FiniteRing, idx: int):
    return _freeze(element_descriptor(ring, idx))


# ---------------------------------------------------------------------------
# Axiom verification (exhaustive; meant for tests and small rings)
# ---------------------------------------------------------------------------

def verify_ring_axioms(ring: FiniteRing, max_size: int = 512) -> None:
    """Exhaustively check the ring axioms; raises InvalidSpec on violation."""
    n = ring.size
    if n > max_size:
        raise GuardExceeded(f"axiom check on {n} elements exceeds {max_size}")
    add = ring.npadd.astype(np.int64)
    mul = ring.npmul.astype(np.int64)
    neg = ring.npneg.astype(np.int64)
    idx = np.arange(n)
    checks = [
        ("additive commutativity", np.array_equal(add, add.T)),
        ("additive identity", np.array_equal(add[ring.zero], idx)),
        ("additive inverse", np.all(add[idx, neg] == ring.zero)),
        ("left mult identity", np.array_equal(mul[ring.one], idx)),
        ("right mult identity", np.array_equal(mul[:, ring.one], idx)),
    ]
    for name, ok in checks:
        if not ok:
            raise InvalidSpec(f"{ring.describe()}: {name} fails")
    # associativity and distributivity, O(n^3) via gathers, chunked over a
    chunk = max(1, (1 << 22) // max(n * n, 1))
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        a = slice(lo, hi)
        if not np.array_equal(add[add[a, :, None], idx[None, None, :]],
                              add[a][:, add]):
            raise InvalidSpec(f"{ring.describe()}: additive associativity fails")
        if not np.array_equal(mul[mul[a, :, None], idx[None, None, :]],
                              mul[a][:, mul]):
            raise InvalidSpec(
                f"{ring.describe()}: multiplicative associativity fails")
        if not np.array_equal(mul[a][:, add],
                              add[mul[a, :, None], mul[a][:, None, :]]):
            raise InvalidSpec(f"{ring.describe()}: left distributivity fails")
        if not np.array_equal(mul[add[a, :, None], idx[None, None, :]],
                              add[mul[a][:, None, :], mul[None, :, :]]):
            raise InvalidSpec(f"{ring.describe()}: right distributivity fails")


def verify_ideal(ideal: Ideal) -> None:
    """Check closure properties and that members equal the generator closure."""
    ring = ideal.ring
    mem = np.fromiter(ideal.sorted_members, dtype=np.int64)
    if not ideal.mask[ring.zero]:
        raise InvalidSpec("ideal misses zero")
    if not ideal.mask[ring.npadd[mem[:, None], mem[None, :]]].all():
        raise InvalidSpec("ideal not closed under addition")
    if not ideal.mask[ring.npneg[mem]].all():
        raise InvalidSpec("ideal not closed under negation")
    if not ideal.mask[ring.npmul[:, mem]].all():
        raise InvalidSpec("ideal not closed under left multiplication")
    if not ideal.mask[ring.npmul[mem, :]].all():
        raise InvalidSpec("ideal not closed under right multiplication")
    if ideal_closure(ring, ideal.generators).members != ideal.members:
        raise InvalidSpec("ideal members differ from generator closure")
