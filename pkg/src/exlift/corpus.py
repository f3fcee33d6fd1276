"""The desk-scale regression corpus: rings and ideals every release must pass."""

from __future__ import annotations

from dataclasses import dataclass

from .config import DEFAULT, Guards
from .rings import (FiniteRing, Ideal, MatrixSpec, ProductSpec, QuotientSpec,
                    RingSpec, TriangularSpec, ZmodSpec, all_ideals, build_ring,
                    element_from_descriptor, ideal_closure)

E12 = [[0, 1], [0, 0]]
ONE2 = [[1, 0], [0, 1]]


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    spec: RingSpec
    ideal_mode: str          # "all" or "given"
    generators: tuple        # descriptor tuples when ideal_mode == "given"
    tags: tuple


def _freeze(g):
    if isinstance(g, list):
        return tuple(_freeze(x) for x in g)
    return g


CORPUS = [
    *[CorpusEntry(f"zmod({n})", ZmodSpec(n), "all", (), ("zmod",))
      for n in (2, 3, 4, 6, 8, 9, 16)],
    CorpusEntry("triangular(zmod(2),2)", TriangularSpec(ZmodSpec(2), 2),
                "given", (_freeze(E12),), ("triangular",)),
    CorpusEntry("triangular(zmod(4),2)", TriangularSpec(ZmodSpec(4), 2),
                "given", (_freeze(E12),), ("triangular", "slow")),
    CorpusEntry("matrix(zmod(2),2)+zero", MatrixSpec(ZmodSpec(2), 2),
                "given", (), ("matrix",)),
    CorpusEntry("matrix(zmod(2),2)+full", MatrixSpec(ZmodSpec(2), 2),
                "given", (_freeze(ONE2),), ("matrix",)),
    CorpusEntry("zmod(2)xM2(zmod(2))+left",
                ProductSpec(ZmodSpec(2), MatrixSpec(ZmodSpec(2), 2)),
                "given", (_freeze([1, [[0, 0], [0, 0]]]),), ("product",)),
    CorpusEntry("zmod(2)xM2(zmod(2))+right",
                ProductSpec(ZmodSpec(2), MatrixSpec(ZmodSpec(2), 2)),
                "given", (_freeze([0, ONE2]),), ("product",)),
    CorpusEntry("quotient(zmod(16),[4])",
                QuotientSpec(ZmodSpec(16), (4,)), "all", (), ("quotient",)),
    CorpusEntry("quotient(triangular(zmod(2),2),[e12])",
                QuotientSpec(TriangularSpec(ZmodSpec(2), 2),
                             (tuple(map(tuple, E12)),)),
                "all", (), ("quotient",)),
    CorpusEntry("quotient(zmod(2)xM2,[0xM2])",
                QuotientSpec(ProductSpec(ZmodSpec(2),
                                         MatrixSpec(ZmodSpec(2), 2)),
                             ((0, tuple(map(tuple, ONE2))),)),
                "all", (), ("quotient",)),
]


def _thaw_desc(g):
    if isinstance(g, tuple):
        return [_thaw_desc(x) for x in g]
    return g


def _descriptor_list(gens):
    return [_thaw_desc(g) for g in gens]


def corpus_rings(guards: Guards = DEFAULT):
    """(entry, ring) for every corpus entry, building each spec once."""
    return [(e, build_ring(e.spec, guards)) for e in CORPUS]


def corpus_pairs(guards: Guards = DEFAULT, include_slow: bool = True):
    """(name, ring, ideal, tags) for every (ring, ideal) pair in the corpus."""
    out = []
    for entry in CORPUS:
        if not include_slow and "slow" in entry.tags:
            continue
        ring = build_ring(entry.spec, guards)
        if entry.ideal_mode == "all":
            for ideal in all_ideals(ring):
                out.append((f"{entry.name} |I|={len(ideal.members)}",
                            ring, ideal, entry.tags))
        else:
            gens = [element_from_descriptor(ring, g)
                    for g in _descriptor_list(entry.generators)]
            ideal = ideal_closure(ring, gens)
            out.append((f"{entry.name}", ring, ideal, entry.tags))
    return out
