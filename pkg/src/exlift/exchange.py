"""Exchange-ring and exchange-ideal predicates with replayable witnesses.

All searches scan in ascending carrier index (smallest e, then r, then s), so
witnesses are reproducible and certificates deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotIdempotent, NotInIdeal
from .rings import FiniteRing, Ideal, QuotientMap, quotient_by


@dataclass(frozen=True)
class ExchangeWitness:
    """Idempotent e plus the auxiliary solutions of the defining equations."""

    e: int
    r: int
    s: int


def exchange_witness_unital(ring: FiniteRing, a: int) -> Optional[ExchangeWitness]:
    """Least (e, r, s) with e = a*r idempotent and 1 - e = (1-a)*s."""
    one_minus_a = ring.sub(ring.one, a)
    row_a = ring.npmul[a]
    row_c = ring.npmul[one_minus_a]
    for e in ring.idempotents():
        rs = np.flatnonzero(row_a == e)
        if not len(rs):
            continue
        target = ring.sub(ring.one, e)
        ss = np.flatnonzero(row_c == target)
        if not len(ss):
            continue
        return ExchangeWitness(e, int(rs[0]), int(ss[0]))
    return None


def exchange_witness_ideal(ring: FiniteRing, ideal: Ideal,
                           x: int) -> Optional[ExchangeWitness]:
    """Least (e, r, s) in I^3 with e = x*r = x + s - x*s, e idempotent."""
    ideal.require(x)
    members = np.fromiter(ideal.sorted_members, dtype=np.int64)
    row_x = ring.npmul[x][members]                      # x*r over r in I
    # x + s - x*s over s in I
    xs = ring.npmul[x][members]
    x_plus_s = ring.npadd[x][members]
    rhs = ring.npadd[x_plus_s, ring.npneg[xs]]
    for e in ring.idempotents():
        if not ideal.contains(e):
            continue
        rs = np.flatnonzero(row_x == e)
        if not len(rs):
            continue
        ss = np.flatnonzero(rhs == e)
        if not len(ss):
            continue
        return ExchangeWitness(e, int(members[rs[0]]), int(members[ss[0]]))
    return None


def is_exchange_ring(ring: FiniteRing) -> bool:
    """Every element admits a unital exchange witness."""
    key = "is_exchange_ring"
    got = ring._cache.get(key)
    if got is None:
        got = all(exchange_witness_unital(ring, a) is not None
                  for a in ring.elements())
        ring._cache[key] = got
    return got


def is_exchange_ideal(ring: FiniteRing, ideal: Ideal) -> bool:
    """Every x in I admits a witness in the intrinsic non-unital sense."""
    key = ("is_exchange_ideal", ideal.members)
    got = ring._cache.get(key)
    if got is None:
        got = all(exchange_witness_ideal(ring, ideal, x) is not None
                  for x in ideal)
        ring._cache[key] = got
    return got


def embedded_exchange_witness(ring: FiniteRing, ideal: Ideal,
                              x: int) -> Optional[tuple]:
    """Embedded-form witness: idempotent e in x*I with 1 - e in (1-x)*R.

    The equivalence with the intrinsic form is a cited theorem; this exists so
    the corpus can cross-check it rather than assume it.
    """
    ideal.require(x)
    members = np.fromiter(ideal.sorted_members, dtype=np.int64)
    row_x = ring.npmul[x][members]                      # x*i over i in I
    one_minus_x = ring.sub(ring.one, x)
    row_c = ring.npmul[one_minus_x]
    for e in ring.idempotents():
        ts = np.flatnonzero(row_x == e)
        if not len(ts):
            continue
        target = ring.sub(ring.one, e)
        ss = np.flatnonzero(row_c == target)
        if not len(ss):
            continue
        return e, int(members[ts[0]]), int(ss[0])
    return None


def lift_idempotent(ring: FiniteRing, ideal: Ideal,
                    ebar: int) -> Optional[int]:
    """Least idempotent e of R with pi(e) == ebar; ebar must be idempotent
    in R/I."""
    qmap = quotient_by(ring, ideal)
    q = qmap.target
    if q.mul(ebar, ebar) != ebar:
        raise NotIdempotent(f"{ebar} is not idempotent in the quotient")
    for e in ring.idempotents():
        if qmap.pi(e) == ebar:
            return e
    return None
