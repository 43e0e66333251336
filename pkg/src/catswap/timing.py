"""Latency of handing a Bell pair to two users a distance ``L`` apart.

Direct: one source midway, particles travel ``L/2``. Relayed: sources at the
quarter points and a Bell measurement at the midpoint. Hierarchical: ``2**k``
sources at dyadic midpoints with all ``2**k - 1`` Bell measurements run
concurrently once the particles arrive (a modelling assumption).

The classical broadcast of the measurement outcome is optional and modelled
as ``L/(2c)``, the distance from the midpoint station to a user. It is kept
separate from the bare relay time.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple


@dataclass(frozen=True)
class LinkModel:
    L: float
    v: float
    c: float = 1.0
    t_m: float = 0.0

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if not 0 < self.v <= self.c:
            raise ValueError("need 0 < v <= c")
        if self.t_m < 0:
            raise ValueError("t_m must be non-negative")

    @property
    def classical_time(self) -> float:
        return self.L / (2 * self.c)


class RelayTime(NamedTuple):
    t2: float
    advantageous: bool
    bare: float
    classical: float


def direct_time(m: LinkModel) -> float:
    return m.L / (2 * m.v)


def _travel(m: LinkModel, levels: int) -> float:
    return m.L / (2 ** (levels + 1) * m.v)


def hierarchical_time(m: LinkModel, levels: int, include_classical: bool = False) -> float:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    t = _travel(m, levels) + m.t_m
    if include_classical:
        t += m.classical_time
    return t


def relay_time(m: LinkModel, include_classical: bool = False) -> RelayTime:
    """One relay level.

    ``advantageous`` is the bare comparison ``t_m < L/4v``, whatever
    ``include_classical`` says. Whether the relay actually beats the direct
    route once the broadcast is paid for is ``t2 < direct_time(m)``.
    """
    bare = hierarchical_time(m, 1)
    t2 = hierarchical_time(m, 1, include_classical)
    classical = m.classical_time if include_classical else 0.0
    return RelayTime(t2, bare < direct_time(m), bare, classical)


SWEEP_COLUMNS = ("L", "v", "c", "t_m", "levels", "t1", "t2", "advantage")


def timing_sweep(L: Iterable[float], v: Iterable[float], t_m: Iterable[float],
                 levels: Iterable[int] = (1,), c: float = 1.0,
                 include_classical: bool = False) -> list[dict]:
    rows = []
    for L_, v_, tm_, k in itertools.product(L, v, t_m, levels):
        m = LinkModel(L_, v_, c, tm_)
        t1 = direct_time(m)
        t2 = hierarchical_time(m, k, include_classical)
        rows.append(dict(zip(SWEEP_COLUMNS, (L_, v_, c, tm_, k, t1, t2, t2 < t1))))
    return rows


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
