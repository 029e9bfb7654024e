"""Axis-excursion records, path summaries, and identities built on them.

An *excursion* is one visit to the boundary-contact set: it begins when the
walk enters contact (entry time, entry radius), and completes when the walk
steps back into the interior (exit time, exit radius).  Excursion ``i``
pairs the ``i``-th entry with the ``i``-th exit; exit 0 is the convention
for the start of the path, at time 0 with the starting radius.

Two sums over completed excursions carry the radius decomposition:

* gain sum: ``sum_i (z_exit_i - z_entry_i)`` — growth accrued while on
  contact;
* cone sum: ``sum_i (z_entry_i - z_exit_{i-1})`` — drift-free change
  accrued in the interior between consecutive boundary visits.

``z_start + gain + cone`` reconstructs the radius at the latest exit
exactly; :func:`excursion_gain_sums` exposes this identity for testing and
analysis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .models import KIND_COUPLED, LatticeState, ModelSpec

__all__ = [
    "ExcursionRecord",
    "RecordThinner",
    "WalkSummary",
    "excursion_gain_sums",
    "lln_statistic",
    "records_from_arrays",
    "summarize",
    "track_excursions",
]

_AXIS_NAMES = ("h", "v")


@dataclass(frozen=True)
class ExcursionRecord:
    """One completed boundary visit.

    Attributes
    ----------
    index : int
        1-based excursion index.
    entry_time, exit_time : int
        Time of the entry into contact and of the subsequent exit.
    z_entry, z_exit : int
        Chebyshev radius ``max(|x|, |y|)`` at entry and at exit.
    axis : str
        ``"h"`` if the entry state had height zero, ``"v"`` otherwise.
    """

    index: int
    entry_time: int
    exit_time: int
    z_entry: int
    z_exit: int
    axis: str

    @property
    def duration(self) -> int:
        """Steps spent in contact, ``exit_time - entry_time``."""
        return self.exit_time - self.entry_time


@dataclass(frozen=True)
class WalkSummary:
    """End-of-run statistics of one replica path."""

    n_steps: int
    final_state: LatticeState
    z_final: int
    z_min_final: int
    excursion_count: int
    axis_time: int
    contact_time: int
    last_exit_time: int

    @property
    def renewal_age(self) -> int:
        """Time since the most recent excursion exit, ``n - last_exit``."""
        return self.n_steps - self.last_exit_time


def _contact(coupled: bool, x: int, y: int) -> bool:
    return y == 0 if coupled else (x == 0 or y == 0)


def track_excursions(
    model: ModelSpec, states: Iterable[Tuple[int, int]]
) -> Iterator[ExcursionRecord]:
    """Stream excursion records out of a path.

    ``states`` is the walk position at times 0, 1, 2, ...; records are
    yielded as each excursion completes.  An unfinished final excursion is
    not yielded.
    """
    coupled = model.kind_code == KIND_COUPLED
    it = iter(states)
    try:
        x, y = next(it)
    except StopIteration:
        return
    on_contact = _contact(coupled, x, y)
    entry_t = 0
    z_entry = max(abs(x), abs(y))
    axis = 0 if y == 0 else 1
    index = 0
    t = 0
    for x, y in it:
        t += 1
        c_new = _contact(coupled, x, y)
        if c_new and not on_contact:
            on_contact = True
            entry_t = t
            z_entry = max(abs(x), abs(y))
            axis = 0 if y == 0 else 1
        elif on_contact and not c_new:
            on_contact = False
            index += 1
            yield ExcursionRecord(
                index=index,
                entry_time=entry_t,
                exit_time=t,
                z_entry=z_entry,
                z_exit=max(abs(x), abs(y)),
                axis=_AXIS_NAMES[axis],
            )


def summarize(model: ModelSpec, states: Iterable[Tuple[int, int]]) -> WalkSummary:
    """Compute a :class:`WalkSummary` from a full path (time 0 included)."""
    coupled = model.kind_code == KIND_COUPLED
    it = iter(states)
    first = next(it)
    x, y = first
    on_contact = _contact(coupled, x, y)
    axis_time = 1 if (x == 0 or y == 0) else 0
    contact_time = 1 if on_contact else 0
    n_exc = 0
    last_exit = 0
    t = 0
    for x, y in it:
        t += 1
        lit = x == 0 or y == 0
        if lit:
            axis_time += 1
        c_new = (y == 0) if coupled else lit
        if c_new:
            contact_time += 1
            on_contact = True
        elif on_contact:
            on_contact = False
            n_exc += 1
            last_exit = t
    return WalkSummary(
        n_steps=t,
        final_state=LatticeState(x, y),
        z_final=max(abs(x), abs(y)),
        z_min_final=min(abs(x), abs(y)),
        excursion_count=n_exc,
        axis_time=axis_time,
        contact_time=contact_time,
        last_exit_time=last_exit,
    )


def records_from_arrays(arrays) -> List[ExcursionRecord]:
    """Convert an engine record tuple into :class:`ExcursionRecord` objects."""
    idx, ent, ext, ze, zx, ax = arrays
    return [
        ExcursionRecord(
            index=int(idx[i]),
            entry_time=int(ent[i]),
            exit_time=int(ext[i]),
            z_entry=int(ze[i]),
            z_exit=int(zx[i]),
            axis=_AXIS_NAMES[int(ax[i])],
        )
        for i in range(len(idx))
    ]


def lln_statistic(z_exit, index, alpha: float):
    """Normalized exit radius ``z_exit / index**(1/(1-alpha))``.

    The normalization targets the strong-law growth rate of the exit
    radius, which holds for drift exponents below 1/2; outside ``(0, 0.5)``
    a warning is issued because the exponent no longer reflects the true
    growth.
    Accepts scalars or arrays.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 0.5:
        warnings.warn(
            f"lln_statistic normalization assumes alpha in (0, 0.5); got {alpha}",
            stacklevel=2,
        )
    return np.asarray(z_exit, dtype=float) / np.power(
        np.asarray(index, dtype=float), 1.0 / (1.0 - alpha)
    )


def excursion_gain_sums(
    records: Sequence[ExcursionRecord], upto: int, z_start: int
) -> Tuple[int, int]:
    """Gain and cone sums over excursions ``1..upto``.

    Requires the record list to contain every index ``1..upto`` (in order);
    raises ``ValueError`` on gaps, because the cone sum telescopes across
    consecutive exits and a missing record would silently corrupt it.

    Returns ``(gain, cone)`` with
    ``z_start + gain + cone == records[upto-1].z_exit``.
    """
    if upto < 1:
        raise ValueError("upto must be >= 1")
    if len(records) < upto:
        raise ValueError(f"need records through index {upto}, have {len(records)}")
    gain = 0
    cone = 0
    prev_exit = z_start
    for i in range(upto):
        rec = records[i]
        if rec.index != i + 1:
            raise ValueError(
                f"records must be consecutive from 1; position {i} has index {rec.index}"
            )
        gain += rec.z_exit - rec.z_entry
        cone += rec.z_entry - prev_exit
        prev_exit = rec.z_exit
    return gain, cone


class RecordThinner:
    """Deterministic index-thinning rule shared with the engines.

    Keeps every index up to ``dense_limit``, then geometrically spaced
    indices with ratio ``growth``.  Useful to predict which excursion
    indices an engine run will record.
    """

    def __init__(self, dense_limit: int = 1000, growth: float = 1.15):
        if dense_limit > 0 and not growth >= 1.01:
            raise ValueError("growth must be >= 1.01")
        self.dense_limit = int(dense_limit)
        self.growth = float(growth)
        self._next = self.dense_limit + 1

    def should_record(self, index: int) -> bool:
        """Stateful test; call with strictly increasing indices."""
        if self.dense_limit <= 0:
            return False
        if index <= self.dense_limit or index >= self._next:
            if index >= self.dense_limit:
                nr = int(index * self.growth)
                self._next = nr if nr > index else index + 1
            return True
        return False

    def planned_indices(self, upto: int) -> List[int]:
        """All indices in ``1..upto`` a fresh thinner would record."""
        fresh = RecordThinner(self.dense_limit, self.growth)
        return [i for i in range(1, upto + 1) if fresh.should_record(i)]
