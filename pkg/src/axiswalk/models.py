"""Model definitions and exact single-step dynamics.

Five nearest-neighbour walk families share one interface.  Away from the
coordinate axes every family moves like simple random walk (1/4 to each
neighbour); the families differ only in what happens on the axes, where an
outward push of strength ``i**-alpha`` (distance ``i`` from the origin) is
applied in various ways:

``quarter-plane``
    First quadrant.  On an axis the walk steps outward along that axis with
    probability ``1 - 1/(2 i**alpha)`` and perpendicularly into the interior
    with probability ``1/(2 i**alpha)``.  Never steps toward the origin.
``coupled-half-plane``
    Same as ``quarter-plane`` on the horizontal axis, but on the vertical
    axis it moves right with probability 1/2 and up/down with 1/4 each, so
    the height coordinate behaves exactly like a lazy simple walk whenever
    it is positive.
``full-plane``
    All of ``Z^2``.  On an axis the outward push acts away from the origin
    and the perpendicular leak ``1/(2 i**alpha)`` is split evenly between
    the two perpendicular directions.  The origin is unbiased (1/4 each).
``backstep-quarter``
    Like ``quarter-plane`` but an axis state also steps *toward* the origin
    with probability ``i**-alpha / 3``, so axis visits are not monotone.
``reflected-quarter``
    No outward push at all (``alpha`` is ignored): an axis state moves
    perpendicularly into the interior with probability 1/2 and along the
    axis with 1/4 each way.  Serves as the null model.

Successor order is fixed everywhere: +x, -x, +y, -y.  A single step consumes
exactly one uniform draw, selecting the move by inverse CDF over that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

__all__ = [
    "MODEL_KINDS",
    "PRNG_ALGORITHM",
    "EarlyStop",
    "LatticeState",
    "ModelSpec",
    "RngStream",
    "axis_contact",
    "move_probabilities",
    "simulate_path",
    "step",
    "transition_distribution",
]

MODEL_KINDS = (
    "quarter-plane",
    "coupled-half-plane",
    "full-plane",
    "backstep-quarter",
    "reflected-quarter",
)

# Integer codes shared with the stepping engines.
KIND_QUARTER = 0
KIND_COUPLED = 1
KIND_FULL = 2
KIND_BACKSTEP = 3
KIND_REFLECTED = 4

_KIND_CODES = {name: code for code, name in enumerate(MODEL_KINDS)}

#: Stream derivation scheme used by :class:`RngStream`.  Recorded in run
#: manifests so archived outputs stay reproducible.
PRNG_ALGORITHM = "pcg64-seedseq-v1"

# Move deltas in successor order (+x, -x, +y, -y).
_MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1))


class LatticeState(NamedTuple):
    """A lattice site ``(x, y)``."""

    x: int
    y: int

    @property
    def z_bar(self) -> int:
        """Chebyshev radius ``max(|x|, |y|)``."""
        return max(abs(self.x), abs(self.y))

    @property
    def on_axis(self) -> bool:
        """True when at least one coordinate is zero."""
        return self.x == 0 or self.y == 0


@dataclass(frozen=True)
class ModelSpec:
    """A walk family plus its axis-drift exponent.

    Parameters
    ----------
    kind : str
        One of :data:`MODEL_KINDS`.
    alpha : float
        Drift exponent, required to lie in ``(0, 4]``.  Ignored by
        ``reflected-quarter`` but still validated.
    """

    kind: str
    alpha: float = 0.25

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise ValueError(
                f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}"
            )
        if not (0.0 < self.alpha <= 4.0):
            raise ValueError(f"alpha must lie in (0, 4], got {self.alpha}")

    @property
    def kind_code(self) -> int:
        """Integer code used by the stepping engines."""
        return _KIND_CODES[self.kind]

    def validate_state(self, state: LatticeState) -> None:
        """Raise ``ValueError`` if ``state`` is outside the model's lattice."""
        if self.kind != "full-plane" and (state.x < 0 or state.y < 0):
            raise ValueError(
                f"{self.kind} is confined to the first quadrant, got {tuple(state)}"
            )


@dataclass(frozen=True)
class RngStream:
    """Named, reproducible randomness source for one replica.

    The replica stream is ``PCG64(SeedSequence((master_seed, stream)))``:
    SeedSequence hashes the pair, so streams for different indices are
    statistically independent and none requires fast-forwarding.
    """

    master_seed: int
    stream: int = 0

    def bit_generator(self) -> np.random.PCG64:
        return np.random.PCG64(np.random.SeedSequence((self.master_seed, self.stream)))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(self.bit_generator())


def move_probabilities(kind_code: int, alpha: float, x: int, y: int):
    """Exact one-step probabilities at ``(x, y)`` in successor order.

    Returns a 4-tuple ``(p_px, p_mx, p_py, p_my)``.  This is the single
    source of truth for the walk laws; the compiled kernel mirrors the same
    arithmetic expression by expression so both backends agree bitwise.
    """
    if x != 0 and y != 0:
        return (0.25, 0.25, 0.25, 0.25)

    if kind_code == KIND_QUARTER or kind_code == KIND_COUPLED:
        if x == 0 and y == 0:
            return (0.5, 0.0, 0.5, 0.0)
        if y == 0:  # horizontal axis, x >= 1
            p = 0.5 * float(x) ** -alpha
            return (1.0 - p, 0.0, p, 0.0)
        # vertical axis, y >= 1
        if kind_code == KIND_QUARTER:
            p = 0.5 * float(y) ** -alpha
            return (p, 0.0, 1.0 - p, 0.0)
        return (0.5, 0.0, 0.25, 0.25)

    if kind_code == KIND_FULL:
        if x == 0 and y == 0:
            return (0.25, 0.25, 0.25, 0.25)
        if y == 0:
            p = 0.5 * float(abs(x)) ** -alpha
            half = 0.5 * p
            if x > 0:
                return (1.0 - p, 0.0, half, half)
            return (0.0, 1.0 - p, half, half)
        p = 0.5 * float(abs(y)) ** -alpha
        half = 0.5 * p
        if y > 0:
            return (half, half, 1.0 - p, 0.0)
        return (half, half, 0.0, 1.0 - p)

    if kind_code == KIND_BACKSTEP:
        if x == 0 and y == 0:
            return (0.5, 0.0, 0.5, 0.0)
        if y == 0:
            w = float(x) ** -alpha
            p_leak = 0.5 * w
            p_back = w / 3.0
            return (1.0 - p_leak - p_back, p_back, p_leak, 0.0)
        w = float(y) ** -alpha
        p_leak = 0.5 * w
        p_back = w / 3.0
        return (p_leak, 0.0, 1.0 - p_leak - p_back, p_back)

    if kind_code == KIND_REFLECTED:
        if x == 0 and y == 0:
            return (0.5, 0.0, 0.5, 0.0)
        if y == 0:
            return (0.25, 0.25, 0.5, 0.0)
        return (0.5, 0.0, 0.25, 0.25)

    raise ValueError(f"unknown kind code {kind_code}")


def select_move(probs, u: float) -> int:
    """Inverse-CDF slot selection for one uniform ``u``.

    Zero-probability slots are skipped while accumulating, and if rounding
    leaves the final threshold fractionally below 1 the last positive slot
    absorbs the remainder, so an impossible move can never be selected.
    """
    acc = 0.0
    last = -1
    for j in range(4):
        pj = probs[j]
        if pj <= 0.0:
            continue
        acc += pj
        last = j
        if u < acc:
            return j
    return last


def transition_distribution(model: ModelSpec, state: LatticeState):
    """Exact successor distribution at ``state``.

    Returns a list of ``(LatticeState, probability)`` pairs in successor
    order (+x, -x, +y, -y) with zero-probability moves omitted.
    """
    state = LatticeState(*state)
    model.validate_state(state)
    probs = move_probabilities(model.kind_code, model.alpha, state.x, state.y)
    out = []
    for (dx, dy), p in zip(_MOVES, probs):
        if p > 0.0:
            out.append((LatticeState(state.x + dx, state.y + dy), p))
    return out


def step(model: ModelSpec, state: LatticeState, rng: np.random.Generator) -> LatticeState:
    """Advance one step, consuming exactly one uniform draw from ``rng``."""
    probs = move_probabilities(model.kind_code, model.alpha, state[0], state[1])
    j = select_move(probs, rng.random())
    dx, dy = _MOVES[j]
    return LatticeState(state[0] + dx, state[1] + dy)


class EarlyStop(Exception):
    """Raised when a path observer asks to abort the walk.

    Attributes
    ----------
    time : int
        Step index at which the observer returned False.
    state : LatticeState
        Walk position at that time.
    """

    def __init__(self, time: int, state: LatticeState):
        super().__init__(f"observer stopped walk at t={time}, state={tuple(state)}")
        self.time = time
        self.state = state


def simulate_path(
    model: ModelSpec,
    start: LatticeState,
    n_steps: int,
    rng: np.random.Generator,
    observer: Optional[Callable[[int, LatticeState], Optional[bool]]] = None,
) -> LatticeState:
    """Run ``n_steps`` single steps from ``start`` and return the final state.

    ``observer(t, state)`` is invoked at t=0 with the start state and after
    every step.  If it returns False the walk aborts by raising
    :class:`EarlyStop` carrying the partial result.  This is the reference
    path generator; bulk experiments use the batch engines instead.
    """
    state = LatticeState(*start)
    model.validate_state(state)
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    if observer is not None and observer(0, state) is False:
        raise EarlyStop(0, state)
    for t in range(1, n_steps + 1):
        state = step(model, state, rng)
        if observer is not None and observer(t, state) is False:
            raise EarlyStop(t, state)
    return state


def axis_contact(model: ModelSpec, state: LatticeState) -> bool:
    """Excursion boundary-contact predicate for ``model``.

    For the coupled family contact means height zero (its vertical axis is
    ordinary bulk); for every other family it means touching either axis.
    """
    if model.kind_code == KIND_COUPLED:
        return state[1] == 0
    return state[0] == 0 or state[1] == 0
