"""Pure-Python stepping engine (reference implementation).

This module is the behavioural contract for the compiled kernel in
``_kernel.pyx``: both consume the replica's PCG64 stream through the same
underlying C routines (one double per single step via ``next_double``, and
numpy's ``random_binomial`` for leaps), in the same order, with the same
arithmetic — so for a given bit generator the two engines produce bitwise
identical results.  The test suite enforces this.

Two acceleration rules keep long runs tractable without changing the law:

* **Interior leaping.**  Strictly inside the quadrant the walk is plain
  simple random walk.  From a state with ``d = min(|x|, |y|) >=``
  :data:`LEAP_MIN_DISTANCE`, the next ``k = d - 1`` steps cannot touch an
  axis, and over those steps the diagonal components ``x+y`` and ``x-y``
  are independent simple walks.  Drawing ``a, b ~ Binomial(k, 1/2)`` and
  applying ``(dx, dy) = (a + b - k, a - b)`` therefore reproduces the exact
  endpoint law while skipping ``k`` uniforms.  No observable tracked here
  (axis events, excursion statistics, terminal state) depends on the
  skipped interior positions.
* **Axis-state probabilities** are computed only when on an axis; interior
  single steps use the fixed 1/4 thresholds.

Excursion bookkeeping (shared by both run modes):

* contact set: height zero for the coupled family, either axis otherwise;
* entry = first contact after an interior stretch, exit = first interior
  state after a contact stretch;
* ``sum_gain`` accumulates ``z_exit - z_entry`` over completed excursions,
  ``sum_cone`` accumulates ``z_entry_i - z_exit_{i-1}`` (with the walk's
  starting radius standing in for exit 0), so that after ``i`` excursions
  ``z_start + sum_gain + sum_cone`` reconstructs the radius at exit ``i``.
"""

from __future__ import annotations

import numpy as np

from .models import KIND_COUPLED, KIND_FULL, move_probabilities, select_move

__all__ = [
    "BACKEND_NAME",
    "LEAP_MIN_DISTANCE",
    "MODE_EXCURSION",
    "MODE_TIME",
    "run_sampled",
    "run_walk",
]

BACKEND_NAME = "python"

#: Minimum distance-to-axis at which the interior leap rule engages.
LEAP_MIN_DISTANCE = 8

MODE_TIME = 0
MODE_EXCURSION = 1

DEFAULT_TIME_CAP = 10**15


def run_walk(
    bit_generator,
    kind,
    alpha,
    x0,
    y0,
    mode,
    limit,
    use_leap=True,
    time_cap=DEFAULT_TIME_CAP,
    z_exit_limit=0,
    checkpoints=None,
    record_dense=0,
    record_growth=1.15,
    late_threshold=-1,
):
    """Run one replica and return its tracked statistics.

    Parameters
    ----------
    bit_generator : numpy.random.BitGenerator
        Fresh replica stream (consumed).
    kind, alpha : int, float
        Model kind code and drift exponent.
    x0, y0 : int
        Start state.
    mode : int
        ``MODE_TIME`` runs exactly ``limit`` steps; ``MODE_EXCURSION`` runs
        until ``limit`` completed excursions (or ``time_cap`` steps, in
        which case ``status`` is 1 and results are partial).
    use_leap : bool
        Enable the exact interior leap rule.
    z_exit_limit : int
        If positive, collect the exit radius of excursions ``1..z_exit_limit``
        into the returned ``z_exit`` array (NaN where not reached).
    checkpoints : sequence of int, optional
        Ascending excursion indices at which to snapshot the running gain
        and cone sums and the elapsed time.
    record_dense, record_growth : int, float
        Excursion-record thinning: keep every excursion up to index
        ``record_dense``, then geometrically with ratio ``record_growth``.
        ``record_dense=0`` disables records.
    late_threshold : int
        Exits after this time count as "late" quadrant sign changes; -1
        selects ``limit // 2`` in time mode (never, in excursion mode).

    Returns
    -------
    dict
        Scalar statistics plus optional arrays (see source for keys).
    """
    gen = np.random.Generator(bit_generator)
    next_u = gen.random
    draw_binom = gen.binomial

    kind = int(kind)
    alpha = float(alpha)
    x = int(x0)
    y = int(y0)
    t = 0
    limit = int(limit)
    cap = int(time_cap)
    mode = int(mode)
    if mode not in (MODE_TIME, MODE_EXCURSION):
        raise ValueError(f"bad mode {mode}")
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    record_dense = int(record_dense)
    if record_dense > 0 and not record_growth >= 1.01:
        raise ValueError("record_growth must be >= 1.01 when records are kept")
    if late_threshold < 0:
        late_threshold = limit // 2 if mode == MODE_TIME else cap
    coupled = kind == KIND_COUPLED

    want_z = int(z_exit_limit)
    z_exit_out = np.full(want_z, np.nan) if want_z > 0 else None
    cps = np.asarray(checkpoints if checkpoints is not None else [], dtype=np.int64)
    cp_gain = np.zeros(len(cps))
    cp_cone = np.zeros(len(cps))
    cp_time = np.zeros(len(cps), dtype=np.int64)
    cp_ptr = 0

    rec_idx = []
    rec_ent = []
    rec_ext = []
    rec_ze = []
    rec_zx = []
    rec_ax = []
    next_rec = record_dense + 1

    azx = -x if x < 0 else x
    azy = -y if y < 0 else y
    z0 = azx if azx >= azy else azy
    on_contact = (y == 0) if coupled else (x == 0 or y == 0)
    n_exc = 0
    last_exit = 0
    sum_gain = 0
    sum_cone = 0
    z_prev_exit = z0
    cur_entry_t = 0
    cur_z_entry = z0
    cur_axis = 0 if y == 0 else 1

    axis_steps = 1 if (x == 0 or y == 0) else 0
    contact_steps = 1 if on_contact else 0
    last_h = 0
    last_v = 0
    prev_sign = 0
    quad_changes = 0
    quad_changes_late = 0
    status = 0

    while True:
        if mode == MODE_TIME:
            if t >= limit:
                break
        else:
            if n_exc >= limit:
                break
            if t >= cap:
                status = 1
                break
        if x != 0 and y != 0:
            azx = -x if x < 0 else x
            azy = -y if y < 0 else y
            d = azx if azx < azy else azy
            if use_leap and d >= LEAP_MIN_DISTANCE:
                k = d - 1
                if mode == MODE_TIME:
                    rem = limit - t
                    if k > rem:
                        k = rem
                a = int(draw_binom(k, 0.5))
                b = int(draw_binom(k, 0.5))
                x += a + b - k
                y += a - b
                t += k
                continue
            u = float(next_u())
            if u < 0.25:
                x += 1
            elif u < 0.5:
                x -= 1
            elif u < 0.75:
                y += 1
            else:
                y -= 1
        else:
            probs = move_probabilities(kind, alpha, x, y)
            j = select_move(probs, float(next_u()))
            if j == 0:
                x += 1
            elif j == 1:
                x -= 1
            elif j == 2:
                y += 1
            else:
                y -= 1
        t += 1

        # ---- event bookkeeping after a single step ----
        lit = x == 0 or y == 0
        if lit:
            axis_steps += 1
            if y == 0:
                last_h = t
                if x == 0:
                    last_v = t
            else:
                last_v = t
        c_new = (y == 0) if coupled else lit
        if c_new:
            contact_steps += 1
            if not on_contact:
                on_contact = True
                cur_entry_t = t
                azx = -x if x < 0 else x
                azy = -y if y < 0 else y
                cur_z_entry = azx if azx >= azy else azy
                cur_axis = 0 if y == 0 else 1
        elif on_contact:
            on_contact = False
            n_exc += 1
            azx = -x if x < 0 else x
            azy = -y if y < 0 else y
            z_exit = azx if azx >= azy else azy
            sum_gain += z_exit - cur_z_entry
            sum_cone += cur_z_entry - z_prev_exit
            z_prev_exit = z_exit
            last_exit = t
            if n_exc <= want_z:
                z_exit_out[n_exc - 1] = z_exit
            if cp_ptr < len(cps) and n_exc == cps[cp_ptr]:
                cp_gain[cp_ptr] = sum_gain
                cp_cone[cp_ptr] = sum_cone
                cp_time[cp_ptr] = t
                cp_ptr += 1
            if record_dense > 0 and (n_exc <= record_dense or n_exc >= next_rec):
                rec_idx.append(n_exc)
                rec_ent.append(cur_entry_t)
                rec_ext.append(t)
                rec_ze.append(cur_z_entry)
                rec_zx.append(z_exit)
                rec_ax.append(cur_axis)
                if n_exc >= record_dense:
                    nr = int(n_exc * record_growth)
                    next_rec = nr if nr > n_exc else n_exc + 1
            if kind == KIND_FULL:
                dom = x if azx >= azy else y
                s = 1 if dom > 0 else (-1 if dom < 0 else 0)
                if prev_sign != 0 and s != 0 and s != prev_sign:
                    quad_changes += 1
                    if t > late_threshold:
                        quad_changes_late += 1
                if s != 0:
                    prev_sign = s

    azx = -x if x < 0 else x
    azy = -y if y < 0 else y
    if record_dense > 0:
        records = (
            np.asarray(rec_idx, dtype=np.int64),
            np.asarray(rec_ent, dtype=np.int64),
            np.asarray(rec_ext, dtype=np.int64),
            np.asarray(rec_ze, dtype=np.int64),
            np.asarray(rec_zx, dtype=np.int64),
            np.asarray(rec_ax, dtype=np.int64),
        )
    else:
        records = None
    return {
        "status": status,
        "t": t,
        "x": x,
        "y": y,
        "z_final": azx if azx >= azy else azy,
        "z_min_final": azx if azx < azy else azy,
        "n_exc": n_exc,
        "axis_steps": axis_steps,
        "contact_steps": contact_steps,
        "last_exit": last_exit,
        "last_h": last_h,
        "last_v": last_v,
        "sum_gain": sum_gain,
        "sum_cone": sum_cone,
        "quad_changes": quad_changes,
        "quad_changes_late": quad_changes_late,
        "z_exit": z_exit_out,
        "cp_gain": cp_gain,
        "cp_cone": cp_cone,
        "cp_time": cp_time,
        "records": records,
    }


def run_sampled(bit_generator, kind, alpha, x0, y0, n_steps, stride):
    """Single-step a walk and return positions on a stride grid.

    Sampled times are ``0, stride, 2*stride, ...`` plus the final time
    ``n_steps`` (once, if it is not already on the grid).  No leaping is
    used, so the full path law is stepped through draw by draw.

    Returns
    -------
    (ts, xs, ys) : int64 arrays of equal length.
    """
    gen = np.random.Generator(bit_generator)
    next_u = gen.random
    kind = int(kind)
    alpha = float(alpha)
    n_steps = int(n_steps)
    stride = int(stride)
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    x = int(x0)
    y = int(y0)
    ts = [0]
    xs = [x]
    ys = [y]
    for t in range(1, n_steps + 1):
        if x != 0 and y != 0:
            u = float(next_u())
            if u < 0.25:
                x += 1
            elif u < 0.5:
                x -= 1
            elif u < 0.75:
                y += 1
            else:
                y -= 1
        else:
            probs = move_probabilities(kind, alpha, x, y)
            j = select_move(probs, float(next_u()))
            if j == 0:
                x += 1
            elif j == 1:
                x -= 1
            elif j == 2:
                y += 1
            else:
                y -= 1
        if t % stride == 0 or t == n_steps:
            ts.append(t)
            xs.append(x)
            ys.append(y)
    return (
        np.asarray(ts, dtype=np.int64),
        np.asarray(xs, dtype=np.int64),
        np.asarray(ys, dtype=np.int64),
    )
