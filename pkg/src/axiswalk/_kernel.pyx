# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping engine.

Draw-for-draw mirror of ``_kernel_py`` (which documents the semantics and
the leap rule): both pull doubles from the replica bit generator via
``next_double`` and leap increments via numpy's C ``random_binomial``, with
identical arithmetic, so results are bitwise identical across backends.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport log, pow
from libc.stdint cimport int64_t
from libc.string cimport memset

from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    binomial_t,
    random_binomial,
    random_standard_uniform,
)

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"

LEAP_MIN_DISTANCE = 8
MODE_TIME = 0
MODE_EXCURSION = 1
DEFAULT_TIME_CAP = 10**15

DEF _LEAP_MIN = 8
DEF _MODE_TIME = 0

# Scalar output slots filled by the main loop.
DEF _NSCALARS = 15


cdef inline int _axis_move(bitgen_t *bg, int kind, double alpha,
                           int64_t x, int64_t y) noexcept nogil:
    """One inverse-CDF step at a non-interior state; consumes one uniform.

    Probability expressions replicate models.move_probabilities term by
    term; the selection loop replicates models.select_move.
    """
    cdef double pvec[4]
    cdef double p, half, w, p_leak, p_back, u, acc, pj
    cdef int j, last
    pvec[0] = 0.0
    pvec[1] = 0.0
    pvec[2] = 0.0
    pvec[3] = 0.0

    if kind == 0 or kind == 1:  # quarter-plane, coupled-half-plane
        if x == 0 and y == 0:
            pvec[0] = 0.5
            pvec[2] = 0.5
        elif y == 0:
            p = 0.5 * pow(<double> x, -alpha)
            pvec[0] = 1.0 - p
            pvec[2] = p
        elif kind == 0:
            p = 0.5 * pow(<double> y, -alpha)
            pvec[0] = p
            pvec[2] = 1.0 - p
        else:
            pvec[0] = 0.5
            pvec[2] = 0.25
            pvec[3] = 0.25
    elif kind == 2:  # full-plane
        if x == 0 and y == 0:
            pvec[0] = 0.25
            pvec[1] = 0.25
            pvec[2] = 0.25
            pvec[3] = 0.25
        elif y == 0:
            p = 0.5 * pow(<double> (x if x >= 0 else -x), -alpha)
            half = 0.5 * p
            if x > 0:
                pvec[0] = 1.0 - p
            else:
                pvec[1] = 1.0 - p
            pvec[2] = half
            pvec[3] = half
        else:
            p = 0.5 * pow(<double> (y if y >= 0 else -y), -alpha)
            half = 0.5 * p
            pvec[0] = half
            pvec[1] = half
            if y > 0:
                pvec[2] = 1.0 - p
            else:
                pvec[3] = 1.0 - p
    elif kind == 3:  # backstep-quarter
        if x == 0 and y == 0:
            pvec[0] = 0.5
            pvec[2] = 0.5
        elif y == 0:
            w = pow(<double> x, -alpha)
            p_leak = 0.5 * w
            p_back = w / 3.0
            pvec[0] = 1.0 - p_leak - p_back
            pvec[1] = p_back
            pvec[2] = p_leak
        else:
            w = pow(<double> y, -alpha)
            p_leak = 0.5 * w
            p_back = w / 3.0
            pvec[0] = p_leak
            pvec[2] = 1.0 - p_leak - p_back
            pvec[3] = p_back
    else:  # reflected-quarter
        if x == 0 and y == 0:
            pvec[0] = 0.5
            pvec[2] = 0.5
        elif y == 0:
            pvec[0] = 0.25
            pvec[1] = 0.25
            pvec[2] = 0.5
        else:
            pvec[0] = 0.5
            pvec[2] = 0.25
            pvec[3] = 0.25

    u = random_standard_uniform(bg)
    acc = 0.0
    last = -1
    for j in range(4):
        pj = pvec[j]
        if pj <= 0.0:
            continue
        acc += pj
        last = j
        if u < acc:
            return j
    return last


cdef int _walk_loop(bitgen_t *bg, binomial_t *bt, int kind, double alpha,
                    int64_t x0, int64_t y0, int mode, int64_t limit,
                    int use_leap, int64_t cap,
                    double *z_exit_out, int64_t want_z,
                    int64_t *cps, int64_t ncp,
                    double *cp_gain, double *cp_cone, int64_t *cp_time,
                    int64_t record_dense, double record_growth,
                    int64_t *r_idx, int64_t *r_ent, int64_t *r_ext,
                    int64_t *r_ze, int64_t *r_zx, int64_t *r_ax,
                    int64_t rec_cap, int64_t *rec_count,
                    int64_t late_threshold,
                    int64_t *out) noexcept nogil:
    cdef int64_t x = x0
    cdef int64_t y = y0
    cdef int64_t t = 0
    cdef int64_t azx, azy, d, k, rem, a, b, z0, z_exit, nr, dom
    cdef int64_t n_exc = 0
    cdef int64_t last_exit = 0
    cdef int64_t sum_gain = 0
    cdef int64_t sum_cone = 0
    cdef int64_t cur_entry_t = 0
    cdef int64_t last_h = 0
    cdef int64_t last_v = 0
    cdef int64_t axis_steps = 0
    cdef int64_t contact_steps = 0
    cdef int64_t quad_changes = 0
    cdef int64_t quad_changes_late = 0
    cdef int64_t cp_ptr = 0
    cdef int64_t next_rec = record_dense + 1
    cdef int64_t cur_z_entry, z_prev_exit
    cdef int coupled = 1 if kind == 1 else 0
    cdef int full = 1 if kind == 2 else 0
    cdef int on_contact, lit, c_new, cur_axis, prev_sign, s, j, status
    cdef double u

    azx = -x if x < 0 else x
    azy = -y if y < 0 else y
    z0 = azx if azx >= azy else azy
    if coupled:
        on_contact = 1 if y == 0 else 0
    else:
        on_contact = 1 if (x == 0 or y == 0) else 0
    z_prev_exit = z0
    cur_z_entry = z0
    cur_axis = 0 if y == 0 else 1
    if x == 0 or y == 0:
        axis_steps = 1
    if on_contact:
        contact_steps = 1
    prev_sign = 0
    status = 0

    while True:
        if mode == _MODE_TIME:
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
            if use_leap and d >= _LEAP_MIN:
                k = d - 1
                if mode == _MODE_TIME:
                    rem = limit - t
                    if k > rem:
                        k = rem
                a = random_binomial(bg, 0.5, k, bt)
                b = random_binomial(bg, 0.5, k, bt)
                x += a + b - k
                y += a - b
                t += k
                continue
            u = random_standard_uniform(bg)
            if u < 0.25:
                x += 1
            elif u < 0.5:
                x -= 1
            elif u < 0.75:
                y += 1
            else:
                y -= 1
        else:
            j = _axis_move(bg, kind, alpha, x, y)
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
        lit = 1 if (x == 0 or y == 0) else 0
        if lit:
            axis_steps += 1
            if y == 0:
                last_h = t
                if x == 0:
                    last_v = t
            else:
                last_v = t
        if coupled:
            c_new = 1 if y == 0 else 0
        else:
            c_new = lit
        if c_new:
            contact_steps += 1
            if not on_contact:
                on_contact = 1
                cur_entry_t = t
                azx = -x if x < 0 else x
                azy = -y if y < 0 else y
                cur_z_entry = azx if azx >= azy else azy
                cur_axis = 0 if y == 0 else 1
        elif on_contact:
            on_contact = 0
            n_exc += 1
            azx = -x if x < 0 else x
            azy = -y if y < 0 else y
            z_exit = azx if azx >= azy else azy
            sum_gain += z_exit - cur_z_entry
            sum_cone += cur_z_entry - z_prev_exit
            z_prev_exit = z_exit
            last_exit = t
            if n_exc <= want_z:
                z_exit_out[n_exc - 1] = <double> z_exit
            if cp_ptr < ncp and n_exc == cps[cp_ptr]:
                cp_gain[cp_ptr] = <double> sum_gain
                cp_cone[cp_ptr] = <double> sum_cone
                cp_time[cp_ptr] = t
                cp_ptr += 1
            if record_dense > 0 and (n_exc <= record_dense or n_exc >= next_rec):
                if rec_count[0] < rec_cap:
                    r_idx[rec_count[0]] = n_exc
                    r_ent[rec_count[0]] = cur_entry_t
                    r_ext[rec_count[0]] = t
                    r_ze[rec_count[0]] = cur_z_entry
                    r_zx[rec_count[0]] = z_exit
                    r_ax[rec_count[0]] = cur_axis
                    rec_count[0] += 1
                if n_exc >= record_dense:
                    nr = <int64_t> (n_exc * record_growth)
                    next_rec = nr if nr > n_exc else n_exc + 1
            if full:
                dom = x if azx >= azy else y
                s = 1 if dom > 0 else (-1 if dom < 0 else 0)
                if prev_sign != 0 and s != 0 and s != prev_sign:
                    quad_changes += 1
                    if t > late_threshold:
                        quad_changes_late += 1
                if s != 0:
                    prev_sign = s

    out[0] = t
    out[1] = x
    out[2] = y
    out[3] = n_exc
    out[4] = axis_steps
    out[5] = contact_steps
    out[6] = last_exit
    out[7] = last_h
    out[8] = last_v
    out[9] = sum_gain
    out[10] = sum_cone
    out[11] = quad_changes
    out[12] = quad_changes_late
    azx = -x if x < 0 else x
    azy = -y if y < 0 else y
    out[13] = azx if azx >= azy else azy
    out[14] = azx if azx < azy else azy
    return status


cdef bitgen_t *_get_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


def run_walk(bit_generator, kind, alpha, x0, y0, mode, limit,
             use_leap=True, time_cap=DEFAULT_TIME_CAP, z_exit_limit=0,
             checkpoints=None, record_dense=0, record_growth=1.15,
             late_threshold=-1):
    """Compiled replica run; see ``_kernel_py.run_walk`` for semantics."""
    cdef bitgen_t *bg = _get_bitgen(bit_generator)
    cdef binomial_t bt
    memset(&bt, 0, sizeof(bt))

    cdef int kind_c = int(kind)
    cdef double alpha_c = float(alpha)
    cdef int64_t x0_c = int(x0)
    cdef int64_t y0_c = int(y0)
    cdef int mode_c = int(mode)
    cdef int64_t limit_c = int(limit)
    cdef int64_t cap_c = int(time_cap)
    cdef int64_t want_z = int(z_exit_limit)
    cdef int64_t dense_c = int(record_dense)
    cdef double growth_c = float(record_growth)
    cdef int64_t late_c = int(late_threshold)
    cdef int use_leap_c = 1 if use_leap else 0

    if mode_c != MODE_TIME and mode_c != MODE_EXCURSION:
        raise ValueError(f"bad mode {mode_c}")
    if limit_c < 0:
        raise ValueError("limit must be nonnegative")
    if dense_c > 0 and not growth_c >= 1.01:
        raise ValueError("record_growth must be >= 1.01 when records are kept")
    if late_c < 0:
        late_c = limit_c // 2 if mode_c == MODE_TIME else cap_c

    z_exit_arr = np.full(max(want_z, 1), np.nan)
    cps_arr = np.ascontiguousarray(
        np.asarray(checkpoints if checkpoints is not None else [], dtype=np.int64)
    )
    cdef int64_t ncp = cps_arr.shape[0]
    cp_gain = np.zeros(max(ncp, 1))
    cp_cone = np.zeros(max(ncp, 1))
    cp_time = np.zeros(max(ncp, 1), dtype=np.int64)

    cdef int64_t rec_cap = 1
    if dense_c > 0:
        rec_cap = dense_c + <int64_t> (log(<double> max(limit_c, 2)) / log(growth_c)) + 16
        if rec_cap > limit_c + 1:
            rec_cap = limit_c + 1
    r_idx = np.zeros(rec_cap, dtype=np.int64)
    r_ent = np.zeros(rec_cap, dtype=np.int64)
    r_ext = np.zeros(rec_cap, dtype=np.int64)
    r_ze = np.zeros(rec_cap, dtype=np.int64)
    r_zx = np.zeros(rec_cap, dtype=np.int64)
    r_ax = np.zeros(rec_cap, dtype=np.int64)
    cdef int64_t rec_count = 0

    cdef double[::1] z_mv = z_exit_arr
    cdef int64_t[::1] cps_mv = cps_arr if ncp > 0 else np.zeros(1, dtype=np.int64)
    cdef double[::1] cpg_mv = cp_gain
    cdef double[::1] cpc_mv = cp_cone
    cdef int64_t[::1] cpt_mv = cp_time
    cdef int64_t[::1] ri_mv = r_idx
    cdef int64_t[::1] re_mv = r_ent
    cdef int64_t[::1] rx_mv = r_ext
    cdef int64_t[::1] rze_mv = r_ze
    cdef int64_t[::1] rzx_mv = r_zx
    cdef int64_t[::1] rax_mv = r_ax
    cdef int64_t out[_NSCALARS]
    cdef int status

    with nogil:
        status = _walk_loop(bg, &bt, kind_c, alpha_c, x0_c, y0_c, mode_c,
                            limit_c, use_leap_c, cap_c,
                            &z_mv[0], want_z,
                            &cps_mv[0], ncp,
                            &cpg_mv[0], &cpc_mv[0], &cpt_mv[0],
                            dense_c, growth_c,
                            &ri_mv[0], &re_mv[0], &rx_mv[0],
                            &rze_mv[0], &rzx_mv[0], &rax_mv[0],
                            rec_cap, &rec_count,
                            late_c, out)

    if dense_c > 0:
        records = (
            r_idx[:rec_count].copy(),
            r_ent[:rec_count].copy(),
            r_ext[:rec_count].copy(),
            r_ze[:rec_count].copy(),
            r_zx[:rec_count].copy(),
            r_ax[:rec_count].copy(),
        )
    else:
        records = None
    return {
        "status": int(status),
        "t": int(out[0]),
        "x": int(out[1]),
        "y": int(out[2]),
        "z_final": int(out[13]),
        "z_min_final": int(out[14]),
        "n_exc": int(out[3]),
        "axis_steps": int(out[4]),
        "contact_steps": int(out[5]),
        "last_exit": int(out[6]),
        "last_h": int(out[7]),
        "last_v": int(out[8]),
        "sum_gain": int(out[9]),
        "sum_cone": int(out[10]),
        "quad_changes": int(out[11]),
        "quad_changes_late": int(out[12]),
        "z_exit": z_exit_arr if want_z > 0 else None,
        "cp_gain": cp_gain[:ncp],
        "cp_cone": cp_cone[:ncp],
        "cp_time": cp_time[:ncp],
        "records": records,
    }


def run_sampled(bit_generator, kind, alpha, x0, y0, n_steps, stride):
    """Compiled twin of ``_kernel_py.run_sampled``."""
    cdef bitgen_t *bg = _get_bitgen(bit_generator)
    cdef int kind_c = int(kind)
    cdef double alpha_c = float(alpha)
    cdef int64_t n = int(n_steps)
    cdef int64_t s = int(stride)
    if n < 0:
        raise ValueError("n_steps must be nonnegative")
    if s < 1:
        raise ValueError("stride must be >= 1")
    cdef int64_t count = n // s + 1 + (1 if n % s != 0 else 0)
    ts = np.zeros(count, dtype=np.int64)
    xs = np.zeros(count, dtype=np.int64)
    ys = np.zeros(count, dtype=np.int64)
    cdef int64_t[::1] ts_mv = ts
    cdef int64_t[::1] xs_mv = xs
    cdef int64_t[::1] ys_mv = ys
    cdef int64_t x = int(x0)
    cdef int64_t y = int(y0)
    cdef int64_t t, pos
    cdef int j
    cdef double u
    ts_mv[0] = 0
    xs_mv[0] = x
    ys_mv[0] = y
    pos = 1
    with nogil:
        for t in range(1, n + 1):
            if x != 0 and y != 0:
                u = random_standard_uniform(bg)
                if u < 0.25:
                    x += 1
                elif u < 0.5:
                    x -= 1
                elif u < 0.75:
                    y += 1
                else:
                    y -= 1
            else:
                j = _axis_move(bg, kind_c, alpha_c, x, y)
                if j == 0:
                    x += 1
                elif j == 1:
                    x -= 1
                elif j == 2:
                    y += 1
                else:
                    y -= 1
            if t % s == 0 or t == n:
                ts_mv[pos] = t
                xs_mv[pos] = x
                ys_mv[pos] = y
                pos += 1
    return ts, xs, ys
