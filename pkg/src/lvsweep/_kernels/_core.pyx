# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event-loop kernels.

Statement-by-statement transcription of ``_pure.py``; both backends must
produce bit-identical results for the same seeds.  Keep the floating-point
expression order, RNG draw order and branch structure in sync with the
pure module whenever editing either file.
"""

from libc.math cimport log1p, isnan, isinf, INFINITY, NAN
from libc.stdlib cimport malloc, realloc, free

ctypedef unsigned long long u64
ctypedef long long i64

cdef u64 GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 MIX2 = 0x94D049BB133111EBULL
cdef double TWO_M53 = 2.0 ** -53

STATUS_FIXED = 0
STATUS_LOSS = 1
STATUS_ABSORBED = 2
STATUS_TRUNCATED = 3
STATUS_T_END = 4
STATUS_EPS = 5


cdef inline double _next_u(u64 *state) noexcept nogil:
    cdef u64 z
    state[0] = state[0] + GOLDEN
    z = (state[0] ^ (state[0] >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    z = z ^ (z >> 31)
    return <double>(z >> 11) * TWO_M53


def mix64(z):
    """Splitmix64 finalizer; the avalanche used for seed derivation."""
    cdef u64 x = <u64>(z & 0xFFFFFFFFFFFFFFFF)
    x = (x ^ (x >> 30)) * MIX1
    x = (x ^ (x >> 27)) * MIX2
    return <object>(x ^ (x >> 31))


def run_sweep(
    double fA, double fa, double DA, double Da,
    double CAA, double CAa, double CaA, double Caa,
    long K, double rK,
    i64 nAb1, i64 nAb2, i64 nab1, i64 nab2,
    object seed,
    i64 max_events,
    i64 eps_target=0,
    double band_lo=1.0, double band_hi=0.0,
    double t_end=INFINITY,
    int record_mode=0, double dt_sample=0.0,
    bint collect_jumps=False,
    bint stop_at_eps=False,
):
    """Compiled counterpart of ``_pure.run_sweep``."""
    cdef double invK = 1.0 / K
    cdef u64 state = <u64>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef double t = 0.0
    cdef i64 events = 0
    cdef double t_ext = NAN
    cdef double t_eps = NAN
    cdef double s_eps = NAN
    cdef double p_ab1_final = NAN
    cdef bint fixed = False
    cdef bint stop_on_absorption = isinf(t_end)
    cdef bint band_on = band_lo <= band_hi

    cdef i64 nA, na, w
    cdef double fnA, fna, den, rec, q
    cdef double b0, b1, b2, b3, d0, d1, d2, d3, dpcA, dpca, total
    cdef double u1, u2, dt, t_next, target, ts
    cdef int chosen, i, status
    cdef i64 sample_idx = 0
    cdef double rates[8]

    traj_t = []
    traj_n = []
    cdef i64 *jump_u = NULL
    cdef i64 *jump_d = NULL
    cdef i64 *jump_h = NULL
    if collect_jumps:
        jump_u = <i64 *>malloc((eps_target + 1) * sizeof(i64))
        jump_d = <i64 *>malloc((eps_target + 1) * sizeof(i64))
        jump_h = <i64 *>malloc((eps_target + 1) * sizeof(i64))
        for i in range(eps_target + 1):
            jump_u[i] = 0
            jump_d[i] = 0
            jump_h[i] = 0

    if record_mode == 1:
        traj_t.append(0.0)
        traj_n.append((nAb1, nAb2, nab1, nab2))
        sample_idx = 1
    elif record_mode == 2:
        traj_t.append(0.0)
        traj_n.append((nAb1, nAb2, nab1, nab2))

    nA = nAb1 + nAb2
    na = nab1 + nab2
    if eps_target > 0 and na == eps_target:
        t_eps = 0.0
    if band_on and (nA < band_lo or nA > band_hi):
        s_eps = 0.0
    if nA == 0:
        t_ext = 0.0
        fixed = na > 0
        if na > 0:
            p_ab1_final = <double>nab1 / <double>na

    status = STATUS_TRUNCATED
    if eps_target > 0 and stop_at_eps and na == eps_target:
        status = STATUS_EPS
    elif stop_on_absorption and nA == 0:
        status = STATUS_FIXED if na > 0 else STATUS_ABSORBED
    elif stop_on_absorption and na == 0:
        status = STATUS_LOSS if nA > 0 else STATUS_ABSORBED
    else:
        while True:
            nA = nAb1 + nAb2
            na = nab1 + nab2
            fnA = fA * nA
            fna = fa * na
            den = fnA + fna
            if den > 0.0:
                w = nab1 * nAb2 - nAb1 * nab2
                rec = (rK * fA * fa / den) * <double>w
            else:
                rec = 0.0
            b0 = fA * nAb1 + rec
            b1 = fA * nAb2 - rec
            b2 = fa * nab1 - rec
            b3 = fa * nab2 + rec
            if b0 < 0.0:
                b0 = 0.0
            if b1 < 0.0:
                b1 = 0.0
            if b2 < 0.0:
                b2 = 0.0
            if b3 < 0.0:
                b3 = 0.0
            dpcA = DA + (CAA * nA + CAa * na) * invK
            dpca = Da + (CaA * nA + Caa * na) * invK
            d0 = dpcA * nAb1
            d1 = dpcA * nAb2
            d2 = dpca * nab1
            d3 = dpca * nab2
            total = b0 + b1 + b2 + b3 + d0 + d1 + d2 + d3
            if total <= 0.0:
                status = STATUS_ABSORBED
                break

            u1 = _next_u(&state)
            dt = -log1p(-u1) / total
            t_next = t + dt
            if t_next >= t_end:
                t = t_end
                status = STATUS_T_END
                break
            if record_mode == 1:
                ts = sample_idx * dt_sample
                while ts < t_next:
                    traj_t.append(ts)
                    traj_n.append((nAb1, nAb2, nab1, nab2))
                    sample_idx += 1
                    ts = sample_idx * dt_sample
            t = t_next

            u2 = _next_u(&state)
            target = u2 * total
            chosen = -1
            if target < b0:
                chosen = 0
            else:
                target -= b0
                if target < b1:
                    chosen = 1
                else:
                    target -= b1
                    if target < b2:
                        chosen = 2
                    else:
                        target -= b2
                        if target < b3:
                            chosen = 3
                        else:
                            target -= b3
                            if target < d0:
                                chosen = 4
                            else:
                                target -= d0
                                if target < d1:
                                    chosen = 5
                                else:
                                    target -= d1
                                    if target < d2:
                                        chosen = 6
                                    else:
                                        target -= d2
                                        if target < d3:
                                            chosen = 7
            if chosen == -1:
                rates[0] = b0
                rates[1] = b1
                rates[2] = b2
                rates[3] = b3
                rates[4] = d0
                rates[5] = d1
                rates[6] = d2
                rates[7] = d3
                for i in range(7, -1, -1):
                    if rates[i] > 0.0:
                        chosen = i
                        break
            events += 1

            if collect_jumps:
                if chosen == 2 or chosen == 3:
                    if na <= eps_target:
                        jump_u[na] += 1
                elif chosen == 6 or chosen == 7:
                    if na <= eps_target:
                        jump_d[na] += 1
                else:
                    if na <= eps_target:
                        jump_h[na] += 1

            if chosen == 0:
                nAb1 += 1
            elif chosen == 1:
                nAb2 += 1
            elif chosen == 2:
                nab1 += 1
            elif chosen == 3:
                nab2 += 1
            elif chosen == 4:
                nAb1 -= 1
            elif chosen == 5:
                nAb2 -= 1
            elif chosen == 6:
                nab1 -= 1
            else:
                nab2 -= 1
            nA = nAb1 + nAb2
            na = nab1 + nab2

            if record_mode == 2:
                traj_t.append(t)
                traj_n.append((nAb1, nAb2, nab1, nab2))

            if eps_target > 0 and na == eps_target and isnan(t_eps):
                t_eps = t
                if stop_at_eps:
                    status = STATUS_EPS
                    break
            if band_on and isnan(s_eps) and (nA < band_lo or nA > band_hi):
                s_eps = t
            if nA == 0 and isnan(t_ext):
                t_ext = t
                fixed = na > 0
                if na > 0:
                    p_ab1_final = <double>nab1 / <double>na
                if stop_on_absorption:
                    status = STATUS_FIXED if na > 0 else STATUS_ABSORBED
                    break
            if na == 0 and nA > 0 and stop_on_absorption:
                status = STATUS_LOSS
                break
            if events >= max_events:
                status = STATUS_TRUNCATED
                break

    if record_mode == 1:
        ts = sample_idx * dt_sample
        while ts <= t:
            traj_t.append(ts)
            traj_n.append((nAb1, nAb2, nab1, nab2))
            sample_idx += 1
            ts = sample_idx * dt_sample

    ju = jd = jh = None
    if collect_jumps:
        ju = [jump_u[i] for i in range(eps_target + 1)]
        jd = [jump_d[i] for i in range(eps_target + 1)]
        jh = [jump_h[i] for i in range(eps_target + 1)]
        free(jump_u)
        free(jump_d)
        free(jump_h)

    return {
        "status": status,
        "t": t,
        "events": events,
        "n": (nAb1, nAb2, nab1, nab2),
        "fixed": fixed,
        "t_ext": t_ext,
        "t_eps": t_eps,
        "s_eps": s_eps,
        "p_ab1_final": p_ab1_final,
        "n_a_final": nab1 + nab2,
        "traj_t": traj_t if record_mode else None,
        "traj_n": traj_n if record_mode else None,
        "jump_u": ju,
        "jump_d": jd,
        "jump_h": jh,
    }


cdef struct Pool:
    i64 *mrec
    signed char *okind
    double *otime
    signed char *odonor
    i64 *uid
    i64 *parent
    i64 size
    i64 cap


cdef int pool_init(Pool *p, i64 cap) except -1:
    if cap < 16:
        cap = 16
    p.mrec = <i64 *>malloc(cap * sizeof(i64))
    p.okind = <signed char *>malloc(cap * sizeof(signed char))
    p.otime = <double *>malloc(cap * sizeof(double))
    p.odonor = <signed char *>malloc(cap * sizeof(signed char))
    p.uid = <i64 *>malloc(cap * sizeof(i64))
    p.parent = <i64 *>malloc(cap * sizeof(i64))
    if (p.mrec == NULL or p.okind == NULL or p.otime == NULL
            or p.odonor == NULL or p.uid == NULL or p.parent == NULL):
        raise MemoryError()
    p.size = 0
    p.cap = cap
    return 0


cdef int pool_grow(Pool *p) except -1:
    cdef i64 cap = p.cap * 2
    p.mrec = <i64 *>realloc(p.mrec, cap * sizeof(i64))
    p.okind = <signed char *>realloc(p.okind, cap * sizeof(signed char))
    p.otime = <double *>realloc(p.otime, cap * sizeof(double))
    p.odonor = <signed char *>realloc(p.odonor, cap * sizeof(signed char))
    p.uid = <i64 *>realloc(p.uid, cap * sizeof(i64))
    p.parent = <i64 *>realloc(p.parent, cap * sizeof(i64))
    if (p.mrec == NULL or p.okind == NULL or p.otime == NULL
            or p.odonor == NULL or p.uid == NULL or p.parent == NULL):
        raise MemoryError()
    p.cap = cap
    return 0


cdef void pool_free(Pool *p) noexcept:
    free(p.mrec)
    free(p.okind)
    free(p.otime)
    free(p.odonor)
    free(p.uid)
    free(p.parent)


cdef dict _a_stats(Pool *pools, i64 *counts, double t,
                   bint check_founder_b1, i64 *tag_violations):
    cdef i64 zero = 0, one = 0, multi = 0, m, j, na_now
    cdef int pp, beta_p
    for pp in range(2, 4):
        beta_p = pp & 1
        for j in range(pools[pp].size):
            m = pools[pp].mrec[j]
            if m == 0:
                zero += 1
            elif m == 1:
                one += 1
            else:
                multi += 1
            if pools[pp].okind[j] == 1 and pools[pp].odonor[j] != beta_p:
                tag_violations[0] += 1
            if check_founder_b1 and pp == 3 and m == 0:
                tag_violations[0] += 1
    na_now = counts[2] + counts[3]
    return {
        "n_a": na_now,
        "frac_zero_mrec": (<double>zero) / (<double>na_now) if na_now else float("nan"),
        "frac_one_mrec": (<double>one) / (<double>na_now) if na_now else float("nan"),
        "frac_multi_mrec": (<double>multi) / (<double>na_now) if na_now else float("nan"),
        "frac_b1": (<double>counts[2]) / (<double>na_now) if na_now else float("nan"),
        "t": t,
    }


def run_tagged(
    double fA, double fa, double DA, double Da,
    double CAA, double CAa, double CaA, double Caa,
    long K, double rK,
    i64 nAb1, i64 nAb2, i64 nab1, i64 nab2,
    object seed, object lineage_seed,
    i64 max_events,
    i64 eps_target=0,
    double band_lo=1.0, double band_hi=0.0,
    bint stop_at_eps=True,
    bint check_founder_b1=False,
):
    """Compiled counterpart of ``_pure.run_tagged``."""
    cdef double invK = 1.0 / K
    cdef u64 state = <u64>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef u64 lstate = <u64>(lineage_seed & 0xFFFFFFFFFFFFFFFF)
    cdef double t = 0.0
    cdef i64 events = 0
    cdef double t_ext = NAN
    cdef double t_eps = NAN
    cdef double s_eps = NAN
    cdef double p_ab1_final = NAN
    cdef bint fixed = False
    cdef i64 tag_violations = 0
    cdef bint band_on = band_lo <= band_hi

    cdef Pool pools[4]
    cdef i64 counts[4]
    cdef i64 next_uid = 0
    cdef int p, q, cand
    cdef i64 i, idx, last, size
    counts[0] = nAb1
    counts[1] = nAb2
    counts[2] = nab1
    counts[3] = nab2
    for p in range(4):
        pool_init(&pools[p], counts[p] * 2)
        for i in range(counts[p]):
            pools[p].mrec[i] = 0
            pools[p].okind[i] = 0
            pools[p].otime[i] = 0.0
            pools[p].odonor[i] = -1
            pools[p].uid[i] = next_uid
            pools[p].parent[i] = -1
            next_uid += 1
        pools[p].size = counts[p]

    cdef i64 nA, na, w
    cdef double fnA, fna, den, rec
    cdef double b0, b1, b2, b3, d0, d1, d2, d3, dpcA, dpca, total
    cdef double u1, u2, uL, dt, target, tgt
    cdef double falpha, w0, wA, wa, wtot
    cdef int chosen, status, beta, alpha, donor_alpha, inc
    cdef i64 nalpha, nalphabeta, nAbeta, nabeta
    cdef i64 m_new, par
    cdef signed char k_new, don_new
    cdef double t_new
    cdef double rates[8]

    stats_eps = None

    nA = counts[0] + counts[1]
    na = counts[2] + counts[3]
    if eps_target > 0 and na == eps_target:
        t_eps = 0.0
        stats_eps = _a_stats(pools, counts, t, check_founder_b1, &tag_violations)
    if band_on and (nA < band_lo or nA > band_hi):
        s_eps = 0.0
    if nA == 0:
        t_ext = 0.0
        fixed = na > 0
        if na > 0:
            p_ab1_final = <double>counts[2] / <double>na

    status = STATUS_TRUNCATED
    if eps_target > 0 and stop_at_eps and na == eps_target:
        status = STATUS_EPS
    elif nA == 0:
        status = STATUS_FIXED if na > 0 else STATUS_ABSORBED
    elif na == 0:
        status = STATUS_LOSS
    else:
        while True:
            nA = counts[0] + counts[1]
            na = counts[2] + counts[3]
            fnA = fA * nA
            fna = fa * na
            den = fnA + fna
            if den > 0.0:
                w = counts[2] * counts[1] - counts[0] * counts[3]
                rec = (rK * fA * fa / den) * <double>w
            else:
                rec = 0.0
            b0 = fA * counts[0] + rec
            b1 = fA * counts[1] - rec
            b2 = fa * counts[2] - rec
            b3 = fa * counts[3] + rec
            if b0 < 0.0:
                b0 = 0.0
            if b1 < 0.0:
                b1 = 0.0
            if b2 < 0.0:
                b2 = 0.0
            if b3 < 0.0:
                b3 = 0.0
            dpcA = DA + (CAA * nA + CAa * na) * invK
            dpca = Da + (CaA * nA + Caa * na) * invK
            d0 = dpcA * counts[0]
            d1 = dpcA * counts[1]
            d2 = dpca * counts[2]
            d3 = dpca * counts[3]
            total = b0 + b1 + b2 + b3 + d0 + d1 + d2 + d3
            if total <= 0.0:
                status = STATUS_ABSORBED
                break

            u1 = _next_u(&state)
            dt = -log1p(-u1) / total
            t = t + dt

            u2 = _next_u(&state)
            target = u2 * total
            chosen = -1
            if target < b0:
                chosen = 0
            else:
                target -= b0
                if target < b1:
                    chosen = 1
                else:
                    target -= b1
                    if target < b2:
                        chosen = 2
                    else:
                        target -= b2
                        if target < b3:
                            chosen = 3
                        else:
                            target -= b3
                            if target < d0:
                                chosen = 4
                            else:
                                target -= d0
                                if target < d1:
                                    chosen = 5
                                else:
                                    target -= d1
                                    if target < d2:
                                        chosen = 6
                                    else:
                                        target -= d2
                                        if target < d3:
                                            chosen = 7
            if chosen == -1:
                rates[0] = b0
                rates[1] = b1
                rates[2] = b2
                rates[3] = b3
                rates[4] = d0
                rates[5] = d1
                rates[6] = d2
                rates[7] = d3
                for p in range(7, -1, -1):
                    if rates[p] > 0.0:
                        chosen = p
                        break
            events += 1

            if chosen >= 4:
                p = chosen - 4
                size = counts[p]
                uL = _next_u(&lstate)
                idx = <i64>(uL * size)
                if idx >= size:
                    idx = size - 1
                last = size - 1
                if idx != last:
                    pools[p].mrec[idx] = pools[p].mrec[last]
                    pools[p].okind[idx] = pools[p].okind[last]
                    pools[p].otime[idx] = pools[p].otime[last]
                    pools[p].odonor[idx] = pools[p].odonor[last]
                    pools[p].uid[idx] = pools[p].uid[last]
                    pools[p].parent[idx] = pools[p].parent[last]
                pools[p].size -= 1
                counts[p] -= 1
            else:
                p = chosen
                beta = p & 1
                alpha = p >> 1
                falpha = fA if alpha == 0 else fa
                nalpha = nA if alpha == 0 else na
                nalphabeta = counts[p]
                nAbeta = counts[beta]
                nabeta = counts[2 + beta]
                w0 = (1.0 - rK) * (falpha * nalphabeta) * den
                wA = rK * (falpha * nalpha) * (fA * nAbeta)
                wa = rK * (falpha * nalpha) * (fa * nabeta)
                wtot = w0 + wA + wa
                uL = _next_u(&lstate)
                tgt = uL * wtot
                if tgt < w0:
                    q = p
                    donor_alpha = alpha
                else:
                    tgt -= w0
                    if tgt < wA:
                        q = beta
                        donor_alpha = 0
                    else:
                        q = 2 + beta
                        donor_alpha = 1
                if counts[q] == 0:
                    for cand in (p, beta, 2 + beta):
                        if counts[cand] > 0:
                            q = cand
                            donor_alpha = cand >> 1
                            break
                size = counts[q]
                uL = _next_u(&lstate)
                idx = <i64>(uL * size)
                if idx >= size:
                    idx = size - 1
                inc = 1 if donor_alpha != alpha else 0
                m_new = pools[q].mrec[idx] + inc
                if inc:
                    k_new = 1
                    t_new = t
                    don_new = <signed char>beta
                else:
                    k_new = pools[q].okind[idx]
                    t_new = pools[q].otime[idx]
                    don_new = pools[q].odonor[idx]
                par = pools[q].uid[idx]
                if pools[p].size == pools[p].cap:
                    pool_grow(&pools[p])
                idx = pools[p].size
                pools[p].mrec[idx] = m_new
                pools[p].okind[idx] = k_new
                pools[p].otime[idx] = t_new
                pools[p].odonor[idx] = don_new
                pools[p].uid[idx] = next_uid
                pools[p].parent[idx] = par
                next_uid += 1
                pools[p].size += 1
                counts[p] += 1

            nA = counts[0] + counts[1]
            na = counts[2] + counts[3]

            if eps_target > 0 and na == eps_target and isnan(t_eps):
                t_eps = t
                stats_eps = _a_stats(pools, counts, t, check_founder_b1,
                                     &tag_violations)
                if stop_at_eps:
                    status = STATUS_EPS
                    break
            if band_on and isnan(s_eps) and (nA < band_lo or nA > band_hi):
                s_eps = t
            if nA == 0 and isnan(t_ext):
                t_ext = t
                fixed = na > 0
                if na > 0:
                    p_ab1_final = <double>counts[2] / <double>na
                status = STATUS_FIXED if na > 0 else STATUS_ABSORBED
                break
            if na == 0 and nA > 0:
                status = STATUS_LOSS
                break
            if events >= max_events:
                status = STATUS_TRUNCATED
                break

    stats_final = _a_stats(pools, counts, t, check_founder_b1, &tag_violations)
    result = {
        "status": status,
        "t": t,
        "events": events,
        "n": (counts[0], counts[1], counts[2], counts[3]),
        "fixed": fixed,
        "t_ext": t_ext,
        "t_eps": t_eps,
        "s_eps": s_eps,
        "p_ab1_final": p_ab1_final,
        "n_a_final": counts[2] + counts[3],
        "stats_eps": stats_eps,
        "stats_final": stats_final,
        "tag_violations": tag_violations,
    }
    for p in range(4):
        pool_free(&pools[p])
    return result


def run_coupled(
    double fA, double fa, double DA, double Da,
    double CAA, double CAa, double CaA, double Caa,
    long K,
    i64 n0_A, i64 n0_a,
    double s_minus, double s_plus,
    object seed,
    i64 max_events,
    i64 eps_target,
    double band_lo, double band_hi,
):
    """Compiled counterpart of ``_pure.run_coupled``."""
    cdef double invK = 1.0 / K
    cdef u64 state = <u64>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef double t = 0.0
    cdef i64 events = 0
    cdef i64 zm = n0_a
    cdef i64 zp = n0_a
    cdef i64 na = n0_a
    cdef i64 nA = n0_A
    cdef double Dp = fa * (1.0 - s_plus)
    cdef double Dm = fa * (1.0 - s_minus)
    cdef double t_eps = NAN
    cdef double s_eps = NAN
    cdef double tp_eps = NAN
    cdef i64 violations = 0
    cdef i64 rate_clamps = 0
    cdef int status = STATUS_TRUNCATED

    cdef double DN, dlowN, dhighN, dpcA, total, u1, u2, target, ri
    cdef double rates[11]
    cdef int chosen, i

    if band_lo <= band_hi and (nA < band_lo or nA > band_hi):
        s_eps = 0.0
        status = STATUS_ABSORBED
    elif na == eps_target:
        t_eps = 0.0
        status = STATUS_EPS
    else:
        while True:
            DN = Da + (CaA * nA + Caa * na) * invK
            dlowN = DN - Dp
            dhighN = Dm - DN
            if dlowN < 0.0:
                dlowN = 0.0
                rate_clamps += 1
            if dhighN < 0.0:
                dhighN = 0.0
                rate_clamps += 1
            rates[0] = fa * zm
            rates[1] = fa * (na - zm)
            rates[2] = fa * (zp - na)
            rates[3] = Dp * zm
            rates[4] = dlowN * zm
            rates[5] = dhighN * zm
            rates[6] = Dp * (na - zm)
            rates[7] = dlowN * (na - zm)
            rates[8] = Dp * (zp - na)
            dpcA = DA + (CAA * nA + CAa * na) * invK
            rates[9] = fA * nA
            rates[10] = dpcA * nA
            total = (rates[0] + rates[1] + rates[2] + rates[3] + rates[4]
                     + rates[5] + rates[6] + rates[7] + rates[8] + rates[9]
                     + rates[10])
            if total <= 0.0:
                status = STATUS_ABSORBED
                break

            u1 = _next_u(&state)
            t = t - log1p(-u1) / total

            u2 = _next_u(&state)
            target = u2 * total
            chosen = -1
            for i in range(11):
                ri = rates[i]
                if target < ri:
                    chosen = i
                    break
                target -= ri
            if chosen == -1:
                for i in range(10, -1, -1):
                    if rates[i] > 0.0:
                        chosen = i
                        break
            events += 1

            if chosen == 0:
                zm += 1
                na += 1
                zp += 1
            elif chosen == 1:
                na += 1
                zp += 1
            elif chosen == 2:
                zp += 1
            elif chosen == 3:
                zm -= 1
                na -= 1
                zp -= 1
            elif chosen == 4:
                zm -= 1
                na -= 1
            elif chosen == 5:
                zm -= 1
            elif chosen == 6:
                na -= 1
                zp -= 1
            elif chosen == 7:
                na -= 1
            elif chosen == 8:
                zp -= 1
            elif chosen == 9:
                nA += 1
            else:
                nA -= 1

            if not (zm <= na <= zp):
                violations += 1
            if isnan(tp_eps) and zp >= eps_target:
                tp_eps = t

            if na == eps_target:
                t_eps = t
                status = STATUS_EPS
                break
            if nA < band_lo or nA > band_hi:
                s_eps = t
                status = STATUS_ABSORBED
                break
            if na == 0:
                status = STATUS_LOSS
                break
            if events >= max_events:
                status = STATUS_TRUNCATED
                break

    return {
        "status": status,
        "t": t,
        "events": events,
        "zm": zm,
        "nA": nA,
        "na": na,
        "zp": zp,
        "t_eps": t_eps,
        "s_eps": s_eps,
        "tp_eps": tp_eps,
        "violations": violations,
        "rate_clamps": rate_clamps,
    }
