"""Pure-Python event-loop kernels.

Reference implementation of the hot loops: the count-level sweep simulator,
the individual-based tagged simulator, and the coupled birth-death triple.
``_core.pyx`` transcribes these functions statement by statement; both
backends must produce bit-identical results for the same seeds, so keep
every floating-point expression, RNG draw and branch in the same order when
touching either file.

All kernels use a splitmix64 counter RNG: 64-bit state advanced by a golden
constant, output avalanched, uniform doubles taken from the top 53 bits.
"""

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

TWO_M53 = 2.0 ** -53

# channel order: births Ab1 Ab2 ab1 ab2, deaths Ab1 Ab2 ab1 ab2
STATUS_FIXED = 0
STATUS_LOSS = 1
STATUS_ABSORBED = 2
STATUS_TRUNCATED = 3
STATUS_T_END = 4
STATUS_EPS = 5


def mix64(z):
    """Splitmix64 finalizer; the avalanche used for seed derivation."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def _next_u(state):
    """Advance splitmix64 state; return (new_state, uniform in [0,1))."""
    state = (state + GOLDEN) & MASK64
    z = ((state ^ (state >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    z ^= z >> 31
    return state, (z >> 11) * TWO_M53


def run_sweep(
    fA, fa, DA, Da, CAA, CAa, CaA, Caa,
    K, rK,
    nAb1, nAb2, nab1, nab2,
    seed,
    max_events,
    eps_target=0,
    band_lo=1.0, band_hi=0.0,
    t_end=math.inf,
    record_mode=0, dt_sample=0.0,
    collect_jumps=False,
    stop_at_eps=False,
):
    """Simulate the four-type jump process until absorption or a cap.

    eps_target <= 0 disables the N_a threshold clock; band_lo > band_hi
    disables the resident-band exit clock.  A finite t_end keeps the chain
    running through absorbing milestones (used for trajectory collection).
    """
    invK = 1.0 / K
    state = seed & MASK64
    t = 0.0
    events = 0
    t_ext = math.nan
    t_eps = math.nan
    s_eps = math.nan
    p_ab1_final = math.nan
    fixed = False
    stop_on_absorption = math.isinf(t_end)

    band_on = band_lo <= band_hi
    traj_t = []
    traj_n = []
    jump_u = [0] * (eps_target + 1) if collect_jumps else None
    jump_d = [0] * (eps_target + 1) if collect_jumps else None
    jump_h = [0] * (eps_target + 1) if collect_jumps else None

    sample_idx = 0
    if record_mode == 1:
        traj_t.append(0.0)
        traj_n.append((nAb1, nAb2, nab1, nab2))
        sample_idx = 1
    elif record_mode == 2:
        traj_t.append(0.0)
        traj_n.append((nAb1, nAb2, nab1, nab2))

    # stopping clocks are infima over t >= 0, so check the initial state
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
            p_ab1_final = nab1 / na

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
                rec = (rK * fA * fa / den) * w
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

            state, u1 = _next_u(state)
            dt = -math.log1p(-u1) / total
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

            state, u2 = _next_u(state)
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
                # rounding pushed the target past the cumulative sum
                rates = (b0, b1, b2, b3, d0, d1, d2, d3)
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

            if eps_target > 0 and na == eps_target and math.isnan(t_eps):
                t_eps = t
                if stop_at_eps:
                    status = STATUS_EPS
                    break
            if band_on and math.isnan(s_eps) and (nA < band_lo or nA > band_hi):
                s_eps = t
            if nA == 0 and math.isnan(t_ext):
                t_ext = t
                fixed = na > 0
                if na > 0:
                    p_ab1_final = nab1 / na
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
        "jump_u": jump_u,
        "jump_d": jump_d,
        "jump_h": jump_h,
    }


def run_tagged(
    fA, fa, DA, Da, CAA, CAa, CaA, Caa,
    K, rK,
    nAb1, nAb2, nab1, nab2,
    seed, lineage_seed,
    max_events,
    eps_target=0,
    band_lo=1.0, band_hi=0.0,
    stop_at_eps=True,
    check_founder_b1=False,
):
    """Individual-based sweep with neutral-origin tags.

    The event stream (waiting times and type-level channel choices) is
    drawn exactly as in run_sweep from ``seed``; all within-type choices
    (victims, parents, donors) come from the second stream, so the count
    projection of a tagged run coincides with the count kernel pathwise.

    Per-lineage records: m-recombination count since time 0, origin kind
    (0 founder-descent, 1 recombined), time and donor neutral allele of the
    most recent m-recombination, unique id, and neutral parent id.
    """
    invK = 1.0 / K
    state = seed & MASK64
    lstate = lineage_seed & MASK64
    t = 0.0
    events = 0
    t_ext = math.nan
    t_eps = math.nan
    s_eps = math.nan
    p_ab1_final = math.nan
    fixed = False
    tag_violations = 0

    # pools indexed 0:Ab1 1:Ab2 2:ab1 3:ab2; neutral allele is the pool's
    # low bit, selected allele its high bit, so per-individual storage is
    # just the lineage records.
    counts = [nAb1, nAb2, nab1, nab2]
    mrec = [[0] * c for c in counts]
    okind = [[0] * c for c in counts]
    otime = [[0.0] * c for c in counts]
    odonor = [[-1] * c for c in counts]
    uid = []
    parent = []
    next_uid = 0
    for p in range(4):
        ids = list(range(next_uid, next_uid + counts[p]))
        uid.append(ids)
        parent.append([-1] * counts[p])
        next_uid += counts[p]

    band_on = band_lo <= band_hi
    stats_eps = None

    def a_stats():
        zero = one = multi = 0
        nonlocal tag_violations
        for p in (2, 3):
            mp = mrec[p]
            kp = okind[p]
            dp = odonor[p]
            beta_p = p & 1
            for i in range(counts[p]):
                m = mp[i]
                if m == 0:
                    zero += 1
                elif m == 1:
                    one += 1
                else:
                    multi += 1
                if kp[i] == 1 and dp[i] != beta_p:
                    tag_violations += 1
                if check_founder_b1 and p == 3 and m == 0:
                    # an a,b2 individual cannot be founder-descent when
                    # the initial a-population is a single b1 founder
                    tag_violations += 1
        na_now = counts[2] + counts[3]
        return {
            "n_a": na_now,
            "frac_zero_mrec": zero / na_now if na_now else math.nan,
            "frac_one_mrec": one / na_now if na_now else math.nan,
            "frac_multi_mrec": multi / na_now if na_now else math.nan,
            "frac_b1": counts[2] / na_now if na_now else math.nan,
            "t": t,
        }

    nA = counts[0] + counts[1]
    na = counts[2] + counts[3]
    if eps_target > 0 and na == eps_target:
        t_eps = 0.0
        stats_eps = a_stats()
    if band_on and (nA < band_lo or nA > band_hi):
        s_eps = 0.0
    if nA == 0:
        t_ext = 0.0
        fixed = na > 0
        if na > 0:
            p_ab1_final = counts[2] / na

    status = STATUS_TRUNCATED
    if eps_target > 0 and stop_at_eps and na == eps_target:
        status = STATUS_EPS
    elif nA == 0:
        status = STATUS_FIXED if na > 0 else STATUS_ABSORBED
    elif na == 0:
        status = STATUS_LOSS
    else:
        while True:
            c0, c1, c2, c3 = counts
            nA = c0 + c1
            na = c2 + c3
            fnA = fA * nA
            fna = fa * na
            den = fnA + fna
            if den > 0.0:
                w = c2 * c1 - c0 * c3
                rec = (rK * fA * fa / den) * w
            else:
                rec = 0.0
            b0 = fA * c0 + rec
            b1 = fA * c1 - rec
            b2 = fa * c2 - rec
            b3 = fa * c3 + rec
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
            d0 = dpcA * c0
            d1 = dpcA * c1
            d2 = dpca * c2
            d3 = dpca * c3
            total = b0 + b1 + b2 + b3 + d0 + d1 + d2 + d3
            if total <= 0.0:
                status = STATUS_ABSORBED
                break

            state, u1 = _next_u(state)
            dt = -math.log1p(-u1) / total
            t = t + dt

            state, u2 = _next_u(state)
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
                rates = (b0, b1, b2, b3, d0, d1, d2, d3)
                for i in range(7, -1, -1):
                    if rates[i] > 0.0:
                        chosen = i
                        break
            events += 1

            if chosen >= 4:
                p = chosen - 4
                size = counts[p]
                lstate, uL = _next_u(lstate)
                idx = int(uL * size)
                if idx >= size:
                    idx = size - 1
                last = size - 1
                if idx != last:
                    mrec[p][idx] = mrec[p][last]
                    okind[p][idx] = okind[p][last]
                    otime[p][idx] = otime[p][last]
                    odonor[p][idx] = odonor[p][last]
                    uid[p][idx] = uid[p][last]
                    parent[p][idx] = parent[p][last]
                mrec[p].pop()
                okind[p].pop()
                otime[p].pop()
                odonor[p].pop()
                uid[p].pop()
                parent[p].pop()
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
                lstate, uL = _next_u(lstate)
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
                    # rounding fallback: first nonempty candidate pool
                    for cand in (p, beta, 2 + beta):
                        if counts[cand] > 0:
                            q = cand
                            donor_alpha = cand >> 1
                            break
                size = counts[q]
                lstate, uL = _next_u(lstate)
                idx = int(uL * size)
                if idx >= size:
                    idx = size - 1
                inc = 1 if donor_alpha != alpha else 0
                m_new = mrec[q][idx] + inc
                if inc:
                    k_new = 1
                    t_new = t
                    don_new = beta
                else:
                    k_new = okind[q][idx]
                    t_new = otime[q][idx]
                    don_new = odonor[q][idx]
                par = uid[q][idx]
                mrec[p].append(m_new)
                okind[p].append(k_new)
                otime[p].append(t_new)
                odonor[p].append(don_new)
                uid[p].append(next_uid)
                parent[p].append(par)
                next_uid += 1
                counts[p] += 1

            nA = counts[0] + counts[1]
            na = counts[2] + counts[3]

            if eps_target > 0 and na == eps_target and math.isnan(t_eps):
                t_eps = t
                stats_eps = a_stats()
                if stop_at_eps:
                    status = STATUS_EPS
                    break
            if band_on and math.isnan(s_eps) and (nA < band_lo or nA > band_hi):
                s_eps = t
            if nA == 0 and math.isnan(t_ext):
                t_ext = t
                fixed = na > 0
                if na > 0:
                    p_ab1_final = counts[2] / na
                status = STATUS_FIXED if na > 0 else STATUS_ABSORBED
                break
            if na == 0 and nA > 0:
                status = STATUS_LOSS
                break
            if events >= max_events:
                status = STATUS_TRUNCATED
                break

    return {
        "status": status,
        "t": t,
        "events": events,
        "n": tuple(counts),
        "fixed": fixed,
        "t_ext": t_ext,
        "t_eps": t_eps,
        "s_eps": s_eps,
        "p_ab1_final": p_ab1_final,
        "n_a_final": counts[2] + counts[3],
        "stats_eps": stats_eps,
        "stats_final": a_stats(),
        "tag_violations": tag_violations,
    }


def run_coupled(
    fA, fa, DA, Da, CAA, CAa, CaA, Caa,
    K,
    n0_A, n0_a,
    s_minus, s_plus,
    seed,
    max_events,
    eps_target,
    band_lo, band_hi,
):
    """Monotone coupling of (Z-, N_a, Z+) on one event stream.

    Z+/Z- are linear birth-death processes with per-capita birth f_a and
    deaths f_a(1-s_plus)/f_a(1-s_minus); N is the two-type competition
    process.  Thinning order nests births Z+ >= N_a >= Z- and deaths
    Z- >= N_a >= Z+, so zm <= na <= zp should hold at every event until
    the first of: N_a hits eps_target, N_A leaves the band, N_a dies out.
    """
    invK = 1.0 / K
    state = seed & MASK64
    t = 0.0
    events = 0
    zm = n0_a
    zp = n0_a
    na = n0_a
    nA = n0_A
    Dp = fa * (1.0 - s_plus)
    Dm = fa * (1.0 - s_minus)
    t_eps = math.nan
    s_eps = math.nan
    tp_eps = math.nan
    violations = 0
    rate_clamps = 0
    status = STATUS_TRUNCATED

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
            r0 = fa * zm
            r1 = fa * (na - zm)
            r2 = fa * (zp - na)
            r3 = Dp * zm
            r4 = dlowN * zm
            r5 = dhighN * zm
            r6 = Dp * (na - zm)
            r7 = dlowN * (na - zm)
            r8 = Dp * (zp - na)
            dpcA = DA + (CAA * nA + CAa * na) * invK
            r9 = fA * nA
            r10 = dpcA * nA
            total = r0 + r1 + r2 + r3 + r4 + r5 + r6 + r7 + r8 + r9 + r10
            if total <= 0.0:
                status = STATUS_ABSORBED
                break

            state, u1 = _next_u(state)
            t = t - math.log1p(-u1) / total

            state, u2 = _next_u(state)
            target = u2 * total
            rates = (r0, r1, r2, r3, r4, r5, r6, r7, r8, r9, r10)
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
            if math.isnan(tp_eps) and zp >= eps_target:
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
