"""
Compiled SSA and tau-leaping kernels

Channel ``j`` addresses species ``s``, compartment ``c`` and reaction ``r`` as
``j = (s * C + c) * N_REACTIONS + r``. All state lives in int64 arrays that the
kernels update in place:

    npf[S, C]    free nanoparticles
    cpx[S, C]    receptor-bound complexes
    npi[S, C]    internalised nanoparticles
    rec[C]       free receptors
    alive[C]     1 for a living cell, 0 otherwise
    injected[S]  particles released so far (including the initial bolus)
"""

import numpy as np
from numba import njit

N_REACTIONS = 6
RELEASE = 0
HOP_LEFT = 1
HOP_RIGHT = 2
BIND = 3
UNBIND = 4
INTERNALIZE = 5

# rate table columns
HOP = 0
KBIND = 1
KUNBIND = 2
KINTERNAL = 3

CRITICAL_POPULATION = 10
SSA_FALLBACK_FACTOR = 10.0
SSA_FALLBACK_STEPS = 100
RESUM_INTERVAL = 4096
_UNLIMITED = np.iinfo(np.int64).max


@njit(cache=True)
def _refresh(a, s, c, releasing, npf, cpx, rec, alive, release_rate, rates):
    n_comp = npf.shape[1]
    base = (s * n_comp + c) * N_REACTIONS
    a[base + RELEASE] = release_rate[s, c] if releasing else 0.0
    free = npf[s, c]
    a[base + HOP_LEFT] = rates[s, HOP] * free if c > 0 else 0.0
    a[base + HOP_RIGHT] = rates[s, HOP] * free if c < n_comp - 1 else 0.0
    if alive[c] == 1:
        a[base + BIND] = rates[s, KBIND] * free * rec[c]
        a[base + UNBIND] = rates[s, KUNBIND] * cpx[s, c]
        a[base + INTERNALIZE] = rates[s, KINTERNAL] * cpx[s, c]
    else:
        a[base + BIND] = 0.0
        a[base + UNBIND] = 0.0
        a[base + INTERNALIZE] = 0.0


@njit(cache=True)
def _refresh_all(a, releasing, npf, cpx, rec, alive, release_rate, rates):
    n_species, n_comp = npf.shape
    for s in range(n_species):
        for c in range(n_comp):
            _refresh(a, s, c, releasing, npf, cpx, rec, alive, release_rate, rates)


@njit(cache=True)
def _check_death(c, t, npi, rec, alive, lethal_species, thresholds, death_time):
    if alive[c] != 1:
        return False
    s = lethal_species[c]
    if s < 0 or npi[s, c] < thresholds[s]:
        return False
    alive[c] = 0
    rec[c] = 0
    death_time[c] = t
    return True


@njit(cache=True)
def _record(k, t_upto, sample_times, samples, alive_out, npf, cpx, npi, rec, alive):
    """Store the current state for every pending sample time before ``t_upto``"""
    n_species, n_comp = npf.shape
    while k < sample_times.shape[0] and sample_times[k] < t_upto:
        for s in range(n_species):
            for c in range(n_comp):
                samples[k, s, c, 0] = npf[s, c]
                samples[k, s, c, 1] = rec[c]
                samples[k, s, c, 2] = cpx[s, c]
                samples[k, s, c, 3] = npi[s, c]
        for c in range(n_comp):
            alive_out[k, c] = alive[c]
        k += 1
    return k


@njit(cache=True)
def _fire(j, npf, cpx, npi, rec, injected):
    n_comp = npf.shape[1]
    block = j // N_REACTIONS
    r = j - block * N_REACTIONS
    s = block // n_comp
    c = block - s * n_comp
    if r == RELEASE:
        npf[s, c] += 1
        injected[s] += 1
    elif r == HOP_LEFT:
        npf[s, c] -= 1
        npf[s, c - 1] += 1
    elif r == HOP_RIGHT:
        npf[s, c] -= 1
        npf[s, c + 1] += 1
    elif r == BIND:
        npf[s, c] -= 1
        rec[c] -= 1
        cpx[s, c] += 1
    elif r == UNBIND:
        cpx[s, c] -= 1
        npf[s, c] += 1
        rec[c] += 1
    else:
        cpx[s, c] -= 1
        npi[s, c] += 1
        rec[c] += 1


@njit(cache=True)
def _ssa_advance(
    t, t_stop, max_events, releasing, a,
    npf, cpx, npi, rec, alive, injected, death_time,
    release_rate, rates, lethal_species, thresholds,
    sample_times, samples, alive_out, k,
):
    """Exact Gillespie steps until ``t_stop`` or ``max_events`` reactions"""
    n_species, n_comp = npf.shape
    n = a.shape[0]
    total = 0.0
    for i in range(n):
        total += a[i]

    events = 0
    while events < max_events:
        if events % RESUM_INTERVAL == 0:
            total = 0.0
            for i in range(n):
                total += a[i]
        if total <= 0.0:
            k = _record(k, t_stop, sample_times, samples, alive_out, npf, cpx, npi, rec, alive)
            return t_stop, k
        t_next = t - np.log(1.0 - np.random.random()) / total
        if t_next >= t_stop:
            k = _record(k, t_stop, sample_times, samples, alive_out, npf, cpx, npi, rec, alive)
            return t_stop, k
        k = _record(k, t_next, sample_times, samples, alive_out, npf, cpx, npi, rec, alive)
        t = t_next

        target = np.random.random() * total
        acc = 0.0
        j = -1
        for i in range(n):
            acc += a[i]
            if a[i] > 0.0:
                j = i
                if target < acc:
                    break
        if j < 0:
            total = 0.0
            continue

        _fire(j, npf, cpx, npi, rec, injected)
        block = j // N_REACTIONS
        r = j - block * N_REACTIONS
        s = block // n_comp
        c = block - s * n_comp

        before = 0.0
        for q in range(n_species):
            for rr in range(N_REACTIONS):
                before += a[(q * n_comp + c) * N_REACTIONS + rr]
        if r == INTERNALIZE:
            _check_death(c, t, npi, rec, alive, lethal_species, thresholds, death_time)
        after = 0.0
        for q in range(n_species):
            _refresh(a, q, c, releasing, npf, cpx, rec, alive, release_rate, rates)
            for rr in range(N_REACTIONS):
                after += a[(q * n_comp + c) * N_REACTIONS + rr]
        total += after - before

        if r == HOP_LEFT or r == HOP_RIGHT:
            target_c = c - 1 if r == HOP_LEFT else c + 1
            base = (s * n_comp + target_c) * N_REACTIONS
            before = 0.0
            for rr in range(N_REACTIONS):
                before += a[base + rr]
            _refresh(a, s, target_c, releasing, npf, cpx, rec, alive, release_rate, rates)
            after = 0.0
            for rr in range(N_REACTIONS):
                after += a[base + rr]
            total += after - before
        events += 1
    return t, k


@njit(cache=True)
def _bound(x, order, epsilon, mu, sigma):
    limit = max(epsilon * x / order, 1.0)
    tau = np.inf
    if mu != 0.0:
        tau = limit / abs(mu)
    if sigma > 0.0:
        tau = min(tau, limit * limit / sigma)
    return tau


@njit(cache=True)
def _tau_advance(
    t, t_stop, epsilon, releasing, a,
    npf, cpx, npi, rec, alive, injected, death_time,
    release_rate, rates, lethal_species, thresholds,
    sample_times, samples, alive_out, k,
):
    """Cao-Gillespie-Petzold leaps with critical channels fired singly"""
    n_species, n_comp = npf.shape
    n = a.shape[0]
    critical = np.zeros(n, dtype=np.bool_)
    mu_f = np.zeros((n_species, n_comp))
    sg_f = np.zeros((n_species, n_comp))
    mu_c = np.zeros((n_species, n_comp))
    sg_c = np.zeros((n_species, n_comp))
    mu_r = np.zeros(n_comp)
    sg_r = np.zeros(n_comp)
    d_npf = np.zeros((n_species, n_comp), dtype=np.int64)
    d_cpx = np.zeros((n_species, n_comp), dtype=np.int64)
    d_npi = np.zeros((n_species, n_comp), dtype=np.int64)
    d_rec = np.zeros(n_comp, dtype=np.int64)
    d_inj = np.zeros(n_species, dtype=np.int64)

    while t < t_stop:
        total = 0.0
        for i in range(n):
            total += a[i]
        if total <= 0.0:
            k = _record(k, t_stop, sample_times, samples, alive_out, npf, cpx, npi, rec, alive)
            return t_stop, k

        mu_f[:] = 0.0
        sg_f[:] = 0.0
        mu_c[:] = 0.0
        sg_c[:] = 0.0
        mu_r[:] = 0.0
        sg_r[:] = 0.0
        critical_total = 0.0
        any_noncritical = False
        for j in range(n):
            critical[j] = False
            aj = a[j]
            if aj <= 0.0:
                continue
            block = j // N_REACTIONS
            r = j - block * N_REACTIONS
            s = block // n_comp
            c = block - s * n_comp
            if r == RELEASE:
                reach = _UNLIMITED
            elif r == HOP_LEFT or r == HOP_RIGHT:
                reach = npf[s, c]
            elif r == BIND:
                reach = min(npf[s, c], rec[c])
            else:
                reach = cpx[s, c]
            if reach < CRITICAL_POPULATION:
                critical[j] = True
                critical_total += aj
                continue
            any_noncritical = True
            if r == RELEASE:
                mu_f[s, c] += aj
                sg_f[s, c] += aj
            elif r == HOP_LEFT or r == HOP_RIGHT:
                dest = c - 1 if r == HOP_LEFT else c + 1
                mu_f[s, c] -= aj
                sg_f[s, c] += aj
                mu_f[s, dest] += aj
                sg_f[s, dest] += aj
            elif r == BIND:
                mu_f[s, c] -= aj
                sg_f[s, c] += aj
                mu_r[c] -= aj
                sg_r[c] += aj
                mu_c[s, c] += aj
                sg_c[s, c] += aj
            elif r == UNBIND:
                mu_f[s, c] += aj
                sg_f[s, c] += aj
                mu_r[c] += aj
                sg_r[c] += aj
                mu_c[s, c] -= aj
                sg_c[s, c] += aj
            else:
                mu_c[s, c] -= aj
                sg_c[s, c] += aj
                mu_r[c] += aj
                sg_r[c] += aj

        tau1 = np.inf
        if any_noncritical:
            for s in range(n_species):
                for c in range(n_comp):
                    tau1 = min(tau1, _bound(npf[s, c], 2.0, epsilon, mu_f[s, c], sg_f[s, c]))
                    tau1 = min(tau1, _bound(cpx[s, c], 1.0, epsilon, mu_c[s, c], sg_c[s, c]))
            for c in range(n_comp):
                tau1 = min(tau1, _bound(rec[c], 2.0, epsilon, mu_r[c], sg_r[c]))

        # expected leap length, including the wait for the next critical firing
        leap = tau1
        if critical_total > 0.0:
            leap = min(leap, 1.0 / critical_total)
        if leap < SSA_FALLBACK_FACTOR / total:
            # at least one exact event per channel before the next rescan
            t, k = _ssa_advance(
                t, t_stop, max(SSA_FALLBACK_STEPS, n), releasing, a,
                npf, cpx, npi, rec, alive, injected, death_time,
                release_rate, rates, lethal_species, thresholds,
                sample_times, samples, alive_out, k,
            )
            continue

        while True:
            if critical_total > 0.0:
                tau2 = -np.log(1.0 - np.random.random()) / critical_total
            else:
                tau2 = np.inf
            remaining = t_stop - t
            fire_critical = False
            if tau1 >= remaining and tau2 >= remaining:
                tau = remaining
            elif tau1 < tau2:
                tau = tau1
            else:
                tau = tau2
                fire_critical = True

            d_npf[:] = 0
            d_cpx[:] = 0
            d_npi[:] = 0
            d_rec[:] = 0
            d_inj[:] = 0
            for j in range(n):
                if a[j] <= 0.0 or critical[j]:
                    continue
                count = np.random.poisson(a[j] * tau)
                if count > 0:
                    _apply(j, count, d_npf, d_cpx, d_npi, d_rec, d_inj)
            if fire_critical:
                target = np.random.random() * critical_total
                acc = 0.0
                chosen = -1
                for j in range(n):
                    if critical[j]:
                        acc += a[j]
                        chosen = j
                        if target < acc:
                            break
                if chosen >= 0:
                    _apply(chosen, 1, d_npf, d_cpx, d_npi, d_rec, d_inj)

            feasible = True
            for s in range(n_species):
                for c in range(n_comp):
                    if npf[s, c] + d_npf[s, c] < 0 or cpx[s, c] + d_cpx[s, c] < 0:
                        feasible = False
            for c in range(n_comp):
                if rec[c] + d_rec[c] < 0:
                    feasible = False
            if feasible:
                break
            tau1 = min(tau1, remaining) / 2.0

        k = _record(k, t + tau, sample_times, samples, alive_out, npf, cpx, npi, rec, alive)
        npf += d_npf
        cpx += d_cpx
        npi += d_npi
        rec += d_rec
        injected += d_inj
        t = t_stop if tau >= t_stop - t else t + tau
        for c in range(n_comp):
            _check_death(c, t, npi, rec, alive, lethal_species, thresholds, death_time)
        _refresh_all(a, releasing, npf, cpx, rec, alive, release_rate, rates)
    return t, k


@njit(cache=True)
def _apply(j, count, d_npf, d_cpx, d_npi, d_rec, d_inj):
    n_comp = d_npf.shape[1]
    block = j // N_REACTIONS
    r = j - block * N_REACTIONS
    s = block // n_comp
    c = block - s * n_comp
    if r == RELEASE:
        d_npf[s, c] += count
        d_inj[s] += count
    elif r == HOP_LEFT:
        d_npf[s, c] -= count
        d_npf[s, c - 1] += count
    elif r == HOP_RIGHT:
        d_npf[s, c] -= count
        d_npf[s, c + 1] += count
    elif r == BIND:
        d_npf[s, c] -= count
        d_rec[c] -= count
        d_cpx[s, c] += count
    elif r == UNBIND:
        d_cpx[s, c] -= count
        d_npf[s, c] += count
        d_rec[c] += count
    else:
        d_cpx[s, c] -= count
        d_npi[s, c] += count
        d_rec[c] += count


@njit(cache=True)
def run_kernel(
    method, seed, epsilon, t_end, release_end,
    npf, cpx, npi, rec, alive, injected, death_time,
    release_rate, rates, lethal_species, thresholds,
    sample_times, samples, alive_out,
):
    """
    Integrate the network from t=0 to ``t_end``; ``method`` 0 is exact SSA and
    1 is tau-leaping. Release stops at ``release_end``. Returns the final clock.
    """
    np.random.seed(seed)
    n_species, n_comp = npf.shape
    a = np.zeros(n_species * n_comp * N_REACTIONS)
    releasing = release_end > 0.0
    _refresh_all(a, releasing, npf, cpx, rec, alive, release_rate, rates)
    t = 0.0
    k = 0
    while t < t_end:
        segment_end = t_end
        if releasing and release_end < t_end:
            segment_end = release_end
        if method == 0:
            t, k = _ssa_advance(
                t, segment_end, _UNLIMITED, releasing, a,
                npf, cpx, npi, rec, alive, injected, death_time,
                release_rate, rates, lethal_species, thresholds,
                sample_times, samples, alive_out, k,
            )
        else:
            t, k = _tau_advance(
                t, segment_end, epsilon, releasing, a,
                npf, cpx, npi, rec, alive, injected, death_time,
                release_rate, rates, lethal_species, thresholds,
                sample_times, samples, alive_out, k,
            )
        if t >= segment_end:
            t = segment_end
            if releasing and segment_end == release_end and release_end < t_end:
                releasing = False
                _refresh_all(a, releasing, npf, cpx, rec, alive, release_rate, rates)
    # sample times never exceed t_end
    _record(k, np.inf, sample_times, samples, alive_out, npf, cpx, npi, rec, alive)
    return t
