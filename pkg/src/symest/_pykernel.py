"""Pure-Python state-set kernels over integer bitmasks.

Tables are flat: ``succ[sym * n + state]`` is the bitmask of successors of
``state`` under ``sym``; ``chi[sym]`` is the bitmask of states with an
outgoing ``sym`` transition.  ``_ckernel.pyx`` mirrors this module
function for function.
"""


def image(succ, n, sym, mask):
    out = 0
    base = sym * n
    while mask:
        low = mask & -mask
        out |= succ[base + low.bit_length() - 1]
        mask ^= low
    return out


def image_many(succ, n, syms, mask):
    out = 0
    for sym in syms:
        out |= image(succ, n, sym, mask)
    return out


def step(succ, chi, n, sym, prior):
    c = prior & chi[sym]
    return c, image(succ, n, sym, c)


def run(succ, chi, n, syms, prior):
    c = prior
    r = prior
    for sym in syms:
        c = r & chi[sym]
        r = image(succ, n, sym, c) if c else 0
    return c, r


def run_steps(succ, chi, n, syms, prior):
    chis = []
    rhos = []
    r = prior
    for sym in syms:
        c = r & chi[sym]
        r = image(succ, n, sym, c) if c else 0
        chis.append(c)
        rhos.append(r)
    return chis, rhos


def compare_exhaustive(succ, chi, n, n_sym, ksucc, kchi, ksucc_off, kchi_off, symmap, p, max_len, prior):
    """Depth-first walk over every string of length <= max_len that the base
    machine accepts from ``prior``; at each node compare the base
    (estimate, prediction) with the intersection over the ``p`` relabelled
    machines, each advanced on its own.

    Returns ``(checks, None)`` or ``(checks, [sym, ...])`` for the first
    string where the two disagree.
    """
    rho = [0] * (max_len + 1)
    rk = [0] * ((max_len + 1) * p)
    sym = [-1] * (max_len + 1)
    rho[0] = prior
    for k in range(p):
        rk[k] = prior
    checks = 0
    depth = 0
    while depth >= 0:
        sym[depth] += 1
        s = sym[depth]
        if s == n_sym:
            depth -= 1
            continue
        c = rho[depth] & chi[s]
        if not c:
            continue
        r = image(succ, n, s, c)
        ci = -1
        ri = -1
        nxt = (depth + 1) * p
        for k in range(p):
            sk = symmap[k * n_sym + s]
            ck = rk[depth * p + k] & kchi[kchi_off[k] + sk]
            base = ksucc_off[k] + sk * n
            out = 0
            mask = ck
            while mask:
                low = mask & -mask
                out |= ksucc[base + low.bit_length() - 1]
                mask ^= low
            ci &= ck
            ri &= out
            rk[nxt + k] = out
        checks += 1
        if ci != c or ri != r:
            return checks, sym[: depth + 1]
        if depth + 1 < max_len:
            depth += 1
            rho[depth] = r
            sym[depth] = -1
    return checks, None
