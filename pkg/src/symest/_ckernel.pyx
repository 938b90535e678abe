# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled state-set kernels for machines with at most 64 states.

Same signatures and semantics as ``symest._pykernel``; tables are
``array('Q')`` buffers.
"""

from libc.stdlib cimport free, malloc

ctypedef unsigned long long u64


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline u64 _image(const u64[::1] succ, Py_ssize_t base, u64 mask) noexcept nogil:
    cdef u64 out = 0
    while mask:
        out |= succ[base + __builtin_ctzll(mask)]
        mask &= mask - 1
    return out


def image(const u64[::1] succ, Py_ssize_t n, Py_ssize_t sym, u64 mask):
    return _image(succ, sym * n, mask)


def image_many(const u64[::1] succ, Py_ssize_t n, syms, u64 mask):
    cdef u64 out = 0
    cdef Py_ssize_t sym
    for sym in syms:
        out |= _image(succ, sym * n, mask)
    return out


def step(const u64[::1] succ, const u64[::1] chi, Py_ssize_t n, Py_ssize_t sym, u64 prior):
    cdef u64 c = prior & chi[sym]
    return c, _image(succ, sym * n, c)


def run(const u64[::1] succ, const u64[::1] chi, Py_ssize_t n, syms, u64 prior):
    cdef u64 c = prior
    cdef u64 r = prior
    cdef Py_ssize_t sym
    for sym in syms:
        c = r & chi[sym]
        r = _image(succ, sym * n, c)
    return c, r


def run_steps(const u64[::1] succ, const u64[::1] chi, Py_ssize_t n, syms, u64 prior):
    cdef u64 c
    cdef u64 r = prior
    cdef Py_ssize_t sym
    chis = []
    rhos = []
    for sym in syms:
        c = r & chi[sym]
        r = _image(succ, sym * n, c)
        chis.append(c)
        rhos.append(r)
    return chis, rhos


def compare_exhaustive(const u64[::1] succ, const u64[::1] chi, Py_ssize_t n, Py_ssize_t n_sym,
                       const u64[::1] ksucc, const u64[::1] kchi,
                       const long long[::1] ksucc_off, const long long[::1] kchi_off,
                       const long long[::1] symmap, Py_ssize_t p, Py_ssize_t max_len, u64 prior):
    cdef u64 *rho = <u64 *> malloc((max_len + 1) * sizeof(u64))
    cdef u64 *rk = <u64 *> malloc((max_len + 1) * p * sizeof(u64))
    cdef long long *sym = <long long *> malloc((max_len + 1) * sizeof(long long))
    cdef Py_ssize_t depth = 0, k, nxt
    cdef long long s, sk
    cdef u64 c, r, ci, ri, ck, out
    cdef long long checks = 0
    cdef bint found = False
    if rho == NULL or rk == NULL or sym == NULL:
        free(rho); free(rk); free(sym)
        raise MemoryError()
    try:
        rho[0] = prior
        for k in range(p):
            rk[k] = prior
        sym[0] = -1
        with nogil:
            while depth >= 0:
                sym[depth] += 1
                s = sym[depth]
                if s == n_sym:
                    depth -= 1
                    continue
                c = rho[depth] & chi[s]
                if c == 0:
                    continue
                r = _image(succ, s * n, c)
                ci = ~(<u64> 0)
                ri = ~(<u64> 0)
                nxt = (depth + 1) * p
                for k in range(p):
                    sk = symmap[k * n_sym + s]
                    ck = rk[depth * p + k] & kchi[kchi_off[k] + sk]
                    out = _image(ksucc, ksucc_off[k] + sk * n, ck)
                    ci &= ck
                    ri &= out
                    rk[nxt + k] = out
                checks += 1
                if ci != c or ri != r:
                    found = True
                    break
                if depth + 1 < max_len:
                    depth += 1
                    rho[depth] = r
                    sym[depth] = -1
        if found:
            return checks, [sym[i] for i in range(depth + 1)]
        return checks, None
    finally:
        free(rho)
        free(rk)
        free(sym)
