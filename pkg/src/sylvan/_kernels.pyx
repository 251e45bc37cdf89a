# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled rank kernels; same algorithm and API as ``_kernels_py``."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free, calloc
from libc.string cimport memset
from math import gcd

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t sylvan_mulmod(uint64_t a, uint64_t b, uint64_t p) {
        return (uint64_t)(((unsigned __int128)a * b) % p);
    }
    """
    uint64_t sylvan_mulmod(uint64_t a, uint64_t b, uint64_t p) nogil


cdef uint64_t _powmod(uint64_t a, uint64_t e, uint64_t p) nogil:
    cdef uint64_t r = 1 % p
    while e:
        if e & 1:
            r = sylvan_mulmod(r, a, p)
        a = sylvan_mulmod(a, a, p)
        e >>= 1
    return r


def rank_mod_p(rows, Py_ssize_t ncols, p):
    """Rank of an integer matrix reduced mod the prime ``p`` (p < 2**63)."""
    cdef uint64_t P = p
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t limit = min(nrows, ncols)
    if limit == 0:
        return 0
    cdef uint64_t** piv = <uint64_t**>calloc(ncols, sizeof(uint64_t*))
    cdef Py_ssize_t* pend = <Py_ssize_t*>calloc(ncols, sizeof(Py_ssize_t))
    cdef uint64_t* work = <uint64_t*>malloc(ncols * sizeof(uint64_t))
    cdef Py_ssize_t rank = 0, r, k, lead, end, e2
    cdef uint64_t c, inv, negc
    cdef uint64_t* prow
    cdef bint small = P < (<uint64_t>1 << 31)
    if piv == NULL or pend == NULL or work == NULL:
        free(piv); free(pend); free(work)
        raise MemoryError()
    try:
        for r in range(nrows):
            if rank == limit:
                break
            row = rows[r]
            lead = -1
            end = 0
            for k in range(ncols):
                work[k] = <uint64_t>(row[k] % p)
                if work[k]:
                    if lead < 0:
                        lead = k
                    end = k + 1
            if lead < 0:
                continue
            while True:
                prow = piv[lead]
                if prow == NULL:
                    inv = _powmod(work[lead], P - 2, P)
                    prow = <uint64_t*>calloc(ncols, sizeof(uint64_t))
                    if prow == NULL:
                        raise MemoryError()
                    for k in range(lead, end):
                        prow[k] = sylvan_mulmod(work[k], inv, P)
                    piv[lead] = prow
                    pend[lead] = end
                    rank += 1
                    break
                c = work[lead]
                negc = P - c
                e2 = pend[lead]
                if small:
                    for k in range(lead + 1, e2):
                        work[k] = (work[k] + negc * prow[k]) % P
                else:
                    for k in range(lead + 1, e2):
                        work[k] = (work[k] + sylvan_mulmod(negc, prow[k], P)) % P
                work[lead] = 0
                if e2 > end:
                    end = e2
                k = lead + 1
                while k < end and work[k] == 0:
                    k += 1
                if k >= end:
                    break
                lead = k
                while work[end - 1] == 0:
                    end -= 1
    finally:
        for k in range(ncols):
            if piv[k] != NULL:
                free(piv[k])
        free(piv)
        free(pend)
        free(work)
    return rank


def rank_zz(rows, Py_ssize_t ncols):
    """Rank over Q of an integer matrix (fraction-free, primitive rows)."""
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t limit = min(nrows, ncols)
    cdef Py_ssize_t rank = 0, r, k, lo, hi, n, i, start, lp, lv
    cdef dict pivots = {}
    cdef list vals, new, piv
    for r in range(nrows):
        if rank == limit:
            break
        vals = list(rows[r])
        lo = 0
        hi = len(vals)
        while lo < hi and not vals[lo]:
            lo += 1
        if lo == hi:
            continue
        while not vals[hi - 1]:
            hi -= 1
        vals = vals[lo:hi]
        start = lo
        g = gcd(*vals)
        if g > 1:
            vals = [v // g for v in vals]
        while True:
            piv = pivots.get(start)
            if piv is None:
                pivots[start] = vals
                rank += 1
                break
            a = piv[0]
            b = vals[0]
            g = gcd(a, b)
            a = a // g
            b = b // g
            lv = len(vals)
            lp = len(piv)
            n = lv if lv > lp else lp
            new = [0] * n
            for k in range(1, lv):
                new[k] = a * vals[k]
            for k in range(1, lp):
                new[k] = new[k] - b * piv[k]
            i = 1
            while i < n and not new[i]:
                i += 1
            if i == n:
                break
            while not new[n - 1]:
                n -= 1
            vals = new[i:n]
            start += i
            g = gcd(*vals)
            if g > 1:
                vals = [v // g for v in vals]
    return rank
