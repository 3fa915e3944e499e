# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled twin of fimlab._rref_py.rref_int.

Entries stay arbitrary-precision Python integers; the win over the pure
kernel is typed loop indices and the removal of interpreter dispatch in the
inner elimination loop.  Output must be bit-identical to the pure kernel.
"""

from math import gcd


cdef inline object _row_content(list row, Py_ssize_t ncols):
    cdef Py_ssize_t j
    cdef object g = 0
    cdef object x
    for j in range(ncols):
        x = row[j]
        if x:
            g = gcd(g, x)
            if g == 1:
                return g
    return g


def rref_int(rows, Py_ssize_t ncols):
    cdef list work = [list(row_in) for row_in in rows]
    cdef Py_ssize_t m = len(work)
    cdef list pivots = []
    cdef Py_ssize_t r = 0, c, i, j, pr, idx
    cdef list prow, irow, row
    cdef object p, q, g
    for c in range(ncols):
        pr = -1
        for i in range(r, m):
            if (<list>work[i])[c]:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            work[r], work[pr] = work[pr], work[r]
        prow = <list>work[r]
        p = prow[c]
        for i in range(m):
            if i == r:
                continue
            irow = <list>work[i]
            q = irow[c]
            if not q:
                continue
            for j in range(ncols):
                irow[j] = p * irow[j] - q * prow[j]
            g = _row_content(irow, ncols)
            if g > 1:
                for j in range(ncols):
                    irow[j] = irow[j] // g
        pivots.append(c)
        r += 1
    cdef list denoms = []
    cdef Py_ssize_t npiv = len(pivots)
    for idx in range(m):
        row = <list>work[idx]
        if idx < npiv:
            g = _row_content(row, ncols)
            if g > 1:
                for j in range(ncols):
                    row[j] = row[j] // g
            p = row[<Py_ssize_t>pivots[idx]]
            if p < 0:
                for j in range(ncols):
                    row[j] = -row[j]
                p = -p
            denoms.append(p)
        else:
            denoms.append(1)
    return pivots, work, denoms
