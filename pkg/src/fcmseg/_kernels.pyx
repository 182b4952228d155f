# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numeric kernels.

Function-for-function mirror of ``fcmseg._kernels_py``: the same IEEE-754
double expressions in the same evaluation order, so both backends produce
bit-identical results (the extension must be built without FP contraction
for this to hold; see setup.py). Range-based entry points release the GIL
so a thread pool gets real parallelism out of them.
"""

from libc.math cimport fabs, pow
from libc.stdlib cimport free, malloc

ctypedef unsigned long long u64

cdef u64 _GAMMA = 0x9E3779B97F4A7C15
cdef u64 _MIX1 = 0xBF58476D1CE4E5B9
cdef u64 _MIX2 = 0x94D049BB133111EB
cdef double _INV53 = 1.0 / 9007199254740992.0


cdef inline double _next_uniform(u64* state) noexcept nogil:
    # SplitMix64 draw mapped to (0, 1]
    cdef u64 z
    state[0] = state[0] + _GAMMA
    z = state[0]
    z = (z ^ (z >> 30)) * _MIX1
    z = (z ^ (z >> 27)) * _MIX2
    z = z ^ (z >> 31)
    return <double>((z >> 11) + 1) * _INV53


def splitmix64(object state):
    """Advance a SplitMix64 state; return (new_state, 64-bit output)."""
    cdef u64 s = <u64>(state & 0xFFFFFFFFFFFFFFFF)
    cdef u64 z
    s = s + _GAMMA
    z = s
    z = (z ^ (z >> 30)) * _MIX1
    z = (z ^ (z >> 27)) * _MIX2
    return s, z ^ (z >> 31)


def fill_membership_random(double[::1] u, Py_ssize_t n, Py_ssize_t c, u64 seed):
    """Fill the flat n*c membership buffer with seeded random rows."""
    cdef u64 state = seed
    cdef Py_ssize_t i, j, base
    cdef double total, partial, val, last
    cdef double* row = <double*>malloc(c * sizeof(double))
    if row == NULL:
        raise MemoryError()
    with nogil:
        for i in range(n):
            total = 0.0
            for j in range(c):
                val = _next_uniform(&state)
                row[j] = val
                total = total + val
            base = i * c
            partial = 0.0
            for j in range(c - 1):
                val = row[j] / total
                u[base + j] = val
                partial = partial + val
            last = 1.0 - partial
            if last < 0.0:
                last = 0.0
            u[base + c - 1] = last
    free(row)


def update_centers_linear(double[::1] x, double[::1] u, double[::1] v_out,
                          Py_ssize_t n, Py_ssize_t c, double m):
    """Weighted-mean center update, accumulated in pixel-index order."""
    cdef Py_ssize_t i, j
    cdef Py_ssize_t dead = -1
    cdef double num, den, w
    with nogil:
        for j in range(c):
            num = 0.0
            den = 0.0
            for i in range(n):
                w = pow(u[i * c + j], m)
                num = num + w * x[i]
                den = den + w
            if den == 0.0:
                dead = j
                break
            v_out[j] = num / den
    return dead


def update_membership_range(double[::1] x, double[::1] v, double[::1] u_out,
                            Py_ssize_t c, double m, Py_ssize_t i0, Py_ssize_t i1):
    """Membership update for pixels [i0, i1); each pixel is independent."""
    cdef double expo = 2.0 / (m - 1.0)
    cdef Py_ssize_t i, j, k, base, zero_count
    cdef double xi, dj, s, share
    with nogil:
        for i in range(i0, i1):
            xi = x[i]
            base = i * c
            zero_count = 0
            for k in range(c):
                if fabs(xi - v[k]) == 0.0:
                    zero_count = zero_count + 1
            if zero_count > 0:
                share = 1.0 / <double>zero_count
                for j in range(c):
                    if fabs(xi - v[j]) == 0.0:
                        u_out[base + j] = share
                    else:
                        u_out[base + j] = 0.0
            else:
                for j in range(c):
                    dj = fabs(xi - v[j])
                    s = 0.0
                    for k in range(c):
                        s = s + pow(dj / fabs(xi - v[k]), expo)
                    u_out[base + j] = 1.0 / s


def center_terms_range(double[::1] x, double[::1] u,
                       double[::1] num_out, double[::1] den_out,
                       Py_ssize_t c, Py_ssize_t j, double m,
                       Py_ssize_t i0, Py_ssize_t i1):
    """Per-pixel numerator/denominator terms of the center update."""
    cdef Py_ssize_t i
    cdef double w
    with nogil:
        for i in range(i0, i1):
            w = pow(u[i * c + j], m)
            num_out[i] = w * x[i]
            den_out[i] = w


def block_reduce_range(double[::1] a, double[::1] out, Py_ssize_t n,
                       Py_ssize_t block_size, Py_ssize_t b0, Py_ssize_t b1):
    """Tree-reduce blocks [b0, b1) of a into per-block partial sums."""
    cdef Py_ssize_t span = 2 * block_size
    cdef Py_ssize_t b, t, start, stride, gi
    cdef double* buf = <double*>malloc(span * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    with nogil:
        for b in range(b0, b1):
            start = b * span
            for t in range(block_size):
                gi = start + t
                if gi < n:
                    buf[t] = a[gi]
                else:
                    buf[t] = 0.0
                gi = start + t + block_size
                if gi < n:
                    buf[t + block_size] = a[gi]
                else:
                    buf[t + block_size] = 0.0
            stride = block_size
            while stride > 0:
                for t in range(stride):
                    buf[t] = buf[t] + buf[t + stride]
                stride = stride >> 1
            out[b] = buf[0]
    free(buf)


def linear_sum(double[::1] a, Py_ssize_t k):
    """Left-to-right sum of the first k elements (single-lane order)."""
    cdef Py_ssize_t i
    cdef double s = 0.0
    with nogil:
        for i in range(k):
            s = s + a[i]
    return s


def objective_linear(double[::1] x, double[::1] u, double[::1] v,
                     Py_ssize_t n, Py_ssize_t c, double m):
    """Weighted squared-distance objective, pixel-major accumulation."""
    cdef Py_ssize_t i, j, base
    cdef double s = 0.0
    cdef double xi, d
    with nogil:
        for i in range(n):
            xi = x[i]
            base = i * c
            for j in range(c):
                d = xi - v[j]
                s = s + pow(u[base + j], m) * (d * d)
    return s


def objective_terms_range(double[::1] x, double[::1] u, double[::1] v,
                          double[::1] out, Py_ssize_t c, double m,
                          Py_ssize_t i0, Py_ssize_t i1):
    """Per-pixel objective contributions for pixels [i0, i1)."""
    cdef Py_ssize_t i, j, base
    cdef double xi, d, acc
    with nogil:
        for i in range(i0, i1):
            xi = x[i]
            base = i * c
            acc = 0.0
            for j in range(c):
                d = xi - v[j]
                acc = acc + pow(u[base + j], m) * (d * d)
            out[i] = acc


def max_abs_diff(double[::1] a, double[::1] b, Py_ssize_t i0, Py_ssize_t i1):
    """Largest elementwise absolute difference over [i0, i1)."""
    cdef Py_ssize_t i
    cdef double d, best = 0.0
    with nogil:
        for i in range(i0, i1):
            d = fabs(a[i] - b[i])
            if d > best:
                best = d
    return best


def argmax_rows(double[::1] u, int[::1] labels_out, Py_ssize_t n, Py_ssize_t c):
    """Per-row argmax of the flat n*c matrix; ties keep the lowest index."""
    cdef Py_ssize_t i, j, base
    cdef double best, w
    cdef int bj
    with nogil:
        for i in range(n):
            base = i * c
            best = u[base]
            bj = 0
            for j in range(1, c):
                w = u[base + j]
                if w > best:
                    best = w
                    bj = <int>j
            labels_out[i] = bj
