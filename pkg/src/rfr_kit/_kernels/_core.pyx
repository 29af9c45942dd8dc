# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels.

Mirror of `_pure.py` operation for operation; compiled with
-ffp-contract=off so results stay bit-identical to the Python fallback.
"""

from libc.math cimport erfc, exp, log, sqrt
from libc.stdint cimport uint64_t

import numpy as np

BACKEND = "compiled"

cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef double SQRT2 = sqrt(2.0)
cdef double SQRT_2PI = sqrt(2.0 * 3.141592653589793)

cdef double A0 = -3.969683028665376e+01
cdef double A1 = 2.209460984245205e+02
cdef double A2 = -2.759285104469687e+02
cdef double A3 = 1.383577518672690e+02
cdef double A4 = -3.066479806614716e+01
cdef double A5 = 2.506628277459239e+00
cdef double B0 = -5.447609879822406e+01
cdef double B1 = 1.615858368580409e+02
cdef double B2 = -1.556989798598866e+02
cdef double B3 = 6.680131188771972e+01
cdef double B4 = -1.328068155288572e+01
cdef double C0 = -7.784894002430293e-03
cdef double C1 = -3.223964580411365e-01
cdef double C2 = -2.400758277161838e+00
cdef double C3 = -2.549732539343734e+00
cdef double C4 = 4.374664141464968e+00
cdef double C5 = 2.938163982698783e+00
cdef double D0 = 7.784695709041462e-03
cdef double D1 = 3.224671290700398e-01
cdef double D2 = 2.445134137142996e+00
cdef double D3 = 3.754408661907416e+00
cdef double P_LOW = 0.02425
cdef double P_HIGH = 1.0 - 0.02425


cdef inline double _half_ppf(double q) nogil:
    # quantile for tail mass 0 < q < 0.5; always negative
    cdef double t, s, r, x, e, u
    if q < P_LOW:
        t = sqrt(-2.0 * log(q))
        x = ((((((C0 * t + C1) * t + C2) * t + C3) * t + C4) * t + C5)
             / ((((D0 * t + D1) * t + D2) * t + D3) * t + 1.0))
    else:
        s = q - 0.5
        r = s * s
        x = ((((((A0 * r + A1) * r + A2) * r + A3) * r + A4) * r + A5) * s
             / (((((B0 * r + B1) * r + B2) * r + B3) * r + B4) * r + 1.0))
    # one Halley step; x <= 0 keeps the erfc argument non-negative, so the
    # CDF error e carries full relative precision
    e = 0.5 * erfc(-x / SQRT2) - q
    u = e * SQRT_2PI * exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


cdef inline double _norm_ppf(double p) nogil:
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return _half_ppf(p)
    return -_half_ppf(1.0 - p)


def norm_ppf(double p):
    """Inverse standard normal CDF for p strictly inside (0, 1).

    The p >= 0.5 half is solved as the mirrored lower-half problem, so the
    Halley refinement always targets a small tail mass (1 - p is exact for
    p >= 0.5) and never loses digits to cancellation near p = 1.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be strictly inside (0, 1), got {p!r}")
    return _norm_ppf(p)


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef struct XoshiroState:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3


cdef inline uint64_t _splitmix64(uint64_t* state) nogil:
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline void _seed_state(XoshiroState* st, uint64_t seed) nogil:
    cdef uint64_t sm = seed
    st.s0 = _splitmix64(&sm)
    st.s1 = _splitmix64(&sm)
    st.s2 = _splitmix64(&sm)
    st.s3 = _splitmix64(&sm)


cdef inline uint64_t _next_u64(XoshiroState* st) nogil:
    cdef uint64_t result = _rotl(st.s1 * <uint64_t>5, 7) * <uint64_t>9
    cdef uint64_t t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = _rotl(st.s3, 45)
    return result


cdef inline double _uniform(XoshiroState* st) nogil:
    return (<double>(_next_u64(st) >> 11) + 0.5) * INV_2_53


cdef inline double _normal(XoshiroState* st) nogil:
    return _norm_ppf(_uniform(st))


def normal_stream(seed, Py_ssize_t count):
    """`count` standard normals for a seed, in draw order."""
    cdef XoshiroState st
    _seed_state(&st, <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    out = np.empty(count)
    cdef double[::1] view = out
    cdef Py_ssize_t i
    for i in range(count):
        view[i] = _normal(&st)
    return out


def simulate_paths(double base_price, double sigma_common, double sigma_div,
                   Py_ssize_t n_steps, double dt, seed):
    """Two zero-drift lognormal venue paths sharing a common factor."""
    cdef XoshiroState st
    _seed_state(&st, <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    cdef double sc = sigma_common * sqrt(dt)
    cdef double sd = sigma_div * sqrt(dt)
    path_a = np.empty(n_steps + 1)
    path_b = np.empty(n_steps + 1)
    cdef double[::1] va = path_a
    cdef double[::1] vb = path_b
    va[0] = base_price
    vb[0] = base_price
    cdef double la = 0.0
    cdef double lb = 0.0
    cdef double zc, za, zb
    cdef Py_ssize_t t
    for t in range(1, n_steps + 1):
        zc = _normal(&st)
        za = _normal(&st)
        zb = _normal(&st)
        la = la + (sc * zc + sd * za)
        lb = lb + (sc * zc + sd * zb)
        va[t] = base_price * exp(la)
        vb[t] = base_price * exp(lb)
    return path_a, path_b


def relative_gaps(path_a, path_b):
    """|p_a - p_b| / min(p_a, p_b) at every index."""
    a = np.ascontiguousarray(path_a, dtype=np.float64)
    b = np.ascontiguousarray(path_b, dtype=np.float64)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"path lengths differ: {a.shape[0]} vs {b.shape[0]}")
    cdef double[::1] va = a
    cdef double[::1] vb = b
    cdef Py_ssize_t n = va.shape[0]
    out = np.empty(n)
    cdef double[::1] vo = out
    cdef Py_ssize_t i
    cdef double pa, pb
    for i in range(n):
        pa = va[i]
        pb = vb[i]
        if pa <= pb:
            vo[i] = (pb - pa) / pa
        else:
            vo[i] = (pa - pb) / pb
    return out
