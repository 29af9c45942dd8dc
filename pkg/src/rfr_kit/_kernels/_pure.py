"""Pure-Python simulation kernels (fallback backend).

Same algorithms, constants and operation order as the compiled backend in
`_core.pyx`, so both produce bit-identical doubles on the same platform:

* PRNG: xoshiro256** seeded via splitmix64
* uniforms: 53-bit, strictly inside (0, 1)
* normals: inverse CDF (Acklam's rational approximation plus one Halley
  refinement step through erfc), good to ~1 ulp
* paths: zero-drift lognormal, one common shock and one per-venue shock
  per step, three normals consumed per step in (common, a, b) order
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"

_MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0  # 2^-53
_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Acklam inverse-normal coefficients
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425
_P_HIGH = 1.0 - _P_LOW


def norm_ppf(p: float) -> float:
    """Inverse standard normal CDF for p strictly inside (0, 1).

    The p >= 0.5 half is solved as the mirrored lower-half problem, so the
    Halley refinement always targets a small tail mass (1 - p is exact for
    p >= 0.5) and never loses digits to cancellation near p = 1.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be strictly inside (0, 1), got {p!r}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return _half_ppf(p)
    return -_half_ppf(1.0 - p)


def _half_ppf(q: float) -> float:
    """Quantile for tail mass 0 < q < 0.5; always negative."""
    if q < _P_LOW:
        t = math.sqrt(-2.0 * math.log(q))
        x = ((((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5])
             / ((((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0))
    else:
        s = q - 0.5
        r = s * s
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * s
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    # one Halley step; x <= 0 keeps the erfc argument non-negative, so the
    # CDF error e carries full relative precision
    e = 0.5 * math.erfc(-x / _SQRT2) - q
    u = e * _SQRT_2PI * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state


class Xoshiro256StarStar:
    """xoshiro256** with splitmix64 seeding; yields uniforms and normals."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        state = seed & _MASK64
        self._s0, state = _splitmix64(state)
        self._s1, state = _splitmix64(state)
        self._s2, state = _splitmix64(state)
        self._s3, state = _splitmix64(state)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        x = (s1 * 5) & _MASK64
        result = ((((x << 7) | (x >> 57)) & _MASK64) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def uniform(self) -> float:
        # (0, 1) strictly: offset the 53-bit integer by half a step
        return (float(self.next_u64() >> 11) + 0.5) * _INV_2_53

    def normal(self) -> float:
        return norm_ppf(self.uniform())


def normal_stream(seed: int, count: int) -> np.ndarray:
    """`count` standard normals for a seed, in draw order."""
    rng = Xoshiro256StarStar(seed)
    out = np.empty(count)
    for i in range(count):
        out[i] = rng.normal()
    return out


def simulate_paths(base_price: float, sigma_common: float, sigma_div: float,
                   n_steps: int, dt: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Two zero-drift lognormal venue paths sharing a common factor.

    Per step the log price of each venue moves by sigma_common*sqrt(dt)*z_c
    plus sigma_div*sqrt(dt)*z_venue with independent standard normals.
    """
    rng = Xoshiro256StarStar(seed)
    sc = sigma_common * math.sqrt(dt)
    sd = sigma_div * math.sqrt(dt)
    path_a = np.empty(n_steps + 1)
    path_b = np.empty(n_steps + 1)
    path_a[0] = base_price
    path_b[0] = base_price
    la = 0.0
    lb = 0.0
    for t in range(1, n_steps + 1):
        zc = rng.normal()
        za = rng.normal()
        zb = rng.normal()
        la = la + (sc * zc + sd * za)
        lb = lb + (sc * zc + sd * zb)
        path_a[t] = base_price * math.exp(la)
        path_b[t] = base_price * math.exp(lb)
    return path_a, path_b


def relative_gaps(path_a: np.ndarray, path_b: np.ndarray) -> np.ndarray:
    """|p_a - p_b| / min(p_a, p_b) at every index."""
    n = len(path_a)
    if len(path_b) != n:
        raise ValueError(f"path lengths differ: {n} vs {len(path_b)}")
    out = np.empty(n)
    for i in range(n):
        pa = float(path_a[i])
        pb = float(path_b[i])
        if pa <= pb:
            out[i] = (pb - pa) / pa
        else:
            out[i] = (pa - pb) / pb
    return out
