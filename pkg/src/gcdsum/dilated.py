"""The dilated system f^s(kx), f^s(x) = sum_{j <= M} sin(2 pi j x) / j^s.

Inner products use <f, g> = 2 * integral_0^1 f g, the normalization in which
the sines sqrt(2) sin(2 pi j x) are orthonormal and <f^s_k, f^s_l> equals
zeta(2s) (k,l)^{2s} / (k^s l^s) in the limit M -> infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from gcdsum.errors import DomainError
from gcdsum.gcdform import GcdFormSpec, quadratic_form_direct
from gcdsum.zeta import zeta_reference

INNER_PRODUCT_WEIGHT = 2.0


@dataclass(frozen=True)
class DilatedFunction:
    s: float
    M: int

    def __post_init__(self) -> None:
        if not self.s > 0.5:
            raise DomainError(f"s must exceed 1/2, got {self.s}")
        if self.M < 1:
            raise DomainError(f"M must be at least 1, got {self.M}")

    def coefficients(self) -> np.ndarray:
        return np.arange(1, self.M + 1, dtype=float) ** (-self.s)


def eval_fs(fn: DilatedFunction, x: float | np.ndarray) -> float | np.ndarray:
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    a = fn.coefficients()
    out = np.zeros(xs.size)
    for lo in range(0, fn.M, 4096):
        j = np.arange(lo + 1, min(lo + 4096, fn.M) + 1, dtype=float)
        # reduce j*x mod 1 before the sine to keep the phase exact for large j
        out += (np.sin(2 * np.pi * np.mod(np.outer(xs, j), 1.0)) * a[lo : lo + j.size]).sum(axis=1)
    return float(out[0]) if np.ndim(x) == 0 else out


def sample_dilate(fn: DilatedFunction, k: int, points: int) -> np.ndarray:
    """f^s(k x_n) on x_n = n / points, by folding frequencies j k mod points into one FFT."""
    return sample_series(fn.coefficients(), k, points)


def sample_series(a: np.ndarray, k: int, points: int) -> np.ndarray:
    """sum_j a_j sin(2 pi j k x_n) on the grid x_n = n / points."""
    bins = np.zeros(points, dtype=complex)
    freq = (np.arange(1, a.size + 1, dtype=np.int64) * k) % points
    np.add.at(bins, freq, a)
    return (np.fft.ifft(bins) * points).imag


def _trapezoid(values: np.ndarray) -> float:
    # periodic integrand on [0, 1): trapezoid is the plain mean of the samples
    return INNER_PRODUCT_WEIGHT * float(np.mean(values))


@dataclass(frozen=True)
class GramCheck:
    quadrature: float
    truncated_exact: float
    closed_form: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def truncated_inner_product(s: float, k: int, l: int, M: int) -> float:
    """sum over i, j <= M with i k = j l of 1 / (i^s j^s)."""
    g = math.gcd(k, l)
    step_i = l // g
    i = np.arange(step_i, M + 1, step_i, dtype=np.int64)
    j = i * k // l
    keep = j <= M
    i, j = i[keep].astype(float), j[keep].astype(float)
    return math.fsum((i ** (-s)) * (j ** (-s)))


def closed_form_inner_product(s: float, k: int, l: int) -> float:
    g = math.gcd(k, l)
    return zeta_reference(2 * s, 0).real * (g / k) ** s * (g / l) ** s


def gram_inner_product_numeric(s: float, k: int, l: int, M: int, quadrature_points: int) -> GramCheck:
    fn = DilatedFunction(s, M)
    fk = sample_dilate(fn, k, quadrature_points)
    fl = sample_dilate(fn, l, quadrature_points)
    return GramCheck(
        quadrature=_trapezoid(fk * fl),
        truncated_exact=truncated_inner_product(s, k, l, M),
        closed_form=closed_form_inner_product(s, k, l),
    )


def norm_via_gram(K: Iterable[int], c: Mapping[int, float], s: float) -> float:
    if not s > 0.5:
        raise DomainError(f"s must exceed 1/2, got {s}")
    return quadratic_form_direct(GcdFormSpec(list(K), s, include_zeta_factor=True), c)


def norm_quadrature(K: Iterable[int], c: Mapping[int, float], s: float, M: int, points: int) -> float:
    """2 * integral of (sum_k c_k f^s(k x))^2 with the series cut at M."""
    fn = DilatedFunction(s, M)
    total = np.zeros(points)
    for k in K:
        if c.get(k, 0.0):
            total += c[k] * sample_dilate(fn, k, points)
    return _trapezoid(total * total)


def fourier_norm_quadrature(a: Mapping[int, float], K: Iterable[int], c: Mapping[int, float], points: int) -> float:
    """Quadrature counterpart of bounds.fourier_norm_sq for general sine coefficients."""
    M = max((m for m, v in a.items() if v), default=0)
    if M == 0:
        return 0.0
    av = np.array([a.get(m, 0.0) for m in range(1, M + 1)])
    total = np.zeros(points)
    for k in K:
        if c.get(k, 0.0):
            total += c[k] * sample_series(av, k, points)
    return _trapezoid(total * total)
