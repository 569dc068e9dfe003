"""Closed-form upper bounds for GCD forms and dilated-function norms.

Every evaluator returns a BoundReport that pairs the bound with a brute-force
oracle value, so `satisfied` is a machine check rather than a restatement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from gcdsum.arith import (
    divisor_count,
    divisor_count_square,
    divisor_sigma,
    divisors,
    euler_phi,
    hooley_delta,
    loglog,
    theta_sqfree,
)
from gcdsum.errors import DomainError, HypothesisError, SizeError
from gcdsum.fcset import IndexSet, as_index_set, f_prime, fc_closure, kstar
from gcdsum.gcdform import GcdFormSpec, gcd_kernel, quadratic_form_direct
from gcdsum.zeta import zeta_reference

BOUND_TOL = 1e-9
EIGEN_CAP = 512
CSV_SCHEMA = "bound-report/1"

Psi = Callable[[int], float]


def _zeta(x: float) -> float:
    return zeta_reference(x, 0).real


@dataclass(frozen=True)
class BoundReport:
    name: str
    params: dict
    bound_value: float
    exact_value: float
    ratio: float
    satisfied: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "bound_value": self.bound_value,
            "exact_value": self.exact_value,
            "ratio": self.ratio,
            "satisfied": self.satisfied,
            "details": self.details,
        }

    CSV_HEADER = ("schema", "name", "params", "bound", "exact", "ratio", "satisfied")

    def csv_row(self) -> list:
        flat = ";".join(f"{k}={_flat(v)}" for k, v in sorted(self.params.items()))
        return [CSV_SCHEMA, self.name, flat, self.bound_value, self.exact_value, self.ratio, self.satisfied]


def _flat(v) -> str:
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return str(v)


def _report(name: str, params: dict, bound: float, exact: float, tol: float = BOUND_TOL, **details) -> BoundReport:
    ratio = exact / bound if bound else (0.0 if exact == 0 else math.inf)
    ok = exact <= bound + tol * abs(bound)
    return BoundReport(name, params, float(bound), float(exact), float(ratio), bool(ok), details)


def _prep(K, c: Mapping[int, float]) -> tuple[IndexSet, dict[int, float]]:
    K = as_index_set(K)
    outside = [k for k, v in c.items() if v != 0 and k not in K]
    if outside:
        raise DomainError(f"coefficients supported outside K: {sorted(outside)[:5]}")
    return K, {k: float(c.get(k, 0.0)) for k in K}


def _form(K: IndexSet, c: dict[int, float], s: float) -> float:
    return quadratic_form_direct(GcdFormSpec(K, s), c)


# general f with Fourier coefficients a


def A_coeff(a: Mapping[int, float], k: int) -> float:
    """A_k = sum_nu a_{nu k}^2."""
    return math.fsum(v * v for m, v in a.items() if m % k == 0)


def fourier_norm_sq(a: Mapping[int, float], K, c: Mapping[int, float]) -> float:
    """Exact ||sum c_k f(kx)||^2 for f with finitely many sine coefficients a_m (unit-norm basis)."""
    K, c = _prep(K, c)
    M = max((m for m, v in a.items() if v != 0), default=0)
    total = 0.0
    for k in K:
        for l in K:
            if not (c[k] and c[l]):
                continue
            g = math.gcd(k, l)
            kp, lp = k // g, l // g
            inner = math.fsum(a.get(nu * kp, 0.0) * a.get(nu * lp, 0.0) for nu in range(1, M // max(kp, lp) + 1))
            total += c[k] * c[l] * inner
    return total


def bound_theorem_c1(a: Mapping[int, float], K, c: Mapping[int, float]) -> BoundReport:
    K, c = _prep(K, c)
    first = math.fsum(v * v * divisor_count(m) for m, v in a.items() if v)
    second = math.fsum(c[k] ** 2 * divisor_count_square(k) for k in K)
    exact = fourier_norm_sq(a, K, c)
    return _report("c1", {"K": K.to_list()}, first * second, exact, a_weighted=first, c_weighted=second)


def bound_theorem_t1(a: Mapping[int, float], K, c: Mapping[int, float], psi: Psi, psi_name: str = "custom") -> BoundReport:
    K, c = _prep(K, c)
    F = fc_closure(K)
    quotients = {k // d for d in F for k in K if k % d == 0}
    psi_vals = {q: float(psi(q)) for q in quotients | set(F)}
    bad = [q for q, v in psi_vals.items() if not v > 0]
    if bad:
        raise DomainError(f"psi must be positive; psi({bad[0]}) = {psi_vals[bad[0]]}")
    A = {q: A_coeff(a, q) for q in quotients}
    B, d_star = -math.inf, 1
    for d in F:
        val = math.fsum(A[k // d] * theta_sqfree(k // d) / psi_vals[k // d] for k in K if k % d == 0)
        if val > B:
            B, d_star = val, d
    conv = {k: math.fsum(psi_vals[d] for d in divisors(k)) for k in K}
    weight = math.fsum(c[k] ** 2 * conv[k] for k in K)
    exact = fourier_norm_sq(a, K, c)
    a_d = math.fsum(v * v * divisor_count(m) for m, v in a.items() if v)
    return _report("t1", {"K": K.to_list(), "psi": psi_name}, B * weight, exact, B=B, argmax_d=d_star, sum_a2_d=a_d)


# p1 family


def sigma_bar(s: float, upto: int) -> list[float]:
    """Running max of sigma_{-s}(v) over 1 <= v <= u, indexed by u (entry 0 unused)."""
    out = [0.0] * (upto + 1)
    best = 0.0
    for u in range(1, upto + 1):
        best = max(best, divisor_sigma(-s, u))
        out[u] = best
    return out


P1_PRESETS = ("general", "i", "ii", "iii", "r1")


def r1_epsilon_grid(s: float, points: int = 32) -> np.ndarray:
    hi = 2 * s - 1
    lo = 1e-3
    if hi <= lo:
        return np.array([hi])
    return np.geomspace(lo, hi, points + 1)[1:]


def bound_theorem_p1(
    K,
    c: Mapping[int, float],
    s: float,
    tau: float | None = None,
    preset: str = "i",
    psi1: Psi | None = None,
    eps: float | None = None,
) -> BoundReport:
    K, c = _prep(K, c)
    if preset not in P1_PRESETS:
        raise DomainError(f"unknown preset {preset!r}; choose from {P1_PRESETS}")
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    absc = {k: abs(v) for k, v in c.items()}
    F = fc_closure(K)

    if preset == "r1":
        return _bound_r1(K, c, absc, s, eps)
    if preset == "iii":
        if s != 1 or (tau is not None and tau != 1):
            raise DomainError("preset iii requires s = tau = 1")
        first = math.pi**2 / 6 * math.fsum(euler_phi(u) / (u * u * loglog(u)) for u in F)
        second = math.fsum(c[k] ** 2 * divisor_sigma(-1, k) * loglog(k) for k in K)
        exact = _form(K, absc, 1.0)
        return _report("p1_iii", {"K": K.to_list(), "s": 1.0, "tau": 1.0}, first * second, exact, M=first)
    if preset == "ii":
        if tau is not None and tau != s:
            raise DomainError("preset ii fixes tau = s")
        tau = s
        bar = sigma_bar(s, F.max)
        psi1 = lambda u: bar[u]  # noqa: E731
    elif preset == "i":
        psi1 = lambda u: 1.0  # noqa: E731
    elif psi1 is None:
        raise DomainError("the general preset needs psi1")
    if tau is None or not 0 <= tau <= 2 * s:
        raise DomainError(f"need 0 <= tau <= 2s, got tau={tau}, s={s}")
    vals = [float(psi1(u)) for u in F]
    if any(not v > 0 for v in vals):
        raise DomainError("psi1 must be positive on F(K)")
    if any(b < a for a, b in zip(vals, vals[1:])):
        raise DomainError("psi1 must be non-decreasing on F(K)")
    psi_of = dict(zip(F, vals))
    first = math.fsum(1.0 / (psi_of[u] * divisor_sigma(tau, u)) for u in F)
    second = math.fsum(c[k] ** 2 * psi_of[k] * divisor_sigma(tau - 2 * s, k) for k in K)
    exact = _form(K, absc, s)
    return _report(f"p1_{preset}", {"K": K.to_list(), "s": s, "tau": tau}, first * second, exact, M=first)


def _bound_r1(K: IndexSet, c: dict, absc: dict, s: float, eps: float | None) -> BoundReport:
    if not s > 0.5:
        raise DomainError(f"r1 needs s > 1/2, got {s}")
    if eps is not None and not 0 < eps <= 2 * s - 1:
        raise DomainError(f"r1 needs 0 < eps <= 2s-1, got eps={eps}")
    z = _zeta(2 * s)

    def at(e: float) -> float:
        return z * (1 + e) / e * math.fsum(c[k] ** 2 * divisor_sigma(1 + e - 2 * s, k) for k in K)

    grid = r1_epsilon_grid(s)
    vals = [at(float(e)) for e in grid]
    j = int(np.argmin(vals))
    bound = at(eps) if eps is not None else vals[j]
    exact = z * _form(K, absc, s)
    return _report(
        "p1_r1",
        {"K": K.to_list(), "s": s, "eps": eps if eps is not None else float(grid[j])},
        bound,
        exact,
        inf_over_grid=vals[j],
        argmin_eps=float(grid[j]),
        grid_points=len(grid),
    )


# row-sum family


def prop01e_rowsum_bound(k: int, s: float, kmin: int, kmax: int) -> float:
    if s == 1:
        return 2 * math.log(kmax / kmin) * divisor_sigma(-1, k)
    integral = (kmax ** (1 - s) - kmin ** (1 - s)) / (1 - s)
    return 2**s * k ** (s - 1) * integral * divisor_sigma(1 - 2 * s, k)


def cor01_radius(K, s: float) -> float:
    K = as_index_set(K)
    if s == 1:
        return 2 * math.log(K.max / K.min) * max(divisor_sigma(-1, k) for k in K)
    return 2**s * (K.max / K.min) ** (1 - s) * max(divisor_sigma(1 - 2 * s, k) for k in K)


def bound_eq61(K, c: Mapping[int, float], s: float) -> BoundReport:
    K, c = _prep(K, c)
    if not 0.5 <= s <= 1:
        raise DomainError(f"s must lie in [1/2, 1], got {s}")
    form = _form(K, c, s)
    if s == 0.5:
        bound = 2 * math.log(K.max / K.min) * math.fsum(divisor_count(k) * c[k] ** 2 for k in K)
        return _report("eq61", {"K": K.to_list(), "s": s}, bound, form, scale="form-only")
    bound = 2**s * (K.max / K.min) ** (1 - s) * math.fsum(divisor_sigma(1 - 2 * s, k) * c[k] ** 2 for k in K)
    return _report("eq61", {"K": K.to_list(), "s": s}, bound, _zeta(2 * s) * form, scale="zeta(2s)")


def offdiag_rowsums(K, s: float) -> np.ndarray:
    M = gcd_kernel(list(as_index_set(K)), s)
    return M.sum(axis=1) - np.diag(M)


def bound_wqe(K, c: Mapping[int, float], s: float) -> BoundReport:
    K, c = _prep(K, c)
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    rows = offdiag_rowsums(K, s)
    cv = np.array([c[k] for k in K])
    diag = math.fsum(cv**2)
    bound = diag + math.fsum(cv**2 * rows)
    return _report("wqe", {"K": K.to_list(), "s": s}, bound, _form(K, c, s))


def bound_hooley(a: Mapping[int, float], K, c: Mapping[int, float]) -> BoundReport:
    """(sum a_nu^2 Delta(nu)) * sum c_k^2 d(k), for K inside one interval (e^r, e^{r+1}]."""
    K, c = _prep(K, c)
    r = math.floor(math.log(K.min))
    if math.log(K.min) == r:
        r -= 1
    if not (math.exp(r) < K.min and K.max <= math.exp(r + 1)):
        raise DomainError(f"K must lie in a single interval (e^r, e^(r+1)], got [{K.min}, {K.max}]")
    first = math.fsum(v * v * hooley_delta(m) for m, v in a.items() if v)
    second = math.fsum(c[k] ** 2 * divisor_count(k) for k in K)
    return _report("hooley", {"K": K.to_list(), "r": r}, first * second, fourier_norm_sq(a, K, c))


# strengthened bound and its alternative


def bound_strengthened(K, c: Mapping[int, float], s: float, tau: float, alternative: bool = True) -> BoundReport:
    K, c = _prep(K, c)
    if not s > 0.5:
        raise DomainError(f"s must exceed 1/2, got {s}")
    if not 0 <= tau <= 2 * s:
        raise DomainError(f"need 0 <= tau <= 2s, got tau={tau}")
    L = _form(K, c, s)
    sq = math.fsum(v * v for v in c.values())
    lhs = abs(L - sq)
    z = _zeta(2 * s)
    lin = math.fsum(abs(c[k]) / k**s for k in K)
    Ks = kstar(K)
    Labs = _form(K, {k: abs(v) for k, v in c.items()}, s)
    Mp = math.fsum(1.0 / divisor_sigma(tau, u) for u in f_prime(K))
    W = math.fsum(c[k] ** 2 * divisor_sigma(tau - 2 * s, k) for k in K)
    terms = [lin**2, 2 * math.sqrt(z * math.fsum(c[k] ** 2 for k in Ks)) * math.sqrt(Labs), Mp * W]
    report = _report(
        "t1a1",
        {"K": K.to_list(), "s": s, "tau": tau},
        math.fsum(terms),
        lhs,
        terms=terms,
        kstar=list(Ks),
    )
    if not alternative:
        return report
    alt = c1a1_alternative(K, c, s, tau, L=L, parts=(lin, Mp, W, sq))
    details = dict(report.details, alternative=alt)
    ok = report.satisfied and (alt.get("disjunction", True) if alt["applicable"] else True)
    return BoundReport(report.name, report.params, report.bound_value, report.exact_value, report.ratio, ok, details)


def c1a1_alternative(K, c: Mapping[int, float], s: float, tau: float, L=None, parts=None) -> dict:
    """Evaluate both branches of the either/or statement; hypothesis failures are recorded, not raised."""
    K, c = _prep(K, c)
    rho = math.fsum(k ** (-2 * s) for k in K)
    out: dict = {"rho": rho}
    try:
        if any(v < 0 for v in c.values()):
            raise HypothesisError("the alternative needs c_k >= 0")
        if rho > 1 / 16:
            raise HypothesisError(f"rho = {rho:.6g} exceeds 1/16")
    except HypothesisError as exc:
        out.update(applicable=False, reason=str(exc))
        return out
    if L is None:
        L = _form(K, c, s)
    if parts is None:
        lin = math.fsum(c[k] / k**s for k in K)
        Mp = math.fsum(1.0 / divisor_sigma(tau, u) for u in f_prime(K))
        W = math.fsum(c[k] ** 2 * divisor_sigma(tau - 2 * s, k) for k in K)
        sq = math.fsum(v * v for v in c.values())
    else:
        lin, Mp, W, sq = parts
    b1 = (lin + Mp + W) ** 2 / math.sqrt(rho)
    b2 = sq / (1 - 3 * math.sqrt(rho))
    h1 = L <= b1 * (1 + BOUND_TOL)
    h2 = L <= b2 * (1 + BOUND_TOL)
    out.update(
        applicable=True,
        form=L,
        branch1_bound=b1,
        branch1_holds=h1,
        branch2_bound=b2,
        branch2_holds=h2,
        disjunction=h1 or h2,
    )
    return out


# eigenvalues


def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi for a symmetric matrix; stops when the off-diagonal Frobenius
    norm drops below tol * |trace| (or tol * Frobenius norm for traceless input)."""
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, rtol=0, atol=1e-14 * max(1.0, np.abs(A).max())):
        raise DomainError("jacobi_eigenvalues needs a square symmetric matrix")
    ref = abs(np.trace(A)) or np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, float((A * A).sum() - (np.diag(A) ** 2).sum())))
        if off < tol * ref:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300 * max(1.0, abs(A[p, p]) + abs(A[q, q])):
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                cs = 1 / math.sqrt(t * t + 1)
                sn = t * cs
                colp, colq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = cs * colp - sn * colq
                A[:, q] = sn * colp + cs * colq
                rowp, rowq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = cs * rowp - sn * rowq
                A[q, :] = sn * rowp + cs * rowq
                A[p, q] = A[q, p] = 0.0
    return np.sort(np.diag(A))


@dataclass(frozen=True)
class GershgorinReport:
    K: list[int]
    s: float
    zeta2s: float
    rowsums: list[float]
    scaled_rowsums: list[float]
    analytic_rowsum_bounds: list[float]
    radius: float
    corollary_radius: float
    eigenvalues: list[float]
    containment: bool
    rowsum_ok: bool
    trace_ok: bool
    det_positive: bool

    @property
    def satisfied(self) -> bool:
        return self.containment and self.rowsum_ok and self.trace_ok and self.det_positive

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["satisfied"] = self.satisfied
        return out


def rowsum_and_gershgorin(K, s: float, cap: int = EIGEN_CAP, tol: float = BOUND_TOL) -> GershgorinReport:
    K = as_index_set(K)
    if not 0.5 < s <= 1:
        raise DomainError(f"s must lie in (1/2, 1], got {s}")
    if len(K) > cap:
        raise SizeError(f"|K|={len(K)} exceeds the eigensolver cap {cap}")
    z = _zeta(2 * s)
    M = gcd_kernel(list(K), s)
    rows = M.sum(axis=1) - 1.0
    scaled = z * rows
    R = float(scaled.max()) if len(K) > 1 else 0.0
    eig = jacobi_eigenvalues(z * M)
    contain = bool(np.all(np.abs(eig - z) <= R + tol * max(R, z)))
    analytic = [prop01e_rowsum_bound(k, s, K.min, K.max) for k in K]
    rows_ok = all(r <= b + tol * abs(b) for r, b in zip(rows, analytic))
    trace = z * len(K)
    trace_ok = abs(eig.sum() - trace) <= tol * trace
    sign, _ = np.linalg.slogdet(z * M)
    det_pos = bool(np.all(eig > 0) and sign > 0)
    return GershgorinReport(
        K=K.to_list(),
        s=s,
        zeta2s=z,
        rowsums=rows.tolist(),
        scaled_rowsums=scaled.tolist(),
        analytic_rowsum_bounds=analytic,
        radius=R,
        corollary_radius=cor01_radius(K, s),
        eigenvalues=eig.tolist(),
        containment=contain,
        rowsum_ok=bool(rows_ok),
        trace_ok=bool(trace_ok),
        det_positive=det_pos,
    )


def gershgorin_as_bound(K, s: float) -> BoundReport:
    """Largest eigenvalue deviation against the Gershgorin radius, in BoundReport form."""
    g = rowsum_and_gershgorin(K, s)
    dev = float(np.max(np.abs(np.array(g.eigenvalues) - g.zeta2s)))
    rep = _report("gershgorin", {"K": g.K, "s": s}, g.radius, dev, rowsum_ok=g.rowsum_ok, trace_ok=g.trace_ok)
    # containment already carries its own tolerance relative to zeta(2s)
    return BoundReport(rep.name, rep.params, rep.bound_value, rep.exact_value, rep.ratio, g.satisfied, rep.details)


def psi_by_name(name: str, s: float = 1.0) -> Psi:
    table: dict[str, Psi] = {
        "theta": theta_sqfree,
        "one": lambda n: 1.0,
        "d": divisor_count,
        "sigma_s": lambda n: divisor_sigma(s, n),
        "id": float,
    }
    if name not in table:
        raise DomainError(f"unknown psi {name!r}; choose from {sorted(table)}")
    return table[name]

