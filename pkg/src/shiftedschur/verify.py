"""Self-checks behind ``shiftedschur verify``.

Each check returns printable lines and an overall pass flag.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import ValidationError


def _alpha(cfg, default):
    return cfg["alpha"] if cfg.get("alpha") is not None else default


def _get(cfg, key, default):
    return cfg[key] if cfg.get(key) is not None else default


def check_gessel(cfg):
    from .gessel import gessel_lhs, gessel_rhs
    from .schurq import Specialization
    m, n = _get(cfg, "m", 2), _get(cfg, "n", 2)
    a = _alpha(cfg, Fraction(1, 4))
    h_max, N = _get(cfg, "h_max", 5), _get(cfg, "N", 40)
    sx, sy = Specialization.alpha(m, a), Specialization.alpha(n, a)
    mode = "rational" if sx.exact else "float"
    lines, ok = [], True
    for h in range(h_max + 1):
        lhs, tail = gessel_lhs(sx, sy, h, N)
        rhs = gessel_rhs(sx, sy, h, mode)
        diff = abs(float(lhs - rhs))
        good = diff <= float(tail) + (0 if mode == "rational" else 1e-10 * float(rhs)) and float(tail) < 1e-9
        ok &= good
        lines.append(f"h={h},lhs={float(lhs)!r},rhs={float(rhs)!r},diff={diff:.3e},tail={float(tail):.3e},"
                     f"{'PASS' if good else 'FAIL'}")
    return lines, ok


def check_cauchy(cfg):
    from .gessel import cauchy_weight_sums, partition_function, product_specialization, select_cauchy_cutoff
    from .schurq import Specialization, q_coeffs
    m, n = _get(cfg, "m", 2), _get(cfg, "n", 2)
    a = _alpha(cfg, Fraction(1, 4))
    sx, sy = Specialization.alpha(m, a), Specialization.alpha(n, a)
    N = select_cauchy_cutoff(sx, sy, 1e-8)
    sums = cauchy_weight_sums(sx, sy, N)
    graded = q_coeffs(product_specialization(sx, sy), N)
    Z = partition_function(sx, sy)
    graded_ok = all(abs(float(s - graded[k])) <= 1e-12 * max(1.0, float(graded[k])) for k, s in enumerate(sums))
    monotone = all(s >= 0 for s in sums)
    remainder = float(Z - sum(sums))
    ok = graded_ok and monotone and 0 <= remainder < 1e-8
    return [f"N={N},Z={float(Z)!r},remainder={remainder:.3e},graded={graded_ok},monotone={monotone},"
            f"{'PASS' if ok else 'FAIL'}"], ok


def check_operators(cfg):
    from .gessel import operator_residuals
    from .schurq import Specialization
    m, n = _get(cfg, "m", 3), _get(cfg, "n", 3)
    a = float(_alpha(cfg, Fraction(3, 10)))
    rep = operator_residuals(Specialization.alpha(m, a), Specialization.alpha(n, a), _get(cfg, "M", 60))
    ok = max(rep.R1, rep.R2, rep.R3, rep.R4) <= 1e-8
    return [rep.line() + f",{'PASS' if ok else 'FAIL'}"], ok


def check_measure(cfg):
    from .sampler import MeasureParams
    params = MeasureParams(_get(cfg, "m", 2), _get(cfg, "n", 2), _alpha(cfg, Fraction(1, 4)))
    K = _get(cfg, "K", 8)
    tv = measure_tv(params, K)
    ok = tv <= 1e-6
    return [f"K={K},tv={tv:.3e},{'PASS' if ok else 'FAIL'}"], ok


def measure_tv(params, K: int) -> float:
    """Total variation between enumerated and determinantal laws of lambda_1."""
    from .gessel import cdf_exact
    from .sampler import exact_distribution_small
    exact = exact_distribution_small(params, K)
    top = max(exact.pmf)
    cdf = [float(cdf_exact(params, h)) for h in range(top + 1)]
    pm = [cdf[0]] + [cdf[h] - cdf[h - 1] for h in range(1, top + 1)]
    diff = sum(abs(exact.pmf.get(h, 0.0) - pm[h]) for h in range(top + 1))
    # mass beyond top in the determinantal law, and mass missed by the enumeration
    diff += abs(1.0 - cdf[top]) + abs(1.0 - sum(exact.pmf.values()))
    return 0.5 * diff


@lru_cache(maxsize=None)
def standard_shifted_by_corners(lam: tuple) -> int:
    """Standard shifted tableaux counted by removing the largest entry recursively."""
    if not lam:
        return 1
    total = 0
    for i, part in enumerate(lam):
        nxt = lam[i + 1] if i + 1 < len(lam) else 0
        if part - 1 > nxt or (part == 1 and nxt == 0):
            smaller = lam[:i] + ((part - 1,) if part > 1 else ()) + lam[i + 1:]
            total += standard_shifted_by_corners(smaller)
    return total


def check_tableaux(cfg):
    from .partitions import enumerate_strict
    from .schurq import Q_lambda, Q_lambda_comb, Specialization, count_standard_shifted, q_coeffs
    lines, ok = [], True
    bad = [lam for n in range(1, 9) for lam in enumerate_strict(n)
           if count_standard_shifted(lam) != standard_shifted_by_corners(tuple(lam))]
    ok &= not bad
    lines.append(f"standard_counts n<=8 mismatches={len(bad)},{'PASS' if not bad else 'FAIL'}")
    max_w = _get(cfg, "N", 10)
    checked = mism = 0
    for m in range(1, 5):
        spec = Specialization(tuple(Fraction(1, k + 2) for k in range(m)))
        q = q_coeffs(spec, 2 * max_w)
        for w in range(max_w + 1):
            for lam in enumerate_strict(w):
                checked += 1
                if Q_lambda(q, lam) != Q_lambda_comb(spec, lam):
                    mism += 1
    ok &= mism == 0
    lines.append(f"pfaffian_vs_tableaux checked={checked} mismatches={mism},{'PASS' if not mism else 'FAIL'}")
    return lines, ok


_CHECKS = {
    "gessel": check_gessel, "cauchy": check_cauchy, "operators": check_operators,
    "measure": check_measure, "tableaux": check_tableaux,
}


_DEFAULTS = {
    "gessel": {"m": 2, "n": 2, "alpha": Fraction(1, 4), "h_max": 5, "N": 40},
    "cauchy": {"m": 2, "n": 2, "alpha": Fraction(1, 4)},
    "operators": {"m": 3, "n": 3, "alpha": Fraction(3, 10), "M": 60},
    "measure": {"m": 2, "n": 2, "alpha": Fraction(1, 4), "K": 8},
    "tableaux": {"N": 10},
}


def run(target: str, cfg: dict):
    """Run one check; unset keys in ``cfg`` are filled with the check's defaults."""
    if target not in _CHECKS:
        raise ValidationError(f"unknown verification target {target!r}")
    for key, val in _DEFAULTS[target].items():
        if cfg.get(key) is None:
            cfg[key] = val
    return _CHECKS[target](cfg)
