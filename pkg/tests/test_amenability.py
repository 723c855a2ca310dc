"""Return probabilities, defect minimization, and spectral-radius certificates."""

import math
from fractions import Fraction

import numpy as np
import pytest

from unirep import (
    ConvergenceError,
    FgAbelianOracle,
    PreconditionError,
    Regular,
    ResourceLimitError,
    ball,
    min_defect,
    return_probabilities,
    spectral_radius_bound,
    symmetric_generators,
)
from util import cyclic_table, f2_oracle, z2_oracle, z_oracle


def test_z_binomial_closed_form_exact():
    Z = z_oracle()
    table = return_probabilities(Z, None, 40, exact_steps=40)
    for n in range(0, 21):
        assert table.p[2 * n] == Fraction(math.comb(2 * n, n), 4**n)


def test_z_float_tail_matches_binomial():
    Z = z_oracle()
    table = return_probabilities(Z, None, 60, exact_steps=40)
    for n in range(21, 31):
        closed = math.comb(2 * n, n) / 4**n
        assert abs(float(table.p[2 * n]) - closed) <= 1e-12 * closed


def test_finite_group_returns_to_uniform():
    Z3 = cyclic_table(3)
    table = return_probabilities(Z3, None, 60)
    assert abs(float(table.p[60]) - Fraction(1, 3)) < 1e-9
    assert abs(table.final_ratio - 1.0) < 1e-9


def test_ratio_trace_monotone_and_bounded():
    for oracle in (z_oracle(), f2_oracle(), cyclic_table(4)):
        table = return_probabilities(oracle, None, 30)
        ratios = [table.ratio_estimates[k] for k in sorted(table.ratio_estimates)]
        assert all(r <= 1 + 1e-12 for r in ratios)
        assert all(b >= a - 1e-12 for a, b in zip(ratios, ratios[1:]))


def test_f2_radial_agrees_with_generic_convolution():
    F2 = f2_oracle()
    table = return_probabilities(F2, None, 8)
    steps = symmetric_generators(F2)
    dist = {(): Fraction(1)}
    w = Fraction(1, len(steps))
    for step in range(1, 9):
        new = {}
        for x, m in dist.items():
            for s in steps:
                y = F2.multiply(s, x)
                new[y] = new.get(y, Fraction(0)) + m * w
        dist = new
        if step % 2 == 0:
            assert table.p[step] == dist.get((), Fraction(0))


def test_f2_ratio_near_kesten_value():
    F2 = f2_oracle()
    table = return_probabilities(F2, None, 50)
    assert abs(table.final_ratio - math.sqrt(3) / 2) <= 0.03


def test_trivial_group_walk():
    triv = FgAbelianOracle(0, [])
    table = return_probabilities(triv, None, 10)
    assert all(table.p[s] == 1 for s in table.p)


def test_support_cap_resource_error():
    Z2 = z2_oracle()
    with pytest.raises(ResourceLimitError, match="step"):
        return_probabilities(Z2, None, 30, support_cap=10)


def tridiagonal_min_defect(m):
    """Dense reference for a path of m vertices: smallest eigenvalue of 2(I - M)."""
    M = np.zeros((m, m))
    for i in range(m - 1):
        M[i, i + 1] = M[i + 1, i] = 0.5
    return float(np.linalg.eigvalsh(2 * (np.eye(m) - M))[0])


def test_min_defect_path_closed_form():
    Z = z_oracle()
    report = min_defect(Z, None, 5)
    m = 11  # ball of radius 5 is a path of 11 points
    expected = 2 - 2 * math.cos(math.pi / (m + 1))
    assert abs(report.min_avg_sq_defect - expected) < 1e-9
    assert abs(report.min_avg_sq_defect - tridiagonal_min_defect(m)) < 1e-9


def test_min_defect_finite_group_zero():
    Z5 = cyclic_table(5)
    report = min_defect(Z5, None, 4)
    assert report.min_avg_sq_defect < 1e-12
    assert report.certified_lower_bound_used


def test_min_defect_argmin_rayleigh_matches():
    Z = z_oracle()
    reg = Regular(Z)
    report = min_defect(Z, None, 4)
    w = report.argmin
    steps = symmetric_generators(Z)
    rayleigh = sum((reg.apply(s, w) - w).norm2() for s in steps) / (len(steps) * w.norm2())
    assert abs(rayleigh - report.min_avg_sq_defect) < 1e-9


def test_min_defect_monotone_in_radius():
    for oracle in (z_oracle(), f2_oracle()):
        values = [min_defect(oracle, None, r).min_avg_sq_defect for r in range(1, 6)]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))


def test_min_defect_amenable_decays_nonamenable_floors():
    assert min_defect(z_oracle(), None, 10).min_avg_sq_defect < 0.05
    assert min_defect(z2_oracle(), None, 6).min_avg_sq_defect < 0.2
    floor = 2 - math.sqrt(3)
    for r in range(1, 6):
        report = min_defect(f2_oracle(), None, r)
        assert report.certified_lower_bound >= floor - 1e-9


def test_min_defect_dense_oracle_small_radius():
    F2 = f2_oracle()
    for r in (1, 2, 3):
        B = ball(F2, r)
        steps = symmetric_generators(F2)
        index = {x: i for i, x in enumerate(B.elements)}
        M = np.zeros((len(B), len(B)))
        for x, ix in index.items():
            for s in steps:
                iy = index.get(F2.multiply(s, x))
                if iy is not None:
                    M[iy, ix] += 1 / len(steps)
        dense = float(np.linalg.eigvalsh(2 * (np.eye(len(B)) - M))[0])
        assert abs(min_defect(F2, None, r).min_avg_sq_defect - dense) < 1e-9


def test_consistency_defect_vs_compression():
    for oracle in (z_oracle(), f2_oracle()):
        for r in (2, 4):
            d = min_defect(oracle, None, r).min_avg_sq_defect
            mu = spectral_radius_bound(oracle, None, r).lower
            assert 1 - d <= mu + 1e-9


def test_spectral_z_path_bounds():
    Z = z_oracle()
    interval = spectral_radius_bound(Z, None, 50)
    assert interval.lower >= math.cos(math.pi / 52)
    # exact compressed value for a path of 101 vertices
    assert abs(interval.lower - math.cos(math.pi / 102)) < 1e-9
    assert interval.upper == 1.0


def radial_jacobi_top(rank, r):
    d = 2 * rank
    offdiag = [1 / math.sqrt(d)] + [math.sqrt(d - 1) / d] * (r - 1)
    J = np.zeros((r + 1, r + 1))
    for i, ai in enumerate(offdiag):
        J[i, i + 1] = J[i + 1, i] = ai
    return float(np.linalg.eigvalsh(J)[-1])


def test_spectral_f2_interval():
    F2 = f2_oracle()
    interval = spectral_radius_bound(F2, None, 8, n_max=50)
    rho = math.sqrt(3) / 2
    assert rho in interval
    assert interval.width <= 0.05
    assert abs(interval.lower - radial_jacobi_top(2, 8)) < 1e-9
    assert interval.upper == rho
    assert abs(interval.table.final_ratio - rho) <= 0.03


def test_spectral_lower_nondecreasing_in_radius():
    for oracle in (z_oracle(), f2_oracle()):
        lows = [spectral_radius_bound(oracle, None, r).lower for r in range(1, 6)]
        assert all(b >= a - 1e-9 for a, b in zip(lows, lows[1:]))


def test_spectral_trivial_group():
    triv = FgAbelianOracle(0, [])
    interval = spectral_radius_bound(triv, None, 3)
    assert interval.lower == interval.upper == 1.0


def test_nmax_validation():
    with pytest.raises(PreconditionError):
        return_probabilities(z_oracle(), None, 0)
