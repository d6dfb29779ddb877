import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdsqnm.barrier_top import (
    BarrierTopError,
    BarrierTopProblem,
    DegenerateSpectrumError,
    build_L0,
    build_L1,
    check_diagonal,
    compute_u0,
    default_order,
    kernel_vector,
    lambda1,
    left_null_functional,
    multiplication_matrix,
    phase_amplitude,
    solve_expansion,
    solve_gauged,
)
from kdsqnm.model import FrequencySplit, SpectralParams, angular_series, find_r0, radial_series
from kdsqnm.series import TruncatedSeries as S, derivative, mul, shift_up

P0 = SpectralParams(1.0, 0.03, 0.0)


def harmonic(m, J, lam0=2.5, N=None):
    N = default_order(m, J) if N is None else N
    A = S.one(N)
    B0 = S.from_polynomial([lam0, 0, -1], N)
    return BarrierTopProblem(A, (B0, S.zero(N), S.zero(N)), m, J)


def angular_problem(k, m, J, a=0.0, omega=0.5 - 0.1j, N=None):
    p = SpectralParams(1.0, 0.03, a)
    N = default_order(m, J) if N is None else N
    A, B0, B1, B2 = angular_series(p, FrequencySplit.from_omega(omega), k, N)
    return BarrierTopProblem(A, (B0, B1, B2), m, J)


def radial_problem(params, omega, k, m, J, N=None):
    split = FrequencySplit.from_omega(omega)
    N = default_order(m, J) if N is None else N
    r0 = find_r0(params, split.sigma, k)
    A, B0, B1, B2 = radial_series(params, split, k, r0, N)
    return BarrierTopProblem(A, (B0, B1, B2), m, J)


def test_problem_validation():
    N = 10
    A = S.one(N)
    with pytest.raises(BarrierTopError):
        BarrierTopProblem(A, (S.from_polynomial([1, 0.5, -1], N), S.zero(N), S.zero(N)), 0, 2)
    with pytest.raises(BarrierTopError):
        BarrierTopProblem(A, (S.from_polynomial([1, 0, 1], N), S.zero(N), S.zero(N)), 0, 2)
    with pytest.raises(BarrierTopError):
        harmonic(3, 4, N=8)
    with pytest.raises(BarrierTopError):
        BarrierTopProblem(S.zero(N), (S.from_polynomial([1, 0, -1], N), S.zero(N), S.zero(N)), 0, 1)


def test_u0_angular_a0():
    prob = angular_problem(2.0, 0, 2, N=10)
    u0 = compute_u0(prob)
    # -4i/(1+i t) = -4i - 4 t + 4i t^2 - ... so U0 = 4 - 4i t + ...
    assert np.allclose(u0.coeffs[:3], [4, 0, -4j], atol=1e-14)
    assert u0[0] == pytest.approx(4.0)


def test_u0_exact_parabola():
    prob = harmonic(0, 2, lam0=3.0)
    assert np.allclose(compute_u0(prob).coeffs[:-2], np.r_[1, np.zeros(prob.N - 2)])


def test_u0_matches_second_difference():
    prob = radial_problem(SpectralParams(1.0, 0.03, 0.1), 0.9 - 0.1j, 2.0, 0, 3)
    B0 = prob.B[0]
    h = 1e-3
    second = (B0(h) - 2 * B0(0) + B0(-h)) / h**2
    assert compute_u0(prob)[0] == pytest.approx(-second / 2, rel=1e-5)


def test_L0_harmonic_normal_form():
    prob = harmonic(0, 2)
    L0 = build_L0(prob)
    n = np.arange(prob.N + 1)
    assert np.allclose(L0, np.diag(1j * (2 * n + 1)))


def test_L0_diagonal_and_series_oracle():
    prob = radial_problem(SpectralParams(1.0, 0.03, 0.07), 1.1 - 0.2j, 3.0, 1, 3)
    g = phase_amplitude(prob)
    L0 = build_L0(prob, g)
    n = np.arange(prob.N + 1)
    assert np.allclose(np.diag(L0), 1j * (2 * n + 1) * g[0], rtol=1e-14)
    assert np.allclose(np.triu(L0, 1), 0)
    rng = np.random.default_rng(1)
    a = S(rng.normal(size=prob.N + 1) + 1j * rng.normal(size=prob.N + 1))
    oracle = 2j * mul(g, shift_up(derivative(a))) + 1j * mul(derivative(shift_up(g)), a)
    assert np.allclose(L0 @ a.coeffs, oracle.coeffs, rtol=1e-13, atol=1e-12)


def test_L1_examples():
    prob = harmonic(0, 2)
    L1 = build_L1(prob)
    a = np.arange(1.0, prob.N + 2)
    n = np.arange(prob.N + 1)
    expect = np.zeros(prob.N + 1)
    expect[: prob.N - 1] = (n[:-2] + 2) * (n[:-2] + 1) * a[2:]
    assert np.allclose(L1 @ a, expect)
    prob2 = angular_problem(3.0, 0, 4, a=0.1)
    assert build_L1(prob2)[0, 3] == 0
    assert np.allclose(np.triu(build_L1(prob2), 3), 0)


def test_L1_series_oracle():
    N = 10
    A = S.from_polynomial([1, 1], N)
    prob = BarrierTopProblem(A, (S.from_polynomial([1, 0, -1], N), S.zero(N), S.zero(N)), 0, 2)
    cube = S.from_polynomial([0, 0, 0, 1], N)
    oracle = derivative(mul(A, derivative(cube)))
    assert np.allclose(build_L1(prob) @ cube.coeffs, oracle.coeffs)


def test_lambda1_examples():
    # angular a=0, k=2, l'=1: lambda1' = -6i, mapped back to 6 = (2l'+1) k
    prob = angular_problem(2.0, 1, 3)
    assert 1j * lambda1(prob) == pytest.approx(6.0)
    assert lambda1(harmonic(0, 2)) == pytest.approx(-1j)


def test_lambda1_radial_completed_square():
    params = SpectralParams(1.0, 0.03, 0.0)
    c = 3 * np.sqrt(3) / np.sqrt(0.73)
    offs = []
    for sigma in (1.0, 3.0, 9.0):
        w = complex(sigma, -0.1)
        prob = radial_problem(params, w, 0.0, 1, 2)
        lam = -(prob.B[0][0] + lambda1(prob))
        offs.append(abs(lam - (1j * 1.5 + c * w) ** 2))
    assert max(offs) <= 1.01 * offs[0]


def test_left_null_examples():
    M = np.array([[0.0]])
    assert np.allclose(left_null_functional(M, 0), [1])
    M = np.diag([1.0, 2.0, 0.0, 4.0])
    assert np.allclose(left_null_functional(M, 2), [0, 0, 1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 5))
def test_left_null_random(seed, m):
    rng = np.random.default_rng(seed)
    M = np.tril(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    M[np.diag_indices(6)] = rng.uniform(0.5, 2, 6) * np.exp(2j * np.pi * rng.uniform(size=6))
    M[m, m] = 0
    f = left_null_functional(M, m)
    assert f[m] == 1
    assert np.linalg.norm(f @ M[: m + 1, :]) <= 1e-12 * np.linalg.norm(M)


def test_kernel_vector_examples():
    M = np.diag([1.0, 0.0, 3.0]).astype(complex)
    assert np.allclose(kernel_vector(M, 1), [0, 1, 0])
    rng = np.random.default_rng(4)
    M = np.tril(rng.normal(size=(7, 7))).astype(complex)
    M[3, 3] = 0
    a = kernel_vector(M, 3)
    assert np.allclose(a[:3], 0) and a[3] == 1
    assert np.linalg.norm(M @ a) <= 1e-12 * np.linalg.norm(M)


def test_solve_gauged_satisfies_system_and_gauge():
    rng = np.random.default_rng(8)
    M = np.tril(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    M[np.diag_indices(8)] += 3
    m = 2
    M[m, m] = 0
    f = left_null_functional(M, m)
    rhs = rng.normal(size=8) + 0j
    rhs[m] -= np.dot(f, rhs[: m + 1])  # make f(rhs) = 0
    a, cons = solve_gauged(M, rhs, m, f)
    assert cons <= 1e-12
    assert abs(np.dot(f, a[: m + 1])) <= 1e-13
    assert np.allclose(M @ a, rhs, atol=1e-12)


def test_check_diagonal_rejects_degenerate():
    M = np.diag([1j, 0, 1e-14j])
    with pytest.raises(DegenerateSpectrumError):
        check_diagonal(M, 1, 1.0)
    check_diagonal(np.diag([1j, 0, 2j]), 1, 1.0)


def test_sqrt_branch_failure_is_reported():
    # k = 0 at a > 0 puts U0(0) A(0) on the negative real axis
    with pytest.raises(BarrierTopError):
        solve_expansion(angular_problem(0.0, 0, 2, a=0.1))


@pytest.mark.parametrize("m", [0, 1, 3])
def test_harmonic_barrier_has_no_corrections(m):
    e = solve_expansion(harmonic(m, 6))
    assert e.lambdas[0] == 2.5
    assert e.lambdas[1] == pytest.approx(-1j * (2 * m + 1))
    assert np.allclose(e.lambdas[2:], 0, atol=1e-13)


def test_angular_a0_terms():
    e = solve_expansion(angular_problem(2.0, 1, 6))
    assert np.allclose(1j * e.lambdas, [4, 6, 2, 0, 0, 0, 0], atol=1e-10)
    a0 = e.eigen_coeffs[0]
    assert np.allclose(a0[:1], 0) and a0[1] == 1


def test_lambda0_is_exact():
    prob = radial_problem(SpectralParams(1.0, 0.03, 0.12), 0.7 - 0.3j, -2.0, 2, 4)
    assert solve_expansion(prob).lambdas[0] == prob.B[0][0]


def test_diagnostics_and_diagonal_law():
    prob = radial_problem(SpectralParams(1.0, 0.03, 0.12), 0.7 - 0.3j, 2.0, 2, 5)
    e = solve_expansion(prob)
    d = e.diagnostics
    assert d["M_mm"] <= 1e-14 * abs(d["g0"])
    assert max(d["transport_residuals"]) <= 1e-10
    assert max(d["consistency_residuals"]) <= 1e-10
    assert max(d["gauge"]) <= 1e-12
    assert d["left_null_residual"] <= 1e-12
    assert d["kernel_residual"] <= 1e-12
    assert e.diagnostics["f_a0"] == 1


def test_truncation_refinement():
    params = SpectralParams(1.0, 0.03, 0.15)
    for m, J in ((0, 6), (2, 4)):
        N = default_order(m, J)
        e1 = solve_expansion(radial_problem(params, 1.3 - 0.2j, 3.0, m, J, N=N))
        e2 = solve_expansion(radial_problem(params, 1.3 - 0.2j, 3.0, m, J, N=N + 8))
        assert np.allclose(e1.lambdas, e2.lambdas, rtol=1e-10, atol=0)


def test_homogeneity_scaling():
    s = 3.0
    prob = radial_problem(SpectralParams(1.0, 0.03, 0.1), 0.9 - 0.25j, 2.0, 1, 5)
    scaled = BarrierTopProblem(
        prob.A, (s**2 * prob.B[0], s * prob.B[1], prob.B[2]), prob.m, prob.J
    )
    l1 = solve_expansion(prob).lambdas
    l2 = solve_expansion(scaled).lambdas
    for j in range(6):
        assert l2[j] == pytest.approx(s ** (2 - j) * l1[j], rel=1e-10)


def test_multiplication_matrix_is_cauchy_product():
    s, t = S([1, 2j, 3, 4]), S([0.5, -1, 2, 1j])
    assert np.allclose(multiplication_matrix(s) @ t.coeffs, mul(s, t).coeffs)
