"""Jet arithmetic against sympy series and composition-sum oracles."""

from math import factorial

import numpy as np
import pytest
import sympy as sp

from appellsys.jets import (
    CompKernels,
    ScalarJet,
    SingularJetError,
    VectorJet,
    comp_kernels,
    constant_jet,
    expm1_vjet,
    identity_vjet,
    jet_compose_scalar,
    jet_compose_vector,
    jet_exp,
    jet_invert,
    jet_log,
    jet_mul,
    jet_recip,
    linear_jet,
    linear_part,
    log1p_vjet,
    random_vjet,
    unit_jet,
)
from appellsys.symtensor import (
    multi_indices,
    pairing,
    power_tensor,
    random_tensor,
    scalar_tensor,
    SymTensor,
    zero_tensor,
)

N = 6


def jet_1d(coeffs):
    """1D scalar jet from exponential kernels (c_0, c_1, ...)."""
    ks = [SymTensor(1, n, {(1,) * n: float(c)}) for n, c in enumerate(coeffs)]
    return ScalarJet(1, len(coeffs) - 1, tuple(ks))


def kernels_1d(jet):
    return [jet.kernels[n][(1,) * n] for n in range(jet.degree + 1)]


def sympy_kernels(expr, x, degree):
    """Exponential coefficients of a sympy expression around 0."""
    series = sp.series(expr, x, 0, degree + 1).removeO()
    poly = sp.Poly(series, x)
    out = []
    for n in range(degree + 1):
        out.append(float(poly.coeff_monomial(x**n)) * factorial(n))
    return out


class TestScalarArithmetic:
    def test_unit_is_multiplicative_identity(self):
        rng = np.random.default_rng(1)
        f = ScalarJet(2, 4, tuple(random_tensor(rng, 2, n) for n in range(5)))
        g = jet_mul(unit_jet(2, 4), f)
        for n in range(5):
            assert (g.kernels[n] - f.kernels[n]).max_abs() < 1e-14

    def test_one_plus_theta_squared(self):
        f = jet_1d([1.0, 1.0, 0.0, 0.0])
        sq = jet_mul(f, f)
        assert kernels_1d(sq) == pytest.approx([1.0, 2.0, 2.0, 0.0])

    def test_exp_jets_add_exponents(self):
        # exp(<a,x>) * exp(<b,x>) = exp(<a+b,x>): kernels are tensor powers
        a, b = np.array([0.5, -0.3]), np.array([0.2, 0.7])
        ja = jet_exp(linear_jet(2, N, a))
        jb = jet_exp(linear_jet(2, N, b))
        prod = jet_mul(ja, jb)
        for n in range(N + 1):
            assert (prod.kernels[n] - power_tensor(a + b, n)).max_abs() < 1e-12

    def test_exp_of_theta(self):
        f = jet_exp(jet_1d([0.0, 1.0] + [0.0] * (N - 1)))
        assert kernels_1d(f) == pytest.approx([1.0] * (N + 1))

    def test_exp_of_zero(self):
        f = jet_exp(constant_jet(2, 3, 0.0))
        assert f.constant() == 1.0
        assert all(f.kernels[n].max_abs() == 0 for n in range(1, 4))

    def test_recip_geometric(self):
        f = jet_recip(jet_1d([1.0, 1.0] + [0.0] * (N - 1)))
        expected = [(-1.0) ** n * factorial(n) for n in range(N + 1)]
        assert kernels_1d(f) == pytest.approx(expected)

    def test_recip_round_trip(self):
        rng = np.random.default_rng(2)
        ks = [scalar_tensor(2, 1.7)] + [random_tensor(rng, 2, n) for n in range(1, N + 1)]
        f = ScalarJet(2, N, tuple(ks))
        prod = jet_mul(f, jet_recip(f))
        assert abs(prod.constant() - 1.0) < 1e-12
        for n in range(1, N + 1):
            assert prod.kernels[n].max_abs() < 1e-11

    def test_log_exp_round_trip(self):
        rng = np.random.default_rng(3)
        ks = [scalar_tensor(2, 0.4)] + [
            random_tensor(rng, 2, n, scale=0.5) for n in range(1, N + 1)
        ]
        f = ScalarJet(2, N, tuple(ks))
        back = jet_log(jet_exp(f))
        for n in range(N + 1):
            assert (back.kernels[n] - f.kernels[n]).max_abs() < 1e-11

    def test_log_needs_positive_constant(self):
        with pytest.raises(SingularJetError):
            jet_log(jet_1d([0.0, 1.0]))
        with pytest.raises(SingularJetError):
            jet_recip(jet_1d([0.0, 1.0]))

    @pytest.mark.parametrize(
        "expr_name",
        ["exp", "log1p_shifted", "recip"],
    )
    def test_against_sympy(self, expr_name):
        x = sp.Symbol("x")
        base = sp.Rational(1, 2) * x + sp.Rational(1, 3) * x**2 - sp.Rational(1, 5) * x**3
        base_kernels = sympy_kernels(base, x, N)
        f = jet_1d(base_kernels)
        if expr_name == "exp":
            got, expected = jet_exp(f), sympy_kernels(sp.exp(base), x, N)
        elif expr_name == "log1p_shifted":
            got, expected = jet_log(jet_1d([c + (1.0 if i == 0 else 0.0) for i, c in enumerate(base_kernels)])), sympy_kernels(sp.log(1 + base), x, N)
        else:
            got, expected = jet_recip(jet_1d([c + (2.0 if i == 0 else 0.0) for i, c in enumerate(base_kernels)])), sympy_kernels(1 / (2 + base), x, N)
        assert kernels_1d(got) == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_eval_truncated_series(self):
        f = jet_exp(jet_1d([0.0, 1.0] + [0.0] * (N - 1)))
        theta = 0.1
        assert f.eval([theta]) == pytest.approx(
            sum(theta**n / factorial(n) for n in range(N + 1))
        )

    def test_shape_mismatch_rejected(self):
        from appellsys.symtensor import DimensionMismatchError

        with pytest.raises(ValueError):
            jet_mul(jet_1d([1.0, 1.0]), jet_1d([1.0, 1.0, 0.0]))
        with pytest.raises(DimensionMismatchError):
            jet_mul(jet_1d([1.0, 1.0]), unit_jet(2, 1))


class TestCompose:
    def test_identity_returns_f(self):
        rng = np.random.default_rng(4)
        f = ScalarJet(2, N, tuple(random_tensor(rng, 2, n) for n in range(N + 1)))
        g = jet_compose_scalar(f, identity_vjet(2, N))
        for n in range(N + 1):
            assert (g.kernels[n] - f.kernels[n]).max_abs() < 1e-12

    def test_constant_jet_composes_to_itself(self):
        f = constant_jet(2, N, 3.0)
        g = jet_compose_scalar(f, random_vjet(np.random.default_rng(5), 2, N))
        assert g.constant() == 3.0
        assert all(g.kernels[n].max_abs() < 1e-14 for n in range(1, N + 1))

    def test_exp_compose_log1p(self):
        # exp(log(1 + theta)) = 1 + theta
        f = jet_1d([1.0] * (N + 1))  # exp jet
        got = jet_compose_scalar(f, log1p_vjet(1, N))
        assert kernels_1d(got) == pytest.approx([1.0, 1.0] + [0.0] * (N - 1), abs=1e-12)

    def test_compose_matches_sympy(self):
        x = sp.Symbol("x")
        inner = x + sp.Rational(1, 4) * x**2 - sp.Rational(1, 6) * x**3
        outer = 1 + x + sp.Rational(1, 2) * x**2 + sp.Rational(1, 7) * x**3
        f = jet_1d(sympy_kernels(outer, x, N))
        a_kernels = sympy_kernels(inner, x, N)
        comps = (jet_1d(a_kernels),)
        a = VectorJet(1, N, comps)
        got = jet_compose_scalar(f, a)
        expected = sympy_kernels(outer.subs(x, inner), x, N)
        assert kernels_1d(got) == pytest.approx(expected, rel=1e-10, abs=1e-10)


class TestCompKernels:
    def test_identity_power_kernels(self):
        ck = comp_kernels(identity_vjet(2, 3))
        # A[n][m] vanishes off the diagonal; on it, contraction is the identity
        assert (2, 1) not in ck.tables or all(
            t.max_abs() == 0 for t in ck.tables[(2, 1)].values()
        )
        rng = np.random.default_rng(6)
        p = random_tensor(rng, 2, 3)
        out = ck.contract_out(3, 3, p).scale(1.0 / factorial(3))
        assert (out - p).max_abs() < 1e-12

    def test_log1p_a32_composition_sum(self):
        # two output slots at degree three: sum over (1,2) and (2,1) splits
        ck = comp_kernels(log1p_vjet(1, 4))
        a32 = ck.tables[(3, 2)][(1, 1)][(1, 1, 1)]
        assert a32 == pytest.approx(-6.0)

    def test_expm1_b32_composition_sum(self):
        ck = comp_kernels(expm1_vjet(1, 4))
        b32 = ck.tables[(3, 2)][(1, 1)][(1, 1, 1)]
        assert b32 == pytest.approx(6.0)

    def test_power_kernels_match_pointwise_powers(self):
        # the truncated expansion of the m-th power agrees with the direct
        # power of the evaluated jet up to the truncation tail; small theta
        # pushes the tail below the target accuracy
        rng = np.random.default_rng(7)
        for d in (1, 2, 3):
            a = random_vjet(rng, d, N)
            ck = comp_kernels(a)
            theta = 0.02 * rng.standard_normal(d)
            av = a.eval(theta)
            for m in (1, 2, 3):
                for u in multi_indices(d, m):
                    direct = 1.0
                    for j in u:
                        direct *= av[j - 1]
                    series = sum(
                        pairing(ck.tables[(n, m)][u], power_tensor(theta, n)) / factorial(n)
                        for n in range(m, N + 1)
                    )
                    assert series == pytest.approx(direct, rel=1e-10, abs=1e-14)

    def test_vanishing_below_diagonal(self):
        ck = comp_kernels(random_vjet(np.random.default_rng(8), 2, 4))
        assert (1, 2) not in ck.tables
        assert (3, 4) not in ck.tables


class TestInversion:
    def test_identity_inverts_to_identity(self):
        g = jet_invert(identity_vjet(2, 4))
        ident = identity_vjet(2, 4)
        for j in range(2):
            for n in range(5):
                assert (
                    g.components[j].kernels[n] - ident.components[j].kernels[n]
                ).max_abs() < 1e-13

    def test_log1p_inverts_to_expm1(self):
        g = jet_invert(log1p_vjet(1, N))
        expected = expm1_vjet(1, N)
        for n in range(1, N + 1):
            assert (g.kernel(n, 1) - expected.kernel(n, 1)).max_abs() < 1e-11

    def test_round_trip_random(self):
        rng = np.random.default_rng(9)
        for d in (1, 2, 3):
            a = random_vjet(rng, d, 5)
            g = jet_invert(a)
            ident = identity_vjet(d, 5)
            for comp_pair in [(a, g), (g, a)]:
                back = jet_compose_vector(*comp_pair)
                for j in range(d):
                    for n in range(1, 6):
                        assert (
                            back.components[j].kernels[n] - ident.components[j].kernels[n]
                        ).max_abs() < 1e-11

    def test_diag_linear_plus_quadratic(self):
        rng = np.random.default_rng(10)
        d, deg = 2, 5
        comps = []
        diag = [2.0, 3.0]
        for j in range(1, d + 1):
            ks = [scalar_tensor(d, 0.0)]
            vec = [diag[j - 1] if i == j else 0.0 for i in range(1, d + 1)]
            ks.append(SymTensor(d, 1, {(i,): vec[i - 1] for i in range(1, d + 1)}))
            ks.append(random_tensor(rng, d, 2, scale=0.2))
            ks += [zero_tensor(d, n) for n in range(3, deg + 1)]
            comps.append(ScalarJet(d, deg, tuple(ks)))
        a = VectorJet(d, deg, tuple(comps))
        g = jet_invert(a)
        back = jet_compose_vector(a, g)
        ident = identity_vjet(d, deg)
        for j in range(d):
            for n in range(1, deg + 1):
                assert (
                    back.components[j].kernels[n] - ident.components[j].kernels[n]
                ).max_abs() < 1e-12

    def test_singular_linear_part_rejected(self):
        d, deg = 2, 3
        comps = []
        for j in range(1, d + 1):
            ks = [scalar_tensor(d, 0.0), SymTensor(d, 1, {(1,): 1.0, (2,): 1.0})]
            ks += [zero_tensor(d, n) for n in range(2, deg + 1)]
            comps.append(ScalarJet(d, deg, tuple(ks)))
        with pytest.raises(SingularJetError):
            jet_invert(VectorJet(d, deg, tuple(comps)))


class TestPowerDuality:
    def test_a_kernels_compose_with_inverse_to_monomials(self):
        # substituting the inverse into the power series of a power of alpha
        # must recover the plain coordinate monomial
        rng = np.random.default_rng(12)
        d = 2
        a = random_vjet(rng, d, N)
        g = jet_invert(a)
        ck = comp_kernels(a)
        for m in (1, 2):
            for u in multi_indices(d, m):
                ks = [zero_tensor(d, n) for n in range(N + 1)]
                ks[0] = scalar_tensor(d, 0.0)
                for n in range(m, N + 1):
                    ks[n] = ck.tables[(n, m)][u]
                jet_u = ScalarJet(d, N, tuple(ks))
                back = jet_compose_scalar(jet_u, g)
                # expected kernels: the degree-m monomial prod theta_{u_i}
                mono = power_tensor(np.ones(d), m)  # placeholder shape
                for n in range(N + 1):
                    if n != m:
                        assert back.kernels[n].max_abs() < 1e-10
                expected = {k: 0.0 for k in multi_indices(d, m)}
                from appellsys.symtensor import multiplicity

                expected[u] = factorial(m) / multiplicity(u)
                for k in multi_indices(d, m):
                    assert back.kernels[m][k] == pytest.approx(expected[k], abs=1e-10)
