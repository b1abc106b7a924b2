"""Measure transport: cross-measure expansions, reordering, pairing invariance."""

import numpy as np
import pytest

from appellsys.appell import (
    AppellBasis,
    BasisMismatchError,
    delta_z,
    eval_test,
    gen_appell_eval,
    pair,
    p_seq,
    q_seq,
    to_appell,
    to_monomial,
    monomial_seq,
)
from appellsys.jets import identity_vjet, log1p_vjet
from appellsys.measures import DeltaModel, GaussianModel, PoissonModel
from appellsys.oracle import exact_expectation
from appellsys.remeasure import (
    change_alpha_dist,
    p_relation,
    reorder_test,
    transport_dist,
)
from appellsys.symtensor import SymTensor, random_tensor, scalar_tensor

N = 5


def tensor_1d(rank, value):
    return SymTensor(1, rank, {(1,) * rank: float(value)})


def make_basis(kind, alpha_kind, dim=1, degree=N):
    if kind == "gaussian":
        model = GaussianModel.standard(dim)
    elif kind == "poisson":
        model = PoissonModel(tuple(1.0 + 0.5 * i for i in range(dim)))
    else:
        model = DeltaModel(dim)
    alpha = identity_vjet(dim, degree) if alpha_kind == "id" else log1p_vjet(dim, degree)
    return AppellBasis(model, alpha, degree=degree)


def random_pseq(rng, basis, max_grade=None):
    top = basis.degree if max_grade is None else max_grade
    return p_seq(
        basis, {n: random_tensor(rng, basis.dim, n) for n in range(top + 1)}
    )


def random_qseq(rng, basis):
    return q_seq(
        basis, {n: random_tensor(rng, basis.dim, n) for n in range(basis.degree + 1)}
    )


class TestPRelation:
    def test_same_measure_collapses(self):
        b = make_basis("gaussian", "id")
        report = p_relation(b, b, 3, [np.array([0.7])])
        assert report["max_discrepancy"] < 1e-10

    def test_gaussian_delta_hand_example(self):
        bg = make_basis("gaussian", "id")
        bd = make_basis("delta", "id")
        # expanding the quadratic with the point mass as the second measure:
        # x^2 - 1 = x^2 * 1 + constant(-1)
        report = p_relation(bg, bd, 2, [np.array([1.3]), np.array([-0.4])])
        assert report["max_discrepancy"] < 1e-12

    def test_poisson_vs_gaussian_log1p(self):
        bp = make_basis("poisson", "log1p")
        bg = make_basis("gaussian", "log1p")
        rng = np.random.default_rng(1)
        points = [rng.standard_normal(1) for _ in range(3)]
        for n in range(5):
            report = p_relation(bp, bg, n, points)
            assert report["max_discrepancy"] < 1e-10

    def test_2d_case(self):
        bp = make_basis("poisson", "log1p", dim=2)
        bg = make_basis("gaussian", "log1p", dim=2)
        rng = np.random.default_rng(2)
        report = p_relation(bp, bg, 4, [rng.standard_normal(2)])
        assert report["max_discrepancy"] < 1e-10

    def test_alpha_mismatch_rejected(self):
        b1 = make_basis("gaussian", "id")
        b2 = make_basis("poisson", "log1p")
        with pytest.raises(BasisMismatchError):
            p_relation(b1, b2, 2, [np.zeros(1)])


class TestReorderTest:
    def test_degree_zero_unchanged(self):
        bg = make_basis("gaussian", "id")
        bp = make_basis("poisson", "id")
        phi = p_seq(bg, {0: scalar_tensor(1, 3.0)})
        out = reorder_test(bg, bp, phi)
        assert out.kernels[0].item() == pytest.approx(3.0)
        assert out.max_grade() == 0

    def test_gaussian_to_delta_recovers_monomials(self):
        # in the point-mass basis the kernels are plain monomial coefficients
        bg = make_basis("gaussian", "id")
        bd = make_basis("delta", "id")
        phi = p_seq(bg, {2: tensor_1d(2, 1.0)})  # the quadratic minus one
        out = reorder_test(bg, bd, phi)
        got = [out.kernels[n][(1,) * n] for n in range(N + 1)]
        assert got == pytest.approx([-1.0, 0.0, 1.0, 0.0, 0.0, 0.0], abs=1e-12)
        mono = to_monomial(bg, phi)
        got_mono = [mono.kernels[n][(1,) * n] for n in range(N + 1)]
        assert got == pytest.approx(got_mono, abs=1e-12)

    def test_pointwise_values_preserved(self):
        rng = np.random.default_rng(3)
        for alpha_kind in ("id", "log1p"):
            bp = make_basis("poisson", alpha_kind, dim=2)
            bg = make_basis("gaussian", alpha_kind, dim=2)
            phi = random_pseq(rng, bp, max_grade=4)
            out = reorder_test(bp, bg, phi)
            for _ in range(4):
                z = rng.standard_normal(2)
                assert eval_test(bg, out, z) == pytest.approx(
                    eval_test(bp, phi, z), rel=1e-10, abs=1e-10
                )

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        bp = make_basis("poisson", "log1p")
        bg = make_basis("gaussian", "log1p")
        phi = random_pseq(rng, bp, max_grade=3)
        back = reorder_test(bg, bp, reorder_test(bp, bg, phi))
        for n in range(N + 1):
            assert (back.kernels[n] - phi.kernels[n]).max_abs() < 1e-10


class TestTransportDist:
    def test_same_measure_identity(self):
        b = make_basis("poisson", "log1p")
        rng = np.random.default_rng(5)
        Phi = random_qseq(rng, b)
        out = transport_dist(b, b, Phi)
        for n in range(N + 1):
            assert (out.kernels[n] - Phi.kernels[n]).max_abs() < 1e-10

    def test_pairing_invariance_all_pairs(self):
        rng = np.random.default_rng(6)
        kinds = ["gaussian", "poisson"]
        for alpha_kind in ("id", "log1p"):
            for dim in (1, 2):
                bases = {k: make_basis(k, alpha_kind, dim=dim) for k in kinds}
                bases["delta"] = make_basis("delta", alpha_kind, dim=dim)
                for src in ("gaussian", "poisson", "delta"):
                    for dst in ("gaussian", "poisson"):
                        if src == dst:
                            continue
                        bsrc, bdst = bases[src], bases[dst]
                        Phi = random_qseq(rng, bsrc)
                        phi = random_pseq(rng, bdst)
                        lhs = pair(bdst, transport_dist(bsrc, bdst, Phi), phi)
                        rhs = pair(bsrc, Phi, reorder_test(bdst, bsrc, phi))
                        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)

    def test_unit_distribution_gives_expectation(self):
        # the constant distribution in the source pairs as the source-measure
        # expectation after transport
        bg = make_basis("gaussian", "id")
        bp = make_basis("poisson", "id")
        rng = np.random.default_rng(7)
        unit = q_seq(bp, {0: scalar_tensor(1, 1.0)})
        moved = transport_dist(bp, bg, unit)
        phi = random_pseq(rng, bg, max_grade=4)
        lhs = pair(bg, moved, phi)
        mono = to_monomial(bg, phi)
        assert lhs == pytest.approx(exact_expectation(bp.model, mono), rel=1e-10)

    def test_double_transport_identity(self):
        rng = np.random.default_rng(8)
        bp = make_basis("poisson", "log1p", dim=2)
        bg = make_basis("gaussian", "log1p", dim=2)
        Phi = random_qseq(rng, bp)
        back = transport_dist(bg, bp, transport_dist(bp, bg, Phi))
        for n in range(N + 1):
            assert (back.kernels[n] - Phi.kernels[n]).max_abs() < 1e-10

    def test_delta_z_still_evaluates_after_transport(self):
        rng = np.random.default_rng(9)
        bp = make_basis("poisson", "id")
        bg = make_basis("gaussian", "id")
        z = np.array([0.6])
        dz = delta_z(bp, z)
        moved = transport_dist(bp, bg, dz)
        phi = random_pseq(rng, bg)
        assert pair(bg, moved, phi) == pytest.approx(
            eval_test(bg, phi, z), rel=1e-9, abs=1e-9
        )


class TestChangeAlpha:
    def test_measure_mismatch_rejected(self):
        bg = make_basis("gaussian", "id")
        bp = make_basis("poisson", "log1p")
        Phi = q_seq(bp, {0: scalar_tensor(1, 1.0)})
        with pytest.raises(BasisMismatchError):
            change_alpha_dist(bp, bg, Phi)

    def test_pairing_preserved_across_alpha(self):
        # distributions converted between reparametrizations pair equally
        # against the matching conversions of test functions
        rng = np.random.default_rng(10)
        for kind in ("gaussian", "poisson"):
            b_alpha = make_basis(kind, "log1p")
            b_id = make_basis(kind, "id")
            Phi = random_qseq(rng, b_alpha)
            phi_alpha = random_pseq(rng, b_alpha)
            phi_id = to_appell(b_id, to_monomial(b_alpha, phi_alpha))
            lhs = pair(b_alpha, Phi, phi_alpha)
            rhs = pair(b_id, change_alpha_dist(b_alpha, b_id, Phi), phi_id)
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)

    def test_round_trip(self):
        rng = np.random.default_rng(11)
        b_alpha = make_basis("poisson", "log1p", dim=2)
        b_id = make_basis("poisson", "id", dim=2)
        Phi = random_qseq(rng, b_alpha)
        back = change_alpha_dist(b_id, b_alpha, change_alpha_dist(b_alpha, b_id, Phi))
        for n in range(N + 1):
            assert (back.kernels[n] - Phi.kernels[n]).max_abs() < 1e-9

    def test_delta_z_invariant_under_alpha_change(self):
        rng = np.random.default_rng(12)
        b_alpha = make_basis("gaussian", "log1p")
        b_id = make_basis("gaussian", "id")
        z = np.array([0.4])
        moved = change_alpha_dist(b_alpha, b_id, delta_z(b_alpha, z))
        phi = random_pseq(rng, b_id)
        assert pair(b_id, moved, phi) == pytest.approx(
            eval_test(b_id, phi, z), rel=1e-9, abs=1e-9
        )
