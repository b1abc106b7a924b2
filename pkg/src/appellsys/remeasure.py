"""Change of measure: re-express test and distribution kernels.

Two bases sharing the dimension, degree and reparametrization jet admit an
explicit transport: test kernels are reordered through partial contractions
against the constants-at-zero of one basis and the moment tensors of the
other, and distribution kernels move the opposite way so that every dual
pairing is preserved.  Changing the reparametrization itself for a fixed
measure goes through the scalar transform.
"""

from __future__ import annotations

from math import factorial

from .appell import (
    AppellBasis,
    BasisMismatchError,
    KernelSeq,
    MONOMIAL,
    P_TAG,
    Q_TAG,
    gen_appell_eval,
    p_seq,
    q_seq,
    s_inverse,
    s_transform,
)
from .symtensor import partial_pairing, sym_product, zero_tensor

__all__ = [
    "p_relation",
    "reorder_test",
    "transport_dist",
    "change_alpha_dist",
]


def _require_shared_alpha(a: AppellBasis, b: AppellBasis) -> None:
    if a.dim != b.dim or a.degree != b.degree:
        raise BasisMismatchError("bases must share dimension and degree")
    if not a.same_alpha(b):
        raise BasisMismatchError(
            "bases use different reparametrizations; change alpha first "
            "(change_alpha_dist) and then transport the measure"
        )


def p_relation(basis_mu: AppellBasis, basis_mut: AppellBasis, n: int, points) -> dict:
    """Check the cross-measure expansion of the degree-n polynomial tensor.

    The tensor of the mu system at x must equal the trinomial sum of the
    mut-system tensors at x against the mu constants at zero and the mut
    moment tensors.  Returns the worst entry discrepancy over the points.
    """
    _require_shared_alpha(basis_mu, basis_mut)
    worst = 0.0
    for x in points:
        lhs = gen_appell_eval(basis_mu, n, x)
        rhs = zero_tensor(basis_mu.dim, n)
        for k in range(n + 1):
            for m in range(n - k + 1):
                l = n - k - m
                coeff = factorial(n) / (factorial(k) * factorial(m) * factorial(l))
                term = sym_product(
                    sym_product(
                        gen_appell_eval(basis_mut, k, x),
                        basis_mu.ualpha_jet.kernels[m],
                    ),
                    basis_mut.malpha_jet.kernels[l],
                )
                rhs = rhs + term.scale(coeff)
        worst = max(worst, (lhs - rhs).max_abs() if n > 0 else abs(lhs.item() - rhs.item()))
    return {"n": n, "max_discrepancy": worst, "points": len(list(points))}


def reorder_test(basis_mu: AppellBasis, basis_mut: AppellBasis, phi: KernelSeq) -> KernelSeq:
    """Rewrite a test function from the mu basis into the mut basis.

    Grade n gains contractions of the higher mu-kernels against the products
    of mu constants at zero and mut moment tensors; pointwise values are
    unchanged.
    """
    if phi.tag != P_TAG:
        raise ValueError("reorder_test expects a P-tagged sequence")
    if not basis_mu.same_basis(phi.basis):
        raise BasisMismatchError("phi does not live in the source basis")
    _require_shared_alpha(basis_mu, basis_mut)
    N = basis_mu.degree
    out = {}
    for n in range(N + 1):
        acc = zero_tensor(basis_mu.dim, n)
        for m in range(N - n + 1):
            for l in range(N - n - m + 1):
                src = phi.kernels[n + m + l]
                if src.max_abs() == 0.0:
                    continue
                coeff = factorial(n + m + l) / (
                    factorial(n) * factorial(m) * factorial(l)
                )
                weight = sym_product(
                    basis_mu.ualpha_jet.kernels[m], basis_mut.malpha_jet.kernels[l]
                )
                acc = acc + partial_pairing(src, weight).scale(coeff)
        out[n] = acc
    return p_seq(basis_mut, out)


def transport_dist(
    basis_mut: AppellBasis, basis_mu: AppellBasis, Phi_t: KernelSeq
) -> KernelSeq:
    """Carry a distribution from the mut basis to the mu basis.

    The defining contract: pairing the transported kernels against any test
    function in the mu basis equals pairing the original against the
    reordered test function in the mut basis.
    """
    if Phi_t.tag != Q_TAG:
        raise ValueError("transport_dist expects a Q-tagged sequence")
    if not basis_mut.same_basis(Phi_t.basis):
        raise BasisMismatchError("distribution does not live in the source basis")
    _require_shared_alpha(basis_mu, basis_mut)
    N = basis_mu.degree
    out = {}
    for n in range(N + 1):
        acc = zero_tensor(basis_mu.dim, n)
        for k in range(n + 1):
            if Phi_t.kernels[k].max_abs() == 0.0 and k > 0:
                continue
            for m in range(n - k + 1):
                l = n - k - m
                coeff = 1.0 / (factorial(m) * factorial(l))
                term = sym_product(
                    sym_product(Phi_t.kernels[k], basis_mu.ualpha_jet.kernels[m]),
                    basis_mut.malpha_jet.kernels[l],
                )
                acc = acc + term.scale(coeff)
        out[n] = acc
    return q_seq(basis_mu, out)


def change_alpha_dist(
    basis_src: AppellBasis, basis_dst: AppellBasis, Phi: KernelSeq
) -> KernelSeq:
    """Re-express a distribution under a different reparametrization of the
    same measure, matching scalar transforms."""
    if Phi.tag != Q_TAG:
        raise ValueError("change_alpha_dist expects a Q-tagged sequence")
    if basis_src.model.key() != basis_dst.model.key():
        raise BasisMismatchError(
            "alpha change keeps the measure fixed; use transport_dist for measure changes"
        )
    if basis_src.degree != basis_dst.degree:
        raise BasisMismatchError("bases must share the degree")
    return s_inverse(basis_dst, s_transform(basis_src, Phi))
