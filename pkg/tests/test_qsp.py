import math

import numpy as np
import pytest
from scipy import integrate

from qspnlft.errors import GapTooSmall, NonRealGamma, NormError, ParityError
from qspnlft.inverse import layer_stripping
from qspnlft.nlft import GammaSeq, NlftPair, nlft_fast
from qspnlft.poly import ChebPoly, LaurentPoly, cheb_eval
from qspnlft.qsp import (
    PhaseFactors,
    SU2Matrix,
    convention_shift,
    expand_reduced,
    gamma_to_psi,
    gqsp_from_gamma,
    gqsp_product,
    qsp_value,
    reduce_phases,
    strip_quarter_pi,
    synthesize,
    tail_decay_report,
    u_eval,
    verify,
)
from qspnlft.targets import inverse_poly, jacobi_anger

from conftest import make_target


def dense_u(x, angles):
    """Literal 2x2 matrix product, as an oracle for the first-row recursion."""
    Z = np.diag([1.0, -1.0])
    W = np.array([[x, 1j * np.sqrt(1 - x * x)], [1j * np.sqrt(1 - x * x), x]])

    def rot(p):
        return np.diag(np.exp(1j * p * np.diag(Z)))

    U = rot(angles[0])
    for p in angles[1:]:
        U = U @ W @ rot(p)
    return U


class TestUEval:
    def test_zero_phases_give_chebyshev(self):
        d = 7
        for x in (-0.9, 0.3, 1.0):
            u = u_eval(x, np.zeros(d + 1))
            assert u.u11.real == pytest.approx(math.cos(d * math.acos(x)), abs=1e-14)

    def test_all_zero_function(self, rng):
        x = rng.uniform(-1, 1, 20)
        psi = np.zeros(9)
        psi[0] = psi[-1] = math.pi / 4
        np.testing.assert_allclose(u_eval(x, psi).u11.real, 0.0, atol=1e-15)

    def test_x_equal_one(self, rng):
        psi = rng.uniform(-1, 1, 12)
        assert complex(u_eval(1.0, psi).u11) == pytest.approx(np.exp(1j * psi.sum()), abs=1e-14)

    def test_matches_dense_product(self, rng):
        psi = rng.uniform(-np.pi, np.pi, 10)
        for x in rng.uniform(-1, 1, 5):
            U = dense_u(x, psi)
            u = u_eval(x, psi)
            assert complex(u.u11) == pytest.approx(U[0, 0], abs=1e-13)
            assert complex(u.u12) == pytest.approx(U[0, 1], abs=1e-13)
            np.testing.assert_allclose(u.matrix(), U, atol=1e-13)

    def test_in_su2(self, rng):
        for _ in range(10):
            psi = rng.uniform(-np.pi, np.pi, int(rng.integers(1, 60)))
            u = u_eval(rng.uniform(-1, 1, 50), psi)
            assert np.max(np.abs(np.abs(u.u11) ** 2 + np.abs(u.u12) ** 2 - 1)) <= 1e-13

    def test_conjugation_identity(self, rng):
        for _ in range(10):
            psi = rng.uniform(-np.pi, np.pi, 15)
            x = rng.uniform(-1, 1, 30)
            np.testing.assert_allclose(u_eval(x, -psi).u11, np.conj(u_eval(x, psi).u11), atol=1e-14)

    def test_rejects_x_outside(self):
        with pytest.raises(ValueError):
            u_eval(1.5, [0.0, 0.0])

    def test_su2_check(self):
        with pytest.raises(ValueError):
            SU2Matrix(1.0, 1.0)


class TestPhaseFactors:
    def test_wrapped_into_range(self):
        p = PhaseFactors([3 * math.pi, -math.pi, 0.5])
        assert np.all(p.angles >= -math.pi) and np.all(p.angles < math.pi)

    def test_symmetric_flag_checked(self):
        with pytest.raises(ValueError):
            PhaseFactors([0.1, 0.2, 0.3], symmetric=True)

    def test_json_and_csv(self, rng):
        p = PhaseFactors(rng.uniform(-1, 1, 6), "re")
        q = PhaseFactors.from_dict(p.to_dict())
        r = PhaseFactors.from_csv(p.to_csv())
        np.testing.assert_array_equal(q.angles, p.angles)
        np.testing.assert_array_equal(r.angles, p.angles)
        assert r.convention == "re"
        assert set(p.to_dict()) == {"convention", "symmetric", "angles"}


class TestGammaToPsi:
    def test_zero(self):
        np.testing.assert_array_equal(gamma_to_psi(GammaSeq([0, 0]), "real").angles, [0, 0])

    def test_one(self):
        assert gamma_to_psi(GammaSeq([1.0]), "real").angles[0] == pytest.approx(math.pi / 4)

    def test_mixed_rejected(self):
        with pytest.raises(NonRealGamma):
            gamma_to_psi(GammaSeq([0.1 + 0.1j]), "imag")

    def test_identity_target_by_hand_pair(self):
        # f(x) = x: b = i (1 + z)/2 and the complement a* = (1 - z)/2
        b = LaurentPoly(0, [0.5j, 0.5j])
        a = LaurentPoly(-1, [-0.5, 0.5])
        psi = gamma_to_psi(layer_stripping(NlftPair(a, b)), "imag")
        np.testing.assert_allclose(psi.angles, [math.pi / 4, math.pi / 4], atol=1e-15)
        x = np.linspace(-1, 1, 50)
        assert np.max(np.abs(qsp_value(x, psi) - x)) <= 1e-12

    def test_identity_target_has_no_gap(self):
        with pytest.raises(GapTooSmall):
            synthesize(ChebPoly([0, 1.0], "odd"))


class TestConventionShift:
    x = np.linspace(-1, 1, 20)

    def test_zero_phases(self):
        out = convention_shift(PhaseFactors(np.zeros(6), "im"))
        assert out.convention == "re"
        np.testing.assert_allclose(out.angles, [math.pi / 4, 0, 0, 0, 0, math.pi / 4])
        np.testing.assert_allclose(qsp_value(self.x, out), 0.0, atol=1e-15)

    def test_swaps_parts(self, rng):
        p = PhaseFactors(rng.uniform(-1, 1, 11), "im")
        q = convention_shift(p)
        np.testing.assert_allclose(u_eval(self.x, q).u11.real, u_eval(self.x, p).u11.imag, atol=1e-14)
        r = convention_shift(q)
        np.testing.assert_allclose(u_eval(self.x, r).u11.imag, u_eval(self.x, q).u11.real, atol=1e-14)

    def test_involution(self, rng):
        p = PhaseFactors(rng.uniform(-1, 1, 8), "re")
        back = convention_shift(convention_shift(p))
        assert back.convention == "re"
        np.testing.assert_allclose(back.angles, p.angles, atol=1e-15)

    def test_strip_quarter_pi(self):
        out = convention_shift(PhaseFactors(np.array([0.1, 0.2, 0.1]), "im"))
        np.testing.assert_allclose(strip_quarter_pi(out), [-0.1, -0.2, -0.1], atol=1e-15)

    def test_chebyshev_t5_phases(self):
        psi = convention_shift(PhaseFactors(np.zeros(6), "re"))
        assert psi.convention == "im"
        np.testing.assert_allclose(psi.angles, [math.pi / 4, 0, 0, 0, 0, math.pi / 4])
        assert verify(psi, ChebPoly([0, 0, 0, 0, 0, 1.0], "odd")) <= 1e-13

    def test_t5_synthesis_hits_gap_check(self):
        with pytest.raises(GapTooSmall):
            synthesize(ChebPoly([0, 0, 0, 0, 0, 1.0], "odd"))


class TestGqsp:
    def test_real_positive(self):
        g = gqsp_from_gamma(GammaSeq([0.1, 0.5, 2.0]))
        np.testing.assert_array_equal(g.phi, 0.0)

    def test_imaginary_unit(self):
        g = gqsp_from_gamma(GammaSeq([1j]))
        assert g.psi[0] == pytest.approx(math.pi / 4)
        assert g.phi[0] == pytest.approx(math.pi / 2)

    def test_product_top_right_is_b(self, rng):
        gamma = 0.5 * (rng.standard_normal(64) + 1j * rng.standard_normal(64))
        z = np.exp(2j * np.pi * np.arange(512) / 512)
        M = gqsp_product(gqsp_from_gamma(GammaSeq(gamma)), z)
        b = nlft_fast(GammaSeq(gamma)).b(z)
        assert np.max(np.abs(M[:, 0, 1] - b)) <= 1e-10


class TestSynthesize:
    def test_half_cos_100(self):
        f = jacobi_anger("cos", 100.0, 1e-14, scale=0.5)
        psi, rep = synthesize(f, "nlfft")
        assert rep.representation_error <= 1e-12
        assert verify(psi, f) <= 1e-12
        assert psi.symmetric

    def test_inverse_kappa_10(self):
        f = inverse_poly(10.0, 1e-5, degree=101)
        psi, rep = synthesize(f, "layer")
        assert f.degree == 101
        assert rep.representation_error <= 1e-12

    @pytest.mark.parametrize("method", ["layer", "rh", "nlfft", "fpi"])
    def test_methods_and_report(self, rng, method):
        f = make_target(rng, 31, 0.6)
        psi, rep = synthesize(f, method)
        assert rep.representation_error <= 1e-12
        assert rep.method == method and rep.degree == 31
        assert "symmetry" in rep.stages
        assert psi.convention == "im"

    def test_symmetric_phases(self, rng):
        for d in (20, 41):
            psi, rep = synthesize(make_target(rng, d, 0.8), "nlfft")
            assert rep.stages["symmetry"]["max_asymmetry"] <= 1e-10

    def test_rejects_mixed_parity(self):
        with pytest.raises(ParityError) as info:
            synthesize(ChebPoly([0.2, 0.2, 0.2]))
        assert info.value.stage == "admissibility"

    def test_rejects_norm(self):
        with pytest.raises(NormError):
            synthesize(ChebPoly([0, 0.8, 0, 0.8], "odd"))

    def test_deterministic(self, rng):
        f = make_target(rng, 40, 0.7)
        a, _ = synthesize(f, "nlfft")
        b, _ = synthesize(f, "nlfft")
        assert a.angles.tobytes() == b.angles.tobytes()

    def test_unknown_method(self, rng):
        with pytest.raises(ValueError):
            synthesize(make_target(rng, 4), "newton")


class TestVerify:
    def test_zero_phases_vs_td(self):
        psi = PhaseFactors(np.zeros(9), "re")
        assert verify(psi, ChebPoly(np.eye(9)[8], "even")) <= 1e-14

    def test_perturbation_detected(self, rng):
        f = make_target(rng, 50, 0.7)
        psi, _ = synthesize(f)
        a = psi.angles.copy()
        a[17] += 1e-3
        assert verify(PhaseFactors(a, "im"), f) > 1e-5


class TestReducedAndTails:
    def test_expand_reduce(self):
        np.testing.assert_array_equal(expand_reduced([0, 1, 2], 4), [2, 1, 0, 1, 2])
        np.testing.assert_array_equal(expand_reduced([0, 1, 2], 5), [2, 1, 0, 0, 1, 2])
        np.testing.assert_array_equal(reduce_phases([2, 1, 0, 1, 2]), [0, 1, 2])
        np.testing.assert_array_equal(reduce_phases([2, 1, 0, 0, 1, 2]), [0, 1, 2])

    def test_half_cos_100_decay_rates(self):
        f = jacobi_anger("cos", 100.0, 1e-14, scale=0.5)
        psi, _ = synthesize(f)
        rep = tail_decay_report(psi, f)
        # log-slope over the decaying region (past the oscillatory core)
        sel = (rep.n >= 55) & (rep.n <= 70)
        sp = np.polyfit(rep.n[sel], np.log(rep.psi_tail[sel]), 1)[0]
        sc = np.polyfit(rep.n[sel], np.log(rep.c_tail[sel]), 1)[0]
        assert sp < 0 and sc < 0
        assert 0.5 <= sp / sc <= 2.0

    def test_single_coefficient(self):
        c = np.zeros(9)
        c[4] = 0.5
        f = ChebPoly(c, "even")
        psi, _ = synthesize(f, "fpi")
        rep = tail_decay_report(psi, f)
        assert np.all(rep.psi_tail[2:] <= 1e-12)
        assert np.all(rep.c_tail[2:] == 0)

    def test_small_norm_bracket(self, rng):
        for _ in range(5):
            f = make_target(rng, 30, 0.2)
            psi, _ = synthesize(f)
            ratios = tail_decay_report(psi, f).ratios()
            assert np.all((ratios >= 0.1) & (ratios <= 10))


def szego_integral(f: ChebPoly) -> float:
    """-(2/pi) int_0^1 log(1 - f^2)/sqrt(1 - x^2) dx, with the endpoint weight handled by QUADPACK."""

    def g(x):
        return np.log1p(-cheb_eval(f, x) ** 2) / np.sqrt(1 + x)

    val, _ = integrate.quad(g, 0.0, 1.0, weight="alg", wvar=(0.0, -0.5), limit=500, epsabs=1e-14, epsrel=1e-12)
    return -2.0 / np.pi * val


@pytest.mark.parametrize(
    "target",
    [lambda: jacobi_anger("cos", 100.0, 1e-14, scale=0.5), lambda: inverse_poly(10.0, 1e-5, degree=101)],
    ids=["cos100", "inverse"],
)
def test_plancherel(target):
    f = target()
    psi, _ = synthesize(f)
    lhs = szego_integral(f)
    rhs = np.sum(np.log1p(np.tan(psi.angles) ** 2))
    assert abs(lhs - rhs) <= 1e-6 * abs(rhs)
