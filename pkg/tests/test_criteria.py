import math

import numpy as np
import pytest

from conftest import np_spectrum, random_states
from discordlab.criteria import Verdict, discord_witness, minor_report, ppt_min_eigenvalue
from discordlab.matops import DensityMatrix, DimensionError, partial_transpose
from discordlab.states import (
    bell,
    bell_mixture,
    bell_vector,
    make_rng,
    max_entangled,
    random_density,
    random_zero_discord,
    uc_family,
    uc_weight_f,
    werner,
)


def brute_minors(mat):
    """Every 2x2 principal determinant via numpy.linalg.det."""
    dim = mat.shape[0]
    out = {}
    for n in range(dim):
        for m in range(n + 1, dim):
            out[(n + 1, m + 1)] = np.linalg.det(mat[np.ix_([n, m], [n, m])]).real
    return out


class TestMinorReport:
    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (2, 4)])
    def test_covers_all_pairs_and_matches_brute_force(self, dims):
        rho = random_density(dims[0] * dims[1], None, 5, dims)
        rep = minor_report(rho)
        dim = rho.dim
        assert len(rep.pairs) == dim * (dim - 1) // 2
        ref_rho = brute_minors(rho.mat)
        ref_pt = brute_minors(partial_transpose(rho))
        for p in rep.pairs:
            assert p.pm_rho == pytest.approx(ref_rho[(p.n, p.m)], abs=1e-14)
            assert p.pm_pt == pytest.approx(ref_pt[(p.n, p.m)], abs=1e-14)
        assert rep.max_delta == max(p.delta for p in rep.pairs)

    @pytest.mark.parametrize("a", [0.0, 0.1, 0.5, 0.9, 1.0])
    def test_werner_deltas(self, a):
        rep = minor_report(werner(a))
        assert rep.delta(1, 4) == pytest.approx(a**2 / 4, abs=1e-14)
        # PM_23 moves by the same amount since |rho_14| and |rho_23| swap
        assert rep.delta(2, 3) == pytest.approx(a**2 / 4, abs=1e-14)
        for pair in [(1, 2), (1, 3), (2, 4), (3, 4)]:
            assert rep.delta(*pair) == pytest.approx(0, abs=1e-15)

    def test_werner_delta_increasing(self):
        deltas = [minor_report(werner(a)).max_delta for a in np.linspace(0.01, 1, 50)]
        assert np.all(np.diff(deltas) > 0)

    @pytest.mark.parametrize("b", np.linspace(0, 1, 11))
    def test_bell_mixture_delta(self, b):
        assert minor_report(bell_mixture(b)).delta(1, 4) == pytest.approx(abs(1 - 2 * b) / 4, abs=1e-14)

    def test_uc_delta_zero_iff_c_equals_f(self):
        for u in np.linspace(0, 0.5, 11):
            for c in np.linspace(0, 1 - 2 * u, 9):
                f = uc_weight_f(u, c)
                rep = minor_report(uc_family(u, c))
                assert rep.max_delta == pytest.approx((f - c) ** 2 / 4, abs=1e-14)
        assert minor_report(uc_family(0.1, 0.2)).max_delta <= 1e-15

    def test_uc_discord_free_inside_ppt(self):
        for u in np.arange(0, 51) / 100:
            for c in np.arange(0, 101 - 2 * round(u * 100)) / 100:
                rho = uc_family(u, c)
                if minor_report(rho).max_delta <= 1e-9:
                    assert u + c <= 0.5 + 1e-9

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3)])
    def test_zero_discord_invariance(self, dims):
        rng = make_rng(100 + dims[1])
        for _ in range(500):
            assert minor_report(random_zero_discord(dims[1], rng)).max_delta <= 1e-10

    def test_trivial_pairs_invariant_for_all_two_qubit_states(self):
        for rho in random_states(500, (2, 2), seed=31):
            rep = minor_report(rho)
            for pair in [(1, 2), (1, 3), (2, 4), (3, 4)]:
                assert rep.delta(*pair) <= 1e-15

    def test_rejects_qudit_a(self):
        with pytest.raises(DimensionError):
            minor_report(max_entangled(3))
        with pytest.raises(DimensionError):
            minor_report(DensityMatrix(np.eye(2) / 2, 2, 1))


class TestWitness:
    def test_werner_half(self):
        v = discord_witness(werner(0.5))
        assert v.verdict is Verdict.NONZERO_DISCORD
        assert v.witness_pair == (1, 4)
        assert v.max_delta == pytest.approx(0.0625)

    def test_zero_discord_inconclusive(self):
        rng = make_rng(3)
        for _ in range(20):
            v = discord_witness(random_zero_discord(3, rng))
            assert v.verdict is Verdict.INCONCLUSIVE and v.witness_pair is None

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (2, 5)])
    def test_maximally_mixed(self, dims):
        dim = dims[0] * dims[1]
        assert discord_witness(DensityMatrix(np.eye(dim) / dim, *dims)).verdict is Verdict.INCONCLUSIVE

    def test_no_zero_discord_verdict(self):
        assert {v.value for v in Verdict} == {"NonzeroDiscord", "Inconclusive"}

    def test_tolerance(self):
        rho = werner(1e-4)  # delta = 2.5e-9
        assert discord_witness(rho).detected
        assert not discord_witness(rho, tol=1e-8).detected
        with pytest.raises(ValueError):
            discord_witness(rho, tol=0)

    def test_uc_off_line_point_detected(self):
        # f = 2/15 here, so this point is not on the c = f line
        assert discord_witness(uc_family(0.2, 0.2)).detected
        assert not discord_witness(uc_family(0.1, 0.2)).detected

    @pytest.mark.parametrize("pair", [("phi+", "phi-"), ("phi+", "psi+"), ("phi+", "psi-"),
                                      ("phi-", "psi+"), ("phi-", "psi-"), ("psi+", "psi-")])
    def test_equal_bell_mixtures_inconclusive(self, pair):
        vecs = [bell_vector(k) for k in pair]
        rho = DensityMatrix(sum(0.5 * np.outer(v, v.conj()) for v in vecs), 2, 2)
        assert not discord_witness(rho).detected


class TestPPT:
    @pytest.mark.parametrize("a", [0.0, 0.2, 1 / 3, 0.34, 0.6, 1.0])
    def test_werner(self, a):
        val = ppt_min_eigenvalue(werner(a))
        assert val == pytest.approx((1 - 3 * a) / 4, abs=1e-13)
        assert (val < -1e-12) == (a > 1 / 3 + 1e-12)

    def test_uc(self):
        for u, c in [(0.1, 0.2), (0.2, 0.3), (0.1, 0.5), (0.3, 0.4), (0.0, 1.0)]:
            val = ppt_min_eigenvalue(uc_family(u, c))
            assert val == pytest.approx(np_spectrum(partial_transpose(uc_family(u, c)))[-1], abs=1e-13)
            assert (val < -1e-12) == (u + c > 0.5 + 1e-12)

    def test_product_states_nonnegative(self):
        rng = make_rng(6)
        for _ in range(50):
            a = random_density(2, 2, rng).mat
            b = random_density(3, int(rng.integers(1, 4)), rng).mat
            assert ppt_min_eigenvalue(DensityMatrix(np.kron(a, b), 2, 3)) >= -1e-12

    def test_bell(self):
        assert ppt_min_eigenvalue(bell("phi+")) == pytest.approx(-0.5)
