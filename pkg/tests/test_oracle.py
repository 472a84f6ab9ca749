import math

import numpy as np
import pytest

from conftest import random_states
from discordlab.bounds import gqd_lower_bound, work_deficit_lower_bound
from discordlab.matops import DensityMatrix, DimensionError, hs_norm_sq, partial_trace_A, von_neumann_entropy
from discordlab.oracle import (
    MeasurementAngles,
    ZeroProbabilityOutcome,
    classical_correlation,
    conditional_state,
    dephase,
    discord_A_exact,
    gqd_brute,
    minimize_over_angles,
    mutual_information,
    work_deficit_exact,
)
from discordlab.states import (
    BELL_KINDS,
    bell,
    bell_mixture,
    make_rng,
    max_entangled,
    qubit_basis,
    random_density,
    random_zero_discord,
    werner,
)

LN2 = math.log(2)


def bell_diagonal_discord(a_xx, a_yy, a_zz, spectrum):
    """Closed-form discord of a Bell-diagonal two-qubit state (maximally mixed marginals)."""
    c = max(abs(a_xx), abs(a_yy), abs(a_zz))
    h = lambda x: x * math.log2(x) if x > 0 else 0.0
    classical = 0.5 * (h(1 - c) + h(1 + c))
    s = -sum(h(x) for x in spectrum)
    return 2 - s - classical


def slow_gqd(rho, grid=120):
    """Explicit dephasing with 4x4 projectors over a plain angle grid."""
    best = math.inf
    for theta in np.linspace(0, math.pi, grid):
        for phi in np.linspace(0, 2 * math.pi, 2 * grid, endpoint=False):
            u = qubit_basis(theta, phi)
            sigma = sum(
                np.kron(np.outer(u[:, k], u[:, k].conj()), np.eye(rho.dim_b)) @ rho.mat
                @ np.kron(np.outer(u[:, k], u[:, k].conj()), np.eye(rho.dim_b))
                for k in range(2)
            )
            best = min(best, hs_norm_sq(rho.mat - sigma))
    return best


class TestAngles:
    @pytest.mark.parametrize("theta, phi", [(-0.1, 0), (4.0, 0), (0, 2 * math.pi), (0, -1)])
    def test_domain(self, theta, phi):
        with pytest.raises(ValueError):
            MeasurementAngles(theta, phi)

    def test_basis(self):
        u = MeasurementAngles(math.pi / 2, 0).basis()
        np.testing.assert_allclose(u[:, 0], [1 / math.sqrt(2), 1 / math.sqrt(2)])


class TestConditionalState:
    def test_product(self):
        rng = make_rng(2)
        ra, rb = random_density(2, 2, rng).mat, random_density(3, 3, rng).mat
        rho = DensityMatrix(np.kron(ra, rb), 2, 3)
        for outcome in (0, 1):
            _, cond = conditional_state(rho, (1.1, 2.3), outcome)
            np.testing.assert_allclose(partial_trace_A(cond), rb, atol=1e-12)

    def test_phi_plus_computational(self):
        p, cond = conditional_state(bell("phi+"), (0, 0), 0)
        assert p == pytest.approx(0.5)
        np.testing.assert_allclose(partial_trace_A(cond), np.diag([1, 0]), atol=1e-15)

    def test_werner_one_x_basis(self):
        p, cond = conditional_state(werner(1), (math.pi / 2, 0), 0)
        assert p == pytest.approx(0.5, abs=1e-15)
        assert np.trace(cond.mat).real == pytest.approx(1)

    def test_zero_probability(self):
        rho = DensityMatrix(np.kron(np.diag([1, 0]), np.eye(2) / 2), 2, 2)
        with pytest.raises(ZeroProbabilityOutcome):
            conditional_state(rho, (0, 0), 1)

    def test_requires_qubit_a(self):
        with pytest.raises(DimensionError):
            conditional_state(max_entangled(3), (0, 0), 0)

    def test_dephased_blocks_match(self):
        rng = make_rng(14)
        for rho in random_states(20, (2, 3), seed=14):
            angles = (rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            u = np.kron(qubit_basis(*angles), np.eye(3))
            a = u.conj().T @ rho.mat @ u
            b = u.conj().T @ dephase(rho, angles).mat @ u
            np.testing.assert_allclose(b[:3, :3], a[:3, :3], atol=1e-14)
            np.testing.assert_allclose(b[3:, 3:], a[3:, 3:], atol=1e-14)
            np.testing.assert_allclose(b[:3, 3:], 0, atol=1e-14)
            recon = sum(p * c.mat for p, c in (conditional_state(rho, angles, k) for k in (0, 1)))
            np.testing.assert_allclose(recon, dephase(rho, angles).mat, atol=1e-14)


class TestMutualInformation:
    def test_product(self):
        rho = DensityMatrix(np.kron(np.diag([0.3, 0.7]), np.eye(3) / 3), 2, 3)
        assert mutual_information(rho) == pytest.approx(0, abs=1e-12)

    def test_bell(self):
        assert mutual_information(bell("phi+")) == pytest.approx(2)

    def test_werner_half(self):
        spec = np.array([5 / 8, 1 / 8, 1 / 8, 1 / 8])
        assert mutual_information(werner(0.5)) == pytest.approx(2 + np.sum(spec * np.log2(spec)), abs=1e-12)


class TestDiscord:
    @pytest.mark.parametrize("kind", BELL_KINDS)
    def test_bell(self, kind):
        assert discord_A_exact(bell(kind)).value == pytest.approx(1, abs=1e-6)

    @pytest.mark.parametrize("a", [0.05, 0.3, 0.5, 0.8, 1.0])
    def test_werner_closed_form(self, a):
        rho = werner(a)
        assert discord_A_exact(rho).value == pytest.approx(bell_diagonal_discord(-a, -a, -a, rho.spectrum), abs=1e-7)

    @pytest.mark.parametrize("b", [0.0, 0.1, 0.3, 0.5, 0.7, 0.95])
    def test_bell_mixture_closed_form(self, b):
        rho = bell_mixture(b)
        expected = bell_diagonal_discord(1 - 2 * b, -1, 1 - 2 * b, rho.spectrum)
        assert discord_A_exact(rho).value == pytest.approx(expected, abs=1e-7)

    def test_bell_mixture_symmetric(self):
        for b in (0.1, 0.25, 0.4):
            assert discord_A_exact(bell_mixture(b)).value == pytest.approx(discord_A_exact(bell_mixture(1 - b)).value, abs=1e-7)

    def test_werner_positive_everywhere(self):
        for a in np.arange(1, 21) * 0.05:
            assert discord_A_exact(werner(a)).value > 0

    def test_zero_discord(self):
        rng = make_rng(40)
        for dim_b in (2, 3, 4):
            for _ in range(10):
                res = discord_A_exact(random_zero_discord(dim_b, rng))
                assert res.value <= 1e-6

    def test_nonnegative_and_small_clamp(self):
        for rho in random_states(30, (2, 3), seed=3):
            d = discord_A_exact(rho)
            c = classical_correlation(rho)
            assert d.value >= 0 and c.value >= 0
            assert d.clamped_by <= 1e-6

    def test_grid_floor(self):
        with pytest.raises(ValueError):
            discord_A_exact(bell("phi+"), grid=16)

    def test_result_metadata(self):
        res = discord_A_exact(bell("psi-"), grid=40, refine_iters=0)
        assert res.grid_resolution == 40 and res.refined is False and res.unit == "bits"


class TestGqdBrute:
    def test_max_entangled(self):
        assert gqd_brute(max_entangled(2)).value == pytest.approx(0.5, abs=1e-9)

    @pytest.mark.parametrize("a", [0.1, 0.5, 1.0])
    def test_werner(self, a):
        assert gqd_brute(werner(a)).value == pytest.approx(a**2 / 2, abs=1e-9)

    def test_zero_discord(self):
        rng = make_rng(41)
        for dim_b in (2, 3, 4):
            for _ in range(10):
                assert gqd_brute(random_zero_discord(dim_b, rng)).value <= 1e-8

    def test_against_slow_loop(self):
        for rho in random_states(3, (2, 2), seed=12):
            fast = gqd_brute(rho).value
            slow = slow_gqd(rho, 60)
            assert fast <= slow + 1e-12
            assert slow - fast < 5e-3

    def test_local_unitary_on_b(self):
        rng = make_rng(19)
        for rho in random_states(10, (2, 3), seed=19):
            g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            q, _ = np.linalg.qr(g)
            u = np.kron(np.eye(2), q)
            rotated = DensityMatrix(u @ rho.mat @ u.conj().T, 2, 3)
            assert gqd_brute(rotated).value == pytest.approx(gqd_brute(rho).value, abs=1e-6)

    def test_dephased_candidate_is_closest_for_its_basis(self):
        rng = make_rng(23)
        for rho in random_states(10, (2, 2), seed=23):
            res = gqd_brute(rho)
            u = np.kron(res.argmin_angles.basis(), np.eye(2))
            sigma = dephase(rho, res.argmin_angles).mat
            base = hs_norm_sq(rho.mat - sigma)
            for _ in range(20):
                blocks = [random_density(2, 2, rng).mat for _ in range(2)]
                pert = u @ np.block([[blocks[0], np.zeros((2, 2))], [np.zeros((2, 2)), -blocks[1]]]) @ u.conj().T
                cand = sigma + 1e-2 * pert
                assert hs_norm_sq(rho.mat - cand) >= base - 1e-15

    def test_product_state_tie_break(self):
        rho = DensityMatrix(np.eye(4) / 4, 2, 2)
        res = gqd_brute(rho)
        assert (res.argmin_angles.theta, res.argmin_angles.phi) == (0.0, 0.0)


class TestWorkDeficit:
    def test_bell(self):
        res = work_deficit_exact(bell("phi+"))
        assert res.value == pytest.approx(LN2, abs=1e-9)
        assert res.bits == pytest.approx(1, abs=1e-9)

    def test_zero_discord(self):
        rng = make_rng(42)
        for dim_b in (2, 3):
            for _ in range(10):
                assert work_deficit_exact(random_zero_discord(dim_b, rng)).value <= 1e-8

    def test_entropy_difference_identity(self):
        for rho in random_states(10, (2, 3), seed=8):
            res = work_deficit_exact(rho)
            sigma = dephase(rho, res.argmin_angles)
            diff = (von_neumann_entropy(sigma) - von_neumann_entropy(rho)) * LN2
            assert res.value == pytest.approx(diff, abs=1e-9)

    def test_exceeds_bound(self):
        for rho in random_states(40, (2, 2), seed=77):
            assert work_deficit_lower_bound(rho) <= work_deficit_exact(rho).bits + 1e-6

    def test_bits_requires_nats(self):
        with pytest.raises(ValueError):
            gqd_brute(bell("phi+")).bits


class TestOptimizer:
    def test_quadratic_bowl(self):
        target = (1.234, 4.321)

        def f(t, p):
            return (t - target[0]) ** 2 + (p - target[1]) ** 2

        val, ang = minimize_over_angles(f, 32, 20)
        assert val < 1e-12
        assert ang.theta == pytest.approx(target[0], abs=1e-6) and ang.phi == pytest.approx(target[1], abs=1e-6)

    def test_grid_doubling_stable(self):
        for rho in random_states(8, (2, 3), seed=90):
            for fn in (discord_A_exact, gqd_brute, work_deficit_exact):
                assert abs(fn(rho, 64).value - fn(rho, 128).value) < 1e-4

    def test_gqd_bound_below_brute(self):
        for rho in random_states(40, (2, 3), seed=91):
            assert gqd_lower_bound(rho).bound <= gqd_brute(rho).value + 1e-6


@pytest.mark.parametrize("pair", [("phi+", "phi-"), ("phi+", "psi+"), ("phi+", "psi-"),
                                  ("phi-", "psi+"), ("phi-", "psi-"), ("psi+", "psi-")])
def test_equal_bell_mixtures_are_classical(pair):
    # each pair is classically correlated in one of the x, y, z bases
    rho = DensityMatrix(0.5 * (bell(pair[0]).mat + bell(pair[1]).mat), 2, 2)
    assert discord_A_exact(rho).value <= 1e-8
    assert gqd_brute(rho).value <= 1e-10
