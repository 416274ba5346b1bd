import itertools

import numpy as np
import pytest

from paultrap import crystal
from paultrap.core import ValidationError, make_species, mhz_to_angular


def brute_force_positions(n, span=4.0, rounds=60):
    """Independent oracle: symmetry-reduced grid refinement of the
    dimensionless crystal energy for n <= 4."""

    def energy(u):
        e = 0.5 * np.sum(u * u)
        for i, j in itertools.combinations(range(len(u)), 2):
            e += 1.0 / abs(u[i] - u[j])
        return e

    if n == 1:
        return np.zeros(1)
    if n == 2:
        grid = np.linspace(1e-3, span, 4001)
        best = min(grid, key=lambda d: energy(np.array([-d / 2, d / 2])))
        lo, hi = best - 2 * span / 4000, best + 2 * span / 4000
        for _ in range(rounds):
            grid = np.linspace(lo, hi, 17)
            best = min(grid, key=lambda d: energy(np.array([-d / 2, d / 2])))
            lo, hi = best - (hi - lo) / 8, best + (hi - lo) / 8
        return np.array([-best / 2, best / 2])
    if n == 3:
        grid = np.linspace(1e-3, span, 4001)
        best = min(grid, key=lambda d: energy(np.array([-d, 0.0, d])))
        lo, hi = best - 2 * span / 4000, best + 2 * span / 4000
        for _ in range(rounds):
            grid = np.linspace(lo, hi, 17)
            best = min(grid, key=lambda d: energy(np.array([-d, 0.0, d])))
            lo, hi = best - (hi - lo) / 8, best + (hi - lo) / 8
        return np.array([-best, 0.0, best])
    if n == 4:
        def config(a, b):
            return np.array([-b, -a, a, b])

        pts = [(a, b) for a in np.linspace(1e-3, span / 2, 220)
               for b in np.linspace(1e-3, span, 220) if b > a]
        a, b = min(pts, key=lambda p: energy(config(*p)))
        da = db = span / 200
        for _ in range(rounds):
            cand = [(a + da * i, b + db * j)
                    for i in (-1, -0.5, 0, 0.5, 1)
                    for j in (-1, -0.5, 0, 0.5, 1)]
            cand = [(x, y) for x, y in cand if 0 < x < y]
            a, b = min(cand, key=lambda p: energy(config(*p)))
            da *= 0.6
            db *= 0.6
        return config(a, b)
    raise ValueError("oracle supports n <= 4")


class TestCharacteristicLength:
    def test_worked_example(self, mg24):
        s = crystal.characteristic_length(mg24, mhz_to_angular(1.0))
        assert s == pytest.approx(5.27e-6, rel=1e-3)

    def test_frequency_scaling(self, mg24):
        s1 = crystal.characteristic_length(mg24, mhz_to_angular(1.0))
        s4 = crystal.characteristic_length(mg24, mhz_to_angular(4.0))
        assert s4 == pytest.approx(s1 * 4 ** (-2.0 / 3.0), rel=1e-12)

    def test_charge_scaling(self):
        one = make_species(24, 1, "q1")
        two = make_species(24, 2, "q2")
        w = mhz_to_angular(1.0)
        assert crystal.characteristic_length(two, w) == pytest.approx(
            crystal.characteristic_length(one, w) * 2 ** (2.0 / 3.0),
            rel=1e-12)

    def test_requires_positive_frequency(self, mg24):
        with pytest.raises(ValidationError):
            crystal.characteristic_length(mg24, 0.0)


class TestEquilibriumPositions:
    def test_single_ion_at_center(self, mg24):
        res = crystal.equilibrium_positions(mg24, mhz_to_angular(1.0), 1)
        assert res.positions[0] == 0.0
        assert res.converged

    def test_two_ion_separation(self, mg24):
        res = crystal.equilibrium_positions(mg24, mhz_to_angular(1.0), 2)
        sep = res.positions[1] - res.positions[0]
        assert sep == pytest.approx(2 ** (1.0 / 3.0) * res.length_scale,
                                    rel=1e-10)

    def test_three_ion_spacing(self, mg24):
        res = crystal.equilibrium_positions(mg24, mhz_to_angular(1.0), 3)
        gaps = np.diff(res.positions)
        expect = (5.0 / 4.0) ** (1.0 / 3.0) * res.length_scale
        assert gaps[0] == pytest.approx(expect, rel=1e-10)
        assert gaps[1] == pytest.approx(expect, rel=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 5, 10, 20, 50])
    def test_gradient_and_symmetry(self, mg24, n):
        u, ok = crystal.dimensionless_positions(n)
        assert ok
        assert np.linalg.norm(crystal._force_residual(u)) < 1e-10
        # strictly increasing, symmetric about center, zero center of mass
        assert np.all(np.diff(u) > 0)
        assert np.allclose(u, -u[::-1], atol=1e-9)
        assert abs(np.mean(u)) < 1e-12

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_against_brute_force_grid(self, mg24, n):
        u, _ = crystal.dimensionless_positions(n)
        oracle = brute_force_positions(n)
        assert np.allclose(u, oracle, atol=1e-4)

    def test_count_bounds(self, mg24):
        with pytest.raises(ValidationError):
            crystal.equilibrium_positions(mg24, mhz_to_angular(1.0), 0)
        with pytest.raises(ValidationError):
            crystal.equilibrium_positions(mg24, mhz_to_angular(1.0), 51)
