import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from isarrec.estimators import (
    DirectRecovery,
    GradientRecovery,
    IterativeRecovery,
    SMethod,
)
from isarrec.synthesis import Scatterer, make_mask, synthesize_uniform
from isarrec.transforms import smethod
from isarrec.validation import check_complex_grid, check_mask, check_positive, split_observed


def masked_scene(rng, M=16, N=16, count=4, frac=0.5, seed=3):
    cells = rng.choice(M * N, size=count, replace=False)
    scats = [Scatterer(float(rng.uniform(0.3, 1.0)), int(c) // N, int(c) % N)
             for c in cells]
    grid = synthesize_uniform(scats, M, N)
    mask = make_mask(M, N, frac, seed=seed)
    X = grid.copy()
    X[~mask] = np.nan + 1j * np.nan
    return grid, mask, X


class TestValidation:
    def test_grid_coercion_and_1d_promotion(self):
        out = check_complex_grid([1.0, 2.0, 3.0])
        assert out.shape == (3, 1)
        assert out.dtype == np.complex128

    def test_rejects_inf_and_empty(self):
        with pytest.raises(ValueError, match="non-finite"):
            check_complex_grid(np.array([[np.inf, 0.0]]))
        with pytest.raises(ValueError, match="infinities"):
            check_complex_grid(np.array([[np.inf, 0.0]]), allow_nan=True)
        with pytest.raises(ValueError, match="empty"):
            check_complex_grid(np.empty((0, 4)))
        with pytest.raises(ValueError, match="2-D"):
            check_complex_grid(np.zeros((2, 2, 2)))

    def test_nan_policy(self):
        arr = np.array([[1.0, np.nan]])
        with pytest.raises(ValueError):
            check_complex_grid(arr)
        out = check_complex_grid(arr, allow_nan=True)
        assert np.isnan(out[0, 1].real)

    def test_split_observed_both_axes(self):
        X = np.array([[1 + 1j, np.nan + 0j, 1 + np.nan * 1j, 2 + 2j]])
        filled, mask = split_observed(X)
        np.testing.assert_array_equal(mask, [[True, False, False, True]])
        assert filled[0, 1] == 0 and filled[0, 2] == 0

    def test_mask_checks(self):
        with pytest.raises(ValueError, match="shape"):
            check_mask(np.ones((2, 2), bool), (4, 4))
        with pytest.raises(ValueError, match="boolean"):
            check_mask(np.full((2, 2), 0.5), (2, 2))
        with pytest.raises(ValueError, match="at least"):
            check_mask(np.zeros((2, 2), bool), (2, 2))
        out = check_mask(np.array([[1, 0], [0, 1]]), (2, 2))
        assert out.dtype == bool

    def test_check_positive(self):
        assert check_positive(2, "x") == 2.0
        for bad in (0, -1, np.nan, np.inf):
            with pytest.raises(ValueError):
                check_positive(bad, "x")


class TestEstimators:
    def test_direct_roundtrip_with_nan_marking(self, rng):
        grid, mask, X = masked_scene(rng)
        est = DirectRecovery(k_hat=8)
        out = est.fit(X).transform(X)
        np.testing.assert_allclose(out, grid, atol=1e-8)
        assert est.report_.residual_available < 1e-9

    def test_iterative_roundtrip(self, rng):
        grid, mask, X = masked_scene(rng)
        out = IterativeRecovery(max_components=8).fit_transform(X)
        np.testing.assert_allclose(out, grid, atol=1e-8)

    def test_gradient_estimator_keeps_available_samples(self, rng):
        grid, mask, X = masked_scene(rng, frac=0.9, seed=5)
        est = GradientRecovery(corrections=0, max_sweeps=50)
        out = est.fit_transform(X)
        assert np.array_equal(out[mask], grid[mask])
        assert est.trace_.sweeps <= 50

    def test_get_params_and_clone(self):
        est = GradientRecovery(corrections=3, max_sweeps=77, shrink_on="precision")
        params = est.get_params()
        assert params["corrections"] == 3
        assert params["max_sweeps"] == 77
        assert params["shrink_on"] == "precision"
        twin = clone(est)
        assert twin.get_params() == params
        est2 = DirectRecovery().set_params(k_hat=5)
        assert est2.k_hat == 5

    def test_pipeline_recover_then_image(self, rng):
        grid, mask, X = masked_scene(rng)
        pipe = make_pipeline(DirectRecovery(k_hat=8), SMethod(corrections=2))
        img = pipe.fit_transform(X)
        expect = smethod(np.fft.fft2(grid), 2)
        np.testing.assert_allclose(img, expect, atol=1e-6)

    def test_smethod_estimator_rejects_incomplete_grid(self, rng):
        _, _, X = masked_scene(rng)
        with pytest.raises(ValueError, match="recover first"):
            SMethod().fit(X).transform(X)

    def test_fit_validates_input(self):
        with pytest.raises(ValueError):
            DirectRecovery().fit(np.zeros((2, 2, 2)))
