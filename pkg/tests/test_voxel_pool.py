import numpy as np
import pytest
import torch

from triplanekit.encoders import voxel_pool
from triplanekit.errors import DataError

from helpers import central_difference_check


def brute_force_voxel_mean(feats: np.ndarray, coords: np.ndarray, n: int) -> np.ndarray:
    """Per-point binning oracle.

    Each point joins the cell floor((p + 0.5) * n) (clamped); a cell's value is
    the sequential sum of member features, in lexicographic (coords, feats)
    member order, divided by the member count.
    """
    c = feats.shape[1]
    bins: dict[tuple, list[int]] = {}
    for l in range(len(feats)):
        key = tuple(min(n - 1, max(0, int(np.floor((coords[l, a] + 0.5) * n))))
                    for a in range(3))
        bins.setdefault(key, []).append(l)
    grid = np.zeros((c, n, n, n), dtype=feats.dtype)
    for (i, j, k), members in bins.items():
        members.sort(key=lambda l: (tuple(coords[l]), tuple(feats[l])))
        acc = np.zeros(c, dtype=feats.dtype)
        for l in members:
            acc = acc + feats[l]
        grid[:, i, j, k] = acc / len(members)
    return grid


def test_single_point_fills_its_cell():
    f = torch.tensor([[1.5, -2.0, 0.25]], dtype=torch.float64)
    p = torch.tensor([[-0.49, -0.49, -0.49]], dtype=torch.float64)
    grid = voxel_pool(f, p, 4)
    assert torch.equal(grid[:, 0, 0, 0], f[0])
    assert grid.abs().sum() == f.abs().sum()


def test_two_points_same_cell_mean_exact():
    f = torch.tensor([[1.0, 3.0], [2.0, 5.0]], dtype=torch.float64)
    p = torch.tensor([[0.1, 0.1, 0.1], [0.11, 0.12, 0.13]], dtype=torch.float64)
    grid = voxel_pool(f, p, 2)
    assert torch.equal(grid[:, 1, 1, 1], torch.tensor([1.5, 4.0], dtype=torch.float64))


def test_boundary_point_clamps_into_last_cell():
    f = torch.ones(1, 2, dtype=torch.float64)
    p = torch.tensor([[0.5, 0.5, 0.5]], dtype=torch.float64)
    grid = voxel_pool(f, p, 4)
    assert grid[0, 3, 3, 3] == 1.0


@pytest.mark.parametrize("n_cells", [2, 4, 8, 16])
def test_matches_brute_force_oracle_bitwise(n_cells):
    rng = np.random.default_rng(n_cells)
    for _ in range(5):
        n_points = rng.integers(1, 501)
        feats = rng.standard_normal((n_points, 7))
        coords = rng.uniform(-0.5, 0.5, size=(n_points, 3))
        got = voxel_pool(torch.from_numpy(feats), torch.from_numpy(coords), n_cells)
        want = brute_force_voxel_mean(feats, coords, n_cells)
        assert np.array_equal(got.numpy(), want)


def test_permutation_gives_bit_identical_grid():
    rng = np.random.default_rng(0)
    feats = rng.standard_normal((300, 5))
    coords = rng.uniform(-0.5, 0.5, size=(300, 3))
    base = voxel_pool(torch.from_numpy(feats), torch.from_numpy(coords), 4)
    for seed in range(3):
        perm = np.random.default_rng(seed).permutation(300)
        shuffled = voxel_pool(torch.from_numpy(feats[perm]),
                              torch.from_numpy(coords[perm]), 4)
        assert torch.equal(base, shuffled)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    feats = torch.tensor(rng.standard_normal((40, 4)), requires_grad=True)
    coords = torch.tensor(rng.uniform(-0.5, 0.5, size=(40, 3)))
    weights = torch.tensor(rng.standard_normal((4, 3, 3, 3)))

    def loss():
        return (voxel_pool(feats, coords, 3) * weights).sum()

    central_difference_check(loss, [feats], n_coords=12)


def test_invalid_inputs_rejected():
    f = torch.ones(3, 2)
    p = torch.zeros(3, 3)
    with pytest.raises(DataError):
        voxel_pool(f, p, 0)
    with pytest.raises(DataError):
        voxel_pool(f, torch.zeros(2, 3), 4)
