import numpy as np
import pytest

from paultrap import fields
from paultrap.core import RfDrive, make_species, mhz_to_angular

UM = 1e-6


def five_wire_model(v_rf=50.0, f_rf_mhz=100.0, seg_w_um=100.0, n_seg=15,
                    dc_voltages=None, rail_len_um=3000.0):
    """Symmetric five-wire surface trap with segmented control electrodes.

    RF rails run along x at y in [25, 75] um and [-75, -25] um; the
    center strip and the two outer banks are cut into n_seg segments
    (labels c*/t*/b*).  Ion height for infinite rails is sqrt(25*75) =
    43.3 um.
    """
    half = rail_len_um / 2 * UM
    rails = [fields.PlanarElectrode("rf", "RF", (
        (-half, 25 * UM, half, 75 * UM),
        (-half, -75 * UM, half, -25 * UM)))]
    dc = []
    x0 = -n_seg * seg_w_um / 2
    for k in range(n_seg):
        xa = (x0 + k * seg_w_um) * UM
        xb = (x0 + (k + 1) * seg_w_um) * UM
        dc.append(fields.PlanarElectrode(f"c{k}", "DC",
                                         ((xa, -25 * UM, xb, 25 * UM),)))
        dc.append(fields.PlanarElectrode(f"t{k}", "DC",
                                         ((xa, 75 * UM, xb, 275 * UM),)))
        dc.append(fields.PlanarElectrode(f"b{k}", "DC",
                                         ((xa, -275 * UM, xb, -75 * UM),)))
    drive = RfDrive(mhz_to_angular(f_rf_mhz), v_rf)
    return fields.PlanarTrapModel(tuple(rails + dc), drive, dc_voltages or {})


def four_wire_asymmetric(v_rf=50.0, f_rf_mhz=100.0):
    """Pure-RF trap with rails of unequal width (off-center null)."""
    rails = [fields.PlanarElectrode("rf", "RF", (
        (-2000 * UM, 25 * UM, 2000 * UM, 100 * UM),
        (-2000 * UM, -75 * UM, 2000 * UM, -25 * UM)))]
    drive = RfDrive(mhz_to_angular(f_rf_mhz), v_rf)
    return fields.PlanarTrapModel(tuple(rails), drive, {})


@pytest.fixture(scope="session")
def mg24():
    return make_species(24, +1, "24Mg+")


@pytest.fixture(scope="session")
def five_wire():
    return five_wire_model()


@pytest.fixture(scope="session")
def four_wire():
    return four_wire_asymmetric()


def grid_minimax_depth(u_grid, start_cell):
    """Brute-force trap depth on a 2D energy grid.

    Descends from start_cell to the local minimum, then floods cells in
    order of increasing energy until the minimum's basin touches the
    grid boundary; the energy level at which that happens is the escape
    saddle.  Returns (depth, min_energy).
    """
    ny, nz = u_grid.shape

    # steepest grid descent to the local minimum
    i, j = start_cell
    while True:
        best = (u_grid[i, j], i, j)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                ni, nj = i + di, j + dj
                if 0 <= ni < ny and 0 <= nj < nz and u_grid[ni, nj] < best[0]:
                    best = (u_grid[ni, nj], ni, nj)
        if (best[1], best[2]) == (i, j):
            break
        i, j = best[1], best[2]
    min_flat = i * nz + j
    u_min = u_grid[i, j]

    flat_u = u_grid.ravel()
    order = np.argsort(flat_u, kind="stable")
    boundary = np.zeros_like(u_grid, dtype=bool)
    boundary[0, :] = boundary[-1, :] = True
    boundary[:, 0] = boundary[:, -1] = True
    boundary = boundary.ravel()

    parent = np.arange(u_grid.size + 1)
    bnode = u_grid.size

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        parent[find(a)] = find(b)

    added = np.zeros(u_grid.size, dtype=bool)
    for flat in order:
        added[flat] = True
        fi, fj = divmod(int(flat), nz)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = fi + di, fj + dj
            if 0 <= ni < ny and 0 <= nj < nz and added[ni * nz + nj]:
                union(flat, ni * nz + nj)
        if boundary[flat]:
            union(flat, bnode)
        if find(min_flat) == find(bnode):
            return flat_u[flat] - u_min, u_min
    raise AssertionError("flood never reached the boundary")
