"""Analytic surface-trap fields and the pseudopotential map.

Builds a five-wire surface-electrode trap (two RF rails flanking a
grounded center strip, segmented control electrodes outside), locates
the RF null analytically, and exports a transverse pseudopotential map.
If matplotlib is installed a contour plot is saved next to the CSV.
"""

import math
import os

import numpy as np

from paultrap import analysis, fields
from paultrap.core import MG24, RfDrive, mhz_to_angular

UM = 1e-6
OUT = os.path.join(os.path.dirname(__file__), "output")


def build_five_wire():
    """RF rails at y in [25, 75] um (both signs), 15 control segments."""
    rails = fields.PlanarElectrode("rf", "RF", (
        (-1500 * UM, 25 * UM, 1500 * UM, 75 * UM),
        (-1500 * UM, -75 * UM, 1500 * UM, -25 * UM)))
    dc = []
    for k in range(15):
        xa, xb = (k * 100 - 750) * UM, (k * 100 - 650) * UM
        dc.append(fields.PlanarElectrode(f"c{k}", "DC",
                                         ((xa, -25 * UM, xb, 25 * UM),)))
        dc.append(fields.PlanarElectrode(f"t{k}", "DC",
                                         ((xa, 75 * UM, xb, 275 * UM),)))
        dc.append(fields.PlanarElectrode(f"b{k}", "DC",
                                         ((xa, -275 * UM, xb, -75 * UM),)))
    drive = RfDrive(mhz_to_angular(100.0), 50.0)
    return fields.PlanarTrapModel((rails, *dc), drive, {})


def main():
    os.makedirs(OUT, exist_ok=True)
    model = build_five_wire()

    print("Five-wire surface trap, 24Mg+, V_rf = 50 V, Omega/2pi = 100 MHz")
    null = analysis.find_rf_null(model, analysis.default_start_point(model))
    print(f"RF null at height {null.point[2] / UM:.2f} um  "
          f"(gapless-plate prediction sqrt(25*75) = "
          f"{math.sqrt(25 * 75):.2f} um)")
    print(f"residual |E| at the null: {null.residual:.2e} V/m per volt")

    pp_at = fields.pseudopotential_ev(model, MG24,
                                      null.point + np.array([0, 10e-6, 0]))
    print(f"pseudopotential 10 um off-axis: {pp_at * 1e3:.2f} meV")

    # transverse map through the null
    ys = np.linspace(-80, 80, 161) * UM
    zs = np.linspace(5, 120, 116) * UM
    fmap = fields.field_map(model, MG24, [0.0], ys, zs)
    csv_path = os.path.join(OUT, "five_wire_pseudopotential.csv")
    fmap.to_csv(csv_path)
    print(f"wrote transverse field map to {csv_path}")

    # cross-check against the ideal quadrupole oracle
    drive = model.drive
    quad = fields.IdealQuadrupole(r_scale=50 * UM, drive=drive)
    omega_r = fields.quadrupole_secular_frequency(MG24, drive, 50 * UM)
    x = 2 * UM
    harmonic = 0.5 * MG24.mass * omega_r ** 2 * x ** 2
    print(f"ideal-quadrupole check at x = 2 um: "
          f"pseudopotential / (1/2 m w_r^2 x^2) = "
          f"{fields.pseudopotential(quad, MG24, [x, 0, 0]) / harmonic:.9f}")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping the contour plot")
        return
    pp = fmap.phi_pp_ev.reshape(len(ys), len(zs))
    fig, ax = plt.subplots(figsize=(6, 4))
    levels = np.linspace(0, min(pp.max(), 0.5), 40)
    cs = ax.contourf(ys / UM, zs / UM, pp.T, levels=levels, cmap="magma")
    fig.colorbar(cs, label="pseudopotential (eV)")
    ax.plot(null.point[1] / UM, null.point[2] / UM, "w+", markersize=12)
    ax.set_xlabel("y (um)")
    ax.set_ylabel("z (um)")
    ax.set_title("Radial pseudopotential of the five-wire trap")
    png_path = os.path.join(OUT, "five_wire_pseudopotential.png")
    fig.savefig(png_path, dpi=150, bbox_inches="tight")
    print(f"wrote contour plot to {png_path}")


if __name__ == "__main__":
    main()
