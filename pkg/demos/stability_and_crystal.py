"""Secular frequencies, Mathieu stability and linear Coulomb crystals.

Reproduces the desk numbers for a 24Mg+ microtrap: the 14.4 MHz radial
secular frequency of the ideal quadrupole, the Floquet stability
boundary near q = 0.908, and ion crystal spacings at a 1 MHz axial well.
"""

import math
import os

import numpy as np

from paultrap import analysis, crystal, fields
from paultrap.core import MG24, RfDrive, mhz_to_angular

OUT = os.path.join(os.path.dirname(__file__), "output")


def main():
    os.makedirs(OUT, exist_ok=True)
    drive = RfDrive(mhz_to_angular(100.0), 50.0)
    r_scale = 50e-6

    print("== ideal quadrupole, 24Mg+, V0 = 50 V, Omega/2pi = 100 MHz, "
          "R = 50 um ==")
    omega_r = fields.quadrupole_secular_frequency(MG24, drive, r_scale)
    print(f"closed-form radial secular frequency: "
          f"{omega_r / (2 * math.pi * 1e6):.4f} MHz")
    quad = fields.IdealQuadrupole(r_scale=r_scale, drive=drive)
    sec = analysis.secular_frequencies(quad, MG24,
                                       guess=np.array([1e-6, 1e-6, 1e-5]))
    print("Hessian eigenanalysis gives (MHz):",
          np.round(sec.omegas / (2 * math.pi * 1e6), 4))

    mp = analysis.mathieu_params(r_scale, drive.v_rf, 0.0, drive, MG24)
    print(f"Mathieu parameters: a = {mp.a:.4f}, q = {mp.q:.4f}")

    print("\n== Floquet stability scan (a = 0) ==")
    rows = ["# units: all dimensionless", "q,stable,beta,beta_smallq"]
    boundary = None
    for q in np.linspace(0.0, 1.0, 101):
        res = analysis.mathieu_stability(analysis.MathieuParams(0.0, q))
        rows.append(f"{q:.3f},{int(res.stable)},"
                    f"{'' if math.isnan(res.beta) else f'{res.beta:.6f}'},"
                    f"{res.beta_smallq:.6f}")
        if boundary is None and not res.stable:
            boundary = q
    path = os.path.join(OUT, "mathieu_stability_scan.csv")
    with open(path, "w") as f:
        f.write("\n".join(rows) + "\n")
    print(f"first unstable q on the scan grid: {boundary:.3f} "
          "(textbook boundary 0.908)")
    print(f"wrote scan to {path}")

    print("\n== linear crystals at omega_z/2pi = 1.0 MHz ==")
    omega_z = mhz_to_angular(1.0)
    s = crystal.characteristic_length(MG24, omega_z)
    print(f"characteristic length s = {s * 1e6:.3f} um")
    for n in (2, 3, 5, 10):
        res = crystal.equilibrium_positions(MG24, omega_z, n)
        gaps = np.diff(res.positions) * 1e6
        print(f"n = {n:2d}: center gap {gaps[len(gaps) // 2]:.3f} um, "
              f"chain length {np.ptp(res.positions) * 1e6:.2f} um")
    s3 = (5 / 4) ** (1 / 3) * s
    back = analysis.secular_from_spacing(s3, MG24)
    print(f"3-ion spacing {s3 * 1e6:.3f} um inverts to omega_z/2pi = "
          f"{back / (2 * math.pi * 1e6):.4f} MHz")


if __name__ == "__main__":
    main()
