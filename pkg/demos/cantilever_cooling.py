"""RF cooling of a micro cantilever: damping, spring shift, temperature.

Models a 7 kHz silicon cantilever capacitively coupled to a 100 MHz
quarter-wave resonator.  Sweeps drive power at fixed blue detuning and
detuning at fixed power, reporting the RF-induced damping, the shifted
resonance and the effective temperature; writes both sweeps as CSV.
"""

import math
import os

import numpy as np

from paultrap import cantilever
from paultrap.core import mhz_to_angular

OUT = os.path.join(os.path.dirname(__file__), "output")

T_ROOM = 310.0     # starting mode temperature, K


def build():
    device = cantilever.CantileverDevice(
        h_c=1.5e-3, s=14e-6, w=200e-6, rho=2330.0, d0=16e-6, h=1.5e-3,
        omega_c=2 * math.pi * 7e3, q_c_mech=20000.0)
    c_c = cantilever.parallel_plate_capacitance(device.w, device.h, device.d0)
    circuit = cantilever.circuit_from_resonance(330e-9, mhz_to_angular(100.0),
                                                c_c, 234.0)
    return device, circuit


def t_eff_thermal(device, gamma_prime):
    """Thermal-noise-only effective temperature T Gamma/(Gamma+Gamma').

    Returns None when the net damping is non-positive: red detuning
    strong enough to overcome the intrinsic damping self-oscillates
    instead of settling to a temperature.
    """
    g = device.gamma_mech
    if g + gamma_prime <= 0:
        return None
    return T_ROOM * g / (g + gamma_prime)


def main():
    os.makedirs(OUT, exist_ok=True)
    device, circuit = build()
    print(f"cantilever: f_c = {device.omega_c / 2 / math.pi / 1e3:.1f} kHz, "
          f"effective mass {device.effective_mass * 1e12:.2f} ng, "
          f"mode integrals xi' = {device.xi_prime:.3f}, "
          f"xi_c'' = {device.xi_c_dprime:.3f}")
    print(f"circuit: C_c = {circuit.c_c * 1e15:.0f} fF, "
          f"C_0 = {circuit.c0 * 1e12:.2f} pF, "
          f"gamma/2pi = {circuit.gamma / 2 / math.pi / 1e3:.0f} kHz")

    detuning = 2 * math.pi * 90e3
    print(f"\n== power sweep at detuning +90 kHz ==")
    rows = ["# units: power_mw mW; gamma_prime rad/s; f_shift_hz Hz; t_eff K",
            "power_mw,gamma_prime,f_shift_hz,t_eff"]
    for p_mw in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0):
        v2 = cantilever.v_max_squared_from_power(p_mw * 1e-3, circuit)
        try:
            res = cantilever.damping_and_shift(device, circuit, v2, detuning)
        except cantilever.StaticInstabilityError:
            print(f"  {p_mw:6.1f} mW: static pull-in (kappa >= 1)")
            rows.append(f"{p_mw},nan,nan,nan")
            continue
        t = t_eff_thermal(device, res.gamma_prime)
        shift = (res.omega_shifted - device.omega_c) / (2 * math.pi)
        rows.append(f"{p_mw},{res.gamma_prime:.6g},{shift:.6g},{t:.4g}")
        print(f"  {p_mw:6.1f} mW: Gamma' = {res.gamma_prime:8.2f} rad/s, "
              f"df_c = {shift:7.1f} Hz, T_eff = {t:6.1f} K")
    with open(os.path.join(OUT, "cantilever_power_sweep.csv"), "w") as f:
        f.write("\n".join(rows) + "\n")

    p = 1e-3
    v2 = cantilever.v_max_squared_from_power(p, circuit)
    res = cantilever.damping_and_shift(device, circuit, v2, detuning)
    print(f"\nper-watt slopes at low power: "
          f"Gamma'/P = {res.gamma_prime / p:.0f} (rad/s)/W, "
          f"kappa/P = {res.kappa / p:.2f} 1/W")

    print("\n== detuning sweep at 10 mW ==")
    v2 = cantilever.v_max_squared_from_power(10e-3, circuit)
    rows = ["# units: detuning_khz kHz; gamma_prime rad/s; t_eff K",
            "detuning_khz,gamma_prime,t_eff"]
    for dk in np.linspace(-400, 400, 17):
        try:
            res = cantilever.damping_and_shift(device, circuit, v2,
                                               2 * math.pi * dk * 1e3)
        except cantilever.StaticInstabilityError:
            rows.append(f"{dk},nan,nan")
            continue
        t = t_eff_thermal(device, res.gamma_prime)
        t_text = f"{t:.6g}" if t is not None else "nan"
        rows.append(f"{dk},{res.gamma_prime:.6g},{t_text}")
        if dk in (-200.0, -50.0, 50.0, 90.0, 200.0):
            state = (f"T_eff = {t:7.1f} K" if t is not None
                     else "self-oscillates (net damping < 0)")
            print(f"  {dk:+6.0f} kHz: Gamma' = {res.gamma_prime:+9.2f} rad/s "
                  f" {state}")
    with open(os.path.join(OUT, "cantilever_detuning_sweep.csv"), "w") as f:
        f.write("\n".join(rows) + "\n")

    print("\n== ground-state prospects (cryogenic stripline example) ==")
    r = cantilever.ground_state_ratio(0.1, 2 * math.pi * 20e9, 5000.0,
                                      20000.0)
    print(f"heating/cooling ratio R = {r:.3f} at 0.1 K, 20 GHz, "
          f"Q_RF = 5000, Q_c = 20000  (R << 1 allows n < 1)")


if __name__ == "__main__":
    main()
