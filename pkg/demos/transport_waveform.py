"""Synthesize a transport waveform and verify it closed-loop.

Solves the control voltages that hold a 1.5 MHz axial well at 10 um
steps along a five-wire trap's RF null line, checks continuity, and
re-derives the secular frequencies from the solved voltages as an
independent verification.
"""

import math
import os

from paultrap import analysis, transport
from paultrap.core import MG24, mhz_to_angular
from fields_and_pseudopotential import build_five_wire

UM = 1e-6
OUT = os.path.join(os.path.dirname(__file__), "output")


def main():
    os.makedirs(OUT, exist_ok=True)
    model = build_five_wire()
    null = analysis.find_rf_null(model, analysis.default_start_point(model))
    z0 = null.point[2]
    print(f"null line height: {z0 / UM:.2f} um")

    target = mhz_to_angular(1.5)
    path = transport.path_points([-100 * UM, 0.0, z0], [100 * UM, 0.0, z0],
                                 step_size=10 * UM)
    spec = transport.WaveformSpec(path=path, target_omega_z=target,
                                  voltage_bounds=(-10.0, 10.0))
    waveform = transport.solve_waveform(model, MG24, spec)
    csv_path = os.path.join(OUT, "transport_waveform.csv")
    waveform.to_csv(csv_path)
    print(f"solved {len(waveform.steps)} steps "
          f"({path[0, 0] / UM:.0f} to {path[-1, 0] / UM:.0f} um), "
          f"wrote {csv_path}")

    check = transport.waveform_continuity_check(waveform, max_step_v=0.5)
    print(f"continuity check at 0.5 V/step: "
          f"{'pass' if check.passed else check.offenders}")

    print("\nclosed-loop verification (every 5th step):")
    print("  z_um   omega_z/2pi (MHz)   error    radials (MHz)")
    for step in waveform.steps[::5]:
        loaded = model.with_dc_voltages(step.electrode_voltages)
        sec = analysis.secular_frequencies(loaded, MG24, guess=step.position)
        mhz = sec.omegas / (2 * math.pi * 1e6)
        err = sec.omegas[0] / target - 1.0
        print(f"  {step.position[0] / UM:6.1f}   {mhz[0]:.5f}          "
              f"{err * 100:+.3f}%   {mhz[1]:.2f}, {mhz[2]:.2f}")

    v = waveform.voltage_matrix()
    print(f"\nvoltage range used: [{v.min():.3f}, {v.max():.3f}] V "
          f"across {len(waveform.channels)} channels")


if __name__ == "__main__":
    main()
