"""The electric-field-noise to motional-heating budget, end to end.

Walks the full chain for a surface-trap test zone with simulated
coupling constants (field per volt on each electrode): Johnson noise
behind the RC filters, battery-supplied control potentials, the RF
resonator's filtered Johnson noise, and RF amplitude-modulation heating
of a displaced ion.
"""

import math

from paultrap import noise
from paultrap.core import MG24, db_power_ratio, mhz_to_angular

# test-zone coupling constants (from a boundary-element style simulation)
C_EZ = 457.0       # V/m at the ion per volt on one endcap electrode
D_EZ = 231.0       # V/m per volt on the RF electrodes
DEZ_DZ = 23500.0   # V/m^2 per volt on the RF electrodes

OMEGA_Z = mhz_to_angular(3.0)
OMEGA_X = mhz_to_angular(10.0)
OMEGA_RF = mhz_to_angular(70.0)
V_RF = 50.0


def main():
    print("== reference conversion ==")
    rate = noise.heating_rate_from_se(MG24, OMEGA_Z, 1.23e-11)
    print(f"S_E = 1.23e-11 (V/m)^2/Hz at 3 MHz -> "
          f"{rate / 1e3:.3f} quanta/ms for 24Mg+")

    print("\n== RC filters ==")
    s_v = noise.johnson_voltage_psd(1000.0, 300.0)
    print(f"Johnson noise of the 1 kohm filter resistor: "
          f"sqrt(S_V) = {math.sqrt(s_v) * 1e9:.2f} nV/rtHz "
          f"({noise.dbm_per_hz(s_v):.1f} dBm/Hz into 50 ohm)")
    att = 1.0 / noise.rc_attenuation(OMEGA_Z, 1000.0, 820e-12)
    print(f"RC filter (1 kohm, 820 pF) power attenuation at 3 MHz: {att:.0f}")

    print("\n== resonator line shape (Q_L = 80 at 70 MHz) ==")
    for f_mhz in (70.0, 67.0, 60.0, 10.0, 3.0):
        a = noise.resonator_filter_attenuation(mhz_to_angular(f_mhz),
                                               OMEGA_RF, 80.0)
        print(f"  {f_mhz:5.1f} MHz: {a:7.1f} dB")
    w71 = mhz_to_angular(71.0)
    s_res = noise.resonator_johnson_psd(w71, w71, 80.0, 38e3, 300.0)
    print(f"resonator Johnson noise on resonance (38 kohm, 300 K): "
          f"{noise.dbm_per_hz(s_res):.1f} dBm/Hz into 50 ohm")

    print("\n== itemized budget at omega_z/2pi = 3 MHz ==")
    alpha2 = noise.relative_psd_from_dbc(-147.0)   # RF source noise floor
    sources = [
        noise.FilterJohnsonNoise(
            label="RC filter Johnson (4 endcaps)", resistance=1000.0,
            capacitance=820e-12, temperature=300.0, coupling=C_EZ,
            n_electrodes=4),
        noise.ControlElectrodeNoise(
            label="battery supply, 52 pV/rtHz at trap",
            s_v=(52e-12) ** 2, coupling=C_EZ, n_electrodes=4),
        noise.ResonatorJohnsonNoise(
            label="resonator Johnson at omega_z", omega0=OMEGA_RF,
            q_loaded=80.0, r_parallel=38e3, temperature=300.0,
            coupling=D_EZ),
        noise.RfAmAxialNoise(
            label="RF AM, axial (-147 dBc, 17 dB filtered)",
            omega_rf=OMEGA_RF, e0_axial=D_EZ * V_RF, de0_dz=DEZ_DZ * V_RF,
            relative_psd=alpha2 / db_power_ratio(17.0)),
    ]
    budget = noise.heating_budget(MG24, OMEGA_Z, sources)
    print(budget.table())

    print("\n== RF AM radial heating of a displaced ion ==")
    per_alpha2 = noise.rfam_radial_heating(
        MG24, OMEGA_X, 1.05e-6, 1.0 / db_power_ratio(27.0))
    print(f"ndot/alpha^2 = {per_alpha2:.3g} /s for x = 1.05 um "
          f"(27 dB resonator attenuation)")
    print(f"at the -147 dBc source floor: "
          f"{per_alpha2 * alpha2 / 1e3:.2f} quanta/ms")

    print("\n== exposed dielectric patch ==")
    e = noise.patch_field(1.0, 8e-6, 6e-6, 40e-6)
    print(f"1 V on an 8 um strip under 6 um electrodes, ion at 40 um: "
          f"{e:.0f} V/m")

    print("\n== coupling constants straight from a trap geometry ==")
    from paultrap import analysis
    from fields_and_pseudopotential import build_five_wire
    model = build_five_wire()
    null = analysis.find_rf_null(model, analysis.default_start_point(model))
    cc = noise.couplings_from_model(model, null.point, "t7")
    print(f"five-wire zone, endcap t7 at the null: "
          f"C_E = ({cc.c_e[0]:.0f}, {cc.c_e[1]:.0f}, {cc.c_e[2]:.0f}) V/m "
          f"per volt")
    print(f"RF basis field there: |D_E| = "
          f"{math.sqrt(sum(v * v for v in cc.d_e)):.2e} V/m per volt, "
          f"axial gradient {cc.de_dz:.2e} V/m^2 per volt")
    print("(a translation-invariant rail layout leaves no axial RF field "
          "at the null, so the RF-AM axial channel is closed by design)")


if __name__ == "__main__":
    main()
