"""Command-line entry point binding all toolkit modules.

Subcommands: analyze, fieldmap, crystal, spectrum, heating-budget,
resonator, transport, cantilever, qft, stability.  Structured results
are JSON; grids and sweeps are CSV.  Lengths are micrometers and
frequencies MHz at this boundary; everything internal is SI.

Exit codes: 0 success, 2 validation error, 3 convergence error,
64 unknown subcommand.  Errors are emitted as JSON on stderr.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import analysis, cantilever, crystal, fields, micromotion, noise, qft
from . import resonator as resonator_mod
from . import transport as transport_mod
from .core import (ConvergenceError, ValidationError, angular_to_mhz,
                   make_species, mhz_to_angular)

SCHEMA = "paultrap-kit/1"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_USAGE = 64

COMMANDS = ("analyze", "fieldmap", "crystal", "spectrum", "heating-budget",
            "resonator", "transport", "cantilever", "qft", "stability")


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        _print_usage(sys.stdout)
        return EXIT_OK
    if argv[0] not in COMMANDS:
        _print_usage(sys.stderr)
        _emit_error("usage", f"unknown subcommand {argv[0]!r}")
        return EXIT_USAGE
    try:
        return _dispatch(argv)
    except (ValidationError, FileNotFoundError, json.JSONDecodeError,
            KeyError) as exc:
        _emit_error("validation", _describe(exc))
        return EXIT_VALIDATION
    except (ConvergenceError, analysis.NotConfiningError,
            transport_mod.InfeasibleWaveformError,
            cantilever.StaticInstabilityError) as exc:
        _emit_error("convergence", _describe(exc))
        return EXIT_CONVERGENCE


def _describe(exc):
    if isinstance(exc, FileNotFoundError):
        return f"file not found: {exc.filename}"
    if isinstance(exc, KeyError):
        return f"missing required field {exc.args[0]!r}"
    return str(exc)


def _emit_error(kind, message):
    json.dump({"schema": SCHEMA, "error": {"type": kind, "message": message}},
              sys.stderr, sort_keys=True)
    sys.stderr.write("\n")


def _print_usage(stream):
    stream.write("usage: paultrap <command> [options]\n"
                 "commands: " + " ".join(COMMANDS) + "\n"
                 "run 'paultrap <command> --help' for command options\n")


def _dispatch(argv):
    cmd, rest = argv[0], argv[1:]
    handler = {
        "analyze": _cmd_analyze,
        "fieldmap": _cmd_fieldmap,
        "crystal": _cmd_crystal,
        "spectrum": _cmd_spectrum,
        "heating-budget": _cmd_heating_budget,
        "resonator": _cmd_resonator,
        "transport": _cmd_transport,
        "cantilever": _cmd_cantilever,
        "qft": _cmd_qft,
        "stability": _cmd_stability,
    }[cmd]
    return handler(rest)


def _parser(name, description):
    p = argparse.ArgumentParser(prog=f"paultrap {name}", description=description)
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    return p


def _add_species(p):
    p.add_argument("--species", default="24:1:24Mg+",
                   help="ion as MASS_AMU:CHARGE_E[:LABEL], default 24:1:24Mg+")


def _species_from_arg(text):
    parts = text.split(":")
    if len(parts) < 2:
        raise ValidationError("species must be MASS_AMU:CHARGE_E[:LABEL]")
    label = parts[2] if len(parts) > 2 else f"{parts[0]}amu{parts[1]}e"
    return make_species(float(parts[0]), int(parts[1]), label)


def _write_out(text, output):
    if output:
        with open(output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(doc, output):
    doc = dict(doc)
    doc.setdefault("schema", SCHEMA)
    _write_out(json.dumps(doc, indent=2, sort_keys=True) + "\n", output)


def _load_json(path):
    with open(path) as f:
        return json.load(f)


def _axis_range(text):
    """min:max:n in micrometers -> array in meters."""
    lo, hi, n = text.split(":")
    return np.linspace(float(lo), float(hi), int(n)) * 1e-6


# ---------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------

def _cmd_analyze(argv):
    p = _parser("analyze", "trap report: RF null, secular frequencies, "
                           "depth, Mathieu parameters")
    p.add_argument("--geometry", required=True, help="trap geometry JSON")
    _add_species(p)
    p.add_argument("--guess", help="starting point x,y,z in um")
    p.add_argument("--skip-depth", action="store_true",
                   help="skip the trap-depth search")
    args = p.parse_args(argv)

    model = fields.load_geometry(args.geometry)
    species = _species_from_arg(args.species)
    if args.guess:
        guess = np.array([float(v) for v in args.guess.split(",")]) * 1e-6
    else:
        guess = analysis.default_start_point(model)
    null = analysis.find_rf_null(model, guess)
    sec = analysis.secular_frequencies(model, species, guess=null.point)
    report = {
        "species": species.label,
        "rf_null_um": [v * 1e6 for v in null.point],
        "rf_null_residual_v_per_m_per_volt": null.residual,
        "equilibrium_um": [v * 1e6 for v in sec.null_point],
        "secular_mhz": [angular_to_mhz(w) for w in sec.omegas],
        "principal_axes": sec.axes.T.tolist(),
        "tilt_deg": sec.tilt_deg,
        "mathieu": _mathieu_per_axis(model, species, sec),
    }
    if not args.skip_depth:
        try:
            depth = analysis.trap_depth(model, species, guess=null.point)
            report["depth_mev"] = depth.depth_ev * 1e3
            report["escape_point_um"] = [v * 1e6 for v in depth.escape_point]
        except ConvergenceError as exc:
            report["depth_mev"] = None
            report["depth_error"] = str(exc)
    _dump_json(report, args.output)
    return EXIT_OK


def _mathieu_per_axis(model, species, sec):
    point = sec.null_point
    h = max(1e-3 * point[2], 1e-9)
    h_rf = fields.hessian_of_scalar(model.potential_rf_basis, point, h)
    h_dc = fields.hessian_of_scalar(model.potential_static, point, h)
    denom = species.mass * model.drive.omega_rf ** 2
    out = []
    for i in range(3):
        axis = sec.axes[:, i]
        curv_rf = float(axis @ h_rf @ axis) * model.drive.v_rf
        curv_dc = float(axis @ h_dc @ axis)
        out.append({"axis": axis.tolist(),
                    "q": 2.0 * species.charge * curv_rf / denom,
                    "a": 4.0 * species.charge * curv_dc / denom})
    return out


def _cmd_fieldmap(argv):
    p = _parser("fieldmap", "potential/field/pseudopotential lattice as CSV")
    p.add_argument("--geometry", required=True)
    _add_species(p)
    p.add_argument("--x", required=True, help="min:max:n in um")
    p.add_argument("--y", required=True, help="min:max:n in um")
    p.add_argument("--z", required=True, help="min:max:n in um")
    args = p.parse_args(argv)
    model = fields.load_geometry(args.geometry)
    species = _species_from_arg(args.species)
    fmap = fields.field_map(model, species, _axis_range(args.x),
                            _axis_range(args.y), _axis_range(args.z))
    _write_out(fmap.to_csv_string(), args.output)
    return EXIT_OK


def _cmd_crystal(argv):
    p = _parser("crystal", "linear Coulomb crystal equilibrium positions")
    _add_species(p)
    p.add_argument("--omega-z-mhz", type=float, required=True,
                   help="axial secular frequency, MHz")
    p.add_argument("--n", type=int, required=True, help="ion count")
    args = p.parse_args(argv)
    species = _species_from_arg(args.species)
    res = crystal.equilibrium_positions(species, mhz_to_angular(args.omega_z_mhz),
                                        args.n)
    lines = ["# units: position_um um", "ion,position_um"]
    for i, z in enumerate(res.positions):
        lines.append(f"{i},{z * 1e6:.9g}")
    _write_out("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _cmd_spectrum(argv):
    p = _parser("spectrum", "micromotion-sideband fluorescence spectrum CSV")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma-mhz", type=float, default=40.0,
                   help="transition linewidth gamma/2pi, MHz")
    p.add_argument("--rf-mhz", type=float, default=71.0,
                   help="trap RF frequency, MHz")
    p.add_argument("--wavelength-nm", type=float, default=280.0)
    p.add_argument("--span-mhz", type=float, default=None,
                   help="detuning half-span (default 2.5x RF)")
    p.add_argument("--points", type=int, default=1001)
    args = p.parse_args(argv)
    line = micromotion.LineParams(gamma=mhz_to_angular(args.gamma_mhz),
                                  omega_rf=mhz_to_angular(args.rf_mhz),
                                  wavelength=args.wavelength_nm * 1e-9)
    rate = micromotion.fluorescence_spectrum(line, args.beta)
    span = args.span_mhz if args.span_mhz else 2.5 * args.rf_mhz
    detunings = np.linspace(-span, span, args.points)
    rows = ["# units: detuning_mhz MHz; relative_rate dimensionless",
            "detuning_mhz,relative_rate"]
    values = rate(mhz_to_angular(detunings))
    for d, v in zip(detunings, np.atleast_1d(values)):
        rows.append(f"{d:.9g},{v:.12g}")
    _write_out("\n".join(rows) + "\n", args.output)
    return EXIT_OK


_BUDGET_SOURCES = {
    "control_voltage": lambda s, w: noise.ControlElectrodeNoise(
        label=s.get("label", "control voltage noise"),
        s_v=s["s_v_v2_per_hz"], coupling=s["coupling_v_per_m"],
        n_electrodes=s.get("n_electrodes", 1),
        filter_rc=tuple(s["filter_rc"]) if s.get("filter_rc") else None,
        omega=w),
    "filter_johnson": lambda s, w: noise.FilterJohnsonNoise(
        label=s.get("label", "RC filter Johnson noise"),
        resistance=s["resistance_ohm"], capacitance=s["capacitance_f"],
        temperature=s.get("temperature_k", 300.0),
        coupling=s["coupling_v_per_m"],
        n_electrodes=s.get("n_electrodes", 1), omega=w),
    "resonator_johnson": lambda s, w: noise.ResonatorJohnsonNoise(
        label=s.get("label", "resonator Johnson noise"),
        omega0=mhz_to_angular(s["omega0_mhz"]), q_loaded=s["q_loaded"],
        r_parallel=s["r_parallel_ohm"],
        temperature=s.get("temperature_k", 300.0),
        coupling=s["coupling_v_per_m"], omega=w),
    "rfam_axial": lambda s, w: noise.RfAmAxialNoise(
        label=s.get("label", "RF AM axial heating"),
        omega_rf=mhz_to_angular(s["omega_rf_mhz"]),
        e0_axial=s["e0_axial_v_per_m"], de0_dz=s["de0_dz_v_per_m2"],
        relative_psd=s["relative_psd_per_hz"],
        two_sideband=s.get("two_sideband", False), omega=w),
    "rfam_radial": lambda s, w: noise.RfAmRadialNoise(
        label=s.get("label", "RF AM radial heating"),
        displacement=s["displacement_m"],
        relative_psd=s["relative_psd_per_hz"],
        two_sideband=s.get("two_sideband", False), omega=w),
    "field": lambda s, w: noise.FieldNoise(
        label=s.get("label", "direct field noise"),
        s_e=s["s_e_v2m2_per_hz"], omega=w),
}


def _cmd_heating_budget(argv):
    p = _parser("heating-budget", "itemized motional-heating budget from a "
                                  "JSON scenario")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--format", choices=("json", "table"), default="json")
    args = p.parse_args(argv)
    doc = _load_json(args.scenario)
    sp = doc["species"]
    species = make_species(sp["mass_amu"], sp["charge_e"], sp.get("label", ""))
    omega = mhz_to_angular(doc["omega_mhz"])
    sources = []
    for s in doc["sources"]:
        kind = s["type"]
        if kind not in _BUDGET_SOURCES:
            raise ValidationError(f"unknown noise source type {kind!r}")
        sources.append(_BUDGET_SOURCES[kind](s, omega))
    budget = noise.heating_budget(species, omega, sources)
    if args.format == "table":
        _write_out(budget.table() + "\n", args.output)
    else:
        _dump_json(budget.as_dict(), args.output)
    return EXIT_OK


def _cmd_resonator(argv):
    p = _parser("resonator", "RLC resonator analyses (JSON in/out)")
    p.add_argument("--input", required=True,
                   help="JSON file with 'analysis' and parameters")
    args = p.parse_args(argv)
    doc = _load_json(args.input)
    kind = doc["analysis"]
    if kind == "rlc":
        m = resonator_mod.rlc_from_measurement(
            mhz_to_angular(doc["omega0_mhz"]), doc["q_loaded"],
            doc["inductance_h"])
        out = {"analysis": kind, "capacitance_pf": m.c * 1e12,
               "r_parallel_kohm": m.r_parallel / 1e3,
               "omega0_mhz": angular_to_mhz(m.omega0), "q_loaded": m.q}
    elif kind == "chip-loss":
        m = resonator_mod.rlc_from_measurement(
            mhz_to_angular(doc["omega0_mhz"]), doc["q_before"],
            doc["inductance_h"])
        loss = resonator_mod.chip_loss(m, doc["q_after"], doc["v_rf"])
        out = {"analysis": kind, "r_chip_kohm": loss.r_chip / 1e3,
               "r_combined_kohm": loss.r_combined / 1e3,
               "dissipated_mw": loss.dissipated * 1e3}
    elif kind == "loaded-q":
        out = {"analysis": kind,
               "q_loaded": resonator_mod.loaded_q(doc["q0"], doc["kappa"])}
    elif kind == "q-from-linewidth":
        out = {"analysis": kind,
               "q_loaded": resonator_mod.q_from_linewidth(
                   mhz_to_angular(doc["omega0_mhz"]),
                   mhz_to_angular(doc["fwhm_mhz"]))}
    else:
        raise ValidationError(f"unknown resonator analysis {kind!r}")
    _dump_json(out, args.output)
    return EXIT_OK


def _cmd_transport(argv):
    p = _parser("transport", "solve a transport waveform, emit CSV")
    p.add_argument("--geometry", required=True)
    p.add_argument("--spec", required=True, help="waveform spec JSON")
    _add_species(p)
    args = p.parse_args(argv)
    model = fields.load_geometry(args.geometry)
    species = _species_from_arg(args.species)
    doc = _load_json(args.spec)
    if "path_um" in doc:
        path = np.asarray(doc["path_um"], dtype=float) * 1e-6
    else:
        path = transport_mod.path_points(
            np.asarray(doc["start_um"], dtype=float) * 1e-6,
            np.asarray(doc["stop_um"], dtype=float) * 1e-6,
            doc.get("step_um", 10.0) * 1e-6)
    spec = transport_mod.WaveformSpec(
        path=path, target_omega_z=mhz_to_angular(doc["omega_z_mhz"]),
        voltage_bounds=tuple(doc.get("bounds_v", (-10.0, 10.0))),
        regularization=doc.get("regularization",
                               transport_mod.DEFAULT_REGULARIZATION))
    wf = transport_mod.solve_waveform(
        model, species, spec,
        axis=doc.get("axis", (1.0, 0.0, 0.0)),
        channel_map=doc.get("channels"))
    _write_out(wf.to_csv_string(), args.output)
    return EXIT_OK


def _cmd_cantilever(argv):
    p = _parser("cantilever", "RF-cooling sweep tables from a device+circuit "
                              "JSON")
    p.add_argument("--input", required=True)
    args = p.parse_args(argv)
    doc = _load_json(args.input)
    d = doc["device"]
    device = cantilever.CantileverDevice(
        h_c=d["length_m"], s=d["thickness_m"], w=d["width_m"],
        rho=d["density_kg_m3"], d0=d["gap_m"],
        h=d.get("overlap_m", d["length_m"]),
        omega_c=mhz_to_angular(d["f_c_mhz"]), q_c_mech=d["q_mech"])
    c = doc["circuit"]
    c_c = c.get("c_c_f")
    if c_c is None:
        c_c = cantilever.parallel_plate_capacitance(device.w, device.h,
                                                    device.d0)
    circuit = cantilever.circuit_from_resonance(
        c["l0_h"], mhz_to_angular(c["f0_mhz"]), c_c, c["q_rf"])
    sweep = doc["sweep"]
    t_c = doc.get("temperature_k", 300.0)
    rows = ["# units: power_w W; detuning_khz kHz; gamma_prime_rad_s rad/s; "
            "f_c_hz Hz; t_eff_k K",
            "power_w,detuning_khz,gamma_prime_rad_s,f_c_hz,t_eff_k"]
    if sweep["kind"] == "power":
        det = 2.0 * math.pi * sweep["detuning_khz"] * 1e3
        powers = np.linspace(sweep["min_w"], sweep["max_w"], sweep["points"])
        for pw in powers:
            rows.append(_cantilever_row(device, circuit, pw, det, t_c))
    elif sweep["kind"] == "detuning":
        pw = sweep["power_w"]
        dets = 2.0 * math.pi * 1e3 * np.linspace(
            sweep["min_khz"], sweep["max_khz"], sweep["points"])
        for det in dets:
            rows.append(_cantilever_row(device, circuit, pw, det, t_c))
    else:
        raise ValidationError(f"unknown sweep kind {sweep['kind']!r}")
    _write_out("\n".join(rows) + "\n", args.output)
    return EXIT_OK


def _cantilever_row(device, circuit, power, detuning, t_c):
    v2 = cantilever.v_max_squared_from_power(power, circuit)
    try:
        res = cantilever.damping_and_shift(device, circuit, v2, detuning)
        gamma = device.gamma_mech
        t_eff = t_c * gamma / (gamma + res.gamma_prime) \
            if gamma + res.gamma_prime > 0 else float("inf")
        return "%.9g,%.9g,%.9g,%.9g,%.9g" % (
            power, detuning / (2e3 * math.pi), res.gamma_prime,
            res.omega_shifted / (2.0 * math.pi), t_eff)
    except cantilever.StaticInstabilityError:
        return "%.9g,%.9g,nan,nan,nan" % (power, detuning / (2e3 * math.pi))


def _cmd_qft(argv):
    p = _parser("qft", "semiclassical QFT distributions; 'qft sweep' emits "
                       "the phased period-3 grid")
    p.add_argument("mode", nargs="?", choices=("sweep",),
                   help="optional sweep mode")
    p.add_argument("--state", default="period2",
                   help="state kind or a JSON file of complex amplitude pairs")
    p.add_argument("--phi-r", type=float, default=0.0,
                   help="relative phase for period3_phase, radians")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--shots", type=int, default=0,
                   help="sample a synthetic measured dataset of this size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depolarize", type=float, default=0.0)
    p.add_argument("--points", type=int, default=64, help="sweep grid size")
    args = p.parse_args(argv)

    if args.mode == "sweep":
        phis = np.linspace(0.0, 2.0 * math.pi, args.points, endpoint=False)
        grid = qft.phase_sweep(phis)
        rows = ["# units: phi_r rad; p_* probability",
                "phi_r," + ",".join(f"p_{j:03b}" for j in range(8))]
        for phi, row in zip(phis, grid):
            rows.append("%.9g," % phi + ",".join("%.12g" % v for v in row))
        _write_out("\n".join(rows) + "\n", args.output)
        return EXIT_OK

    state = _state_from_arg(args.state, args.phi_r)
    exact = qft.semiclassical_qft(state)
    dist = exact
    out = {"state": args.state, "n_qubits": state.n_qubits}
    if args.shots > 0:
        sampled, counts = qft.sample_semiclassical(state, args.shots, args.seed)
        dist = sampled
        out["shots"] = args.shots
        out["seed"] = args.seed
        out["counts"] = counts.tolist()
    if args.depolarize > 0:
        dist = qft.depolarize(dist, args.depolarize)
        out["depolarize"] = args.depolarize
    out["probabilities"] = {
        format(j, f"0{state.n_qubits}b"): dist.probabilities[j]
        for j in range(dist.probabilities.size)}
    out["sso_vs_exact"] = qft.sso(dist, exact)
    if args.format == "csv":
        rows = ["# units: probability dimensionless", "outcome,probability"]
        for j in range(dist.probabilities.size):
            rows.append(f"{format(j, f'0{state.n_qubits}b')},"
                        f"{dist.probabilities[j]:.12g}")
        _write_out("\n".join(rows) + "\n", args.output)
    else:
        _dump_json(out, args.output)
    return EXIT_OK


def _state_from_arg(text, phi_r):
    if text in qft.STATE_KINDS:
        return qft.prepare(text, phi_r=phi_r)
    doc = _load_json(text)
    amps = np.array([complex(re, im) for re, im in doc["amplitudes"]])
    return qft.PureState(amps / np.linalg.norm(amps))


def _cmd_stability(argv):
    p = _parser("stability", "Mathieu stability by Floquet monodromy")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--q", type=float, help="single q value")
    p.add_argument("--q-scan", help="min:max:n scan emitted as CSV")
    args = p.parse_args(argv)
    if (args.q is None) == (args.q_scan is None):
        raise ValidationError("provide exactly one of --q or --q-scan")
    if args.q is not None:
        res = analysis.mathieu_stability(analysis.MathieuParams(args.a, args.q))
        _dump_json({"a": args.a, "q": args.q, "stable": res.stable,
                    "beta": None if math.isnan(res.beta) else res.beta,
                    "beta_smallq": res.beta_smallq,
                    "monodromy_trace": res.monodromy_trace}, args.output)
        return EXIT_OK
    lo, hi, n = args.q_scan.split(":")
    rows = ["# units: all dimensionless", "q,a,stable,beta"]
    for q in np.linspace(float(lo), float(hi), int(n)):
        res = analysis.mathieu_stability(analysis.MathieuParams(args.a, q))
        beta = "" if math.isnan(res.beta) else "%.9g" % res.beta
        rows.append(f"{q:.9g},{args.a:.9g},{int(res.stable)},{beta}")
    _write_out("\n".join(rows) + "\n", args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
