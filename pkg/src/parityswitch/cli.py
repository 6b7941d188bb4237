"""Command-line entry point.

Every run resolves its configuration against the subcommand schema, writes
its result file(s) and a manifest echoing the resolved parameters, the tool
version and all warnings raised during the run. Exit codes: 0 success,
2 validation error, 3 numerical error, 4 calibration failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .config import SCHEMAS, fmt_float, load_file, resolve, set_path, split_reserved, to_json
from .errors import CalibrationError, NumericalError, ParitySwitchError, ValidationError
from .units import GHZ, MHZ, NS, TWO_PI

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_CALIBRATION = 0, 2, 3, 4
MANIFEST_VERSION = 1


class Output:
    """Collects result files for one run."""

    def __init__(self, out_dir: str, stem: str):
        self.out_dir = out_dir
        self.stem = stem
        self.files: Dict[str, str] = {}

    def write(self, suffix: str, text: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        name = f"{self.stem}{suffix}"
        path = os.path.join(self.out_dir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        self.files[suffix.lstrip("_.") or "out"] = name
        return path

    def csv(self, suffix: str, header: List[str], rows) -> str:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_cell(v) for v in row))
        return self.write(suffix, "\n".join(lines) + "\n")

    def json(self, suffix: str, obj) -> str:
        return self.write(suffix, to_json(obj) + "\n")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    return str(v)


def _ghz(w: float) -> float:
    return float(w) / GHZ


# --------------------------------------------------------------------------
# builders

def build_circuit(c: Dict[str, Any]):
    from .coupler import table1_circuit, table1_circuit_from_ratio

    kw = dict(omega_q2=c["omega_q2_ghz"] * GHZ, alpha_c=c["alpha_c_mhz"] * MHZ,
              omega_c_max=c["omega_c_max_ghz"] * GHZ, beta=dict(c["beta"]), levels=c["levels"])
    if c["ratio_q2"] is not None:
        circ = table1_circuit_from_ratio(c["ratio_q2"], **kw)
    else:
        circ = table1_circuit(alpha_q2=c["alpha_q2_mhz"] * MHZ, **kw)
    ng = c["n_g"]
    if any(ng[k] != 0.0 for k in ("q1", "c", "q2")):
        from .spectral import TransmonParams

        def with_ng(p, n):
            return TransmonParams(p.e_j, p.e_c, n, p.parity)

        circ = circ.replace(q1=with_ng(circ.q1, ng["q1"]), c=with_ng(circ.c, ng["c"]),
                            q2=with_ng(circ.q2, ng["q2"]))
    return circ


def build_noise(p: Dict[str, Any]):
    from .design.noise import CircuitSpec, NoiseModel

    model = NoiseModel(
        t1_ref=p["t1_ref_us"] * 1e-6, tphi_ref=p["tphi_ref_us"] * 1e-6, ref_ej=p["ref_ej_ghz"],
        ref_ec=p["ref_ec_ghz"], temperature=p["temperature_mk"] * 1e-3,
        leakage_gamma=p["leakage_gamma"], junction_asymmetry_d=p["junction_asymmetry_d"],
        model_kind=p["model"],
    )
    spec = CircuitSpec(t_sqg=p["t_sqg_ns"] * NS, t_tqg=p["t_tqg_ns"] * NS)
    g = p["grid"]
    if g["n"] < 2:
        raise ValidationError("grid.n must be at least 2")
    ej = np.geomspace(g["ej_min_ghz"], g["ej_max_ghz"], g["n"])
    ec = np.geomspace(g["ec_min_ghz"], g["ec_max_ghz"], g["n"])
    return model, spec, (ej, ec)


def _dispersions(circ, omega_c, mode):
    from .coupler import circuit_dispersions

    return circuit_dispersions(circ, omega_c, mode)


# --------------------------------------------------------------------------
# subcommands

def run_spectrum(p, out: Output):
    from .spectral import (TransmonParams, charge_dispersion_asymptotic, charge_dispersion_exact,
                           diagonalize_charge_basis)

    n = p["n_levels"]
    plus = diagonalize_charge_basis(TransmonParams(p["e_j_ghz"], p["e_c_ghz"], p["n_g"], 1), n,
                                    p["charge_cutoff"])
    minus = diagonalize_charge_basis(TransmonParams(p["e_j_ghz"], p["e_c_ghz"], p["n_g"], -1), n,
                                     p["charge_cutoff"])
    rows = []
    for m in range(n):
        rows.append((m, plus.levels[m], minus.levels[m],
                     charge_dispersion_exact(p["e_j_ghz"], p["e_c_ghz"], m, p["charge_cutoff"]),
                     charge_dispersion_asymptotic(p["e_j_ghz"], p["e_c_ghz"], m)))
    out.csv(".csv", ["m", "E_m_plus_GHz", "E_m_minus_GHz", "eps_m_exact_GHz",
                     "eps_m_asymptotic_GHz"], rows)


def run_zz(p, out: Output):
    from .coupler import zz_perturbative, zz_rate

    circ = build_circuit(p["circuit"])
    s = p["sweep"]
    grid = np.linspace(s["omega_c_min_ghz"], s["omega_c_max_ghz"], s["n"])
    rows = []
    for f in grid:
        wc = f * GHZ
        try:
            ex = zz_rate(circ, wc) / TWO_PI / 1e3
        except NumericalError as exc:
            warnings.warn(f"omega_c = {f:.6g} GHz: {exc}")
            ex = float("nan")
        try:
            pt = zz_perturbative(circ, wc) / TWO_PI / 1e3
        except NumericalError as exc:
            warnings.warn(f"omega_c = {f:.6g} GHz: {exc}")
            pt = float("nan")
        rows.append((float(f), ex, pt))
    out.csv(".csv", ["omega_c_GHz", "zeta_exact_kHz", "zeta_pert_kHz"], rows)


def run_idle(p, out: Output):
    from .coupler import find_idling_frequency, zz_rate

    circ = build_circuit(p["circuit"])
    w = p["window"]
    window = None
    if w["min_ghz"] is not None or w["max_ghz"] is not None:
        if w["min_ghz"] is None or w["max_ghz"] is None:
            raise ValidationError("window needs both min_ghz and max_ghz")
        window = (w["min_ghz"] * GHZ, w["max_ghz"] * GHZ)
    roots = find_idling_frequency(circ, window, p["scan_step_mhz"] * MHZ)
    res = {"idling_frequencies_ghz": [_ghz(r) for r in roots],
           "residuals_hz": [zz_rate(circ, r) / TWO_PI for r in roots]}
    out.json(".json", res)
    return res


def _default_omega_c(circ, given_ghz):
    from .pulse import default_idle

    return default_idle(circ) if given_ghz is None else given_ghz * GHZ


def run_parity_zz(p, out: Output):
    from .coupler import parity_zz_spread

    circ = build_circuit(p["circuit"])
    wc = _default_omega_c(circ, p["omega_c_ghz"])
    rep = parity_zz_spread(circ, wc, _dispersions(circ, wc, p["dispersion_mode"]),
                           exact=p["exact_rediagonalization"])
    khz = 1.0 / TWO_PI / 1e3
    per = []
    for ps, v in rep.per_parity.items():
        row = {"parity_state": list(ps), "zeta_taylor_khz": v * khz}
        if rep.per_parity_exact is not None:
            row["zeta_exact_khz"] = rep.per_parity_exact[ps] * khz
        per.append(row)
    res = {
        "omega_c_ghz": _ghz(wc),
        "zeta_zz_hz": rep.zeta_zz / TWO_PI,
        "per_parity": per,
        "rms_khz": rep.rms * khz,
        "rms_exact_khz": None if rep.rms_exact is None else rep.rms_exact * khz,
        "d_zeta_d_alpha": dict(rep.d_alpha),
        "d_zeta_d_omega": dict(rep.d_omega),
        "dispersions_ghz": {k: list(v) for k, v in rep.dispersions.items()},
    }
    out.json(".json", res)
    return res


def run_effective(p, out: Output):
    from .errors import ContractError
    from .pulse import default_idle, resonant_plateau
    from .swt import (effective_phase, leakage_susceptibility, phase_susceptibility,
                      swt_parameters, validate_assumptions)

    circ = build_circuit(p["circuit"])
    wc = resonant_plateau(circ, default_idle(circ)) if p["omega_c_ghz"] is None else p["omega_c_ghz"] * GHZ
    eff = swt_parameters(circ, wc)
    t_g = eff.rabi_period if p["t_g_ns"] is None else p["t_g_ns"] * NS
    try:
        simple = phase_susceptibility(eff, t_g, "simplified")
    except ContractError as exc:
        warnings.warn(f"simplified susceptibility undefined: {exc}")
        simple = None
    rep = validate_assumptions(circ, wc, p["threshold"])
    res = {
        "omega_c_ghz": _ghz(wc),
        "effective": {
            "omega_q1_t_ghz": _ghz(eff.omega_q1_t), "omega_q2_t_ghz": _ghz(eff.omega_q2_t),
            "alpha_q1_t_ghz": _ghz(eff.alpha_q1_t), "alpha_q2_t_ghz": _ghz(eff.alpha_q2_t),
            "g_0110_t_ghz": _ghz(eff.g_0110_t), "g_1102_t_ghz": _ghz(eff.g_1102_t),
            "delta_t_ghz": _ghz(eff.delta_t), "rabi_ghz": _ghz(eff.rabi),
        },
        "t_g_ns": t_g / NS,
        "phase_rad": float(effective_phase(eff, t_g)),
        "susceptibility": {
            "dphi_dalpha_simplified_ns": None if simple is None else simple / NS,
            "dphi_dalpha_full_ns": phase_susceptibility(eff, t_g, "full") / NS,
            "d2p11_dalpha2_ns2": leakage_susceptibility(eff, t_g) / NS**2,
        },
        "assumptions": [{"name": c.name, "ratio": c.ratio, "passed": c.passed,
                         "description": c.description} for c in rep.checks],
        "all_assumptions_passed": rep.all_passed,
    }
    out.json(".json", res)
    return res


def _gate_report(circ, pulse, omega_idle, p, dt):
    from .pulse import extract_gate, parity_averaged_gate_analysis

    disp = _dispersions(circ, omega_idle, p["dispersion_mode"])
    an = parity_averaged_gate_analysis(circ, pulse, omega_idle, p["target_phase"], dt, disp)
    fid = an.per_parity_fidelity()
    per = [{"parity_state": list(ps), "fidelity": fid[ps], "phi_rad": pr.phi, "p11": pr.p11,
            "leakage": pr.leakage} for ps, pr in an.processes.items()]
    g = extract_gate(circ, pulse, omega_idle, dt=dt)
    return {
        "omega_idle_ghz": _ghz(omega_idle),
        "pulse": {"amplitude_ghz": pulse.amplitude_a / GHZ, "tau_c_ns": pulse.tau_c / NS,
                  "sigma_ns": pulse.sigma / NS, "total_ns": pulse.total_t / NS},
        "per_parity": per,
        "pair_fidelities": [{"parity_q1_c": list(k), "fidelity": v}
                            for k, v in an.pair_fidelities.items()],
        "averaged_fidelity": an.averaged_fidelity,
        "averaged_infidelity": an.averaged_infidelity,
        "phase_diff": an.phase_diff,
        "t_g_eff": g.t_g / NS,
        "t_g_eff_units": "ns",
        "n_rabi": g.n_rabi,
        "leakage": an.leakage,
    }


def run_gate_simulate(p, out: Output):
    from .pulse import (COMP_LABELS, FlattopGaussian, _comp_matrix, default_idle, idle_basis,
                        propagate)

    circ = build_circuit(p["circuit"])
    pl = p["pulse"]
    pulse = FlattopGaussian.from_ghz_ns(pl["amplitude_ghz"], pl["tau_c_ns"], pl["sigma_ns"])
    omega_idle = _default_omega_c(circ, p["omega_idle_ghz"])
    dt = p["dt_ns"] * NS
    res = _gate_report(circ, pulse, omega_idle, p, dt)
    out.json(".json", res)
    tr = p["trajectory"]
    if tr["enabled"]:
        ps = None if tr["parity_state"] is None else tuple(tr["parity_state"])
        if ps is not None and any(v not in (-1, 1) for v in ps):
            raise ValidationError("trajectory.parity_state entries must be +1 or -1")
        disp = _dispersions(circ, omega_idle, p["dispersion_mode"]) if ps else None
        basis = idle_basis(circ, omega_idle, ps, disp)
        s = _comp_matrix(basis)
        labels = tuple(COMP_LABELS) + ("02",)
        cols = np.column_stack([s, basis.vector("02")])
        psi0 = cols[:, labels.index(tr["initial_state"])]
        traj = propagate(circ, pulse, psi0, tr["samples"], omega_idle, ps, "magnus", dt, disp)
        pops = np.abs(traj.states @ cols.conj()) ** 2
        rows = [(t / NS, *pop) for t, pop in zip(traj.times, pops)]
        out.csv("_trajectory.csv", ["t_ns"] + [f"pop_{lab}" for lab in labels], rows)
    return res


def run_gate_calibrate(p, out: Output):
    from .pulse import calibrate_pulse

    circ = build_circuit(p["circuit"])
    omega_idle = _default_omega_c(circ, p["omega_idle_ghz"])
    dt = p["dt_ns"] * NS
    try:
        cal = calibrate_pulse(
            circ, p["target_phase"], omega_idle, p["sigma_ns"] * NS,
            tuple(x * GHZ for x in p["amplitude_bounds_ghz"]),
            tuple(x * NS for x in p["tau_c_bounds_ns"]), tuple(p["grid_shape"]), dt,
            maxiter=p["maxiter"], parity_refine=p["parity_refine"],
            success_threshold=p["success_threshold"],
        )
    except CalibrationError as exc:
        if exc.best is not None:
            out.json(".json", {"converged": False, "infidelity": exc.infidelity,
                               "best_pulse": {"amplitude_ghz": exc.best.amplitude_a / GHZ,
                                              "tau_c_ns": exc.best.tau_c / NS,
                                              "sigma_ns": exc.best.sigma / NS}})
        raise
    pair = None if math.isnan(cal.pair_infidelity) else cal.pair_infidelity
    res = {"converged": True, "calibration_infidelity": cal.infidelity,
           "pair_infidelity": pair, "evaluations": cal.evaluations}
    res.update(_gate_report(circ, cal.pulse, omega_idle,
                            dict(p, dispersion_mode="asymptotic"), dt))
    out.json(".json", res)
    return res


def run_channel(p, out: Output):
    from .channel import ParityChannel, channel_fidelity, n_gate_infidelity

    ch = ParityChannel(p["phi0"], p["delta_phi"], p["delta_p11"], p["p_plus"])
    f = channel_fidelity(ch)
    res = {"fidelity_exact": f.exact, "fidelity_quadratic": f.quadratic,
           "n": p["n"], "n_gate_exact": None, "n_gate_linear": None}
    if ch.delta_p11 == 0.0:
        ng = n_gate_infidelity(ch, p["n"])
        res["n_gate_exact"], res["n_gate_linear"] = ng.exact, ng.linear
    else:
        warnings.warn("n-gate infidelity is defined for delta_p11 = 0 only; omitted")
    res["n_gate_quantity"] = "infidelity"
    out.json(".json", res)
    return res


_TERM_COLS = ("parity", "t1_tqg", "tphi_tqg", "sqg_t1", "sqg_tphi", "leak", "thermal")


def _landscape_csv(out: Output, suffix: str, land):
    rows = []
    for i, ec in enumerate(land.ec):
        for j, ej in enumerate(land.ej):
            rows.append((float(ej), float(ec), float(land.one_minus_p[i, j]),
                         *(float(land.terms[k][i, j]) for k in _TERM_COLS),
                         land.dominant[i, j], bool(land.mask[i, j])))
    out.csv(suffix, ["ej_ghz", "ec_ghz", "one_minus_p"] + [f"term_{k}" for k in _TERM_COLS]
            + ["dominant", "in_optimal_region"], rows)


def run_landscape(p, out: Output):
    from .design.metric import landscape_scan

    model, spec, (ej, ec) = build_noise(p)
    land = landscape_scan(ej, ec, model, spec, p["percentile"])
    _landscape_csv(out, ".csv", land)
    cj, cc = land.masked_centroid()
    return {"centroid_ej_ghz": cj, "centroid_ec_ghz": cc}


def run_optimize_step(p, out: Output):
    from .design.loop import optimize_loop

    model, spec, grid = build_noise(p)
    m = p["measured"]
    if m["t1_us"] is None or m["tphi_us"] is None:
        raise ValidationError("measured.t1_us and measured.tphi_us are required")
    measured = {"t1": m["t1_us"] * 1e-6, "tphi": m["tphi_us"] * 1e-6,
                "temperature": None if m["temperature_mk"] is None else m["temperature_mk"] * 1e-3}
    cur = (p["current"]["e_j_ghz"], p["current"]["e_c_ghz"])
    prop = optimize_loop(measured, cur, model, spec, grid, p["percentile"])
    _landscape_csv(out, "_landscape.csv", prop.landscape)
    res = {
        "proposal": {"e_j_ghz": prop.e_j, "e_c_ghz": prop.e_c},
        "converged": prop.converged,
        "current": {"e_j_ghz": cur[0], "e_c_ghz": cur[1]},
        "breakdown_at_current": prop.breakdown,
        "anchored_model": {"t1_ref_us": prop.model.t1_ref * 1e6,
                           "tphi_ref_us": prop.model.tphi_ref * 1e6,
                           "ref_ej_ghz": prop.model.ref_ej, "ref_ec_ghz": prop.model.ref_ec,
                           "temperature_mk": prop.model.temperature * 1e3,
                           "leakage_ref": prop.model.leakage_ref},
        "landscape_file": out.files.get("landscape.csv"),
    }
    out.json(".json", res)
    return res


RUNNERS: Dict[str, Callable] = {
    "spectrum": run_spectrum,
    "zz": run_zz,
    "idle": run_idle,
    "parity-zz": run_parity_zz,
    "effective": run_effective,
    "gate-simulate": run_gate_simulate,
    "gate-calibrate": run_gate_calibrate,
    "channel": run_channel,
    "landscape": run_landscape,
    "optimize-step": run_optimize_step,
}


# --------------------------------------------------------------------------
# dispatch

def _parse_value(text: str):
    import yaml

    return yaml.safe_load(text)


def gather_config(name: str, args) -> Tuple[dict, int]:
    cfg = load_file(args.config) if getattr(args, "config", None) else {}
    sub = cfg.pop("subcommand", None)
    if sub is not None and sub != name:
        raise ValidationError(f"config is for subcommand {sub!r}, not {name!r}")
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ValidationError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        set_path(cfg, k.strip(), _parse_value(v))
    for key, attr in FLAG_KEYS.get(name, ()):
        val = getattr(args, attr, None)
        if val is not None:
            set_path(cfg, key, val)
    measured = getattr(args, "measured", None)
    if measured:
        set_path(cfg, "measured", _measured_from_file(measured))
    params, meta = split_reserved(cfg)
    seed = meta.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValidationError("seed must be an integer")
    return resolve(SCHEMAS[name], params), seed


def _measured_from_file(path: str) -> dict:
    data = load_file(path)
    return data.get("measured", data)


FLAG_KEYS = {
    "channel": (("delta_phi", "delta_phi"), ("delta_p11", "delta_p11"), ("phi0", "phi0"),
                ("n", "n"), ("p_plus", "p_plus")),
}


def dispatch(name: str, args) -> int:
    """Run one subcommand; returns the exit status."""
    out = Output(args.out, name)
    caught: List[str] = []
    status = EXIT_OK
    params: Dict[str, Any] = {}
    seed = 0
    error: Optional[str] = None
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        try:
            params, seed = gather_config(name, args)
            np.random.seed(seed)
            result = RUNNERS[name](params, out)
            if result is not None and not args.quiet:
                print(to_json(result))
        except CalibrationError as exc:
            status, error = EXIT_CALIBRATION, str(exc)
        except ValidationError as exc:
            status, error = EXIT_VALIDATION, str(exc)
        except (NumericalError, ParitySwitchError, ArithmeticError, np.linalg.LinAlgError) as exc:
            status, error = EXIT_NUMERICAL, str(exc)
        for w in rec:
            msg = f"{w.category.__name__}: {w.message}"
            if msg not in caught:
                caught.append(msg)
    if error is not None:
        print(f"error: {error}", file=sys.stderr)
    if status == EXIT_VALIDATION and not params:
        return status
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "tool": "parityswitch",
        "version": __version__,
        "subcommand": name,
        "config": dict(params, seed=seed),
        "status": status,
        "error": error,
        "warnings": caught,
        "outputs": dict(sorted(out.files.items())),
    }
    out.json("_manifest.json", manifest)
    return status


def run_validate(args) -> int:
    try:
        cfg = load_file(args.config)
        name = args.subcommand or cfg.get("subcommand")
        if name is None:
            raise ValidationError("no subcommand given (use --subcommand or a 'subcommand' key)")
        name = name.replace(" ", "-")
        if name not in SCHEMAS:
            raise ValidationError(f"unknown subcommand {name!r}")
        ns = argparse.Namespace(config=args.config, set=None)
        params, seed = gather_config(name, ns)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(to_json({"subcommand": name, "config": dict(params, seed=seed), "valid": True}))
    return EXIT_OK


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", "-c", help="YAML/JSON configuration or run manifest")
    p.add_argument("--out", "-o", default=".", help="output directory (default: .)")
    p.add_argument("--set", "-s", action="append", metavar="KEY=VALUE",
                   help="override a configuration value by dotted key path")
    p.add_argument("--quiet", "-q", action="store_true", help="do not echo JSON results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parityswitch",
        description="Charge-parity switching analysis for tunable-coupler CZ gates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "charge-basis spectrum and charge dispersion of one transmon",
        "zz": "static ZZ sweep over the coupler frequency",
        "idle": "idling coupler frequencies (ZZ = 0)",
        "parity-zz": "parity-resolved ZZ at the idling point",
        "effective": "reduced-model parameters, susceptibilities and assumption checks",
        "channel": "parity-switch Kraus channel fidelities",
        "landscape": "(E_J, E_C) performance-metric scan",
        "optimize-step": "one iteration of the design loop",
    }
    for name, h in helps.items():
        p = sub.add_parser(name, help=h)
        _common(p)
        if name == "channel":
            p.add_argument("--delta-phi", dest="delta_phi", type=float)
            p.add_argument("--delta-p11", dest="delta_p11", type=float)
            p.add_argument("--phi0", type=float)
            p.add_argument("--p-plus", dest="p_plus", type=float)
            p.add_argument("--n", type=int)
        if name == "optimize-step":
            p.add_argument("--measured", help="JSON/YAML file with measured t1_us, tphi_us")
    gate = sub.add_parser("gate", help="pulsed CZ simulation and calibration")
    gsub = gate.add_subparsers(dest="gate_command", required=True)
    for name, h in (("simulate", "simulate a flux pulse for all parity states"),
                    ("calibrate", "calibrate the flux pulse for a CZ")):
        _common(gsub.add_parser(name, help=h))
    val = sub.add_parser("validate", help="check a configuration against its schema")
    val.add_argument("config")
    val.add_argument("--subcommand", help="schema to validate against")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate":
        return run_validate(args)
    name = f"gate-{args.gate_command}" if args.command == "gate" else args.command
    return dispatch(name, args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
