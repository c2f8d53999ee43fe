"""Command-line interface: steady | sweep | traj | calibrate | theory.

Configuration is a sectioned INI file; flags override file values.  Every
dimensioned entry must carry an explicit unit suffix ("0.02 meV",
"1 per_ns", "2000 ns"); bare numbers for dimensioned quantities are
rejected.  All outputs embed the resolved parameter set and the package
version.  Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, bundles, calibrate
from .errors import BundleQEDError
from .fock import HilbertSpace
from .model import PRESET_NAMES, SystemParams, preset
from .observables import (default_wigner_grid, photon_distribution,
                          reduce_cavity, wigner)
from .solve import steady_state_autotruncate, steady_state_for
from .sweeps import SweepSpec, linear_grid, log_grid, refine_grid, run_sweep, write_csv
from .trajectories import default_gap_threshold, empirical_statistics, run_ensemble
from .units import (HBAR_MEV_PS, convert_rate, convert_time, energy_unit_for,
                    time_unit_for)


class ConfigError(Exception):
    """Invalid or ambiguous configuration input; exits with code 2."""


RATE_UNITS = ("meV", "ueV", "per_ps", "per_ns", "per_us")
TIME_UNITS = ("ps", "ns", "us")


def parse_quantity(text: str | None, kind: str, target: str) -> float:
    """Parse 'VALUE UNIT' and convert to the internal unit.

    kind is 'rate' (energies and angular frequencies) or 'time'; a missing
    or unknown unit suffix is an error, never a silent default.
    """
    if text is None:
        raise ConfigError(f"missing required {kind} entry")
    parts = text.split()
    if len(parts) != 2:
        raise ConfigError(f"expected 'VALUE UNIT', got {text!r} "
                          f"(units: {RATE_UNITS if kind == 'rate' else TIME_UNITS})")
    try:
        value = float(parts[0])
    except ValueError as exc:
        raise ConfigError(f"bad numeric value in {text!r}") from exc
    unit = parts[1]
    if kind == "rate":
        if unit not in RATE_UNITS:
            raise ConfigError(f"unknown rate/energy unit {unit!r} in {text!r}")
        return convert_rate(value, unit, target)
    if unit not in TIME_UNITS:
        raise ConfigError(f"unknown time unit {unit!r} in {text!r}")
    return convert_time(value, unit, time_unit_for_internal(target))


def time_unit_for_internal(internal: str) -> str:
    return {"per_ps": "ps", "per_ns": "ns"}[internal]


def load_config(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path} not found or unreadable")
    return parser


def resolve_params(config: configparser.ConfigParser) -> SystemParams:
    """[system] section -> SystemParams, preset plus unit-suffixed overrides."""
    if not config.has_section("system"):
        raise ConfigError("missing [system] section")
    section = config["system"]
    name = section.get("preset", fallback=None)
    if name is not None:
        if name not in PRESET_NAMES:
            raise ConfigError(f"unknown preset {name!r}; valid: {PRESET_NAMES}")
        params = preset(name)
        internal = params.unit_system
    else:
        internal = section.get("unit_system", "per_ps")
        if internal not in ("per_ps", "per_ns"):
            raise ConfigError(f"unit_system must be per_ps or per_ns, got {internal!r}")
        required = ("g", "f", "gamma", "kappa", "delta_cx")
        missing = [key for key in required if key not in section]
        if missing:
            raise ConfigError(f"[system] without preset needs keys {missing}")
        values = {key: parse_quantity(section[key], "rate", internal) for key in required}
        lx_text = section.get("delta_lx", "auto")
        delta_lx = (bundles.bundle_resonance_detuning(2, values["f"], values["delta_cx"])
                    if lx_text.strip() == "auto"
                    else parse_quantity(lx_text, "rate", internal))
        try:
            params = SystemParams(unit_system=internal, delta_lx=delta_lx,
                                  gamma_phi=0.0, **values)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    overrides = {}
    for key in ("f", "gamma", "kappa", "gamma_phi", "delta_lx", "delta_cx"):
        if name is not None and key in section:
            overrides[key] = parse_quantity(section[key], "rate", internal)
    if overrides:
        try:
            params = params.replace(**overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return params


def params_block(params: SystemParams) -> dict:
    """Resolved parameters in native units, units of g, and energy units."""
    native = params.as_dict()
    g = params.g
    over_g = {f"{key}_over_g": native[key] / g
              for key in ("f", "gamma", "kappa", "gamma_phi", "delta_lx", "delta_cx")}
    over_g["delta_cl_over_g"] = params.delta_cl / g
    eunit = energy_unit_for(params.unit_system)
    energies = {f"hbar_{key}_{eunit}": native[key] * HBAR_MEV_PS
                for key in ("g", "f", "gamma", "kappa", "gamma_phi",
                            "delta_lx", "delta_cx")}
    return {"params": native, "params_over_g": over_g, "energies": energies,
            "time_unit": time_unit_for(params.unit_system)}


def _out_path(args, name: str) -> Path:
    base = Path(args.out_dir) if args.out_dir else Path(".")
    base.mkdir(parents=True, exist_ok=True)
    return base / name


def _json_dump(payload: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _solve_steady(params: SystemParams, config) -> tuple:
    numerics = config["numerics"] if config.has_section("numerics") else {}
    n_max_text = str(numerics.get("n_max", "auto")).strip()
    if n_max_text == "auto":
        start = int(numerics.get("n_max_start", 8))
        result, dist = steady_state_autotruncate(params, start)
    else:
        result = steady_state_for(params, int(n_max_text))
        dist = photon_distribution(result.rho_ss)
    return result, dist


def cmd_steady(args, config) -> int:
    params = resolve_params(config)
    result, dist = _solve_steady(params, config)
    section = config["steady"] if config.has_section("steady") else {}

    payload = {"version": __version__, "command": "steady"}
    payload.update(params_block(params))
    payload.update({
        "n_max_used": result.n_max_used,
        "residual": result.residual,
        "P": [float(p) for p in dist.probs],
        "mean_n": dist.mean_n,
        "r": dist.r,
        "ratio31": dist.ratio31,
    })
    out = _out_path(args, section.get("out", "steady.json"))
    _json_dump(payload, out)
    print(f"wrote {out}")

    wigner_out = section.get("wigner_out", None)
    if wigner_out:
        points = int(section.get("wigner_points", 101))
        rho_cav = reduce_cavity(result.rho_ss)
        re_ax, im_ax = default_wigner_grid(dist.mean_n, points)
        wmap = wigner(rho_cav, re_ax, im_ax)
        wpath = _out_path(args, wigner_out)
        with open(wpath, "w") as fh:
            fh.write(f"# version={__version__}\n# mean_n={dist.mean_n}\n")
            fh.write(f"# normalization={wmap.normalization()}\n")
            for key, value in params.as_dict().items():
                fh.write(f"# {key}={value}\n")
            fh.write("re_alpha,im_alpha,w\n")
            for iy, y in enumerate(im_ax):
                for ix, x in enumerate(re_ax):
                    fh.write(f"{float(x)!r},{float(y)!r},{float(wmap.values[iy, ix])!r}\n")
        print(f"wrote {wpath}")
    return 0


def cmd_sweep(args, config) -> int:
    params = resolve_params(config)
    if not config.has_section("sweep"):
        raise ConfigError("missing [sweep] section")
    section = config["sweep"]
    axis = section.get("axis", None)
    if axis not in ("delta_lx", "gamma_phi", "kappa"):
        raise ConfigError(f"sweep axis must be delta_lx, gamma_phi or kappa, got {axis!r}")
    internal = params.unit_system
    start = parse_quantity(section.get("start"), "rate", internal)
    stop = parse_quantity(section.get("stop"), "rate", internal)
    points = int(section.get("points", 400))
    scale = section.get("scale", "linear")
    if scale == "linear":
        grid = linear_grid(start, stop, points)
    elif scale == "log":
        grid = log_grid(start, stop, points)
    else:
        raise ConfigError(f"scale must be linear or log, got {scale!r}")

    refine_text = section.get("refine", "").strip()
    if refine_text:
        if scale != "linear":
            raise ConfigError("refine windows apply to linear sweeps only")
        windows = []
        for chunk in refine_text.split(","):
            pieces = [p.strip() for p in chunk.split(":")]
            if len(pieces) != 3:
                raise ConfigError(f"refine window must be 'lo : hi : factor', got {chunk!r}")
            windows.append((parse_quantity(pieces[0], "rate", internal),
                            parse_quantity(pieces[1], "rate", internal),
                            int(pieces[2])))
        grid = refine_grid(grid, windows)

    numerics = config["numerics"] if config.has_section("numerics") else {}
    n_max_text = str(numerics.get("n_max", "auto")).strip()
    spec = SweepSpec(base=params, axis=axis, points=grid,
                     n_max=None if n_max_text == "auto" else int(n_max_text),
                     n_max_start=int(numerics.get("n_max_start", 8)),
                     n_report=int(section.get("n_report", 6)))
    table = run_sweep(spec, workers=args.threads)
    out = _out_path(args, section.get("out", "sweep.csv"))
    write_csv(table, out, metadata={"version": __version__, "hbar_mev_ps": HBAR_MEV_PS})
    failed = sum(row.status != "ok" for row in table.rows)
    print(f"wrote {out} ({len(table.rows)} rows, {failed} failed)")
    return 0


def cmd_traj(args, config) -> int:
    params = resolve_params(config)
    if not config.has_section("traj"):
        raise ConfigError("missing [traj] section")
    section = config["traj"]
    internal = params.unit_system
    t_end = parse_quantity(section.get("t_end"), "time", internal)
    n_traj = int(section.get("n_trajectories", 8))
    seed = args.seed if args.seed is not None else int(section.get("seed", 1))
    numerics = config["numerics"] if config.has_section("numerics") else {}
    n_max = int(numerics.get("n_max", 12))
    gap_text = section.get("gap_threshold", "auto").strip()
    gap = (default_gap_threshold(params) if gap_text == "auto"
           else parse_quantity(gap_text, "time", internal))

    space = HilbertSpace(n_max)
    records = run_ensemble(params, space, t_end, seed, n_traj,
                           workers=max(1, args.threads))

    prefix = section.get("out_prefix", "traj")
    tunit = time_unit_for(internal)
    for i, record in enumerate(records):
        path = _out_path(args, f"{prefix}_{i:04d}.csv")
        with open(path, "w") as fh:
            fh.write(f"# version={__version__}\n# seed={record.seed}\n")
            fh.write(f"# t_end={record.t_end} {tunit}\n")
            for key, value in params.as_dict().items():
                fh.write(f"# {key}={value}\n")
            fh.write("time,channel\n")
            events = ([(t, "cavity") for t in record.cavity_emissions]
                      + [(t, "radiative") for t in record.radiative_emissions])
            for t, channel in sorted(events):
                fh.write(f"{float(t)!r},{channel}\n")

    stats = empirical_statistics(records, gap)
    payload = {"version": __version__, "command": "traj",
               "n_trajectories": n_traj, "t_end": t_end, "master_seed": seed,
               "gap_threshold": gap, "n_max": n_max}
    payload.update(params_block(params))
    payload["bundle_size_histogram"] = {str(k): v for k, v
                                        in stats["bundle_size_histogram"].items()}
    payload["intra_bundle_waiting_stats"] = {
        f"size{size}_gap{k}": value
        for (size, k), value in stats["intra_bundle_waiting_stats"].items()}
    pn = stats["time_averaged_pn"]
    payload["time_averaged_pn"] = None if pn is None else [float(p) for p in pn]
    out = _out_path(args, section.get("stats_out", f"{prefix}_stats.json"))
    _json_dump(payload, out)
    print(f"wrote {len(records)} records and {out}")
    return 0


def cmd_calibrate(args, config) -> int:
    params = resolve_params(config)
    if not config.has_section("calibrate"):
        raise ConfigError("missing [calibrate] section")
    section = config["calibrate"]
    ref_path = section.get("reference", None)
    scenario = section.get("scenario", None)
    if not ref_path or scenario not in calibrate.SCENARIOS:
        raise ConfigError("calibrate needs reference=<csv> and scenario in {a, b, c}")
    reference = calibrate.load_reference_csv(ref_path, scenario)
    fit = calibrate.fit_dephasing_rate(reference, params)

    to_per_ns = convert_rate(fit.gamma_phi, params.unit_system, "per_ns")
    payload = {"version": __version__, "command": "calibrate",
               "scenario": scenario, "reference": str(ref_path),
               "gamma_phi": fit.gamma_phi,
               "gamma_phi_over_g": fit.gamma_phi / params.g,
               "hbar_gamma_phi_meV": convert_rate(fit.gamma_phi, params.unit_system,
                                                  "per_ps") * HBAR_MEV_PS,
               "gamma_phi_per_ns": to_per_ns,
               "fit_residual": fit.residual,
               "degenerate": fit.degenerate,
               "objective_evaluations": fit.evaluations}
    payload.update(params_block(params))
    out = _out_path(args, section.get("out", "calibration.json"))
    _json_dump(payload, out)
    print(f"wrote {out}")
    return 0


def cmd_theory(args, config) -> int:
    params = resolve_params(config)
    section = config["theory"] if config.has_section("theory") else {}
    n_values = [int(n) for n in str(section.get("n_values", "1,2,3,4,5,6,7,8")).split(",")]
    eunit = energy_unit_for(params.unit_system)

    out = _out_path(args, section.get("resonances_out", "resonances.csv"))
    with open(out, "w") as fh:
        fh.write(f"# version={__version__}\n")
        for key, value in params.as_dict().items():
            fh.write(f"# {key}={value}\n")
        fh.write(f"N,delta_lx,delta_lx_over_g,hbar_delta_lx_{eunit},"
                 "e_plus_over_g,e_minus_over_g\n")
        for n in sorted(n_values):
            if n == 1:
                delta = bundles.one_photon_resonance_detuning(params.f, params.delta_cx)
            else:
                delta = bundles.bundle_resonance_detuning(n, params.f, params.delta_cx)
            dressed = bundles.dressed_energies(delta, params.f)
            fh.write(f"{n},{float(delta)!r},{float(delta / params.g)!r},"
                     f"{float(delta * HBAR_MEV_PS)!r},{float(dressed.e_plus / params.g)!r},"
                     f"{float(dressed.e_minus / params.g)!r}\n")
    print(f"wrote {out}")

    if "mean_n" in section:
        n_bundle = int(section.get("bundle_n", 2))
        mean_n = float(section.get("mean_n"))
        probs = bundles.ideal_bundle_distribution(n_bundle, mean_n)
        dist_out = _out_path(args, section.get("distribution_out", "ideal_distribution.csv"))
        with open(dist_out, "w") as fh:
            fh.write(f"# version={__version__}\n# N={n_bundle}\n# mean_n={mean_n}\n")
            fh.write("n,P\n")
            for n, p in enumerate(probs):
                fh.write(f"{n},{float(p)!r}\n")
        print(f"wrote {dist_out}")

    if "dressed_out" in section:
        # dressed-state energies on a detuning grid, for figure overlays
        start = parse_quantity(section.get("dressed_start"), "rate", params.unit_system)
        stop = parse_quantity(section.get("dressed_stop"), "rate", params.unit_system)
        n_pts = int(section.get("dressed_points", 201))
        dressed_path = _out_path(args, section.get("dressed_out"))
        with open(dressed_path, "w") as fh:
            fh.write(f"# version={__version__}\n")
            for key, value in params.as_dict().items():
                fh.write(f"# {key}={value}\n")
            fh.write(f"delta_lx,delta_lx_over_g,hbar_delta_lx_{eunit},"
                     "e_plus_over_g,e_minus_over_g,delta_cl_over_g\n")
            for delta in np.linspace(start, stop, n_pts):
                pair = bundles.dressed_energies(delta, params.f)
                fh.write(f"{float(delta)!r},{float(delta / params.g)!r},"
                         f"{float(delta * HBAR_MEV_PS)!r},"
                         f"{float(pair.e_plus / params.g)!r},"
                         f"{float(pair.e_minus / params.g)!r},"
                         f"{float((params.delta_cx - delta) / params.g)!r}\n")
        print(f"wrote {dressed_path}")
    return 0


COMMANDS = {"steady": cmd_steady, "sweep": cmd_sweep, "traj": cmd_traj,
            "calibrate": cmd_calibrate, "theory": cmd_theory}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bundleqed",
        description="Steady states, sweeps, trajectories and bundle theory "
                    "for driven dissipative emitter-cavity systems.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="INI configuration file")
    parser.add_argument("--threads", type=int, default=1,
                        help="parallel workers for sweeps and trajectories")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed override for traj")
    parser.add_argument("--out-dir", default=None, help="directory for outputs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (BundleQEDError, ValueError) as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
