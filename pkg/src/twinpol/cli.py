"""Config-driven command line front end.

A run is described by one INI-style file with unit-suffixed values:

    [three_level]          # or [morse]
    e1 = 2e-3 au
    e2 = 10e-3 au

    [cavity]
    omega_c = 1e-2 au
    g = 2e-4 au            # or g_sweep = 0.5e-4, 1e-4, ... au
    dse = off
    n_fock_max = 2

    [protocol]
    framework = quantum_static   # classical | quantum_td | quantum_static |
                                 # manymol_bruteforce | manymol_analytic | thermo_limit
    initial = ground             # psi_k | ground | thermal | symmetric | vVjJmM

    [output]
    directory = out

Commands: run, sweep, validate, export-model.  Exit codes: 0 success,
2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import filecmp
import json
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .cavity import CavityParams, KickPulse
from .classical import propagate_classical
from .errors import ConfigError, TwinpolError
from .manymol import (ManyMolConfig, analytic_nonsymmetric_spectrum,
                      analytic_symmetric_spectrum, brute_force_spectrum,
                      thermodynamic_limit_spectrum)
from .model import (MolecularModel, boltzmann_weights, model_from_config,
                    parse_quantity, thermal_from_config)
from .quantum import (ProductBasis, assemble_hamiltonian, diagonalize_polaritons,
                      dominant_eigenstate, propagate_quantum,
                      static_stick_spectrum, thermal_initial_states)
from .spectra import detect_peaks, dipole_spectrum, fit_through_origin

FRAMEWORKS = ("classical", "quantum_static", "quantum_td",
              "manymol_bruteforce", "manymol_analytic", "thermo_limit")

_PROTOCOL_KEYS = {
    "framework", "initial", "t_end", "dt", "record_stride",
    "pulse_amplitude", "pulse_t0", "pulse_sigma", "pulse_max_excitation",
    "damping_tau", "pad_factor", "peak_threshold", "n_mol", "n0", "r0",
}
_CAVITY_KEYS = {"omega_c", "g", "g_sweep", "dse", "n_fock_max"}
_OUTPUT_KEYS = {"directory", "formats"}


class RunConfig:
    """Fully resolved run description; reconstructible from its dict form."""

    def __init__(self, resolved: dict):
        self.raw = resolved

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        if not parser.read(path):
            raise ConfigError(f"cannot read config file {path}")
        return cls(_resolve(parser))

    @classmethod
    def from_manifest(cls, manifest: dict) -> "RunConfig":
        return cls(manifest["config"])

    # -- builders ---------------------------------------------------------

    def build_model(self) -> MolecularModel:
        parser = configparser.ConfigParser()
        kind = self.raw["model_kind"]
        parser.add_section(kind)
        for key, val in self.raw[kind].items():
            parser.set(kind, key, str(val))
        return model_from_config(parser)

    def cavity(self, g: float | None = None) -> CavityParams:
        sec = self.raw["cavity"]
        return CavityParams(
            omega_c=sec["omega_c"],
            g=sec["g"] if g is None else g,
            include_dse=sec["dse"],
            n_fock_max=sec["n_fock_max"],
        )

    def pulse(self) -> KickPulse:
        sec = self.raw["protocol"]
        return KickPulse(
            amplitude=sec["pulse_amplitude"], t0=sec["pulse_t0"],
            sigma=sec["pulse_sigma"], max_excitation=sec["pulse_max_excitation"],
        )

    @property
    def framework(self) -> str:
        return self.raw["protocol"]["framework"]

    @property
    def g_values(self) -> list[float]:
        return self.raw["cavity"].get("g_sweep") or [self.raw["cavity"]["g"]]


def _resolve(parser: configparser.ConfigParser) -> dict:
    """Validate sections/keys and normalize every value (defaults echoed)."""
    known_sections = {"three_level", "morse", "thermal", "cavity", "protocol", "output"}
    for sec in parser.sections():
        if sec not in known_sections:
            raise ConfigError(f"unknown section [{sec}]")

    has_3l = parser.has_section("three_level")
    has_morse = parser.has_section("morse")
    if has_3l == has_morse:
        raise ConfigError("config needs exactly one of [three_level] or [morse]")
    model_kind = "three_level" if has_3l else "morse"
    model = model_from_config(parser)   # validates model keys and units

    out: dict = {"model_kind": model_kind, model_kind: dict(parser[model_kind])}

    cav = parser["cavity"] if parser.has_section("cavity") else {}
    for key in cav:
        if key not in _CAVITY_KEYS:
            raise ConfigError(f"[cavity] has unknown key {key!r}")
    g_sweep = None
    if "g_sweep" in cav:
        items = [s.strip() for s in cav["g_sweep"].split(",") if s.strip()]
        g_sweep = [parse_quantity(s, "g_sweep") for s in items]
    out["cavity"] = {
        "omega_c": parse_quantity(cav.get("omega_c", "1e-2 au"), "omega_c"),
        "g": parse_quantity(cav.get("g", "2e-4 au"), "g") if "g" in cav or not g_sweep
             else g_sweep[0],
        "g_sweep": g_sweep,
        "dse": _parse_bool(cav.get("dse", "on"), "dse"),
        "n_fock_max": int(cav.get("n_fock_max", "2")),
    }

    proto = parser["protocol"] if parser.has_section("protocol") else {}
    for key in proto:
        if key not in _PROTOCOL_KEYS:
            raise ConfigError(f"[protocol] has unknown key {key!r}")
    framework = proto.get("framework", "quantum_static")
    if framework not in FRAMEWORKS:
        raise ConfigError(f"unknown framework {framework!r} "
                          f"(choose from {', '.join(FRAMEWORKS)})")
    out["protocol"] = {
        "framework": framework,
        "initial": proto.get("initial", "ground"),
        "t_end": parse_quantity(proto.get("t_end", "1.6e5 au"), "t_end"),
        "dt": parse_quantity(proto.get("dt", "1.0 au"), "dt"),
        "record_stride": int(proto.get("record_stride", "8")),
        "pulse_amplitude": parse_quantity(proto.get("pulse_amplitude", "1e-4 au"),
                                          "pulse_amplitude"),
        "pulse_t0": parse_quantity(proto.get("pulse_t0", "25.0 au"), "pulse_t0"),
        "pulse_sigma": parse_quantity(proto.get("pulse_sigma", "5.0 au"), "pulse_sigma"),
        "pulse_max_excitation": float(proto.get("pulse_max_excitation", "1e-2")),
        "damping_tau": parse_quantity(proto["damping_tau"], "damping_tau")
                       if "damping_tau" in proto else None,
        "pad_factor": int(proto.get("pad_factor", "4")),
        "peak_threshold": float(proto.get("peak_threshold", "0.01")),
        "n_mol": int(proto.get("n_mol", "1")),
        "n0": int(proto["n0"]) if "n0" in proto else None,
        "r0": float(proto.get("r0", "0.5")),
    }

    outp = parser["output"] if parser.has_section("output") else {}
    for key in outp:
        if key not in _OUTPUT_KEYS:
            raise ConfigError(f"[output] has unknown key {key!r}")
    out["output"] = {
        "directory": outp.get("directory", "twinpol_out"),
        "formats": [s.strip() for s in outp.get("formats", "csv,json").split(",")],
    }

    if parser.has_section("thermal"):
        sec = parser["thermal"]
        thermal_from_config(parser, model)   # validates
        out["thermal"] = {"temperature": parse_quantity(sec.get("temperature", "300 K"),
                                                        "temperature")}
        if "v" in sec:
            out["thermal"]["v"] = int(sec["v"])

    _validate_initial(out, model)
    return out


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("on", "true", "yes", "1"):
        return True
    if low in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"{key}: expected on/off, got {raw!r}")


def _validate_initial(resolved: dict, model: MolecularModel):
    framework = resolved["protocol"]["framework"]
    initial = resolved["protocol"]["initial"]
    if framework in ("manymol_bruteforce", "manymol_analytic"):
        if initial not in ("thermal", "symmetric"):
            raise ConfigError(f"initial={initial!r}: many-molecule frameworks take "
                              "'thermal' (with n0) or 'symmetric'")
        if initial == "thermal" and resolved["protocol"]["n0"] is None:
            raise ConfigError("thermal many-molecule runs need n0 in [protocol]")
        return
    if framework == "thermo_limit":
        if initial not in ("thermal", "symmetric"):
            raise ConfigError("thermo_limit takes initial = thermal or symmetric")
        return
    if initial in ("ground", "thermal"):
        if initial == "thermal" and "thermal" not in resolved:
            raise ConfigError("initial = thermal needs a [thermal] section")
        return
    _initial_state_index(initial, model)    # raises with valid labels listed


def _initial_state_index(initial: str, model: MolecularModel) -> int:
    m = re.fullmatch(r"psi_(\d+)", initial)
    if m:
        k = int(m.group(1))
        if k >= model.n_states or model.is_rovib():
            raise ConfigError(
                f"initial state {initial!r} not in the model; valid labels: "
                + ", ".join(model.label_str(i) for i in range(min(model.n_states, 12)))
            )
        return k
    m = re.fullmatch(r"v(\d+)J(\d+)M(-?\d+)", initial)
    if m and model.is_rovib():
        try:
            return model.state_index(v=int(m.group(1)), J=int(m.group(2)),
                                     M=int(m.group(3)))
        except TwinpolError:
            raise ConfigError(f"initial state {initial!r} not in the model") from None
    raise ConfigError(f"cannot parse initial state {initial!r} "
                      "(use psi_k, vVjJmM, ground, thermal, or symmetric)")


# -- run execution ----------------------------------------------------------


def parse_config(path) -> RunConfig:
    """Read and validate a run config file, with all defaults resolved."""
    return RunConfig.from_file(path)


def run(config: RunConfig, out_dir: Path, plot_data: bool = False) -> dict:
    """Execute one run (or sweep) and write all artifact files."""
    out_dir.mkdir(parents=True, exist_ok=True)
    g_values = config.g_values
    if len(g_values) > 1:
        return _run_sweep(config, out_dir, g_values, plot_data)
    return _run_single(config, out_dir, g_values[0], plot_data)


def _run_single(config: RunConfig, out_dir: Path, g: float,
                plot_data: bool = False) -> dict:
    model = config.build_model()
    cav = config.cavity(g)
    proto = config.raw["protocol"]
    framework = config.framework
    outputs: list[str] = []
    checks: dict = {}
    plots: list[tuple[str, object]] = []

    if framework in ("classical", "quantum_td"):
        init = _initial_state_index(proto["initial"], model)
        pulse = config.pulse()
        if framework == "classical":
            traj = propagate_classical(model, cav, pulse, init,
                                       proto["t_end"], proto["dt"],
                                       proto["record_stride"])
        else:
            traj = propagate_quantum(model, cav, pulse, (init, 0),
                                     proto["t_end"], proto["dt"],
                                     proto["record_stride"])
        traj.to_csv(out_dir / "trajectory.csv")
        outputs.append("trajectory.csv")
        spec = dipole_spectrum(traj, proto["damping_tau"], proto["pad_factor"])
        spec.to_csv(out_dir / "spectrum.csv")
        outputs.append("spectrum.csv")
        plots.append(("spectrum", spec))
        peaks = detect_peaks(spec, proto["peak_threshold"])
        (out_dir / "peaks.json").write_text(
            json.dumps(peaks.to_json_dict(), indent=1, sort_keys=True))
        outputs.append("peaks.json")
        checks = {"norm_drift": traj.meta["norm_drift"],
                  "energy_drift_post_pulse": traj.meta["energy_drift_post_pulse"],
                  "bin_width": spec.meta["bin_width"]}

    elif framework == "quantum_static":
        basis = ProductBasis.full(model, cav.n_fock_max)
        sol = diagonalize_polaritons(assemble_hamiltonian(model, cav, basis))
        initial = _static_initial(config, model, basis, sol)
        spec = static_stick_spectrum(sol, model, basis, initial)
        spec.to_csv(out_dir / "sticks.csv")
        outputs.append("sticks.csv")
        plots.append(("sticks", spec))
        checks = {"basis_size": basis.size}

    elif framework == "manymol_bruteforce":
        spec = brute_force_spectrum(
            model, cav, proto["n_mol"], n0=proto["n0"],
            symmetric=proto["initial"] == "symmetric")
        _write_manymol(spec, out_dir / "sticks.csv", proto)
        outputs.append("sticks.csv")
        plots.append(("sticks", spec))

    elif framework == "manymol_analytic":
        cfg = ManyMolConfig.from_model(
            model, cav.g, proto["n_mol"], n0=proto["n0"],
            symmetric=proto["initial"] == "symmetric")
        spec = (analytic_symmetric_spectrum(cfg) if cfg.symmetric
                else analytic_nonsymmetric_spectrum(cfg))
        _write_manymol(spec, out_dir / "sticks.csv", proto)
        outputs.append("sticks.csv")
        plots.append(("sticks", spec))

    elif framework == "thermo_limit":
        spec = thermodynamic_limit_spectrum(
            proto["r0"], proto["initial"], cav.g, float(model.dipole[0, 2]),
            model.transition_frequency(0, 2), model.transition_frequency(1, 2))
        _write_manymol(spec, out_dir / "sticks.csv", proto)
        outputs.append("sticks.csv")
        plots.append(("sticks", spec))

    if plot_data:
        for stem, sp in plots:
            name = f"{stem}_plot.dat"
            _write_plot_data(sp, out_dir / name)
            outputs.append(name)

    manifest = {
        "package_version": __version__,
        "config": config.raw,
        "g": g,
        "model_hash": model.content_hash(),
        "outputs": outputs,
        "checks": checks,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return manifest


def _static_initial(config: RunConfig, model, basis, sol):
    proto = config.raw["protocol"]
    if proto["initial"] == "ground":
        return [(dominant_eigenstate(sol, basis, (0, 0)), 1.0)]
    if proto["initial"] == "thermal":
        thermal = config.raw["thermal"]
        subset = None
        if "v" in thermal:
            subset = [k for k, lab in enumerate(model.labels)
                      if lab.get("v") == thermal["v"]]
        weights = boltzmann_weights(model, thermal["temperature"], subset)
        return thermal_initial_states(sol, basis, weights, weight_cutoff=1e-4)
    k = _initial_state_index(proto["initial"], model)
    return [(dominant_eigenstate(sol, basis, (k, 0)), 1.0)]


def _write_plot_data(spec, path):
    """Two-column (frequency in cm^-1, normalized intensity) plot file."""
    norm = spec.normalized()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for w, i in zip(norm.omega_cm1, norm.intensity):
            fh.write(f"{w:.17g} {i:.17g}\n")


def _write_manymol(spec, path, proto):
    """Quantum stick schema plus the n_mol, n0, branch, mechanism columns."""
    from .spectra import Spectrum

    n = spec.omega.size
    finite = proto["framework"] != "thermo_limit"
    bare = Spectrum(spec.kind, spec.omega, spec.intensity,
                    {"labels_i": spec.meta.get("labels_i", [""] * n),
                     "labels_f": spec.meta.get("labels_f", [""] * n)})
    extra = {
        "n_mol": [proto["n_mol"] if finite else ""] * n,
        "n0": [proto["n0"] if finite and proto["n0"] is not None else ""] * n,
        "branch": spec.meta.get("branch", [""] * n),
        "mechanism": spec.meta.get("mechanism", [""] * n),
    }
    bare.to_csv(path, extra_columns=extra)


def _run_sweep(config: RunConfig, out_dir: Path, g_values: list[float],
               plot_data: bool = False) -> dict:
    """Child run per coupling plus a splitting-vs-g table with linear fits."""
    model = config.build_model()
    if model.n_states != 3:
        raise ConfigError("g sweeps with splitting tables support the 3-level model")
    w02 = model.transition_frequency(0, 2)
    w12 = model.transition_frequency(1, 2)
    quarter = abs(w02 - w12) / 4.0
    rows = []
    manifests = []
    for i, g in enumerate(g_values):
        child_dir = out_dir / f"g_{i:03d}"
        child_dir.mkdir(parents=True, exist_ok=True)
        manifests.append(_run_single(config, child_dir, g, plot_data))
        cav = config.cavity(g)
        basis = ProductBasis.full(model, cav.n_fock_max)
        sol = diagonalize_polaritons(assemble_hamiltonian(model, cav, basis))
        r_split = _stick_splitting(sol, model, basis, (0, 0), (w02 - quarter, w02 + quarter))
        p_split = _stick_splitting(sol, model, basis, (1, 0), (w12 - quarter, w12 + quarter))
        rows.append((g, r_split, p_split))

    with open(out_dir / "sweep_table.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("g,r_splitting,p_splitting\n")
        for g, r, p in rows:
            fh.write(f"{g:.17g},{r:.17g},{p:.17g}\n")
    gs = np.array([r[0] for r in rows])
    slope_r, r2_r = fit_through_origin(gs, np.array([r[1] for r in rows]))
    slope_p, r2_p = fit_through_origin(gs, np.array([r[2] for r in rows]))
    summary = {
        "package_version": __version__,
        "config": config.raw,
        "g_values": list(map(float, gs)),
        "fit": {"slope_r": slope_r, "r2_r": r2_r, "slope_p": slope_p, "r2_p": r2_p},
        "children": [f"g_{i:03d}" for i in range(len(g_values))],
    }
    (out_dir / "sweep_summary.json").write_text(json.dumps(summary, indent=1,
                                                           sort_keys=True))
    return summary


def _stick_splitting(sol, model, basis, init_entry, window):
    from .spectra import measure_splitting, peaks_from_sticks
    initial = [(dominant_eigenstate(sol, basis, init_entry), 1.0)]
    spec = static_stick_spectrum(sol, model, basis, initial, min_intensity=0.0)
    strong = spec.intensity > 0.01 * spec.intensity.max()
    spec = type(spec)("sticks", spec.omega[strong], spec.intensity[strong], spec.meta)
    return measure_splitting(peaks_from_sticks(spec.in_window(*window)),
                             window)


# -- entry point -------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="twinpol",
                                 description="cavity polariton spectra toolkit")
    ap.add_argument("command", choices=["run", "sweep", "validate", "export-model"])
    ap.add_argument("config", help="path to the run config file")
    ap.add_argument("--out-dir", default=None, help="output directory override")
    ap.add_argument("--format", default=None, choices=["csv", "json"],
                    help="restrict output formats")
    ap.add_argument("--seedless-check", action="store_true",
                    help="run twice and verify bit-identical outputs")
    ap.add_argument("--plot-data", action="store_true",
                    help="also emit two-column plot files per spectrum")
    args = ap.parse_args(argv)

    try:
        config = RunConfig.from_file(args.config)
    except TwinpolError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    out_dir = Path(args.out_dir or config.raw["output"]["directory"])
    try:
        if args.command == "validate":
            print(json.dumps(config.raw, indent=1, sort_keys=True))
            return 0
        if args.command == "export-model":
            out_dir.mkdir(parents=True, exist_ok=True)
            model = config.build_model()
            model.save_json(out_dir / "model.json")
            print(f"model written to {out_dir / 'model.json'} "
                  f"(hash {model.content_hash()})")
            return 0
        if args.command == "sweep" and len(config.g_values) < 2:
            print("config error: sweep needs g_sweep in [cavity]", file=sys.stderr)
            return 2
        if args.seedless_check:
            with tempfile.TemporaryDirectory() as tmp_a, \
                 tempfile.TemporaryDirectory() as tmp_b:
                run(config, Path(tmp_a), plot_data=args.plot_data)
                run(config, Path(tmp_b), plot_data=args.plot_data)
                if not _dirs_identical(Path(tmp_a), Path(tmp_b)):
                    print("determinism check FAILED", file=sys.stderr)
                    return 3
                print("determinism check passed")
        manifest = run(config, out_dir, plot_data=args.plot_data)
        if args.format:
            _restrict_formats(out_dir, args.format)
        print(f"run complete; outputs in {out_dir}")
        if "fit" in manifest:
            fit = manifest["fit"]
            print(f"sweep fit: slope_r={fit['slope_r']:.6g} (R2={fit['r2_r']:.6f}), "
                  f"slope_p={fit['slope_p']:.6g} (R2={fit['r2_p']:.6f})")
        return 0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (TwinpolError, np.linalg.LinAlgError) as err:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "error.txt").write_text(f"{type(err).__name__}: {err}\n")
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


def _restrict_formats(out_dir: Path, fmt: str):
    """Drop csv or json artifacts (the manifest always stays)."""
    drop = ".json" if fmt == "csv" else ".csv"
    for path in out_dir.rglob(f"*{drop}"):
        if path.name != "manifest.json":
            path.unlink()


def _dirs_identical(a: Path, b: Path) -> bool:
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    if files_a != files_b:
        return False
    return all(filecmp.cmp(a / f, b / f, shallow=False) for f in files_a)


if __name__ == "__main__":
    sys.exit(main())
