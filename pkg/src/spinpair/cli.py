"""Command-line front end: deterministic experiment orchestration.

Subcommands: synthesize | qst | qpt | grover | multiion-verify |
noise-sweep | rwa-check.  Configuration is a JSON file (``--config``)
whose values individual flags override.  All numeric artifacts are JSON
or CSV files carrying a ``schema_version`` field; complex numbers are
serialized as [re, im] pairs.  A fixed ``--seed`` makes every artifact
byte-identical across runs.

Exit codes: 0 success, 2 non-convergence, 3 invalid configuration.
"""

from __future__ import annotations

import argparse
import copy
import csv
import dataclasses
import hashlib
import json
import logging
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from .circuits import grover_circuit, oracle_gate, run_circuit, success_rate
from .control import (MicrowaveTone, PulseSequence, propagate,
                      propagate_lab_frame, rwa_coefficients)
from .grape import (ALL_GATES, GateTarget, GrapeConfig, standard_gate,
                    synthesize, target_in_number_basis)
from .ion import IonParams, YB171, eigensystem
from .linalg import (ChiMatrix, DensityMatrix, process_fidelity,
                     state_fidelity)
from .multiion import (GradientDrive, NormalMode, TwoIonSystem, composite_zz,
                       large_field_selectivity, motion_disentanglement_check,
                       ms_composite_xx)
from .tomography import (NoiseModel, apply_noise, chi_of_unitary,
                         noise_model_free, noise_model_triggered, qpt, qst)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_NO_CONVERGENCE = 2
EXIT_BAD_CONFIG = 3

log = logging.getLogger("spinpair")


class ConfigError(ValueError):
    """Invalid run configuration."""


# ---------------------------------------------------------------------------
# configuration

_ION_KEYS = ("hyperfine_a", "gamma_n", "gamma_e", "b_field")
_GRAPE_KEYS = tuple(f.name for f in dataclasses.fields(GrapeConfig))
_NOISE_KEYS = ("model", "sigma1", "sigma2", "sigma4", "n_samples")
_MULTIION_KEYS = ("mode_omega", "fock_cutoff", "b_grad", "delta", "k1",
                  "epsilon")
_TOP_KEYS = ("schema_version", "seed", "output_dir", "ion", "grape", "noise",
             "multiion")


class RunConfig:
    """Validated run configuration assembled from JSON plus flag overrides."""

    def __init__(self, data: dict | None = None, seed: int | None = None,
                 output_dir: str | None = None):
        data = dict(data or {})
        for key in data:
            if key not in _TOP_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
        if data.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ConfigError("unsupported config schema_version")

        self.seed = int(seed if seed is not None else data.get("seed", 0))
        self.output_dir = Path(output_dir if output_dir is not None
                               else data.get("output_dir", "out"))

        try:
            self.ion = self._build_ion(data.get("ion", {}))
            self.grape = self._build_grape(data.get("grape", {}))
            self.noise = self._build_noise(data.get("noise", {}))
            self.multiion = self._build_multiion(data.get("multiion", {}))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @staticmethod
    def _check_keys(section: str, d: dict, allowed):
        for key in d:
            if key not in allowed:
                raise ConfigError(f"unknown {section} key {key!r}")

    def _build_ion(self, d: dict) -> IonParams:
        self._check_keys("ion", d, _ION_KEYS)
        return YB171.replace(**{k: float(v) for k, v in d.items()})

    def _build_grape(self, d: dict) -> GrapeConfig:
        self._check_keys("grape", d, _GRAPE_KEYS)
        kwargs = dict(d)
        if "robustness_scalings" in kwargs:
            kwargs["robustness_scalings"] = tuple(
                kwargs["robustness_scalings"])
        kwargs.setdefault("rng_seed", self.seed + 1)
        return GrapeConfig(**kwargs)

    def _build_noise(self, d: dict) -> NoiseModel:
        self._check_keys("noise", d, _NOISE_KEYS)
        n_samples = int(d.get("n_samples", 200))
        model = d.get("model", "free")
        if any(k in d for k in ("sigma1", "sigma2", "sigma4")):
            return NoiseModel(sigma1=float(d["sigma1"]),
                              sigma2=float(d["sigma2"]),
                              sigma4=float(d["sigma4"]),
                              n_samples=n_samples, rng_seed=self.seed)
        if model == "free":
            return noise_model_free(n_samples, rng_seed=self.seed)
        if model == "triggered":
            return noise_model_triggered(n_samples, rng_seed=self.seed)
        raise ConfigError(f"unknown noise model {model!r}")

    def _build_multiion(self, d: dict) -> TwoIonSystem:
        self._check_keys("multiion", d, _MULTIION_KEYS)
        mode = NormalMode(omega=float(d.get("mode_omega", 2 * np.pi * 2e6)),
                          epsilon=float(d.get("epsilon", 1e-9)))
        drive = GradientDrive(b_grad=float(d.get("b_grad", 10.0)),
                              delta=float(d.get("delta", 2 * np.pi * 2e3)),
                              k1=int(d.get("k1", 1)))
        return TwoIonSystem(ions=(self.ion, self.ion), mode=mode,
                            fock_cutoff=int(d.get("fock_cutoff", 16)),
                            drive=drive)

    def grape_hash(self) -> str:
        """Short stable digest identifying the synthesis configuration."""
        payload = json.dumps(
            {"grape": dataclasses.asdict(self.grape),
             "ion": dataclasses.asdict(self.ion)},
            sort_keys=True, default=list)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def load_config(path: str | None, seed: int | None,
                output_dir: str | None) -> RunConfig:
    data = None
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
    return RunConfig(data, seed=seed, output_dir=output_dir)


# ---------------------------------------------------------------------------
# serialization helpers

def _c(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix(m: np.ndarray) -> list:
    return [[_c(x) for x in row] for row in np.asarray(m)]


def write_json(path: Path, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", path)


def write_matrix_csv(path: Path, m: np.ndarray, label: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["schema_version", SCHEMA_VERSION, label])
        w.writerow(["row", "col", "re", "im"])
        for i, row in enumerate(np.asarray(m)):
            for j, x in enumerate(row):
                w.writerow([i, j, repr(float(np.real(x))),
                            repr(float(np.imag(x)))])
    log.info("wrote %s", path)


def write_rows_csv(path: Path, header: list, rows: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["schema_version", SCHEMA_VERSION])
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    log.info("wrote %s", path)


def read_versioned_json(path: Path) -> dict:
    data = json.loads(path.read_text())
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"{path}: unknown schema_version "
                          f"{data.get('schema_version')!r}")
    return data


# ---------------------------------------------------------------------------
# pulse library

def _gate_target(name: str) -> GateTarget:
    key = name.lower()
    if key.startswith("oracle"):
        return oracle_gate(int(key[len("oracle"):]))
    return standard_gate(key)


def pulse_path(cfg: RunConfig, gate: str) -> Path:
    return cfg.output_dir / "pulses" / f"{gate.lower()}_{cfg.grape_hash()}.json"


def ensure_pulse(cfg: RunConfig, gate: str):
    """Load the gate's pulse from the library, synthesizing on a miss."""
    path = pulse_path(cfg, gate)
    if path.exists():
        data = read_versioned_json(path)
        return PulseSequence.from_json(data["pulse"]), None
    target = _gate_target(gate)
    t0 = time.perf_counter()
    result = synthesize(target, cfg.grape)
    wall = time.perf_counter() - t0
    log.info("synthesized %s: fidelity %.6f after %d iterations (%.1f s)",
             gate, result.fidelity, result.iterations, wall)
    write_json(path, {"gate": gate.lower(), "pulse": result.sequence.to_json(),
                      "fidelity": result.fidelity,
                      "iterations": result.iterations,
                      "converged": result.converged})
    return result.sequence, result


# ---------------------------------------------------------------------------
# subcommands

def cmd_synthesize(cfg: RunConfig, args) -> int:
    target = _gate_target(args.gate)
    t0 = time.perf_counter()
    result = synthesize(target, cfg.grape)
    wall = time.perf_counter() - t0
    out = cfg.output_dir
    write_json(pulse_path(cfg, args.gate),
               {"gate": target.name, "pulse": result.sequence.to_json(),
                "fidelity": result.fidelity, "iterations": result.iterations,
                "converged": result.converged})
    write_json(out / f"synthesize_{target.name}_report.json",
               {"gate": target.name, "fidelity": result.fidelity,
                "iterations": result.iterations,
                "converged": result.converged, "seed": cfg.seed})
    log.info("gate %s: fidelity %.6f, %d iterations, %.1f s wall time",
             target.name, result.fidelity, result.iterations, wall)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def _prepared_state(cfg: RunConfig, gate: str, mode: str):
    """Number-basis state produced by applying the gate to |3>.

    Returns a zero-argument callable so that noisy preparations resample
    on every invocation.
    """
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[2, 2] = 1.0
    if mode == "ideal":
        u = target_in_number_basis(_gate_target(gate), cfg.ion)
        rho = DensityMatrix(u @ rho0 @ u.conj().T, basis="number")
        return lambda: rho
    seq, _ = ensure_pulse(cfg, gate)
    if mode == "pulsed":
        u = propagate(seq)
        rho = DensityMatrix(u @ rho0 @ u.conj().T, basis="number")
        return lambda: rho
    channel = apply_noise(seq, cfg.noise)
    rho0 = DensityMatrix(rho0, basis="number")
    return lambda: channel(rho0)


def cmd_qst(cfg: RunConfig, args) -> int:
    rng = np.random.default_rng(cfg.seed)
    prepare = _prepared_state(cfg, args.gate, args.mode)
    rho_est = qst(prepare, shots=args.shots, rng=rng)
    ideal = _prepared_state(cfg, args.gate, "ideal")()
    fid = state_fidelity(rho_est, ideal)

    r = eigensystem(cfg.ion).eigenvectors
    rho_spin = r @ rho_est.entries @ r.conj().T
    out = cfg.output_dir
    stem = f"qst_{args.gate.lower()}_{args.mode.replace('+', '_')}"
    write_json(out / f"{stem}.json",
               {"gate": args.gate.lower(), "mode": args.mode,
                "shots": args.shots, "seed": cfg.seed,
                "fidelity_vs_ideal": fid,
                "rho_number": _matrix(rho_est.entries),
                "rho_spin": _matrix(rho_spin)})
    write_matrix_csv(out / f"{stem}_number.csv", rho_est.entries,
                     "rho (number basis)")
    write_matrix_csv(out / f"{stem}_spin.csv", rho_spin, "rho (spin basis)")
    log.info("QST %s/%s: fidelity vs ideal %.6f", args.gate, args.mode, fid)
    return EXIT_OK


def cmd_qpt(cfg: RunConfig, args) -> int:
    rng = np.random.default_rng(cfg.seed)
    target = _gate_target(args.gate)
    if args.mode == "ideal":
        u = target_in_number_basis(target, cfg.ion)

        def process(rho: DensityMatrix) -> DensityMatrix:
            return DensityMatrix(u @ rho.entries @ u.conj().T, basis="number")
    elif args.mode == "pulsed":
        seq, _ = ensure_pulse(cfg, args.gate)
        u = propagate(seq)

        def process(rho: DensityMatrix) -> DensityMatrix:
            return DensityMatrix(u @ rho.entries @ u.conj().T, basis="number")
    else:
        seq, _ = ensure_pulse(cfg, args.gate)
        process = apply_noise(seq, cfg.noise)

    chi_est = qpt(process, ion=cfg.ion, shots=args.shots, rng=rng)
    chi_ideal = chi_of_unitary(target.matrix)
    fid = process_fidelity(chi_est, chi_ideal)

    out = cfg.output_dir
    stem = f"qpt_{target.name}_{args.mode.replace('+', '_')}"
    write_json(out / f"{stem}.json",
               {"gate": target.name, "mode": args.mode, "shots": args.shots,
                "seed": cfg.seed, "process_fidelity": fid,
                "chi_spin_pauli": _matrix(chi_est.entries)})
    write_matrix_csv(out / f"{stem}_chi.csv", chi_est.entries,
                     "chi (two-qubit Pauli basis, spin)")
    log.info("QPT %s/%s: process fidelity %.6f", target.name, args.mode, fid)
    return EXIT_OK


_GROVER_GATES = ("hadamard1", "hadamard2", "c00")


def cmd_grover(cfg: RunConfig, args) -> int:
    circuit = grover_circuit(args.marked)
    report = {"marked": args.marked, "mode": args.mode, "seed": cfg.seed}
    out = cfg.output_dir
    stem = f"grover_{args.marked}_{args.mode.replace('+', '_')}"

    if args.mode == "ideal":
        final = run_circuit(circuit, mode="ideal")
        report["success_rate"] = success_rate(final, args.marked)
    else:
        pulses = {}
        for name in _GROVER_GATES + (f"oracle{args.marked}",):
            pulses[name], _ = ensure_pulse(cfg, name)
        if args.mode == "pulsed":
            final = run_circuit(circuit, mode="pulsed", pulses=pulses,
                                ion=cfg.ion)
            report["success_rate"] = success_rate(final, args.marked)
        else:
            final = run_circuit(circuit, mode="pulsed+noise", pulses=pulses,
                                noise=cfg.noise, ion=cfg.ion)
            report["success_rate"] = success_rate(final, args.marked)
            # per-sample unitary circuits for a confidence interval
            samples = _grover_noise_samples(cfg, circuit, pulses, args.marked)
            mean = float(np.mean(samples))
            half = 1.96 * float(np.std(samples, ddof=1)) / np.sqrt(
                len(samples))
            report["ci95"] = [mean - half, mean + half]

    r = eigensystem(cfg.ion).eigenvectors
    rho_number = r.conj().T @ final.entries @ r
    report["rho_spin"] = _matrix(final.entries)
    report["rho_number"] = _matrix(rho_number)
    write_json(out / f"{stem}.json", report)
    write_matrix_csv(out / f"{stem}_spin.csv", final.entries,
                     "final rho (spin basis)")
    log.info("Grover marked=%d mode=%s: success rate %.6f", args.marked,
             args.mode, report["success_rate"])
    return EXIT_OK


def _grover_noise_samples(cfg: RunConfig, circuit, pulses,
                          marked: int) -> list:
    """Per-noise-sample Grover success rates (one shift draw per gate)."""
    channels = [apply_noise(pulses[op.name], cfg.noise)
                for op in circuit.ops]
    n = min(len(ch.unitaries) for ch in channels)
    r = eigensystem(cfg.ion).eigenvectors
    psi0 = np.zeros(4, dtype=complex)
    psi0[0] = 1.0
    psi0_n = r.conj().T @ psi0
    rates = []
    for k in range(n):
        u = np.eye(4, dtype=complex)
        for ch in channels:
            u = ch.unitaries[k] @ u
        psi = r @ (u @ psi0_n)
        rates.append(float(np.abs(psi[marked - 1]) ** 2))
    return rates


def cmd_multiion_verify(cfg: RunConfig, args) -> int:
    out = cfg.output_dir
    rng = np.random.default_rng(cfg.seed)
    report = {"check": args.check, "seed": cfg.seed}
    rows = []
    ok = True

    if args.check in ("composite-zz", "all"):
        dists = []
        for _ in range(args.draws):
            mode = NormalMode(omega=cfg.multiion.mode.omega,
                              epsilon=float(rng.uniform(0.5e-9, 2e-9)))
            drive = GradientDrive(b_grad=float(rng.uniform(1.0, 30.0)),
                                  delta=float(2 * np.pi * rng.uniform(
                                      0.5e3, 5e3)),
                                  k1=int(rng.integers(1, 4)))
            sys_k = TwoIonSystem(ions=cfg.multiion.ions, mode=mode,
                                 fock_cutoff=cfg.multiion.fock_cutoff,
                                 drive=drive)
            _, dist = composite_zz(sys_k)
            dists.append(dist)
            rows.append(["composite-zz", drive.b_grad,
                         drive.delta, drive.k1, dist])
        report["composite_zz"] = {"draws": args.draws,
                                  "max_distance": max(dists)}

    if args.check in ("ms-sweep", "all"):
        sweep = []
        for b0_gauss in (0.0, 2.0, 6.0, 20.0):
            ion = cfg.ion.replace(b_field=b0_gauss * 1e-4)
            _, dist = ms_composite_xx(args.tau, ion=ion)
            sweep.append({"b0_gauss": b0_gauss, "residual": dist})
            rows.append(["ms-sweep", b0_gauss, "", "", dist])
        residuals = [p["residual"] for p in sweep]
        monotone = all(residuals[i] < residuals[i + 1]
                       for i in range(len(residuals) - 1))
        report["ms_sweep"] = {"tau": args.tau, "points": sweep,
                              "monotone": monotone,
                              "floor": residuals[0]}
        ok = ok and monotone

    if args.check in ("disentanglement", "all"):
        rep = motion_disentanglement_check(cfg.multiion)
        report["disentanglement"] = {
            "spin_purity": rep.spin_purity, "residual": rep.residual,
            "cutoff_change": rep.cutoff_change, "converged": rep.converged}
        rows.append(["disentanglement", rep.spin_purity, rep.residual,
                     rep.cutoff_change, int(rep.converged)])
        ok = ok and rep.converged

    if args.check in ("selectivity", "all"):
        sel = large_field_selectivity(cfg.multiion)
        report["selectivity"] = sel
        rows.append(["selectivity", sel["relative_error"],
                     sel["gamma_ratio"], "", ""])

    if not rows:
        raise ConfigError(f"unknown check {args.check!r}")
    write_json(out / f"multiion_{args.check}.json", report)
    write_rows_csv(out / f"multiion_{args.check}.csv",
                   ["check", "a", "b", "c", "value"], rows)
    return EXIT_OK if ok else EXIT_NO_CONVERGENCE


def cmd_noise_sweep(cfg: RunConfig, args) -> int:
    """State fidelity of a long Hadamard pulse under both noise models."""
    cfg_long = copy.copy(cfg)
    cfg_long.grape = dataclasses.replace(cfg.grape, total_time=args.duration)

    seq, _ = ensure_pulse(cfg_long, args.gate)
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[2, 2] = 1.0
    u = propagate(seq)
    ideal = DensityMatrix(u @ rho0 @ u.conj().T, basis="number")
    rho0 = DensityMatrix(rho0, basis="number")

    rows = []
    fids = {}
    for name, model in (("free", noise_model_free(
            cfg.noise.n_samples, rng_seed=cfg.seed)),
            ("triggered", noise_model_triggered(
                cfg.noise.n_samples, rng_seed=cfg.seed))):
        out_rho = apply_noise(seq, model)(rho0)
        fids[name] = state_fidelity(out_rho, ideal)
        rows.append([name, args.duration, fids[name]])
        log.info("%s noise: state fidelity %.4f", name, fids[name])

    gap = fids["triggered"] - fids["free"]
    write_json(cfg.output_dir / "noise_sweep.json",
               {"gate": args.gate.lower(), "duration": args.duration,
                "seed": cfg.seed, "fidelity_free": fids["free"],
                "fidelity_triggered": fids["triggered"], "gap": gap})
    write_rows_csv(cfg.output_dir / "noise_sweep.csv",
                   ["model", "duration_s", "state_fidelity"], rows)
    return EXIT_OK


def cmd_rwa_check(cfg: RunConfig, args) -> int:
    """Lab-frame vs rotating-frame pi pulses at a scaled hyperfine constant."""
    a_scaled = 2 * np.pi * 10e6
    scale = a_scaled / cfg.ion.hyperfine_a
    p = cfg.ion.replace(hyperfine_a=a_scaled,
                        b_field=cfg.ion.b_field * scale)
    es = eigensystem(p)
    e, th = es.energies, es.theta0
    silent = MicrowaveTone(0.0, 0.0, 0.0, 0.0, 0.0)

    cases = []
    rabi_t = 2 * np.pi * 250   # transverse: keep cross-driving below 1e-3
    rabi_z = 2 * np.pi * 500
    b = rabi_t / (0.25 * abs(p.gamma_n * np.cos(th / 2)
                             + p.gamma_e * np.sin(th / 2)))
    cases.append(("3-1", [MicrowaveTone(b, 0.0, 0.0, e[0] - e[2], 0.0),
                          silent, silent], rabi_t))
    b = rabi_z / (0.5 * abs(np.sin(th / 2) * np.cos(th / 2)
                            * (p.gamma_e - p.gamma_n)))
    cases.append(("3-2", [silent, MicrowaveTone(0.0, 0.0, b, e[1] - e[2], 0.0),
                          silent], rabi_z))
    b = rabi_t / (0.25 * abs(p.gamma_n * np.sin(th / 2)
                             + p.gamma_e * np.cos(th / 2)))
    cases.append(("3-4", [silent, silent,
                          MicrowaveTone(b, 0.0, 0.0, e[3] - e[2], 0.0)],
                  rabi_t))

    fmax = max(abs(x) for x in np.subtract.outer(e, e).ravel())
    dt = (2 * np.pi / fmax) / 60
    rows, results = [], []
    worst = 0.0
    for name, tones, rabi in cases:
        duration = np.pi / (2 * rabi)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            seg = rwa_coefficients(tones, p, duration)
        u_rot = propagate(PulseSequence(segments=[seg]))
        u_lab = propagate_lab_frame(tones, p, duration, dt)
        pops_rot = np.abs(u_rot[:, 2]) ** 2
        pops_lab = np.abs(u_lab[:, 2]) ** 2
        diff = float(np.max(np.abs(pops_rot - pops_lab)))
        worst = max(worst, diff)
        results.append({"transition": name, "max_population_diff": diff,
                        "populations_rot": [float(x) for x in pops_rot],
                        "populations_lab": [float(x) for x in pops_lab]})
        rows.append([name, duration, diff])
        log.info("transition %s: max population difference %.2e", name, diff)

    write_json(cfg.output_dir / "rwa_check.json",
               {"hyperfine_a_scaled": a_scaled, "cases": results,
                "max_population_diff": worst, "passed": worst <= 1e-3})
    write_rows_csv(cfg.output_dir / "rwa_check.csv",
                   ["transition", "duration_s", "max_population_diff"], rows)
    return EXIT_OK if worst <= 1e-3 else EXIT_NO_CONVERGENCE


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinpair",
        description="Simulation and optimal-control toolkit for the "
                    "1-ion-2-qubit trapped-ion encoding.")
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--seed", type=int, help="master RNG seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="GRAPE pulse synthesis")
    p.add_argument("gate", help=f"one of {sorted(ALL_GATES)} or oracleN")
    p.set_defaults(func=cmd_synthesize)

    for name, func in (("qst", cmd_qst), ("qpt", cmd_qpt)):
        p = sub.add_parser(name, help=f"{name.upper()} simulation")
        p.add_argument("gate")
        p.add_argument("--mode", default="ideal",
                       choices=["ideal", "pulsed", "pulsed+noise"])
        p.add_argument("--shots", type=int, default=0,
                       help="0 = exact expectation values")
        p.set_defaults(func=func)

    p = sub.add_parser("grover", help="two-qubit Grover search")
    p.add_argument("--marked", type=int, default=2,
                   help="marked spin state, 1-based in (uu, ud, du, dd)")
    p.add_argument("--mode", default="ideal",
                   choices=["ideal", "pulsed", "pulsed+noise"])
    p.add_argument("--shots", type=int, default=0)
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("multiion-verify",
                       help="two-ion entangling-sequence checks")
    p.add_argument("check", choices=["composite-zz", "ms-sweep",
                                     "disentanglement", "selectivity", "all"])
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--tau", type=float, default=0.7,
                   help="MS composite target angle")
    p.set_defaults(func=cmd_multiion_verify)

    p = sub.add_parser("noise-sweep",
                       help="long-pulse fidelity under both noise models")
    p.add_argument("--gate", default="hadamard1")
    p.add_argument("--duration", type=float, default=300e-6)
    p.set_defaults(func=cmd_noise_sweep)

    p = sub.add_parser("rwa-check",
                       help="lab-frame vs rotating-frame validation")
    p.set_defaults(func=cmd_rwa_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config, args.seed, args.out)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_BAD_CONFIG
    try:
        return args.func(cfg, args)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
