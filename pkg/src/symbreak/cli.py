"""Command-line front end.

`symbreak-sim <experiment> [--key value ...]` runs one registered experiment
and writes a CSV table, a JSON metadata file, and an SVG plot into the output
directory.  `symbreak-sim validate <config.json>` schema-checks a config file
without running anything.

Exit codes: 0 success, 1 physics-level failure (e.g. an instability where a
stable solution was requested), 2 configuration error.  The environment
variable SYMBREAK_THREADS caps BLAS/OpenMP worker threads.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
import time
from dataclasses import dataclass

EXIT_OK = 0
EXIT_PHYSICS = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    """Bad experiment name, key, value, or config file."""


class PhysicsError(RuntimeError):
    """The requested computation failed for a physical reason."""


# -- option schema ---------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise ConfigError(f"empty list: {text!r}")
    return values


def _grid(text: str) -> list[float]:
    """Parse 'start:stop:step' into an inclusive grid."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(tok) for tok in parts)
    except ValueError as exc:
        raise ConfigError(f"non-numeric grid bound in {text!r}") from exc
    if step <= 0 or stop < start:
        raise ConfigError(f"grid {text!r} must have step > 0 and stop >= start")
    n = int(round((stop - start) / step))
    return [start + k * step for k in range(n + 1) if start + k * step <= stop + 1e-12]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    if str(text).lower() in ("1", "true", "yes"):
        return True
    if str(text).lower() in ("0", "false", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


_REQUIRED = object()


@dataclass(frozen=True)
class Field:
    convert: callable
    default: object = _REQUIRED
    non_negative: bool = False

    @property
    def required(self) -> bool:
        return self.default is _REQUIRED


def _coerce(name: str, field: Field, raw) -> object:
    try:
        value = field.convert(raw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    if field.non_negative:
        bad = any(v < 0 for v in value) if isinstance(value, list) else value < 0
        if bad:
            raise ConfigError(f"{name}: must be non-negative")
    return value


def resolve_params(experiment: str, raw: dict) -> dict:
    """Validate raw string/JSON values against the experiment schema."""
    schema = _schema(experiment)
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"unknown key(s) for {experiment}: {', '.join(sorted(unknown))}")
    params = {}
    for name, field in schema.items():
        if name in raw:
            params[name] = _coerce(name, field, raw[name])
        elif field.required:
            raise ConfigError(f"missing required key for {experiment}: {name}")
        else:
            params[name] = field.default
    return params


def _schema(experiment: str) -> dict:
    if experiment not in REGISTRY:
        hints = difflib.get_close_matches(experiment, REGISTRY, n=3, cutoff=0.4)
        msg = f"unknown experiment {experiment!r}"
        if hints:
            msg += f"; did you mean: {', '.join(hints)}?"
        msg += f" (available: {', '.join(sorted(REGISTRY))})"
        raise ConfigError(msg)
    return REGISTRY[experiment].schema


# -- experiments -----------------------------------------------------------------


@dataclass(frozen=True)
class Experiment:
    run: callable
    schema: dict
    description: str


def _run_pt_threshold(params, seed):
    from .pt_dimer import DimerParams, lasing_branch_density

    rows = []
    for J in params["J-grid"]:
        p = DimerParams(J=J, kappa_a=params["kappa-a"], kappa_b=params["kappa-b"],
                        n_star=params["n-star"])
        n_mf, _ = lasing_branch_density(p)
        rows.append((J, n_mf, p.lasing))
    meta = {"threshold_2J": (params["kappa-a"] * params["kappa-b"]) ** 0.5}
    plot = {"x": "J", "y": ["n_mf"], "ylabel": "steady density"}
    return ("J", "n_mf", "stable"), rows, meta, plot


def _run_pt_mf_vs_exact(params, seed):
    import numpy as np

    from .pt_dimer import mf_vs_exact_scan, scaling_param_grid

    grid = scaling_param_grid(targets=tuple(params["targets"]), J=params["J"],
                              kappa_a=params["kappa-a"], kappa_b=params["kappa-b"])
    scan = mf_vs_exact_scan(grid)
    rows = [(r["n_star"], r["n_mf"], r["n_exact"], r["error"], r["converged"])
            for r in scan]
    good = [r for r in scan if r["converged"]]
    meta = {"n_converged": len(good)}
    if len(good) >= 2:
        slope = np.polyfit(np.log([r["n_exact"] for r in good]),
                           np.log([r["error"] for r in good]), 1)[0]
        meta["error_scaling_slope"] = float(slope)
    plot = {"x": "n_exact", "y": ["abs_error"], "logx": True, "logy": True,
            "ylabel": "|exact - mean field|"}
    return ("n_star", "n_mf", "n_exact", "abs_error", "converged"), rows, meta, plot


def _run_pt_phase_diffusion(params, seed):
    from .pt_dimer import (DimerParams, UnstableDynamicsError, langevin_simulate,
                           lasing_branch_density, phase_diffusion_estimate)

    ka = params["kappa-a"]
    rows = []
    scaled = []
    for k, r in enumerate(params["r-values"]):
        if not 0 < r < 1:
            raise ConfigError(f"r-values entries must lie in (0, 1), got {r}")
        p = DimerParams(J=params["J"], kappa_a=ka, kappa_b=r * ka,
                        n_star=params["n-star"])
        if not p.lasing:
            raise PhysicsError(f"no finite-density branch at r={r}: 2J >= sqrt(ka kb)")
        n_mf, _ = lasing_branch_density(p)
        rho_a2 = n_mf * p.kappa_b / (ka + p.kappa_b)
        try:
            times, a, _ = langevin_simulate(
                p, seed=seed + k, t_max=params["t-max"], dt=params["dt"],
                n_traj=params["n-traj"], sample_every=params["sample-every"])
            D, D_err = phase_diffusion_estimate(times, a, transient=params["transient"])
        except (UnstableDynamicsError, RuntimeError) as exc:
            raise PhysicsError(str(exc)) from exc
        rows.append((r, n_mf, D, D_err, D * rho_a2))
        scaled.append((r, D * rho_a2))
    meta = {}
    if len(scaled) >= 2:
        (r0, d0), (r1, d1) = scaled[0], scaled[-1]
        meta["scaled_ratio"] = d1 / d0
        meta["predicted_ratio"] = (r1 / (1 - r1)) ** 2 / (r0 / (1 - r0)) ** 2
    plot = {"x": "r", "y": ["D_scaled"], "ylabel": "D * rho_a^2"}
    return ("r", "n_mf", "D", "D_err", "D_scaled"), rows, meta, plot


def _run_pt_gain_sat_compare(params, seed):
    from .pt_dimer import DimerParams, instability_certificate

    rows = []
    for delta in params["delta-values"]:
        p = DimerParams(J=params["J"], kappa_a=params["kappa"],
                        kappa_b=params["kappa"], n_star=params["n-star"],
                        delta=delta)
        cert = instability_certificate(p, n_max=params["n-max"])
        rows.append((delta, cert["detuned_hop_unstable_for_all_n"],
                     cert["gain_sat_stabilizing_b"] is not None,
                     cert["min_max_re"]))
    plot = {"x": "delta", "y": ["min_max_re_lambda"],
            "ylabel": "min over n of max Re eigenvalue"}
    return ("delta", "hop_unstable_all_n", "gain_sat_stabilizes",
            "min_max_re_lambda"), rows, {}, plot


def _ssh_params(params, require_xi: bool = True):
    from .ssh import SSHParams

    kwargs = dict(n_sites=params["n-sites"], J=params["J"], U=params["U"],
                  kappa=params["kappa"], gamma=params.get("gamma", 0.0))
    if params.get("xi") is not None:
        return SSHParams.from_xi(xi=params["xi"], eta=params["eta"], **kwargs)
    raise ConfigError("xi is required")


def _run_ssh_limit_cycle(params, seed):
    import numpy as np

    from .ssh import floquet_multipliers, limit_cycle_solve

    p = _ssh_params(params)
    cycle = limit_cycle_solve(p)
    if cycle.residual > params["tol"]:
        raise PhysicsError(f"limit-cycle residual {cycle.residual:.2e} above {params['tol']:.0e}")
    mults = floquet_multipliers(p, cycle)
    inside = np.abs(mults)
    # one unit-modulus multiplier is exact (global phase freedom); stability
    # concerns the rest
    interior = np.sort(inside)[:-1]
    if interior.size and interior.max() > 1 + 1e-6:
        raise PhysicsError(f"limit cycle unstable: |multiplier| {interior.max():.6f} > 1")
    rows = [(i, float(np.abs(cycle.d0[i])), float(np.angle(cycle.d0[i])))
            for i in range(p.n_sites)]
    meta = {"frequency": cycle.frequency, "residual": cycle.residual,
            "density": float(np.sum(np.abs(cycle.d0) ** 2)),
            "max_interior_multiplier": float(interior.max()) if interior.size else None}
    plot = {"x": "site", "y": ["amplitude"], "ylabel": "|d_i|"}
    return ("site", "amplitude", "phase"), rows, meta, plot


def _run_ssh_mf_overlap(params, seed):
    from .ssh import mean_field_self_consistent

    p = _ssh_params(params)
    result = mean_field_self_consistent(p)
    rows = [(float(s), float(o))
            for s, o in zip(result["curve_s"], result["curve_overlap"])]
    meta = {"density": result["density"], "b_overlap": result["b_overlap"],
            "edge_energy": result["edge_energy"], "target": p.eta ** 2}
    plot = {"x": "s", "y": ["b_overlap"], "ylabel": "lossy-sublattice overlap"}
    return ("s", "b_overlap"), rows, meta, plot


def _run_ssh_fock_fidelity(params, seed):
    from .ssh import fock_fidelity, quantum_steady_state

    if params["eta"] is None:
        params = dict(params, eta=params["xi"] ** 2)
    p = _ssh_params(params)
    try:
        rho, _ = quantum_steady_state(p, dims=params["dims"],
                                      max_total=params["max-total"],
                                      check_convergence=params["check-convergence"])
    except RuntimeError as exc:
        raise PhysicsError(str(exc)) from exc
    fid = fock_fidelity(rho, p)
    rows = [(params["xi"], p.eta, fid, 1 - fid)]
    plot = {"x": "xi", "y": ["infidelity"], "logx": True, "logy": True,
            "ylabel": "1 - F"}
    return ("xi", "eta", "fidelity", "infidelity"), rows, {}, plot


def _run_ssh_no_go(params, seed):
    import numpy as np

    from .ssh import single_mode_no_go_scan

    gammas = np.logspace(np.log10(params["gamma-min"]), np.log10(params["gamma-max"]),
                         params["gamma-num"])
    scan = single_mode_no_go_scan(gammas, np.array(params["loss-ratios"]),
                                  dim=params["dim"])
    rows = []
    best = {}
    for r, kl in enumerate(scan["loss_ratios"]):
        for c, g in enumerate(scan["gamma_ratios"]):
            f = scan["fidelity"][r, c]
            rows.append((float(g), float(kl), float(f)))
            if np.isfinite(f):
                best[float(kl)] = max(best.get(float(kl), 0.0), float(f))
    meta = {"max_fidelity": scan["max_fidelity"], "argmax": scan["argmax"],
            "max_fidelity_per_loss_ratio": {str(k): v for k, v in sorted(best.items())}}
    plot = {"x": "gamma_ratio", "y": ["fidelity"], "group": "loss_ratio",
            "logx": True, "ylabel": "single-photon fidelity"}
    return ("gamma_ratio", "loss_ratio", "fidelity"), rows, meta, plot


def _run_ssh_added_loss(params, seed):
    import numpy as np

    from .ssh import added_loss_scan

    table = added_loss_scan(np.array(params["gammas"]), n_sites=params["n-sites"],
                            dims=params["dims"], max_total=params["max-total"],
                            optimize_each=params["optimize"])
    rows = [(r["gamma"], r["infidelity"]) for r in table]
    infs = [inf for _, inf in rows]
    meta = {"monotone_non_decreasing": bool(all(b >= a - 1e-12 for a, b in zip(infs, infs[1:])))}
    plot = {"x": "gamma", "y": ["infidelity"], "logx": True, "logy": True,
            "ylabel": "1 - F"}
    return ("gamma", "infidelity"), rows, meta, plot


def _run_dissipator_identity(params, seed):
    import numpy as np

    from .ssh import SSHParams, build_ssh, dissipator_identity_deviation

    n = params["n-sites"]
    dims = (params["dims"],) * n
    kappa, eta = params["kappa"], params["eta"]
    p = SSHParams(n_sites=n, J=1.0, delta=0.5, U=0.0, kappa=kappa, eta=eta)
    H1, chiral = build_ssh(p)
    rows = [("ssh-chain", dissipator_identity_deviation(H1, chiral, dims, kappa, eta))]
    rng = np.random.default_rng(seed)
    n_a = (n + 1) // 2
    for k in range(params["n-random"]):
        block = rng.normal(size=(n_a, n - n_a)) + 1j * rng.normal(size=(n_a, n - n_a))
        H = np.zeros((n, n), complex)
        a_idx = np.arange(0, n, 2)
        b_idx = np.arange(1, n, 2)
        H[np.ix_(a_idx, b_idx)] = block
        H[np.ix_(b_idx, a_idx)] = block.conj().T
        rows.append((f"random-{k}", dissipator_identity_deviation(H, chiral, dims, kappa, eta)))
    worst = max(dev for _, dev in rows)
    if worst > params["tol"]:
        raise PhysicsError(f"dissipator identity violated: deviation {worst:.3e}")
    meta = {"max_deviation": worst}
    plot = {"x": "case", "y": ["deviation"], "logy": True, "ylabel": "superoperator deviation"}
    return ("case", "deviation"), rows, meta, plot


REGISTRY = {
    "pt-threshold": Experiment(
        _run_pt_threshold,
        {"J-grid": Field(_grid, default=_grid("0.1:3.0:0.05")),
         "kappa-a": Field(float, default=4.0, non_negative=True),
         "kappa-b": Field(float, default=1.5, non_negative=True),
         "n-star": Field(float, default=1.0, non_negative=True)},
        "Mean-field lasing density and stability across a hopping grid."),
    "pt-mf-vs-exact": Experiment(
        _run_pt_mf_vs_exact,
        {"targets": Field(_float_list, default=[3.0, 6.0], non_negative=True),
         "J": Field(float, default=0.95, non_negative=True),
         "kappa-a": Field(float, default=4.0, non_negative=True),
         "kappa-b": Field(float, default=1.5, non_negative=True)},
        "Exact steady density vs the analytic mean-field branch."),
    "pt-phase-diffusion": Experiment(
        _run_pt_phase_diffusion,
        {"kappa-a": Field(float, default=4.0, non_negative=True),
         "r-values": Field(_float_list, default=[0.1, 0.2], non_negative=True),
         "J": Field(float, default=0.5, non_negative=True),
         "n-star": Field(float, default=2000.0, non_negative=True),
         "t-max": Field(float, default=800.0, non_negative=True),
         "dt": Field(float, default=0.01, non_negative=True),
         "n-traj": Field(int, default=2048, non_negative=True),
         "sample-every": Field(int, default=40, non_negative=True),
         "transient": Field(float, default=80.0, non_negative=True)},
        "Langevin phase-diffusion constants vs the pump/loss ratio."),
    "pt-gain-sat-compare": Experiment(
        _run_pt_gain_sat_compare,
        {"delta-values": Field(_float_list, default=[0.1, 0.3, 1.0], non_negative=True),
         "kappa": Field(float, default=1.0, non_negative=True),
         "J": Field(float, default=1.0, non_negative=True),
         "n-star": Field(float, default=1.0, non_negative=True),
         "n-max": Field(float, default=1e4, non_negative=True)},
        "Detuned nonlinear-hopping vs gain-saturation stabilization."),
    "ssh-limit-cycle": Experiment(
        _run_ssh_limit_cycle,
        {"n-sites": Field(int, default=21, non_negative=True),
         "J": Field(float, default=1.0, non_negative=True),
         "xi": Field(float, default=0.5, non_negative=True),
         "U": Field(float, default=0.001, non_negative=True),
         "kappa": Field(float, default=1.0, non_negative=True),
         "eta": Field(float, default=0.2, non_negative=True),
         "tol": Field(float, default=1e-8, non_negative=True)},
        "Self-consistent rotating edge solution and its stability."),
    "ssh-mf-overlap": Experiment(
        _run_ssh_mf_overlap,
        {"n-sites": Field(int, default=21, non_negative=True),
         "J": Field(float, default=1.0, non_negative=True),
         "xi": Field(float, default=0.5, non_negative=True),
         "U": Field(float, default=1.0, non_negative=True),
         "kappa": Field(float, default=1.0, non_negative=True),
         "eta": Field(float, default=0.1, non_negative=True)},
        "Lossy-sublattice overlap of the interacting edge mode vs nonlinear shift."),
    "ssh-fock-fidelity": Experiment(
        _run_ssh_fock_fidelity,
        {"xi": Field(float, non_negative=True),
         "U": Field(float, default=1.0, non_negative=True),
         "kappa": Field(float, default=1.0, non_negative=True),
         "J": Field(float, default=1.0, non_negative=True),
         "eta": Field(float, default=None),
         "n-sites": Field(int, default=5, non_negative=True),
         "dims": Field(int, default=5, non_negative=True),
         "max-total": Field(int, default=4, non_negative=True),
         "check-convergence": Field(_bool, default=False)},
        "Edge-mode single-photon fidelity of the exact steady state."),
    "ssh-no-go": Experiment(
        _run_ssh_no_go,
        {"gamma-min": Field(float, default=1e-2, non_negative=True),
         "gamma-max": Field(float, default=1e2, non_negative=True),
         "gamma-num": Field(int, default=25, non_negative=True),
         "loss-ratios": Field(_float_list, default=[0.0, 0.1, 0.3, 1.0],
                              non_negative=True),
         "dim": Field(int, default=12, non_negative=True)},
        "Best achievable single-mode single-photon fidelity."),
    "ssh-added-loss": Experiment(
        _run_ssh_added_loss,
        {"gammas": Field(_float_list, default=[1e-4, 1e-3, 1e-2, 1e-1],
                         non_negative=True),
         "n-sites": Field(int, default=5, non_negative=True),
         "dims": Field(int, default=5, non_negative=True),
         "max-total": Field(int, default=3, non_negative=True),
         "optimize": Field(_bool, default=False)},
        "Infidelity growth under extra loss on the pumped sublattice."),
    "dissipator-identity": Experiment(
        _run_dissipator_identity,
        {"n-sites": Field(int, default=3, non_negative=True),
         "dims": Field(int, default=2, non_negative=True),
         "kappa": Field(float, default=1.0, non_negative=True),
         "eta": Field(float, default=0.3, non_negative=True),
         "n-random": Field(int, default=10, non_negative=True),
         "tol": Field(float, default=1e-10, non_negative=True)},
        "Site-basis vs mode-basis Liouvillian agreement."),
}


# -- output writers ---------------------------------------------------------------


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_csv(path: str, columns, rows) -> None:
    lines = [",".join(columns)]
    lines += [",".join(_format_cell(v) for v in row) for row in rows]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def write_svg(path: str, columns, rows, plot: dict) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    col = {name: [row[i] for row in rows] for i, name in enumerate(columns)}
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x_name = plot["x"]
    x_raw = col.get(x_name, list(range(len(rows))))
    numeric_x = all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x_raw)
    xs = x_raw if numeric_x else list(range(len(x_raw)))
    if "group" in plot:
        groups = sorted(set(col[plot["group"]]))
        for g in groups:
            mask = [v == g for v in col[plot["group"]]]
            gx = [x for x, m in zip(xs, mask) if m]
            for y_name in plot["y"]:
                gy = [y for y, m in zip(col[y_name], mask) if m]
                ax.plot(gx, gy, marker="o", ms=3, label=f"{plot['group']}={g}")
        ax.legend(fontsize=8)
    else:
        for y_name in plot["y"]:
            ax.plot(xs, col[y_name], marker="o", ms=3, label=y_name)
        if len(plot["y"]) > 1:
            ax.legend(fontsize=8)
    if plot.get("logx") and numeric_x:
        ax.set_xscale("log")
    if plot.get("logy"):
        ax.set_yscale("log")
    ax.set_xlabel(x_name)
    ax.set_ylabel(plot.get("ylabel", ", ".join(plot["y"])))
    if not numeric_x:
        ax.set_xticks(xs)
        ax.set_xticklabels([str(v) for v in x_raw], rotation=45, fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# -- driver ------------------------------------------------------------------------


def _limit_threads() -> None:
    threads = os.environ.get("SYMBREAK_THREADS")
    if not threads:
        return
    if not threads.isdigit() or int(threads) < 1:
        raise ConfigError(f"SYMBREAK_THREADS must be a positive integer, got {threads!r}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, threads)


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return config


def validate_config(path: str) -> list[str]:
    """Schema diagnostics for a config file; empty list means OK."""
    config = _load_config(path)
    problems = []
    experiment = config.get("experiment")
    if not experiment:
        return [f"config {path}: missing 'experiment' key"]
    try:
        params = config.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("'params' must be an object")
        resolve_params(experiment, params)
    except ConfigError as exc:
        problems.append(str(exc))
    seed = config.get("seed", 0)
    if not isinstance(seed, int):
        problems.append(f"seed must be an integer, got {seed!r}")
    return problems


def _cli_overrides(tokens: list[str]) -> dict:
    raw = {}
    k = 0
    while k < len(tokens):
        tok = tokens[k]
        if not tok.startswith("--") or len(tok) == 2:
            raise ConfigError(f"expected --key value pairs, got {tok!r}")
        if "=" in tok:
            key, value = tok[2:].split("=", 1)
            k += 1
        else:
            if k + 1 >= len(tokens):
                raise ConfigError(f"missing value for {tok}")
            key, value = tok[2:], tokens[k + 1]
            k += 2
        raw[key] = value
    return raw


def run_experiment(experiment: str, raw_params: dict, seed: int, out_dir: str,
                   formats: set[str]) -> str:
    params = resolve_params(experiment, raw_params)
    os.makedirs(out_dir, exist_ok=True)
    start = time.time()
    columns, rows, meta, plot = REGISTRY[experiment].run(params, seed)
    runtime = time.time() - start
    base = os.path.join(out_dir, experiment)
    if "csv" in formats:
        write_csv(base + ".csv", columns, rows)
    if "json" in formats:
        payload = {"experiment": experiment,
                   "description": REGISTRY[experiment].description,
                   "params": {k: v for k, v in params.items()},
                   "seed": seed, "n_rows": len(rows),
                   "runtime_seconds": round(runtime, 3), "results": meta}
        write_json(base + ".json", payload)
    if "svg" in formats:
        write_svg(base + ".svg", columns, rows, plot)
    return base


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="symbreak-sim",
        description="Run a registered simulation experiment or validate a config file.")
    parser.add_argument("experiment",
                        help="experiment name, or 'validate' with a config path")
    parser.add_argument("target", nargs="?", default=None,
                        help="config path (validate mode only)")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--format", choices=("csv", "json", "svg"), default=None,
                        help="write only this artifact (default: all)")
    args, extra = parser.parse_known_args(argv)

    try:
        _limit_threads()
        if args.experiment == "validate":
            path = args.target or args.config
            if path is None:
                raise ConfigError("validate requires a config path")
            problems = validate_config(path)
            if problems:
                for msg in problems:
                    print(msg, file=sys.stderr)
                return EXIT_CONFIG
            print("ok")
            return EXIT_OK
        if args.target is not None:
            raise ConfigError(f"unexpected positional argument {args.target!r}")
        raw = {}
        seed = args.seed
        if args.config is not None:
            config = _load_config(args.config)
            cfg_exp = config.get("experiment")
            if cfg_exp is not None and cfg_exp != args.experiment:
                raise ConfigError(
                    f"config is for {cfg_exp!r} but {args.experiment!r} was requested")
            raw.update(config.get("params", {}))
            seed = config.get("seed", seed)
        raw.update(_cli_overrides(extra))
        formats = {args.format} if args.format else {"csv", "json", "svg"}
        base = run_experiment(args.experiment, raw, seed, args.out, formats)
        print(f"wrote {base}.{{{','.join(sorted(formats))}}}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
