"""Reproducible experiment runner.

Every subcommand resolves its configuration from an optional JSON config file
plus command-line flags (flags win), validates it, runs the experiment, and
writes exactly one result file plus a ``<out>.manifest.json`` sidecar holding
the resolved configuration, package version and wall time.  Result files are
byte-identical across reruns with the same configuration, including across
``--threads`` settings; the manifest is the only place wall time appears.

Exit codes: 0 success, 2 invalid configuration, 3 resource guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from typing import Any, Callable, Optional

import numpy as np

from ._version import __version__
from .arch import (
    CircuitArchitecture,
    arch_to_dict,
    build_local_parallel,
    build_nlhs,
    realize,
)
from .fock import (
    count_permitted_fbs,
    count_permitted_fbs_effective,
    fbs_depth_thresholds,
)
from .gaussian import (
    GbsConfig,
    count_permitted_gbs,
    gbs_depth_thresholds,
    page_curve,
)
from .linalg import RngStream, haar_unitary
from .matfn import GuardError
from .stats import (
    density_function,
    fbs_probability_samples,
    frame_potential,
    gbs_probability_samples,
    hiding_samples,
)

__all__ = ["main", "run", "validate_config", "EXPERIMENTS"]

THREADS_ENV = "SHALLOWBS_THREADS"

# flag name -> (type tag, help); type tags: int, float, str, intlist, flag
_FLAGS: dict[str, tuple[str, str]] = {
    "seed": ("int", "master random seed (required, recorded in the manifest)"),
    "out": ("str", "result file path; a .manifest.json sidecar is written next to it"),
    "format": ("str", "output format: csv or json"),
    "threads": ("int", f"worker threads (default from ${THREADS_ENV} or 1)"),
    "ensemble": ("str", "circuit ensemble: local-parallel, nlhs or haar"),
    "modes": ("int", "number of optical modes"),
    "dim": ("int", "lattice dimension for the local-parallel ensemble"),
    "sides": ("intlist", "comma-separated lattice side lengths (default: one row of all modes)"),
    "depth": ("int", "number of circuit layers"),
    "rounds": ("int", "number of full sweeps for the nlhs ensemble"),
    "photons": ("int", "number of photons"),
    "pairs": ("int", "number of photon pairs (gbs)"),
    "k-inputs": ("int", "number of squeezed input modes (gbs)"),
    "squeeze": ("float", "squeezing parameter r"),
    "buckets": ("int", "number of equal-count density buckets"),
    "samples": ("int", "number of Monte-Carlo samples"),
    "k-moment": ("int", "frame-potential moment order"),
    "lambda": ("float", "effective-lightcone exponent"),
    "beta": ("float", "leakage exponent, in (0, 1)"),
    "gamma": ("float", "mode-scaling exponent, >= 1"),
    "c-const": ("float", "mode-scaling constant"),
    "scheme": ("str", "counting scheme: fbs or gbs"),
    "input": ("intlist", "comma-separated input mode pattern"),
    "kind": ("str", "hiding ensemble kind: fbs or gbs"),
    "effective": ("flag", "clip lightcones to the effective radius"),
}

_COMMON = ("seed", "out", "format", "threads")
_ENSEMBLE = ("ensemble", "modes", "dim", "sides", "depth", "rounds")

# experiment -> (flags beyond common, defaults, nested-report?)
EXPERIMENTS: dict[str, dict[str, Any]] = {
    "arch-info": {
        "flags": _ENSEMBLE,
        "defaults": {"format": "json"},
        "nested": True,
    },
    "permitted-count": {
        "flags": _ENSEMBLE
        + ("scheme", "photons", "pairs", "k-inputs", "squeeze", "input", "effective", "lambda", "beta"),
        "defaults": {"format": "json", "scheme": "fbs", "effective": False},
        "nested": True,
    },
    "thresholds": {
        "flags": ("photons", "pairs", "gamma", "c-const", "dim", "lambda", "beta"),
        "defaults": {"format": "json", "dim": 1},
        "nested": True,
    },
    "density-fbs": {
        "flags": _ENSEMBLE + ("photons", "samples", "buckets"),
        "defaults": {"format": "csv", "samples": 10000, "buckets": 20},
        "nested": False,
    },
    "density-gbs": {
        "flags": _ENSEMBLE + ("photons", "samples", "buckets"),
        "defaults": {"format": "csv", "samples": 10000, "buckets": 20},
        "nested": False,
    },
    "page-curve": {
        "flags": _ENSEMBLE + ("squeeze", "samples"),
        "defaults": {"format": "csv", "squeeze": 0.4, "samples": 10000},
        "nested": False,
    },
    "frame-potential": {
        "flags": _ENSEMBLE + ("k-moment", "samples"),
        "defaults": {"format": "csv", "k-moment": 2, "samples": 50000},
        "nested": False,
    },
    "hiding": {
        "flags": ("kind", "modes", "photons", "samples"),
        "defaults": {"format": "csv", "samples": 10000},
        "nested": False,
    },
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shallowbs",
        description="Shallow-circuit sampling experiments with reproducible outputs.",
    )
    sub = parser.add_subparsers(dest="experiment")
    for name, info in EXPERIMENTS.items():
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=str, default=None, help="JSON config file; flags override it")
        for flag in _COMMON + tuple(info["flags"]):
            kind, help_text = _FLAGS[flag]
            dest = flag.replace("-", "_")
            if kind == "flag":
                p.add_argument(f"--{flag}", dest=dest, action="store_const", const=True,
                               default=None, help=help_text)
            else:
                typ = {"int": int, "float": float, "str": str, "intlist": str}[kind]
                p.add_argument(f"--{flag}", dest=dest, type=typ, default=None, help=help_text)
    return parser


def _parse_intlist(value: Any, name: str, diags: list[str]) -> Optional[list[int]]:
    if value is None:
        return None
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip() != ""]
        try:
            return [int(p) for p in parts]
        except ValueError:
            diags.append(f"{name}: expected comma-separated integers, got {value!r}")
            return None
    if isinstance(value, (list, tuple)):
        try:
            return [int(v) for v in value]
        except (TypeError, ValueError):
            diags.append(f"{name}: expected a list of integers, got {value!r}")
            return None
    diags.append(f"{name}: expected integers, got {value!r}")
    return None


def resolve_config(experiment: str, namespace: argparse.Namespace) -> tuple[dict, list[str]]:
    """Merge config file, flags and defaults into one flat dictionary."""
    diags: list[str] = []
    info = EXPERIMENTS[experiment]
    keys = _COMMON + tuple(info["flags"])
    file_cfg: dict = {}
    if namespace.config is not None:
        try:
            with open(namespace.config, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            return {}, [f"config file: {exc}"]
        if not isinstance(file_cfg, dict):
            return {}, ["config file: top level must be a JSON object"]
        unknown = set(file_cfg) - {k.replace("-", "_") for k in keys} - set(keys) - {"experiment"}
        for key in sorted(unknown):
            diags.append(f"config file: unknown key {key!r} for experiment {experiment}")

    resolved: dict = {"experiment": experiment}
    for flag in keys:
        dest = flag.replace("-", "_")
        value = getattr(namespace, dest, None)
        if value is None:
            value = file_cfg.get(dest, file_cfg.get(flag))
        if value is None:
            value = info["defaults"].get(flag)
        if _FLAGS[flag][0] == "intlist" and value is not None:
            value = _parse_intlist(value, flag, diags)
        if _FLAGS[flag][0] == "flag" and value is None:
            value = False
        resolved[dest] = value
    return resolved, diags


def _need(cfg: dict, key: str, diags: list[str]) -> bool:
    if cfg.get(key) is None:
        diags.append(f"missing required option --{key.replace('_', '-')}")
        return False
    return True


def _check_positive(cfg: dict, key: str, diags: list[str]) -> None:
    value = cfg.get(key)
    if value is not None and value < 1:
        diags.append(f"--{key.replace('_', '-')} must be positive, got {value}")


def _validate_ensemble(cfg: dict, diags: list[str], require_arch: bool) -> None:
    ensemble = cfg.get("ensemble")
    if ensemble is None:
        diags.append("missing required option --ensemble")
        return
    if ensemble not in ("local-parallel", "nlhs", "haar"):
        diags.append(f"unknown ensemble {ensemble!r}")
        return
    if require_arch and ensemble == "haar":
        diags.append(f"{cfg['experiment']} needs a gate architecture; the haar ensemble has none")
        return
    if not _need(cfg, "modes", diags):
        return
    _check_positive(cfg, "modes", diags)
    m = cfg["modes"]
    if ensemble == "nlhs":
        if m < 2 or m & (m - 1) != 0:
            diags.append(f"nlhs ensemble requires a power-of-two mode count, got {m}")
        if not _need(cfg, "rounds", diags):
            return
        _check_positive(cfg, "rounds", diags)
    if ensemble == "local-parallel":
        if not _need(cfg, "depth", diags):
            return
        _check_positive(cfg, "depth", diags)
        dim = cfg.get("dim") or 1
        sides = cfg.get("sides")
        if sides is None:
            if dim != 1:
                diags.append("--sides is required for lattices with dim > 1")
                return
            sides = [m]
        if len(sides) != dim:
            diags.append(f"expected {dim} side lengths, got {len(sides)}")
        elif math.prod(sides) != m:
            diags.append(f"side lengths {sides} do not fill {m} modes")
        elif any(s < 2 for s in sides):
            diags.append(f"every side length must be at least 2, got {sides}")
        cfg["dim"] = dim
        cfg["sides"] = sides


def validate_config(cfg: dict) -> list[str]:
    """Diagnostics for a resolved configuration; empty means runnable."""
    diags: list[str] = []
    experiment = cfg.get("experiment")
    if experiment not in EXPERIMENTS:
        return [f"unknown experiment {experiment!r}"]
    _need(cfg, "seed", diags)
    if cfg.get("seed") is not None and cfg["seed"] < 0:
        diags.append(f"--seed must be non-negative, got {cfg['seed']}")
    _need(cfg, "out", diags)
    if cfg.get("format") not in ("csv", "json"):
        diags.append(f"--format must be csv or json, got {cfg.get('format')!r}")
    if EXPERIMENTS[experiment]["nested"] and cfg.get("format") == "csv" and experiment == "arch-info":
        diags.append("arch-info emits a nested report; use --format json")
    threads = cfg.get("threads")
    if threads is not None and threads < 1:
        diags.append(f"--threads must be positive, got {threads}")

    if experiment == "arch-info":
        _validate_ensemble(cfg, diags, require_arch=True)
    elif experiment == "permitted-count":
        _validate_ensemble(cfg, diags, require_arch=True)
        scheme = cfg.get("scheme")
        if scheme not in ("fbs", "gbs"):
            diags.append(f"--scheme must be fbs or gbs, got {scheme!r}")
        elif scheme == "fbs":
            if _need(cfg, "photons", diags):
                _check_positive(cfg, "photons", diags)
        else:
            if _need(cfg, "pairs", diags):
                _check_positive(cfg, "pairs", diags)
            if cfg.get("effective"):
                diags.append("effective clipping applies to the fbs scheme only")
        if cfg.get("effective"):
            if cfg.get("ensemble") == "nlhs":
                diags.append("effective clipping requires the local-parallel ensemble")
            for key in ("lambda", "beta"):
                _need(cfg, key, diags)
    elif experiment == "thresholds":
        if _need(cfg, "photons", diags):
            _check_positive(cfg, "photons", diags)
            if cfg.get("pairs") is None and cfg["photons"] >= 2:
                cfg["pairs"] = cfg["photons"] // 2
        if _need(cfg, "pairs", diags):
            _check_positive(cfg, "pairs", diags)
        for key in ("gamma", "c_const", "lambda", "beta"):
            _need(cfg, key, diags)
        if cfg.get("gamma") is not None and cfg["gamma"] < 1:
            diags.append(f"--gamma must be >= 1, got {cfg['gamma']}")
        if cfg.get("c_const") is not None and cfg["c_const"] <= 0:
            diags.append(f"--c-const must be positive, got {cfg['c_const']}")
        _check_positive(cfg, "dim", diags)
    elif experiment in ("density-fbs", "density-gbs"):
        _validate_ensemble(cfg, diags, require_arch=False)
        if _need(cfg, "photons", diags):
            _check_positive(cfg, "photons", diags)
            if experiment == "density-gbs" and cfg["photons"] % 2 != 0:
                diags.append(f"density-gbs needs an even photon number, got {cfg['photons']}")
            if cfg.get("modes") is not None and cfg["photons"] > cfg["modes"]:
                diags.append("photon number exceeds mode count for collision-free patterns")
        _check_positive(cfg, "samples", diags)
        _check_positive(cfg, "buckets", diags)
        if cfg.get("samples") is not None and cfg.get("buckets") is not None:
            if cfg["buckets"] > cfg["samples"]:
                diags.append("more buckets than samples")
    elif experiment == "page-curve":
        _validate_ensemble(cfg, diags, require_arch=False)
        if cfg.get("modes") is not None and cfg["modes"] < 2:
            diags.append("page-curve needs at least two modes")
        if cfg.get("squeeze") is not None and cfg["squeeze"] <= 0:
            diags.append(f"--squeeze must be positive, got {cfg['squeeze']}")
        _check_positive(cfg, "samples", diags)
        if cfg.get("samples") is not None and cfg["samples"] < 2:
            diags.append("page-curve needs at least two samples")
    elif experiment == "frame-potential":
        _validate_ensemble(cfg, diags, require_arch=False)
        _check_positive(cfg, "k_moment", diags)
        _check_positive(cfg, "samples", diags)
    elif experiment == "hiding":
        if cfg.get("kind") not in ("fbs", "gbs"):
            diags.append(f"--kind must be fbs or gbs, got {cfg.get('kind')!r}")
        if _need(cfg, "modes", diags):
            _check_positive(cfg, "modes", diags)
        if _need(cfg, "photons", diags):
            _check_positive(cfg, "photons", diags)
            if cfg.get("kind") == "gbs" and cfg["photons"] % 2 != 0:
                diags.append(f"gbs hiding needs an even photon number, got {cfg['photons']}")
        _check_positive(cfg, "samples", diags)

    if cfg.get("lambda") is not None and cfg["lambda"] <= 0:
        diags.append(f"--lambda must be positive, got {cfg['lambda']}")
    if cfg.get("beta") is not None and not 0 < cfg["beta"] < 1:
        diags.append(f"--beta must lie in (0, 1), got {cfg['beta']}")
    return diags


def _build_arch(cfg: dict) -> CircuitArchitecture:
    if cfg["ensemble"] == "nlhs":
        p = cfg["modes"].bit_length() - 1
        return build_nlhs(p, cfg["rounds"])
    return build_local_parallel(cfg["dim"], cfg["sides"], cfg["depth"])


def _build_sampler(cfg: dict) -> tuple[str, Callable[[np.random.Generator], np.ndarray]]:
    m = cfg["modes"]
    if cfg["ensemble"] == "haar":
        return f"haar(m={m})", lambda gen: haar_unitary(m, gen)
    arch = _build_arch(cfg)
    if cfg["ensemble"] == "nlhs":
        tag = f"nlhs(p={arch.log2_modes},rounds={arch.rounds})"
    else:
        sides = "x".join(str(s) for s in arch.side_lengths)
        tag = f"local-parallel(d={arch.dimension},sides={sides},depth={arch.depth})"
    return tag, lambda gen: realize(arch, gen)


def _run_arch_info(cfg: dict, master: RngStream) -> dict:
    arch = _build_arch(cfg)
    info = arch_to_dict(arch)
    info["depth"] = arch.depth
    info["gate_count"] = arch.gate_count
    return {"json": info}


def _run_permitted_count(cfg: dict, master: RngStream) -> dict:
    arch = _build_arch(cfg)
    depth = arch.depth
    if cfg["ensemble"] == "nlhs" and cfg.get("depth") is not None:
        depth = cfg["depth"]
    if cfg["scheme"] == "fbs":
        pattern = cfg.get("input") or list(range(cfg["photons"]))
        if cfg["effective"]:
            report = count_permitted_fbs_effective(
                arch, pattern, depth, cfg["lambda"], cfg["beta"]
            )
        else:
            report = count_permitted_fbs(arch, pattern, depth)
    else:
        k = cfg.get("k_inputs") or arch.mode_count
        if cfg.get("squeeze") is not None:
            gbs_cfg = GbsConfig(arch.mode_count, k, cfg["squeeze"], cfg["pairs"])
        else:
            gbs_cfg = GbsConfig.with_matched_squeezing(arch.mode_count, k, cfg["pairs"])
        pattern = cfg.get("input") or list(range(k))
        report = count_permitted_gbs(arch, gbs_cfg, pattern, depth)
    out = report.to_dict()
    out.update(
        scheme=cfg["scheme"],
        depth=depth,
        input=list(pattern),
        modes=arch.mode_count,
        effective=bool(cfg.get("effective")),
    )
    return {"json": out}


def _run_thresholds(cfg: dict, master: RngStream) -> dict:
    fbs = fbs_depth_thresholds(
        cfg["photons"], cfg["gamma"], cfg["c_const"], cfg["dim"], cfg["lambda"], cfg["beta"]
    )
    gbs = gbs_depth_thresholds(
        cfg["pairs"], cfg["gamma"], cfg["c_const"], cfg["dim"], cfg["lambda"], cfg["beta"]
    )
    if cfg["format"] == "csv":
        columns = list(fbs.to_dict().keys())
        return {"columns": columns, "rows": [fbs.to_dict(), gbs.to_dict()]}
    return {"json": {"fbs": fbs.to_dict(), "gbs": gbs.to_dict()}}


def _provenance(cfg: dict, keys: tuple[str, ...]) -> dict:
    return {k: cfg[k] for k in keys}


def _run_density(cfg: dict, master: RngStream) -> dict:
    tag, sampler = _build_sampler(cfg)
    threads = cfg["threads"] or 1
    if cfg["experiment"] == "density-fbs":
        values = fbs_probability_samples(
            sampler, cfg["modes"], cfg["photons"], cfg["samples"], master, threads
        )
    else:
        values = gbs_probability_samples(
            sampler, cfg["modes"], cfg["photons"], cfg["samples"], master, threads
        )
    curve = density_function(values, cfg["buckets"])
    rows = []
    for bucket in curve.buckets:
        row = {
            "x": bucket.x,
            "density": bucket.density,
            "count": bucket.count,
            "width": bucket.width,
            "ensemble": tag,
        }
        row.update(_provenance(cfg, ("modes", "photons", "samples", "seed")))
        rows.append(row)
    columns = ["x", "density", "count", "width", "ensemble", "modes", "photons", "samples", "seed"]
    return {"columns": columns, "rows": rows}


def _run_page_curve(cfg: dict, master: RngStream) -> dict:
    tag, sampler = _build_sampler(cfg)
    rows_raw = page_curve(
        sampler,
        cfg["modes"],
        cfg["squeeze"],
        cfg["samples"],
        master,
        threads=cfg["threads"] or 1,
    )
    rows = [
        {
            "k": k,
            "mean_S2": mean,
            "stderr": err,
            "ensemble": tag,
            "M": cfg["modes"],
            "r": cfg["squeeze"],
            "samples": cfg["samples"],
            "seed": cfg["seed"],
        }
        for k, mean, err in rows_raw
    ]
    columns = ["k", "mean_S2", "stderr", "ensemble", "M", "r", "samples", "seed"]
    return {"columns": columns, "rows": rows}


def _run_frame_potential(cfg: dict, master: RngStream) -> dict:
    tag, sampler = _build_sampler(cfg)
    est = frame_potential(
        sampler, cfg["k_moment"], cfg["samples"], master, threads=cfg["threads"] or 1
    )
    row = est.to_dict()
    row.update(ensemble=tag, modes=cfg["modes"], seed=cfg["seed"])
    columns = list(est.to_dict().keys()) + ["ensemble", "modes", "seed"]
    return {"columns": columns, "rows": [row]}


def _run_hiding(cfg: dict, master: RngStream) -> dict:
    values = hiding_samples(
        cfg["kind"], cfg["modes"], cfg["photons"], cfg["samples"], master,
        threads=cfg["threads"] or 1,
    )
    rows = [
        {
            "value": float(v),
            "kind": cfg["kind"],
            "modes": cfg["modes"],
            "photons": cfg["photons"],
            "seed": cfg["seed"],
        }
        for v in values
    ]
    columns = ["value", "kind", "modes", "photons", "seed"]
    return {"columns": columns, "rows": rows}


_RUNNERS = {
    "arch-info": _run_arch_info,
    "permitted-count": _run_permitted_count,
    "thresholds": _run_thresholds,
    "density-fbs": _run_density,
    "density-gbs": _run_density,
    "page-curve": _run_page_curve,
    "frame-potential": _run_frame_potential,
    "hiding": _run_hiding,
}


def _render(cfg: dict, result: dict) -> str:
    if "json" in result:
        return json.dumps(result["json"], indent=2, sort_keys=True) + "\n"
    columns, rows = result["columns"], result["rows"]
    if cfg["format"] == "json":
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row[c] is None else row[c] for c in columns])
    return buf.getvalue()


def run(cfg: dict) -> int:
    """Validate and execute one resolved configuration.  Returns an exit code."""
    diags = validate_config(cfg)
    if diags:
        json.dump({"error": "invalid-config", "diagnostics": diags}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2
    if cfg.get("threads") is None:
        cfg["threads"] = int(os.environ.get(THREADS_ENV, "1"))
    master = RngStream(cfg["seed"], 0)
    started = time.monotonic()
    try:
        result = _RUNNERS[cfg["experiment"]](cfg, master)
    except GuardError as exc:
        json.dump({"error": "resource-guard", "detail": str(exc)}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 3
    wall = time.monotonic() - started
    text = _render(cfg, result)
    with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    manifest = {
        "experiment": cfg["experiment"],
        "config": {k: v for k, v in cfg.items()},
        "version": __version__,
        "wall_time_s": wall,
    }
    with open(cfg["out"] + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    namespace = parser.parse_args(argv)
    if namespace.experiment is None:
        parser.print_help()
        return 2
    cfg, diags = resolve_config(namespace.experiment, namespace)
    if diags:
        json.dump({"error": "invalid-config", "diagnostics": diags}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
