"""Command-line front door: ``abwave <subcommand> [--config PATH] [--out DIR] ...``.

Exit codes: 0 all verdicts bounded, 2 some verdict inconclusive, 3 some
verdict violated, 1 usage, configuration or precondition error.

Heavy modules are imported only after the arguments are parsed, so that
``--threads`` can cap the BLAS/OpenMP pools before numpy loads.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

SCHEMA = "abwave-config/1"
DEFAULT_SEED = 0x5EED
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_VIOLATED = 0, 1, 2, 3
_VERDICT_EXIT = {"bounded": EXIT_OK, "inconclusive": EXIT_INCONCLUSIVE, "violated": EXIT_VIOLATED}
_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")

INF = math.inf

# Per-subcommand blocks and their defaults.  Any key not listed is rejected.
DEFAULTS = {
    "bessel-check": {
        "orders": [0.3, 1.3, 5.5], "r_range": [10.0, 1e4], "n_r": 13, "delta": 0.1,
        "integer_orders": [3.0], "slope_tol": 0.1,
    },
    "hankel-check": {
        "orders": [0.3, 0.5, 1.3, 4.7, 10.2], "n": 2048, "r_max": 20.0, "diag_n": [2048, 4096],
    },
    "eigen-check": {
        "ms": [-3, -2, -1, 0, 1, 2, 3], "alphas": [0.3, 0.5], "energies": [1.0, 2.0, 5.0],
        "n": 2048, "r_max": 20.0, "conv_n": [256, 512], "tol": 1e-3, "min_factor": 12.0,
    },
    "propagate": {
        "flow": "half-wave", "times": [0.0, 2.5, 5.0, 7.5, 10.0], "n": 1024, "r_max": 20.0,
        "ms": [0, 1], "center": 5.0, "width": 0.8, "k": 4.0, "n_theta": 16, "tol": 1e-6,
    },
    "strichartz-sweep": {
        "flows": ["wave"], "specs": [[4, "inf"], [8, 4], ["inf", 2]], "T": 32.0, "dt": 0.0625,
        "refine": True,
        "family": {
            "kind": "dilation", "ms": [0], "lambdas": [0.25, 0.5, 1.0, 2.0, 4.0],
            "window": [1.0, 2.0], "m_data": 2, "count": 3, "n_spec": 128, "n_radial": 512,
            "r_max": 40.0, "m_max": 4,
        },
    },
    "smoothing-sweep": {
        "betas": [1.0, 1.2], "branches": ["low", "high"], "T": 10.0, "dt": 0.0625, "refine": True,
        "family": {"m": 0, "lambdas": [0.5, 1.0, 2.0], "velocity_weight": 0.5,
                   "n_spec": 256, "n_radial": 512},
    },
    "dichotomy-check": {
        "p": 4.0, "R_small": [1 / 64, 1 / 32, 1 / 16, 1 / 8, 1 / 4],
        "R_large": [4.0, 8.0, 16.0, 32.0, 64.0], "T": None, "dt": 0.0625, "slope_tol": 0.1,
        "family": {"kind": "frequency-localized", "ms": [0], "window": [1.0, 2.0],
                   "n_spec": 128, "n_radial": 512, "r_max": 40.0, "m_max": 4},
    },
    "conservation": {
        "flows": ["half-wave", "dirac", "wave", "kg"], "T": 10.0, "n_times": 20, "n": 2048,
        "r_max": 20.0, "tol": 1e-6,
    },
}
ESTIMATES = ("strichartz-sweep", "smoothing-sweep", "dichotomy-check")
TOP_KEYS = {"schema", "alpha", "seed"} | set(DEFAULTS)


class ConfigError(ValueError):
    pass


# configuration


def _number(v, where):
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return INF
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    return float(v)


def parse_seed(v) -> int:
    if isinstance(v, bool):
        raise ConfigError(f"seed must be an integer or hex string, got {v!r}")
    if isinstance(v, int):
        return v
    try:
        return int(str(v), 16)
    except ValueError:
        raise ConfigError(f"seed must be a hex string such as 0x5EED, got {v!r}") from None


def _merge(defaults: dict, given: dict, where: str) -> dict:
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed: {sorted(defaults)}")
    out = {}
    for key, dv in defaults.items():
        v = given.get(key, dv)
        if isinstance(dv, dict):
            if not isinstance(v, dict):
                raise ConfigError(f"{where}.{key}: expected an object")
            v = _merge(dv, v, f"{where}.{key}")
        out[key] = v
    return out


def load_config(path, subcommand: str, seed_flag=None) -> dict:
    """Read, check and complete the configuration for one subcommand."""
    raw = {"schema": SCHEMA}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    if raw.get("schema") != SCHEMA:
        raise ConfigError(f"config schema must be {SCHEMA!r}, got {raw.get('schema')!r}")
    unknown = sorted(set(raw) - TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {unknown}; allowed: {sorted(TOP_KEYS)}")
    alpha = _number(raw.get("alpha", 0.5), "alpha")
    if not math.isfinite(alpha):
        raise ConfigError("alpha must be finite")
    seed = parse_seed(seed_flag if seed_flag is not None else raw.get("seed", DEFAULT_SEED))
    block = raw.get(subcommand, {})
    if not isinstance(block, dict):
        raise ConfigError(f"{subcommand}: expected an object")
    return {"schema": SCHEMA, "subcommand": subcommand, "alpha": alpha, "seed": seed,
            subcommand: _merge(DEFAULTS[subcommand], block, subcommand)}


# runners; each returns a list of (name, report dict, csv writer or None)


def _specs(items):
    from .norms import MixedNormSpec

    out = []
    for it in items:
        if not isinstance(it, (list, tuple)) or len(it) != 2:
            raise ConfigError(f"spec must be a [p, q] pair, got {it!r}")
        out.append(MixedNormSpec(_number(it[0], "spec p"), _number(it[1], "spec q")))
    return out


def _floats(xs, where):
    return tuple(_number(x, where) for x in xs)


def _run_bessel(cfg):
    from . import io
    from .bessel import bessel_j, bessel_j_prime, schlafli_decompose
    from .verify import check_bessel_envelopes

    b = cfg["bessel-check"]
    rep = check_bessel_envelopes(_floats(b["orders"], "orders"), _floats(b["r_range"], "r_range"),
                                 int(b["n_r"]), float(b["delta"]), float(b["slope_tol"]),
                                 _floats(b["integer_orders"], "integer_orders"))
    d = rep.to_dict()

    def table(path):
        rows = []
        for s in d["samples"]:
            nu, r = s["nu"], s["r"]
            sp = schlafli_decompose(nu, r, float(b["delta"]))
            rows.append((nu, r, float(bessel_j(nu, r)), float(bessel_j_prime(nu, r)),
                         sp.j1.real, sp.j1.imag, sp.j2.real, sp.j2.imag, sp.e))
        return io.write_csv(path, io.BESSEL_COLUMNS, rows)

    return [("bessel-check", d, table)]


def _run_hankel(cfg):
    from .verify import hankel_contract

    h = cfg["hankel-check"]
    rep = hankel_contract(_floats(h["orders"], "orders"), int(h["n"]), float(h["r_max"]),
                          tuple(int(v) for v in h["diag_n"]))
    return [("hankel-check", rep.to_dict(), None)]


def _run_eigen(cfg):
    from .verify import eigen_check

    e = cfg["eigen-check"]
    rep = eigen_check(tuple(int(m) for m in e["ms"]), _floats(e["alphas"], "alphas"),
                      _floats(e["energies"], "energies"), int(e["n"]), float(e["r_max"]),
                      tuple(int(v) for v in e["conv_n"]), float(e["tol"]), float(e["min_factor"]))
    return [("eigen-check", rep.to_dict(), None)]


def _run_propagate(cfg):
    import numpy as np

    from . import io
    from .hankel import RadialGrid
    from .modes import FluxParameter
    from .operators import SpinorModeStack, polar_angles, recompose_scalar, recompose_spinor
    from .propagators import (
        WaveState,
        dirac_evolve,
        half_wave_evolve,
        klein_gordon_energy,
        klein_gordon_evolve_state,
        wave_energy,
        wave_evolve_state,
    )
    from .verify import EstimateReport, ring_data

    pcfg = cfg["propagate"]
    flow = pcfg["flow"]
    if flow not in ("half-wave", "wave", "kg", "dirac"):
        raise ConfigError(f"propagate.flow must be half-wave, wave, kg or dirac, got {flow!r}")
    flux = FluxParameter(cfg["alpha"])
    grid = RadialGrid.gauss_legendre(int(pcfg["n"]), float(pcfg["r_max"]))
    ms = tuple(int(m) for m in pcfg["ms"])
    u0 = ring_data(flux, grid, ms, float(pcfg["center"]), float(pcfg["width"]), float(pcfg["k"]))
    times = _floats(pcfg["times"], "times")
    if flow == "dirac":
        data = SpinorModeStack(flux, grid, {m: (v, 0.5 * v) for m, v in u0.modes.items()})
        step = lambda t: dirac_evolve(data, t)  # noqa: E731
        qty = lambda st: st.l2_norm() ** 2  # noqa: E731
        field = lambda st: st  # noqa: E731
    elif flow == "half-wave":
        step = lambda t: half_wave_evolve(u0, t)  # noqa: E731
        qty = lambda st: st.l2_norm() ** 2  # noqa: E731
        field = lambda st: st  # noqa: E731
    else:
        state = WaveState(u0, u0.scaled_values(0.5))
        evolve, energy = ((wave_evolve_state, wave_energy) if flow == "wave"
                          else (klein_gordon_evolve_state, klein_gordon_energy))
        step = lambda t: evolve(state, t)  # noqa: E731
        qty = lambda st: energy(WaveState(st.u0.without_spectrum(), st.u1.without_spectrum()))  # noqa: E731
        field = lambda st: st.u0  # noqa: E731
    states = [step(t) for t in times]
    q = [qty(st) for st in states]
    q0 = qty(step(0.0))
    samples = [{"t": t, "quantity": qt, "drift": abs(qt - q0) / q0} for t, qt in zip(times, q)]
    worst = max(s["drift"] for s in samples)
    tol = float(pcfg["tol"])
    rep = EstimateReport(
        estimate=f"propagate-{flow}",
        family={"kind": "ring", "alpha": cfg["alpha"], "ms": list(ms), "n": int(pcfg["n"]),
                "r_max": float(pcfg["r_max"])},
        samples=samples, sup_ratio=worst, deltas={"drift": worst}, thresholds={"drift": tol},
        verdict="bounded" if worst <= tol else "violated",
        config={"times": list(times), "flow": flow},
    )
    fields = [field(st) for st in states]

    def trajectory(path):
        if flow == "dirac":
            rows = []
            for t, st in zip(times, fields):
                for m, (f, g) in st.modes.items():
                    for comp, v in (("upper", f), ("lower", g)):
                        rows.extend((t, m, comp, r, z.real, z.imag) for r, z in zip(grid.nodes, v))
            io.write_csv(path, ("t", "m", "component", "r", "re", "im"), rows)
        else:
            io.write_trajectory(path, times, fields)
        thetas = polar_angles(int(pcfg["n_theta"]))
        last = fields[-1]
        if flow == "dirac":
            spin = recompose_spinor(last, thetas)
            polar = Path(path).with_name(Path(path).stem + "-polar-upper.csv")
            io.write_polar_field(polar, grid.nodes, thetas, spin[0], times[-1])
            polar = Path(path).with_name(Path(path).stem + "-polar-lower.csv")
            io.write_polar_field(polar, grid.nodes, thetas, spin[1], times[-1])
        else:
            polar = Path(path).with_name(Path(path).stem + "-polar.csv")
            io.write_polar_field(polar, grid.nodes, thetas, np.asarray(recompose_scalar(last, thetas)),
                                 times[-1])
        return path

    return [("propagate", rep.to_dict(), trajectory)]


def _family(cfg, block, kind_default="dilation"):
    from .verify import DataFamily

    f = block["family"]
    return DataFamily(
        kind=f.get("kind", kind_default), alpha=cfg["alpha"], ms=tuple(int(m) for m in f["ms"]),
        lambdas=_floats(f.get("lambdas", [1.0]), "lambdas"), window=_floats(f["window"], "window"),
        m_data=int(f.get("m_data", 2)), count=int(f.get("count", 3)), seed=cfg["seed"],
        n_spec=int(f["n_spec"]), n_radial=int(f["n_radial"]), r_max=float(f["r_max"]),
        m_max=int(f["m_max"]),
    )


def _run_strichartz(cfg):
    from . import io
    from .verify import sweep_strichartz

    s = cfg["strichartz-sweep"]
    specs = _specs(s["specs"])
    family = _family(cfg, s)
    out = []
    for flow in s["flows"]:
        rep = sweep_strichartz(flow, specs, family, float(s["T"]), float(s["dt"]), bool(s["refine"]))
        d = rep.to_dict()
        out.append((f"strichartz-{flow}", d, lambda path, d=d: io.write_sweep(path, d)))
    return out


def _run_smoothing(cfg):
    from . import io
    from .verify import SmoothingFamily, check_local_smoothing

    s = cfg["smoothing-sweep"]
    f = s["family"]
    family = SmoothingFamily(alpha=cfg["alpha"], m=int(f["m"]), lambdas=_floats(f["lambdas"], "lambdas"),
                             velocity_weight=float(f["velocity_weight"]), n_spec=int(f["n_spec"]),
                             n_radial=int(f["n_radial"]))
    rep = check_local_smoothing(_floats(s["betas"], "betas"), family, float(s["T"]), float(s["dt"]),
                                tuple(s["branches"]), bool(s["refine"]))
    d = rep.to_dict()
    return [("smoothing-sweep", d, lambda path: io.write_smoothing(path, d))]


def _run_dichotomy(cfg):
    from . import io
    from .verify import check_localized_dichotomy

    s = cfg["dichotomy-check"]
    family = _family(cfg, s, "frequency-localized")
    T = None if s["T"] is None else float(s["T"])
    rep = check_localized_dichotomy(float(s["p"]), family, _floats(s["R_small"], "R_small"),
                                    _floats(s["R_large"], "R_large"), T, float(s["dt"]),
                                    float(s["slope_tol"]))
    d = rep.to_dict()
    return [("dichotomy-check", d, lambda path: io.write_dichotomy(path, d))]


def _run_conservation(cfg):
    from . import io
    from .verify import conservation_suite

    c = cfg["conservation"]
    rep = conservation_suite(tuple(c["flows"]), cfg["alpha"], float(c["T"]), int(c["n_times"]),
                             int(c["n"]), float(c["r_max"]), float(c["tol"]))
    d = rep.to_dict()
    return [("conservation", d, lambda path: io.write_conservation(path, d))]


RUNNERS = {
    "bessel-check": _run_bessel,
    "hankel-check": _run_hankel,
    "eigen-check": _run_eigen,
    "propagate": _run_propagate,
    "strichartz-sweep": _run_strichartz,
    "smoothing-sweep": _run_smoothing,
    "dichotomy-check": _run_dichotomy,
    "conservation": _run_conservation,
}


def _precheck(cfg):
    from .modes import FluxParameter

    if cfg["subcommand"] in ESTIMATES:
        FluxParameter(cfg["alpha"]).require_nonintegral(f"the {cfg['subcommand']} estimate")


def _summary(name, d, files):
    deltas = ", ".join(f"{k}={_short(v)}" for k, v in sorted(d["deltas"].items()))
    return (f"{name}: verdict={d['verdict']} sup_ratio={_short(d['sup_ratio'])}"
            + (f" deltas[{deltas}]" if deltas else "") + f" -> {', '.join(files)}")


def _short(v):
    return f"{v:.4g}" if isinstance(v, float) else str(v)


def run(subcommand: str, config_path=None, out_dir=".", seed=None) -> int:
    """Run one subcommand; write reports into ``out_dir``; return the exit code."""
    from . import io

    cfg = load_config(config_path, subcommand, seed)
    _precheck(cfg)
    results = RUNNERS[subcommand](cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    code = EXIT_OK
    for name, d, writer in results:
        d["config"] = dict(d["config"], run=cfg)
        files = [str(io.write_report(out / f"{name}.json", d))]
        if writer is not None:
            files.append(str(writer(out / f"{name}.csv")))
        print(_summary(name, d, files))
        code = max(code, _VERDICT_EXIT[d["verdict"]])
    return code


def plot(report_path, out_path) -> int:
    from .io import read_report
    from .plotting import plot_report

    try:
        d = json.loads(Path(report_path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"report {report_path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"report {report_path} is not valid JSON: {exc}") from None
    if not isinstance(d, dict) or not d.get("samples"):
        raise ConfigError(f"report {report_path} is empty: nothing to plot")
    d = read_report(report_path)
    plot_report(d, out_path)
    print(f"plot: {d['estimate']} -> {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abwave", description="Aharonov-Bohm dispersive estimate checks")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config with a 'schema' field")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--threads", type=int, help="cap BLAS/OpenMP worker threads")
        p.add_argument("--seed", help="hex seed for random families (default 0x5EED)")
    p = sub.add_parser("plot")
    p.add_argument("report")
    p.add_argument("output")
    p.add_argument("--threads", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return EXIT_ERROR
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)
    from .errors import AccuracyError, DomainError, InvalidArgumentError, PreconditionError, ZeroDataError

    expected = (ConfigError, InvalidArgumentError, DomainError, PreconditionError, ZeroDataError,
                AccuracyError)
    try:
        if args.subcommand == "plot":
            return plot(args.report, args.output)
        return run(args.subcommand, args.config, args.out, args.seed)
    except expected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
