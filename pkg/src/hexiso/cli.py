"""Command-line front end: ``hexiso <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import __version__, boundary_norm, cheeger, fpp, lattice, nearcrit, percolation, verify, wulff

EXIT_OK, EXIT_ASSERT, EXIT_EVENT = 0, 2, 3

# option name -> (type, default, help)
OPTIONS = {
    "p": (float, None, "open-site probability"),
    "n": (int, None, "scale (box half-width or segment length)"),
    "reps": (int, None, "replicas"),
    "seed": (int, 0, "master seed"),
    "eps0": (float, nearcrit.EPS0, "crossing threshold for the correlation length"),
    "k": (int, 720, "number of norm directions"),
    "budget": (int, 0, "node budget for exact searches"),
    "theta": (float, 0.0, "direction in radians"),
    "norm": (str, "euclid", "euclid, hex, or a CSV file of theta,beta"),
    "method": (str, "anneal", "exact, anneal or anchored"),
    "restarts": (int, 8, "annealing restarts"),
    "pad_factor": (float, 4.0, "window padding in units of n"),
    "p_grid": (str, "0.6,0.55,0.52", "comma-separated p values ordered toward 1/2"),
    "suite": (str, "all", "verify suite name or 'all'"),
    "cases": (int, None, "cases per verify suite"),
    "name": (str, "fig1", "figure name"),
    "dump": (str, None, "configuration dump to load"),
    "out": (str, None, "output directory (default: stdout)"),
    "format": (str, "jsonl", "csv, jsonl or svg"),
}

COMMANDS = {
    "sample": ["p", "n", "seed", "pad_factor"],
    "mu": ["p", "n", "reps", "seed", "theta"],
    "beta": ["p", "n", "reps", "seed", "theta", "pad_factor"],
    "norm-compare": ["p", "n", "reps", "seed", "theta", "pad_factor"],
    "wulff": ["norm", "k"],
    "cheeger": ["p", "n", "seed", "method", "restarts", "budget", "pad_factor"],
    "corrlen": ["p", "reps", "seed", "eps0"],
    "roundness": ["p_grid", "reps", "seed", "eps0"],
    "verify": ["suite", "cases", "seed"],
    "fig": ["name", "dump"],
}
COMMON = ["out", "format"]


class SpecError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 so that 2 stays reserved for failed assertions."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SpecError(message)


@dataclass
class RunSpec:
    subcommand: str
    params: dict
    seed: int
    out: str | None = None
    format: str = "jsonl"
    records: list = field(default_factory=list)

    def canonical(self) -> dict:
        return {"subcommand": self.subcommand, "params": dict(sorted(self.params.items())),
                "seed": self.seed, "format": self.format, "version": __version__}

    @property
    def digest(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def emit(self, rec: dict) -> None:
        full = {"run": self.digest, "seed": self.seed, "spec": self.canonical()}
        full.update(rec)
        self.records.append(full)


def threads() -> int:
    try:
        return max(1, int(os.environ.get("HEXISO_THREADS", "1")))
    except ValueError:
        return 1


def pool_map(fn, jobs):
    """Run pure jobs, results in job order regardless of completion order."""
    jobs = list(jobs)
    if threads() == 1 or len(jobs) < 2:
        return [fn(*j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads()) as ex:
        return list(ex.map(lambda j: fn(*j), jobs))


# -- config dumps -------------------------------------------------------------------

def load_config_dump(path):
    return percolation.load_config(path)


def save_config_dump(config, path) -> None:
    percolation.save_config(config, path)


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("hexiso") / "data" / f"{name}.txt"))


# -- parsing -------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hexiso", description="Isoperimetry and first passage "
                                     "for site percolation on the triangular lattice.")
    parser.add_argument("--version", action="version", version=f"hexiso {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for cmd, opts in COMMANDS.items():
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", default=None, help="key=value file with [hexiso] or [%s] sections" % cmd)
        for name in opts + COMMON:
            typ, _, hlp = OPTIONS[name]
            sp.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=None, help=hlp)
    return parser


def _read_config(path: str, cmd: str) -> dict:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise SpecError(f"cannot read config file {path}")
    allowed = set(COMMANDS[cmd] + COMMON)
    out = {}
    for section in ("hexiso", cmd):
        if not cp.has_section(section):
            continue
        for key, raw in cp.items(section):
            name = key.replace("-", "_")
            if name not in allowed:
                raise SpecError(f"unknown key {key!r} in section [{section}] for {cmd}")
            out[name] = OPTIONS[name][0](raw)
    for section in cp.sections():
        if section != "hexiso" and section not in COMMANDS:
            raise SpecError(f"unknown section [{section}]")
    return out


def make_spec(argv) -> RunSpec:
    args = _build_parser().parse_args(argv)
    cmd = args.subcommand
    vals = {name: OPTIONS[name][1] for name in COMMANDS[cmd] + COMMON}
    if args.config:
        vals.update(_read_config(args.config, cmd))
    for name in COMMANDS[cmd] + COMMON:
        v = getattr(args, name)
        if v is not None:
            vals[name] = v
    if vals["format"] not in ("csv", "jsonl", "svg"):
        raise SpecError("format must be csv, jsonl or svg")
    out, fmt = vals.pop("out"), vals.pop("format")
    seed = int(vals.get("seed") or 0)
    return RunSpec(cmd, vals, seed, out, fmt)


def _need(spec: RunSpec, *names):
    missing = [n for n in names if spec.params.get(n) is None]
    if missing:
        raise SpecError(f"{spec.subcommand} needs --" + ", --".join(m.replace("_", "-") for m in missing))


# -- subcommands ------------------------------------------------------------------------

def _cmd_sample(spec: RunSpec):
    _need(spec, "p", "n")
    p, n = spec.params["p"], spec.params["n"]
    window = cheeger.cheeger_window(n, spec.params["pad_factor"])
    cfg = percolation.sample(window, p, spec.seed)
    rec = {"kind": "sample", "window": list(cfg.window), "open": int(cfg.bits.sum())}
    try:
        proxy = percolation.infinite_cluster_proxy(cfg, lattice.square(n), spec.params["pad_factor"])
        rec["proxy_in_box"] = len(proxy.inner)
        rec["box_vertices"] = proxy.inner_count
    except percolation.ProxyUndefined as exc:
        rec["proxy"] = str(exc)
    spec.emit(rec)
    return EXIT_OK, {"config.txt": percolation.dumps_config(cfg)}


def _cmd_mu(spec: RunSpec):
    _need(spec, "p", "n", "reps")
    pr = spec.params
    ns = fpp.mu_estimate(pr["p"], pr["theta"], pr["n"], pr["reps"], spec.seed)
    spec.emit(ns.record())
    return EXIT_OK, {}


def _cmd_beta(spec: RunSpec):
    _need(spec, "p", "n", "reps")
    pr = spec.params
    ns = boundary_norm.beta_estimate(pr["p"], pr["theta"], pr["n"], pr["reps"], spec.seed,
                                     pr["pad_factor"])
    spec.emit(ns.record())
    return EXIT_OK, {}


def _cmd_norm_compare(spec: RunSpec):
    _need(spec, "p", "n", "reps")
    pr = spec.params
    res = boundary_norm.norm_compare(pr["p"], pr["theta"], pr["n"], pr["reps"], spec.seed,
                                     pr["pad_factor"])
    spec.emit(res["mu"].record())
    spec.emit(res["beta"].record())
    spec.emit({"kind": "verdict", "diff": res["diff"], "diff_stderr": res["diff_stderr"],
               "combined_stderr": res["combined_stderr"], "agree_3se": res["agree_3se"]})
    return (EXIT_OK if res["agree_3se"] else EXIT_ASSERT), {}


def _norm_from_spec(spec: RunSpec) -> wulff.DirectionalNorm:
    kind, k = spec.params["norm"], spec.params["k"]
    if kind == "euclid":
        return wulff.DirectionalNorm.euclidean(k)
    if kind == "hex":
        return wulff.DirectionalNorm.hexagonal(k)
    try:
        with open(kind, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and r[0] != "theta"]
        return wulff.DirectionalNorm([float(r[1]) for r in rows])
    except (OSError, IndexError, ValueError) as exc:
        raise SpecError(f"cannot use norm {kind!r}: {exc}") from exc


def _cmd_wulff(spec: RunSpec):
    norm = _norm_from_spec(spec)
    w, w_hat = wulff.wulff_construct(norm)
    rd = wulff.roundness(w_hat)
    rec = {"kind": "wulff", "K": norm.K, "area_W": w.area, "vertices": len(w.vertices),
           "dH_disk": wulff.hausdorff(w_hat, wulff.unit_disk()), "phi": wulff.phi_from_norm(norm),
           "ratio": rd["ratio"]}
    spec.emit(rec)
    return EXIT_OK, {"wulff.svg": wulff.wulff_svg(w_hat), "norm.csv": norm.to_csv(),
                     "polygon.json": w_hat.to_json() + "\n"}


def _cmd_cheeger(spec: RunSpec):
    _need(spec, "p", "n")
    pr = spec.params
    method = pr["method"]
    if method == "anchored":
        cfg = percolation.sample(cheeger.cheeger_window(max(pr["n"], 2), pr["pad_factor"]), pr["p"], spec.seed)
        res = cheeger.anchored_exact(cfg, pr["n"])
    else:
        cfg = percolation.sample(cheeger.cheeger_window(pr["n"], pr["pad_factor"]), pr["p"], spec.seed)
        proxy, _ = cheeger.box_cluster(cfg, pr["n"], pad_factor=pr["pad_factor"])
        if method == "exact":
            res = cheeger.cheeger_exact(cfg, pr["n"], proxy)
        elif method == "anneal":
            res = cheeger.cheeger_anneal(cfg, pr["n"], proxy, seed=spec.seed, restarts=pr["restarts"])
        else:
            raise SpecError("method must be exact, anneal or anchored")
    rec = res.record()
    rec["kind"] = "cheeger"
    rec["scaled"] = float(res.value) * pr["n"]
    spec.emit(rec)
    return EXIT_OK, {"minimizer.svg": cheeger.cheeger_svg(res.minimizers[0], pr["n"])}


def _cmd_corrlen(spec: RunSpec):
    _need(spec, "p")
    pr = spec.params
    c = nearcrit.correlation_length(pr["p"], pr["eps0"], pr["reps"] or 200, spec.seed)
    rec = c.record()
    rec["kind"] = "corrlen"
    spec.emit(rec)
    return EXIT_OK, {}


def _cmd_roundness(spec: RunSpec):
    pr = spec.params
    grid = [float(x) for x in str(pr["p_grid"]).split(",") if x.strip()]
    est = nearcrit.nu_trend(grid, reps=pr["reps"] or 40, seed=spec.seed, eps=pr["eps0"])
    tables = {p: (est.corr[p].value, est.table[p] / est.corr[p].value) for p in grid}
    rep = nearcrit.roundness_report(tables, est.nu, est.samples)
    rec = est.record()
    rec["kind"] = "nu_trend"
    spec.emit(rec)
    spec.emit({"kind": "roundness", "nu": rep["nu"],
               "rows": {str(p): r for p, r in rep["rows"].items()},
               "dH_flags": rep["dH_flags"], "ratio_flags": rep["ratio_flags"]})
    failed = "fail" in est.flags + rep["dH_flags"] + rep["ratio_flags"]
    return (EXIT_ASSERT if failed else EXIT_OK), {"roundness.svg": nearcrit.roundness_svg(tables),
                                                  "table.csv": est.to_csv()}


def _cmd_verify(spec: RunSpec):
    pr = spec.params
    names = list(verify.SUITES) if pr["suite"] == "all" else [pr["suite"]]
    for nm in names:
        if nm not in verify.SUITES:
            raise SpecError(f"unknown suite {nm!r}; choose from {', '.join(verify.SUITES)}")
    results = pool_map(lambda nm: verify.SUITES[nm](
        verify.DEFAULT_CASES[nm] if pr["cases"] is None else pr["cases"], spec.seed),
        [(nm,) for nm in names])
    bad = 0
    for r in results:
        rec = r.record()
        rec["kind"] = "verify"
        spec.emit(rec)
        bad += r.violations
    return (EXIT_OK if bad == 0 else EXIT_ASSERT), {}


def config_svg(cfg, path=None, size: int = 480) -> str:
    """Hexagon picture of a configuration: open yellow, closed blue, optional path."""
    px, py = cfg.coords()
    xmin, xmax, ymin, ymax = px.min() - 1, px.max() + 1, py.min() - 1, py.max() + 1
    s = size / max(xmax - xmin, ymax - ymin)
    r = 1.0 / math.sqrt(3.0)
    parts = []
    for row in range(cfg.ny):
        for col in range(cfg.nx):
            cx, cy = px[row, col], py[row, col]
            pts = " ".join(f"{(cx + r * math.cos(math.pi / 6 + k * math.pi / 3) - xmin) * s:.2f},"
                           f"{(ymax - cy - r * math.sin(math.pi / 6 + k * math.pi / 3)) * s:.2f}"
                           for k in range(6))
            colour = "#f2d45c" if cfg.bits[row, col] else "#5c8af2"
            parts.append(f'<polygon points="{pts}" fill="{colour}" stroke="#fff" stroke-width="0.5"/>')
    if path:
        pts = " ".join(f"{(x - xmin) * s:.2f},{(ymax - y) * s:.2f}" for x, y in (lattice.embed(v) for v in path))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#c00" stroke-width="2"/>')
    w, h = (xmax - xmin) * s, (ymax - ymin) * s
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}">'
            + "".join(parts) + "</svg>\n")


def _cmd_fig(spec: RunSpec):
    pr = spec.params
    path = pr["dump"] or fixture_path(pr["name"] + "_fpp")
    cfg = load_config_dump(path)
    res = fpp.first_passage(cfg, (0, 0), (9, 0))
    spec.emit({"kind": "fig", "name": pr["name"], "T_0_9": res.time,
               "geodesic": [list(v) for v in res.geodesic]})
    return EXIT_OK, {f"{pr['name']}.svg": config_svg(cfg, res.geodesic)}


HANDLERS = {
    "sample": _cmd_sample, "mu": _cmd_mu, "beta": _cmd_beta, "norm-compare": _cmd_norm_compare,
    "wulff": _cmd_wulff, "cheeger": _cmd_cheeger, "corrlen": _cmd_corrlen,
    "roundness": _cmd_roundness, "verify": _cmd_verify, "fig": _cmd_fig,
}


# -- output ---------------------------------------------------------------------------

def _flatten(rec: dict) -> dict:
    return {k: (json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v)
            for k, v in rec.items() if k != "spec"}


def render(spec: RunSpec) -> str:
    if spec.format == "csv":
        keys = []
        for r in spec.records:
            for k in _flatten(r):
                if k not in keys:
                    keys.append(k)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in spec.records:
            w.writerow(_flatten(r))
        return buf.getvalue()
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in spec.records)


def run(spec: RunSpec, stdout=None) -> int:
    """Dispatch one run; write records and artifacts; return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        status, artifacts = HANDLERS[spec.subcommand](spec)
    except (percolation.ProxyUndefined, boundary_norm.EventFailure, cheeger.ConditioningFailed) as exc:
        spec.emit({"kind": "error", "error": type(exc).__name__, "detail": str(exc)})
        status, artifacts = EXIT_EVENT, {}
    except RuntimeError as exc:
        if "too many failed replicas" not in str(exc):
            raise
        spec.emit({"kind": "error", "error": "RetriesExhausted", "detail": str(exc)})
        status, artifacts = EXIT_EVENT, {}
    text = render(spec)
    if spec.out is None:
        if spec.format == "svg":
            svgs = [v for k, v in sorted(artifacts.items()) if k.endswith(".svg")]
            stdout.write(svgs[0] if svgs else text)
        else:
            stdout.write(text)
        return status
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = spec.subcommand
    (out / f"{stem}.{'csv' if spec.format == 'csv' else 'jsonl'}").write_text(text)
    for name, body in sorted(artifacts.items()):
        (out / f"{stem}-{name}").write_text(body)
    return status


def main(argv=None) -> int:
    try:
        spec = make_spec(sys.argv[1:] if argv is None else argv)
    except SpecError as exc:
        print(f"hexiso: {exc}", file=sys.stderr)
        return 1
    t0 = time.perf_counter()
    try:
        status = run(spec)
    except ValueError as exc:
        # parameters outside a routine's preconditions, e.g. a box too large for exact search
        print(f"hexiso: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"hexiso: {spec.subcommand} finished in {time.perf_counter() - t0:.1f}s (run {spec.digest})",
          file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
