"""Command-line interface: ``cohbound {bound,benchmark,verify,sample}``.

Exit codes are 0 on success, 1 when a verification or tolerance check
fails and 2 for usage or parse errors.
"""
import argparse
import configparser
import csv
import io
import json
import logging
import sys
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import benchmark as bm
from .bounds import bound
from .errors import CoherenceError, GridTooCoarse, ParseError
from .oracles import QuantifierKind, exact_value
from .states import (
    as_basis,
    as_density,
    as_pure,
    fourier_basis,
    projector,
    qubit_bloch_basis,
    qubit_mub_basis,
    random_density,
    random_pure_haar,
)
from .statistics import StatisticsTriple, measurement_statistics, normalize_counts

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("sandwich", "saturation", "udr", "majorization", "all")

log = logging.getLogger("cohbound")


# --- formatting --------------------------------------------------------------

def fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.6g" % value
    return str(value)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_manifest(out_path: Path, command: str, config: dict, seed, outputs) -> Path:
    """Store the run manifest next to ``out_path`` as ``<name>.manifest.json``."""
    manifest = {
        "command": command,
        "config": config,
        "version": __version__,
        "seed": seed,
        "outputs": [str(p) for p in outputs],
    }
    path = out_path.with_name(out_path.name + ".manifest.json")
    write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# --- input parsing -----------------------------------------------------------

def _load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return obj


def parse_complex_array(obj: dict, where: str = "input") -> np.ndarray:
    """Decode ``{"dim", "re", "im"}`` into a vector (``dim`` entries) or a matrix (``dim**2``)."""
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float).ravel()
        im = np.asarray(obj.get("im", np.zeros(re.size)), dtype=float).ravel()
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: need numeric 'dim', 're' and 'im' fields ({exc})") from exc
    if re.size != im.size:
        raise ParseError(f"{where}: 're' has {re.size} entries but 'im' has {im.size}")
    z = re + 1j * im
    if dim >= 1 and z.size == dim:
        return z
    if dim >= 1 and z.size == dim * dim:
        return z.reshape(dim, dim)
    raise ParseError(f"{where}: {z.size} entries fit neither a vector nor a matrix of dim {dim}")


def state_to_json(state: np.ndarray) -> str:
    state = np.asarray(state, dtype=np.complex128)
    flat = state.ravel()
    obj = {"dim": int(state.shape[0]), "re": flat.real.tolist(), "im": flat.imag.tolist()}
    return json.dumps(obj) + "\n"


def load_input(path):
    """Return ``("state", rho)`` or ``("stats", StatisticsTriple)`` from a JSON file."""
    obj = _load_json(path)
    if {"p", "q", "qprime"} <= obj.keys():
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                triple = StatisticsTriple(*(normalize_counts(obj[k]) for k in ("p", "q", "qprime")))
            for w in caught:
                log.warning("%s: %s", path, w.message)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, CoherenceError):
                raise
            raise ParseError(f"{path}: bad statistics arrays ({exc})") from exc
        return "stats", triple
    z = parse_complex_array(obj, str(path))
    rho = projector(as_pure(z)) if z.ndim == 1 else as_density(z)
    return "state", rho


def parse_basis(spec: str, dim: int) -> np.ndarray:
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "fourier":
            return fourier_basis(dim)
        if kind in ("mub", "bloch") and dim != 2:
            raise ParseError(f"basis '{kind}' is only defined for qubits, not dim {dim}")
        if kind == "mub":
            return qubit_mub_basis(float(arg))
        if kind == "bloch":
            alpha, psi2 = (float(x) for x in arg.split(","))
            return qubit_bloch_basis(alpha, psi2)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad basis spec {spec!r}: {exc}") from exc
    if kind == "file":
        basis = as_basis(parse_complex_array(_load_json(arg), arg))
        if basis.shape[0] != dim:
            raise ParseError(f"basis in {arg} has dim {basis.shape[0]}, state has dim {dim}")
        return basis
    raise ParseError(f"unknown basis spec {spec!r}")


def parse_kinds(text: str | None) -> list:
    if not text:
        return list(QuantifierKind)
    try:
        return [QuantifierKind.parse(k) for k in text.split(",") if k.strip()]
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _resolve_config(name: str) -> tuple[str, str]:
    path = Path(name)
    if path.is_file():
        return str(path), path.read_text(encoding="utf-8")
    bundled = resources.files("cohbound") / "configs"
    for candidate in (name, name + ".cfg"):
        res = bundled / candidate
        if res.is_file():
            return f"bundled:{candidate}", res.read_text(encoding="utf-8")
    raise ParseError(f"no config file or bundled config named {name!r}")


def load_benchmark_configs(name: str, seed=None) -> tuple[str, list]:
    source, text = _resolve_config(name)
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ParseError(f"{source}: {exc}") from exc
    if not parser.sections():
        raise ParseError(f"{source}: no run sections")
    configs = []
    for section in parser.sections():
        sec = parser[section]
        try:
            grid = sec.get("grid")
            configs.append(bm.BenchmarkConfig(
                quantifier=QuantifierKind.parse(sec["quantifier"]),
                strategy=bm.Strategy.parse(sec["strategy"]),
                grid=None if grid is None else tuple(int(g) for g in grid.replace("x", ",").split(",")),
                seed=int(sec.get("seed", "0")) if seed is None else seed,
                ratio_floor=float(sec.get("ratio_floor", "1e-12")),
                psi_offset=float(sec.get("psi_offset", "0")),
                max_delta=float(sec.get("max_delta", str(bm.MAX_REFINEMENT_DELTA))),
            ))
        except (KeyError, ValueError) as exc:
            raise ParseError(f"{source} [{section}]: {exc}") from exc
    return source, configs


# --- commands ----------------------------------------------------------------

BOUND_HEADER = ("kind", "lower", "upper", "exact")


def cmd_bound(args) -> int:
    kinds = parse_kinds(args.kinds)
    what, payload = load_input(args.input)
    if what == "state":
        rho = payload
        stats = measurement_statistics(rho, parse_basis(args.basis, rho.shape[0]))
    else:
        rho, stats = None, payload
    rows = []
    for kind in kinds:
        interval = bound(kind, stats)
        exact = None if rho is None else exact_value(kind, rho)
        rows.append((kind.name, interval.lower, interval.upper, exact))
    if args.format == "json":
        text = json.dumps([dict(zip(BOUND_HEADER, r)) for r in rows], indent=2) + "\n"
    else:
        text = to_csv(BOUND_HEADER, rows)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out) / f"bound.{args.format}"
        write_text(out, text)
        write_manifest(out, "bound", {"input": str(args.input), "basis": args.basis,
                                      "kinds": [k.name for k in kinds], "format": args.format},
                       args.seed, [out])
    return EXIT_OK


def cmd_benchmark(args) -> int:
    source, configs = load_benchmark_configs(args.config, args.seed)
    reports, status = [], EXIT_OK
    for cfg in configs:
        try:
            reports.append(bm.run_benchmark(cfg))
        except GridTooCoarse as exc:
            log.error("%s", exc)
            reports.append(exc.report)
            status = EXIT_FAIL
    if args.format == "json":
        text = json.dumps([r.as_dict() for r in reports], indent=2, sort_keys=True) + "\n"
    else:
        text = to_csv(bm.CSV_COLUMNS, [r.csv_fields() for r in reports])
    sys.stdout.write(text)
    out = Path(args.out or ".") / f"benchmark.{args.format}"
    write_text(out, text)
    write_manifest(out, "benchmark", {"config": source, "runs": [c.as_dict() for c in configs],
                                      "format": args.format}, args.seed, [out])
    return status


def _saturation_summary(n_states: int, seed: int) -> dict:
    limits = {  # kind -> (dims that must saturate, tolerance)
        QuantifierKind.L2: ((2, 3), 1e-9),
        QuantifierKind.TraceNorm: ((2, 3), 1e-9),
        QuantifierKind.L1: ((2,), 1e-9),
        QuantifierKind.RoofSkew: ((2, 3), 1e-6),
    }
    detail, passed = [], True
    for kind, (dims, tol) in limits.items():
        rep = bm.run_saturation_study(kind, n_states, seed)
        for dim in (2, 3):
            gap = rep.max_gap(dim)
            ok = dim not in dims or gap <= tol
            passed &= ok
            entry = {"kind": kind.name, "dim": dim, "max_gap": gap, "enforced": dim in dims, "ok": ok}
            if kind is QuantifierKind.RoofSkew:
                entry["max_gap_rho_minus_rho_d_basis"] = rep.max_alt_gap(dim)
            detail.append(entry)
    return {"suite": "saturation", "passed": bool(passed), "n_states": n_states, "detail": detail}


def run_verify(suite: str, seed: int, samples: int | None = None, mutation: str | None = None) -> dict:
    names = SUITES[:-1] if suite == "all" else (suite,)
    results = []
    for name in names:
        if name == "sandwich":
            n = 10_000 if samples is None else samples
            results.append(bm.run_sandwich_suite(n, seed=seed, mutation=mutation).as_dict())
        elif name == "saturation":
            results.append(_saturation_summary(1000 if samples is None else samples, seed))
        elif name == "udr":
            results.append(bm.run_udr_suite(2000 if samples is None else samples, seed=seed))
        elif name == "majorization":
            results.append(bm.run_majorization_suite(10_000 if samples is None else samples, seed=seed))
    return {"suite": suite, "seed": seed, "passed": all(r["passed"] for r in results),
            "results": results}


def cmd_verify(args) -> int:
    summary = run_verify(args.suite, args.seed, args.samples, args.mutate)
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out) / "verify.json"
        write_text(out, text)
        write_manifest(out, "verify", {"suite": args.suite, "samples": args.samples,
                                       "mutation": args.mutate}, args.seed, [out])
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def cmd_sample(args) -> int:
    rng = np.random.default_rng(args.seed)
    out_dir = Path(args.out or ".")
    paths = []
    for i in range(args.count):
        if args.kind == "pure":
            state = random_pure_haar(args.dim, rng)
        else:
            state = random_density(args.dim, seed=rng)
        path = out_dir / f"state_{i:04d}.json"
        write_text(path, state_to_json(state))
        paths.append(path)
    if paths:
        write_manifest(out_dir / "sample", "sample",
                       {"dim": args.dim, "count": args.count, "kind": args.kind}, args.seed, paths)
    for p in paths:
        print(p)
    return EXIT_OK


# --- entry point -------------------------------------------------------------

def _dim(text: str) -> int:
    d = int(text)
    if d < 2:
        raise argparse.ArgumentTypeError("dim must be at least 2")
    return d


def _count(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("count must be non-negative")
    return n


def _seed(text: str) -> int:
    s = int(text)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return s


def _common(seed_default=0) -> argparse.ArgumentParser:
    # a fresh parent per subcommand: argparse shares action objects with its children
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=seed_default, help="64-bit RNG seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:

    parser = argparse.ArgumentParser(prog="cohbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[_common()], help="bounds from a state or statistics file")
    p.add_argument("input", help="JSON state {dim,re,im} or statistics {p,q,qprime}")
    p.add_argument("--basis", default="fourier",
                   help="test basis: mub:<phase> | bloch:<alpha>,<psi2> | fourier | file:<path>")
    p.add_argument("--kinds", help="comma-separated quantifiers (default: all)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("benchmark", parents=[_common(None)], help="run efficiency benchmarks from a config")
    p.add_argument("config", help="INI config path or bundled name (table2, table2_general, spectrum)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("verify", parents=[_common()], help="run invariant suites")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--samples", type=_count, help="override the per-dimension sample count")
    p.add_argument("--mutate", choices=sorted(bm.MUTATIONS), help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", parents=[_common()], help="write random states as JSON files")
    p.add_argument("--dim", type=_dim, required=True)
    p.add_argument("--count", type=_count, default=1)
    p.add_argument("--kind", choices=("pure", "mixed"), default="pure")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"cohbound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CoherenceError as exc:
        print(f"cohbound: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
