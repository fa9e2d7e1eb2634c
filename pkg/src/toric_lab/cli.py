"""Command-line front end: eigenvalue tables, certificates, searches, and sweeps.

Instances are described by a flat key-value spec file (one `key = value`
per line) with every command-line flag overriding the file.  Outputs are
CSV (RFC 4180, LF line endings, 17-significant-digit floats) and JSON
documents matching the schemas shipped under `toric_lab/schemas/`.

Exit codes: 0 success (and certificate granted), 1 certificate refused,
2 invalid spec or arguments, 3 work-budget or allocation refusal, 4 I/O
failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, Sequence

from . import analysis, configs, spectrum
from .configs import BudgetExceededError, Configuration, DEFAULT_WORK_BUDGET
from .energy import EnergyFunction, ExponentialAtom, InversePower, Tabulated, build_kernel
from .grid import GridDims, Metric, index_to_site

__all__ = ["InstanceSpec", "SpecError", "main"]

BUDGET_ENV_VAR = "TORIC_LAB_BUDGET"

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 1
EXIT_SPEC = 2
EXIT_BUDGET = 3
EXIT_IO = 4

_METRICS = {m.value: m for m in Metric}


class SpecError(ValueError):
    """Invalid instance description (flags or spec file)."""


def _fmt(v: float) -> str:
    """17 significant digits; round-trips float64 exactly."""
    return format(float(v), ".17g")


def parse_dims(text: str) -> tuple[int, ...]:
    parts = [p for p in text.replace("x", ",").split(",") if p.strip()]
    if not parts:
        raise SpecError(f"empty dims {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise SpecError(f"cannot parse dims {text!r}") from None


def parse_energy(text: str) -> EnergyFunction:
    """Parse an energy-function spec: inverse-power:A | exp:A[:sq] | table:PATH."""
    head, _, rest = text.partition(":")
    try:
        if head == "inverse-power":
            return InversePower(float(rest))
        if head == "exp":
            base, _, flag = rest.partition(":")
            if flag not in ("", "sq"):
                raise SpecError(f"unknown exponential flag {flag!r} in {text!r}")
            kind = "distance_squared" if flag == "sq" else "distance"
            return ExponentialAtom(float(base), kind)
        if head == "table":
            return Tabulated(_read_table(Path(rest)))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad energy function {text!r}: {exc}") from None
    raise SpecError(f"unknown energy function kind {head!r} (expected inverse-power, exp, table)")


def _read_table(path: Path) -> dict[float, float]:
    table: dict[float, float] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        x_text, _, v_text = line.partition(",")
        table[float(x_text)] = float(v_text)
    if not table:
        raise SpecError(f"energy table {path} is empty")
    return table


@dataclass(frozen=True)
class InstanceSpec:
    """One problem instance plus run policy; round-trips through spec files."""

    dims: tuple[int, ...]
    metric: str = "lee"
    f: str = "inverse-power:1"
    p: int | None = None
    tie_tol: float | None = None
    budget: int = DEFAULT_WORK_BUDGET
    seed: int = 0
    fmt: str = "json"
    threads: int = 0

    def grid_dims(self) -> GridDims:
        try:
            return GridDims(self.dims)
        except ValueError as exc:
            raise SpecError(str(exc)) from None

    def metric_kind(self) -> Metric:
        try:
            return _METRICS[self.metric]
        except KeyError:
            raise SpecError(
                f"unknown metric {self.metric!r} (expected one of {sorted(_METRICS)})"
            ) from None

    def energy_fn(self) -> EnergyFunction:
        return parse_energy(self.f)

    def to_text(self) -> str:
        lines = [f"dims = {','.join(str(n) for n in self.dims)}"]
        lines.append(f"metric = {self.metric}")
        lines.append(f"f = {self.f}")
        if self.p is not None:
            lines.append(f"p = {self.p}")
        if self.tie_tol is not None:
            lines.append(f"tie_tol = {self.tie_tol!r}")
        lines.append(f"budget = {self.budget}")
        lines.append(f"seed = {self.seed}")
        lines.append(f"format = {self.fmt}")
        lines.append(f"threads = {self.threads}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> InstanceSpec:
        keys: dict[str, str] = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise SpecError(f"expected 'key = value', got {raw!r}")
            keys[key.strip()] = value.strip()
        known = {
            "dims", "metric", "f", "p", "tie_tol", "budget", "seed", "format", "threads",
        }
        unknown = set(keys) - known
        if unknown:
            raise SpecError(f"unknown spec keys {sorted(unknown)}")
        if "dims" not in keys:
            raise SpecError("spec file must set dims")
        try:
            return cls(
                dims=parse_dims(keys["dims"]),
                metric=keys.get("metric", "lee"),
                f=keys.get("f", "inverse-power:1"),
                p=int(keys["p"]) if "p" in keys else None,
                tie_tol=float(keys["tie_tol"]) if "tie_tol" in keys else None,
                budget=int(keys["budget"]) if "budget" in keys else _default_budget(),
                seed=int(keys.get("seed", "0")),
                fmt=keys.get("format", "json"),
                threads=int(keys.get("threads", "0")),
            )
        except ValueError as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"bad spec value: {exc}") from None

    @classmethod
    def from_file(cls, path: Path) -> InstanceSpec:
        return cls.from_text(path.read_text(encoding="utf-8"))


def _default_budget() -> int:
    env = os.environ.get(BUDGET_ENV_VAR)
    if env is None:
        return DEFAULT_WORK_BUDGET
    try:
        return int(env)
    except ValueError:
        raise SpecError(f"{BUDGET_ENV_VAR} must be an integer, got {env!r}") from None


def _add_instance_flags(parser: argparse.ArgumentParser, need_dims: bool = True) -> None:
    parser.add_argument("--spec", type=Path, default=None, help="spec file; flags override it")
    parser.add_argument("--dims", type=str, default=None, help="grid sizes, e.g. 4,4" + ("" if need_dims else " (unused)"))
    parser.add_argument("--metric", type=str, default=None, choices=sorted(_METRICS), help="distance kind")
    parser.add_argument("--f", type=str, default=None, help="energy function: inverse-power:A | exp:A[:sq] | table:PATH")
    parser.add_argument("--p", type=int, default=None, help="particle count")
    parser.add_argument("--tie-tol", type=float, default=None, help="eigenvalue tie tolerance (default: scaled 1e-9)")
    parser.add_argument("--budget", type=int, default=None, help="work budget in elementary steps")
    parser.add_argument("--seed", type=int, default=None, help="random seed for stochastic search")
    parser.add_argument("--threads", type=int, default=None, help="worker count, 0 = auto (reserved; current build runs sequentially)")
    parser.add_argument("--format", dest="fmt", type=str, default=None, choices=["json", "csv", "ascii-grid"], help="output format")
    parser.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")


def _build_spec(args: argparse.Namespace, need_dims: bool = True) -> InstanceSpec:
    if args.spec is not None:
        try:
            base = InstanceSpec.from_file(args.spec)
        except OSError:
            raise
    else:
        if need_dims and args.dims is None:
            raise SpecError("either --spec or --dims is required")
        base = InstanceSpec(dims=parse_dims(args.dims) if args.dims else (1,), budget=_default_budget())
    updates = {}
    if args.dims is not None:
        updates["dims"] = parse_dims(args.dims)
    for flag, field_name in [
        ("metric", "metric"), ("f", "f"), ("p", "p"), ("tie_tol", "tie_tol"),
        ("budget", "budget"), ("seed", "seed"), ("threads", "threads"), ("fmt", "fmt"),
    ]:
        value = getattr(args, flag)
        if value is not None:
            updates[field_name] = value
    spec = replace(base, **updates)
    spec.grid_dims()
    spec.metric_kind()
    spec.energy_fn()
    return spec


@contextlib.contextmanager
def _out_stream(path: Path | None) -> Iterator[io.TextIOBase]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            yield handle


def _write_csv(path: Path | None, header: list[str], rows: list[list[str]]) -> None:
    with _out_stream(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _emit_json(doc: dict, path: Path | None) -> None:
    text = json.dumps(doc, indent=2)
    if path is not None:
        path.write_text(text + "\n", encoding="utf-8")
    print(text)


def _render_ascii(config: Configuration) -> str:
    dims = config.dims
    if dims.ndim == 1:
        return "".join("1" if (c,) in config else "0" for c in range(dims.sizes[0]))
    if dims.ndim == 2:
        n1, n2 = dims.sizes
        return "\n".join(
            "".join("1" if (r, c) in config else "0" for c in range(n2))
            for r in range(n1)
        )
    raise SpecError("ascii-grid output supports 1- and 2-dimensional grids only")


def _read_sites(path: Path) -> list[tuple[int, ...]]:
    sites = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sites.append(tuple(int(c) for c in line.split(",")))
    return sites


def _summary_path(out: Path) -> Path:
    if out.suffix == ".csv":
        return out.with_suffix(".summary.json")
    return out.with_name(out.name + ".summary.json")


def _cmd_eigs(args: argparse.Namespace) -> int:
    spec = _build_spec(args)
    dims = spec.grid_dims()
    kernel = build_kernel(dims, spec.metric_kind(), spec.energy_fn())
    table = spectrum.eigen_table(kernel)
    lam_min, argmin = spectrum.min_nontrivial(table, spec.tie_tol)
    header = [f"j{i + 1}" for i in range(dims.ndim)] + ["lambda"]
    rows = []
    for i in range(dims.order):
        chi = list(map(str, index_to_site(dims, i)))
        rows.append(chi + [_fmt(table.values[i])])
    summary = {
        "dims": list(dims.sizes),
        "metric": spec.metric,
        "f": spec.f,
        "lambda_trivial": float(table.values[0]),
        "lambda_min": lam_min,
        "argmin": [list(c) for c in argmin],
        "tie_tol": spec.tie_tol if spec.tie_tol is not None else spectrum.default_tie_tol(lam_min),
    }
    if args.out is not None:
        _write_csv(args.out, header, rows)
        _summary_path(args.out).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
        print(json.dumps(summary, indent=2))
    else:
        _write_csv(None, header, rows)
        print(json.dumps(summary, indent=2), file=sys.stderr)
    return EXIT_OK


def _cmd_certify(args: argparse.Namespace) -> int:
    spec = _build_spec(args)
    dims = spec.grid_dims()
    cert = spectrum.checkerboard_certificate(
        dims, spec.metric_kind(), spec.energy_fn(), spec.tie_tol
    )
    doc = {
        "dims": list(dims.sizes),
        "metric": spec.metric,
        "f": spec.f,
        "p": cert.p,
        "certified": cert.certified,
        "lambda_trivial": cert.lambda_trivial,
        "lambda_min": cert.lambda_min,
        "argmin": [list(c) for c in cert.argmin_characters],
        "offenders": [list(c) for c in cert.offenders],
        "gap_to_minus_one": cert.gap_to_minus_one,
        "multiplicity": cert.multiplicity,
        "optimal_value": cert.optimal_value,
        "checkerboard_e_tot": cert.checkerboard_e_tot,
        "checkerboard_e_max": cert.checkerboard_e_max,
        "tie_tol": cert.tie_tol,
        "conclusion": cert.conclusion,
    }
    _emit_json(doc, args.out)
    return EXIT_OK if cert.certified else EXIT_NOT_CERTIFIED


def _cmd_search(args: argparse.Namespace) -> int:
    spec = _build_spec(args)
    dims = spec.grid_dims()
    if spec.p is None:
        raise SpecError("search requires a particle count (--p)")
    if args.method == "exhaustive":
        hits = configs.brute_force(
            dims,
            spec.metric_kind(),
            spec.energy_fn(),
            spec.p,
            objective=args.objective,
            top_k=args.top_k,
            reduce=args.reduce,
            budget=spec.budget,
        )
    else:
        result = configs.local_search(
            dims,
            spec.metric_kind(),
            spec.energy_fn(),
            spec.p,
            objective=args.objective,
            restarts=args.restarts,
            rng_seed=spec.seed,
        )
        hits = [configs.SearchHit(config=result.config, value=result.value, orbit_size=1)]
    doc = {
        "dims": list(dims.sizes),
        "metric": spec.metric,
        "f": spec.f,
        "p": spec.p,
        "objective": args.objective,
        "top_k": args.top_k,
        "reduce": args.reduce,
        "seed": spec.seed,
        "restarts": args.restarts,
        "results": [
            {
                "rank": rank,
                "value": hit.value,
                "orbit_size": hit.orbit_size,
                "sites": [list(s) for s in hit.config.sites()],
            }
            for rank, hit in enumerate(hits, start=1)
        ],
    }
    if spec.fmt == "json":
        _emit_json(doc, args.out)
    elif spec.fmt == "csv":
        header = ["rank", "value", "orbit_size", "sites"]
        rows = [
            [str(r["rank"]), _fmt(r["value"]), str(r["orbit_size"]),
             ";".join(",".join(map(str, s)) for s in r["sites"])]
            for r in doc["results"]
        ]
        _write_csv(args.out, header, rows)
    else:
        blocks = []
        for r, hit in zip(doc["results"], hits):
            blocks.append(
                f"rank={r['rank']} value={_fmt(r['value'])} orbit_size={r['orbit_size']}\n"
                + _render_ascii(hit.config)
            )
        text = "\n\n".join(blocks) + "\n"
        with _out_stream(args.out) as handle:
            handle.write(text)
    return EXIT_OK


def _cmd_energy(args: argparse.Namespace) -> int:
    spec = _build_spec(args)
    dims = spec.grid_dims()
    try:
        sites = _read_sites(args.config)
    except ValueError as exc:
        raise SpecError(f"bad configuration file {args.config}: {exc}") from None
    try:
        config = Configuration.from_sites(dims, sites)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    kernel = build_kernel(dims, spec.metric_kind(), spec.energy_fn())
    report = configs.energies(config, kernel)
    if spec.fmt == "ascii-grid":
        text = (
            _render_ascii(config)
            + f"\ne_tot={_fmt(report.e_tot)} e_max={_fmt(report.e_max)}"
            + f" equienergetic={'yes' if report.is_equienergetic else 'no'}\n"
        )
        with _out_stream(args.out) as handle:
            handle.write(text)
        return EXIT_OK
    doc = {
        "dims": list(dims.sizes),
        "metric": spec.metric,
        "f": spec.f,
        "p": config.p,
        "per_site": [
            {"site": list(site), "energy": value}
            for site, value in sorted(report.per_site.items())
        ],
        "e_max": report.e_max,
        "e_tot": report.e_tot,
        "is_equienergetic": report.is_equienergetic,
        "is_empty": report.is_empty,
    }
    _emit_json(doc, args.out)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = _build_spec(args, need_dims=False)
    dims_list = [parse_dims(part) for part in args.dims_list.split(";") if part.strip()]
    if not dims_list:
        raise SpecError("sweep needs at least one dims entry")
    header = [
        "dims", "certified", "lambda_min", "gap_to_minus_one",
        "optimal_value", "checkerboard_e_tot", "checkerboard_e_max", "tie_tol",
    ]
    rows = []
    all_certified = True
    for sizes in dims_list:
        dims = GridDims(sizes)
        cert = spectrum.checkerboard_certificate(
            dims, spec.metric_kind(), spec.energy_fn(), spec.tie_tol
        )
        all_certified = all_certified and cert.certified
        rows.append([
            str(dims),
            "true" if cert.certified else "false",
            _fmt(cert.lambda_min),
            _fmt(cert.gap_to_minus_one),
            _fmt(cert.optimal_value),
            _fmt(cert.checkerboard_e_tot),
            _fmt(cert.checkerboard_e_max),
            _fmt(cert.tie_tol),
        ])
    _write_csv(args.out, header, rows)
    return EXIT_OK if all_certified else EXIT_NOT_CERTIFIED


def _cmd_factor_curve(args: argparse.Namespace) -> int:
    try:
        curve = analysis.factor_curve(args.n, args.a, args.power)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    rows = [[str(k), _fmt(curve.values[k])] for k in range(curve.n)]
    _write_csv(args.out, ["k", "value"], rows)
    summary = {
        "n": curve.n,
        "a": curve.a,
        "power": curve.distance_power,
        "argmin": list(curve.argmin),
        "min_value": float(curve.values[1:].min()),
    }
    print(json.dumps(summary, indent=2), file=sys.stdout if args.out is not None else sys.stderr)
    return EXIT_OK


def _cmd_bernstein(args: argparse.Namespace) -> int:
    try:
        a_grid = [float(x) for x in args.a_grid.split(",") if x.strip()]
        records = analysis.bernstein_sweep(args.n, args.power, a_grid)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    header = ["a", "argmin", "is_minus_one_strict_min", "min_value"]
    rows = [
        [_fmt(r.a), ";".join(map(str, r.argmin)),
         "true" if r.is_minus_one_strict_min else "false", _fmt(r.min_value)]
        for r in records
    ]
    _write_csv(args.out, header, rows)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toric-lab",
        description="Spectral certificates and configuration search for repelling particles on toric grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eigs = sub.add_parser("eigs", help="eigenvalue table as CSV plus a JSON summary")
    _add_instance_flags(p_eigs)
    p_eigs.set_defaults(func=_cmd_eigs)

    p_cert = sub.add_parser("certify", help="checkerboard certificate as JSON (exit 1 if refused)")
    _add_instance_flags(p_cert)
    p_cert.set_defaults(func=_cmd_certify)

    p_search = sub.add_parser("search", help="rank p-subsets by total or maximal energy")
    _add_instance_flags(p_search)
    p_search.add_argument("--objective", choices=["total", "max"], default="total")
    p_search.add_argument("--top-k", type=int, default=1)
    p_search.add_argument("--reduce", choices=["none", "translations"], default="none")
    p_search.add_argument("--method", choices=["exhaustive", "local"], default="exhaustive")
    p_search.add_argument("--restarts", type=int, default=1, help="restarts for --method local")
    p_search.set_defaults(func=_cmd_search)

    p_energy = sub.add_parser("energy", help="energy report for a configuration file")
    _add_instance_flags(p_energy)
    p_energy.add_argument("--config", type=Path, required=True,
                          help="file of sites, one comma-separated coordinate tuple per line")
    p_energy.set_defaults(func=_cmd_energy)

    p_sweep = sub.add_parser("sweep", help="batch certificates over a list of grids (CSV)")
    _add_instance_flags(p_sweep, need_dims=False)
    p_sweep.add_argument("--dims-list", type=str, required=True,
                         help="semicolon-separated dims, e.g. '2,2;4,4;8,4'")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_curve = sub.add_parser("factor-curve", help="one per-dimension factor curve (CSV)")
    p_curve.add_argument("--n", type=int, required=True)
    p_curve.add_argument("--a", type=float, required=True)
    p_curve.add_argument("--power", type=int, choices=[1, 2], default=1)
    p_curve.add_argument("--out", type=Path, default=None)
    p_curve.set_defaults(func=_cmd_factor_curve)

    p_bern = sub.add_parser("bernstein", help="factor-curve argmin sweep over a base grid (CSV)")
    p_bern.add_argument("--n", type=int, required=True)
    p_bern.add_argument("--power", type=int, choices=[1, 2], default=1)
    p_bern.add_argument("--a-grid", type=str, required=True, help="comma-separated bases > 1")
    p_bern.add_argument("--out", type=Path, default=None)
    p_bern.set_defaults(func=_cmd_bernstein)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except MemoryError:
        print("error: allocation refused", file=sys.stderr)
        return EXIT_BUDGET
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
