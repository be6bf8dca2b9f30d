"""Command-line entry point.

Exit codes: 0 success, 2 input error, 3 internal theorem/certificate
violation (a refuted verdict counts), 4 scale cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bounds, graph, search, spectral
from .errors import (
    CertificateViolation,
    DomainError,
    InputShapeError,
    InputValueError,
    ScaleError,
    TheoremViolation,
)

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_SCALE = 0, 2, 3, 4


@dataclass
class RunConfig:
    tol: float = spectral.DEFAULT_TOL
    threads: int = 1
    log_path: Path | None = Path("results.jsonl")
    format: str = "text"
    precision: int = 9
    force: bool = False
    dedupe_transpose: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise DomainError("--tol must be positive")
        if self.threads < 1:
            raise DomainError("--threads must be >= 1")


class Printer:
    """Serialises all user-visible output through one writer."""

    def __init__(self, cfg: RunConfig, out=None):
        self.cfg = cfg
        self.out = out or sys.stdout

    def num(self, x: float | None) -> str:
        if x is None:
            return "-"
        return f"{x:.{self.cfg.precision}g}"

    def line(self, *parts) -> None:
        print(" ".join(str(p) for p in parts), file=self.out)

    def json(self, obj) -> None:
        print(json.dumps(obj, sort_keys=True), file=self.out)


def _load(path: str) -> graph.BipartiteGraph:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return graph.parse_graph(text)


def cmd_rho(args, cfg: RunConfig, out: Printer) -> int:
    g = _load(args.graph)
    rho = spectral.spectral_radius(g, cfg.tol)
    prof = graph.degree_profile(g)
    info = {
        "rho": rho,
        "p": g.p,
        "q": g.q,
        "e": g.e,
        "d": list(prof.d),
        "dprime": list(prof.dprime),
        "connected": graph.is_connected(g),
        "biregular": graph.is_biregular(g),
    }
    if cfg.format == "json":
        out.json(info)
        return EXIT_OK
    out.line("rho", out.num(rho))
    out.line("p", g.p, "q", g.q, "e", g.e)
    out.line("d", *prof.d)
    out.line("dprime", *prof.dprime)
    out.line("connected", "yes" if info["connected"] else "no")
    out.line("biregular", "yes" if info["biregular"] else "no")
    return EXIT_OK


def cmd_bounds(args, cfg: RunConfig, out: Printer) -> int:
    g = _load(args.graph)
    if args.certify:
        s, t = args.certify
        rep = spectral.scaling_certificate(g, s, t)
        if cfg.format == "json":
            out.json({
                "s": s, "t": t, "phi_sq": rep.phi_sq, "x": list(rep.x), "xprime": list(rep.xprime),
                "row_sums": list(rep.row_sums), "max_row_sum": rep.max_row_sum, "verdict": rep.verdict,
            })
            return EXIT_OK
        out.line("certify", f"({s},{t})", "phi^2", out.num(rep.phi_sq))
        out.line("x", *map(out.num, rep.x))
        out.line("xprime", *map(out.num, rep.xprime))
        out.line("row_sums", *map(out.num, rep.row_sums))
        out.line("max_row_sum", out.num(rep.max_row_sum))
        out.line("verdict", "true" if rep.verdict else "false")
        return EXIT_OK

    grid = bounds.phi_grid(g, cfg.tol)
    if cfg.format == "json":
        out.json({
            "rho": grid.rho,
            "values": grid.values.tolist(),
            "best": list(grid.best),
            "best_value": grid.best_value,
            "tight": [list(c) for c in grid.tight_cells],
        })
        return EXIT_OK
    if args.grid:
        out.line("rho", out.num(grid.rho))
        out.line("s\\t", *range(1, g.q + 1))
        tight = set(grid.tight_cells)
        for s in range(1, g.p + 1):
            cells = [
                out.num(grid.values[s - 1, t - 1]) + ("*" if (s, t) in tight else "")
                for t in range(1, g.q + 1)
            ]
            out.line(s, *cells)
        return EXIT_OK
    s, t = grid.best
    flag = "TIGHT" if grid.best in grid.tight_cells else "loose"
    out.line(f"({s},{t})", out.num(grid.best_value), flag)
    return EXIT_OK


def cmd_construct(args, cfg: RunConfig, out: Printer) -> int:
    kind, p, q, e = args.kind, args.p, args.q, args.e
    if kind in ("brace", "bracket") and e is None:
        raise DomainError(f"{kind} needs an edge count e")
    builders = {
        "brace": lambda: graph.k_brace(p, q, e),
        "bracket": lambda: graph.k_bracket(p, q, e),
        "complete": lambda: graph.complete_bipartite(p, q),
        "empty": lambda: graph.empty_bipartite(p, q),
    }
    out.out.write(graph.format_graph(builders[kind]()))
    return EXIT_OK


def _record_line(rec: search.SearchRecord, out: Printer) -> None:
    s = rec.spec
    if out.cfg.format == "json":
        out.json(rec.to_json())
    else:
        out.line(s.p, s.q, s.e, rec.verdict, out.num(rec.max_rho))


def _log(cfg: RunConfig, obj: dict) -> None:
    if cfg.log_path is not None:
        search.append_jsonl(cfg.log_path, obj)


def cmd_verify(args, cfg: RunConfig, out: Printer) -> int:
    if args.sweep:
        pmax, qmax = args.sweep
        cells = [
            (p, q, e)
            for p in range(1, pmax + 1)
            for q in range(1, qmax + 1)
            for e in range(p * q + 1)
            if search.in_conjecture2_range(p, q, e)
        ]
    elif args.cell:
        cells = [tuple(args.cell)]
    else:
        raise DomainError("verify needs p q e or --sweep PMAX QMAX")

    done = set()
    if args.sweep and not cfg.force and cfg.log_path is not None:
        done = search.completed_cells(cfg.log_path, "max")

    status = EXIT_OK
    for p, q, e in cells:
        if not search.in_conjecture2_range(p, q, e):
            out.line(p, q, e, search.INAPPLICABLE)
            continue
        if (p, q, e) in done:
            out.line(p, q, e, "skipped (already logged)")
            continue
        if p * q > search.EXHAUSTIVE_CAP:
            out.line(p, q, e, f"skipped (pq > {search.EXHAUSTIVE_CAP})")
            if status == EXIT_OK:
                status = EXIT_SCALE
            continue
        spec = search.EnumerationSpec(p, q, e, cfg.dedupe_transpose)
        rec = search.max_spectral(spec, cfg.tol, cfg.threads)
        if rec.verdict == search.REFUTED:
            search.log.error("refuted verdict at (%d, %d, %d)", p, q, e)
            status = EXIT_VIOLATION
        _record_line(rec, out)
        _log(cfg, rec.to_json())
    return status


def cmd_scan3(args, cfg: RunConfig, out: Printer) -> int:
    p, q, e = args.p, args.q, args.e
    spec = search.EnumerationSpec(p, q, e, cfg.dedupe_transpose)
    rec = search.max_spectral(spec, cfg.tol, cfg.threads)
    verdict = search.scan_conjecture3(p, q, e, cfg.tol, list_all=args.all, record=rec)
    _log(cfg, verdict.to_json())
    if cfg.format == "json":
        obj = verdict.to_json()
        obj["hits"] = [list(h) for h in verdict.hits]
        out.json(obj)
        return EXIT_OK
    if not verdict.found:
        out.line(p, q, e, "CANDIDATE-COUNTEREXAMPLE", "max_rho", out.num(verdict.max_rho))
        return EXIT_OK
    for s, t, rho in verdict.hits:
        out.line(p, q, e, "found", f"({s},{t})", out.num(rho), "max_rho", out.num(verdict.max_rho))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="absolute tolerance on rho")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes for search")
    common.add_argument("--log", default=argparse.SUPPRESS, help="JSONL result log ('' disables)")
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS, help="significant digits (17 = full)")
    common.add_argument("--force", action="store_true", default=argparse.SUPPRESS, help="recompute logged cells")
    common.add_argument("--dedupe-transpose", action="store_true", default=argparse.SUPPRESS,
                        help="identify a graph with its part swap when p = q")

    parser = argparse.ArgumentParser(prog="bispectral", parents=[common],
                                     description="Spectral radius bounds for bipartite graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rho", parents=[common], help="spectral radius of a graph file")
    p.add_argument("graph", help="graph file, or - for stdin")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("bounds", parents=[common], help="phi_{s,t} bounds and certificates")
    p.add_argument("graph")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--grid", action="store_true")
    mode.add_argument("--best", action="store_true")
    mode.add_argument("--certify", nargs=2, type=int, metavar=("S", "T"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("construct", parents=[common], help="emit a named graph")
    p.add_argument("kind", choices=["brace", "bracket", "complete", "empty"])
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("e", type=int, nargs="?")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="exhaustive check of the K^{e}_{p,q} maximum")
    p.add_argument("cell", nargs="*", type=int, metavar="N", help="p q e")
    p.add_argument("--sweep", nargs=2, type=int, metavar=("PMAX", "QMAX"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan3", parents=[common], help="search for an (s, t) witness")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("e", type=int)
    p.add_argument("--all", action="store_true", help="list every witnessing (s, t)")
    p.set_defaults(func=cmd_scan3)
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    log = getattr(ns, "log", "results.jsonl")
    return RunConfig(
        tol=getattr(ns, "tol", spectral.DEFAULT_TOL),
        threads=getattr(ns, "threads", 1),
        log_path=Path(log) if log else None,
        format=getattr(ns, "format", "text"),
        precision=getattr(ns, "precision", 9),
        force=getattr(ns, "force", False),
        dedupe_transpose=getattr(ns, "dedupe_transpose", False),
    )


def main(argv: list[str] | None = None, out=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "verify" and ns.cell and len(ns.cell) != 3:
        parser.error("verify takes exactly three integers p q e")
    err = sys.stderr
    try:
        cfg = _config(ns)
        return ns.func(ns, cfg, Printer(cfg, out))
    except (InputShapeError, InputValueError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except (CertificateViolation, TheoremViolation) as exc:
        print(f"internal violation: {exc}", file=err)
        return EXIT_VIOLATION
    except ScaleError as exc:
        print(f"scale cap: {exc}", file=err)
        return EXIT_SCALE


if __name__ == "__main__":
    sys.exit(main())
