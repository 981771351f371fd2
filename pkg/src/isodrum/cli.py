"""Command line entry point: ``isodrum <command> [options]``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors.  Outputs are written to ``--out`` and are byte-identical for
identical options.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import gassmann
from .mesh import refine, write_mesh
from .pipeline import drum_pair, isospectrality_study, spectra_by_level
from .spectral import DIRICHLET, MIXED, NEUMANN, BCSpec, weyl_fit, write_spectrum_csv
from .transplant import transplant_study
from .unfolding import BaseTriangle, PlanarDomain, boundary_signature, to_svg

log = logging.getLogger("isodrum")

COMMANDS = ("gassmann-check", "derive-diagrams", "build-domains", "spectrum", "compare", "transplant-verify", "weyl")

DEFAULT_LEVELS = {
    "build-domains": [0],
    "spectrum": [5],
    "compare": [5, 6, 7],
    "transplant-verify": [4, 5, 6],
    "weyl": [6],
}
DEFAULT_COUNT = {"spectrum": 10, "compare": 10, "transplant-verify": 5, "weyl": 200}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    base: Optional[BaseTriangle] = None
    levels: list = field(default_factory=list)
    count: int = 10
    bc: BCSpec = BCSpec(DIRICHLET)
    tol: float = 1e-8
    threshold: float = 1e-3
    seed: int = 0
    out: Path = Path("out")
    domains: Optional[list] = None

    def __post_init__(self):
        if any(L < 0 for L in self.levels):
            raise UsageError("levels must be >= 0")
        if self.count < 1:
            raise UsageError("--count must be >= 1")
        if self.tol <= 0 or self.threshold <= 0:
            raise UsageError("tolerances must be positive")


def _levels(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from None


def _base(text: str) -> BaseTriangle:
    try:
        return BaseTriangle.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", type=_base, help="base triangle as x0,y0,x1,y1,x2,y2 (fractions allowed)")
    common.add_argument("--levels", type=_levels, help="comma separated refinement levels")
    common.add_argument("--count", type=int, help="number of eigenvalues")
    common.add_argument("--bc", choices=(DIRICHLET, NEUMANN, MIXED), default=DIRICHLET)
    common.add_argument("--mixed-map", help="color=bc pairs for --bc mixed, e.g. 0=dirichlet,1=neumann,2=neumann")
    common.add_argument("--tol", type=float, default=1e-8, help="eigensolver relative residual")
    common.add_argument("--threshold", type=float, default=1e-3, help="pass threshold for the verification")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, default=Path("out"))
    common.add_argument("--domains", nargs=2, type=Path, metavar="JSON", help="load both drums from domain JSON files")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="isodrum", description="Isospectral drums from a Gassmann triple.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.bc == MIXED:
        if not ns.mixed_map:
            raise UsageError("--bc mixed needs --mixed-map")
        bc = BCSpec.parse_mixed(ns.mixed_map)
        for c in (0, 1, 2):
            bc.condition(c)
    else:
        if ns.mixed_map:
            raise UsageError("--mixed-map only applies to --bc mixed")
        bc = BCSpec(ns.bc)
    return RunConfig(
        command=ns.command,
        base=ns.base,
        levels=ns.levels if ns.levels is not None else list(DEFAULT_LEVELS.get(ns.command, [])),
        count=ns.count if ns.count is not None else DEFAULT_COUNT.get(ns.command, 10),
        bc=bc,
        tol=ns.tol,
        threshold=ns.threshold,
        seed=ns.seed,
        out=ns.out,
        domains=ns.domains,
    )


def _dump(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _domains(cfg: RunConfig) -> tuple[PlanarDomain, PlanarDomain]:
    if cfg.domains:
        return tuple(PlanarDomain.from_json(json.loads(Path(p).read_text())) for p in cfg.domains)
    pair = drum_pair(cfg.base)
    return pair.first, pair.second


def cmd_gassmann_check(cfg: RunConfig) -> int:
    G, H, K = gassmann.gassmann_pair()
    report = gassmann.gassmann_report(G, H, K, seed=cfg.seed)
    _dump(cfg.out / "gassmann.json", report)
    ok = report["almost_conjugate"] and not report["conjugate"]
    print(f"almost conjugate: {report['almost_conjugate']}  conjugate: {report['conjugate']}")
    return 0 if ok else 1


def cmd_derive_diagrams(cfg: RunConfig) -> int:
    pair = drum_pair(cfg.base)
    d = pair.diagrams
    report = {
        "involutions": [list(g) for g in d.involutions],
        "diagram1": d.first.to_json(),
        "diagram2": d.second.to_json(),
        "boundary_counts1": list(d.first.boundary_counts()),
        "boundary_counts2": list(d.second.boundary_counts()),
        "trees": [d.first.is_tree(), d.second.is_tree()],
    }
    _dump(cfg.out / "diagrams.json", report)
    print(f"involutions: {report['involutions']}")
    return 0 if all(report["trees"]) else 1


def cmd_build_domains(cfg: RunConfig) -> int:
    from .unfolding import check_embedding

    domains = _domains(cfg)
    ok = True
    for i, dom in enumerate(domains, start=1):
        _dump(cfg.out / f"drum{i}.json", dom.to_json())
        (cfg.out / f"drum{i}.svg").write_text(to_svg(dom))
        for L in cfg.levels:
            write_mesh(refine(dom, L), cfg.out / f"drum{i}_L{L}.mesh")
        ok &= check_embedding(dom)
    noniso = boundary_signature(domains[0]) != boundary_signature(domains[1])
    print(f"embedded: {ok}  nonisometric: {noniso}  area: {domains[0].area} / {domains[1].area}")
    return 0 if ok and noniso and domains[0].area == domains[1].area else 1


def cmd_spectrum(cfg: RunConfig) -> int:
    for i, dom in enumerate(_domains(cfg), start=1):
        for spec in spectra_by_level(dom, cfg.levels, cfg.count, cfg.bc, cfg.tol, cfg.seed):
            path = cfg.out / f"drum{i}_{cfg.bc.mode}_L{spec.level}.csv"
            write_spectrum_csv(spec, path)
            log.info("wrote %s", path)
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    report = isospectrality_study(_domains(cfg), cfg.levels, cfg.count, cfg.bc, cfg.tol, cfg.seed)
    report["threshold"] = cfg.threshold
    worst = report["extrapolated"]["max_relative_difference"]
    report["passed"] = worst <= cfg.threshold
    _dump(cfg.out / f"compare_{cfg.bc.mode}.json", report)
    print(f"max relative difference (extrapolated): {worst:.3e}  raw by level: {report['raw_trend']}")
    return 0 if report["passed"] else 1


def cmd_transplant_verify(cfg: RunConfig) -> int:
    d1, d2 = _domains(cfg)
    report = transplant_study(d1, d2, cfg.levels, cfg.count, cfg.bc, cfg.tol, cfg.seed)
    rows = [r for lv in report["levels"] for r in lv["eigenfunctions"]]
    gap = max(r["rayleigh_gap"] for r in rows)
    drift = max(abs(r["norm_ratio"] - 1.0) for r in rows)
    report["threshold"] = cfg.threshold
    report["passed"] = gap <= cfg.threshold and drift <= 1e-12
    _dump(cfg.out / f"transplant_{cfg.bc.mode}.json", report)
    print(f"max Rayleigh gap: {gap:.3e}  max norm drift: {drift:.3e}")
    return 0 if report["passed"] else 1


def cmd_weyl(cfg: RunConfig) -> int:
    level = cfg.levels[-1]
    fits = []
    for dom in _domains(cfg):
        (spec,) = spectra_by_level(dom, [level], cfg.count, cfg.bc, cfg.tol, cfg.seed)
        fits.append(weyl_fit(spec.values, float(dom.area), dom.perimeter, bc=cfg.bc.mode))
    mismatch = abs(fits[0].a - fits[1].a) / fits[0].a
    report = {
        "level": level,
        "bc": cfg.bc.name,
        "fits": [
            {"a": f.a, "b": f.b, "expected_a": f.expected_a, "expected_b": f.expected_b, "a_error": f.a_error, "count": f.count}
            for f in fits
        ],
        "a_mismatch": mismatch,
    }
    report["passed"] = all(f.a_error <= 0.1 for f in fits) and mismatch <= 0.01
    _dump(cfg.out / f"weyl_{cfg.bc.mode}.json", report)
    print(f"a = {fits[0].a:.5f}, {fits[1].a:.5f}  (area/4pi = {fits[0].expected_a:.5f})")
    return 0 if report["passed"] else 1


HANDLERS = {
    "gassmann-check": cmd_gassmann_check,
    "derive-diagrams": cmd_derive_diagrams,
    "build-domains": cmd_build_domains,
    "spectrum": cmd_spectrum,
    "compare": cmd_compare,
    "transplant-verify": cmd_transplant_verify,
    "weyl": cmd_weyl,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(ns)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"isodrum: error: {exc}", file=sys.stderr)
        return 2
    cfg.out.mkdir(parents=True, exist_ok=True)
    return HANDLERS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
