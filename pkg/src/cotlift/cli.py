"""Manifest-driven command line front end.

Commands:
    lift-verify run      run suites over the catalog (plus manifest manifolds)
    lift-verify catalog  list the built-in manifolds
    lift-verify check    run a single property id

Exit codes: 0 all checks pass, 1 verification failure, 2 manifest error,
3 runtime domain error (for example a metric that is not positive definite
on its sampling box).  The environment variable LIFT_VERIFY_THREADS caps the
number of worker threads used for per-sample evaluation.
"""

from __future__ import annotations

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

from ._version import __version__
from .base_geometry import CATALOG, GeometryError, ManifoldSpec, catalog_manifolds
from .expr import ExprError
from .verify import (
    PROPERTY_IDS,
    PropertyReport,
    SampleConfig,
    SUITES,
    check_property,
    run_suites,
)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_MANIFEST_ERROR = 2
EXIT_RUNTIME_ERROR = 3


class ManifestError(Exception):
    pass


_MANIFOLD_KEYS = {"name", "dim", "coords", "metric", "domain", "fiber"}
_RUN_KEYS = {"samples", "seed", "tol", "suites"}


def load_manifest(path: str) -> tuple[list[ManifoldSpec], dict]:
    """Parse a TOML manifest into manifold specs and run defaults."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"manifest is not valid TOML: {exc}") from None

    unknown = set(doc) - {"manifold", "run"}
    if unknown:
        raise ManifestError(f"unknown top-level keys {sorted(unknown)}")

    manifolds = []
    for block in doc.get("manifold", []):
        unknown = set(block) - _MANIFOLD_KEYS
        if unknown:
            raise ManifestError(f"unknown manifold keys {sorted(unknown)}")
        for key in ("name", "dim", "coords", "metric", "domain"):
            if key not in block:
                raise ManifestError(f"manifold block is missing {key!r}")
        coords = list(block["coords"])
        if len(coords) != int(block["dim"]):
            raise ManifestError(
                f"manifold {block['name']!r}: dim={block['dim']} but "
                f"{len(coords)} coordinates"
            )
        metric = {}
        for key, text in block["metric"].items():
            idx = _metric_key(key, len(coords))
            metric[idx] = text
        try:
            spec = ManifoldSpec.build(
                name=str(block["name"]),
                coords=coords,
                metric=metric,
                domain={c: tuple(v) for c, v in block["domain"].items()},
                fiber=tuple(block["fiber"]) if "fiber" in block else None,
            )
        except (GeometryError, ExprError) as exc:
            raise ManifestError(f"manifold {block['name']!r}: {exc}") from None
        manifolds.append(spec)

    run = doc.get("run", {})
    unknown = set(run) - _RUN_KEYS
    if unknown:
        raise ManifestError(f"unknown run keys {sorted(unknown)}")
    if "suites" in run:
        bad = set(run["suites"]) - set(SUITES)
        if bad:
            raise ManifestError(f"unknown suites {sorted(bad)}")
    return manifolds, run


def _metric_key(key: str, n: int) -> tuple[int, int]:
    """'g11', 'g12', ... (1-based, upper triangle) to 0-based index pairs."""
    if len(key) == 3 and key.startswith("g") and key[1:].isdigit():
        i, j = int(key[1]) - 1, int(key[2]) - 1
        if 0 <= i <= j < n:
            return (i, j)
    raise ManifestError(
        f"bad metric key {key!r}; expected gIJ with 1 <= I <= J <= {n}"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lift-verify",
        description="Verify the lifted-connection identities on catalog "
        "and user manifolds.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifest", metavar="PATH", help="TOML manifest with extra manifolds")
        p.add_argument("--samples", type=int, default=None, help="samples per manifold (default 100)")
        p.add_argument("--seed", type=int, default=None, help="sampling seed (default 42)")
        p.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-8)")
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
        p.add_argument(
            "--curvature-sign",
            type=int,
            choices=(1, -1),
            default=1,
            help="sign of the curvature entering the balanced lift; -1 "
            "demonstrates that the opposite convention fails",
        )

    p_run = sub.add_parser("run", help="run verification suites")
    common(p_run)
    p_run.add_argument(
        "--suite",
        action="append",
        choices=SUITES,
        help="suite to run (repeatable; default: all)",
    )

    sub.add_parser("catalog", help="list built-in manifolds")

    p_check = sub.add_parser("check", help="run a single property")
    p_check.add_argument("property_id", choices=PROPERTY_IDS)
    common(p_check)
    return parser


def _config_from(args, run_defaults: dict) -> SampleConfig:
    samples = args.samples if args.samples is not None else run_defaults.get("samples", 100)
    seed = args.seed if args.seed is not None else run_defaults.get("seed", 42)
    tol = args.tol if args.tol is not None else run_defaults.get("tol", 1e-8)
    return SampleConfig(
        seed=int(seed),
        samples=int(samples),
        tol=float(tol),
        curvature_sign=args.curvature_sign,
    )


def _emit(report: PropertyReport, args) -> None:
    rendered = report.to_json() if args.format == "json" else report.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rendered + "\n")
    else:
        print(rendered)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "catalog":
        for name, factory in CATALOG.items():
            spec = factory()
            print(f"{name}  dim={spec.dim}  coords={', '.join(spec.coords)}")
        return EXIT_OK

    try:
        manifest_manifolds, run_defaults = (
            load_manifest(args.manifest) if args.manifest else ([], {})
        )
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST_ERROR

    cfg = _config_from(args, run_defaults)
    manifolds = catalog_manifolds() + manifest_manifolds

    try:
        if args.command == "run":
            suites = tuple(args.suite) if args.suite else run_defaults.get("suites", SUITES)
            report = run_suites(cfg, suites=tuple(suites), manifolds=manifolds)
        else:  # check
            report = PropertyReport(
                meta={
                    "seed": cfg.seed,
                    "samples": cfg.samples,
                    "tol": cfg.tol,
                    "version": __version__,
                }
            )
            for M in manifolds:
                report.entries.extend(check_property(M, cfg, args.property_id))
    except (GeometryError, ExprError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR

    _emit(report, args)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
