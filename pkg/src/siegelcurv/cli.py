"""Command-line entry point: ``siegelcurv {analyze,acceptance,siegel,class}``."""
from __future__ import annotations

import argparse
import datetime
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, acceptance, curves, gauss2, quadrics, wolpert_class
from . import curvature as K
from .errors import AmbiguousRank, SiegelCurvError
from .hodge import GramCache, build_frame
from .kernels import BACKEND

EXIT_OK, EXIT_ERROR, EXIT_FLAGGED = 0, 1, 2
log = logging.getLogger("siegelcurv")


def parse_sweep(curve, text, seed):
    """``special``, ``grid:NxM`` or ``path:file`` into chart points."""
    if text == "special":
        return curves.special_points(curve)
    if text.startswith("grid:"):
        n, m = (int(v) for v in text[5:].lower().split("x"))
        bp = np.abs(np.asarray(curve.branch_points)) if curve.branch_points else np.ones(1)
        R = 1.25 * max(1.0, float(bp.max()))
        # half-cell offset keeps the lattice off the symmetric branch loci
        xs = -R + (np.arange(n) + 0.5) * 2 * R / n
        ys = -R + (np.arange(m) + 0.5) * 2 * R / m
        pts = []
        for i, a in enumerate(xs):
            for j, b in enumerate(ys):
                pts.append(curves.point_at(curve, complex(a, b), 0, label=f"G{i}_{j}"))
        return pts
    if text.startswith("path:"):
        pts = []
        for k, line in enumerate(Path(text[5:]).read_text().splitlines()):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p for p in line.replace(",", " ").split()]
            sheet = int(parts[2]) if len(parts) > 2 else 0
            pts.append(curves.point_at(curve, complex(float(parts[0]), float(parts[1])), sheet,
                                       label=f"L{k}"))
        return pts
    raise ValueError(f"unknown sweep {text!r}")


def cache_dir(args):
    return args.cache_dir or os.environ.get("CACHE_DIR")


def _sidecar(out: Path, msg):
    with open(out / "run.log", "a") as fh:
        fh.write(f"{datetime.datetime.now().isoformat()} {msg}\n")


def cmd_analyze(args):
    curve = curves.build_curve(args.curve)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _sidecar(out, f"analyze start curve={curve.hash}")
    cdir = cache_dir(args)
    frame = build_frame(curve, args.tol, GramCache(cdir) if cdir else None)
    flagged = []
    try:
        Q = quadrics.i2_basis(frame, seed=args.seed)
    except AmbiguousRank as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGGED
    if Q.dim != Q.expected_dim:
        flagged.append(f"I2 dimension {Q.dim} != {Q.expected_dim}")
    mu_rank = gauss2.mu2_rank(Q, seed=args.seed + 1, raise_ambiguous=False)
    if mu_rank.ambiguous:
        flagged.append("mu2 rank ambiguous")
    rho = K.rho_injectivity(Q, seed=args.seed + 3)
    if rho.rank != Q.dim or rho.ambiguous:
        flagged.append("rho injectivity not certified")

    points = parse_sweep(curve, args.sweep, args.seed)
    report = K.profile_F(frame, Q, points)
    bad = [r for r in report.rows if not r.flag and r.H > -1 + 1e-6]
    if bad:
        flagged.append(f"{len(bad)} rows violate H <= -1")
    report.config = {
        "curve": curve.spec, "sweep": args.sweep, "tol": args.tol, "seed": args.seed,
        "backend": BACKEND,
    }
    report.certificates.update({
        "gram": frame.report,
        "i2": Q.certificate(),
        "mu2_rank": mu_rank.as_dict(),
        "rho_injectivity": rho.as_dict(),
        "flags": flagged,
    })
    report.write_csv(out / "curvature.csv")
    gauss2.write_profile_csv(out / "mu2_profile.csv",
                             gauss2.profile_rows(Q, [p for p in points if "unsupported_chart" not in p.flags]))
    (out / "report.json").write_text(report.to_json() + "\n")
    valid = [r for r in report.rows if not r.flag]
    print(f"curve {curve.family} genus {curve.genus}  dim I2 {Q.dim}  mu2 rank {mu_rank.rank}"
          f"  rows {len(valid)}/{len(report.rows)}  max H {report.max_H():.12g}")
    _sidecar(out, "analyze done")
    for f in flagged:
        print(f"flag: {f}", file=sys.stderr)
    return EXIT_FLAGGED if flagged else EXIT_OK


def cmd_acceptance(args):
    results = acceptance.run(slow=args.slow, rtol=args.tol, seed=args.seed, cache_dir=cache_dir(args))
    for r in results:
        print(r.line())
    summary = {
        "tool_version": __version__,
        "backend": BACKEND,
        "tol": args.tol,
        "seed": args.seed,
        "slow": args.slow,
        "criteria": [{"id": r.id, "status": r.status, "measured": r.measured} for r in results],
    }
    text = json.dumps(K._floats17(summary), indent=1, sort_keys=True)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "acceptance.json").write_text(text + "\n")
    else:
        print(text)
    if any(not r.passed for r in results):
        return EXIT_ERROR
    return EXIT_FLAGGED if any(r.flagged for r in results) else EXIT_OK


def cmd_siegel(args):
    rng = np.random.default_rng(args.seed)
    vals = np.array([K.siegel_sectional(acceptance.random_symmetric(rng, args.g))
                     for _ in range(args.samples)])
    doc = {"g": args.g, "samples": args.samples, "seed": args.seed,
           "min": float(vals.min()), "max": float(vals.max()),
           "segment": [-1.0, -1.0 / args.g]}
    print(json.dumps(K._floats17(doc), sort_keys=True))
    return EXIT_OK


def cmd_class(args):
    print(wolpert_class.class_constant(args.tol).record())
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="siegelcurv", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol):
        sp.add_argument("--tol", type=float, default=tol)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--cache-dir", default=None)
        sp.add_argument("--out", default=None)

    a = sub.add_parser("analyze", help="Gram, I2, mu2 and the H profile of one curve")
    a.add_argument("--curve", required=True, help="curve spec (JSON)")
    a.add_argument("--sweep", default="special", help="special | grid:NxM | path:FILE")
    common(a, 1e-7)
    a.set_defaults(func=cmd_analyze, out="out")

    c = sub.add_parser("acceptance", help="run criteria A1-A11 (A12 with --slow)")
    c.add_argument("--slow", action="store_true")
    common(c, 1e-7)
    c.set_defaults(func=cmd_acceptance)

    s = sub.add_parser("siegel", help="range scan of the Siegel sectional functional")
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_siegel)

    k = sub.add_parser("class", help="fundamental-domain integral and class constant")
    k.add_argument("--tol", type=float, default=1e-12)
    k.set_defaults(func=cmd_class)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "g", 1) is not None and args.command == "siegel" and args.g < 1:
        print("error: --g must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except SiegelCurvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
