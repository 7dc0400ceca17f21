"""Command-line front end: exact counts, limit-shape export, asymptotic
reports, and the cube problem for tabulated tensions."""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import counting, shapes, wulff
from .entropy import ETA_SKYSCRAPER, ETA_YOUNG, mollify, tabulated_tension

FORMATS = {
    "shape": {"young": ("csv", "svg"), "skyscraper": ("csv", "obj")},
    "verify": ("csv", "json"),
    "wulff": ("csv", "json"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("%s: error: %s" % (self.prog, message))


def _real(x: float) -> str:
    return "%.12g" % x


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    kind: Optional[str] = None
    n: Optional[int] = None
    ns: tuple = ()
    samples: int = 4096
    window: float = wulff.DEFAULT_WINDOW
    format: str = "csv"
    output_path: str = "-"
    mollify_delta: float = 0.0
    scaled: bool = False
    eta_table: Optional[str] = None
    dim: Optional[int] = None
    volume: Optional[float] = None
    cube_n: Optional[float] = None


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wulffcount", description=__doc__)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    kinds = list(counting.KINDS)

    c = sub.add_parser("count", help="print an exact partition or plane-partition count")
    c.add_argument("--kind", required=True, choices=kinds)
    c.add_argument("--n", required=True, type=int)

    s = sub.add_parser("shape", help="export a closed-form limit shape")
    s.add_argument("--kind", required=True, choices=kinds)
    s.add_argument("--scaled", action="store_true", help="unit area / unit volume normalization")
    s.add_argument("--samples", type=int, default=64,
                   help="young: number of curve points; skyscraper: grid subdivisions per simplex edge")
    s.add_argument("--format", required=True, choices=["csv", "svg", "obj"])
    s.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")

    v = sub.add_parser("verify", help="compare exact log-counts with the leading exponent")
    v.add_argument("--kind", required=True, choices=kinds)
    v.add_argument("--ns", required=True, help="comma-separated list of N")
    v.add_argument("--format", default="csv", choices=["csv", "json"])
    v.add_argument("-o", "--output", default="-")

    w = sub.add_parser("wulff", help="solve the cube problem for a tabulated tension")
    w.add_argument("--eta-table", required=True, help="CSV with header n1,n2[,n3],value")
    w.add_argument("--dim", required=True, type=int, choices=[1, 2])
    w.add_argument("--volume", required=True, type=float)
    w.add_argument("--cube-n", required=True, type=float)
    w.add_argument("--samples", type=int, default=4096)
    w.add_argument("--window", type=float, default=wulff.DEFAULT_WINDOW)
    w.add_argument("--mollify-delta", type=float, default=0.0)
    w.add_argument("--format", default="csv", choices=["csv", "json"])
    w.add_argument("-o", "--output", default="-")
    return p


def _config(argv: List[str]) -> RunConfig:
    a = _parser().parse_args(argv)
    sc = a.subcommand
    if sc == "count":
        if a.n < 0:
            raise UsageError("--n must be nonnegative")
        return RunConfig(sc, kind=a.kind, n=a.n)
    if sc == "shape":
        if a.format not in FORMATS["shape"][a.kind]:
            raise UsageError("format %s is not available for %s shapes" % (a.format, a.kind))
        if a.samples < 1 or (a.kind == "skyscraper" and a.samples < 3):
            raise UsageError("--samples is too small")
        return RunConfig(sc, kind=a.kind, samples=a.samples, format=a.format,
                         output_path=a.output, scaled=a.scaled)
    if sc == "verify":
        try:
            ns = tuple(int(x) for x in a.ns.split(",") if x.strip())
        except ValueError:
            raise UsageError("--ns must be a comma-separated list of integers")
        if not ns:
            raise UsageError("--ns must not be empty")
        if min(ns) < 1:
            raise UsageError("--ns entries must be positive")
        return RunConfig(sc, kind=a.kind, ns=ns, format=a.format, output_path=a.output)
    if a.mollify_delta < 0:
        raise UsageError("--mollify-delta must be nonnegative")
    if a.samples < 16:
        raise UsageError("--samples must be at least 16")
    return RunConfig(sc, samples=a.samples, window=a.window, format=a.format, output_path=a.output,
                     mollify_delta=a.mollify_delta, eta_table=a.eta_table, dim=a.dim,
                     volume=a.volume, cube_n=a.cube_n)


# ----------------------------------------------------------------------------
# renderers (return text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_real(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def _young_points(cfg):
    M = cfg.samples
    t = np.arange(1, M + 1) / (M + 1.0)
    P = shapes.vershik_point(t, cfg.scaled)
    nrm = np.column_stack([t, 1.0 - t])
    nrm /= np.linalg.norm(nrm, axis=1)[:, None]
    return P, nrm


def _svg(P) -> str:
    ext = float(P.max()) if len(P) else 1.0
    s = 1000.0 / ext
    pts = ["%.4f %.4f" % (x * s, 1000.0 - y * s) for x, y in P]
    d = "M " + " L ".join(pts)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 1000 1000" '
        'width="1000" height="1000">\n'
        '<path d="%s" fill="none" stroke="black" stroke-width="2"/>\n'
        "</svg>\n" % d
    )


def _shape_text(cfg) -> str:
    if cfg.kind == "young":
        P, nrm = _young_points(cfg)
        if cfg.format == "svg":
            return _svg(P)
        vals = ETA_YOUNG(nrm)
        rows = [(float(p[0]), float(p[1]), float(n[0]), float(n[1]), float(v)) for p, n, v in zip(P, nrm, vals)]
        return _csv_text(["x", "y", "n1", "n2", "value"], rows)
    X, F, Q = shapes.cerf_kenyon_mesh(cfg.samples, cfg.scaled)
    if cfg.format == "obj":
        lines = ["v %s %s %s" % tuple(_real(float(c)) for c in x) for x in X]
        lines += ["f %d %d %d" % tuple(int(i) + 1 for i in f) for f in F]
        return "\n".join(lines) + "\n"
    nrm = np.array([shapes.facet_densities(q) for q in Q]).reshape(-1, 3)
    nrm /= np.linalg.norm(nrm, axis=1)[:, None]
    vals = ETA_SKYSCRAPER(nrm)
    rows = [tuple(float(c) for c in x) + tuple(float(c) for c in n) + (float(v),) for x, n, v in zip(X, nrm, vals)]
    return _csv_text(["x", "y", "z", "n1", "n2", "n3", "value"], rows)


def _verify_text(cfg) -> str:
    table = counting.count_table(cfg.kind, max(cfg.ns))
    rep = counting.asymptotic_report(cfg.kind, cfg.ns, table)
    if cfg.format == "json":
        obj = {
            "kind": rep.kind,
            "rows": [
                {"N": r.N, "log_count": float(_real(r.log_count)), "predicted": float(_real(r.predicted)),
                 "ratio": float(_real(r.ratio))}
                for r in rep.rows
            ],
        }
        return json.dumps(obj) + "\n"
    return _csv_text(["N", "log_count", "predicted", "ratio"],
                     [(r.N, r.log_count, r.predicted, r.ratio) for r in rep.rows])


def read_eta_table(path: str, dim: int):
    """Read a CSV with header n1,n2[,n3],value; extra columns are ignored."""
    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.DictReader(fh)
        names = ["n%d" % (k + 1) for k in range(dim + 1)]
        if rd.fieldnames is None or any(c not in rd.fieldnames for c in names + ["value"]):
            raise ValueError("eta table needs columns %s,value" % ",".join(names))
        D, y = [], []
        for row in rd:
            D.append([float(row[c]) for c in names])
            y.append(float(row["value"]))
    if not D:
        raise ValueError("eta table is empty")
    return tabulated_tension(np.array(D), np.array(y), dim)


def _wulff_text(cfg) -> str:
    eta = read_eta_table(cfg.eta_table, cfg.dim)
    if cfg.mollify_delta > 0:
        eta = mollify(eta, cfg.mollify_delta)
    prob = wulff.CubeProblem(cfg.cube_n, cfg.volume, eta)
    G = wulff.build_inner_shape(eta, cfg.samples, cfg.window)
    if np.any(eta(G.facet_normals) > 0):
        lam = wulff.solve_dilatation(prob, shape=G)
    else:
        lam = float("nan")
    shape = wulff.scaled_maximizer(prob, cfg.samples, cfg.window)
    fv = wulff.functional_value(eta, shape)
    vol = wulff.enclosed_volume(shape)
    res = wulff.duality_residual(eta, cfg.cube_n, shape)
    if cfg.format == "json":
        obj = {"lambda": float(_real(lam)) if math.isfinite(lam) else None,
               "functional": float(_real(fv)), "volume": float(_real(vol)),
               "duality_residual": float(_real(res))}
        return json.dumps(obj) + "\n"
    return _csv_text(["lambda", "functional", "volume", "duality_residual"], [(lam, fv, vol, res)])


def _emit(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns 0 on success, 1 on runtime failure, 2 on a usage
    error."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = _config(argv)
    except UsageError as e:
        sys.stderr.write(_parser().format_usage())
        sys.stderr.write(str(e) + "\n")
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)
    try:
        if cfg.subcommand == "count":
            table = counting.count_table(cfg.kind, cfg.n)
            _emit("%d\n" % table[cfg.n], "-")
            return 0
        if cfg.subcommand == "shape":
            text = _shape_text(cfg)
        elif cfg.subcommand == "verify":
            text = _verify_text(cfg)
        else:
            text = _wulff_text(cfg)
        _emit(text, cfg.output_path)
        return 0
    except (ValueError, ArithmeticError, IndexError, OSError) as e:
        sys.stderr.write("wulffcount: error: %s\n" % e)
        return 1


def main():
    sys.exit(run())
