"""Sweep runner: one ResultRow per (n, N), optional oracle, CSV and manifest output."""

import concurrent.futures
import csv
import dataclasses
import functools
import io
import json
import logging
import os
import warnings

import numpy as np

from .. import __version__, _accel, asymptotics, contour, exactprob, variational, weights
from ..errors import BigJumpError
from ..variational import Regime, Thresholds
from .config import rule_values

log = logging.getLogger(__name__)

MANIFEST_SCHEMA = "manifest_v1"


@dataclasses.dataclass
class ResultRow:
    family: str
    params: str
    n: int
    N: float
    regime: str | None = None
    N_star: float | None = None
    N_2star: float | None = None
    x_nr: float | None = None
    eta_n: float | None = None
    t_n: float | None = None
    xi_n: float | None = None
    hess_det: float | None = None
    log_estimate: float | None = None
    log_v_term: float | None = None
    log_h_term: float | None = None
    log_exact: float | None = None
    log_ratio: float | None = None
    diagnostics: str = ""

    @classmethod
    def columns(cls):
        return [f.name for f in dataclasses.fields(cls)]

    @property
    def failed(self):
        return "error=" in self.diagnostics


def fmt(value):
    """Shortest round-trip text for floats, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@functools.lru_cache(maxsize=16)
def build_model(family, params):
    kw = dict(params)
    if family == "geometric":
        return weights.make_geometric(**kw)
    return weights.make_model(family, **kw)


def _params_text(params):
    return ";".join(f"{k}={v!r}" for k, v in params)


def thresholds_from(tol):
    return Thresholds(eps1=tol["eps1"], eps2=tol["eps2"], clt_floor=tol["clt_floor"],
                      degenerate_rel=tol["degenerate_rel"], xnr_delta=tol["xnr_delta"], xnr_K=tol["xnr_K"])


def auto_config(data):
    est, tol = data["estimate"], data["tolerances"]
    forced = Regime(est["force_regime"]) if est["force_regime"] else None
    return asymptotics.AutoConfig(r_threshold=est["r_threshold"], r_max=est["r_max"], force_regime=forced,
                                  thresholds=thresholds_from(tol), large_prefactor=est["large_prefactor"],
                                  saddle=est["saddle"])


def compute_row(data, family, params, n, N):
    """Evaluate one grid point; errors are captured in ``diagnostics``."""
    model = build_model(family, params)
    tol = data["tolerances"]
    model = exactprob.normalized(model, tol["tail_eps"])
    cum = exactprob.cumulants(model)
    # evaluate at the lattice point m = round(n mu + N)
    m = int(round(n * cum.mu + N))
    N_eff = m - n * cum.mu
    row = ResultRow(family, _params_text(params), n, N_eff)
    diag = {"m": m}
    cfg = auto_config(data)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            sc = variational.critical_scales(model, n)
            row.N_star, row.N_2star = sc.N_star, sc.N_2star
        except BigJumpError as exc:
            diag["scales"] = type(exc).__name__
        try:
            r = data["estimate"]["r"]
            est = asymptotics.estimate_auto(model, n, N_eff, cfg, r=None if r == "auto" else r)
            row.regime = est.regime.value
            row.log_estimate, row.log_v_term, row.log_h_term = est.log_value, est.v_term_log, est.h_term_log
            row.x_nr = est.x_nr
            diag["r"] = est.r_used
            if est.saddle is not None:
                row.t_n, row.xi_n, row.hess_det = est.saddle.t_n, est.saddle.xi_n, est.saddle.hess_det
        except BigJumpError as exc:
            diag["error"] = f"{type(exc).__name__}: {exc}"
        try:
            row.eta_n = contour.eta_n(model, n, N_eff)
        except BigJumpError:
            pass
        _, diag["bigjump_diag"] = asymptotics.estimate_bigjump_simple(model, n, N_eff)
        orc = data["oracle"]
        if orc["enabled"]:
            if m > orc["m_max"]:
                diag["oracle"] = f"skipped m>{orc['m_max']}"
            else:
                row.log_exact = exactprob.exact_log_point_prob(model, n, m, method=orc["method"])
                if row.log_estimate is not None:
                    row.log_ratio = row.log_estimate - row.log_exact
    if caught:
        diag["warnings"] = len(caught)
    row.diagnostics = ";".join(f"{k}={fmt(v)}" for k, v in diag.items())
    return row


def grid_points(data):
    family, params = _spec(data)
    model = build_model(family, params)
    pts = []
    for n in data["grid"]["n_list"]:
        scales = functools.partial(variational.critical_scales, model, n)
        for N in rule_values(data["grid"]["N_rule"], n, scales):
            pts.append((family, params, int(n), float(N)))
    return pts


def _spec(data):
    m = data["model"]
    fam = m["family"]
    keys = {"stretched": ("alpha",), "loghazard": ("beta", "b"), "geometric": ("ratio",)}[fam]
    return fam, tuple((k, float(m[k])) for k in keys if k in m)


def _worker(args):
    data, family, params, n, N = args
    return compute_row(data, family, params, n, N)


def run_rows(config, jobs=1):
    data = config.data
    tasks = [(data,) + pt for pt in grid_points(data)]
    if jobs <= 1 or len(tasks) <= 1:
        return [_worker(t) for t in tasks]
    # executor.map keeps submission order, so output is deterministic
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_worker, tasks))


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ResultRow.columns())
    for row in rows:
        w.writerow([fmt(getattr(row, c)) for c in ResultRow.columns()])
    return buf.getvalue()


def manifest(config, rows, outputs):
    return {
        "schema": MANIFEST_SCHEMA,
        "library_version": __version__,
        "config_sha256": config.digest(),
        "config": config.data,
        "tolerances": {**config.tolerances, "contour_rtol": 1e-10, "quadrature_tail_nats": contour.TAIL_NATS,
                       "r_threshold": config["estimate"]["r_threshold"]},
        "accel_backend": _accel.BACKEND,
        "columns": ResultRow.columns(),
        "rows": len(rows),
        "row_errors": sum(r.failed for r in rows),
        "outputs": outputs,
    }


def run_experiment(config, out_dir=None, jobs=1):
    """Write ``<name>.csv`` and ``<name>.manifest.json``; returns (rows, exit code)."""
    out_dir = out_dir or config["output"]["dir"]
    os.makedirs(out_dir, exist_ok=True)
    name = config["output"]["name"]
    rows = run_rows(config, jobs)
    csv_name, man_name = f"{name}.csv", f"{name}.manifest.json"
    with open(os.path.join(out_dir, csv_name), "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))
    with open(os.path.join(out_dir, man_name), "w", encoding="utf-8") as fh:
        json.dump(manifest(config, rows, {"csv": csv_name}), fh, indent=2, sort_keys=True)
        fh.write("\n")
    failed = sum(r.failed for r in rows)
    if failed:
        log.warning("%d of %d rows failed", failed, len(rows))
    return rows, 2 if failed else 0


SCALE_COLUMNS = ["family", "params", "n", "x_star", "N_star", "N_2star", "t_star",
                 "x_star_formula", "N_star_formula", "N_2star_formula", "N_2star_formula_alt",
                 "formula_exact", "rel_dev_x_star", "rel_dev_N_star", "rel_dev_N_2star", "N_star_over_2x_star"]


def scales_report(family, params, n_list):
    """CSV of numeric critical scales next to their closed forms or asymptotes."""
    model = build_model(family, tuple(params))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCALE_COLUMNS)
    for n in n_list:
        sc = variational.critical_scales(model, n)
        try:
            f = variational.scale_formulas(model, n)
            form = (f.x_star, f.N_star, f.N_2star, f.N_2star_alt, f.exact)
            dev = (sc.x_star / f.x_star - 1, sc.N_star / f.N_star - 1, sc.N_2star / f.N_2star - 1)
        except BigJumpError:
            form, dev = (None,) * 5, (None,) * 3
        vals = [family, _params_text(params), n, sc.x_star, sc.N_star, sc.N_2star, sc.t_star,
                *form, *dev, sc.N_star / (2 * sc.x_star)]
        w.writerow([fmt(v) for v in vals])
    return buf.getvalue()

