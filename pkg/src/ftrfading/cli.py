"""Command-line front end: statistic sweeps, figure presets and self tests.

Thresholds and SINR axes may be given in dB here; everything below this
module works in linear units.
"""

import argparse
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import ftr as F
from . import mc as MC
from . import outage as O
from .models import FtrParams
from .quad import DEFAULT_SPEC, QuadSpec, integrate

STATISTICS = ("pdf", "cdf", "mgf", "gmgf", "moments", "imgf", "igmgf", "outage_a", "outage_b")
SPACINGS = ("linear", "log", "dB")
AXES = {
    "pdf": ("x",),
    "cdf": ("x",),
    "mgf": ("s",),
    "gmgf": ("s",),
    "moments": ("n",),
    "imgf": ("s", "z"),
    "igmgf": ("s", "lam"),
    "outage_a": ("sinr", "r_th"),
    "outage_b": ("r_th_hat", "gamma_bar"),
}
DEFAULT_AXIS = {
    "pdf": (0.0, 5.0, 51, "linear"),
    "cdf": (0.0, 5.0, 51, "linear"),
    "mgf": (-5.0, 0.0, 21, "linear"),
    "gmgf": (-5.0, 0.0, 21, "linear"),
    "moments": (0.0, 4.0, 5, "linear"),
    "imgf": (-5.0, 0.0, 21, "linear"),
    "igmgf": (-5.0, 0.0, 21, "linear"),
    "outage_a": (0.0, 30.0, 13, "dB"),
    "outage_b": (-10.0, 10.0, 21, "dB"),
}
# axes whose values are powers or power ratios; only these may use dB
POWER_AXES = {"sinr", "r_th", "r_th_hat", "gamma_bar"}
SIGMA_BOUND = 3.0


class UsageError(ValueError):
    pass


def db_to_linear(v):
    return 10.0 ** (np.asarray(v, dtype=float) / 10.0)


def linear_to_db(v):
    return 10.0 * np.log10(v)


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.points < 2:
            raise UsageError("an axis needs at least 2 points")
        if not self.start < self.stop:
            raise UsageError("axis start must be below stop")
        if self.spacing not in SPACINGS:
            raise UsageError(f"spacing must be one of {SPACINGS}")
        if self.spacing == "dB" and self.name not in POWER_AXES:
            raise UsageError(f"dB spacing is only meaningful for {sorted(POWER_AXES)}")
        if self.spacing == "log" and self.start <= 0:
            raise UsageError("log spacing needs a positive start")

    def values(self):
        """(axis values as written, linear values)"""
        if self.name == "n":
            shown = np.arange(int(math.ceil(self.start)), int(math.floor(self.stop)) + 1, dtype=float)
            return shown, shown
        if self.spacing == "log":
            shown = np.geomspace(self.start, self.stop, self.points)
        else:
            shown = np.linspace(self.start, self.stop, self.points)
        lin = db_to_linear(shown) if self.spacing == "dB" else shown
        return shown, lin

    @property
    def column(self):
        return f"{self.name}_db" if self.spacing == "dB" else self.name


@dataclass(frozen=True)
class SweepRequest:
    statistic: str
    params: FtrParams
    axis: Axis
    scenario: object = None
    validate: bool = False
    mc: MC.McConfig = MC.McConfig(100_000, 0)
    options: dict = field(default_factory=dict)
    spec: QuadSpec = DEFAULT_SPEC
    workers: int = 1


@dataclass
class SweepResult:
    columns: list
    rows: list
    ok: bool


# ------------------------------------------------------------ point evaluation


def _probability_check(analytic, est, n):
    sigma = math.sqrt(max(analytic * (1.0 - analytic), 0.0) / n)
    return abs(est - analytic) <= SIGMA_BOUND * sigma + 1e-12


def _mean_check(analytic, est, stderr):
    return abs(est - analytic) <= SIGMA_BOUND * stderr + 1e-12 * max(1.0, abs(analytic))


def _snr_probability(p, cfg, indicator):
    def count(rng, n):
        return np.count_nonzero(indicator(MC.draw_snr(p, rng, n)))

    return MC.mc_probability(count, cfg)


def _evaluate_point(req, value):
    """Return (analytic, mc, mc_stderr, ok) for one axis value (linear)."""
    stat, p, opt, spec, cfg = req.statistic, req.params, req.options, req.spec, req.mc
    name = req.axis.name
    mc_val = stderr = None
    ok = True

    if stat == "pdf":
        analytic = F.ftr_pdf(value, p, spec)
        if req.validate:
            shown, _ = req.axis.values()
            h = (req.axis.stop - req.axis.start) / (req.axis.points - 1)
            lo, hi = max(0.0, value - 0.5 * h), value + 0.5 * h
            width = hi - lo
            prob = integrate(lambda t: F.ftr_pdf(t, p, spec), lo, hi, spec)
            est, _ = _snr_probability(p, cfg, lambda g: (g > lo) & (g <= hi))
            mc_val = est / width
            stderr = math.sqrt(prob * (1.0 - prob) / cfg.samples) / width
            ok = _probability_check(prob, est, cfg.samples)
        return analytic, mc_val, stderr, ok

    if stat == "cdf":
        analytic = F.ftr_cdf(value, p, spec)
        if req.validate:
            mc_val, _ = _snr_probability(p, cfg, lambda g: g <= value)
            stderr = math.sqrt(analytic * (1.0 - analytic) / cfg.samples)
            ok = _probability_check(analytic, mc_val, cfg.samples)
        return analytic, mc_val, stderr, ok

    if stat in ("outage_a", "outage_b"):
        sc = req.scenario
        if stat == "outage_a":
            if name == "sinr":
                w = value * (sc.l_interferers * sc.p_i + sc.n0)
                sc = replace(sc, channel=sc.channel.with_mean(w))
            else:
                sc = replace(sc, r_th=value)
            analytic = O.outage_a(sc, spec)
            runner = MC.mc_outage_a
        else:
            if name == "r_th_hat":
                sc = replace(sc, r_th_hat=value)
            else:
                sc = replace(sc, channel=sc.channel.with_mean(value))
            analytic = O.outage_b(sc)
            runner = MC.mc_outage_b
        if req.validate:
            mc_val, _ = runner(sc, cfg)
            stderr = math.sqrt(analytic * (1.0 - analytic) / cfg.samples)
            ok = _probability_check(analytic, mc_val, cfg.samples)
        return analytic, mc_val, stderr, ok

    # expectation-type statistics
    n = int(opt.get("n", 1))
    if stat == "moments":
        n = int(value)
        analytic = F.ftr_moment(n, p)
        fn = lambda g: g**n
    elif stat == "mgf":
        s = value
        analytic = F.ftr_mgf(s, p)
        fn = lambda g: np.exp(s * g)
    elif stat == "gmgf":
        s = value
        analytic = F.ftr_gmgf(n, s, p)
        fn = lambda g: g**n * np.exp(s * g)
    elif stat == "imgf":
        s, z = (value, float(opt.get("z", 1.0))) if name == "s" else (float(opt.get("s", -1.0)), value)
        analytic = F.ftr_imgf_lower(s, z, p, spec)
        fn = lambda g: np.exp(s * g) * (g <= z)
    elif stat == "igmgf":
        s, lam = (value, float(opt.get("lam", 1.0))) if name == "s" else (float(opt.get("s", -1.0)), value)
        analytic = F.ftr_igmgf(n, s, lam, p, spec)
        fn = lambda g: g**n * np.exp(s * g) * (g > lam)
    else:
        raise UsageError(f"unknown statistic {stat!r}")
    if req.validate:
        mc_val, stderr = MC.mc_expectation(p, fn, cfg)
        ok = _mean_check(analytic, mc_val, stderr)
    return analytic, mc_val, stderr, ok


def run_sweep(req: SweepRequest) -> SweepResult:
    """Evaluate the statistic at every axis point (in axis order)."""
    if req.statistic not in STATISTICS:
        raise UsageError(f"unknown statistic {req.statistic!r}")
    if req.axis.name not in AXES[req.statistic]:
        raise UsageError(f"{req.statistic} sweeps over one of {AXES[req.statistic]}, not {req.axis.name!r}")
    if req.statistic == "igmgf" and not req.params.m_is_integer:
        raise UsageError("igmgf needs an integer m")
    if req.statistic in ("outage_a", "outage_b") and req.scenario is None:
        raise UsageError(f"{req.statistic} needs a scenario")
    shown, lin = req.axis.values()
    if req.workers > 1:
        with ThreadPoolExecutor(max_workers=req.workers) as pool:
            results = list(pool.map(lambda v: _evaluate_point(req, float(v)), lin))
    else:
        results = [_evaluate_point(req, float(v)) for v in lin]
    columns = [req.axis.column, req.statistic]
    if req.validate:
        columns += ["mc", "mc_stderr", "within_3sigma"]
    rows = []
    for x, (a, m_, se, ok) in zip(shown, results):
        row = [float(x), a]
        if req.validate:
            row += [m_, se, int(ok)]
        rows.append(row)
    return SweepResult(columns, rows, all(r[3] for r in results))


# ------------------------------------------------------------ output


def fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def write_csv(stream, columns, rows):
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


# ------------------------------------------------------------ figures


@dataclass
class Series:
    label: str
    x: list
    analytic: list
    mc: list = None
    stderr: list = None


FIG4_CURVES = ((1, 10.0, 0.6), (2, 10.0, 0.6), (3, 10.0, 0.6), (2, 15.0, 0.6), (2, 10.0, 0.2))
FIG5_THRESHOLDS = (6.0, 8.0, 10.0)
FIG2_MS = (0.5, 1.0, 1.5, 2.5)
FIG3_CASES = ((1, 1), (2, 1), (4, 1), (1, 2), (2, 2), (4, 2))
FIG4_L, FIG4_PI = 2, 0.01
FIG_B_K, FIG_B_DELTA, FIG_B_PI = 10.0, 0.6, 1.0
# Mean per-branch power relative to one interferer in the MRC figures.
FIG_B_W_OVER_PI_DB = 10.0
FIG1_PARAMS = dict(gamma_bar=1.0, k=10.0, delta=0.5)


def _fig1(samples, seed):
    x = np.linspace(0.0, 4.0, 81)
    h = x[1] - x[0]
    out = []
    for m in (1.5, 3.0):
        p = FtrParams(m=m, **FIG1_PARAMS)
        snr = np.concatenate(list(MC.sample_snr(p, MC.McConfig(samples, seed))))
        edges = np.concatenate(([0.0], 0.5 * (x[1:] + x[:-1]), [x[-1] + 0.5 * h]))
        counts, _ = np.histogram(snr, bins=edges)
        widths = np.diff(edges)
        dens = counts / (samples * widths)
        probs = [integrate(lambda t: F.ftr_pdf(t, p), a, b) for a, b in zip(edges[:-1], edges[1:])]
        se = [math.sqrt(q * (1 - q) / samples) / w for q, w in zip(probs, widths)]
        out.append(Series(f"RS path m={m:g}", x, list(F.ftr_pdf(x, p)), list(dens), se))
    p3 = FtrParams(m=3.0, **FIG1_PARAMS)
    out.append(Series("Nakagami path m=3", x, list(F.ftr_pdf_integer(x, p3))))
    return out, "x", "pdf", False


def _outage_a_series(label, ch, r_th, sinr_db, samples, seed):
    n0 = 1.0 - FIG4_L * FIG4_PI
    an, mcv, se = [], [], []
    for v in db_to_linear(sinr_db):
        sc = O.ScenarioA(ch.with_mean(v * (FIG4_L * FIG4_PI + n0)), FIG4_L, FIG4_PI, n0, r_th)
        a = O.outage_a(sc)
        est, _ = MC.mc_outage_a(sc, MC.McConfig(samples, seed))
        an.append(a)
        mcv.append(est)
        se.append(math.sqrt(a * (1 - a) / samples))
    return Series(label, list(sinr_db), an, mcv, se)


def _fig4(samples, seed):
    sinr_db = np.linspace(0.0, 30.0, 13)
    out = [
        _outage_a_series(f"m={m} K={k:g} delta={d:g}", FtrParams(1.0, m, k, d), 1.0, sinr_db, samples, seed)
        for m, k, d in FIG4_CURVES
    ]
    return out, "normalized SINR (dB)", "outage probability", True


def _fig5(samples, seed):
    sinr_db = np.linspace(0.0, 40.0, 17)
    ch = FtrParams(1.0, 2, 10.0, 0.6)
    out = [_outage_a_series(f"R_th={r:g}", ch, r, sinr_db, samples, seed) for r in FIG5_THRESHOLDS]
    return out, "normalized SINR (dB)", "outage probability", True


def _outage_b_series(label, ch, n_ant, big_l, r_db, samples, seed):
    an, mcv, se = [], [], []
    for r in db_to_linear(r_db):
        sc = O.ScenarioB(ch, n_ant, big_l, FIG_B_PI, float(r))
        a = O.outage_b(sc)
        est, _ = MC.mc_outage_b(sc, MC.McConfig(samples, seed))
        an.append(a)
        mcv.append(est)
        se.append(math.sqrt(a * (1 - a) / samples))
    return Series(label, list(r_db), an, mcv, se)


def fig_b_mean():
    return FIG_B_PI * float(db_to_linear(FIG_B_W_OVER_PI_DB))


def _fig2(samples, seed):
    r_db = np.linspace(-10.0, 10.0, 21)
    w = fig_b_mean()
    out = [
        _outage_b_series(f"m={m:g}", FtrParams(w, m, FIG_B_K, FIG_B_DELTA), 2, 1, r_db, samples, seed)
        for m in FIG2_MS
    ]
    return out, "SIR threshold (dB)", "outage probability", True


def _fig3(samples, seed):
    r_db = np.linspace(-10.0, 10.0, 21)
    ch = FtrParams(fig_b_mean(), 2.5, FIG_B_K, FIG_B_DELTA)
    out = [_outage_b_series(f"N={n} L={l}", ch, n, l, r_db, samples, seed) for n, l in FIG3_CASES]
    return out, "SIR threshold (dB)", "outage probability", True


FIGURES = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}


def figure_series(name, samples=100_000, seed=42):
    if name not in FIGURES:
        raise UsageError(f"unknown figure {name!r}; expected one of {sorted(FIGURES)}")
    return FIGURES[name](samples, seed)


def figure_csv(series):
    buf = io.StringIO()
    rows = []
    for s in series:
        for i, x in enumerate(s.x):
            mcv = s.mc[i] if s.mc is not None else None
            se = s.stderr[i] if s.stderr is not None else None
            rows.append([s.label, x, s.analytic[i], mcv, se])
    write_csv(buf, ["series", "x", "analytic", "mc", "mc_stderr"], rows)
    return buf.getvalue()


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def figure_svg(series, xlabel, ylabel, log_y, title=""):
    """Minimal SVG line plot: analytic polylines, MC markers, legend."""
    w, h = 720, 480
    left, right, top, bottom = 80, 190, 40, 60
    pw, ph = w - left - right, h - top - bottom
    xs = [x for s in series for x in s.x]
    ys = [y for s in series for y in s.analytic] + [y for s in series if s.mc for y in s.mc]
    x0, x1 = min(xs), max(xs)
    if log_y:
        pos = [y for y in ys if y > 0]
        lo = max(min(pos), 1e-8) if pos else 1e-8
        y0, y1 = math.floor(math.log10(lo)), math.ceil(math.log10(max(pos) if pos else 1.0))
        if y1 <= y0:
            y1 = y0 + 1
        ty = lambda y: None if y <= 0 or math.log10(y) < y0 else top + ph * (y1 - math.log10(y)) / (y1 - y0)
    else:
        y0, y1 = 0.0, max(ys) * 1.05 if max(ys) > 0 else 1.0
        ty = lambda y: top + ph * (y1 - y) / (y1 - y0)
    tx = lambda x: left + pw * (x - x0) / (x1 - x0)
    o = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for i in range(6):
        xv = x0 + (x1 - x0) * i / 5
        X = tx(xv)
        o.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        o.append(f'<text x="{X:.2f}" y="{top + ph + 20}" font-size="12" text-anchor="middle">{xv:g}</text>')
    if log_y:
        ticks = [(10.0**e, f"1e{e}") for e in range(int(y0), int(y1) + 1)]
    else:
        ticks = [(y0 + (y1 - y0) * i / 5, f"{y0 + (y1 - y0) * i / 5:.3g}") for i in range(6)]
    for yv, lab in ticks:
        Y = ty(yv)
        o.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        o.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" font-size="12" text-anchor="end">{lab}</text>')
    o.append(f'<text x="{left + pw / 2}" y="{h - 15}" font-size="14" text-anchor="middle">{xlabel}</text>')
    o.append(
        f'<text x="20" y="{top + ph / 2}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 20 {top + ph / 2})">{ylabel}</text>'
    )
    if title:
        o.append(f'<text x="{left + pw / 2}" y="24" font-size="15" text-anchor="middle">{title}</text>')
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = [(tx(x), ty(y)) for x, y in zip(s.x, s.analytic)]
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts if b is not None)
        o.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if s.mc is not None:
            for x, y in zip(s.x, s.mc):
                Y = ty(y)
                if Y is not None:
                    o.append(f'<circle cx="{tx(x):.2f}" cy="{Y:.2f}" r="2.5" fill="none" stroke="{color}"/>')
        ly = top + 15 + 18 * i
        o.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 35}" y2="{ly}" stroke="{color}" stroke-width="1.5"/>')
        o.append(f'<text x="{left + pw + 40}" y="{ly + 4}" font-size="12">{s.label}</text>')
    if any(s.mc is not None for s in series):
        ly = top + 15 + 18 * len(series)
        o.append(f'<circle cx="{left + pw + 22}" cy="{ly}" r="2.5" fill="none" stroke="black"/>')
        o.append(f'<text x="{left + pw + 40}" y="{ly + 4}" font-size="12">Monte Carlo</text>')
    o.append("</svg>")
    return "\n".join(o) + "\n"


def figure(name, out_dir, samples=100_000, seed=42):
    """Write <name>.csv and <name>.svg into out_dir; returns the two paths."""
    series, xlabel, ylabel, log_y = figure_series(name, samples, seed)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{name}.csv")
    svg_path = os.path.join(out_dir, f"{name}.svg")
    with open(csv_path, "w", newline="", encoding="ascii") as fh:
        fh.write(figure_csv(series))
    with open(svg_path, "w", encoding="ascii") as fh:
        fh.write(figure_svg(series, xlabel, ylabel, log_y, name))
    return csv_path, svg_path


# ------------------------------------------------------------ self test


def _max_rel(pairs):
    return max(abs(a - b) / max(abs(b), 1e-300) for a, b in pairs)


def selftest(level="fast", stream=None):
    """Run identity, dual-path and Monte Carlo checks; returns True if all pass."""
    stream = stream or sys.stdout
    full = level == "full"
    samples = 10_000_000 if full else 100_000
    if full:
        grid = [
            (FtrParams(1.0, m, k, d), s)
            for m in (0.7, 1.0, 2.5)
            for k in (0.0, 3.0, 15.0)
            for d in (0.0, 0.5, 1.0)
            for s in (-0.1, -1.0, -10.0)
        ]
    else:
        grid = [(FtrParams(1.0, m, 8.0, 0.7), s) for m in (0.7, 2.5) for s in (-0.1, -10.0)]
    p_int = FtrParams(1.0, 3, 10.0, 0.5)
    x = np.linspace(0.0, 4.0, 40 if full else 10)
    checks = []

    def add(name, value, bound):
        checks.append((name, value, bound, bool(value <= bound)))

    add("MGF closed form vs theta integral (max rel)",
        _max_rel([(F.ftr_mgf(s, p), F.ftr_mgf_theta(s, p)) for p, s in grid]), 1e-10)
    add("GMGF n=0 vs MGF (max rel)",
        _max_rel([(F.ftr_gmgf(0, s, p), F.ftr_mgf(s, p)) for p, s in grid]), 1e-9)
    add("first moment vs mean (max rel)",
        _max_rel([(F.ftr_moment(1, p), p.gamma_bar) for p, _ in grid]), 1e-9)
    rs, nk = F.ftr_pdf(x, p_int), F.ftr_pdf_integer(x, p_int)
    add("RS vs Nakagami density (max abs)", float(np.max(np.abs(rs - nk))), 1e-9)
    p2 = FtrParams(1.0, 2.0, 5.0, 0.9)
    add("CDF quadrature vs Phi2 path (abs)", abs(F.ftr_cdf(1.0, p2) - F.ftr_cdf(1.0, p2, path="phi2")), 1e-6)
    p5 = FtrParams(1.0, 2.2, 3.0, 0.4)
    add("lower + upper IMGF vs MGF (abs)",
        abs(F.ftr_imgf_lower(-0.2, 1.5, p5) + F.ftr_imgf_upper(-0.2, 1.5, p5) - F.ftr_mgf(-0.2, p5)), 1e-12)
    add("IGMGF(0, s, 0) vs MGF (abs)", abs(F.ftr_igmgf(0, -0.5, 0.0, p_int) - F.ftr_mgf(-0.5, p_int)), 1e-9)

    cfg = MC.McConfig(samples, 7)
    pm = FtrParams(2.0, 1.5, 10.0, 0.5)
    est, se = MC.mc_expectation(pm, lambda g: g, cfg)
    add("Monte Carlo mean (sigmas from analytic)", abs(est - F.ftr_moment(1, pm)) / se, SIGMA_BOUND)
    sa = O.ScenarioA(FtrParams(10.0, 2, 10.0, 0.6), 2, 0.01, 0.98, 1.0)
    a = O.outage_a(sa)
    est, _ = MC.mc_outage_a(sa, cfg)
    add("scenario A analytic vs Monte Carlo (sigmas)", abs(est - a) / math.sqrt(a * (1 - a) / samples), SIGMA_BOUND)
    sb = O.ScenarioB(FtrParams(10.0, 1.0, 10.0, 0.6), 2, 1, 1.0, 1.0)
    b = O.outage_b(sb)
    est, _ = MC.mc_outage_b(sb, cfg)
    add("scenario B analytic vs Monte Carlo (sigmas)", abs(est - b) / math.sqrt(b * (1 - b) / samples), SIGMA_BOUND)

    width = max(len(c[0]) for c in checks)
    stream.write(f"selftest level={level} samples={samples}\n")
    for name, value, bound, ok in checks:
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {value:.3e}  (bound {bound:g})\n")
    passed = all(c[3] for c in checks)
    stream.write(f"{sum(c[3] for c in checks)}/{len(checks)} checks passed\n")
    return passed


# ------------------------------------------------------------ argument parsing

COMMANDS = {
    "pdf": "pdf",
    "cdf": "cdf",
    "mgf": "mgf",
    "gmgf": "gmgf",
    "moments": "moments",
    "imgf": "imgf",
    "igmgf": "igmgf",
    "outage-a": "outage_a",
    "outage-b": "outage_b",
}
BUILTIN = dict(
    gamma_bar=1.0, m=2.0, k=10.0, delta=0.5, seed=0, samples=100_000, tol=1e-12,
    L=1, p_i=1.0, n0=1.0, r_th=1.0, n_antennas=1, n=1, z=1.0, lam=1.0, s=-1.0,
    workers=1, batch=MC.BLOCK,
)


def read_config(path):
    """key=value lines; '#' starts a comment; dashes and underscores are equivalent."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, val = (t.strip() for t in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _add_common(sp):
    g = sp.add_argument_group("channel")
    g.add_argument("--gamma-bar", type=float, help="mean SNR / mean signal power (linear)")
    g.add_argument("--m", type=float)
    g.add_argument("--k", type=float)
    g.add_argument("--delta", type=float)
    g = sp.add_argument_group("run")
    g.add_argument("--seed", type=int)
    g.add_argument("--samples", type=int, help="Monte Carlo sample count")
    g.add_argument("--batch", type=int, help="Monte Carlo draws per worker task")
    g.add_argument("--workers", type=int)
    g.add_argument("--out", help="output path (default: stdout)")
    g.add_argument("--validate", action="store_true", default=None, help="attach Monte Carlo columns")
    g.add_argument("--tol", type=float, help="relative quadrature tolerance")
    g.add_argument("--config", help="key=value file; command-line flags take precedence")


def _add_sweep(sp, stat):
    _add_common(sp)
    g = sp.add_argument_group("axis")
    g.add_argument("--axis", choices=AXES[stat])
    g.add_argument("--start", type=float)
    g.add_argument("--stop", type=float)
    g.add_argument("--points", type=int)
    g.add_argument("--spacing", choices=SPACINGS)
    g = sp.add_argument_group("statistic")
    if stat in ("gmgf", "igmgf"):
        g.add_argument("--n", type=int, help="power of x")
    if stat == "imgf":
        g.add_argument("--z", type=float, help="upper integration limit")
        g.add_argument("--s", type=float, help="fixed s when sweeping z")
    if stat == "igmgf":
        g.add_argument("--lam", type=float, help="lower integration limit")
        g.add_argument("--s", type=float, help="fixed s when sweeping lam")
    if stat in ("outage_a", "outage_b"):
        g = sp.add_argument_group("scenario")
        g.add_argument("--L", type=int, dest="L", help="number of interferers")
        g.add_argument("--p-i", type=float, help="mean power per interferer")
        if stat == "outage_a":
            g.add_argument("--n0", type=float, help="noise power")
            g.add_argument("--r-th", type=float, help="SINR threshold (linear)")
        else:
            g.add_argument("--n-antennas", type=int)
            g.add_argument("--r-th", type=float, help="SIR threshold (linear)")
        g.add_argument("--r-th-db", type=float, help="threshold in dB (overrides --r-th)")


def build_parser():
    ap = argparse.ArgumentParser(prog="ftr", description="Fluctuating two-ray fading statistics.")
    sub = ap.add_subparsers(dest="command", required=True)
    for cmd, stat in COMMANDS.items():
        _add_sweep(sub.add_parser(cmd, help=f"sweep the {stat.replace('_', ' ')}"), stat)
    fp = sub.add_parser("figure", help="write <name>.csv and <name>.svg")
    fp.add_argument("name", choices=sorted(FIGURES))
    fp.add_argument("--out", help="output directory (default: .)")
    fp.add_argument("--seed", type=int, default=42)
    fp.add_argument("--samples", type=int, default=100_000)
    st = sub.add_parser("selftest", help="run the built-in validation suite")
    st.add_argument("level", nargs="?", choices=("fast", "full"), default="fast")
    return ap


def _settings(args):
    """Merge built-in defaults, the config file and explicit flags."""
    merged = dict(BUILTIN)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key, val in vars(args).items():
        if val is not None:
            merged[key] = val
    return merged


def _as_bool(v):
    if isinstance(v, bool):
        return v
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def request_from_args(args):
    stat = COMMANDS[args.command]
    cfg = _settings(args)
    num = lambda k: float(cfg[k])
    params = FtrParams(num("gamma_bar"), num("m"), num("k"), num("delta"))
    start, stop, points, spacing = DEFAULT_AXIS[stat]
    axis = Axis(
        str(cfg.get("axis", AXES[stat][0])),
        float(cfg.get("start", start)),
        float(cfg.get("stop", stop)),
        int(cfg.get("points", points)),
        str(cfg.get("spacing", spacing)),
    )
    threshold = num("r_th")
    if cfg.get("r_th_db") is not None:
        threshold = float(db_to_linear(float(cfg["r_th_db"])))
    scenario = None
    if stat == "outage_a":
        scenario = O.ScenarioA(params, int(cfg["L"]), num("p_i"), num("n0"), threshold)
    elif stat == "outage_b":
        scenario = O.ScenarioB(params, int(cfg["n_antennas"]), int(cfg["L"]), num("p_i"), threshold)
    return SweepRequest(
        statistic=stat,
        params=params,
        axis=axis,
        scenario=scenario,
        validate=_as_bool(cfg.get("validate", False)),
        mc=MC.McConfig(int(cfg["samples"]), int(cfg["seed"]), int(cfg["batch"]), int(cfg["workers"])),
        options={k: cfg[k] for k in ("n", "z", "lam", "s")},
        spec=replace(DEFAULT_SPEC, rel_tol=num("tol")),
        workers=int(cfg["workers"]),
    )


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "selftest":
            return 0 if selftest(args.level) else 1
        if args.command == "figure":
            for path in figure(args.name, args.out or ".", args.samples, args.seed):
                print(path)
            return 0
        req = request_from_args(args)
        result = run_sweep(req)
    except (UsageError, ValueError) as exc:
        ap.error(str(exc))
    if args.out:
        with open(args.out, "w", newline="", encoding="ascii") as fh:
            write_csv(fh, result.columns, result.rows)
    else:
        write_csv(sys.stdout, result.columns, result.rows)
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
