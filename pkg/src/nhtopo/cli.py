"""Command-line harness: typed configs, experiment runners, CSV and manifest output.

Every run computes all of its tables in memory first and only then writes
files, so a failing run leaves no partial output behind.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, dynamics, models, symmetry, topology
from .errors import ComputeError, ConfigParseError, NHTopoError

COMMANDS = ("spectrum", "invariant", "edges", "classify", "disorder", "dynamics", "figure")
SEED_MAX = 2**64 - 1

# parameter name -> type and default, per model kind
MODEL_PARAMS = {
    "nhti": {"t": (float, 1.0), "delta": (float, 0.5), "gamma": (float, 1.0), "L": (int, 50)},
    "majorana": {
        "tL": (float, 1.4),
        "tR": (float, 0.6),
        "Delta": (float, 0.5),
        "mu": (float, 1.0),
        "L": (int, 50),
    },
    "qsh": {
        "t": (float, 1.0),
        "m": (float, -1.0),
        "lam": (float, 0.5),
        "gamma": (float, 0.8),
        "Lx": (int, 30),
        "Ly": (int, 30),
        "ky": (float, 0.0),
    },
    "three_level": {"Omega": (float, 1.0), "gamma1": (float, 0.5), "gamma2": (float, 5.0)},
    "dirac": {"g": (float, 0.0), "m": (float, 1.0), "delta": (float, 0.0)},
}

RUN_KEYS = {
    "command": str,
    "model": str,
    "figure": str,
    "boundary": str,
    "experiment": str,
    "seed": int,
    "grid": int,
    "tol": float,
    "out": str,
}

OPTION_KEYS = {
    "d_values": "floats",
    "realizations": int,
    "times": "floats",
    "ky_points": int,
}


@dataclass
class ExperimentConfig:
    """Fully typed description of one run.

    ``params`` holds only the model parameters; missing ones take the model
    defaults when the run starts.
    """

    command: str
    model: str | None = None
    params: dict = field(default_factory=dict)
    figure: str | None = None
    boundary: str = "open"
    experiment: str | None = None
    seed: int = 0
    grid: int | None = None
    tol: float = 1e-8
    out: str = "."
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigParseError(f"unknown command {self.command!r}", "command")
        if self.model is not None and self.model not in MODEL_PARAMS:
            raise ConfigParseError(f"unknown model {self.model!r}", "model")
        if not (0 <= int(self.seed) <= SEED_MAX):
            raise ConfigParseError("seed must be a 64-bit unsigned integer", "seed")
        allowed = MODEL_PARAMS.get(self.model, {})
        for k in self.params:
            if k not in allowed:
                raise ConfigParseError(f"unknown parameter {k!r} for model {self.model!r}", k)
        for k in self.options:
            if k not in OPTION_KEYS:
                raise ConfigParseError(f"unknown option {k!r}", k)

    def resolved_params(self):
        spec = MODEL_PARAMS[self.model]
        return {k: self.params.get(k, default) for k, (_, default) in spec.items()}

    def as_dict(self):
        return {
            "command": self.command,
            "model": self.model,
            "params": dict(self.params),
            "figure": self.figure,
            "boundary": self.boundary,
            "experiment": self.experiment,
            "seed": self.seed,
            "grid": self.grid,
            "tol": self.tol,
            "out": self.out,
            "options": {k: list(v) if isinstance(v, (list, tuple)) else v for k, v in self.options.items()},
        }


# ---------------------------------------------------------------------------
# Config file format
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def _parse_value(kind, raw, key):
    try:
        if kind == "floats":
            return [float(x) for x in raw.split(",") if x.strip()]
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigParseError(f"bad value {raw!r} for key {key!r}", key) from exc


def dumps_config(cfg: ExperimentConfig):
    """Serialize to the sectioned key-value format read by :func:`loads_config`."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    run = {k: _fmt(getattr(cfg, k)) for k in RUN_KEYS if getattr(cfg, k) is not None}
    cp["run"] = run
    if cfg.params:
        cp["params"] = {k: _fmt(v) for k, v in cfg.params.items()}
    if cfg.options:
        cp["options"] = {k: _fmt(v) for k, v in cfg.options.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def loads_config(text):
    """Parse config text strictly; unknown sections or keys raise ConfigParseError."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigParseError(f"malformed config: {exc}") from exc
    for sec in cp.sections():
        if sec not in ("run", "params", "options"):
            raise ConfigParseError(f"unknown section [{sec}]", sec)
    if "run" not in cp or "command" not in cp["run"]:
        raise ConfigParseError("missing [run] command", "command")
    kw = {}
    for k, raw in cp["run"].items():
        if k not in RUN_KEYS:
            raise ConfigParseError(f"unknown key {k!r} in [run]", k)
        kw[k] = _parse_value(RUN_KEYS[k], raw, k)
    model = kw.get("model")
    params = {}
    if "params" in cp:
        spec = MODEL_PARAMS.get(model)
        if spec is None:
            raise ConfigParseError("[params] given without a known model", "model")
        for k, raw in cp["params"].items():
            if k not in spec:
                raise ConfigParseError(f"unknown parameter {k!r} for model {model!r}", k)
            params[k] = _parse_value(spec[k][0], raw, k)
    options = {}
    if "options" in cp:
        for k, raw in cp["options"].items():
            if k not in OPTION_KEYS:
                raise ConfigParseError(f"unknown option {k!r}", k)
            options[k] = _parse_value(OPTION_KEYS[k], raw, k)
    return ExperimentConfig(params=params, options=options, **kw)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

@dataclass
class Table:
    """Named CSV table with a ``#`` metadata header."""

    name: str
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)

    def to_csv(self):
        lines = [f"# {k}: {v}" for k, v in self.meta.items()]
        lines.append("# columns: " + ",".join(self.columns))
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_cell(v) for v in row))
        return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _spectrum_rows(E, extra=(), edge_mask=None):
    E = np.asarray(E)
    order = np.lexsort((E.imag, E.real))
    rows = []
    for n, i in enumerate(order):
        row = list(extra) + [n, E[i].real, E[i].imag]
        if edge_mask is not None:
            row.append(bool(edge_mask[i]))
        rows.append(row)
    return rows


def _edge_mask(E, rep):
    mask = np.zeros(E.shape[0], dtype=bool)
    for e in rep.midgap_energies:
        d = np.abs(E - e)
        d[mask] = np.inf
        mask[int(np.argmin(d))] = True
    return mask


# ---------------------------------------------------------------------------
# Model construction
# ---------------------------------------------------------------------------

def _bloch(model, p):
    if model == "nhti":
        return models.build_nhti(p["t"], p["delta"], p["gamma"])
    if model == "majorana":
        return models.build_majorana(p["tL"], p["tR"], p["Delta"], p["mu"])
    if model == "qsh":
        return models.build_qsh(p["t"], p["m"], p["lam"], p["gamma"])
    if model == "dirac":
        return models.build_dirac_bloch(models.ContinuumDiracParams.single(p["g"], p["m"], p["delta"]))
    raise ConfigParseError(f"model {model!r} has no Bloch form", "model")


def _lattice(model, p, boundary="open"):
    if model == "nhti":
        return models.build_nhti_chain(p["t"], p["delta"], p["gamma"], p["L"], boundary)
    if model == "majorana":
        return models.build_majorana_chain(p["tL"], p["tR"], p["Delta"], p["mu"], p["L"], boundary)
    if model == "qsh":
        return models.build_qsh_cylinder(p["t"], p["m"], p["lam"], p["gamma"], p["Lx"], p["ky"], boundary)
    raise ConfigParseError(f"model {model!r} has no lattice form", "model")


def _require_model(cfg, allowed):
    if cfg.model not in allowed:
        raise ConfigParseError(f"command {cfg.command!r} needs model in {allowed}", "model")
    return cfg.resolved_params()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_spectrum(cfg):
    p = _require_model(cfg, ("nhti", "majorana", "qsh", "three_level", "dirac"))
    meta = {"model": cfg.model, "params": json.dumps(p, sort_keys=True), "boundary": cfg.boundary}
    if cfg.model == "three_level":
        H = models.build_three_level(p["Omega"], p["gamma1"], p["gamma2"])
        return [Table("spectrum", ["n", "re_E", "im_E"], _spectrum_rows(np.linalg.eigvals(H)), meta)], {}
    if cfg.boundary == "bloch":
        Hk = _bloch(cfg.model, p)
        n = cfg.grid or (501 if Hk.spatial_dim == 1 else 101)
        if Hk.spatial_dim == 1:
            ks = np.linspace(-np.pi, np.pi, n)
            cols = ["k"]
        else:
            ks = np.column_stack([np.linspace(-np.pi, np.pi, n), np.full(n, p["ky"])])
            cols = ["kx"]
            meta["ky"] = p["ky"]
        E = np.linalg.eigvals(Hk.matrices(ks))
        rows = []
        for i in range(E.shape[0]):
            kk = float(np.atleast_1d(ks[i])[0])
            rows.extend(_spectrum_rows(E[i], extra=(kk,)))
        return [Table("spectrum", cols + ["n", "re_E", "im_E"], rows, meta)], {}
    mdl = _lattice(cfg.model, p, cfg.boundary)
    E = np.linalg.eigvals(mdl.matrix)
    mask = None
    if cfg.boundary == "open":
        mask = _edge_mask(E, topology.find_edge_states(mdl))
    cols = ["n", "re_E", "im_E"] + (["is_edge"] if mask is not None else [])
    return [Table("spectrum", cols, _spectrum_rows(E, edge_mask=mask), meta)], {}


def cmd_invariant(cfg):
    p = _require_model(cfg, ("nhti", "majorana", "qsh", "dirac"))
    Hk = _bloch(cfg.model, p)
    meta = {"model": cfg.model, "params": json.dumps(p, sort_keys=True)}
    if cfg.model == "nhti":
        nu = topology.nu_ai(Hk)
        rows, text = [["nu_AI", nu]], f"nu_AI = {nu}"
    elif cfg.model == "majorana":
        r = topology.nu_d(Hk)
        rows = [["nu_D", r.nu], ["nu_D_sign", r.nu_sign], ["nu_D_pfaffian", r.nu_pfaffian]]
        text = f"nu_D = {r.nu}"
    elif cfg.model == "qsh":
        r = topology.nu_aii(Hk)
        rows = [["nu_AII", r.nu], ["nu_AII_d1", r.nu_d1], ["nu_AII_parity", r.nu_parity]]
        text = f"nu_AII = {r.nu}"
    else:
        W = topology.winding_number(models.ContinuumDiracParams.single(p["g"], p["m"], p["delta"]))
        rows, text = [["W", W]], f"W = {W:.12g}"
    return [Table("invariant", ["name", "value"], rows, meta)], {"stdout": text}


def cmd_edges(cfg):
    p = _require_model(cfg, ("nhti", "majorana", "qsh"))
    mdl = _lattice(cfg.model, p, "open")
    rep = topology.find_edge_states(mdl)
    rows = [
        [i, e.real, e.imag, side, xi]
        for i, (e, side, xi) in enumerate(zip(rep.midgap_energies, rep.left_or_right, rep.localization_lengths))
    ]
    meta = {"model": cfg.model, "params": json.dumps(p, sort_keys=True), "count": rep.count}
    return [Table("edges", ["n", "re_E", "im_E", "edge", "xi"], rows, meta)], {"stdout": f"edge states: {rep.count}"}


def _candidates(model):
    if model == "nhti":
        return [models.nhti_time_reversal()]
    if model == "majorana":
        return [models.majorana_particle_hole()]
    if model == "qsh":
        return [models.qsh_time_reversal()]
    if model == "dirac":
        return [models.dirac_chiral()]
    raise ConfigParseError(f"no symmetry candidates for {model!r}", "model")


def cmd_classify(cfg):
    p = _require_model(cfg, ("nhti", "majorana", "qsh", "dirac"))
    Hk = _bloch(cfg.model, p)
    kgrid = None
    if cfg.model == "dirac":
        kgrid = np.linspace(-5, 5, 101)[:, None]
    rep = symmetry.classify_az(Hk, _candidates(cfg.model), kgrid, tol=max(cfg.tol, 1e-12))
    rows = [["az_class", rep.az_class], ["unified_class", rep.unified_class], ["residual", rep.relation_residual]]
    meta = {"model": cfg.model, "params": json.dumps(p, sort_keys=True)}
    return [Table("classify", ["name", "value"], rows, meta)], {"stdout": f"{rep.az_class} ({rep.unified_class})"}


_DISORDER_KIND = {"nhti": "nhti", "majorana": "majorana", "qsh": "qsh_cylinder"}


def _sweep_table(kind, d_values, n_real, seed, name, extra_meta=None):
    tab = topology.disorder_sweep(kind, d_grid=d_values, n_realizations=n_real, seed=seed)
    rows = []
    for r in tab.rows:
        mask = _edge_mask(r.eigenvalues, _FakeRep(r.edge_energies))
        for n, e in enumerate(r.eigenvalues):
            rows.append([r.d, r.realization, n, e.real, e.imag, bool(mask[n])])
    summ = [[s.d, s.max_deviation, s.mean_bulk_spread] for s in tab.summary]
    meta = {"model": kind, "seed": seed, "realizations": n_real, **(extra_meta or {})}
    return [
        Table(name, ["d", "realization", "n", "re_E", "im_E", "is_edge"], rows, meta),
        Table(name + "_summary", ["d", "max_deviation", "mean_bulk_spread"], summ, meta),
    ]


@dataclass
class _FakeRep:
    midgap_energies: np.ndarray


def cmd_disorder(cfg):
    if cfg.model not in _DISORDER_KIND:
        raise ConfigParseError("disorder needs model nhti, majorana or qsh", "model")
    d_values = cfg.options.get("d_values", [0.0, 0.25, 0.5, 0.75, 1.0])
    n_real = int(cfg.options.get("realizations", 20))
    return _sweep_table(_DISORDER_KIND[cfg.model], d_values, n_real, cfg.seed, "disorder"), {}


def cmd_dynamics(cfg):
    exp = cfg.experiment or "three_level"
    if exp == "three_level":
        p = MODEL_PARAMS["three_level"]
        pp = {k: cfg.params.get(k, d) for k, (_, d) in p.items()} if cfg.model == "three_level" else {
            k: d for k, (_, d) in p.items()
        }
        times = cfg.options.get("times", list(np.round(np.arange(0, 101) * 0.1, 10)))
        r = dynamics.three_level_populations(pp["Omega"], pp["gamma1"], pp["gamma2"], times)
        rows = [[t, a, b] for t, a, b in zip(r.times, r.p1, r.p2)]
        return [Table("dynamics", ["t", "p1", "p2"], rows, {"experiment": exp, **pp})], {}
    if exp == "edge":
        p = cfg.resolved_params() if cfg.model == "nhti" else {"t": 1.0, "delta": 1.0, "gamma": 0.2, "L": 50}
        times = cfg.options.get("times", list(np.linspace(0, 10, 101)))
        mdl = models.build_nhti_chain(p["t"], p["delta"], p["gamma"], p["L"])
        r = dynamics.edge_population_experiment(mdl, times)
        rows = [[t] + [r.tracked[k][i] for k in ("a1", "b1", "a2", "b2")] + [r.log_amplification[i]]
                for i, t in enumerate(r.times)]
        return [Table("dynamics", ["t", "a1", "b1", "a2", "b2", "log_norm"], rows, {"experiment": exp, **p})], {}
    if exp == "wavepacket":
        p = cfg.resolved_params() if cfg.model == "qsh" else dict(t=1.0, m=-1.0, lam=0.5, gamma=0.8, Lx=30, Ly=30)
        times = cfg.options.get("times", [0.0, 10.0, 20.0])
        mdl = models.build_qsh_rectangle(p["t"], p["m"], p["lam"], p["gamma"], p["Lx"], p["Ly"])
        r = dynamics.wavepacket_2d(mdl, times)
        return _wavepacket_tables("dynamics", [("case", r)], p), {}
    raise ConfigParseError(f"unknown experiment {exp!r}", "experiment")


def _wavepacket_tables(name, results, meta):
    rows, summ = [], []
    for label, r in results:
        for i, t in enumerate(r.times):
            summ.append([label, t, r.edge_fraction[i]])
            Lx, Ly = r.maps.shape[1:]
            for x in range(Lx):
                for y in range(Ly):
                    rows.append([label, t, x + 1, y + 1, r.maps[i, x, y]])
    meta = {k: v for k, v in meta.items() if not isinstance(v, dict)}
    return [
        Table(name, ["case", "t", "x", "y", "intensity"], rows, meta),
        Table(name + "_edge_fraction", ["case", "t", "edge_fraction"], summ, meta),
    ]


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------

FIG3_PARAMS = {"t": 1.0, "delta": 0.5, "gamma": 1.0}
FIG5_TOPO = {"t": 1.0, "m": -1.0, "lam": 0.5, "gamma": 0.8}
FIG5_TRIV = {"t": 1.0, "m": 3.0, "lam": 0.8, "gamma": 1.2}

_CATALOG = [
    ("fig1", "NHTI Bloch bands as a gapped two-band example", {"model": "nhti", **FIG3_PARAMS}),
    ("fig3b", "NHTI Bloch bands with periodic boundaries", {"model": "nhti", **FIG3_PARAMS}),
    ("fig3c", "NHTI open chain spectrum versus gamma", {"model": "nhti", "t": 1.0, "delta": 0.5, "L": 50,
                                                          "gamma_range": (0.0, 4.0)}),
    ("fig4", None, "no computable data"),
    ("fig5", "QSH cylinder spectrum versus ky", {"model": "qsh", "Lx": 30, "topological": FIG5_TOPO,
                                                  "trivial": FIG5_TRIV}),
    ("figS1b", "three-level populations", {"model": "three_level", "Omega": 1.0, "gamma1": 0.5,
                                            "gamma2": 5.0}),
    ("figS2", "Majorana open chain spectrum versus mu", {"model": "majorana", "tL": 1.4, "tR": 0.6,
                                                          "Delta": 0.5, "L": 50, "mu_range": (-3.0, 3.0)}),
    ("figS3-S4", None, "no computable data"),
    ("figS5", "disordered Majorana chain versus d", {"model": "majorana", **topology.DISORDER_PRESETS["majorana"]}),
    ("figS6", "disordered NHTI versus d", {"model": "nhti", **topology.DISORDER_PRESETS["nhti"]}),
    ("figS7", "disordered QSH cylinder versus ky and disordered flake",
     {"model": "qsh", **topology.DISORDER_PRESETS["qsh_cylinder"], "Ly": 30}),
    ("figS8", "NHTI edge population dynamics", {"model": "nhti", "t": 1.0, "delta": 1.0, "L": 50,
                                                 "gamma_topological": 0.2, "gamma_trivial": 3.0}),
    ("figS9", "QSH wave-packet dynamics", {"model": "qsh", "Lx": 30, "Ly": 30, "topological": FIG5_TOPO,
                                           "trivial": FIG5_TRIV, "times": (0.0, 10.0, 20.0)}),
]


@dataclass(frozen=True)
class FigureEntry:
    id: str
    description: str | None
    params: dict | None
    excluded: bool
    reason: str | None = None


def figure_catalog():
    """Figure ids with their caption parameters; schematics are marked excluded."""
    out = []
    for fid, desc, p in _CATALOG:
        if desc is None:
            out.append(FigureEntry(fid, None, None, True, p))
        else:
            out.append(FigureEntry(fid, desc, p, False))
    return out


def _figure_entry(fid):
    for e in figure_catalog():
        if e.id == fid:
            return e
    raise ConfigParseError(f"unknown figure id {fid!r}", "figure")


def _fig_bands(cfg, name):
    Hk = models.build_nhti(**FIG3_PARAMS)
    n = cfg.grid or 501
    ks = np.linspace(-np.pi, np.pi, n)
    E = np.sort_complex(Hk.analytic_dispersion(ks))
    rows = [[k, b, E[i, b].real, E[i, b].imag] for i, k in enumerate(ks) for b in range(2)]
    return [Table(name, ["k", "band", "re_E", "im_E"], rows, dict(FIG3_PARAMS))]


def _fig_sweep(name, xs, xname, build, meta):
    rows = []
    for x in xs:
        mdl = build(x)
        E = np.linalg.eigvals(mdl.matrix)
        mask = _edge_mask(E, topology.find_edge_states(mdl))
        rows.extend(_spectrum_rows(E, extra=(x,), edge_mask=mask))
    return [Table(name, [xname, "n", "re_E", "im_E", "is_edge"], rows, meta)]


def run_figure(cfg):
    fid = cfg.figure
    entry = _figure_entry(fid)
    if entry.excluded:
        raise ComputeError(f"figure {fid} is excluded: {entry.reason}")
    name = fid
    if fid in ("fig1", "fig3b"):
        return _fig_bands(cfg, name)
    if fid == "fig3c":
        gs = np.linspace(0.0, 4.0, cfg.grid or 81)
        return _fig_sweep(name, gs, "gamma", lambda g: models.build_nhti_chain(1.0, 0.5, g, 50),
                          {"t": 1.0, "delta": 0.5, "L": 50})
    if fid == "figS2":
        mus = np.linspace(-3.0, 3.0, cfg.grid or 121)
        return _fig_sweep(name, mus, "mu", lambda mu: models.build_majorana_chain(1.4, 0.6, 0.5, mu, 50),
                          {"tL": 1.4, "tR": 0.6, "Delta": 0.5, "L": 50})
    if fid == "fig5":
        ks = np.linspace(-np.pi, np.pi, cfg.grid or 121)
        rows = []
        for label, p in (("topological", FIG5_TOPO), ("trivial", FIG5_TRIV)):
            for ky in ks:
                mdl = models.build_qsh_cylinder(**p, Lx=30, ky=ky)
                E = np.linalg.eigvals(mdl.matrix)
                mask = _edge_mask(E, topology.find_edge_states(mdl))
                rows.extend(_spectrum_rows(E, extra=(label, ky), edge_mask=mask))
        return [Table(name, ["case", "ky", "n", "re_E", "im_E", "is_edge"], rows, {"Lx": 30})]
    if fid == "figS1b":
        ts = np.round(np.arange(0, (cfg.grid or 101)) * 0.1, 10)
        r = dynamics.three_level_populations(1.0, 0.5, 5.0, ts)
        return [Table(name, ["t", "p1", "p2"], [[t, a, b] for t, a, b in zip(r.times, r.p1, r.p2)],
                      {"Omega": 1.0, "gamma1": 0.5, "gamma2": 5.0})]
    if fid in ("figS5", "figS6"):
        kind = "majorana" if fid == "figS5" else "nhti"
        ds = list(np.linspace(0.0, 2.0, cfg.grid or 41))
        return _sweep_table(kind, ds, 1, cfg.seed, name)
    if fid == "figS7":
        pre = topology.DISORDER_PRESETS["qsh_cylinder"]
        base = {k: v for k, v in pre["base"].items() if k != "ky"}
        ks = np.linspace(-np.pi, np.pi, cfg.grid or 61)
        rows = []
        for ky in ks:
            mdl = models.build_disordered("qsh_cylinder", {**base, "ky": ky}, pre["swept"], cfg.seed)
            E = np.linalg.eigvals(mdl.matrix)
            mask = _edge_mask(E, topology.find_edge_states(mdl))
            rows.extend(_spectrum_rows(E, extra=(ky,), edge_mask=mask))
        flake = models.build_disordered(
            "qsh_rectangle", {**base, "Ly": 30}, pre["swept"], cfg.seed
        )
        frows = _spectrum_rows(np.linalg.eigvals(flake.matrix))
        meta = {"seed": cfg.seed, "amplitudes": json.dumps(pre["swept"], sort_keys=True)}
        return [
            Table(name + "_cylinder", ["ky", "n", "re_E", "im_E", "is_edge"], rows, meta),
            Table(name + "_flake", ["n", "re_E", "im_E"], frows, meta),
        ]
    if fid == "figS8":
        ts = np.linspace(0, 10, cfg.grid or 101)
        rows = []
        for label, g in (("topological", 0.2), ("trivial", 3.0)):
            r = dynamics.edge_population_experiment(models.build_nhti_chain(1.0, 1.0, g, 50), ts)
            for i, t in enumerate(r.times):
                rows.append([label, t] + [r.tracked[k][i] for k in ("a1", "b1", "a2", "b2")])
        return [Table(name, ["case", "t", "a1", "b1", "a2", "b2"], rows, {"t": 1.0, "delta": 1.0, "L": 50})]
    if fid == "figS9":
        res = []
        for label, p in (("topological", FIG5_TOPO), ("trivial", FIG5_TRIV)):
            res.append((label, dynamics.wavepacket_2d(models.build_qsh_rectangle(**p, Lx=30, Ly=30), [0, 10, 20])))
        return _wavepacket_tables(name, res, {"Lx": 30, "Ly": 30})
    raise ConfigParseError(f"unknown figure id {fid!r}", "figure")


def cmd_figure(cfg):
    if not cfg.figure:
        raise ConfigParseError("figure command needs a figure id", "figure")
    return run_figure(cfg), {}


_DISPATCH = {
    "spectrum": cmd_spectrum,
    "invariant": cmd_invariant,
    "edges": cmd_edges,
    "classify": cmd_classify,
    "disorder": cmd_disorder,
    "dynamics": cmd_dynamics,
    "figure": cmd_figure,
}


# ---------------------------------------------------------------------------
# Running and writing
# ---------------------------------------------------------------------------

def compute(cfg: ExperimentConfig):
    """Run the command and return ``(tables, extras)`` without touching disk."""
    try:
        return _DISPATCH[cfg.command](cfg)
    except (ConfigParseError, ComputeError):
        raise
    except (NHTopoError, ValueError, np.linalg.LinAlgError) as exc:
        raise ComputeError(f"{cfg.command} failed: {exc}") from exc


def write_outputs(cfg, tables, duration_ms):
    """Write all CSVs and the manifest atomically into ``cfg.out``."""
    os.makedirs(cfg.out, exist_ok=True)
    payloads = [(f"{t.name}.csv", t.to_csv().encode("utf-8")) for t in tables]
    outputs = [{"file": fn, "sha256": hashlib.sha256(b).hexdigest()} for fn, b in payloads]
    manifest = {
        "config": cfg.as_dict(),
        "version": __version__,
        "duration_ms": duration_ms,
        "outputs": outputs,
    }
    payloads.append(("manifest.json", (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8")))
    staged = []
    try:
        for fn, data in payloads:
            fd, tmp = tempfile.mkstemp(dir=cfg.out, prefix=".tmp-")
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            staged.append((tmp, os.path.join(cfg.out, fn)))
        for tmp, dest in staged:
            os.replace(tmp, dest)
    except OSError:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.remove(tmp)
        raise
    return [os.path.join(cfg.out, fn) for fn, _ in payloads]


def run(cfg: ExperimentConfig):
    """Compute and write one experiment; returns the list of written paths."""
    t0 = time.perf_counter()
    tables, extras = compute(cfg)
    duration = int(round((time.perf_counter() - t0) * 1000))
    paths = write_outputs(cfg, tables, duration)
    if extras.get("stdout"):
        print(extras["stdout"])
    return paths


def build_parser():
    ap = argparse.ArgumentParser(prog="nhtopo", description="Non-Hermitian topological band toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--grid", type=int, default=None)
    ap.add_argument("--tol", type=float, default=None)
    ap.add_argument("--config", default=None, help="read the run from a config file")
    sub = ap.add_subparsers(dest="command")

    mp = argparse.ArgumentParser(add_help=False)
    # global flags are accepted after the subcommand as well
    mp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    mp.add_argument("--out", default=argparse.SUPPRESS)
    mp.add_argument("--grid", type=int, default=argparse.SUPPRESS)
    mp.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    mp.add_argument("--model", choices=sorted(MODEL_PARAMS))
    for key in sorted({k for spec in MODEL_PARAMS.values() for k in spec}):
        flag = "--lambda" if key == "lam" else f"--{key}"
        mp.add_argument(flag, dest=f"p_{key}", type=str, default=None)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[mp])
        if name == "spectrum":
            sp.add_argument("--boundary", choices=("open", "periodic", "bloch"), default="open")
        if name == "dynamics":
            sp.add_argument("--experiment", choices=("three_level", "edge", "wavepacket"), default="three_level")
        if name in ("disorder", "dynamics"):
            sp.add_argument("--d-values", dest="d_values", default=None)
            sp.add_argument("--realizations", type=int, default=None)
            sp.add_argument("--times", default=None)
        if name == "figure":
            sp.add_argument("figure_id", nargs="?", default=None)
            sp.add_argument("--list", action="store_true")
    return ap


def config_from_args(ns):
    if ns.config:
        with open(ns.config, encoding="utf-8") as fh:
            cfg = loads_config(fh.read())
    else:
        if not ns.command:
            raise ConfigParseError("no command given", "command")
        model = getattr(ns, "model", None)
        params = {}
        for key, val in vars(ns).items():
            if key.startswith("p_") and val is not None:
                name = key[2:]
                spec = MODEL_PARAMS.get(model, {})
                if name not in spec:
                    raise ConfigParseError(f"parameter {name!r} does not apply to model {model!r}", name)
                params[name] = _parse_value(spec[name][0], val, name)
        options = {}
        for key in ("d_values", "times"):
            if getattr(ns, key, None):
                options[key] = _parse_value("floats", getattr(ns, key), key)
        if getattr(ns, "realizations", None) is not None:
            options["realizations"] = ns.realizations
        cfg = ExperimentConfig(
            command=ns.command,
            model=model,
            params=params,
            figure=getattr(ns, "figure_id", None),
            boundary=getattr(ns, "boundary", "open"),
            experiment=getattr(ns, "experiment", None),
            options=options,
        )
    for key in ("seed", "out", "grid", "tol"):
        val = getattr(ns, key)
        if val is not None:
            setattr(cfg, key, val)
    cfg.__post_init__()
    return cfg


def main(argv=None):
    ap = build_parser()
    ns = ap.parse_args(argv)
    if ns.command == "figure" and getattr(ns, "list", False):
        for e in figure_catalog():
            status = f"excluded ({e.reason})" if e.excluded else json.dumps(e.params, sort_keys=True)
            print(f"{e.id}: {status}")
        return 0
    try:
        cfg = config_from_args(ns)
        run(cfg)
    except ConfigParseError as exc:
        key = f" [key: {exc.key}]" if exc.key else ""
        print(f"error: {exc}{key}", file=sys.stderr)
        return 2
    except ComputeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
