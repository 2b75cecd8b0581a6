"""Scenario runners: one function per (command, mode), each returning tables and a summary.

Parameter values are in units of Gamma except where the key carries a
unit suffix (``_ns``, ``_us``, ``_mhz``, ``_ghz``, ``_deg``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import estimation, fwm, propagation, spectra, storage
from .config import ConfigError, Scenario
from .units import (
    CS_HYPERFINE_HZ,
    FieldParams,
    GaussianPulse,
    MediumParams,
    SWITCH_DETUNING_D2_HZ,
    get_transition,
    make_grid,
    mhz_to_gamma,
    ns_to_gamma,
)


@dataclass
class Output:
    tables: dict = field(default_factory=dict)  # name -> (columns, 2-D array)
    summary: dict = field(default_factory=dict)
    resolved: dict = field(default_factory=dict)


# ------------------------------------------------------------ parameter schema
# kind: num, num?, int, bool, str, num|model, num|switching, dict?, path?, choice:<a>/<b>

MEDIUM = {
    "transition": ("choice:CsD1/CsD2", "CsD1"),
    "scheme": ("choice:LambdaD1/NTypeD2", "LambdaD1"),
    "D": ("num", 100.0),
    "gamma31": ("num|model", 0.5),
    "gamma21": ("num", 0.0),
    "delta_s_mhz": ("num?", None),
    "delta_c_mode": ("choice:direct/zero", "direct"),
}
DRIVE = {"omega_c": ("num?", None), "zeta": ("num?", None), "delta_c": ("num", 0.0), "t_p_ns": ("num", 207.0)}

SCHEMAS: dict = {}
RUNNERS: dict = {}
NATIVE_SWEEP: dict = {}


def runner(command, mode, schema, native=None):
    def deco(fn):
        SCHEMAS[(command, mode)] = schema
        RUNNERS[(command, mode)] = fn
        if native:
            NATIVE_SWEEP[(command, mode)] = native
        return fn
    return deco


DEFAULT_MODES = {"spectrum": "spectrum", "slowlight": "pulse", "store": "simulate", "fwm": "steady", "fit": "joint"}


def _coerce(key, kind, value):
    if kind.startswith("choice:"):
        opts = kind[7:].split("/")
        if value not in opts:
            raise ConfigError(key, f"must be one of {', '.join(opts)}")
        return value
    if kind in ("num|model", "num|switching"):
        word = kind.split("|")[1]
        if value == word:
            return value
        kind = "num"
    if kind == "num?":
        if value is None:
            return None
        kind = "num"
    if kind == "num":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, "must be a number")
        if not math.isfinite(value):
            raise ConfigError(key, "must be finite")
        return float(value)
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, "must be an integer")
        return value
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(key, "must be true or false")
        return value
    if kind in ("dict?",):
        if value is not None and not isinstance(value, dict):
            raise ConfigError(key, "must be a mapping")
        return value
    if kind in ("path?", "str"):
        if value is not None and not isinstance(value, str):
            raise ConfigError(key, "must be a string")
        return value
    raise AssertionError(kind)


def resolve_params(command, mode, params: dict) -> dict:
    schema = SCHEMAS[(command, mode)]
    out = {}
    for k in params:
        if k not in schema:
            raise ConfigError(f"params.{k}", f"unknown parameter for {command}/{mode}; "
                                             f"allowed: {', '.join(sorted(schema))}")
    for k, (kind, default) in schema.items():
        out[k] = _coerce(f"params.{k}", kind, params.get(k, default))
    return out


# ------------------------------------------------------------ helpers

def _transition(p):
    return get_transition(p["transition"])


def _delta_s(p):
    tr = _transition(p)
    if p.get("delta_s_mhz") is not None:
        return float(mhz_to_gamma(p["delta_s_mhz"], tr))
    return -float(mhz_to_gamma(SWITCH_DETUNING_D2_HZ / 1e6, tr))


def _gamma31(p, D=None):
    D = p["D"] if D is None else D
    if p["gamma31"] == "model":
        return estimation.gamma31_model(D, p.get("scheme", "LambdaD1"))
    return p["gamma31"]


def _medium(p, D=None, gamma21=None):
    D = p["D"] if D is None else D
    g31 = _gamma31(p, D)
    kw = dict(D=D, gamma31=g31, gamma21=p["gamma21"] if gamma21 is None else gamma21,
              scheme=p["scheme"], transition=p["transition"])
    if p["scheme"] == "NTypeD2":
        kw["delta_s"] = _delta_s(p)
    return MediumParams(**kw)


def _t_p(p):
    return float(ns_to_gamma(p["t_p_ns"], _transition(p)))


def _omega_c(p, D, t_p):
    if p.get("omega_c") is not None:
        if p.get("zeta") is not None:
            raise ConfigError("params.zeta", "give omega_c or zeta, not both")
        return p["omega_c"]
    if p.get("zeta") is None:
        raise ConfigError("params.omega_c", "give omega_c or zeta")
    return propagation.omega_c_for_zeta(D, p["zeta"], t_p)


def _table(columns, *arrays):
    return (list(columns), np.column_stack([np.asarray(a, dtype=float) for a in arrays]))


# ------------------------------------------------------------ spectrum

@runner("spectrum", "spectrum", {**MEDIUM, "omega_c": ("num", 2.0), "delta_c": ("num", 0.0),
                                 "span": ("num", 6.0), "n": ("int", 801)})
def run_spectrum(p, ctx):
    med = _medium(p)
    fld = FieldParams(omega_c=p["omega_c"], delta_c=p["delta_c"])
    if p["n"] < 3 or p["span"] <= 0:
        raise ConfigError("params.n", "need n >= 3 and span > 0")
    grid = np.linspace(-p["span"], p["span"], p["n"])
    res = spectra.spectrum(med, fld, grid, p["delta_c_mode"])
    summary = {"peak_transparency": res.peak_transparency, "fwhm_eit": res.fwhm_eit,
               "peak_position": res.peak_position}
    try:
        summary["bandwidth_closed"] = spectra.eit_bandwidth_closed(med, fld)
    except spectra.BandwidthError:
        summary["bandwidth_closed"] = None
    return Output({"spectrum": _table(("delta_p", "transmission"), res.delta_p_grid, res.transmission)},
                  summary, {"gamma31": med.gamma31, "delta_s": med.delta_s})


@runner("spectrum", "ntype-shift", {"transition": ("choice:CsD1/CsD2", "CsD2"), "D": ("num", 200.0),
                                    "omega_c": ("num", 2.0), "gamma0": ("num", 0.0001),
                                    "gamma41": ("num", 0.8), "delta_s_mhz": ("num?", None)})
def run_ntype_shift(p, ctx):
    ds = _delta_s(p)
    med = MediumParams(D=p["D"], gamma31=p["gamma41"], gamma41=p["gamma41"], gamma21=p["gamma0"],
                       scheme="NTypeD2", delta_s=ds, transition=p["transition"])
    fld = FieldParams(omega_c=p["omega_c"])
    eff = spectra.ntype_effective(med, p["omega_c"])
    d1 = get_transition("CsD1")
    dhf = float(mhz_to_gamma(CS_HYPERFINE_HZ / 1e6, d1))
    return Output({}, {
        "omega_c_sq": p["omega_c"] ** 2,
        "gamma21_d2": storage.gamma21_d2(p["omega_c"], p["gamma41"], ds, p["gamma0"]),
        "gamma21_d1": p["gamma0"],
        "shift_d2_effective": -eff["delta2_eff"],
        "shift_d2_numeric": spectra.ntype_peak_shift(med, fld),
        # control acting on |1>-|4>, red-detuned by the hyperfine splitting
        "shift_d1": 7 * p["omega_c"] ** 2 / (4 * dhf),
    }, {"delta_s": ds})


# ------------------------------------------------------------ slow light

@runner("slowlight", "pulse", {**MEDIUM, **DRIVE, "method": ("choice:numeric/analytic", "numeric")})
def run_slowlight(p, ctx):
    t_p = _t_p(p)
    med = _medium(p)
    oc = _omega_c(p, med.D, t_p)
    fld = FieldParams(omega_c=oc, delta_c=p["delta_c"])
    pulse = GaussianPulse(t_p=t_p)
    summary = {"omega_c": oc, "gamma31": med.gamma31}
    an = propagation.analytic_slow_light(pulse, med, fld)
    summary.update({f"analytic_{k}": v for k, v in an.items()})
    tables = {}
    if p["method"] == "numeric":
        grid = make_grid(pulse, med, fld)
        inp = pulse.sample(grid.t)
        res = propagation.propagate_pulse(inp, med, fld, delta_c_mode=p["delta_c_mode"])
        summary.update({"t_d": res.t_d, "beta": res.beta, "eta_tran": res.eta_tran, "zeta": res.zeta})
        ref = propagation.analytic_slow_light(pulse, med, fld, grid.t)["waveform"]
        t_ns = grid.t * _transition(p).time_unit_ns
        tables["waveform"] = _table(("t", "t_ns", "input", "output", "analytic"), grid.t, t_ns,
                                    inp.intensity, res.output.intensity, ref.intensity)
    return Output(tables, summary, {"omega_c": oc, "t_p": t_p, "gamma31": med.gamma31})


@runner("slowlight", "se-vs-od", {"transition": ("choice:CsD1/CsD2", "CsD1"),
                                  "scheme": ("choice:LambdaD1/NTypeD2", "LambdaD1"),
                                  "t_p_ns": ("num", 207.0), "zeta": ("num", 2.7), "gamma21": ("num", 0.0001),
                                  "gamma0": ("num", 0.0005), "delta_s_mhz": ("num?", None),
                                  "D": ("num", 100.0)}, native="D")
def run_se_vs_od(p, ctx):
    t_p = _t_p(p)
    ods = ctx["sweep_values"] or [p["D"]]
    ds = _delta_s(p) if p["scheme"] == "NTypeD2" else None
    rows = storage.se_vs_od_sweep(ods, p["scheme"], t_p, p["zeta"],
                                  lambda d: estimation.gamma31_model(d, p["scheme"]),
                                  gamma21=p["gamma21"], gamma0=p["gamma0"], delta_s=ds)
    i = int(np.argmax(rows["eta"]))
    cols = ("D", "omega_c", "gamma31", "gamma21", "eta")
    return Output({"se_vs_od": _table(cols, *(rows[c] for c in cols))},
                  {"eta_max": float(rows["eta"][i]), "D_at_max": float(rows["D"][i])},
                  {"t_p": t_p, "delta_s": ds})


# ------------------------------------------------------------ storage

@runner("store", "simulate", {**MEDIUM, **DRIVE, "kappa": ("num", 1.1), "t_off_ns": ("num?", None),
                              "t_on_ns": ("num?", None), "ramp": ("choice:smooth/step", "smooth"),
                              "ramp_ns": ("num?", None), "omega_c_read": ("num?", None), "A": ("num", 1.0),
                              "tau_us": ("num?", None), "model": ("choice:linear/obe", "linear")})
def run_store(p, ctx):
    tr = _transition(p)
    t_p = _t_p(p)
    med = _medium(p)
    oc = _omega_c(p, med.D, t_p)
    conv = lambda ns: None if ns is None else float(ns_to_gamma(ns, tr))
    proto = storage.StorageProtocol(kappa=p["kappa"], t_off=conv(p["t_off_ns"]), t_on=conv(p["t_on_ns"]),
                                    ramp=p["ramp"], ramp_duration=conv(p["ramp_ns"]),
                                    omega_c_read=p["omega_c_read"])
    tau = math.inf if p["tau_us"] is None else float(ns_to_gamma(p["tau_us"] * 1e3, tr))
    decay = storage.DecayModel(A=p["A"], tau=tau, gamma21=med.gamma21)
    res = storage.simulate_storage(GaussianPulse(t_p=t_p), med, FieldParams(omega_c=oc, delta_c=p["delta_c"]),
                                   proto, decay, mode=p["model"])
    summary = {k: getattr(res, k) for k in ("eta_total", "eta_tran", "eta_comp", "eta_stored", "stored_fraction",
                                            "eta_leak", "zeta", "beta", "kappa")}
    summary["decomposition_gap"] = res.decomposition_gap
    summary["omega_c"] = oc
    out = res.output
    inp = np.abs(GaussianPulse(t_p=t_p).amplitude(out.t)) ** 2
    return Output({"waveform": _table(("t", "t_ns", "input", "output"), out.t, out.t * tr.time_unit_ns,
                                      inp, out.intensity)}, summary,
                  {"omega_c": oc, "t_p": t_p, "gamma31": med.gamma31, "info": res.info})


@runner("store", "decay", {"transition": ("choice:CsD1/CsD2", "CsD1"), "A": ("num|model", 0.90),
                           "tau_us": ("num", 325.0), "gamma21": ("num", 0.0), "t_p_ns": ("num", 207.0),
                           "t_max_us": ("num", 600.0), "n": ("int", 301), "D": ("num", 340.0),
                           "zeta": ("num", 2.3), "gamma31": ("num", 0.8), "gamma21_slow": ("num", 0.0002)})
def run_decay(p, ctx):
    """Efficiency versus storage time; ``A: model`` takes A from the slow-light transmission."""
    tr = _transition(p)
    t_p = _t_p(p)
    if p["A"] == "model":
        a = propagation.eta_tran(p["D"], p["zeta"], p["gamma21_slow"], p["gamma31"], t_p)
    else:
        a = p["A"]
    us = float(ns_to_gamma(1e3, tr))
    decay = storage.DecayModel(A=a, tau=p["tau_us"] * us, gamma21=p["gamma21"])
    t = np.linspace(0, p["t_max_us"], p["n"])
    eta = storage.eta_stored(t * us, decay)
    summary = {"A": a}
    try:
        tb = storage.tbp_at_half(decay, t_p)
        summary.update({"tbp": tb["analytic"], "tbp_numeric": tb["numeric"], "t_half_us": tb["t_half"] / us})
    except storage.ThresholdError as exc:
        summary.update({"tbp": None, "tbp_note": str(exc)})
    return Output({"decay": _table(("storage_us", "eta"), t, eta)}, summary, {"t_p": t_p, "tau": decay.tau})


@runner("store", "compression", {"kappa": ("num", 1.1), "zeta": ("num", 2.5), "D": ("num", 100.0),
                                 "gamma31": ("num", 0.5)})
def run_compression(p, ctx):
    # beta of the slow-light pulse at this delay ratio; independent of the absolute T_p
    beta = math.sqrt(1 + 32 * math.log(2) * p["gamma31"] * p["zeta"] ** 2 / p["D"])
    return Output({}, {"beta": beta, "eta_comp": storage.eta_comp(p["kappa"], p["zeta"], beta)}, {})


# ------------------------------------------------------------ FWM

FWM_BASE = {"D": ("num", 1000.0), "omega_c": ("num", 6.72), "gamma21": ("num", 0.0002),
            "gamma31": ("num|model", "model"), "delta_c": ("num", 0.0), "theta_deg": ("num", 0.0),
            "literal_dk": ("bool", False), "exact_k": ("bool", False)}


def _fwm_setup(p, D=None):
    D = p["D"] if D is None else D
    g31 = estimation.gamma31_model(D) if p["gamma31"] == "model" else p["gamma31"]
    med = MediumParams(D=D, gamma31=g31, gamma21=p["gamma21"])
    par = fwm.FwmParams.from_medium(med, p["omega_c"], delta_c=p["delta_c"],
                                    theta=math.radians(p["theta_deg"]), exact_k=p["exact_k"])
    return med, par


SIGN_NOTE = ("delta_p is reported in the main-text convention (delta_p = omega_p - omega_31); the FWM "
             "Hamiltonian as solved here has the same -delta_p diagonal, so the translation factor is +1")


@runner("fwm", "steady", {**FWM_BASE, "delta_p_min": ("num", -0.3), "delta_p_max": ("num", 0.3),
                          "n": ("int", 601)})
def run_fwm_steady(p, ctx):
    med, par = _fwm_setup(p)
    grid = np.linspace(p["delta_p_min"], p["delta_p_max"], p["n"])
    r = fwm.fwm_gain_scan(grid, par.theta, par, med, p["literal_dk"])
    i = int(np.argmax(r["fwm_gain"]))
    return Output({"fwm_gain": _table(("delta_p", "fwm_gain", "probe_gain", "no_fwm", "idler_conv"),
                                      grid, r["fwm_gain"], r["probe_gain"], r["no_fwm"], r["idler_conv"])},
                  {"max_fwm_gain": float(r["fwm_gain"][i]), "delta_p_at_max": float(grid[i]),
                   "n_c_minus_1": float(r["n_c"][0] - 1), "delta_kz_L": float(r["delta_kz"][0] * par.L),
                   "sign_convention": SIGN_NOTE},
                  {"gamma31": med.gamma31, "delta_d": par.delta_d, "omega_d": par.omega_d})


@runner("fwm", "theta", {**FWM_BASE, "delta_p": ("num", 0.04), "theta_deg_max": ("num", 1.0),
                         "n": ("int", 101)})
def run_fwm_theta(p, ctx):
    med, par = _fwm_setup(p)
    th = np.linspace(0, p["theta_deg_max"], p["n"])
    rows = [fwm.fwm_gain_steady(p["delta_p"], math.radians(x), par, med, p["literal_dk"]) for x in th]
    get = lambda k: np.array([r[k] for r in rows])
    return Output({"fwm_theta": _table(("theta_deg", "probe_gain", "fwm_gain", "delta_kz_L"), th,
                                       get("probe_gain"), get("fwm_gain"), get("delta_kz") * par.L)},
                  {"fwm_gain_theta0": float(get("fwm_gain")[0]), "sign_convention": SIGN_NOTE},
                  {"gamma31": med.gamma31})


@runner("fwm", "pulse", {"D": ("num", 1000.0), "zeta": ("num", 2.7), "t_p_ns": ("num", 200.0),
                         "gamma21": ("num", 0.0001), "gamma31": ("num|model", "model"),
                         "transition": ("choice:CsD1", "CsD1")}, native="D")
def run_fwm_pulse(p, ctx):
    t_p = _t_p(p)
    ods = ctx["sweep_values"] or [p["D"]]
    model = (lambda d: estimation.gamma31_model(d)) if p["gamma31"] == "model" else (lambda d: p["gamma31"])
    r = fwm.fwm_gain_pulse(GaussianPulse(t_p=t_p), MediumParams(D=1.0, gamma21=p["gamma21"]), ods,
                           zeta=p["zeta"], gamma31_model=model, jobs=ctx["jobs"])
    cols = ("D", "x", "omega_c", "gamma31", "eta_fwm", "eta_no_fwm", "gain")
    i = int(np.argmax(r["gain"]))
    return Output({"fwm_pulse": _table(cols, *(r[c] for c in cols))},
                  {"max_gain_minus_1": float(r["gain"][i] - 1), "D_at_max": float(r["D"][i])}, {"t_p": t_p})


@runner("fwm", "pump-scan", {**FWM_BASE, "D": ("num", 600.0), "omega_c": ("num", 6.2),
                             "gamma21": ("num", 0.0005), "theta_deg": ("num", 0.5),
                             "power_ratio": ("num", 0.5), "delta_pump_ghz": ("num", 9.192)},
        native="delta_pump_ghz")
def run_pump_scan(p, ctx):
    med, par = _fwm_setup(p)
    pumps = ctx["sweep_values"] or [p["delta_pump_ghz"]]
    r = fwm.pump_probe_scan(pumps, par, med, p["power_ratio"])
    far = int(np.argmax(r["delta_pump_ghz"]))
    return Output({"pump_scan": _table(("delta_pump_ghz", "peak_transmission", "peak_delta_p", "excess_gain"),
                                       r["delta_pump_ghz"], r["peak_transmission"], r["peak_delta_p"],
                                       r["excess_gain"])},
                  {"reference_peak": r["reference_peak"], "excess_gain_far": float(r["excess_gain"][far]),
                   "delta_pump_ghz_far": float(r["delta_pump_ghz"][far]), "sign_convention": SIGN_NOTE},
                  {"gamma31": med.gamma31})


# ------------------------------------------------------------ fitting

@runner("fit", "joint", {"scheme": ("choice:LambdaD1/NTypeD2/D1/D2", "LambdaD1"),
                         "transition": ("choice:CsD1/CsD2", "CsD1"), "t_p_ns": ("num", 207.0),
                         "spectrum_csv": ("path?", None), "trace_csv": ("path?", None),
                         "truth": ("dict?", None), "noise_spectrum": ("num", 0.0), "noise_trace": ("num", 0.0),
                         "fix": ("dict?", None), "gamma31": ("num?", None), "delta_s_mhz": ("num?", None),
                         "delta_c_mode": ("choice:direct/zero", "direct")})
def run_fit(p, ctx):
    scheme = estimation._scheme(p["scheme"])
    t_p = _t_p(p)
    ds = _delta_s(p) if scheme == "NTypeD2" else None
    if p["truth"] is not None:
        truth = {}
        for k in estimation.PARAM_NAMES:
            if k not in p["truth"]:
                raise ConfigError(f"params.truth.{k}", "missing")
            truth[k] = _coerce(f"params.truth.{k}", "num", p["truth"][k])
        extra = set(p["truth"]) - set(estimation.PARAM_NAMES)
        if extra:
            raise ConfigError(f"params.truth.{sorted(extra)[0]}", "unknown parameter")
        data = estimation.synth_dataset(truth, estimation.NoiseModel(p["noise_spectrum"], p["noise_trace"]),
                                        scheme, t_p, seed=ctx["seed"], delta_s=ds,
                                        delta_c_mode=p["delta_c_mode"], with_trace=p["spectrum_csv"] is None)
    elif p["spectrum_csv"]:
        data = load_dataset(p["spectrum_csv"], p["trace_csv"], scheme, t_p, _transition(p))
        data.metadata.update({"delta_s": ds, "delta_c_mode": p["delta_c_mode"]})
    else:
        raise ConfigError("params.spectrum_csv", "give spectrum_csv (and trace_csv) or truth")
    tables = {"spectrum_data": _table(("delta_p", "transmission", "sigma"), data.delta_p, data.transmission,
                                      data.sigma)}
    if data.has_trace:
        res = estimation.fit_joint(data, jobs=ctx["jobs"], delta_s=ds, delta_c_mode=p["delta_c_mode"],
                                   fix=p["fix"])
        summary = res.to_dict()
        best = res.params
    else:
        s = estimation.fit_spectrum(data, gamma31=p["gamma31"], jobs=ctx["jobs"], delta_s=ds,
                                    delta_c_mode=p["delta_c_mode"])
        summary = {k: v for k, v in s.items() if k != "covariance"}
        summary["covariance"] = s["covariance"].tolist()
        v = s["values"]
        D = s["D_implied"]
        best = {"D": D, "omega_c": v["omega_c"], "gamma21": v["D_gamma21"] / D, "delta_c": v["delta_c"],
                "gamma31": s["gamma31_assumed"]}
    model = estimation.model_transmission(data.delta_p, best, scheme, ds, p["delta_c_mode"])
    tables["spectrum_fit"] = _table(("delta_p", "model"), data.delta_p, model)
    return Output(tables, summary, {"t_p": t_p, "delta_s": ds})


def load_dataset(spectrum_csv, trace_csv, scheme, t_p, transition):
    """Spectrum CSV: delta_p, transmission[, sigma].  Trace CSV: t or t_ns, intensity_in, intensity_out[, sigma]."""
    spec = np.genfromtxt(spectrum_csv, delimiter=",", names=True)
    names = spec.dtype.names or ()
    for k in ("delta_p", "transmission"):
        if k not in names:
            raise ConfigError("spectrum_csv", f"missing column {k!r}")
    sigma = spec["sigma"] if "sigma" in names else 0.01
    kw = dict(delta_p=spec["delta_p"], transmission=spec["transmission"], sigma=sigma, scheme=scheme, t_p=t_p)
    if trace_csv:
        tr = np.genfromtxt(trace_csv, delimiter=",", names=True)
        tn = tr.dtype.names or ()
        if "t" in tn:
            t = tr["t"]
        elif "t_ns" in tn:
            t = np.asarray(ns_to_gamma(tr["t_ns"], transition))
        else:
            raise ConfigError("trace_csv", "need a 't' or 't_ns' column")
        for k in ("intensity_in", "intensity_out"):
            if k not in tn:
                raise ConfigError("trace_csv", f"missing column {k!r}")
        kw.update(t=t, intensity_in=tr["intensity_in"], intensity_out=tr["intensity_out"],
                  trace_sigma=tr["sigma"] if "sigma" in tn else 0.01 * float(np.max(tr["intensity_in"])))
    return estimation.MeasuredDataset(**kw)


# ------------------------------------------------------------ dispatch

def run(scn: Scenario, jobs: int | None = None, seed: int | None = None) -> Output:
    mode = scn.mode or DEFAULT_MODES[scn.command]
    key = (scn.command, mode)
    if key not in RUNNERS:
        modes = sorted(m for c, m in RUNNERS if c == scn.command)
        raise ConfigError("mode", f"unknown mode {mode!r} for {scn.command}; choose from {', '.join(modes)}")
    params = resolve_params(scn.command, mode, scn.params)
    ctx = {"jobs": jobs or scn.jobs, "seed": scn.seed if seed is None else seed, "sweep_values": None}
    fn: Callable = RUNNERS[key]
    sweep = scn.sweep
    if sweep is not None:
        kind = SCHEMAS[key].get(sweep.variable, (None,))[0]
        if kind is None or not kind.startswith("num"):
            raise ConfigError("sweep.variable", f"{sweep.variable!r} is not a numeric parameter of {scn.command}/{mode}")
    if sweep is None or NATIVE_SWEEP.get(key) == sweep.variable:
        if sweep is not None:
            ctx["sweep_values"] = list(sweep.values)
        out = fn(params, ctx)
    else:
        out = _run_sweep(fn, params, ctx, sweep)
    out.resolved = {"command": scn.command, "mode": mode, "params": params, "derived": out.resolved,
                    "seed": ctx["seed"]}
    if sweep is not None:
        out.resolved["sweep"] = {"variable": sweep.variable, "values": list(sweep.values)}
    return out


def _run_sweep(fn, params, ctx, sweep):
    def one(v):
        q = dict(params)
        q[sweep.variable] = float(v)
        return fn(q, ctx)

    results = propagation.parallel_map(one, sweep.values, ctx["jobs"])
    scalar_keys = [k for k, v in results[0].summary.items()
                   if isinstance(v, (int, float)) and not isinstance(v, bool)]
    rows = [[v] + [float(r.summary.get(k) if r.summary.get(k) is not None else math.nan) for k in scalar_keys]
            for v, r in zip(sweep.values, results)]
    tables = {"sweep": ([sweep.variable] + scalar_keys, np.array(rows, dtype=float))}
    for name, (cols, arr) in results[0].tables.items():
        stacked = [np.column_stack([np.full(r.tables[name][1].shape[0], v), r.tables[name][1]])
                   for v, r in zip(sweep.values, results)]
        tables[name] = ([sweep.variable] + cols, np.vstack(stacked))
    extra = {k: v for k, v in results[0].summary.items() if k not in scalar_keys}
    return Output(tables, {"points": len(results), **extra}, {"per_point": [r.resolved for r in results]})
