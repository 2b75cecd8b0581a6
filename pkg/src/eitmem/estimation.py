"""Parameter extraction from EIT spectra and slow-light traces.

The spectrum alone pins down omega_c, delta_c, D*gamma21 and D*gamma31;
D itself only enters through higher-order terms.  A slow-light trace
adds the group delay D/omega_c^2, which fixes D and hence splits the
products.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq, curve_fit, least_squares

from .propagation import parallel_map, propagate_pulse
from .spectra import response
from .units import (
    FieldParams,
    GaussianPulse,
    MediumParams,
    ParameterError,
    SampledWaveform,
    make_grid,
)

LN2 = math.log(2)
PARAM_NAMES = ("D", "omega_c", "gamma21", "delta_c", "gamma31")
CONSISTENCY_THRESHOLD = 0.15
# weights used for noiseless synthetic data
NOMINAL_SIGMA = 1e-3

_POLY = {
    "LambdaD1": (0.70, 4.20e-5, 4.87e-7),
    "NTypeD2": (0.70, 3.90e-4, 1.47e-6),
}


class FitError(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _scheme(scheme: str) -> str:
    alias = {"D1": "LambdaD1", "D2": "NTypeD2"}
    scheme = alias.get(scheme, scheme)
    if scheme not in _POLY:
        raise ParameterError("scheme", f"unknown scheme {scheme!r}")
    return scheme


def gamma31_model(D, scheme: str = "LambdaD1"):
    """Empirical optical-coherence decay rate versus OD, in Gamma.

    For the N-type scheme the same value applies to gamma41.
    """
    c0, c1, c2 = _POLY[_scheme(scheme)]
    d = np.asarray(D, dtype=float)
    if np.any(d < 0):
        raise ParameterError("D", "must be >= 0")
    out = c0 + c1 * d + c2 * d * d
    return float(out) if out.ndim == 0 else out


def gamma31_from_product(product: float, scheme: str = "LambdaD1") -> float:
    """gamma31 consistent with the model given only D*gamma31."""
    if product <= 0:
        return _POLY[_scheme(scheme)][0]
    f = lambda g: g - gamma31_model(product / g, scheme)
    return brentq(f, 1e-3, 1e3)


@dataclass(frozen=True)
class NoiseModel:
    """Additive Gaussian noise.

    ``spectrum_sigma`` is absolute (transmission units); ``trace_sigma``
    is relative to the input peak intensity.
    """

    spectrum_sigma: float = 0.0
    trace_sigma: float = 0.0


@dataclass
class MeasuredDataset:
    delta_p: np.ndarray
    transmission: np.ndarray
    sigma: np.ndarray
    t: Optional[np.ndarray] = None
    intensity_out: Optional[np.ndarray] = None
    intensity_in: Optional[np.ndarray] = None
    trace_sigma: Optional[np.ndarray] = None
    scheme: str = "LambdaD1"
    t_p: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.delta_p = np.asarray(self.delta_p, dtype=float)
        self.transmission = np.asarray(self.transmission, dtype=float)
        self.sigma = np.broadcast_to(np.asarray(self.sigma, dtype=float), self.delta_p.shape).copy()
        self.scheme = _scheme(self.scheme)
        if self.delta_p.size < 20:
            raise ParameterError("spectrum", "need at least 20 spectrum points")
        if self.transmission.shape != self.delta_p.shape:
            raise ParameterError("spectrum", "delta_p and transmission differ in length")
        if not (np.all(np.isfinite(self.delta_p)) and np.all(np.isfinite(self.transmission))):
            raise ParameterError("spectrum", "contains non-finite values")
        if np.any(self.sigma <= 0):
            raise ParameterError("sigma", "must be > 0")
        if self.t is not None:
            self.t = np.asarray(self.t, dtype=float)
            self.intensity_out = np.asarray(self.intensity_out, dtype=float)
            self.intensity_in = np.asarray(self.intensity_in, dtype=float)
            if self.trace_sigma is None:
                raise ParameterError("trace_sigma", "needed with a slow-light trace")
            self.trace_sigma = np.broadcast_to(np.asarray(self.trace_sigma, dtype=float), self.t.shape).copy()
            if np.any(self.trace_sigma <= 0):
                raise ParameterError("trace_sigma", "must be > 0")

    @property
    def has_trace(self) -> bool:
        return self.t is not None


@dataclass
class FitResult:
    params: dict
    intervals: dict  # 2-sigma half widths
    products: dict
    product_intervals: dict
    consistency: float
    consistent: bool
    covariance: np.ndarray
    chi2: float
    dof: int
    stages: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def covers(self, truth: dict) -> dict:
        return {k: abs(self.params[k] - truth[k]) <= self.intervals[k] for k in self.params}

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "intervals_2sigma": self.intervals,
            "products": self.products,
            "product_intervals_2sigma": self.product_intervals,
            "consistency": self.consistency,
            "consistent": self.consistent,
            "chi2": self.chi2,
            "dof": self.dof,
            "covariance": {"names": list(PARAM_NAMES), "matrix": self.covariance.tolist()},
            "stages": self.stages,
            "warnings": self.warnings,
        }


# ------------------------------------------------------------ forward models

def _medium(scheme, D, gamma21, gamma31, delta_s=None):
    kw = dict(D=D, gamma21=gamma21, gamma31=gamma31, scheme=scheme)
    if scheme == "NTypeD2":
        base = MediumParams.cs_d2()
        kw["delta_s"] = base.delta_s if delta_s is None else delta_s
        kw["transition"] = base.transition
    return MediumParams(**kw)


def model_transmission(delta_p, params: dict, scheme: str = "LambdaD1", delta_s=None,
                       delta_c_mode: str = "direct"):
    med = _medium(scheme, params["D"], params["gamma21"], params["gamma31"], delta_s)
    fld = FieldParams(omega_c=params["omega_c"], delta_c=params["delta_c"])
    f = response(0.0, med, fld, np.asarray(delta_p, dtype=float), delta_c_mode)
    return np.exp(2 * np.real(f))


def _gauss(t, amp, tc, w):
    return amp * np.exp(-4 * LN2 * ((t - tc) / w) ** 2)


def _gauss_jac(t, amp, tc, w):
    g = np.exp(-4 * LN2 * ((t - tc) / w) ** 2)
    x = 8 * LN2 * (t - tc) / w**2
    return np.stack([g, amp * g * x, amp * g * x * (t - tc) / w], axis=1)


def _gauss_fit(t, y, sigma):
    i = int(np.argmax(y))
    half = y >= y[i] / 2
    w0 = max(t[half][-1] - t[half][0], 3 * (t[1] - t[0]))
    popt, _ = curve_fit(_gauss, t, y, p0=(y[i], t[i], w0), sigma=sigma, jac=_gauss_jac,
                        xtol=1e-14, ftol=1e-14, gtol=1e-14)
    j = _gauss_jac(t, *popt) / np.asarray(sigma)[:, None]
    return popt, np.linalg.inv(j.T @ j)


def trace_features(t, i_out, i_in, sigma_out=None, sigma_in=None):
    """Delay, broadening and energy transmission from single-Gaussian fits.

    Returns (features, covariance) with features = (t_d, beta, eta).
    Without sigmas the covariance is None.
    """
    unit = np.ones_like(t)
    pin, cin = _gauss_fit(t, i_in, unit if sigma_in is None else sigma_in)
    pout, cout = _gauss_fit(t, i_out, unit if sigma_out is None else sigma_out)
    a0, t0, w0 = pin
    a1, t1, w1 = pout
    feats = np.array([t1 - t0, w1 / w0, (a1 * w1) / (a0 * w0)])
    if sigma_out is None:
        return feats, None
    # delta method over the six Gaussian parameters
    jac = np.zeros((3, 6))
    jac[0, 1], jac[0, 4] = -1, 1
    jac[1, 2], jac[1, 5] = -w1 / w0**2, 1 / w0
    e = feats[2]
    jac[2, 0], jac[2, 2], jac[2, 3], jac[2, 5] = -e / a0, -e / w0, e / a1, e / w1
    full = np.zeros((6, 6))
    full[:3, :3], full[3:, 3:] = cin, cout
    return feats, jac @ full @ jac.T


def _simulate_trace(params, scheme, pulse: GaussianPulse, delta_s=None, t=None):
    med = _medium(scheme, params["D"], params["gamma21"], params["gamma31"], delta_s)
    fld = FieldParams(omega_c=params["omega_c"], delta_c=params["delta_c"])
    if t is None:
        t = make_grid(pulse, med, fld).t
    res = propagate_pulse(pulse.sample(t), med, fld)
    return t, res.output.intensity


def synth_dataset(params: dict, noise: NoiseModel = NoiseModel(), scheme: str = "LambdaD1",
                  t_p: float = 5.95, seed: int = 0, delta_p=None, with_trace: bool = True,
                  delta_s=None, delta_c_mode: str = "direct", trace_params: Optional[dict] = None):
    """Forward-model a spectrum and slow-light trace, with seeded Gaussian noise.

    ``trace_params`` lets the trace come from different parameters than the
    spectrum (useful to build deliberately inconsistent data).
    """
    scheme = _scheme(scheme)
    rng = np.random.default_rng(seed)
    if delta_p is None:
        bw = params["omega_c"] ** 2 / math.sqrt(max(params["D"] * params["gamma31"], 1e-12))
        delta_p = params["delta_c"] + np.linspace(-3, 3, 201) * min(bw, params["omega_c"] / 2)
    delta_p = np.asarray(delta_p, dtype=float)
    clean = model_transmission(delta_p, params, scheme, delta_s, delta_c_mode)
    sig = noise.spectrum_sigma
    trans = clean + (rng.normal(0, sig, clean.shape) if sig > 0 else 0)
    kw = dict(delta_p=delta_p, transmission=trans, sigma=sig if sig > 0 else NOMINAL_SIGMA, scheme=scheme,
              t_p=t_p, metadata={"truth": dict(params), "seed": seed, "noise": vars(noise),
                                 "delta_s": delta_s, "delta_c_mode": delta_c_mode})
    if with_trace:
        pulse = GaussianPulse(omega_p0=1.0, t_p=t_p)
        tp_params = dict(params if trace_params is None else trace_params)
        t, i_out = _simulate_trace(tp_params, scheme, pulse, delta_s)
        i_in = np.abs(pulse.amplitude(t)) ** 2
        tsig = noise.trace_sigma
        if tsig > 0:
            i_out = i_out + rng.normal(0, tsig, t.shape)
            i_in = i_in + rng.normal(0, tsig, t.shape)
        kw.update(t=t, intensity_out=i_out, intensity_in=i_in, trace_sigma=tsig if tsig > 0 else NOMINAL_SIGMA)
    return MeasuredDataset(**kw)


# ------------------------------------------------------------ stage 1

def _initial_guesses(data: MeasuredDataset, n: int):
    x, y = data.delta_p, data.transmission
    i = int(np.argmax(y))
    peak = max(y[i], 1e-3)
    half = np.flatnonzero(y >= peak / 2)
    width = max(x[half[-1]] - x[half[0]], 2 * np.min(np.diff(np.sort(x))))
    delta_c = x[i]
    starts = []
    # the window width fixes only omega_c^2 / sqrt(D gamma31); spread omega_c around 4x the width
    for scale in (1.0, 0.5, 2.0, 0.25, 4.0)[:n]:
        oc = scale * 4.0 * width
        d_g31 = LN2 * oc**4 / (2 * width**2)
        d_g21 = max(-math.log(min(peak, 0.999)) * oc**2 / 2, 0.0)
        starts.append(np.array([oc, delta_c, d_g21, d_g31]))
    return starts


def _spectrum_residuals(x, data, gamma31, delta_s, delta_c_mode):
    oc, dc, d_g21, d_g31 = x
    g31 = gamma31 if gamma31 is not None else gamma31_from_product(d_g31, data.scheme)
    D = d_g31 / g31
    params = {"D": D, "omega_c": oc, "gamma21": d_g21 / D, "delta_c": dc, "gamma31": g31}
    return (model_transmission(data.delta_p, params, data.scheme, delta_s, delta_c_mode)
            - data.transmission) / data.sigma


def fit_spectrum(data: MeasuredDataset, gamma31: Optional[float] = None, n_starts: int = 5,
                 jobs: int = 1, delta_s=None, delta_c_mode: Optional[str] = None) -> dict:
    """Weighted least squares for (omega_c, delta_c, D*gamma21, D*gamma31).

    ``gamma31`` fixes the weakly identifiable split of D*gamma31; by
    default it is tied to the empirical gamma31(D) model.  Intervals are
    2 sigma from the local covariance.
    """
    if delta_s is None:
        delta_s = data.metadata.get("delta_s")
    if delta_c_mode is None:
        delta_c_mode = data.metadata.get("delta_c_mode") or "direct"
    starts = _initial_guesses(data, n_starts)
    lower = [1e-6, -np.inf, -np.inf, 1e-9]

    def run(x0):
        try:
            return least_squares(_spectrum_residuals, x0, args=(data, gamma31, delta_s, delta_c_mode),
                                 bounds=(lower, np.inf), x_scale="jac", xtol=1e-14, ftol=1e-14,
                                 gtol=1e-14, max_nfev=4000)
        except (ValueError, ArithmeticError) as exc:
            return exc

    results = parallel_map(run, starts, jobs)
    good = [(i, r) for i, r in enumerate(results) if not isinstance(r, Exception) and r.success]
    if not good:
        raise FitError("spectrum fit did not converge from any start",
                       {"starts": [s.tolist() for s in starts],
                        "messages": [str(r) if isinstance(r, Exception) else r.message for r in results]})
    # lowest cost wins; ties go to the earliest start
    best_i, best = min(good, key=lambda ir: (round(ir[1].cost, 12), ir[0]))
    jac = best.jac
    cov = np.linalg.pinv(jac.T @ jac)
    err2 = 2 * np.sqrt(np.diag(cov))
    oc, dc, d_g21, d_g31 = best.x
    g31 = gamma31 if gamma31 is not None else gamma31_from_product(d_g31, data.scheme)
    names = ("omega_c", "delta_c", "D_gamma21", "D_gamma31")
    return {
        "values": dict(zip(names, map(float, best.x))),
        "intervals": dict(zip(names, map(float, err2))),
        "covariance": cov,
        "chi2": float(2 * best.cost),
        "dof": int(data.delta_p.size - 4),
        "gamma31_assumed": float(g31),
        "D_implied": float(d_g31 / g31),
        "start_index": best_i,
    }


# ------------------------------------------------------------ stages 2-3

def invert_slow_light(t_d, beta, eta, omega_c, t_p):
    """D, gamma31, gamma21 from delay, broadening and transmission."""
    D = t_d * omega_c**2
    gamma31 = max(beta**2 - 1, 0.0) * t_p**2 * omega_c**4 / (32 * LN2 * D)
    gamma21 = -math.log(eta * beta) / (2 * t_d)
    return D, gamma31, gamma21


def _joint_residuals(x, data, pulse, feats, feat_chol, delta_s, delta_c_mode):
    params = dict(zip(PARAM_NAMES, x))
    r_spec = (model_transmission(data.delta_p, params, data.scheme, delta_s, delta_c_mode)
              - data.transmission) / data.sigma
    t, i_out = _simulate_trace(params, data.scheme, pulse, delta_s)
    i_in = np.abs(pulse.amplitude(t)) ** 2
    model_feats, _ = trace_features(t, i_out, i_in)
    r_tr = np.linalg.solve(feat_chol, model_feats - feats)
    return np.concatenate([r_spec, r_tr])


def fit_joint(data: MeasuredDataset, jobs: int = 1, threshold: float = CONSISTENCY_THRESHOLD,
              delta_s=None, delta_c_mode: Optional[str] = None, fix: Optional[dict] = None) -> FitResult:
    """Spectrum fit, slow-light inversion, consistency check, then a joint refinement."""
    if not data.has_trace:
        raise ParameterError("slowlight", "joint fit needs a slow-light trace")
    if data.t_p is None:
        raise ParameterError("t_p", "joint fit needs the input pulse width")
    if delta_s is None:
        delta_s = data.metadata.get("delta_s")
    if delta_c_mode is None:
        delta_c_mode = data.metadata.get("delta_c_mode") or "direct"
    fix = dict(fix or {})
    notes = []

    s1 = fit_spectrum(data, jobs=jobs, delta_s=delta_s, delta_c_mode=delta_c_mode)
    oc = s1["values"]["omega_c"]

    feats, fcov = trace_features(data.t, data.intensity_out, data.intensity_in,
                                 data.trace_sigma, data.trace_sigma)
    t_d, beta, eta = feats
    D2, g31_2, g21_2 = invert_slow_light(t_d, beta, eta, oc, data.t_p)
    s2 = {"t_d": float(t_d), "beta": float(beta), "eta_tran": float(eta),
          "D": D2, "gamma31": g31_2, "gamma21": g21_2}

    dg31_1 = s1["values"]["D_gamma31"]
    consistency = abs(D2 * g31_2 - dg31_1) / dg31_1
    consistent = consistency <= threshold
    if not consistent:
        msg = f"D*gamma31 differs by {consistency:.1%} between spectrum and slow light (threshold {threshold:.0%})"
        notes.append(msg)
        warnings.warn(msg, stacklevel=2)

    # stage 4: all five parameters against spectrum + trace features
    pulse = GaussianPulse(omega_p0=1.0, t_p=data.t_p)
    chol = np.linalg.cholesky(fcov)
    g31_0 = dg31_1 / D2 if D2 > 0 else s1["gamma31_assumed"]
    x0 = np.array([D2, oc, s1["values"]["D_gamma21"] / D2, s1["values"]["delta_c"], g31_0])
    free = [i for i, n in enumerate(PARAM_NAMES) if n not in fix]
    full = x0.copy()
    for n, v in fix.items():
        if n not in PARAM_NAMES:
            raise ParameterError("fix", f"unknown parameter {n!r}")
        full[PARAM_NAMES.index(n)] = float(v)

    def resid(xf):
        x = full.copy()
        x[free] = xf
        return _joint_residuals(x, data, pulse, feats, chol, delta_s, delta_c_mode)

    lower = np.array([1e-6, 1e-6, -np.inf, -np.inf, 1e-6])[free]
    try:
        sol = least_squares(resid, full[free], bounds=(lower, np.inf), x_scale="jac",
                            diff_step=1e-6, xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=400)
    except (ValueError, ArithmeticError) as exc:
        raise FitError(f"joint refinement failed: {exc}", {"stage1": s1["values"], "stage2": s2}) from exc
    if not sol.success:
        raise FitError(f"joint refinement did not converge: {sol.message}", {"nfev": sol.nfev})
    x = full.copy()
    x[free] = sol.x
    cov_free = np.linalg.pinv(sol.jac.T @ sol.jac)
    cov = np.zeros((5, 5))
    cov[np.ix_(free, free)] = cov_free
    params = dict(zip(PARAM_NAMES, map(float, x)))
    intervals = {n: float(2 * math.sqrt(max(cov[i, i], 0.0))) for i, n in enumerate(PARAM_NAMES)}

    def product_interval(i, j):
        grad = np.zeros(5)
        grad[i], grad[j] = x[j], x[i]
        return float(2 * math.sqrt(max(grad @ cov @ grad, 0.0)))

    iD, i21, i31 = 0, 2, 4
    products = {"D_gamma21": params["D"] * params["gamma21"], "D_gamma31": params["D"] * params["gamma31"]}
    prod_iv = {"D_gamma21": product_interval(iD, i21), "D_gamma31": product_interval(iD, i31)}
    n_res = sol.fun.size
    return FitResult(
        params=params, intervals=intervals, products=products, product_intervals=prod_iv,
        consistency=float(consistency), consistent=bool(consistent), covariance=cov,
        chi2=float(2 * sol.cost), dof=int(n_res - len(free)),
        stages={"spectrum": {k: v for k, v in s1.items() if k != "covariance"}, "slowlight": s2},
        warnings=notes,
    )
