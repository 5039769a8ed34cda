//! Classical Lorentz norms `‖·‖_{p,q}` and `‖·‖_{(p,q)}`, weighted Lorentz
//! norms `Λ^q(w)` and `Γ^q(w)`, and the weight criterion profiles.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, RikitError};
use crate::funcs::{Body, RearrangedFunction};
use crate::quad::{integrate_line, log_integral_exp, QuadratureSpec};

pub use crate::norm::{fundamental_function, NormFunctional, NormKind};

/// Exponents of `L^{p,q}`; `q` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams {
    pub p: f64,
    pub q: f64,
}

impl LorentzParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let s = Self { p, q };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || !self.p.is_finite() {
            return invalid(format!("Lorentz p must lie in (1, inf), got {}", self.p));
        }
        if !(self.q >= 1.0) {
            return invalid(format!("Lorentz q must be >= 1 or inf, got {}", self.q));
        }
        Ok(())
    }

    /// Conjugate exponent `p / (p - 1)`.
    pub fn conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

/// Which rearrangement enters the norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// `f*`
    Star,
    /// `f**`
    DoubleStar,
}

impl Mode {
    pub fn is_maximal(self) -> bool {
        self == Mode::DoubleStar
    }
}

/// `‖χ_[0,t)‖_{p,q} / t^{1/p} = (p/q)^{1/q}`.
pub fn star_fundamental_coefficient(p: f64, q: f64) -> f64 {
    if q.is_infinite() {
        1.0
    } else {
        (p / q).powf(1.0 / q)
    }
}

/// `‖χ_[0,t)‖_{(p,q)} / t^{1/p} = (p²/(q(p-1)))^{1/q}`.
pub fn doublestar_fundamental_coefficient(p: f64, q: f64) -> f64 {
    if q.is_infinite() {
        1.0
    } else {
        (p * p / (q * (p - 1.0))).powf(1.0 / q)
    }
}

/// Constant `c` in `‖f‖_{(p,r)} ≤ c ‖f‖_{(p,q)}` for `q < r`:
/// `max(K, 1/K)^{1/q - 1/r}` with `K = p²/(q(p-1))`. Interpolating the
/// `r = ∞` bound `sup t^{1/p} f** ≤ K^{-1/q} ‖f‖_{(p,q)}` gives the `1/K`
/// branch; `K^{1/q-1/r}` alone is too small once `q > p p'`.
pub fn embedding_constant(p: f64, q: f64, r: f64) -> f64 {
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    let k = p * p / (q * (p - 1.0));
    k.max(1.0 / k).powf(1.0 / q - inv_r)
}

/// `‖f‖_{p,q}` (star) or `‖f‖_{(p,q)}` (doublestar). `+inf` when the
/// integral diverges.
pub fn lorentz_norm(
    f: &RearrangedFunction,
    params: LorentzParams,
    mode: Mode,
    quad: &QuadratureSpec,
) -> Result<f64> {
    params.validate()?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let (scalar, unit) = (f.scalar(), f.unscaled());
    let alpha = 1.0 / params.p;
    if params.q.is_infinite() {
        return Ok(scalar * unit.sup_weighted(alpha, mode.is_maximal()).value);
    }
    let q = params.q;
    if let (Mode::Star, Body::Step(s)) = (mode, unit.body()) {
        // ∫ v^q d(t^{q/p}) (p/q) piece by piece
        let r = unit.dilation();
        let mut acc = 0.0;
        let mut start = 0.0f64;
        for (v, e) in s.values().iter().zip(s.ends()) {
            let end = e / r;
            acc += v.powf(q) * (end.powf(q / params.p) - start.powf(q / params.p));
            start = end;
        }
        return Ok(scalar * (acc * params.p / q).powf(1.0 / q));
    }
    let h = |u: f64| q * unit.log_weighted_mode(u, alpha, mode.is_maximal());
    let log_int = log_integral_exp(h, &unit.breakpoints(), quad, "Lorentz norm")?;
    Ok(scalar * (log_int / q).exp())
}

/// One `coef · t^exponent` piece of a weight, valid up to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPiece {
    pub end: f64,
    pub coef: f64,
    pub exponent: f64,
}

type LogFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Weight given by `ln w(e^u)` and, optionally, `ln W(e^u)`.
#[derive(Clone)]
pub struct CustomWeight {
    name: String,
    log_density: LogFn,
    log_primitive: Option<LogFn>,
    breaks: Vec<f64>,
    quad: QuadratureSpec,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeight")
            .field("name", &self.name)
            .field("closed_primitive", &self.log_primitive.is_some())
            .field("breaks", &self.breaks)
            .finish()
    }
}

/// A weight `w ≥ 0` on `(0, ∞)` with `W(t) = ∫_0^t w < ∞`.
#[derive(Debug, Clone)]
pub enum Weight {
    /// Consecutive power pieces starting at 0; zero after the last end.
    PiecewisePower(Vec<PowerPiece>),
    Custom(CustomWeight),
}

const WEIGHT_GRID: usize = 256;

impl Weight {
    pub fn piecewise(pieces: Vec<PowerPiece>) -> Result<Self> {
        let mut prev = 0.0;
        for (i, p) in pieces.iter().enumerate() {
            if !(p.end > prev) {
                return invalid(format!("weight piece {i}: ends must increase from 0"));
            }
            if p.end.is_infinite() && i + 1 != pieces.len() {
                return invalid("only the last weight piece may be unbounded");
            }
            if !(p.coef >= 0.0) || !p.coef.is_finite() || !p.exponent.is_finite() {
                return invalid(format!(
                    "weight piece {i}: need finite coef >= 0 and finite exponent"
                ));
            }
            prev = p.end;
        }
        if let Some(first) = pieces.first() {
            if first.coef > 0.0 && first.exponent <= -1.0 {
                return invalid("weight is not integrable at 0");
            }
        }
        Ok(Weight::PiecewisePower(pieces))
    }

    /// `coef · t^exponent` on all of `(0, ∞)`.
    pub fn power(coef: f64, exponent: f64) -> Result<Self> {
        Self::piecewise(vec![PowerPiece {
            end: f64::INFINITY,
            coef,
            exponent,
        }])
    }

    /// `χ_[0,len)`.
    pub fn indicator(len: f64) -> Result<Self> {
        Self::piecewise(vec![PowerPiece {
            end: len,
            coef: 1.0,
            exponent: 0.0,
        }])
    }

    pub fn zero() -> Self {
        Weight::PiecewisePower(Vec::new())
    }

    /// Weight from a pointwise density in `t`. `breaks_t` lists kinks.
    pub fn from_density(
        name: impl Into<String>,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breaks_t: &[f64],
    ) -> Result<Self> {
        let log_density: LogFn = Arc::new(move |u: f64| density(u.exp()).ln());
        Self::custom(
            name,
            log_density,
            None,
            breaks_t.iter().map(|t| t.ln()).collect(),
        )
    }

    /// Weight from its log-axis forms. Samples `w` on a log grid and rejects
    /// negative or non-finite values.
    pub fn custom(
        name: impl Into<String>,
        log_density: LogFn,
        log_primitive: Option<LogFn>,
        breaks: Vec<f64>,
    ) -> Result<Self> {
        let name = name.into();
        let lo = breaks.iter().copied().fold(-30.0f64, f64::min) - 5.0;
        let hi = breaks.iter().copied().fold(30.0f64, f64::max) + 5.0;
        for i in 0..WEIGHT_GRID {
            let u = lo + (hi - lo) * i as f64 / (WEIGHT_GRID - 1) as f64;
            let v = log_density(u);
            if v.is_nan() || v == f64::INFINITY {
                return invalid(format!(
                    "weight {name}: negative or non-finite at t = {:e}",
                    u.exp()
                ));
            }
        }
        let w = Weight::Custom(CustomWeight {
            name,
            log_density,
            log_primitive,
            breaks,
            quad: QuadratureSpec::default(),
        });
        if w.log_primitive(hi) == f64::INFINITY {
            return invalid("weight is not locally integrable at 0");
        }
        Ok(w)
    }

    /// Kinks of `w` on the log axis.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Weight::PiecewisePower(ps) => ps
                .iter()
                .filter(|p| p.end.is_finite())
                .map(|p| p.end.ln())
                .collect(),
            Weight::Custom(c) => c.breaks.clone(),
        }
    }

    /// `w(t)`.
    pub fn density(&self, t: f64) -> f64 {
        let u = t.ln();
        (self.log_density_dt(u) - u).exp()
    }

    /// `ln(w(t) t)` at `t = e^u`: the log of `w(t) dt` in the `du` measure.
    pub fn log_density_dt(&self, u: f64) -> f64 {
        match self {
            Weight::PiecewisePower(ps) => {
                let t_end = |p: &PowerPiece| p.end.ln();
                match ps.iter().find(|p| u < t_end(p)) {
                    Some(p) if p.coef > 0.0 => p.coef.ln() + (p.exponent + 1.0) * u,
                    _ => f64::NEG_INFINITY,
                }
            }
            Weight::Custom(c) => (c.log_density)(u) + u,
        }
    }

    /// `ln W(e^u)`; `+inf` if `w` is not integrable on `(0, e^u)`.
    pub fn log_primitive(&self, u: f64) -> f64 {
        match self {
            Weight::PiecewisePower(ps) => {
                let terms = pieces_on(ps, f64::NEG_INFINITY, u, |p, lo, hi| {
                    log_power_integral(p.coef, p.exponent + 1.0, lo, hi)
                });
                log_sum_exp(&terms)
            }
            Weight::Custom(c) => {
                if let Some(lp) = &c.log_primitive {
                    return lp(u);
                }
                let ld = &c.log_density;
                let r = integrate_line(|v| (ld(v) + v).exp(), None, Some(u), &c.breaks, &c.quad);
                match r.value_or_infinite("weight primitive") {
                    Ok(v) => v.ln(),
                    Err(_) => f64::NAN,
                }
            }
        }
    }

    /// `W(t)`.
    pub fn primitive(&self, t: f64) -> f64 {
        self.log_primitive(t.ln()).exp()
    }

    /// `ln ∫_{e^u}^∞ w(s) s^{-k} ds`; `Diverged` if the tail is infinite.
    pub fn log_tail(&self, u: f64, k: f64) -> Result<f64> {
        let v = match self {
            Weight::PiecewisePower(ps) => {
                let terms = pieces_on(ps, u, f64::INFINITY, |p, lo, hi| {
                    log_power_integral(p.coef, p.exponent - k + 1.0, lo, hi)
                });
                log_sum_exp(&terms)
            }
            Weight::Custom(c) => {
                let ld = &c.log_density;
                let r = integrate_line(
                    |v| (ld(v) + (1.0 - k) * v).exp(),
                    Some(u),
                    None,
                    &c.breaks,
                    &c.quad,
                );
                r.value_or_infinite("weight tail")?.ln()
            }
        };
        if v == f64::INFINITY {
            return Err(RikitError::Diverged(format!(
                "∫_t^∞ w(s)/s^{k} ds at t = {:e}",
                u.exp()
            )));
        }
        Ok(v)
    }
}

/// Calls `f(piece, lo, hi)` on each piece clipped to `(a, b)` (log axis).
fn pieces_on(
    ps: &[PowerPiece],
    a: f64,
    b: f64,
    f: impl Fn(&PowerPiece, f64, f64) -> f64,
) -> Vec<f64> {
    let mut out = Vec::new();
    let mut start = f64::NEG_INFINITY;
    for p in ps {
        let end = p.end.ln();
        let (lo, hi) = (start.max(a), end.min(b));
        if lo < hi {
            out.push(f(p, lo, hi));
        }
        start = end;
    }
    out
}

/// `ln ∫_{e^lo}^{e^hi} coef s^{b-1} ds`, stable for any `lo < hi` including
/// infinite ends; `+inf` when divergent.
fn log_power_integral(coef: f64, b: f64, lo: f64, hi: f64) -> f64 {
    if coef == 0.0 || !(lo < hi) {
        return f64::NEG_INFINITY;
    }
    let lc = coef.ln();
    if b == 0.0 {
        if lo.is_infinite() || hi.is_infinite() {
            return f64::INFINITY;
        }
        return lc + (hi - lo).ln();
    }
    if b > 0.0 {
        if hi == f64::INFINITY {
            return f64::INFINITY;
        }
        let span = if lo == f64::NEG_INFINITY {
            0.0
        } else {
            (-(b * (lo - hi)).exp_m1()).ln()
        };
        return lc + b * hi + span - b.ln();
    }
    if lo == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let span = if hi == f64::INFINITY {
        0.0
    } else {
        (-(b * (hi - lo)).exp_m1()).ln()
    };
    lc + b * lo + span - (-b).ln()
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Which weighted Lorentz space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightedMode {
    /// `Λ^q(w)`, built on `f*`.
    Lambda,
    /// `Γ^q(w)`, built on `f**`.
    Gamma,
}

/// `(∫ F(t)^q w(t) dt)^{1/q}` with `F = f*` (lambda) or `f**` (gamma).
pub fn weighted_lorentz_norm(
    f: &RearrangedFunction,
    q: f64,
    w: &Weight,
    mode: WeightedMode,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return invalid(format!(
            "weighted Lorentz q must be finite and >= 1, got {q}"
        ));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let (scalar, unit) = (f.scalar(), f.unscaled());
    let maximal = mode == WeightedMode::Gamma;
    let h = |u: f64| {
        let lw = w.log_density_dt(u);
        if lw == f64::NEG_INFINITY {
            return lw;
        }
        q * unit.log_weighted_mode(u, 0.0, maximal) + lw
    };
    let mut breaks = unit.breakpoints();
    breaks.extend(w.breakpoints());
    let log_int = log_integral_exp(h, &breaks, quad, "weighted Lorentz norm")?;
    Ok(scalar * (log_int / q).exp())
}

/// `u(t) = ∫_t^∞ w(s)/s ds`, for which `‖f‖_{Γ¹(w)} = ‖f‖_{Λ¹(u)}`.
/// Its primitive is `W(t) + t u(t)`.
pub fn gamma1_weight_transform(w: &Weight) -> Result<Weight> {
    let probe = w.breakpoints().into_iter().fold(0.0f64, f64::max);
    w.log_tail(probe, 1.0)?;
    let wd = w.clone();
    let log_density: LogFn = Arc::new(move |u: f64| wd.log_tail(u, 1.0).unwrap_or(f64::NAN));
    let wp = w.clone();
    let log_primitive: LogFn = Arc::new(move |u: f64| {
        let tail = wp.log_tail(u, 1.0).unwrap_or(f64::NAN);
        log_sum_exp(&[wp.log_primitive(u), u + tail])
    });
    Weight::custom(
        "gamma1-transform",
        log_density,
        Some(log_primitive),
        w.breakpoints(),
    )
}

/// Which criterion quantity a profile samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionKind {
    /// `W(t) / V(t)`
    Lambda,
    /// `(W(t) + t^q ∫_t^∞ w(s)/s^q ds) / V(t)`
    Gamma,
}

/// Criterion values on a grid, normalised by `V(t) = (p/q) t^{q/p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionProfile {
    pub kind: CriterionKind,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// The tail integral diverged at this grid point.
    pub diverged: Vec<bool>,
    pub min: f64,
    pub max: f64,
}

impl CriterionProfile {
    /// `max / min` over the finite values.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

pub fn weight_criterion_profile(
    w: &Weight,
    p: f64,
    q: f64,
    grid: &[f64],
    kind: CriterionKind,
) -> Result<CriterionProfile> {
    LorentzParams::new(p, q)?;
    if !q.is_finite() {
        return invalid("criterion profiles need finite q");
    }
    if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return invalid("criterion grid must be nonempty with positive finite points");
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut diverged = Vec::with_capacity(grid.len());
    for &t in grid {
        let u = t.ln();
        let log_v = (p / q).ln() + q / p * u;
        let lw = w.log_primitive(u);
        let lnum = match kind {
            CriterionKind::Lambda => Ok(lw),
            CriterionKind::Gamma => w
                .log_tail(u, q)
                .map(|tail| log_sum_exp(&[lw, q * u + tail])),
        };
        match lnum {
            Ok(l) => {
                values.push((l - log_v).exp());
                diverged.push(false);
            }
            Err(RikitError::Diverged(_)) => {
                values.push(f64::INFINITY);
                diverged.push(true);
            }
            Err(e) => return Err(e),
        }
    }
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let min = finite.clone().fold(f64::INFINITY, f64::min);
    let max = finite.fold(f64::NEG_INFINITY, f64::max);
    Ok(CriterionProfile {
        kind,
        t: grid.to_vec(),
        values,
        diverged,
        min,
        max,
    })
}
