//! Functions on `[0, ∞)` represented through their nonincreasing
//! rearrangements.
//!
//! Norm integrands are evaluated on the log axis `u = ln t`, so every body
//! exposes `ln(t^α f*(t))` and `ln(t^α f**(t))` directly. Closed forms keep
//! these finite where `t` itself would under- or overflow.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result, RikitError};
use crate::quad::{integrate_line, QuadratureSpec};

/// A nonnegative step function laid out on consecutive intervals
/// `[0, l_0), [l_0, l_0 + l_1), ...` as `(value, length)` pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepFunction {
    pieces: Vec<(f64, f64)>,
}

impl StepFunction {
    pub fn new(pieces: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(v, l)) in pieces.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return invalid(format!("piece {i}: value must be finite and >= 0, got {v}"));
            }
            if !(l > 0.0) || !l.is_finite() {
                return invalid(format!("piece {i}: length must be finite and > 0, got {l}"));
            }
        }
        Ok(Self { pieces })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    fn ends(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .scan(0.0, |acc, &(_, l)| {
                *acc += l;
                Some(*acc)
            })
            .collect()
    }

    /// Value at position `t` of the layout.
    pub fn evaluate(&self, t: f64) -> f64 {
        let ends = self.ends();
        let idx = ends.partition_point(|e| *e <= t);
        self.pieces.get(idx).map_or(0.0, |p| p.0)
    }

    /// `|{x : f(x) > s}|`.
    pub fn distribution(&self, s: f64) -> f64 {
        let mut sorted: Vec<(f64, f64)> = self.pieces.iter().copied().filter(|p| p.0 > s).collect();
        sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        sorted.iter().map(|p| p.1).sum()
    }

    /// Pointwise sum on the common refinement of both layouts.
    pub fn add(&self, other: &StepFunction) -> StepFunction {
        let (ea, eb) = (self.ends(), other.ends());
        let mut cuts: Vec<f64> = ea.iter().chain(eb.iter()).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let (mut ia, mut ib) = (0usize, 0usize);
        let mut start = 0.0;
        let mut pieces = Vec::with_capacity(cuts.len());
        for end in cuts {
            while ia < ea.len() && ea[ia] <= start {
                ia += 1;
            }
            while ib < eb.len() && eb[ib] <= start {
                ib += 1;
            }
            let va = self.pieces.get(ia).map_or(0.0, |p| p.0);
            let vb = other.pieces.get(ib).map_or(0.0, |p| p.0);
            pieces.push((va + vb, end - start));
            start = end;
        }
        StepFunction { pieces }
    }

    pub fn rearrange(&self) -> StepDecreasing {
        rearrange_step(self)
    }
}

/// Nonincreasing rearrangement of a step function. Equal values merge and
/// zero pieces vanish; the empty input gives the zero function.
pub fn rearrange_step(f: &StepFunction) -> StepDecreasing {
    let mut sorted: Vec<(f64, f64)> = f.pieces.iter().copied().filter(|p| p.0 > 0.0).collect();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut values: Vec<f64> = Vec::new();
    let mut lengths: Vec<f64> = Vec::new();
    for (v, l) in sorted {
        if values.last() == Some(&v) {
            *lengths.last_mut().unwrap() += l;
        } else {
            values.push(v);
            lengths.push(l);
        }
    }
    let mut ends = Vec::with_capacity(lengths.len());
    let mut acc = 0.0;
    for l in lengths {
        acc += l;
        ends.push(acc);
    }
    StepDecreasing::from_parts(values, ends)
}

/// `f*` of a simple function: `values[i]` on `[ends[i-1], ends[i])`, zero
/// after the last end.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepDecreasing {
    values: Vec<f64>,
    ends: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepDecreasing {
    /// Validated constructor from `(value, right endpoint)` pairs.
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let mut prev: Option<(f64, f64)> = None;
        for (i, &(v, e)) in breakpoints.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() || !(e > 0.0) || !e.is_finite() {
                return invalid(format!(
                    "breakpoint {i}: need finite value > 0 and endpoint > 0"
                ));
            }
            if let Some((pv, pe)) = prev {
                if !(v < pv) {
                    return invalid(format!("breakpoint {i}: values must strictly decrease"));
                }
                if !(e > pe) {
                    return invalid(format!("breakpoint {i}: endpoints must strictly increase"));
                }
            }
            prev = Some((v, e));
        }
        let (values, ends) = breakpoints.into_iter().unzip();
        Ok(Self::from_parts(values, ends))
    }

    fn from_parts(values: Vec<f64>, ends: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        let mut start = 0.0;
        for (v, e) in values.iter().zip(&ends) {
            acc += v * (e - start);
            cumulative.push(acc);
            start = *e;
        }
        Self {
            values,
            ends,
            cumulative,
        }
    }

    /// Indicator of `[0, length)`.
    pub fn indicator(length: f64) -> Result<Self> {
        Self::new(vec![(1.0, length)])
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ends(&self) -> &[f64] {
        &self.ends
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let idx = self.ends.partition_point(|e| *e <= t);
        self.values.get(idx).copied().unwrap_or(0.0)
    }

    /// `∫_0^t f*`, exact.
    pub fn primitive(&self, t: f64) -> f64 {
        let idx = self.ends.partition_point(|e| *e <= t);
        if idx == self.values.len() {
            return self.total_mass();
        }
        let (start, base) = if idx == 0 {
            (0.0, 0.0)
        } else {
            (self.ends[idx - 1], self.cumulative[idx - 1])
        };
        base + self.values[idx] * (t - start)
    }

    fn log_weighted(&self, u: f64, alpha: f64) -> f64 {
        if self.values.is_empty() {
            return f64::NEG_INFINITY;
        }
        let t = u.exp();
        let idx = self.ends.partition_point(|e| *e <= t);
        match self.values.get(idx) {
            Some(v) => alpha * u + v.ln(),
            None => f64::NEG_INFINITY,
        }
    }

    fn log_weighted_maximal(&self, u: f64, alpha: f64) -> f64 {
        if self.values.is_empty() {
            return f64::NEG_INFINITY;
        }
        let t = u.exp();
        if t < self.ends[0] {
            return alpha * u + self.values[0].ln();
        }
        (alpha - 1.0) * u + self.primitive(t).ln()
    }

    /// Exact left-limit values of `ln(t^α F(t))` at the endpoints, where the
    /// supremum over `t` of a weighted step rearrangement is attained.
    fn sup_candidates(&self, alpha: f64, maximal: bool) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = self
            .ends
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let u = e.ln();
                let level = if maximal {
                    self.cumulative[i] / e
                } else {
                    self.values[i]
                };
                (u, alpha * u + level.ln())
            })
            .collect();
        if alpha == 0.0 {
            if let Some(v) = self.values.first() {
                out.push((f64::NEG_INFINITY, v.ln()));
            }
        }
        out
    }
}

/// Closed-form nonincreasing profile on `(0, ∞)`.
///
/// Implementations work on the log axis: `log_weighted(u, α)` is
/// `ln(e^(αu) f*(e^u))` and `log_weighted_maximal` the same for `f**`.
/// Returning `-inf` means zero; `+inf` from the maximal form means the
/// primitive diverges.
pub trait DecreasingProfile: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn log_weighted(&self, u: f64, alpha: f64) -> f64;
    fn log_weighted_maximal(&self, u: f64, alpha: f64) -> f64;
    /// `∫_0^t f*`; `Diverged` if `f*` is not integrable at zero.
    fn primitive(&self, t: f64) -> Result<f64>;
    fn has_closed_primitive(&self) -> bool {
        true
    }
    /// `sup {t : f*(t) > 0}` if finite.
    fn support(&self) -> Option<f64> {
        None
    }
    /// Kinks and jumps, on the log axis.
    fn breakpoints(&self) -> Vec<f64> {
        self.support().map(|s| vec![s.ln()]).unwrap_or_default()
    }
}

/// `t^(-β)` on `(0, b)`, zero after (`b` may be infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDecay {
    pub exponent: f64,
    pub support: Option<f64>,
}

impl DecreasingProfile for PowerDecay {
    fn name(&self) -> String {
        "power-decay".into()
    }

    fn log_weighted(&self, u: f64, alpha: f64) -> f64 {
        match self.support {
            Some(b) if u >= b.ln() => f64::NEG_INFINITY,
            _ => (alpha - self.exponent) * u,
        }
    }

    fn log_weighted_maximal(&self, u: f64, alpha: f64) -> f64 {
        let beta = self.exponent;
        if beta >= 1.0 {
            return f64::INFINITY;
        }
        match self.support {
            Some(b) if u >= b.ln() => {
                (b.ln() * (1.0 - beta) - (1.0 - beta).ln()) + (alpha - 1.0) * u
            }
            _ => (alpha - beta) * u - (1.0 - beta).ln(),
        }
    }

    fn primitive(&self, t: f64) -> Result<f64> {
        let beta = self.exponent;
        if beta >= 1.0 {
            return Err(RikitError::Diverged(format!("∫_0^t s^-{beta} ds")));
        }
        let x = self.support.map_or(t, |b| t.min(b));
        Ok(x.powf(1.0 - beta) / (1.0 - beta))
    }

    fn support(&self) -> Option<f64> {
        self.support
    }
}

/// `e^x x^(-s) Γ(s, x)` by the modified Lentz continued fraction; accurate
/// for `x >= 1`, `0 <= s < 1`.
fn upper_gamma_cf(s: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 4.0 * f64::EPSILON {
            break;
        }
    }
    h
}

/// `e^x x^(-s) γ(s, x)` by its power series; fast for `x` up to a few.
fn lower_gamma_series(s: f64, x: f64) -> f64 {
    let (mut term, mut sum) = (1.0 / s, 1.0 / s);
    for n in 1..10_000 {
        term *= x / (s + n as f64);
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            break;
        }
    }
    sum
}

/// `g(t) = t^(-1/p) (-ln t)^(-1/Q)` on `(0, e^(-p/Q))`, zero after.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    p: f64,
    q_big: f64,
    total: f64,
    /// `Γ(1 - 1/Q)`, absent when `Q = 1`.
    gamma_s: Option<f64>,
    quad: QuadratureSpec,
}

impl GFunction {
    pub fn new(p: f64, q_big: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return invalid(format!("g requires p in (1, inf), got {p}"));
        }
        if !(q_big >= 1.0) || !q_big.is_finite() {
            return invalid(format!("g requires Q in [1, inf), got {q_big}"));
        }
        let s = 1.0 - 1.0 / q_big;
        let gamma_s = (s > 0.0)
            .then(|| (-1.0f64).exp() * (upper_gamma_cf(s, 1.0) + lower_gamma_series(s, 1.0)));
        let mut g = Self {
            p,
            q_big,
            total: 0.0,
            gamma_s,
            quad: QuadratureSpec::default().with_rel_tol(1e-13),
        };
        g.total = g.primitive_below(g.support_log())?;
        Ok(g)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q_big(&self) -> f64 {
        self.q_big
    }

    fn support_log(&self) -> f64 {
        -self.p / self.q_big
    }

    fn conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `∫_0^∞ e^(-x/p') (|u| + x)^(-1/Q) dx`, so that `∫_0^(e^u) g = e^(u/p') I(u)`.
    fn scaled_primitive(&self, u: f64) -> Result<f64> {
        let (pc, inv_q, a) = (self.conj(), 1.0 / self.q_big, -u);
        let x = a / pc;
        let s = 1.0 - inv_q;
        // p'^(1-1/Q) e^x Γ(1-1/Q, x)
        if x >= 1.0 {
            return Ok(pc.powf(s) * x.powf(s) * upper_gamma_cf(s, x));
        }
        if let Some(gamma_s) = self.gamma_s {
            return Ok(pc.powf(s) * (x.exp() * gamma_s - x.powf(s) * lower_gamma_series(s, x)));
        }
        integrate_line(
            |x| (-x / pc).exp() * (a + x).powf(-inv_q),
            Some(0.0),
            None,
            &[],
            &self.quad,
        )
        .finite_value("primitive of g")
    }

    fn primitive_below(&self, u: f64) -> Result<f64> {
        Ok((u / self.conj()).exp() * self.scaled_primitive(u)?)
    }
}

impl DecreasingProfile for GFunction {
    fn name(&self) -> String {
        format!("g(p={}, Q={})", self.p, self.q_big)
    }

    fn log_weighted(&self, u: f64, alpha: f64) -> f64 {
        if u >= self.support_log() {
            return f64::NEG_INFINITY;
        }
        (alpha - 1.0 / self.p) * u - (-u).ln() / self.q_big
    }

    fn log_weighted_maximal(&self, u: f64, alpha: f64) -> f64 {
        if u >= self.support_log() {
            return self.total.ln() + (alpha - 1.0) * u;
        }
        match self.scaled_primitive(u) {
            Ok(i) => (alpha - 1.0 / self.p) * u + i.ln(),
            Err(_) => f64::NAN,
        }
    }

    fn primitive(&self, t: f64) -> Result<f64> {
        let u = t.ln();
        if u >= self.support_log() {
            return Ok(self.total);
        }
        self.primitive_below(u)
    }

    fn has_closed_primitive(&self) -> bool {
        false
    }

    fn support(&self) -> Option<f64> {
        Some(self.support_log().exp())
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.support_log()]
    }
}

/// The counterexample whose maximal function is
/// `f**(t) = 1/(t^(1/p)(1 - ln t))` on `(0, a)` and `c/t` after, with
/// `a = e^(1-2p)`, `c = e^((1-2p)/p')/(2p)`. Its rearrangement is
/// `f* = ψ'` with `ψ(t) = t^(1/p')/(1 - ln t)` on `(0, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct YCounterexample {
    p: f64,
}

impl YCounterexample {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return invalid(format!("Y counterexample requires p in (1, inf), got {p}"));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `a = exp(1 - 2p)`.
    pub fn a(&self) -> f64 {
        self.log_a().exp()
    }

    fn log_a(&self) -> f64 {
        1.0 - 2.0 * self.p
    }

    /// `c = exp((1 - 2p)/p') / (2p)`.
    pub fn c(&self) -> f64 {
        ((1.0 - 2.0 * self.p) / self.conj()).exp() / (2.0 * self.p)
    }
}

impl DecreasingProfile for YCounterexample {
    fn name(&self) -> String {
        format!("y-counterexample(p={})", self.p)
    }

    fn log_weighted(&self, u: f64, alpha: f64) -> f64 {
        if u >= self.log_a() {
            return f64::NEG_INFINITY;
        }
        let w = 1.0 - u;
        (alpha - 1.0 / self.p) * u + (w / self.conj() + 1.0).ln() - 2.0 * w.ln()
    }

    fn log_weighted_maximal(&self, u: f64, alpha: f64) -> f64 {
        if u >= self.log_a() {
            return self.c().ln() + (alpha - 1.0) * u;
        }
        (alpha - 1.0 / self.p) * u - (1.0 - u).ln()
    }

    fn primitive(&self, t: f64) -> Result<f64> {
        if t >= self.a() {
            return Ok(self.c());
        }
        Ok(t.powf(1.0 / self.conj()) / (1.0 - t.ln()))
    }

    fn support(&self) -> Option<f64> {
        Some(self.a())
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.log_a()]
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied profile: pointwise `f*` and optionally its primitive.
/// Without a primitive, `∫_0^t f*` is computed by quadrature.
#[derive(Clone)]
pub struct CustomProfile {
    name: String,
    evaluator: Evaluator,
    primitive: Option<Evaluator>,
    support: Option<f64>,
    breaks: Vec<f64>,
    quad: QuadratureSpec,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("name", &self.name)
            .field("closed_primitive", &self.primitive.is_some())
            .field("support", &self.support)
            .finish()
    }
}

impl CustomProfile {
    pub fn new(
        name: impl Into<String>,
        evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static,
        primitive: Option<Evaluator>,
        support: Option<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            evaluator: Arc::new(evaluator),
            primitive,
            support,
            breaks: Vec::new(),
            quad: QuadratureSpec::default(),
        }
    }

    /// Extra kinks of `f*`, given in `t`.
    pub fn with_breaks(mut self, breaks_t: &[f64]) -> Self {
        self.breaks = breaks_t
            .iter()
            .filter(|t| **t > 0.0)
            .map(|t| t.ln())
            .collect();
        self
    }
}

impl DecreasingProfile for CustomProfile {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn log_weighted(&self, u: f64, alpha: f64) -> f64 {
        alpha * u + (self.evaluator)(u.exp()).ln()
    }

    fn log_weighted_maximal(&self, u: f64, alpha: f64) -> f64 {
        match self.primitive(u.exp()) {
            Ok(p) => (alpha - 1.0) * u + p.ln(),
            Err(RikitError::Diverged(_)) => f64::INFINITY,
            Err(_) => f64::NAN,
        }
    }

    fn primitive(&self, t: f64) -> Result<f64> {
        if let Some(p) = &self.primitive {
            return Ok(p(t));
        }
        let f = &self.evaluator;
        let mut breaks = self.breaks.clone();
        if let Some(s) = self.support {
            breaks.push(s.ln());
        }
        integrate_line(
            |v| f(v.exp()) * v.exp(),
            None,
            Some(t.ln()),
            &breaks,
            &self.quad,
        )
        .finite_value("primitive of custom profile")
    }

    fn has_closed_primitive(&self) -> bool {
        self.primitive.is_some()
    }

    fn support(&self) -> Option<f64> {
        self.support
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.breaks.clone();
        if let Some(s) = self.support {
            b.push(s.ln());
        }
        b
    }
}

/// A validated analytic profile.
#[derive(Debug, Clone)]
pub struct AnalyticDecreasing {
    profile: Arc<dyn DecreasingProfile>,
}

const MONOTONE_GRID: usize = 256;

impl AnalyticDecreasing {
    /// Checks monotonicity of `f*` on a 256-point log grid and, for closed
    /// primitives, that the primitive increments lie between the endpoint
    /// values of `f*`.
    pub fn new(profile: Arc<dyn DecreasingProfile>) -> Result<Self> {
        let bps = profile.breakpoints();
        let lo = bps.iter().copied().fold(-30.0f64, f64::min) - 10.0;
        let hi = bps.iter().copied().fold(30.0f64, f64::max) + 10.0;
        let grid: Vec<f64> = (0..MONOTONE_GRID)
            .map(|i| lo + (hi - lo) * i as f64 / (MONOTONE_GRID - 1) as f64)
            .collect();
        let vals: Vec<f64> = grid.iter().map(|u| profile.log_weighted(*u, 0.0)).collect();
        for (i, w) in vals.windows(2).enumerate() {
            if w.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
                return invalid(format!(
                    "{}: non-finite value near t = {:e}",
                    profile.name(),
                    grid[i].exp()
                ));
            }
            if w[1] > w[0] + 1e-12 * w[0].abs().max(1.0) {
                return invalid(format!(
                    "{}: not nonincreasing near t = {:e}",
                    profile.name(),
                    grid[i].exp()
                ));
            }
        }
        if profile.has_closed_primitive() {
            let ts: Vec<f64> = grid
                .iter()
                .map(|u| u.exp())
                .filter(|t| *t > 0.0 && t.is_finite())
                .collect();
            let mut prev: Option<(f64, f64)> = None;
            for t in ts {
                let Ok(pt) = profile.primitive(t) else { break };
                if let Some((t0, p0)) = prev {
                    let f0 = profile.log_weighted(t0.ln(), 0.0).exp();
                    let f1 = profile.log_weighted(t.ln(), 0.0).exp();
                    let inc = pt - p0;
                    let slack = 1e-9 * pt.abs().max(f64::MIN_POSITIVE);
                    if inc < (t - t0) * f1 - slack || inc > (t - t0) * f0 + slack {
                        return invalid(format!(
                            "{}: primitive inconsistent near t = {t:e}",
                            profile.name()
                        ));
                    }
                }
                prev = Some((t, pt));
            }
        }
        Ok(Self { profile })
    }

    pub fn power_decay(exponent: f64, support: Option<f64>) -> Result<Self> {
        if !(exponent >= 0.0) || !exponent.is_finite() {
            return invalid(format!("power-decay exponent must be >= 0, got {exponent}"));
        }
        if let Some(b) = support {
            if !(b > 0.0) {
                return invalid("power-decay support must be positive");
            }
        }
        Self::new(Arc::new(PowerDecay { exponent, support }))
    }

    pub fn g(p: f64, q_big: f64) -> Result<Self> {
        Self::new(Arc::new(GFunction::new(p, q_big)?))
    }

    pub fn y_counterexample(p: f64) -> Result<Self> {
        Self::new(Arc::new(YCounterexample::new(p)?))
    }

    pub fn custom(profile: CustomProfile) -> Result<Self> {
        Self::new(Arc::new(profile))
    }

    pub fn profile(&self) -> &dyn DecreasingProfile {
        self.profile.as_ref()
    }
}

#[derive(Debug, Clone)]
pub enum Body {
    Step(Arc<StepDecreasing>),
    Analytic(AnalyticDecreasing),
}

impl Body {
    fn log_weighted(&self, u: f64, alpha: f64) -> f64 {
        match self {
            Body::Step(s) => s.log_weighted(u, alpha),
            Body::Analytic(a) => a.profile.log_weighted(u, alpha),
        }
    }

    fn log_weighted_maximal(&self, u: f64, alpha: f64) -> f64 {
        match self {
            Body::Step(s) => s.log_weighted_maximal(u, alpha),
            Body::Analytic(a) => a.profile.log_weighted_maximal(u, alpha),
        }
    }

    fn evaluate(&self, t: f64) -> f64 {
        match self {
            Body::Step(s) => s.evaluate(t),
            Body::Analytic(a) => a.profile.log_weighted(t.ln(), 0.0).exp(),
        }
    }

    fn primitive(&self, t: f64) -> Result<f64> {
        match self {
            Body::Step(s) => Ok(s.primitive(t)),
            Body::Analytic(a) => a.profile.primitive(t),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Body::Step(s) => s.ends.iter().map(|e| e.ln()).collect(),
            Body::Analytic(a) => a.profile.breakpoints(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Body::Step(s) if s.is_zero())
    }
}

/// `t ↦ scalar · body(r t)`: a rearrangement with exact dilation and scaling
/// wrappers.
#[derive(Debug, Clone)]
pub struct RearrangedFunction {
    body: Body,
    dilation: f64,
    scalar: f64,
}

impl From<StepDecreasing> for RearrangedFunction {
    fn from(s: StepDecreasing) -> Self {
        Self {
            body: Body::Step(Arc::new(s)),
            dilation: 1.0,
            scalar: 1.0,
        }
    }
}

impl From<AnalyticDecreasing> for RearrangedFunction {
    fn from(a: AnalyticDecreasing) -> Self {
        Self {
            body: Body::Analytic(a),
            dilation: 1.0,
            scalar: 1.0,
        }
    }
}

impl From<&StepFunction> for RearrangedFunction {
    fn from(f: &StepFunction) -> Self {
        rearrange_step(f).into()
    }
}

/// Upper limit of the q = ∞ search grid size.
const SUP_GRID: usize = 512;

/// Result of a supremum search over `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Supremum {
    pub value: f64,
    /// Maximiser on the log axis (`-inf` for the limit `t → 0`).
    pub at_log_t: f64,
    /// The maximum sat on the edge of the search grid.
    pub at_boundary: bool,
}

impl RearrangedFunction {
    pub fn zero() -> Self {
        StepDecreasing::zero().into()
    }

    pub fn indicator(length: f64) -> Result<Self> {
        Ok(StepDecreasing::indicator(length)?.into())
    }

    pub fn step(pieces: Vec<(f64, f64)>) -> Result<Self> {
        Ok((&StepFunction::new(pieces)?).into())
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn dilation(&self) -> f64 {
        self.dilation
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn is_zero(&self) -> bool {
        self.scalar == 0.0 || self.body.is_zero()
    }

    /// `D_r f(t) = f(rt)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return invalid(format!(
                "dilation factor must be positive and finite, got {r}"
            ));
        }
        Ok(Self {
            body: self.body.clone(),
            dilation: self.dilation * r,
            scalar: self.scalar,
        })
    }

    pub fn scale(&self, a: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return invalid(format!("scalar must be finite and >= 0, got {a}"));
        }
        Ok(Self {
            body: self.body.clone(),
            dilation: self.dilation,
            scalar: self.scalar * a,
        })
    }

    /// Same body and dilation with unit scalar.
    pub fn unscaled(&self) -> Self {
        Self {
            body: self.body.clone(),
            dilation: self.dilation,
            scalar: 1.0,
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.scalar * self.body.evaluate(self.dilation * t)
    }

    /// `∫_0^t f*`.
    pub fn primitive(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return invalid(format!("primitive needs t > 0, got {t}"));
        }
        Ok(self.scalar / self.dilation * self.body.primitive(self.dilation * t)?)
    }

    /// `f**(t) = (1/t) ∫_0^t f*`.
    pub fn maximal(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return invalid(format!("maximal function needs t > 0, got {t}"));
        }
        let x = self.dilation * t;
        Ok(self.scalar * (self.body.primitive(x)? / x))
    }

    /// `ln(t^α f*(t))` at `t = e^u`.
    pub fn log_weighted(&self, u: f64, alpha: f64) -> f64 {
        let lr = self.dilation.ln();
        self.scalar.ln() - alpha * lr + self.body.log_weighted(u + lr, alpha)
    }

    /// `ln(t^α f**(t))` at `t = e^u`.
    pub fn log_weighted_maximal(&self, u: f64, alpha: f64) -> f64 {
        let lr = self.dilation.ln();
        self.scalar.ln() - alpha * lr + self.body.log_weighted_maximal(u + lr, alpha)
    }

    /// Selects `f*` or `f**` in log-weighted form.
    pub fn log_weighted_mode(&self, u: f64, alpha: f64, maximal: bool) -> f64 {
        if maximal {
            self.log_weighted_maximal(u, alpha)
        } else {
            self.log_weighted(u, alpha)
        }
    }

    /// Kinks and jumps of `f*` on the log axis.
    pub fn breakpoints(&self) -> Vec<f64> {
        let lr = self.dilation.ln();
        self.body
            .breakpoints()
            .into_iter()
            .map(|b| b - lr)
            .collect()
    }

    /// `sup_t t^α F(t)` with `F = f*` or `f**`, over a 512-point log grid,
    /// exact endpoint candidates for step bodies and golden-section
    /// refinement at the best grid point.
    pub fn sup_weighted(&self, alpha: f64, maximal: bool) -> Supremum {
        if self.is_zero() {
            return Supremum {
                value: 0.0,
                at_log_t: 0.0,
                at_boundary: false,
            };
        }
        let bps = self.breakpoints();
        let lo = bps.iter().copied().fold(-40.0f64, f64::min) - 20.0;
        let hi = bps.iter().copied().fold(40.0f64, f64::max) + 20.0;
        let eval = |u: f64| self.log_weighted_mode(u, alpha, maximal);
        let grid: Vec<f64> = (0..SUP_GRID)
            .map(|i| lo + (hi - lo) * i as f64 / (SUP_GRID - 1) as f64)
            .collect();
        let vals: Vec<f64> = grid.iter().map(|u| eval(*u)).collect();
        let (mut k, mut best) = (0usize, f64::NEG_INFINITY);
        for (i, v) in vals.iter().enumerate() {
            if *v > best {
                best = *v;
                k = i;
            }
        }
        let mut at = grid[k];
        let at_boundary = k == 0 || k == SUP_GRID - 1;
        if !at_boundary {
            let (u, v) = golden_max(&eval, grid[k - 1], grid[k + 1]);
            if v > best {
                best = v;
                at = u;
            }
        }
        // left limits at jumps
        let offset = |b: f64| b - 1e-12 * b.abs().max(1.0);
        for b in &bps {
            let v = eval(offset(*b));
            if v > best {
                best = v;
                at = *b;
            }
        }
        if let Body::Step(s) = &self.body {
            let lr = self.dilation.ln();
            for (u, v) in s.sup_candidates(alpha, maximal) {
                let v = self.scalar.ln() - alpha * lr + v;
                if v >= best {
                    best = v;
                    at = u - lr;
                }
            }
        }
        let at_boundary = at_boundary && at == grid[k];
        Supremum {
            value: best.exp(),
            at_log_t: at,
            at_boundary,
        }
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sd(f: &StepDecreasing) -> Vec<(f64, f64)> {
        f.values()
            .iter()
            .copied()
            .zip(f.ends().iter().copied())
            .collect()
    }

    #[test]
    fn rearrange_examples() {
        let f = StepFunction::new(vec![(1.0, 2.0), (3.0, 1.0)]).unwrap();
        assert_eq!(sd(&rearrange_step(&f)), vec![(3.0, 1.0), (1.0, 3.0)]);
        assert!(rearrange_step(&StepFunction::zero()).is_zero());
        let f = StepFunction::new(vec![(2.0, 1.0), (2.0, 2.0)]).unwrap();
        assert_eq!(sd(&rearrange_step(&f)), vec![(2.0, 3.0)]);
    }

    #[test]
    fn invalid_steps_rejected() {
        assert!(StepFunction::new(vec![(1.0, -1.0)]).is_err());
        assert!(StepFunction::new(vec![(-1.0, 1.0)]).is_err());
        assert!(StepDecreasing::new(vec![(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(StepDecreasing::new(vec![(2.0, 2.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn maximal_examples() {
        let chi = RearrangedFunction::indicator(1.0).unwrap();
        assert_eq!(chi.maximal(2.0).unwrap(), 0.5);
        let f = RearrangedFunction::step(vec![(3.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(f.maximal(2.0).unwrap(), 2.0);
        assert_eq!(f.primitive(2.0).unwrap(), 4.0);
        let h: RearrangedFunction = AnalyticDecreasing::power_decay(0.5, Some(1.0))
            .unwrap()
            .into();
        assert!((h.maximal(1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dilation_examples() {
        let chi = RearrangedFunction::indicator(1.0).unwrap();
        let d = chi.dilate(2.0).unwrap();
        assert_eq!(d.evaluate(0.49), 1.0);
        assert_eq!(d.evaluate(0.5), 0.0);
        assert_eq!(d.maximal(1.0).unwrap(), 0.5);
        assert_eq!(d.maximal(1.0).unwrap(), chi.maximal(2.0).unwrap());
        let same = chi.dilate(1.0).unwrap();
        for t in [0.1, 0.99, 1.0, 3.0] {
            assert_eq!(same.evaluate(t), chi.evaluate(t));
        }
        assert!(chi.dilate(0.0).is_err());
    }

    #[test]
    fn step_sum_refines() {
        let f = StepFunction::new(vec![(1.0, 1.0), (2.0, 1.0)]).unwrap();
        let g = StepFunction::new(vec![(5.0, 1.5)]).unwrap();
        let h = f.add(&g);
        assert_eq!(h.pieces(), &[(6.0, 1.0), (7.0, 0.5), (2.0, 0.5)]);
    }

    #[test]
    fn log_forms_match_pointwise() {
        let f = RearrangedFunction::step(vec![(3.0, 1.0), (1.0, 2.0)])
            .unwrap()
            .dilate(0.7)
            .unwrap()
            .scale(2.5)
            .unwrap();
        for t in [0.05, 0.5, 1.2, 3.0, 4.0, 10.0] {
            let u = f64::ln(t);
            let direct = t.powf(0.4) * f.evaluate(t);
            let logf = f.log_weighted(u, 0.4).exp();
            assert!((direct - logf).abs() <= 1e-13 * direct.max(1e-300), "{t}");
            let m = t.powf(0.4) * f.maximal(t).unwrap();
            let lm = f.log_weighted_maximal(u, 0.4).exp();
            assert!((m - lm).abs() <= 1e-13 * m, "{t}");
        }
    }

    #[test]
    fn g_primitive_and_maximal_consistent() {
        let g: RearrangedFunction = AnalyticDecreasing::g(2.0, 3.0).unwrap().into();
        for t in [1e-6, 1e-3, 0.1, 0.4, 2.0] {
            let m = g.maximal(t).unwrap();
            let lm = g.log_weighted_maximal(t.ln(), 0.0).exp();
            assert!((m - lm).abs() <= 1e-12 * m, "{t}: {m} {lm}");
            assert!(m >= g.evaluate(t));
        }
    }

    #[test]
    fn y_profile_consistent() {
        let y = YCounterexample::new(2.0).unwrap();
        let a = y.a();
        assert!((y.primitive(a * (1.0 - 1e-15)).unwrap() - y.c()).abs() < 1e-12);
        let f: RearrangedFunction = AnalyticDecreasing::y_counterexample(2.0).unwrap().into();
        for t in [1e-9, 1e-4, 0.01, a, 0.5, 7.0] {
            let m = f.maximal(t).unwrap();
            let lm = f.log_weighted_maximal(t.ln(), 0.0).exp();
            assert!((m - lm).abs() <= 1e-12 * m, "{t}");
        }
    }

    #[test]
    fn increasing_custom_rejected() {
        let c = CustomProfile::new("bad", |t: f64| t, None, None);
        assert!(AnalyticDecreasing::custom(c).is_err());
        let ok = CustomProfile::new(
            "exp",
            |t: f64| (-t).exp(),
            Some(Arc::new(|t: f64| -(-t).exp_m1())),
            None,
        );
        AnalyticDecreasing::custom(ok).unwrap();
    }

    #[test]
    fn sup_of_step_exact() {
        let f = RearrangedFunction::step(vec![(3.0, 1.0), (1.0, 2.0)]).unwrap();
        // star: max(3·1^0.5, 1·3^0.5) = 3
        let s = f.sup_weighted(0.5, false);
        assert!((s.value - 3.0).abs() < 1e-15);
        let d = f.dilate(4.0).unwrap().sup_weighted(0.5, false);
        assert!((d.value - 1.5).abs() < 1e-15);
    }

    #[test]
    fn g_primitive_paths_agree() {
        // series and continued fraction vs quadrature on both sides of the switch
        let g = GFunction::new(2.0, 3.0).unwrap();
        let pc = g.conj();
        for a in [
            0.7,
            0.05 * pc,
            0.5 * pc,
            0.999 * pc,
            1.0 * pc,
            1.5 * pc,
            4.0 * pc,
            40.0 * pc,
        ] {
            let cf = g.scaled_primitive(-a).unwrap();
            let inv_q = 1.0 / 3.0;
            let quad = integrate_line(
                |x| (-x / pc).exp() * (a + x).powf(-inv_q),
                Some(0.0),
                None,
                &[],
                &g.quad,
            )
            .value;
            assert!((cf - quad).abs() <= 1e-12 * quad, "{a}: {cf} {quad}");
        }
    }
}
