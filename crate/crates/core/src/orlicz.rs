//! Young functions and the Orlicz-Lorentz modular and Luxemburg norm.
//!
//! Every Young function is evaluated through `ln Φ(e^lx)`; ratio profiles
//! near zero need `x` far below the smallest positive f64.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, RikitError};
use crate::funcs::RearrangedFunction;
use crate::lorentz::Mode;
use crate::quad::{integrate_line, log_integral_exp, QuadratureSpec};

/// One `coef · x^exponent` piece of a Young function, valid up to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungPiece {
    pub end: f64,
    pub coef: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum YoungKind {
    /// `x^q`
    Power { q: f64 },
    /// `x^(4 + sin ln(-ln x))` on `(0, 1/e]`, `a x - b` after.
    Oscillating,
    /// Consecutive power pieces; the last one must reach infinity.
    PiecewisePower { pieces: Vec<YoungPiece> },
}

/// A validated Young function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungFunction {
    kind: YoungKind,
}

const SHAPE_GRID: usize = 512;

/// Slope of the linear part of the oscillating function, `5 e^-3`.
pub fn oscillating_slope() -> f64 {
    5.0 * (-3.0f64).exp()
}

/// Offset of the linear part of the oscillating function, `4 e^-4`.
pub fn oscillating_offset() -> f64 {
    4.0 * (-4.0f64).exp()
}

impl YoungFunction {
    pub fn new(kind: YoungKind) -> Result<Self> {
        match &kind {
            YoungKind::Power { q } => {
                if !(*q >= 1.0) || !q.is_finite() {
                    return invalid(format!("power Young function needs q >= 1, got {q}"));
                }
            }
            YoungKind::Oscillating => {}
            YoungKind::PiecewisePower { pieces } => {
                if pieces.is_empty() || pieces.last().is_some_and(|p| p.end.is_finite()) {
                    return invalid("piecewise Young function must cover (0, inf)");
                }
                let mut prev = 0.0;
                for (i, p) in pieces.iter().enumerate() {
                    if !(p.end > prev)
                        || !(p.coef > 0.0)
                        || !(p.exponent >= 1.0)
                        || !p.exponent.is_finite()
                    {
                        return invalid(format!(
                            "Young piece {i}: need increasing ends, coef > 0, exponent >= 1"
                        ));
                    }
                    prev = p.end;
                }
                for w in pieces.windows(2) {
                    let (l, r) = (
                        w[0].coef * w[0].end.powf(w[0].exponent),
                        w[1].coef * w[0].end.powf(w[1].exponent),
                    );
                    if (l - r).abs() > 1e-12 * l.max(r) {
                        return invalid(format!(
                            "piecewise Young function is discontinuous at {}",
                            w[0].end
                        ));
                    }
                }
            }
        }
        let phi = Self { kind };
        phi.check_shape()?;
        Ok(phi)
    }

    pub fn power(q: f64) -> Result<Self> {
        Self::new(YoungKind::Power { q })
    }

    pub fn oscillating() -> Self {
        Self {
            kind: YoungKind::Oscillating,
        }
    }

    pub fn piecewise(pieces: Vec<YoungPiece>) -> Result<Self> {
        Self::new(YoungKind::PiecewisePower { pieces })
    }

    pub fn kind(&self) -> &YoungKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            YoungKind::Power { q } => format!("power-{q}"),
            YoungKind::Oscillating => "oscillating".into(),
            YoungKind::PiecewisePower { .. } => "piecewise-power".into(),
        }
    }

    /// `ln Φ(e^lx)`.
    pub fn log_value(&self, lx: f64) -> f64 {
        if lx == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        match &self.kind {
            YoungKind::Power { q } => q * lx,
            YoungKind::Oscillating => {
                if lx <= -1.0 {
                    (4.0 + (-lx).ln().sin()) * lx
                } else {
                    (oscillating_slope() * lx.exp() - oscillating_offset()).ln()
                }
            }
            YoungKind::PiecewisePower { pieces } => {
                let p = pieces
                    .iter()
                    .find(|p| lx < p.end.ln())
                    .unwrap_or(&pieces[pieces.len() - 1]);
                p.coef.ln() + p.exponent * lx
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.log_value(x.ln()).exp()
    }

    /// `x Φ'(x) / Φ(x)` at `x = e^lx`.
    pub fn elasticity(&self, lx: f64) -> f64 {
        match &self.kind {
            YoungKind::Power { q } => *q,
            YoungKind::Oscillating => {
                if lx <= -1.0 {
                    let l = (-lx).ln();
                    4.0 + l.cos() + l.sin()
                } else {
                    let ax = oscillating_slope() * lx.exp();
                    ax / (ax - oscillating_offset())
                }
            }
            YoungKind::PiecewisePower { pieces } => {
                pieces
                    .iter()
                    .find(|p| lx < p.end.ln())
                    .unwrap_or(&pieces[pieces.len() - 1])
                    .exponent
            }
        }
    }

    /// `Φ'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let lx = x.ln();
        (self.log_value(lx) - lx).exp() * self.elasticity(lx)
    }

    /// Smallest normalised second difference of `Φ` on a 512-point log grid
    /// over `[e^lo, e^hi]`: `(s_{i+1} - s_i) / (|s_i| + |s_{i+1}|)` with `s_i`
    /// the chord slopes. Convexity means this is `>= -1e-12`.
    pub fn convexity_defect(&self, lo: f64, hi: f64) -> f64 {
        let xs: Vec<f64> = (0..SHAPE_GRID)
            .map(|i| (lo + (hi - lo) * i as f64 / (SHAPE_GRID - 1) as f64).exp())
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| self.value(*x)).collect();
        let slopes: Vec<f64> = (0..SHAPE_GRID - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        slopes
            .windows(2)
            .map(|s| {
                let scale = s[0].abs() + s[1].abs();
                if scale == 0.0 {
                    0.0
                } else {
                    (s[1] - s[0]) / scale
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn check_shape(&self) -> Result<()> {
        let (lo, hi) = (-20.0, 20.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..SHAPE_GRID {
            let lx = lo + (hi - lo) * i as f64 / (SHAPE_GRID - 1) as f64;
            let v = self.log_value(lx);
            if !v.is_finite() || !(v > prev) {
                return invalid(format!(
                    "{}: not strictly increasing near x = {:e}",
                    self.name(),
                    lx.exp()
                ));
            }
            prev = v;
        }
        if self.convexity_defect(lo, hi) < -1e-12 {
            return invalid(format!("{}: not convex", self.name()));
        }
        Ok(())
    }
}

/// Orlicz-Lorentz norm data. The default mode uses `f**`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrliczLorentzParams {
    pub p: f64,
    pub phi: YoungFunction,
    pub mode: Mode,
}

impl OrliczLorentzParams {
    pub fn new(p: f64, phi: YoungFunction) -> Result<Self> {
        let s = Self {
            p,
            phi,
            mode: Mode::DoubleStar,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || !self.p.is_finite() {
            return invalid(format!(
                "Orlicz-Lorentz p must lie in (1, inf), got {}",
                self.p
            ));
        }
        Ok(())
    }
}

/// `∫ Φ(t^{1/p} F(t)/λ) dt/t`, `F = f**` or `f*` per the mode; `+inf` on
/// divergence.
pub fn modular(
    f: &RearrangedFunction,
    params: &OrliczLorentzParams,
    lambda: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    params.validate()?;
    if !(lambda > 0.0) {
        return invalid(format!("modular needs lambda > 0, got {lambda}"));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let (alpha, ll, maximal) = (1.0 / params.p, lambda.ln(), params.mode.is_maximal());
    let h = |u: f64| {
        params
            .phi
            .log_value(f.log_weighted_mode(u, alpha, maximal) - ll)
    };
    Ok(log_integral_exp(h, &f.breakpoints(), quad, "Orlicz-Lorentz modular")?.exp())
}

const BRACKET_CAP: i32 = 60;
const LUX_TOL: f64 = 1e-12;

/// `inf {λ > 0 : modular(f/λ) ≤ 1}` by bisection on `ln λ`.
pub fn luxemburg_norm(
    f: &RearrangedFunction,
    params: &OrliczLorentzParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    params.validate()?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let (scalar, unit) = (f.scalar(), f.unscaled());
    let m = |l: f64| modular(&unit, params, l.exp(), quad);
    let step = std::f64::consts::LN_2;
    let (mut lo, mut hi);
    if m(0.0)? <= 1.0 {
        hi = 0.0;
        lo = -step;
        let mut k = 1;
        while m(lo)? <= 1.0 {
            hi = lo;
            k += 1;
            if k > BRACKET_CAP {
                return Err(RikitError::BracketCap(
                    "Luxemburg norm (below 2^-60)".into(),
                ));
            }
            lo -= step;
        }
    } else {
        lo = 0.0;
        hi = step;
        let mut k = 1;
        let mut all_diverged = m(0.0)?.is_infinite();
        loop {
            let v = m(hi)?;
            if v <= 1.0 {
                break;
            }
            all_diverged &= v.is_infinite();
            lo = hi;
            k += 1;
            if k > BRACKET_CAP {
                if all_diverged {
                    return Ok(f64::INFINITY);
                }
                return Err(RikitError::BracketCap("Luxemburg norm (above 2^60)".into()));
            }
            hi += step;
        }
    }
    while hi - lo > LUX_TOL {
        let mid = 0.5 * (lo + hi);
        if m(mid)? <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(scalar * (0.5 * (lo + hi)).exp())
}

/// Root `C₀` of `∫_0^{1/C₀} Φ(s)/s ds = 1/p`.
pub fn fundamental_constant(phi: &YoungFunction, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return invalid(format!("fundamental constant needs p in (1, inf), got {p}"));
    }
    if let YoungKind::Power { q } = phi.kind {
        return Ok((p / q).powf(1.0 / q));
    }
    let target = 1.0 / p;
    let breaks = [-1.0];
    // P(e^v) - 1/p, increasing in v
    let excess = |v: f64| -> Result<f64> {
        let r = integrate_line(|s| phi.log_value(s).exp(), None, Some(v), &breaks, quad);
        Ok(r.finite_value("fundamental constant integral")? - target)
    };
    let (mut lo, mut hi) = (-1.0, 0.0);
    while excess(hi)? < 0.0 {
        lo = hi;
        hi += 1.0;
        if hi > 700.0 {
            return Err(RikitError::BracketCap("fundamental constant".into()));
        }
    }
    while excess(lo)? > 0.0 {
        hi = lo;
        lo -= 1.0;
        if lo < -700.0 {
            return Err(RikitError::BracketCap("fundamental constant".into()));
        }
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((-0.5 * (lo + hi)).exp())
}

/// Log-spaced grid `ln x ∈ [-460, 460]` (about 200 decades each side).
pub fn default_delta2_grid() -> Vec<f64> {
    (0..=4000)
        .map(|i| -460.0 + 920.0 * i as f64 / 4000.0)
        .collect()
}

/// `sup Φ(2x)/Φ(x)` over a grid of `ln x`. An estimate only.
pub fn delta2_estimate(phi: &YoungFunction, log_grid: &[f64]) -> Result<f64> {
    if log_grid.is_empty() {
        return invalid("Δ₂ grid is empty");
    }
    let (lo, hi) = log_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(*x), b.max(*x))
        });
    if hi - lo < 12.0 * std::f64::consts::LN_10 {
        return invalid("Δ₂ grid must span at least 12 decades");
    }
    let ln2 = std::f64::consts::LN_2;
    let m = log_grid
        .iter()
        .map(|lx| phi.log_value(lx + ln2) - phi.log_value(*lx))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(m.exp())
}

/// Ratio of the `f**` modular to the `f*` modular at `λ = 1`, with the
/// bound `C₂^{log₂ p'}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularRatio {
    pub doublestar: f64,
    pub star: f64,
    pub ratio: f64,
    pub delta2: f64,
    pub bound: f64,
}

impl ModularRatio {
    pub fn within_bound(&self, rel: f64) -> bool {
        self.ratio >= 1.0 - rel && self.ratio <= self.bound * (1.0 + rel)
    }
}

pub fn modular_equivalence_ratio(
    f: &RearrangedFunction,
    p: f64,
    phi: &YoungFunction,
    quad: &QuadratureSpec,
) -> Result<ModularRatio> {
    let params = OrliczLorentzParams::new(p, phi.clone())?;
    let doublestar = modular(f, &params, 1.0, quad)?;
    let star = modular(f, &params.clone().with_mode(Mode::Star), 1.0, quad)?;
    if !doublestar.is_finite() || !(star > 0.0) {
        return Err(RikitError::Diverged(format!(
            "modular ratio: {doublestar} / {star}"
        )));
    }
    let delta2 = delta2_estimate(phi, &default_delta2_grid())?;
    let bound = delta2.powf((p / (p - 1.0)).log2());
    Ok(ModularRatio {
        doublestar,
        star,
        ratio: doublestar / star,
        delta2,
        bound,
    })
}

/// Running-max threshold of the unbounded-growth heuristic: `ln 10^6`.
pub const UNBOUNDED_LOG_THRESHOLD: f64 = 13.815510557964274;

/// `ln Ψ(x) - ln Φ(x)` along `ln x = -e^ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingProfile {
    pub ell: Vec<f64>,
    pub log_ratio: Vec<f64>,
    pub running_max: Vec<f64>,
    /// Heuristic: the running max exceeded `ln 10^6`.
    pub unbounded: bool,
}

pub fn embedding_ratio_profile(
    phi: &YoungFunction,
    psi: &YoungFunction,
    ell_grid: &[f64],
) -> EmbeddingProfile {
    let log_ratio: Vec<f64> = ell_grid
        .iter()
        .map(|l| {
            let lx = -l.exp();
            psi.log_value(lx) - phi.log_value(lx)
        })
        .collect();
    let running_max: Vec<f64> = log_ratio
        .iter()
        .scan(f64::NEG_INFINITY, |m, v| {
            *m = m.max(*v);
            Some(*m)
        })
        .collect();
    let unbounded = running_max
        .last()
        .is_some_and(|m| *m > UNBOUNDED_LOG_THRESHOLD);
    EmbeddingProfile {
        ell: ell_grid.to_vec(),
        log_ratio,
        running_max,
        unbounded,
    }
}

/// Uniform grid of `ℓ` on `[0, max]` with the given number of points.
pub fn ell_grid(max: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

/// `sup_t C₀ t^{1/p} f**(t)` against the Luxemburg norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub sup: f64,
    pub norm: f64,
    pub c0: f64,
    /// `norm (1 + 1e-8) - sup`
    pub slack: f64,
    pub holds: bool,
}

pub fn marcinkiewicz_bound_check(
    f: &RearrangedFunction,
    p: f64,
    phi: &YoungFunction,
    quad: &QuadratureSpec,
) -> Result<BoundCheck> {
    let params = OrliczLorentzParams::new(p, phi.clone())?;
    let c0 = fundamental_constant(phi, p, quad)?;
    let norm = luxemburg_norm(f, &params, quad)?;
    let sup = if f.is_zero() {
        0.0
    } else {
        c0 * f.scalar() * f.unscaled().sup_weighted(1.0 / p, true).value
    };
    let slack = norm * (1.0 + 1e-8) - sup;
    Ok(BoundCheck {
        sup,
        norm,
        c0,
        slack,
        holds: slack >= 0.0,
    })
}
