//! A single entry point for every norm family.

use crate::error::{invalid, Result};
use crate::funcs::RearrangedFunction;
use crate::homogeneity::{delta_norm, DeltaFamily};
use crate::lorentz::{
    lorentz_norm, weighted_lorentz_norm, LorentzParams, Mode, Weight, WeightedMode,
};
use crate::orlicz::{luxemburg_norm, OrliczLorentzParams};
use crate::quad::{log_integral_exp, QuadratureSpec};

#[derive(Debug, Clone)]
pub enum NormKind {
    LorentzStar(LorentzParams),
    LorentzDoubleStar(LorentzParams),
    Lambda {
        q: f64,
        weight: Weight,
    },
    Gamma {
        q: f64,
        weight: Weight,
    },
    OrliczLorentz(OrliczLorentzParams),
    Delta(DeltaFamily),
    /// `(∫_0^1 (f**)² t^{2/p-1} dt)^{1/2} + ∫_1^∞ f** t^{1/p-1} dt`
    YSpace {
        p: f64,
    },
}

impl NormKind {
    pub fn tag(&self) -> &'static str {
        match self {
            NormKind::LorentzStar(_) => "lorentz-star",
            NormKind::LorentzDoubleStar(_) => "lorentz-doublestar",
            NormKind::Lambda { .. } => "lambda",
            NormKind::Gamma { .. } => "gamma",
            NormKind::OrliczLorentz(_) => "orlicz-lorentz",
            NormKind::Delta(_) => "delta",
            NormKind::YSpace { .. } => "y-space",
        }
    }
}

/// A norm together with the quadrature settings it is evaluated with.
#[derive(Debug, Clone)]
pub struct NormFunctional {
    pub kind: NormKind,
    pub quad: QuadratureSpec,
}

impl NormFunctional {
    pub fn new(kind: NormKind) -> Result<Self> {
        match &kind {
            NormKind::LorentzStar(pq) | NormKind::LorentzDoubleStar(pq) => pq.validate()?,
            NormKind::Lambda { q, .. } | NormKind::Gamma { q, .. } => {
                if !(*q >= 1.0) || !q.is_finite() {
                    return invalid(format!(
                        "weighted Lorentz q must be finite and >= 1, got {q}"
                    ));
                }
            }
            NormKind::OrliczLorentz(params) => params.validate()?,
            NormKind::Delta(_) => {}
            NormKind::YSpace { p } => {
                if !(*p > 1.0) || !p.is_finite() {
                    return invalid(format!("Y-space p must lie in (1, inf), got {p}"));
                }
            }
        }
        Ok(Self {
            kind,
            quad: QuadratureSpec::default(),
        })
    }

    pub fn with_quad(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    pub fn lorentz(p: f64, q: f64, mode: Mode) -> Result<Self> {
        let pq = LorentzParams::new(p, q)?;
        Self::new(match mode {
            Mode::Star => NormKind::LorentzStar(pq),
            Mode::DoubleStar => NormKind::LorentzDoubleStar(pq),
        })
    }

    /// The dilation exponent `p` the norm is built around, if it has one.
    pub fn nominal_p(&self) -> Option<f64> {
        match &self.kind {
            NormKind::LorentzStar(pq) | NormKind::LorentzDoubleStar(pq) => Some(pq.p),
            NormKind::OrliczLorentz(params) => Some(params.p),
            NormKind::Delta(family) => Some(family.p),
            NormKind::YSpace { p } => Some(*p),
            NormKind::Lambda { .. } | NormKind::Gamma { .. } => None,
        }
    }

    /// `N(f)`, `+inf` when the defining integral diverges.
    pub fn eval(&self, f: &RearrangedFunction) -> Result<f64> {
        let quad = &self.quad;
        match &self.kind {
            NormKind::LorentzStar(pq) => lorentz_norm(f, *pq, Mode::Star, quad),
            NormKind::LorentzDoubleStar(pq) => lorentz_norm(f, *pq, Mode::DoubleStar, quad),
            NormKind::Lambda { q, weight } => {
                weighted_lorentz_norm(f, *q, weight, WeightedMode::Lambda, quad)
            }
            NormKind::Gamma { q, weight } => {
                weighted_lorentz_norm(f, *q, weight, WeightedMode::Gamma, quad)
            }
            NormKind::OrliczLorentz(params) => luxemburg_norm(f, params, quad),
            NormKind::Delta(family) => delta_norm(family, f),
            NormKind::YSpace { p } => y_norm(f, *p, quad),
        }
    }
}

fn y_norm(f: &RearrangedFunction, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let (scalar, unit) = (f.scalar(), f.unscaled());
    let alpha = 1.0 / p;
    let mut breaks = unit.breakpoints();
    breaks.push(0.0);
    let near = |u: f64| {
        if u < 0.0 {
            2.0 * unit.log_weighted_maximal(u, alpha)
        } else {
            f64::NEG_INFINITY
        }
    };
    let far = |u: f64| {
        if u >= 0.0 {
            unit.log_weighted_maximal(u, alpha)
        } else {
            f64::NEG_INFINITY
        }
    };
    let a = log_integral_exp(near, &breaks, quad, "Y-space norm, t < 1")?;
    let b = log_integral_exp(far, &breaks, quad, "Y-space norm, t > 1")?;
    Ok(scalar * ((0.5 * a).exp() + b.exp()))
}

/// `φ_N(t) = N(χ_[0,t))`.
pub fn fundamental_function(norm: &NormFunctional, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return invalid(format!("fundamental function needs t > 0, got {t}"));
    }
    norm.eval(&RearrangedFunction::indicator(t)?)
}
