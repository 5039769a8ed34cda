//! Dilation experiments: the ratio `h(r) = ‖D_r f‖ / ‖f‖`, power-law fits,
//! the sup-renorming `sup_s s^{1/p} ‖D_s f‖`, and extrapolation (Δ) norms.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, RikitError};
use crate::funcs::RearrangedFunction;
use crate::norm::{fundamental_function, NormFunctional};
use crate::par::Execution;

/// `N(D_r f) / N(f)`.
pub fn dilation_ratio(norm: &NormFunctional, f: &RearrangedFunction, r: f64) -> Result<f64> {
    let base = norm.eval(f)?;
    if !(base > 0.0) || !base.is_finite() {
        return Err(RikitError::UndefinedRatio(base));
    }
    Ok(norm.eval(&f.dilate(r)?)? / base)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub r: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    /// `(max - min) / median` across the test set.
    pub spread: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Homogeneous {
        p: f64,
    },
    /// `ratio · r^{1/p}` grew monotonically by `growth` over `decades`.
    Inhomogeneous {
        growth: f64,
        decades: f64,
    },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub stats: Vec<RatioStats>,
    /// Exponent used to normalise ratios: the nominal `p` of the norm, or
    /// `-1/α` if it has none.
    pub p_used: f64,
    /// Median ratio times `r^{1/p}` per grid point.
    pub normalized: Vec<f64>,
    /// Extremes of `ratio · r^{1/p}` over all pairs.
    pub normalized_min: f64,
    pub normalized_max: f64,
    pub fitted_alpha: f64,
    pub intercept: f64,
    /// Largest `|ln ratio - (intercept + α ln r)|` over all pairs.
    pub residual_max: f64,
    pub spread_max: f64,
    pub multiplicativity_max: f64,
    /// Median ratios are nonincreasing in `r`.
    pub monotone: bool,
    pub tolerance: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneityOptions {
    pub tolerance: f64,
    pub execution: Execution,
    pub multiplicativity_pairs: usize,
}

impl Default for HomogeneityOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            execution: Execution::default(),
            multiplicativity_pairs: 4,
        }
    }
}

/// Growth needed, over at least `INHOMOGENEOUS_DECADES`, for an
/// inhomogeneous verdict.
pub const INHOMOGENEOUS_GROWTH: f64 = 2.0;
pub const INHOMOGENEOUS_DECADES: f64 = 6.0;

pub fn homogeneity_report(
    norm: &NormFunctional,
    testset: &[RearrangedFunction],
    r_grid: &[f64],
    opts: HomogeneityOptions,
) -> Result<HomogeneityReport> {
    if testset.is_empty() || r_grid.is_empty() {
        return invalid("homogeneity report needs a nonempty test set and r grid");
    }
    if r_grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return invalid("r grid must be positive and finite");
    }
    let mut rs = r_grid.to_vec();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let exec = opts.execution;

    let base: Vec<f64> = exec
        .map(testset, |f| norm.eval(f))
        .into_iter()
        .collect::<Result<_>>()?;
    if let Some(b) = base.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
        return Err(RikitError::UndefinedRatio(*b));
    }
    let nr = rs.len();
    let ratios: Vec<f64> = exec
        .map_range(testset.len() * nr, |k| {
            let (i, j) = (k / nr, k % nr);
            Ok(norm.eval(&testset[i].dilate(rs[j])?)? / base[i])
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let column =
        |j: usize| -> Vec<f64> { (0..testset.len()).map(|i| ratios[i * nr + j]).collect() };

    let stats: Vec<RatioStats> = (0..nr)
        .map(|j| {
            let mut c = column(j);
            c.sort_by(f64::total_cmp);
            let median = if c.len() % 2 == 1 {
                c[c.len() / 2]
            } else {
                0.5 * (c[c.len() / 2 - 1] + c[c.len() / 2])
            };
            let (min, max) = (c[0], c[c.len() - 1]);
            RatioStats {
                r: rs[j],
                min,
                median,
                max,
                spread: (max - min) / median,
            }
        })
        .collect();

    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = stats.iter().map(|s| s.median.ln()).collect();
    let (fitted_alpha, intercept) = least_squares(&xs, &ys);
    let residual_max = ratios
        .iter()
        .enumerate()
        .map(|(k, v)| (v.ln() - (intercept + fitted_alpha * xs[k % nr])).abs())
        .fold(0.0, f64::max);
    let spread_max = stats.iter().map(|s| s.spread).fold(0.0, f64::max);

    let pairs: Vec<(f64, f64)> = (0..opts.multiplicativity_pairs.min(nr.div_ceil(2)))
        .map(|k| (rs[k], rs[nr - 1 - k]))
        .collect();
    let mult: Vec<f64> = exec
        .map_range(testset.len() * pairs.len(), |k| {
            let (f, (r, s)) = (&testset[k / pairs.len()], pairs[k % pairs.len()]);
            let fr = f.dilate(r)?;
            let n_fr = norm.eval(&fr)?;
            let h_r = n_fr / norm.eval(f)?;
            let h_s = norm.eval(&fr.dilate(s)?)? / n_fr;
            let h_rs = dilation_ratio(norm, f, r * s)?;
            Ok((h_rs - h_r * h_s).abs() / h_rs)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let multiplicativity_max = mult.into_iter().fold(0.0, f64::max);

    let monotone = stats
        .windows(2)
        .all(|w| w[1].median <= w[0].median * (1.0 + 1e-9));
    let p_used = norm.nominal_p().unwrap_or(-1.0 / fitted_alpha);
    let normalized: Vec<f64> = stats
        .iter()
        .map(|s| s.median * s.r.powf(1.0 / p_used))
        .collect();
    let (normalized_min, normalized_max) = ratios
        .iter()
        .enumerate()
        .map(|(k, v)| v * rs[k % nr].powf(1.0 / p_used))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });

    let verdict = if let Some((growth, decades)) = monotone_growth(&rs, &normalized) {
        Verdict::Inhomogeneous { growth, decades }
    } else if residual_max <= opts.tolerance && spread_max <= opts.tolerance {
        Verdict::Homogeneous {
            p: -1.0 / fitted_alpha,
        }
    } else {
        Verdict::Inconclusive
    };

    Ok(HomogeneityReport {
        stats,
        p_used,
        normalized,
        normalized_min,
        normalized_max,
        fitted_alpha,
        intercept,
        residual_max,
        spread_max,
        multiplicativity_max,
        monotone,
        tolerance: opts.tolerance,
        verdict,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return (f64::NAN, my);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Longest strictly monotone run of `values` along ascending `rs` that spans
/// enough decades and grows enough; returns `(growth, decades)`.
fn monotone_growth(rs: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for dir in [1.0, -1.0] {
        let mut start = 0;
        for k in 1..=values.len() {
            let continues = k < values.len() && dir * (values[k] - values[k - 1]) > 0.0;
            if continues {
                continue;
            }
            let end = k - 1;
            if end > start {
                let decades = (rs[end] / rs[start]).log10();
                let growth = (values[end] / values[start]).powf(dir);
                if decades >= INHOMOGENEOUS_DECADES
                    && growth >= INHOMOGENEOUS_GROWTH
                    && best.is_none_or(|b| growth > b.0)
                {
                    best = Some((growth, decades));
                }
            }
            start = k;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormSup {
    pub value: f64,
    pub attained_s: f64,
    /// The maximum is attained only at an end of the grid.
    pub at_boundary: bool,
    /// Fraction of grid points within `1e-9` of the maximum.
    pub attained_fraction: f64,
    pub s: Vec<f64>,
    pub values: Vec<f64>,
}

/// `max_s s^{1/p} N(D_s f)` over the grid.
pub fn renorm_sup(
    norm: &NormFunctional,
    p: f64,
    f: &RearrangedFunction,
    s_grid: &[f64],
    exec: Execution,
) -> Result<RenormSup> {
    if s_grid.is_empty() || s_grid.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return invalid("renorm grid must be nonempty, positive and finite");
    }
    let mut s = s_grid.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    if f.is_zero() {
        let n = s.len();
        return Ok(RenormSup {
            value: 0.0,
            attained_s: s[0],
            at_boundary: false,
            attained_fraction: 1.0,
            s,
            values: vec![0.0; n],
        });
    }
    let values: Vec<f64> = exec
        .map(&s, |x| Ok(x.powf(1.0 / p) * norm.eval(&f.dilate(*x)?)?))
        .into_iter()
        .collect::<Result<_>>()?;
    let (k, value) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |b, (i, v)| if v > b.1 { (i, v) } else { b },
            );
    let near: Vec<usize> = (0..values.len())
        .filter(|i| values[*i] >= value * (1.0 - 1e-9))
        .collect();
    let last = values.len() - 1;
    let at_boundary = near.iter().all(|i| *i == 0 || *i == last);
    Ok(RenormSup {
        value,
        attained_s: s[k],
        at_boundary,
        attained_fraction: near.len() as f64 / values.len() as f64,
        s,
        values,
    })
}

/// One member `coef · ‖·‖_X` of an extrapolation family.
#[derive(Debug, Clone)]
pub struct DeltaMember {
    pub index: f64,
    pub norm: NormFunctional,
    pub coef: f64,
}

/// `‖f‖_Δ = max_k coef_k ‖f‖_{X_k}` over a finite family.
#[derive(Debug, Clone)]
pub struct DeltaFamily {
    pub p: f64,
    pub members: Vec<DeltaMember>,
}

impl DeltaFamily {
    pub fn new(p: f64, members: Vec<DeltaMember>) -> Result<Self> {
        if members.is_empty() {
            return invalid("Δ family needs at least one member");
        }
        if let Some(m) = members
            .iter()
            .find(|m| !(m.coef > 0.0) || !m.coef.is_finite())
        {
            return invalid(format!(
                "Δ coefficient must be positive and finite, got {}",
                m.coef
            ));
        }
        Ok(Self { p, members })
    }
}

pub fn delta_norm(family: &DeltaFamily, f: &RearrangedFunction) -> Result<f64> {
    let mut best: f64 = 0.0;
    for m in &family.members {
        let v = m.coef * m.norm.eval(f)?;
        if v == f64::INFINITY {
            return Ok(v);
        }
        best = best.max(v);
    }
    Ok(best)
}

/// `max_k coef_k φ_{X_k}(1)`.
pub fn admissibility(family: &DeltaFamily) -> Result<f64> {
    let mut best: f64 = 0.0;
    for m in &family.members {
        best = best.max(m.coef * fundamental_function(&m.norm, 1.0)?);
    }
    Ok(best)
}

/// `sup_t t^{1/p} f*(t) / N(f)` over a set of functions.
pub fn endpoint_constant(
    norm: &NormFunctional,
    p: f64,
    corpus: &[RearrangedFunction],
    exec: Execution,
) -> Result<f64> {
    let ratios: Vec<f64> = exec
        .map(corpus, |f| {
            if f.is_zero() {
                return Ok(0.0);
            }
            let n = norm.eval(f)?;
            Ok(f.sup_weighted(1.0 / p, false).value / n)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}
