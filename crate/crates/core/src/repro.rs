//! The three explicit constructions, each reproduced as a scenario that
//! compares closed forms with the numerical engine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::rearranged_corpus;
use crate::error::{invalid, Result};
use crate::funcs::{AnalyticDecreasing, RearrangedFunction, YCounterexample};
use crate::homogeneity::{
    admissibility, delta_norm, homogeneity_report, DeltaFamily, DeltaMember, HomogeneityOptions,
    Verdict,
};
use crate::lorentz::{lorentz_norm, LorentzParams, Mode};
use crate::norm::{fundamental_function, NormFunctional, NormKind};
use crate::orlicz::{
    default_delta2_grid, delta2_estimate, ell_grid, embedding_ratio_profile, fundamental_constant,
    oscillating_offset, oscillating_slope, YoungFunction,
};
use crate::par::Execution;
use crate::quad::{integrate_line, QuadratureSpec};

/// One closed-form versus numeric comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub quantity: String,
    pub closed_form: f64,
    pub numeric: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ScenarioRow {
    pub fn new(
        quantity: impl Into<String>,
        closed_form: f64,
        numeric: f64,
        tolerance: f64,
    ) -> Self {
        let rel_error = if closed_form == numeric {
            0.0
        } else {
            (numeric - closed_form).abs() / closed_form.abs()
        };
        Self {
            quantity: quantity.into(),
            closed_form,
            numeric,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
        }
    }
}

/// A qualitative assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl ScenarioCheck {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }
}

/// Plot-ready columns; rows are sorted by the first column.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Grid {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, f64>,
    pub rows: Vec<ScenarioRow>,
    pub checks: Vec<ScenarioCheck>,
    pub grid: Grid,
    pub pass: bool,
}

impl ScenarioReport {
    fn finish(
        scenario: &str,
        parameters: BTreeMap<String, f64>,
        rows: Vec<ScenarioRow>,
        checks: Vec<ScenarioCheck>,
        mut grid: Grid,
    ) -> Self {
        grid.rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let pass = rows.iter().all(|r| r.pass) && checks.iter().all(|c| c.pass);
        Self {
            scenario: scenario.into(),
            parameters,
            rows,
            checks,
            grid,
            pass,
        }
    }

    pub fn row(&self, quantity: &str) -> Option<&ScenarioRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn check(&self, name: &str) -> Option<&ScenarioCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Tolerance for rows with an antiderivative oracle.
pub const CLOSED_FORM_TOL: f64 = 1e-8;

/// `‖f‖_Y` of the counterexample.
pub fn y_norm_closed(p: f64) -> f64 {
    let y = YCounterexample::new(p).expect("p > 1");
    let (a, c, pc) = (y.a(), y.c(), y.conj());
    (1.0 / (2.0 * p) + c * c * (a.powf(2.0 / p - 2.0) - 1.0) / (2.0 - 2.0 / p)).sqrt() + c * pc
}

/// `‖D_r f‖_Y r^{1/p}` for `r < a`.
pub fn y_dilated_closed(p: f64, r: f64) -> f64 {
    let pc = p / (p - 1.0);
    let w = 1.0 - r.ln();
    w.powf(-0.5) + (w / (2.0 * p)).ln() + pc / (2.0 * p)
}

/// `φ_Y(t)` on both branches.
pub fn y_fundamental_closed(p: f64, t: f64) -> f64 {
    let pc = p / (p - 1.0);
    if t < 1.0 {
        let inner = (p / (2.0 * p - 2.0)) * (p - t.powf((2.0 * p - 2.0) / p));
        (inner.sqrt() + pc * t.powf((p - 1.0) / p)) * t.powf(1.0 / p)
    } else {
        (p / 2.0).sqrt() - p + p * p / (p - 1.0) * t.powf(1.0 / p)
    }
}

pub fn y_scenario(p: f64, r_grid: &[f64], quad: &QuadratureSpec) -> Result<ScenarioReport> {
    let y = YCounterexample::new(p)?;
    let a = y.a();
    if r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0) || *r >= a) {
        return invalid(format!("r grid must be nonempty and inside (0, {a:e})"));
    }
    let norm = NormFunctional::new(NormKind::YSpace { p })?.with_quad(*quad);
    let f: RearrangedFunction = AnalyticDecreasing::y_counterexample(p)?.into();
    let mut rows = Vec::new();

    for t in [0.1, 0.5, 1.0, 2.0, 10.0] {
        rows.push(ScenarioRow::new(
            format!("phi_Y({t})"),
            y_fundamental_closed(p, t),
            fundamental_function(&norm, t)?,
            CLOSED_FORM_TOL,
        ));
    }
    let closed_norm = y_norm_closed(p);
    let numeric_norm = norm.eval(&f)?;
    rows.push(ScenarioRow::new(
        "norm_Y(f)",
        closed_norm,
        numeric_norm,
        CLOSED_FORM_TOL,
    ));
    let c_numeric = integrate_line(
        |u| f.log_weighted(u, 1.0).exp(),
        None,
        Some(a.ln()),
        &[],
        quad,
    )
    .finite_value("∫_0^a f*")?;
    rows.push(ScenarioRow::new("c = int_0^a f*", y.c(), c_numeric, 1e-9));

    let mut rs = r_grid.to_vec();
    rs.sort_by(f64::total_cmp);
    let numeric: Vec<f64> = Execution::default()
        .map(&rs, |r| {
            Ok(norm.eval(&f.dilate(*r)?)? * r.powf(1.0 / p) / numeric_norm)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let mut grid = Grid {
        columns: vec!["r".into(), "ratio_closed".into(), "ratio_numeric".into()],
        rows: Vec::new(),
    };
    for (r, n) in rs.iter().zip(&numeric) {
        let closed = y_dilated_closed(p, *r) / closed_norm;
        rows.push(ScenarioRow::new(
            format!("R({r:e})"),
            closed,
            *n,
            CLOSED_FORM_TOL,
        ));
        grid.rows.push(vec![*r, closed, *n]);
    }

    let increasing = numeric.windows(2).all(|w| w[0] > w[1]);
    let mut checks = vec![ScenarioCheck::new(
        "ratio strictly increasing as r decreases",
        increasing,
        format!(
            "{} grid points from r = {:e} to {:e}",
            rs.len(),
            rs[0],
            rs[rs.len() - 1]
        ),
    )];
    if rs[0] <= 1e-12 {
        let r_min = numeric[0];
        checks.push(ScenarioCheck::new(
            "ratio at r <= 1e-12 is at least 2.9",
            r_min >= 2.9,
            format!("R = {r_min}"),
        ));
    }
    let rep = homogeneity_report(&norm, &[f], &rs, HomogeneityOptions::default())?;
    checks.push(ScenarioCheck::new(
        "homogeneity verdict inhomogeneous",
        matches!(rep.verdict, Verdict::Inhomogeneous { .. }),
        format!("{:?}", rep.verdict),
    ));

    let params = BTreeMap::from([
        ("p".to_string(), p),
        ("a".to_string(), a),
        ("c".to_string(), y.c()),
    ]);
    Ok(ScenarioReport::finish("y", params, rows, checks, grid))
}

/// `‖g‖_{p, Q + 1/n}` in closed form.
pub fn g_star_norm_closed(p: f64, q_big: f64, n: f64) -> f64 {
    p.powf(-1.0 / (q_big * (q_big * n + 1.0)))
        * q_big.powf(1.0 / q_big)
        * n.powf(n / (q_big * n + 1.0))
}

/// Lower bound `ε` of the closed-form norms over `n ≤ n_max`. The sequence
/// increases in `n`, so this is its infimum over all `n`.
pub fn g_epsilon(p: f64, q_big: f64, n_max: usize) -> f64 {
    (1..=n_max)
        .map(|n| g_star_norm_closed(p, q_big, n as f64))
        .fold(f64::INFINITY, f64::min)
}

/// Members `‖·‖_{(p, Q+1/n)}`, `n = 1..=n_max`, each weighted by `1/‖g‖` so
/// that `g` has norm one.
pub fn g_family(p: f64, q_big: f64, n_max: usize, quad: &QuadratureSpec) -> Result<DeltaFamily> {
    if n_max == 0 {
        return invalid("g family needs at least one member");
    }
    let g: RearrangedFunction = AnalyticDecreasing::g(p, q_big)?.into();
    let members: Vec<DeltaMember> = Execution::default()
        .map_range(n_max, |k| {
            let index = q_big + 1.0 / (k + 1) as f64;
            let norm = NormFunctional::lorentz(p, index, Mode::DoubleStar)?.with_quad(*quad);
            let coef = 1.0 / norm.eval(&g)?;
            Ok(DeltaMember { index, norm, coef })
        })
        .into_iter()
        .collect::<Result<_>>()?;
    DeltaFamily::new(p, members)
}

pub fn g_scenario(
    p: f64,
    q_big: f64,
    n_max: usize,
    corpus_size: usize,
    seed: u64,
    quad: &QuadratureSpec,
) -> Result<ScenarioReport> {
    let g_body = AnalyticDecreasing::g(p, q_big);
    let mut checks = vec![ScenarioCheck::new(
        "g is nonincreasing",
        g_body.is_ok(),
        g_body.as_ref().map_or_else(
            |e| e.to_string(),
            |_| "checked on a 256-point log grid".into(),
        ),
    )];
    let g: RearrangedFunction = g_body?.into();
    let mut rows = Vec::new();
    let mut grid = Grid {
        columns: vec![
            "n".into(),
            "norm_closed".into(),
            "norm_numeric".into(),
            "coef".into(),
        ],
        rows: Vec::new(),
    };
    let family = g_family(p, q_big, n_max, quad)?;

    let star: Vec<f64> = Execution::default()
        .map_range(n_max, |k| {
            lorentz_norm(
                &g,
                LorentzParams::new(p, q_big + 1.0 / (k + 1) as f64)?,
                Mode::Star,
                quad,
            )
        })
        .into_iter()
        .collect::<Result<_>>()?;
    for (k, s) in star.iter().enumerate() {
        let n = (k + 1) as f64;
        let closed = g_star_norm_closed(p, q_big, n);
        rows.push(ScenarioRow::new(
            format!("star norm n={}", k + 1),
            closed,
            *s,
            CLOSED_FORM_TOL,
        ));
        grid.rows.push(vec![n, closed, *s, family.members[k].coef]);
    }
    let at_q = lorentz_norm(&g, LorentzParams::new(p, q_big)?, Mode::Star, quad)?;
    checks.push(ScenarioCheck::new(
        "star norm at q = Q diverges",
        at_q == f64::INFINITY,
        format!("value {at_q}"),
    ));

    rows.push(ScenarioRow::new(
        "delta norm of g",
        1.0,
        delta_norm(&family, &g)?,
        CLOSED_FORM_TOL,
    ));
    let adm = admissibility(&family)?;
    checks.push(ScenarioCheck::new(
        "admissibility finite",
        adm.is_finite() && adm > 0.0,
        format!("max coef * phi(1) = {adm}"),
    ));

    let eps = g_epsilon(p, q_big, n_max);
    let constant = p * p / (eps * (p - 1.0));
    let base = NormFunctional::lorentz(p, q_big, Mode::DoubleStar)?.with_quad(*quad);
    let corpus = rearranged_corpus(seed, corpus_size);
    let worst = Execution::default()
        .map(&corpus, |f| {
            Ok(delta_norm(&family, f)? / (constant * base.eval(f)?))
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(ScenarioCheck::new(
        "embedding bound on corpus",
        worst <= 1.0 + 1e-9,
        format!("max ‖f‖_Δ / (C ‖f‖) = {worst} over {corpus_size} functions, C = {constant}"),
    ));

    let params = BTreeMap::from([
        ("p".to_string(), p),
        ("Q".to_string(), q_big),
        ("N".to_string(), n_max as f64),
        ("epsilon".to_string(), eps),
        ("embedding_constant".to_string(), constant),
        ("admissibility".to_string(), adm),
    ]);
    Ok(ScenarioReport::finish("g", params, rows, checks, grid))
}

/// Largest `x Φ'(x)/Φ(x)` allowed for the oscillating function.
pub const ELASTICITY_BOUND: f64 = 6.0;

pub fn oscillating_scenario(
    q_list: &[f64],
    ell_max: f64,
    quad: &QuadratureSpec,
) -> Result<ScenarioReport> {
    if q_list.iter().any(|q| !(*q > 1.0) || !q.is_finite()) {
        return invalid("q values must lie in (1, inf)");
    }
    let phi = YoungFunction::oscillating();
    let (a, b) = (oscillating_slope(), oscillating_offset());
    let e1 = (-1.0f64).exp();
    let phi_e1 = phi.value(e1);
    // left derivative (Φ/x)(4 + cos ℓ + sin ℓ) at ℓ = 0
    let left_slope = (phi.log_value(-1.0) + 1.0).exp() * phi.elasticity(-1.0 - f64::EPSILON);
    let rows = vec![
        ScenarioRow::new("Phi(1/e)", (-4.0f64).exp(), phi_e1, 1e-12),
        ScenarioRow::new("a = Phi'(1/e)", 5.0 * (-3.0f64).exp(), left_slope, 1e-12),
        ScenarioRow::new(
            "b = a/e - Phi(1/e)",
            4.0 * (-4.0f64).exp(),
            a * e1 - phi_e1,
            1e-12,
        ),
        ScenarioRow::new("linear part at 1/e", phi_e1, a * e1 - b, 1e-12),
    ];
    let mut checks = vec![ScenarioCheck::new(
        "Young function invariants",
        YoungFunction::new(crate::orlicz::YoungKind::Oscillating).is_ok(),
        "increasing and convex on a 512-point grid".into(),
    )];
    let defect = phi.convexity_defect(-20.0, 20.0);
    checks.push(ScenarioCheck::new(
        "convexity",
        defect >= -1e-12,
        format!("min normalised second difference {defect:e}"),
    ));

    let ells = ell_grid(ell_max, 4001);
    let mut lxs: Vec<f64> = ells.iter().map(|l| -l.exp()).collect();
    lxs.extend((0..=512).map(|i| -1.0 + 21.0 * i as f64 / 512.0));
    let elasticity = lxs
        .iter()
        .map(|lx| phi.elasticity(*lx))
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(ScenarioCheck::new(
        "x Phi'/Phi <= 6",
        elasticity <= ELASTICITY_BOUND + 1e-9,
        format!("max {elasticity}"),
    ));
    let delta2 = delta2_estimate(&phi, &default_delta2_grid())?;
    checks.push(ScenarioCheck::new(
        "delta2 estimate <= 64",
        delta2 <= 64.0,
        format!("estimate {delta2} (grid sup)"),
    ));

    let mut grid = Grid {
        columns: vec!["ell".into()],
        rows: ells.iter().map(|l| vec![*l]).collect(),
    };
    for &q in q_list {
        let psi = YoungFunction::power(q)?;
        let forward = embedding_ratio_profile(&phi, &psi, &ells);
        let backward = embedding_ratio_profile(&psi, &phi, &ells);
        grid.columns.push(format!("log_psi_over_phi_q{q}"));
        grid.columns.push(format!("log_phi_over_psi_q{q}"));
        for (k, row) in grid.rows.iter_mut().enumerate() {
            row.push(forward.log_ratio[k]);
            row.push(backward.log_ratio[k]);
        }
        let fmax = forward
            .running_max
            .last()
            .copied()
            .unwrap_or(f64::NEG_INFINITY);
        let bmax = backward
            .running_max
            .last()
            .copied()
            .unwrap_or(f64::NEG_INFINITY);
        let detail = format!("max ln(Psi/Phi) = {fmax:.6e}, max ln(Phi/Psi) = {bmax:.6e}");
        if q > 3.0 && q < 5.0 {
            checks.push(ScenarioCheck::new(
                &format!("q={q}: both ratios unbounded"),
                forward.unbounded && backward.unbounded,
                detail,
            ));
        } else if q >= 5.0 {
            checks.push(ScenarioCheck::new(
                &format!("q={q}: Psi/Phi bounded by 1"),
                fmax <= 0.0,
                detail,
            ));
        } else {
            checks.push(ScenarioCheck::new(
                &format!("q={q}: Phi/Psi bounded by 1"),
                bmax <= 0.0,
                detail,
            ));
        }
    }

    let c0 = fundamental_constant(&phi, 2.0, quad)?;
    let params = BTreeMap::from([
        ("a".to_string(), a),
        ("b".to_string(), b),
        ("ell_max".to_string(), ell_max),
        ("delta2_estimate".to_string(), delta2),
        ("fundamental_constant_p2".to_string(), c0),
    ]);
    Ok(ScenarioReport::finish(
        "oscillating",
        params,
        rows,
        checks,
        grid,
    ))
}
