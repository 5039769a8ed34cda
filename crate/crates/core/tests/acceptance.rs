//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line. Pass criterion numbers as arguments to
//! run a subset.

use std::process::ExitCode;
use std::time::Instant;

use rikit::corpus::{rearranged_corpus, shuffled, step_pairs, weight_corpus, DEFAULT_SEED};
use rikit::homogeneity::{endpoint_constant, homogeneity_report, HomogeneityOptions};
use rikit::lorentz::{
    gamma1_weight_transform, lorentz_norm, weighted_lorentz_norm, LorentzParams, Mode, Weight,
    WeightedMode,
};
use rikit::norm::fundamental_function;
use rikit::orlicz::{
    fundamental_constant, luxemburg_norm, modular_equivalence_ratio, OrliczLorentzParams,
    YoungFunction, YoungPiece,
};
use rikit::repro::{g_family, g_scenario, oscillating_scenario, y_scenario, ScenarioReport};
use rikit::{Execution, NormFunctional, NormKind, QuadratureSpec, RearrangedFunction, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn decades(lo: i32, hi: i32, per_decade: i32) -> Vec<f64> {
    (lo * per_decade..=hi * per_decade)
        .map(|k| 10f64.powf(k as f64 / per_decade as f64))
        .collect()
}

fn scenario_outcome(rep: &ScenarioReport) -> Outcome {
    let failed: Vec<String> = rep
        .rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} rel {:.2e}", r.quantity, r.rel_error))
        .chain(
            rep.checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{}: {}", c.name, c.detail)),
        )
        .collect();
    let worst = rep.rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let detail = if failed.is_empty() {
        format!(
            "{} rows, {} checks, worst row rel {:.2e}",
            rep.rows.len(),
            rep.checks.len(),
            worst
        )
    } else {
        format!("failed: {}", failed.join("; "))
    };
    Outcome::new(rep.pass, detail)
}

fn lorentz_homogeneity(quad: &QuadratureSpec) -> Result<Outcome> {
    let corpus = rearranged_corpus(DEFAULT_SEED, 20);
    let rs = decades(-3, 3, 2);
    let mut worst_alpha: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    for (p, q) in [(2.0, 2.0), (3.0, 2.0), (2.0, 1.0), (1.5, 4.0)] {
        let norm = NormFunctional::lorentz(p, q, Mode::DoubleStar)?.with_quad(*quad);
        let rep = homogeneity_report(&norm, &corpus, &rs, HomogeneityOptions::default())?;
        worst_alpha = worst_alpha.max((rep.fitted_alpha + 1.0 / p).abs());
        worst_spread = worst_spread.max(rep.spread_max);
    }
    Ok(Outcome::new(
        worst_alpha <= 1e-6 && worst_spread <= 1e-8,
        format!("max |alpha + 1/p| = {worst_alpha:.2e} (tol 1e-6), max spread = {worst_spread:.2e} (tol 1e-8)"),
    ))
}

fn sandwich(quad: &QuadratureSpec) -> Result<Outcome> {
    let corpus = rearranged_corpus(DEFAULT_SEED, 200);
    let mut worst: f64 = f64::INFINITY;
    for (p, q) in [(2.0, 2.0), (3.0, 1.0), (1.5, 4.0), (4.0, 3.0)] {
        let pq = LorentzParams::new(p, q)?;
        let slacks = Execution::default()
            .map(&corpus, |f| {
                let star = lorentz_norm(f, pq, Mode::Star, quad)?;
                let dstar = lorentz_norm(f, pq, Mode::DoubleStar, quad)?;
                Ok(((dstar - star) / star).min((pq.conj() * star - dstar) / star))
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        worst = slacks.into_iter().fold(worst, f64::min);
    }
    Ok(Outcome::new(
        worst >= -1e-9,
        format!("min relative slack {worst:.3e} (tol -1e-9)"),
    ))
}

fn luxemburg_power(quad: &QuadratureSpec) -> Result<Outcome> {
    let corpus = rearranged_corpus(DEFAULT_SEED, 100);
    let mut worst: f64 = 0.0;
    for (p, q) in [(2.0, 2.0), (3.0, 4.0), (1.5, 3.0)] {
        let params = OrliczLorentzParams::new(p, YoungFunction::power(q)?)?;
        let pq = LorentzParams::new(p, q)?;
        let errs = Execution::default()
            .map(&corpus, |f| {
                Ok(rel(
                    luxemburg_norm(f, &params, quad)?,
                    lorentz_norm(f, pq, Mode::DoubleStar, quad)?,
                ))
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        worst = errs.into_iter().fold(worst, f64::max);
    }
    Ok(Outcome::new(
        worst <= 1e-7,
        format!("max rel diff {worst:.2e} over 100 functions x 3 pairs (tol 1e-7)"),
    ))
}

fn fundamental_constants(quad: &QuadratureSpec) -> Result<Outcome> {
    let mut pass = true;
    let mut notes = Vec::new();
    let ts = decades(-2, 2, 4);

    let mut closed_err: f64 = 0.0;
    for (p, q) in [(2.0f64, 2.0f64), (3.0, 4.0), (1.5, 3.0)] {
        let expected: f64 = (p / q).powf(1.0 / q);
        closed_err = closed_err.max(rel(
            fundamental_constant(&YoungFunction::power(q)?, p, quad)?,
            expected,
        ));
        // same function through the generic root finder
        let table = YoungFunction::piecewise(vec![YoungPiece {
            end: f64::INFINITY,
            coef: 1.0,
            exponent: q,
        }])?;
        closed_err = closed_err.max(rel(fundamental_constant(&table, p, quad)?, expected));
    }
    pass &= closed_err <= 1e-10;
    notes.push(format!("C0 rel err {closed_err:.1e}"));

    let cases = [
        (2.0, YoungFunction::power(2.0)?),
        (3.0, YoungFunction::power(4.0)?),
        (2.0, YoungFunction::oscillating()),
    ];
    for (p, phi) in cases {
        let c0 = fundamental_constant(&phi, p, quad)?;
        let norm = NormFunctional::new(NormKind::OrliczLorentz(OrliczLorentzParams::new(
            p,
            phi.clone(),
        )?))?
        .with_quad(*quad);
        let vals: Vec<f64> = ts
            .iter()
            .map(|t| Ok(fundamental_function(&norm, *t)? / t.powf(1.0 / p)))
            .collect::<Result<_>>()?;
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        let cv = var.sqrt() / mean;
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        pass &= cv < 1e-6 && min >= c0 - 1e-9;
        let mut note = format!(
            "{} p={p}: phi/t^(1/p)={mean:.9} cv={cv:.1e} C0={c0:.9}",
            phi.name()
        );
        if let rikit::orlicz::YoungKind::Power { q } = phi.kind() {
            let expected: f64 = (p * p / (q * (p - 1.0))).powf(1.0 / q);
            let err = rel(mean, expected);
            pass &= err <= 1e-7;
            note.push_str(&format!(" vs (p^2/(q(p-1)))^(1/q) rel {err:.1e}"));
        }
        notes.push(note);
    }
    Ok(Outcome::new(pass, notes.join("; ")))
}

fn modular_equivalence(quad: &QuadratureSpec) -> Result<Outcome> {
    let corpus = rearranged_corpus(DEFAULT_SEED, 100);
    let mut pass = true;
    let mut notes = Vec::new();
    for phi in [
        YoungFunction::power(2.0)?,
        YoungFunction::power(4.0)?,
        YoungFunction::oscillating(),
    ] {
        for p in [1.5, 2.0, 3.0] {
            let ratios = Execution::default()
                .map(&corpus, |f| modular_equivalence_ratio(f, p, &phi, quad))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let lo = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
            let ok = ratios.iter().all(|r| r.within_bound(1e-9));
            pass &= ok;
            if !ok {
                notes.push(format!(
                    "{} p={p}: ratio in [{lo:.6}, {hi:.6}] exceeds bound {:.4}",
                    phi.name(),
                    ratios[0].bound
                ));
            } else if p == 3.0 {
                notes.push(format!(
                    "{}: bound at p=3 {:.4}, max ratio {hi:.4}",
                    phi.name(),
                    ratios[0].bound
                ));
            }
        }
    }
    Ok(Outcome::new(pass, notes.join("; ")))
}

fn g_criterion(quad: &QuadratureSpec) -> Result<Outcome> {
    let (p, q_big, n) = (2.0, 3.0, 20);
    let rep = g_scenario(p, q_big, n, 100, DEFAULT_SEED, quad)?;
    let base = scenario_outcome(&rep);
    let family = g_family(p, q_big, n, quad)?;
    let norm = NormFunctional::new(NormKind::Delta(family))?;
    let mut testset = vec![RearrangedFunction::from(rikit::AnalyticDecreasing::g(
        p, q_big,
    )?)];
    testset.extend(rearranged_corpus(DEFAULT_SEED, 10));
    let hr = homogeneity_report(
        &norm,
        &testset,
        &decades(-3, 3, 2),
        HomogeneityOptions::default(),
    )?;
    let alpha_err = (hr.fitted_alpha + 0.5).abs();
    Ok(Outcome::new(
        base.pass && alpha_err <= 1e-6,
        format!(
            "{}; delta-norm fitted alpha {:.9} (|err| {alpha_err:.1e}, tol 1e-6)",
            base.detail, hr.fitted_alpha
        ),
    ))
}

fn endpoint_bounds(quad: &QuadratureSpec) -> Result<Outcome> {
    let corpus = rearranged_corpus(DEFAULT_SEED, 50);
    let p = 2.0;
    let mut norms = vec![
        (
            "lorentz-star(2,1)",
            NormFunctional::lorentz(p, 1.0, Mode::Star)?,
        ),
        (
            "lorentz-star(2,3)",
            NormFunctional::lorentz(p, 3.0, Mode::Star)?,
        ),
        (
            "lorentz-doublestar(2,2)",
            NormFunctional::lorentz(p, 2.0, Mode::DoubleStar)?,
        ),
        (
            "lorentz-doublestar(2,inf)",
            NormFunctional::lorentz(p, f64::INFINITY, Mode::DoubleStar)?,
        ),
        (
            "lambda(2, 1)",
            NormFunctional::new(NormKind::Lambda {
                q: 2.0,
                weight: Weight::power(1.0, 0.0)?,
            })?,
        ),
        (
            "gamma(3, t^0.5)",
            NormFunctional::new(NormKind::Gamma {
                q: 3.0,
                weight: Weight::power(1.0, 0.5)?,
            })?,
        ),
        (
            "orlicz-lorentz(2, x^4)",
            NormFunctional::new(NormKind::OrliczLorentz(OrliczLorentzParams::new(
                p,
                YoungFunction::power(4.0)?,
            )?))?,
        ),
        (
            "orlicz-lorentz(2, oscillating)",
            NormFunctional::new(NormKind::OrliczLorentz(OrliczLorentzParams::new(
                p,
                YoungFunction::oscillating(),
            )?))?,
        ),
        (
            "delta(g family, N=20)",
            NormFunctional::new(NormKind::Delta(g_family(p, 3.0, 20, quad)?))?,
        ),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, norm) in norms.iter_mut() {
        norm.quad = *quad;
        let c = endpoint_constant(norm, p, &corpus, Execution::default())?;
        pass &= c.is_finite() && c > 0.0;
        notes.push(format!("{name} C={c:.4}"));
    }
    Ok(Outcome::new(pass, notes.join(", ")))
}

fn gamma_lambda_identity(quad: &QuadratureSpec) -> Result<Outcome> {
    let fs = rearranged_corpus(DEFAULT_SEED + 1, 50);
    let ws = weight_corpus(DEFAULT_SEED, 50);
    let errs = Execution::default()
        .map_range(50, |k| {
            let gamma = weighted_lorentz_norm(&fs[k], 1.0, &ws[k], WeightedMode::Gamma, quad)?;
            let lambda = weighted_lorentz_norm(
                &fs[k],
                1.0,
                &gamma1_weight_transform(&ws[k])?,
                WeightedMode::Lambda,
                quad,
            )?;
            Ok(rel(gamma, lambda))
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let worst = errs.into_iter().fold(0.0, f64::max);
    Ok(Outcome::new(
        worst <= 1e-6,
        format!("max rel diff {worst:.2e} over 50 pairs (tol 1e-6)"),
    ))
}

fn norm_axioms(quad: &QuadratureSpec) -> Result<Outcome> {
    let pairs = step_pairs(DEFAULT_SEED, 500);
    let kinds = vec![
        NormKind::LorentzStar(LorentzParams::new(3.0, 2.0)?),
        NormKind::LorentzDoubleStar(LorentzParams::new(2.0, 3.0)?),
        NormKind::Lambda {
            q: 2.0,
            weight: Weight::power(1.0, -0.5)?,
        },
        NormKind::Gamma {
            q: 2.0,
            weight: weight_corpus(DEFAULT_SEED, 1).remove(0),
        },
        NormKind::OrliczLorentz(OrliczLorentzParams::new(2.0, YoungFunction::oscillating())?),
        NormKind::Delta(g_family(2.0, 3.0, 20, quad)?),
        NormKind::YSpace { p: 2.0 },
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for kind in kinds {
        let tag = kind.tag();
        let norm = NormFunctional::new(kind)?.with_quad(*quad);
        // (triangle slack, lattice slack, rearrangement mismatch)
        let rows = Execution::default()
            .map_range(pairs.len(), |k| {
                let (f, g) = &pairs[k];
                let sum = f.add(g);
                let nf = norm.eval(&f.into())?;
                let ng = norm.eval(&g.into())?;
                let ns = norm.eval(&(&sum).into())?;
                let nshuf = norm.eval(&(&shuffled(f, k as u64)).into())?;
                Ok(((nf + ng - ns) / ns, (ns - nf) / ns, rel(nshuf, nf)))
            })
            .into_iter()
            .collect::<Result<Vec<(f64, f64, f64)>>>()?;
        let tri = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let lat = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        let ri = rows.iter().map(|r| r.2).fold(0.0, f64::max);
        pass &= tri >= -1e-9 && lat >= -1e-9 && ri <= 1e-12;
        notes.push(format!("{tag}: tri {tri:.1e} lat {lat:.1e} ri {ri:.1e}"));
    }
    Ok(Outcome::new(pass, notes.join("; ")))
}

type Criterion = (u32, &'static str, fn(&QuadratureSpec) -> Result<Outcome>);

fn main() -> ExitCode {
    let quad = QuadratureSpec::default();
    let criteria: Vec<Criterion> = vec![
        (1, "lorentz doublestar homogeneity", lorentz_homogeneity),
        (2, "star/doublestar sandwich", sandwich),
        (
            3,
            "luxemburg matches lorentz for power young functions",
            luxemburg_power,
        ),
        (
            4,
            "fundamental constants and functions",
            fundamental_constants,
        ),
        (5, "modular equivalence ratio", modular_equivalence),
        (6, "y-space scenario", |q| {
            Ok(scenario_outcome(&y_scenario(2.0, &decades(-12, -2, 1), q)?))
        }),
        (7, "g scenario and delta norm", g_criterion),
        (8, "oscillating young function scenario", |q| {
            Ok(scenario_outcome(&oscillating_scenario(
                &[3.5, 4.0, 4.5, 5.0],
                40.0,
                q,
            )?))
        }),
        (9, "endpoint bound constants", endpoint_bounds),
        (
            10,
            "gamma-1 equals lambda-1 of transformed weight",
            gamma_lambda_identity,
        ),
        (11, "norm axioms", norm_axioms),
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();

    let mut failures = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run(&quad).unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} [{status}] {name} ({secs:.1}s): {}",
            outcome.detail
        );
        failures += usize::from(!outcome.pass);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
