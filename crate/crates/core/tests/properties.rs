use proptest::prelude::*;

use rikit::lorentz::{embedding_constant, lorentz_norm, LorentzParams, Mode};
use rikit::orlicz::{luxemburg_norm, modular, OrliczLorentzParams, YoungFunction};
use rikit::{NormFunctional, NormKind, QuadratureSpec, RearrangedFunction, StepFunction};

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn step() -> impl Strategy<Value = StepFunction> {
    prop::collection::vec((log_uniform(1e-3, 1e3), log_uniform(1e-3, 1e3)), 1..=8)
        .prop_map(|pieces| StepFunction::new(pieces).unwrap())
}

fn young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.0..6.0f64).prop_map(|q| YoungFunction::power(q).unwrap()),
        Just(YoungFunction::oscillating()),
    ]
}

fn norm_kind() -> impl Strategy<Value = NormKind> {
    prop_oneof![
        (1.2..4.0f64, 1.0..6.0f64)
            .prop_map(|(p, q)| NormKind::LorentzDoubleStar(LorentzParams::new(p, q).unwrap())),
        (1.2..4.0f64, young()).prop_map(|(p, phi)| NormKind::OrliczLorentz(
            OrliczLorentzParams::new(p, phi).unwrap()
        )),
        (1.2..4.0f64).prop_map(|p| NormKind::YSpace { p }),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_doublestar_sandwich(f in step(), p in 1.1..5.0f64, q in 1.0..8.0f64) {
        let f: RearrangedFunction = (&f).into();
        let pq = LorentzParams::new(p, q).unwrap();
        let star = lorentz_norm(&f, pq, Mode::Star, &quad()).unwrap();
        let dstar = lorentz_norm(&f, pq, Mode::DoubleStar, &quad()).unwrap();
        prop_assert!(star <= dstar * (1.0 + 1e-9), "{star} > {dstar}");
        prop_assert!(dstar <= pq.conj() * star * (1.0 + 1e-9), "{dstar} > p' {star}");
    }

    #[test]
    fn triangle_and_lattice(f in step(), g in step(), kind in norm_kind()) {
        let n = NormFunctional::new(kind).unwrap();
        let sum = f.add(&g);
        let (nf, ng, ns) = (n.eval(&(&f).into()).unwrap(), n.eval(&(&g).into()).unwrap(), n.eval(&(&sum).into()).unwrap());
        prop_assert!(ns <= (nf + ng) * (1.0 + 1e-9), "{ns} > {nf} + {ng}");
        prop_assert!(nf.max(ng) <= ns * (1.0 + 1e-9));
    }

    #[test]
    fn positive_scaling(f in step(), a in log_uniform(1e-6, 1e6), kind in norm_kind()) {
        let n = NormFunctional::new(kind).unwrap();
        let f: RearrangedFunction = (&f).into();
        let base = n.eval(&f).unwrap();
        prop_assert!(rel(n.eval(&f.scale(a).unwrap()).unwrap(), a * base) < 1e-12);
    }

    #[test]
    fn luxemburg_unit_modular(f in step(), p in 1.2..4.0f64, phi in young()) {
        let params = OrliczLorentzParams::new(p, phi).unwrap();
        let f: RearrangedFunction = (&f).into();
        let norm = luxemburg_norm(&f, &params, &quad()).unwrap();
        let rho = modular(&f, &params, norm, &quad()).unwrap();
        prop_assert!((rho - 1.0).abs() < 1e-8, "modular at the norm is {rho}");
        prop_assert!(modular(&f, &params, 1.01 * norm, &quad()).unwrap() < 1.0);
    }

    #[test]
    fn lorentz_embedding(f in step(), p in 1.2..4.0f64, q in 1.0..8.0f64, gap in 0.1..10.0f64, inf in any::<bool>()) {
        let r = if inf { f64::INFINITY } else { q + gap };
        let f: RearrangedFunction = (&f).into();
        let small = lorentz_norm(&f, LorentzParams::new(p, q).unwrap(), Mode::DoubleStar, &quad()).unwrap();
        let large = lorentz_norm(&f, LorentzParams::new(p, r).unwrap(), Mode::DoubleStar, &quad()).unwrap();
        prop_assert!(large <= embedding_constant(p, q, r) * small * (1.0 + 1e-9), "{large} vs {small}");
    }

    #[test]
    fn lorentz_dilation_exact(f in step(), p in 1.2..4.0f64, q in 1.0..6.0f64, r in log_uniform(1e-4, 1e4)) {
        let n = NormFunctional::lorentz(p, q, Mode::DoubleStar).unwrap();
        let f: RearrangedFunction = (&f).into();
        let ratio = n.eval(&f.dilate(r).unwrap()).unwrap() / n.eval(&f).unwrap();
        prop_assert!(rel(ratio, r.powf(-1.0 / p)) < 1e-9);
    }

    #[test]
    fn rearrangement_invariance(f in step(), seed in any::<u64>(), kind in norm_kind()) {
        let n = NormFunctional::new(kind).unwrap();
        let g = rikit::corpus::shuffled(&f, seed);
        prop_assert_eq!(n.eval(&(&f).into()).unwrap(), n.eval(&(&g).into()).unwrap());
    }
}
