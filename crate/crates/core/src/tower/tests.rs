use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::numeric::{q, BaseField, ExtRational, Rational, ValBound};
use crate::pwl::PLFunction;

fn base2() -> BaseField {
    BaseField::mixed(2, 1).unwrap()
}

fn frobenius_like(qn: u64) -> StepTemplate {
    StepTemplate::new(qn, [(1, ValBound::exact(q(1, 1)))])
}

fn linear_term_tower(p: u64) -> TowerSpec {
    TowerSpec::periodic(BaseField::mixed(p, 1).unwrap(), vec![], vec![frobenius_like(p)]).unwrap()
}

#[test]
fn accumulate_examples() {
    let spec = linear_term_tower(2);
    let r = classify(&spec, 2).unwrap();
    assert_eq!(r.per_step[0].phi_step.vertices(), &[(q(2, 1), q(2, 1))]);
    assert_eq!(r.phi.vertices(), &[(q(2, 1), q(2, 1)), (q(4, 1), q(3, 1))]);
    assert_eq!(r.phi.slopes(), &[q(1, 1), q(1, 2), q(1, 4)]);
    assert_eq!(r.alphas, vec![ExtRational::Finite(q(2, 1)), ExtRational::Finite(q(4, 1))]);

    let (phi, alpha) = accumulate(&PLFunction::identity(), &r.per_step[0]).unwrap();
    assert_eq!(phi, r.per_step[0].phi_step);
    assert_eq!(alpha, ExtRational::Finite(q(2, 1)));
}

#[test]
fn certify_examples() {
    let kummer = TowerSpec::periodic(base2(), vec![], vec![StepTemplate::new(2, [])]).unwrap();
    let c = theorem1_certify(&kummer).unwrap().unwrap();
    assert_eq!((&c.epsilon_star, c.q_max, &c.c_lower), (&q(1, 1), 2, &q(1, 2)));
    // levels 2^n + 1, so the minima (2^n + 1)/2^n decrease to c = 1
    let r = classify(&kummer, 10).unwrap();
    assert_eq!(r.levels, (1..=10).map(|n| q((1 << n) + 1, 1)).collect::<Vec<_>>());
    for (k, m) in r.strictness_minima.iter().enumerate() {
        let two_n = 1 << (k + 1);
        assert_eq!(*m, ExtRational::Finite(q(two_n + 1, two_n)));
        assert!(*m >= ExtRational::Finite(c.c_lower.clone()));
    }

    let c = theorem1_certify(&linear_term_tower(2)).unwrap().unwrap();
    assert_eq!(c.c_lower, q(1, 2));

    let vague = TowerSpec::periodic(base2(), vec![], vec![StepTemplate::new(2, [(1, ValBound::at_least(q(0, 1)))])])
        .unwrap();
    assert_eq!(theorem1_certify(&vague).unwrap(), None);

    let finite = TowerSpec::finite(base2(), vec![StepTemplate::new(2, []); 3]).unwrap();
    assert!(matches!(theorem1_certify(&finite), Err(Error::CannotCertify(_))));
    let r = classify(&finite, 3).unwrap();
    assert_ne!(r.verdict, Verdict::CertifiedStrictlyApf);
    assert!(r.notes.iter().any(|n| n.contains("tail of tower unspecified")));
}

#[test]
fn classify_linear_term_tower_certified() {
    let r = classify(&linear_term_tower(2), 20).unwrap();
    assert_eq!(r.verdict, Verdict::CertifiedStrictlyApf);
    assert_eq!(r.certified_c_lower, Some(q(1, 2)));
    assert!(r.strictness_minima.iter().all(|m| *m == ExtRational::Finite(q(1, 1))));
    assert_eq!(r.breaks, (1..=20).map(|n| q(n + 1, 1)).collect::<Vec<_>>());
    assert!(r.notes.iter().any(|n| n.contains("limit")));
}

#[test]
fn classify_s_linear_nonapf_like() {
    let cycle: Vec<StepTemplate> = (1..=14u32)
        .map(|n| StepTemplate::new(5, [(1, ValBound::exact(Rational::new(n, BigInt::from(5).pow(n - 1))))]))
        .collect();
    let spec = TowerSpec::finite(BaseField::mixed(5, 1).unwrap(), cycle).unwrap();
    let r = classify(&spec, 14).unwrap();
    assert_eq!(r.verdict, Verdict::EmpiricalNonApfLike);
    for (k, w) in r.breaks.windows(3).enumerate() {
        assert_eq!((&w[2] - &w[1]) / (&w[1] - &w[0]), q(1, 5), "at {k}");
    }
}

#[test]
fn uncertainty_blocks_certification() {
    // a_1 only known to be >= 1/2: the line x + 1/2 may or may not be active
    let t = StepTemplate::new(2, [(1, ValBound::at_least(q(1, 2)))]);
    let spec = TowerSpec::periodic(base2(), vec![], vec![t]).unwrap();
    assert!(theorem1_certify(&spec).unwrap().is_some());
    let r = classify(&spec, 4).unwrap();
    assert!(r.per_step.iter().any(|s| s.uncertainty));
    assert_eq!(r.verdict, Verdict::Indeterminate);
    assert_eq!(r.certified_c_lower, None);
}

#[test]
fn non_elementary_steps_suppress_levels() {
    // g has three active lines, so phi_step has two vertices
    let t = StepTemplate::new(4, [(1, ValBound::exact(q(3, 1))), (2, ValBound::exact(q(1, 2)))]);
    let spec = TowerSpec::periodic(base2(), vec![], vec![t]).unwrap();
    let r = classify(&spec, 3).unwrap();
    assert!(r.per_step[0].phi_step.vertices().len() >= 2);
    assert!(r.levels.is_empty() && r.breaks.is_empty());
    assert!(r.notes.iter().any(|n| n.contains("not elementary")));
}

#[test]
fn log_bound_examples() {
    assert!(log_bound_check(&PLFunction::identity(), &q(1, 2), &q(1, 1)).unwrap());
    let r = classify(&linear_term_tower(2), 10).unwrap();
    assert!(log_bound_check(&r.phi, &q(1, 1), &q(2, 1)).unwrap());

    let lowered = PLFunction::from_breakpoints(q(0, 1), vec![q(2, 1), q(8, 1)], vec![q(1, 1), q(1, 100), q(1, 1000)])
        .unwrap();
    assert!(!log_bound_check(&lowered, &q(1, 1), &q(2, 1)).unwrap());
    assert!(log_bound_check(&lowered, &q(0, 1), &q(2, 1)).is_err());
}

#[test]
fn quadratic_convention_shift() {
    let spec = TowerSpec::periodic(base2(), vec![], vec![StepTemplate::new(2, [])]).unwrap();
    let r = classify(&spec, 2).unwrap();
    assert_eq!(r.per_step[0].phi_step.vertices(), &[(q(3, 1), q(3, 1))]);
    let s = r.in_convention(Convention::Serre).unwrap();
    assert_eq!(s.per_step[0].phi_step.vertices(), &[(q(2, 1), q(2, 1))]);
    assert_eq!(s.levels[0], q(2, 1));
    assert_eq!(s.in_convention(Convention::Lubin).unwrap(), r);
}

#[test]
fn report_json_round_trip() {
    let r = classify(&linear_term_tower(3), 5).unwrap();
    let text = serde_json::to_string_pretty(&r).unwrap();
    assert!(text.contains("\"CERTIFIED_STRICTLY_APF\""));
    let back: RamificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn validation_error_carries_step() {
    let spec = TowerSpec::finite(base2(), vec![StepTemplate::new(2, []), StepTemplate::new(6, [])]).unwrap();
    match classify(&spec, 2) {
        Err(Error::Step { step: 2, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    assert!(classify(&spec, 1).is_err());
}

#[test]
fn phi_iterate_reproduces_linear_term_tower() {
    let phi = crate::newton::ValuationProfile::monic(2, [(1, ValBound::exact(q(1, 1)))]).unwrap();
    let spec = build_phi_iterate(&[phi], &base2(), 8).unwrap();
    assert_eq!(classify(&spec, 8).unwrap(), classify(&linear_term_tower(2), 8).unwrap());
}

prop_compose! {
    fn template(p: u64, equal_char: bool)(r in 1u32..=2, picks in prop::collection::vec((0u8..3, 0i64..4, 1i64..4), 8))
        -> StepTemplate
    {
        let qn = p.pow(r);
        let mut coeffs = Vec::new();
        for i in 1..qn as usize {
            let (keep, k, m) = picks[(i - 1) % picks.len()];
            // (q - i)/q clears purity at every depth
            let v = Rational::new((qn as usize - i) as u64, qn) + q(k, m);
            if keep == 0 || (equal_char && i == 1) {
                coeffs.push((i, ValBound::exact(v)));
            }
        }
        StepTemplate::new(qn, coeffs)
    }
}

fn periodic_spec() -> impl Strategy<Value = TowerSpec> {
    (prop_oneof![Just(2u64), Just(3u64)], 1u64..=2, any::<bool>()).prop_flat_map(|(p, e, equal_char)| {
        (
            prop::collection::vec(template(p, equal_char), 0..2),
            prop::collection::vec(template(p, equal_char), 1..3),
        )
            .prop_map(move |(prefix, cycle)| {
                let base = if equal_char {
                    BaseField::equal_char(p).unwrap()
                } else {
                    BaseField::mixed(p, e).unwrap()
                };
                TowerSpec::periodic(base, prefix, cycle).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn certified_bounds_hold(spec in periodic_spec()) {
        let depth = 6;
        let r = classify(&spec, depth).unwrap();
        for s in &r.per_step {
            prop_assert!(s.phi_step.initial_value().is_zero());
            prop_assert_eq!(s.phi_step.initial_slope(), &q(1, 1));
            prop_assert_eq!(s.phi_step.final_slope(), &Rational::new(1, s.q));
        }
        if let Some(cert) = theorem1_certify(&spec).unwrap() {
            let mut e = BigInt::from(1);
            for (k, s) in r.per_step.iter().enumerate() {
                e *= s.q;
                prop_assert!(r.strictness_minima[k] >= ExtRational::Finite(cert.c_lower.clone()));
                let floor = Rational::from(e.clone()) * &cert.c_lower;
                prop_assert!(r.alphas[k] >= ExtRational::Finite(floor));
                for (i, v) in s.g_profile.finite_entries() {
                    if i < s.q as usize {
                        prop_assert!(v.lower >= ExtRational::Finite(cert.epsilon_star.clone()));
                    }
                }
            }
        }
        if !r.levels.is_empty() && r.levels.windows(2).all(|w| w[0] < w[1]) {
            let expected: Vec<_> = r.levels.iter().cloned().zip(r.breaks.iter().cloned()).collect();
            prop_assert_eq!(r.phi.vertices(), expected.as_slice());
        }
    }
}
