use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::newton::{copolygon, ValuationProfile};
use crate::numeric::{v_of_binomial_in_k, val_sum, BaseField, ExtRational, Rational, ValBound};
use crate::pwl::{agreement_prefix, PLFunction};

use super::spec::TowerStep;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResult {
    pub q: u64,
    pub g_profile: ValuationProfile,
    pub phi_step: PLFunction,
    pub level: Option<Rational>,
    pub uncertainty: bool,
}

/// Profile of `g(x) = f(x + pi_(n+1))` from the profile of `f`, where
/// `v_pi_above = v_K(pi_(n+1))`. Index 0 is absent since `g(0) = 0`.
pub fn shifted_profile(step: &TowerStep, v_pi_above: &Rational, base: &BaseField) -> Result<ValuationProfile> {
    let q = step.coeffs.degree();
    let coeffs: Vec<(usize, &ValBound)> = step.coeffs.finite_entries().collect();
    let mut entries = BTreeMap::new();
    for i in 1..=q {
        let mut terms = Vec::new();
        for &(j, a_j) in coeffs.iter().filter(|(j, _)| *j >= i) {
            let binom = v_of_binomial_in_k(j as u64, i as u64, base)?;
            let gap = Rational::from((j - i) as u64) * v_pi_above;
            terms.push(a_j.shifted(&binom.add_finite(&gap)));
        }
        let entry = val_sum(&terms)?;
        if !entry.is_zero_element() {
            entries.insert(i, entry);
        }
    }
    ValuationProfile::new(q, entries, true)
}

/// `phi_(E_(n+1)/E_n)(x) = e_below * Psi_g(x / e_above)`.
pub fn step_transition(g_profile: &ValuationProfile, e_below: &Rational, e_above: &Rational) -> Result<StepResult> {
    if g_profile.get(1).is_zero_element() {
        return Err(Error::Inseparable);
    }
    let (psi, uncertainty) = copolygon(g_profile)?;
    let phi_step = psi.conjugate_scale(e_below, e_above)?;
    let level = match phi_step.vertices() {
        [(x, y)] if x == y => Some(x.clone()),
        _ => None,
    };
    let q = g_profile.degree() as u64;
    Ok(StepResult {
        q,
        g_profile: g_profile.clone(),
        phi_step,
        level,
        uncertainty,
    })
}

/// `Phi_(n+1) = Phi_n ∘ phi_step`, with `alpha_n`, the length of the prefix
/// on which the two agree.
pub fn accumulate(phi: &PLFunction, step: &StepResult) -> Result<(PLFunction, ExtRational)> {
    let next = PLFunction::compose(phi, &step.phi_step)?;
    let alpha = agreement_prefix(&next, phi);
    Ok((next, alpha))
}

/// `b_n = i_1 + sum_(k=2..n) (i_k - i_(k-1)) / (q_1 ... q_(k-1))`.
pub fn breaks_from_levels(levels: &[Rational], degrees: &[u64]) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(levels.len());
    let mut degree_product = Rational::one();
    for (k, level) in levels.iter().enumerate() {
        let b = match out.last() {
            None => level.clone(),
            Some(prev) => {
                degree_product = degree_product * Rational::from(degrees[k - 1]);
                prev + &((level - &levels[k - 1]) / &degree_product)
            }
        };
        out.push(b);
    }
    out
}

/// `min v * m_v` over vertices `v` of `Phi`, `m_v` the slope just right of `v`.
pub fn strictness_minimum(phi: &PLFunction) -> ExtRational {
    phi.vertices()
        .iter()
        .enumerate()
        .map(|(k, (x, _))| x * phi.slope_right_of(k))
        .min()
        .map_or(ExtRational::Infinity, ExtRational::Finite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;
    use crate::pwl::{lower_envelope, Line};
    use crate::tower::StepTemplate;
    use num_bigint::BigInt;

    fn base2() -> BaseField {
        BaseField::mixed(2, 1).unwrap()
    }

    /// Expands `f(x + c)` coefficientwise over the integers with
    /// `c = 2^k` standing in for the shifted root, then reads valuations.
    fn brute_shift(coeffs: &[(usize, i64)], shift_val: u32, p: u64, q: usize) -> BTreeMap<usize, Rational> {
        let mut g = vec![BigInt::from(0); q + 1];
        let c = BigInt::from(p).pow(shift_val);
        for &(j, a) in coeffs {
            let mut binom = BigInt::from(1);
            for (i, gi) in g.iter_mut().enumerate().take(j + 1) {
                if i > 0 {
                    binom = binom * BigInt::from(j - i + 1) / BigInt::from(i);
                }
                *gi += BigInt::from(a) * &binom * c.pow((j - i) as u32);
            }
        }
        (1..=q)
            .filter(|&i| g[i] != BigInt::from(0))
            .map(|i| (i, Rational::from(crate::numeric::vp_int(&g[i], p).unwrap())))
            .collect()
    }

    #[test]
    fn quadratic_shift_and_level() {
        let step = StepTemplate::new(2, []).resolve(&BigInt::from(1)).unwrap();
        let g = shifted_profile(&step, &q(1, 2), &base2()).unwrap();
        assert_eq!(g.get(1), ValBound::exact(q(3, 2)));
        assert_eq!(g.get(2), ValBound::exact(q(0, 1)));
        assert_eq!(g.finite_entries().count(), 2);

        let r = step_transition(&g, &q(1, 1), &q(2, 1)).unwrap();
        assert_eq!(r.phi_step.vertices(), &[(q(3, 1), q(3, 1))]);
        assert_eq!(r.phi_step.slopes(), &[q(1, 1), q(1, 2)]);
        assert_eq!(r.level, Some(q(3, 1)));
        assert!(!r.uncertainty);

        // oracle: brute-force envelope of the raw lines, then rescale by hand
        let lines: Vec<Line> = g
            .finite_entries()
            .map(|(i, v)| Line::new(Rational::from(i as u64), v.clone()))
            .collect();
        let (psi, _) = lower_envelope(&lines).unwrap();
        for x in [q(0, 1), q(1, 1), q(3, 1), q(5, 2), q(7, 1)] {
            assert_eq!(r.phi_step.eval(&x).unwrap(), psi.eval(&(&x / q(2, 1))).unwrap());
        }
    }

    #[test]
    fn shift_matches_integer_expansion() {
        // x^4 + 2^3 x^2 + 2^2 x + 2^4 with shift root of valuation 1: all
        // term valuations are integers so the integer model is faithful
        // whenever no ties occur
        let base = base2();
        let template = StepTemplate::new(
            4,
            [
                (1, ValBound::exact(q(2, 1))),
                (2, ValBound::exact(q(3, 1))),
                (0, ValBound::exact(q(4, 1))),
            ],
        );
        let step = template.resolve(&BigInt::from(1)).unwrap_err();
        assert!(matches!(step, Error::ConstantTerm { .. }));

        let coeffs = ValuationProfile::new(
            4,
            [
                (0, ValBound::exact(q(4, 1))),
                (1, ValBound::exact(q(2, 1))),
                (2, ValBound::exact(q(3, 1))),
            ]
            .into_iter()
            .collect(),
            true,
        )
        .unwrap();
        let step = TowerStep { q: 4, coeffs };
        let g = shifted_profile(&step, &q(1, 1), &base).unwrap();
        let oracle = brute_shift(&[(4, 1), (2, 8), (1, 4), (0, 16)], 1, 2, 4);
        for (i, v) in g.finite_entries() {
            if v.exact {
                assert_eq!(v.finite_lower().unwrap(), &oracle[&i], "index {i}");
            } else {
                assert!(v.finite_lower().unwrap() <= &oracle[&i], "index {i}");
            }
        }
    }

    #[test]
    fn char_p_shift_kills_binomials() {
        let base = BaseField::equal_char(2).unwrap();
        let e_below = BigInt::from(8);
        let step = StepTemplate::new(8, [(1, ValBound::exact(q(8, 1)))]).resolve(&e_below).unwrap();
        let g = shifted_profile(&step, &q(1, 64), &base).unwrap();
        let entries: Vec<_> = g.finite_entries().map(|(i, v)| (i, v.clone())).collect();
        assert_eq!(entries, vec![(1, ValBound::exact(q(8, 1))), (8, ValBound::exact(q(0, 1)))]);
    }

    #[test]
    fn breaks_examples() {
        let levels: Vec<Rational> = (1..=6).map(|k| q(1 << k, 1)).collect();
        let b = breaks_from_levels(&levels, &[2; 6]);
        assert_eq!(b, (1..=6).map(|n| q(n + 1, 1)).collect::<Vec<_>>());
        assert_eq!(breaks_from_levels(&[q(7, 3)], &[5]), vec![q(7, 3)]);
        assert!(breaks_from_levels(&[], &[]).is_empty());
    }

    #[test]
    fn strictness_examples() {
        let f = PLFunction::from_breakpoints(q(0, 1), vec![q(3, 1)], vec![q(1, 1), q(1, 2)]).unwrap();
        assert_eq!(strictness_minimum(&f), ExtRational::Finite(q(3, 2)));
        assert_eq!(strictness_minimum(&PLFunction::identity()), ExtRational::Infinity);
    }

    #[test]
    fn inseparable_step_is_rejected() {
        let base = BaseField::equal_char(2).unwrap();
        let step = StepTemplate::new(2, []).resolve(&BigInt::from(1)).unwrap();
        let g = shifted_profile(&step, &q(1, 2), &base).unwrap();
        assert!(matches!(step_transition(&g, &q(1, 1), &q(2, 1)), Err(Error::Inseparable)));
    }
}
