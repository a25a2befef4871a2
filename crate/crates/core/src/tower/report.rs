use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_upper, ExtRational, Rational};
use crate::pwl::PLFunction;

use super::spec::{StepSource, TowerSpec};
use super::step::{accumulate, breaks_from_levels, shifted_profile, step_transition, strictness_minimum, StepResult};

/// Consecutive shrinking ratios needed for the non-APF-like label.
const SHRINK_RUN: usize = 5;
/// Window for the growth diagnostics on degrees and coefficient valuations.
const TREND_WINDOW: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub epsilon_star: Rational,
    pub q_max: u64,
    pub c_lower: Rational,
}

/// Lower bound `epsilon_star / q_max` on `c(L/K)` from the uniform degree
/// bound and the uniform lower bound on interior coefficient valuations.
pub fn theorem1_certify(spec: &TowerSpec) -> Result<Option<Certificate>> {
    let templates = match &spec.steps {
        StepSource::Finite(_) => return Err(Error::CannotCertify("tail of tower unspecified".into())),
        StepSource::Periodic { .. } => spec.templates(),
    };
    // Later occurrences of a template only see weaker purity bounds.
    spec.resolve(templates.len())?;

    let epsilon = templates
        .iter()
        .flat_map(|t| t.interior().map(|(_, v)| v.lower.clone()))
        .chain([spec.base.v_of_p()])
        .min()
        .expect("nonempty");
    let Some(epsilon_star) = epsilon.into_finite() else {
        return Ok(None);
    };
    if !epsilon_star.is_positive() {
        return Ok(None);
    }
    let q_max = templates.iter().map(|t| t.q).max().expect("nonempty cycle");
    let c_lower = &epsilon_star / Rational::from(q_max);
    Ok(Some(Certificate {
        epsilon_star,
        q_max,
        c_lower,
    }))
}

/// Checks `Phi(x) >= c ln(x) + d` with `d = i_first - c ln(i_first)` at every
/// vertex `x >= i_first`, using upper bounds for the logarithm.
pub fn log_bound_check(phi: &PLFunction, c: &Rational, i_first: &Rational) -> Result<bool> {
    if !c.is_positive() || !i_first.is_positive() {
        return Err(Error::Precondition("c and i_first must be positive".into()));
    }
    Ok(phi
        .vertices()
        .iter()
        .filter(|(x, _)| x >= i_first)
        .all(|(x, y)| *y >= i_first + &(c * &ln_upper(&(x / i_first)))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedStrictlyApf,
    EmpiricalApfLike,
    EmpiricalNonApfLike,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::CertifiedStrictlyApf => "CERTIFIED_STRICTLY_APF",
            Verdict::EmpiricalApfLike => "EMPIRICAL_APF_LIKE",
            Verdict::EmpiricalNonApfLike => "EMPIRICAL_NON_APF_LIKE",
            Verdict::Indeterminate => "INDETERMINATE",
        };
        f.write_str(s)
    }
}

/// Lubin's convention has `phi = id` on `[0, i]`; Serre's is shifted by one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Lubin,
    Serre,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationReport {
    /// Number of resolved steps; `phi` is the transition function of `E_(depth+1)/K`.
    pub depth: usize,
    pub convention: Convention,
    pub per_step: Vec<StepResult>,
    pub phi: PLFunction,
    pub levels: Vec<Rational>,
    pub breaks: Vec<Rational>,
    pub alphas: Vec<ExtRational>,
    /// Entry `k` belongs to the transition function after `k + 1` steps.
    pub strictness_minima: Vec<ExtRational>,
    pub certificate: Option<Certificate>,
    pub certified_c_lower: Option<Rational>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl RamificationReport {
    /// Re-expresses transition functions, levels and breaks in `convention`.
    pub fn in_convention(&self, convention: Convention) -> Result<RamificationReport> {
        if convention == self.convention {
            return Ok(self.clone());
        }
        let one = Rational::one();
        let shift = |f: &PLFunction| match convention {
            Convention::Serre => f.serre_shift(),
            Convention::Lubin => f.serre_unshift(),
        };
        let delta = |r: &Rational| match convention {
            Convention::Serre => r - &one,
            Convention::Lubin => r + &one,
        };
        let mut out = self.clone();
        out.convention = convention;
        out.phi = shift(&self.phi)?;
        for step in &mut out.per_step {
            step.phi_step = shift(&step.phi_step)?;
            step.level = step.level.as_ref().map(delta);
        }
        out.levels = self.levels.iter().map(delta).collect();
        out.breaks = self.breaks.iter().map(delta).collect();
        Ok(out)
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.per_step.iter().map(|s| s.q).collect()
    }
}

fn strictly_increasing<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

/// `b_n - b_(n-1)` shrinking by a factor of at most `1/p` over the last
/// `SHRINK_RUN` ratios.
fn increments_shrink(breaks: &[Rational], p: u64) -> bool {
    let increments: Vec<Rational> = breaks.windows(2).map(|w| &w[1] - &w[0]).collect();
    if increments.len() < SHRINK_RUN + 1 {
        return false;
    }
    let bound = Rational::new(1, p);
    increments[increments.len() - SHRINK_RUN - 1..]
        .windows(2)
        .all(|w| w[0].is_positive() && w[1].is_positive() && &w[1] / &w[0] <= bound)
}

/// Runs steps `1..=depth` of the tower and classifies it.
pub fn classify(spec: &TowerSpec, depth: usize) -> Result<RamificationReport> {
    if depth < 2 {
        return Err(Error::Precondition("depth must be at least 2".into()));
    }
    let resolved = spec.resolve(depth)?;
    let base = &spec.base;

    let mut phi = PLFunction::identity();
    let mut per_step = Vec::with_capacity(depth);
    let mut alphas = Vec::with_capacity(depth);
    let mut strictness_minima = Vec::with_capacity(depth);
    let mut min_interior = Vec::with_capacity(depth);
    for (n, (step, e_below)) in resolved.iter().enumerate() {
        let e_above: BigInt = e_below * step.q;
        let v_pi_above = Rational::new(1, e_above.clone());
        let result = shifted_profile(step, &v_pi_above, base)
            .and_then(|g| step_transition(&g, &Rational::from(e_below.clone()), &Rational::from(e_above)))
            .map_err(|e| e.at_step(n + 1))?;
        let (next, alpha) = accumulate(&phi, &result)?;
        strictness_minima.push(strictness_minimum(&next));
        alphas.push(alpha);
        min_interior.push(
            step.coeffs
                .finite_entries()
                .filter(|(i, _)| *i > 0 && *i < step.coeffs.degree())
                .map(|(_, v)| v.lower.clone())
                .min()
                .unwrap_or(ExtRational::Infinity),
        );
        per_step.push(result);
        phi = next;
    }

    let mut notes = Vec::new();
    let degrees: Vec<u64> = per_step.iter().map(|s| s.q).collect();
    let uncertain: Vec<usize> = per_step
        .iter()
        .enumerate()
        .filter(|(_, s)| s.uncertainty)
        .map(|(k, _)| k + 1)
        .collect();
    if !uncertain.is_empty() {
        notes.push(format!(
            "valuation ties leave the transition function of steps {uncertain:?} undetermined"
        ));
    }

    let elementary: Option<Vec<Rational>> = per_step.iter().map(|s| s.level.clone()).collect();
    let (levels, breaks) = match elementary {
        Some(levels) => {
            let breaks = breaks_from_levels(&levels, &degrees);
            if !strictly_increasing(&levels) {
                notes.push("levels are not strictly increasing; breaks listed for reference only".into());
            } else {
                let expected: Vec<(Rational, Rational)> =
                    levels.iter().cloned().zip(breaks.iter().cloned()).collect();
                if phi.vertices() != expected.as_slice() {
                    notes.push("vertices of Phi disagree with the levels and breaks".into());
                }
            }
            (levels, breaks)
        }
        None => {
            notes.push("some steps are not elementary; levels and breaks suppressed".into());
            (Vec::new(), Vec::new())
        }
    };

    let window = TREND_WINDOW.min(depth - 1);
    let tail = &degrees[degrees.len() - window - 1..];
    if strictly_increasing(tail) {
        let n = depth;
        let q_n = degrees[n - 1];
        if base.residue_char_only {
            notes.push(format!(
                "degrees grow (q_{n} = {q_n}); in equal characteristic bounded degrees are not necessary, no conclusion drawn"
            ));
        } else {
            let r = q_n.ilog(base.p);
            let e_above: BigInt = resolved[n - 1].1.clone() * q_n;
            let bound = (Rational::from(base.e_abs * u64::from(r)) + Rational::new(q_n - 1, e_above))
                / Rational::from(q_n - 1);
            notes.push(format!(
                "unbounded degrees: q_{n} = {q_n}; the first-coefficient bound gives c <= {bound} at step {n}, and a strictly APF tower over a p-adic base needs bounded degrees"
            ));
        }
    }
    let interior_tail = &min_interior[min_interior.len() - window - 1..];
    if interior_tail.iter().all(ExtRational::is_finite) && interior_tail.windows(2).all(|w| w[1] < w[0]) {
        notes.push(format!(
            "minimal interior coefficient valuation decreasing (last {}); this presentation may fail the uniform coefficient bound, which alone does not rule out strict APF",
            interior_tail.last().expect("nonempty")
        ));
    }

    let certificate = match theorem1_certify(spec) {
        Ok(c) => c,
        Err(Error::CannotCertify(msg)) => {
            notes.push(format!("certification refused: {msg}"));
            None
        }
        Err(e) => return Err(e),
    };
    match &certificate {
        Some(c) => notes.push(format!(
            "epsilon_star = {} is a limit of admissible ε; c_lower = {} follows by passing to the limit",
            c.epsilon_star, c.c_lower
        )),
        None if spec.is_periodic() => notes.push("certification refused: no positive uniform coefficient bound".into()),
        None => {}
    }

    let finite_alphas: Option<Vec<&Rational>> = alphas.iter().map(ExtRational::finite).collect();
    let verdict = if !uncertain.is_empty() {
        Verdict::Indeterminate
    } else if certificate.is_some() {
        Verdict::CertifiedStrictlyApf
    } else if levels.is_empty() || !strictly_increasing(&levels) {
        Verdict::Indeterminate
    } else if increments_shrink(&breaks, base.p) {
        notes.push("break increments shrink geometrically; breaks look bounded (heuristic)".into());
        Verdict::EmpiricalNonApfLike
    } else if breaks[breaks.len() - 1] > breaks[breaks.len() - 2]
        && finite_alphas.is_some_and(|a| strictly_increasing(&a))
    {
        Verdict::EmpiricalApfLike
    } else {
        Verdict::Indeterminate
    };
    let certified_c_lower = match verdict {
        Verdict::CertifiedStrictlyApf => certificate.as_ref().map(|c| c.c_lower.clone()),
        _ => None,
    };

    Ok(RamificationReport {
        depth,
        convention: Convention::Lubin,
        per_step,
        phi,
        levels,
        breaks,
        alphas,
        strictness_minima,
        certificate,
        certified_c_lower,
        verdict,
        notes,
    })
}
