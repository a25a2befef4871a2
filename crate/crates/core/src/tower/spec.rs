//! Tower descriptions: per-step valuation profiles of the minimal polynomials
//! `f_n` of `pi_(n+1)` over `E_n`, either as a finite list or as an
//! eventually periodic sequence of templates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::newton::ValuationProfile;
use crate::numeric::{BaseField, Rational, ValBound};

/// One step as written in a spec: the degree and the known coefficient
/// valuations in `v_K` units. The constant term is implied by norm
/// compatibility (`±pi_n`) and the leading coefficient by monicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTemplate {
    pub q: u64,
    #[serde(default)]
    pub coeffs: BTreeMap<usize, ValBound>,
}

impl StepTemplate {
    pub fn new(q: u64, interior: impl IntoIterator<Item = (usize, ValBound)>) -> Self {
        StepTemplate {
            q,
            coeffs: interior.into_iter().collect(),
        }
    }

    /// Entries strictly between the constant and leading terms.
    pub fn interior(&self) -> impl Iterator<Item = (usize, &ValBound)> {
        let q = self.q as usize;
        self.coeffs
            .iter()
            .filter(move |(&i, v)| i > 0 && i < q && !v.is_zero_element())
            .map(|(&i, v)| (i, v))
    }

    /// Instantiates the template over `E_n`, where `e_below = e(E_n/K)`.
    pub fn resolve(&self, e_below: &BigInt) -> Result<TowerStep> {
        let expected = Rational::new(1, e_below.clone());
        let mut entries = self.coeffs.clone();
        match entries.get(&0) {
            None => {
                entries.insert(0, ValBound::exact(expected));
            }
            Some(v) if *v == ValBound::exact(expected.clone()) => {}
            Some(v) => {
                return Err(Error::ConstantTerm {
                    expected,
                    found: v.to_string(),
                })
            }
        }
        let q = usize::try_from(self.q).map_err(|_| Error::InvalidProfile("degree too large".into()))?;
        let coeffs = ValuationProfile::new(q, entries, true)?;
        Ok(TowerStep { q: self.q, coeffs })
    }
}

/// A resolved step: `f_n` over `E_n` with its constant term in place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStep {
    pub q: u64,
    pub coeffs: ValuationProfile,
}

pub fn is_power_of(q: u64, p: u64) -> bool {
    if q < p {
        return false;
    }
    let mut q = q;
    while q.is_multiple_of(p) {
        q /= p;
    }
    q == 1
}

/// Checks the invariants of a step over `E_n` with `e_below = e(E_n/K)`:
/// wild degree, constant term a uniformizer of `E_n`, and the purity bound
/// `v(a_i) >= (q - i)/(q e_below)` on exactly known interior coefficients.
pub fn validate_step(step: &TowerStep, e_below: &BigInt, base: &BaseField) -> Result<()> {
    if !is_power_of(step.q, base.p) {
        return Err(Error::DegreeNotPPower { q: step.q, p: base.p });
    }
    let expected = Rational::new(1, e_below.clone());
    let constant = step.coeffs.get(0);
    if constant != ValBound::exact(expected.clone()) {
        return Err(Error::ConstantTerm {
            expected,
            found: constant.to_string(),
        });
    }
    let q = step.q as usize;
    for (i, v) in step.coeffs.finite_entries() {
        if i == 0 || i >= q || !v.exact {
            continue;
        }
        let bound = Rational::new((q - i) as u64, BigInt::from(step.q) * e_below);
        let found = v.finite_lower().expect("finite entry");
        if *found < bound {
            return Err(Error::Purity {
                index: i,
                bound,
                found: found.to_string(),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepSource {
    Finite(Vec<StepTemplate>),
    Periodic {
        prefix: Vec<StepTemplate>,
        cycle: Vec<StepTemplate>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTowerSpec", into = "RawTowerSpec")]
pub struct TowerSpec {
    pub base: BaseField,
    pub steps: StepSource,
}

impl TowerSpec {
    pub fn finite(base: BaseField, steps: Vec<StepTemplate>) -> Result<Self> {
        TowerSpec::checked(base, StepSource::Finite(steps))
    }

    pub fn periodic(base: BaseField, prefix: Vec<StepTemplate>, cycle: Vec<StepTemplate>) -> Result<Self> {
        TowerSpec::checked(base, StepSource::Periodic { prefix, cycle })
    }

    fn checked(base: BaseField, steps: StepSource) -> Result<Self> {
        base.validate()?;
        match &steps {
            StepSource::Finite(list) if list.len() < 2 => {
                return Err(Error::Precondition("a finite tower needs at least 2 steps".into()))
            }
            StepSource::Periodic { cycle, .. } if cycle.is_empty() => {
                return Err(Error::Precondition("periodic tower needs a nonempty cycle".into()))
            }
            _ => {}
        }
        Ok(TowerSpec { base, steps })
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.steps, StepSource::Periodic { .. })
    }

    /// Number of steps described, `None` when unbounded.
    pub fn step_count(&self) -> Option<usize> {
        match &self.steps {
            StepSource::Finite(list) => Some(list.len()),
            StepSource::Periodic { .. } => None,
        }
    }

    /// Template of step `n`, 1-based (the extension `E_(n+1)/E_n`).
    pub fn template(&self, n: usize) -> Option<&StepTemplate> {
        let k = n.checked_sub(1)?;
        match &self.steps {
            StepSource::Finite(list) => list.get(k),
            StepSource::Periodic { prefix, cycle } => prefix
                .get(k)
                .or_else(|| Some(&cycle[(k - prefix.len()) % cycle.len()])),
        }
    }

    /// Every distinct template, each exactly once.
    pub fn templates(&self) -> Vec<&StepTemplate> {
        match &self.steps {
            StepSource::Finite(list) => list.iter().collect(),
            StepSource::Periodic { prefix, cycle } => prefix.iter().chain(cycle).collect(),
        }
    }

    /// Resolves and validates steps `1..=depth`, returning each step with
    /// `e(E_n/K)`.
    pub fn resolve(&self, depth: usize) -> Result<Vec<(TowerStep, BigInt)>> {
        let mut e_below = BigInt::from(1);
        let mut out = Vec::with_capacity(depth);
        for n in 1..=depth {
            let template = self.template(n).ok_or_else(|| {
                Error::Precondition(format!("tower describes only {} steps, {depth} requested", n - 1))
            })?;
            let step = template.resolve(&e_below).map_err(|e| e.at_step(n))?;
            validate_step(&step, &e_below, &self.base).map_err(|e| e.at_step(n))?;
            let next = &e_below * step.q;
            out.push((step, std::mem::replace(&mut e_below, next)));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct RawTowerSpec {
    base: BaseField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    steps: Option<Vec<StepTemplate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prefix: Option<Vec<StepTemplate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle: Option<Vec<StepTemplate>>,
}

impl TryFrom<RawTowerSpec> for TowerSpec {
    type Error = Error;

    fn try_from(raw: RawTowerSpec) -> Result<Self> {
        match (raw.steps, raw.prefix, raw.cycle) {
            (Some(steps), None, None) => TowerSpec::finite(raw.base, steps),
            (None, prefix, Some(cycle)) => TowerSpec::periodic(raw.base, prefix.unwrap_or_default(), cycle),
            _ => Err(Error::Parse("tower spec needs either `steps` or `cycle` (with optional `prefix`)".into())),
        }
    }
}

impl From<TowerSpec> for RawTowerSpec {
    fn from(spec: TowerSpec) -> Self {
        match spec.steps {
            StepSource::Finite(steps) => RawTowerSpec {
                base: spec.base,
                steps: Some(steps),
                prefix: None,
                cycle: None,
            },
            StepSource::Periodic { prefix, cycle } => RawTowerSpec {
                base: spec.base,
                steps: None,
                prefix: Some(prefix),
                cycle: Some(cycle),
            },
        }
    }
}

/// Tower of a `phi`-iterate: step `n` solves `phi_n(x) = pi_n` with
/// `phi_n(0) = 0` and `phi_n ≡ x^q mod pi_n`. Templates repeat cyclically;
/// the congruence is checked over the first `depth` steps.
pub fn build_phi_iterate(templates: &[ValuationProfile], base: &BaseField, depth: usize) -> Result<TowerSpec> {
    if templates.is_empty() {
        return Err(Error::Precondition("no iterate polynomials given".into()));
    }
    for t in templates {
        if !t.is_monic() {
            return Err(Error::InvalidProfile("iterate polynomial must be monic".into()));
        }
        if t.get(0).finite_lower().is_some() {
            return Err(Error::IterateNonzeroAtZero);
        }
    }
    let mut e_below = BigInt::from(1);
    for n in 1..=depth.max(templates.len()) {
        let t = &templates[(n - 1) % templates.len()];
        let bound = Rational::new(1, e_below.clone());
        for (i, v) in t.finite_entries() {
            if i < t.degree() && v.finite_lower().expect("finite") < &bound {
                return Err(Error::NotFrobeniusLike { index: i, bound }.at_step(n));
            }
        }
        e_below *= t.degree();
    }
    let cycle = templates
        .iter()
        .map(|t| StepTemplate::new(t.degree() as u64, t.finite_entries().filter(|(i, _)| *i < t.degree()).map(|(i, v)| (i, v.clone()))))
        .collect();
    TowerSpec::periodic(base.clone(), Vec::new(), cycle)
}
