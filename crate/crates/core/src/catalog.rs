//! The worked example towers, each with closed forms for its levels and
//! breaks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::numeric::{is_prime, BaseField, Rational, ValBound};
use crate::tower::{StepTemplate, TowerSpec, Verdict};

pub const NAMES: [&str; 4] = ["increasing-degree", "s-sequence", "char-p", "power-compatible"];

/// Largest step degree a catalog builder will emit.
const MAX_DEGREE_BITS: u64 = 20;

/// Integer sequences indexed from `n = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sequence {
    Const(u64),
    Linear,
    /// `b^(n-1)`
    Geom(u64),
    /// `floor(p^(n-1) / n)`
    FloorGeomOverN,
}

impl Sequence {
    pub fn eval(&self, n: usize, p: u64) -> BigInt {
        match self {
            Sequence::Const(k) => BigInt::from(*k),
            Sequence::Linear => BigInt::from(n),
            Sequence::Geom(b) => Pow::pow(BigInt::from(*b), n - 1),
            Sequence::FloorGeomOverN => Pow::pow(BigInt::from(p), n - 1) / BigInt::from(n),
        }
    }
}

impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Catalog(format!("unknown sequence `{s}` (const:k, linear, geom:b, floor-geom-over-n)"));
        match s.split_once(':') {
            Some(("const", k)) => k.parse().map(Sequence::Const).map_err(|_| bad()),
            Some(("geom", b)) => b.parse().map(Sequence::Geom).map_err(|_| bad()),
            None if s == "linear" => Ok(Sequence::Linear),
            None if s == "floor-geom-over-n" => Ok(Sequence::FloorGeomOverN),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Const(k) => write!(f, "const:{k}"),
            Sequence::Linear => f.write_str("linear"),
            Sequence::Geom(b) => write!(f, "geom:{b}"),
            Sequence::FloorGeomOverN => f.write_str("floor-geom-over-n"),
        }
    }
}

/// `KEY=VALUE` parameters of a catalog entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn parse<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Catalog(format!("parameter `{pair}` is not KEY=VALUE")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Params(map))
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Catalog(format!("parameter {key}: `{v}` is not a nonnegative integer"))),
        }
    }

    fn seq_or(&self, key: &str, default: Sequence) -> Result<Sequence> {
        self.0.get(key).map_or(Ok(default), |v| v.parse())
    }

    fn check_known(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Catalog(format!("unknown parameter `{k}` (expected one of {allowed:?})"))),
            None => Ok(()),
        }
    }
}

/// What is known about the infinite extension itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroundTruth {
    StrictlyApf,
    ApfNotStrict,
    NotApf,
}

type ClosedForm = Box<dyn Fn(usize) -> Rational + Send + Sync>;

pub struct CatalogEntry {
    pub name: &'static str,
    pub description: String,
    pub spec: TowerSpec,
    /// A second presentation of the same extension, where one exists.
    pub companion: Option<TowerSpec>,
    pub level: ClosedForm,
    pub brk: ClosedForm,
    /// `i_n / [E_(n+1):K]`
    pub ratio: ClosedForm,
    /// Label `classify` should produce at moderate depth.
    pub expected_verdict: Option<Verdict>,
    pub ground_truth: Option<GroundTruth>,
    /// The strictness constant `c(L/K)`, when stated.
    pub c: Option<Rational>,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("description", &self.description)
            .field("spec", &self.spec)
            .field("expected_verdict", &self.expected_verdict)
            .field("ground_truth", &self.ground_truth)
            .finish_non_exhaustive()
    }
}

impl CatalogEntry {
    pub fn levels(&self, depth: usize) -> Vec<Rational> {
        (1..=depth).map(&self.level).collect()
    }

    pub fn breaks(&self, depth: usize) -> Vec<Rational> {
        (1..=depth).map(&self.brk).collect()
    }
}

pub fn build(name: &str, params: &Params, depth: usize) -> Result<CatalogEntry> {
    if depth == 0 {
        return Err(Error::Catalog("depth must be positive".into()));
    }
    match name {
        "increasing-degree" => {
            params.check_known(&["p", "r"])?;
            example_increasing_degree(params.u64_or("p", 2)?, params.seq_or("r", Sequence::Const(1))?, depth)
        }
        "s-sequence" => {
            params.check_known(&["p", "e", "s"])?;
            example_s_sequence(
                params.u64_or("p", 5)?,
                params.u64_or("e", 1)?,
                params.seq_or("s", Sequence::Linear)?,
                depth,
            )
        }
        "char-p" => {
            params.check_known(&["p"])?;
            example_char_p(params.u64_or("p", 2)?, depth)
        }
        "power-compatible" => {
            params.check_known(&["p", "e"])?;
            example_power_compatible(params.u64_or("p", 2)?, params.u64_or("e", 1)?, depth)
        }
        _ => Err(Error::Catalog(format!("unknown entry `{name}`; available: {}", NAMES.join(", ")))),
    }
}

fn prime(p: u64) -> Result<u64> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::Catalog(format!("p = {p} is not prime")))
    }
}

fn small_exponent(r: &BigInt, p: u64) -> Result<u32> {
    u32::try_from(r)
        .ok()
        .filter(|&r| r >= 1 && u64::from(r) * u64::from(p.ilog2() + 1) <= MAX_DEGREE_BITS)
        .ok_or_else(|| Error::Catalog(format!("degree exponent {r} out of range")))
}

fn product(terms: impl Iterator<Item = BigInt>) -> BigInt {
    terms.fold(BigInt::one(), |acc, t| acc * t)
}

fn int(n: BigInt) -> Rational {
    Rational::from(n)
}

/// `f_n = x^(q_n) + pi_1 x ± pi_n` with `q_n = p^(r_n)`.
pub fn example_increasing_degree(p: u64, r: Sequence, depth: usize) -> Result<CatalogEntry> {
    let p = prime(p)?;
    let base = BaseField::mixed(p, 1)?;
    let template = |n: usize| -> Result<StepTemplate> {
        let q = p.pow(small_exponent(&r.eval(n, p), p)?);
        Ok(StepTemplate::new(q, [(1, ValBound::exact(Rational::one()))]))
    };
    let bounded = matches!(r, Sequence::Const(_));
    let spec = if bounded {
        TowerSpec::periodic(base, vec![], vec![template(1)?])?
    } else {
        TowerSpec::finite(base, (1..=depth.max(2)).map(template).collect::<Result<_>>()?)?
    };

    let qs = move |n: usize| Pow::pow(BigInt::from(p), r.eval(n, p).try_into().unwrap_or(0u32));
    let q1 = qs.clone();
    let level = move |n: usize| int(product((1..=n).map(&q1))) / int(q1(n) - 1);
    let q2 = qs.clone();
    let brk = move |n: usize| {
        let mut b = int(q2(1)) / int(q2(1) - 1);
        for k in 2..=n {
            b = b + int(q2(k)) / int(q2(k) - 1) - Rational::one() / int(q2(k - 1) - 1);
        }
        b
    };
    let ratio = move |n: usize| Rational::one() / int(qs(n) - 1);
    let c = bounded.then(|| ratio_const(&spec));
    Ok(CatalogEntry {
        name: "increasing-degree",
        description: "x^(q_n) + pi_1 x ± pi_n with q_n = p^(r_n)".into(),
        spec,
        companion: None,
        level: Box::new(level),
        brk: Box::new(brk),
        ratio: Box::new(ratio),
        expected_verdict: Some(if bounded {
            Verdict::CertifiedStrictlyApf
        } else {
            Verdict::EmpiricalApfLike
        }),
        ground_truth: Some(if bounded {
            GroundTruth::StrictlyApf
        } else {
            GroundTruth::ApfNotStrict
        }),
        c,
    })
}

/// `1/(q - 1)` for the stationary degree `q` of a periodic spec.
fn ratio_const(spec: &TowerSpec) -> Rational {
    let q = spec.template(1).expect("nonempty").q;
    Rational::new(1, q - 1)
}

/// `f_n = x^p + pi_n^(s_n) x - pi_n` over a base with `v_K(p) = e`.
pub fn example_s_sequence(p: u64, e: u64, s: Sequence, depth: usize) -> Result<CatalogEntry> {
    let p = prime(p)?;
    let base = BaseField::mixed(p, e)?;
    if s == Sequence::FloorGeomOverN && p < 5 {
        return Err(Error::Catalog("s_n = floor(p^(n-1)/n) needs p >= 5".into()));
    }
    let depth = depth.max(2);
    let values: Vec<BigInt> = (1..=depth).map(|n| s.eval(n, p)).collect();
    for (k, w) in values.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::Catalog(format!("s_n must increase: s_{} = {}, s_{} = {}", k + 1, w[0], k + 2, w[1])));
        }
    }
    for (k, v) in values.iter().enumerate() {
        let cap = Pow::pow(BigInt::from(p), k) * e;
        if *v < BigInt::one() || *v > cap {
            return Err(Error::Catalog(format!("need 1 <= s_{} <= p^{} e = {cap}, found {v}", k + 1, k)));
        }
    }
    let template = |n: usize| {
        let v = Rational::new(s.eval(n, p), Pow::pow(BigInt::from(p), n - 1));
        StepTemplate::new(p, [(1, ValBound::exact(v))])
    };
    let stationary = s == Sequence::Geom(p);
    let spec = if stationary {
        TowerSpec::periodic(base, vec![], vec![template(1)])?
    } else {
        TowerSpec::finite(base, (1..=depth).map(template).collect())?
    };

    let pr = Rational::from(p);
    let factor = &pr / Rational::from(p - 1);
    let (s1, s2, s3, f1) = (s.clone(), s.clone(), s.clone(), factor.clone());
    let level = move |n: usize| &f1 * int(s1.eval(n, p));
    let brk = move |n: usize| {
        let mut sum = int(s2.eval(1, p));
        for k in 2..=n {
            sum = sum + int(s2.eval(k, p) - s2.eval(k - 1, p)) / int(Pow::pow(BigInt::from(p), k - 1));
        }
        &factor * sum
    };
    let ratio = move |n: usize| int(s3.eval(n, p)) / (int(Pow::pow(BigInt::from(p), n - 1)) * Rational::from(p - 1));
    let (expected_verdict, ground_truth, c) = match s {
        Sequence::Linear => (Some(Verdict::EmpiricalNonApfLike), Some(GroundTruth::NotApf), None),
        Sequence::FloorGeomOverN => (Some(Verdict::EmpiricalApfLike), Some(GroundTruth::ApfNotStrict), None),
        _ if stationary => (
            Some(Verdict::CertifiedStrictlyApf),
            Some(GroundTruth::StrictlyApf),
            Some(Rational::new(1, p - 1)),
        ),
        _ => (None, None, None),
    };
    Ok(CatalogEntry {
        name: "s-sequence",
        description: format!("x^p + pi_n^(s_n) x - pi_n with s_n = {s}"),
        spec,
        companion: None,
        level: Box::new(level),
        brk: Box::new(brk),
        ratio: Box::new(ratio),
        expected_verdict,
        ground_truth,
        c,
    })
}

/// `f_n = x^(p^n) + pi_1^(p^n) x - pi_n` over a field of characteristic `p`.
pub fn example_char_p(p: u64, depth: usize) -> Result<CatalogEntry> {
    let p = prime(p)?;
    let base = BaseField::equal_char(p)?;
    let depth = depth.max(2);
    let steps = (1..=depth)
        .map(|n| {
            let q = p.pow(small_exponent(&BigInt::from(n), p)?);
            Ok(StepTemplate::new(q, [(1, ValBound::exact(Rational::from(q)))]))
        })
        .collect::<Result<_>>()?;
    let spec = TowerSpec::finite(base, steps)?;
    let pn = move |n: usize| int(Pow::pow(BigInt::from(p), n));
    // p · p^2 ⋯ p^n = p^(n(n+1)/2)
    let level = move |n: usize| pn(n * (n + 1) / 2) * pn(n) / (pn(n) - Rational::one());
    let brk = move |n: usize| {
        let mut b = level(1);
        for k in 2..=n {
            b = b + (level(k) - level(k - 1)) / pn(k * (k - 1) / 2);
        }
        b
    };
    let ratio = move |n: usize| pn(n) / (pn(n) - Rational::one());
    Ok(CatalogEntry {
        name: "char-p",
        description: "x^(p^n) + pi_1^(p^n) x - pi_n in characteristic p".into(),
        spec,
        companion: None,
        level: Box::new(level),
        brk: Box::new(brk),
        ratio: Box::new(ratio),
        expected_verdict: Some(Verdict::EmpiricalApfLike),
        ground_truth: Some(GroundTruth::StrictlyApf),
        c: Some(Rational::one()),
    })
}

/// `x^p - pi_n`, together with `x^(p^n) - pi_n` generating the same field.
pub fn example_power_compatible(p: u64, e: u64, depth: usize) -> Result<CatalogEntry> {
    let p = prime(p)?;
    let base = BaseField::mixed(p, e)?;
    let spec = TowerSpec::periodic(base.clone(), vec![], vec![StepTemplate::new(p, [])])?;
    let companion_steps = (1..=depth.max(2))
        .map(|n| Ok(StepTemplate::new(p.pow(small_exponent(&BigInt::from(n), p)?), [])))
        .collect::<Result<_>>()?;
    let companion = TowerSpec::finite(base, companion_steps)?;

    let pm1 = Rational::from(p - 1);
    let er = Rational::from(e);
    let (pm, erl) = (pm1.clone(), er.clone());
    let level = move |n: usize| &erl * int(Pow::pow(BigInt::from(p), n)) / &pm + Rational::one();
    let (pm, erb) = (pm1.clone(), er.clone());
    let brk = move |n: usize| &erb * Rational::from(p) / &pm + Rational::one() + &erb * Rational::from(n as u64 - 1);
    let (pm, err) = (pm1.clone(), er.clone());
    let ratio = move |n: usize| &err / &pm + Rational::new(1, Pow::pow(BigInt::from(p), n));
    Ok(CatalogEntry {
        name: "power-compatible",
        description: "x^p - pi_n, and companion x^(p^n) - pi_n for the same extension".into(),
        spec,
        companion: Some(companion),
        level: Box::new(level),
        brk: Box::new(brk),
        ratio: Box::new(ratio),
        expected_verdict: Some(Verdict::CertifiedStrictlyApf),
        ground_truth: Some(GroundTruth::StrictlyApf),
        c: Some(er / pm1),
    })
}
