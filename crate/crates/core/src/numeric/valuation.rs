//! p-adic valuations of integers and binomial coefficients, the base field,
//! and ultrametric sums of valuation bounds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{ExtRational, Rational};
use crate::error::{Error, Result};

/// Largest `k` with `p^k | m`.
pub fn vp_int(m: &BigInt, p: u64) -> Result<u64> {
    if m.is_zero() {
        return Err(Error::ZeroIntegerValuation);
    }
    let p = BigInt::from(p);
    let mut m = m.clone();
    let mut k = 0;
    loop {
        let (quo, rem) = m.div_rem(&p);
        if !rem.is_zero() {
            return Ok(k);
        }
        m = quo;
        k += 1;
    }
}

/// `v_p(C(j, i))`, counted as the number of carries when adding `i` and
/// `j - i` in base `p` (Kummer).
pub fn vp_binomial(j: u64, i: u64, p: u64) -> Result<u64> {
    if i > j {
        return Err(Error::Precondition(format!("binomial C({j}, {i}) needs i <= j")));
    }
    if p < 2 {
        return Err(Error::Precondition(format!("p = {p} is not prime")));
    }
    let (mut a, mut b) = (i, j - i);
    let mut carry = 0;
    let mut carries = 0;
    while a > 0 || b > 0 || carry > 0 {
        let digit_sum = a % p + b % p + carry;
        carry = u64::from(digit_sum >= p);
        carries += carry;
        a /= p;
        b /= p;
    }
    Ok(carries)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The base field K. In mixed characteristic `v_K(p) = e_abs`; in equal
/// characteristic integers reduce mod p, so `v_K(p) = +inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseField {
    pub p: u64,
    #[serde(rename = "e", default = "one")]
    pub e_abs: u64,
    #[serde(rename = "equal_char", default)]
    pub residue_char_only: bool,
}

fn one() -> u64 {
    1
}

impl BaseField {
    pub fn mixed(p: u64, e_abs: u64) -> Result<Self> {
        let base = BaseField {
            p,
            e_abs,
            residue_char_only: false,
        };
        base.validate()?;
        Ok(base)
    }

    pub fn equal_char(p: u64) -> Result<Self> {
        let base = BaseField {
            p,
            e_abs: 1,
            residue_char_only: true,
        };
        base.validate()?;
        Ok(base)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Precondition(format!("p = {} is not prime", self.p)));
        }
        if self.e_abs == 0 {
            return Err(Error::Precondition("absolute ramification index must be >= 1".into()));
        }
        Ok(())
    }

    pub fn v_of_p(&self) -> ExtRational {
        if self.residue_char_only {
            ExtRational::Infinity
        } else {
            ExtRational::Finite(Rational::from(self.e_abs))
        }
    }
}

/// `v_K` of the image of an integer in K.
pub fn v_of_integer_in_k(m: &BigInt, base: &BaseField) -> ExtRational {
    if m.is_zero() {
        return ExtRational::Infinity;
    }
    let k = vp_int(m, base.p).expect("nonzero");
    if base.residue_char_only {
        if k == 0 {
            ExtRational::Finite(Rational::zero())
        } else {
            ExtRational::Infinity
        }
    } else {
        ExtRational::Finite(Rational::from(base.e_abs * k))
    }
}

/// `v_K(C(j, i))` without materializing the binomial coefficient.
pub fn v_of_binomial_in_k(j: u64, i: u64, base: &BaseField) -> Result<ExtRational> {
    let k = vp_binomial(j, i, base.p)?;
    Ok(if base.residue_char_only {
        if k == 0 {
            ExtRational::Finite(Rational::zero())
        } else {
            ExtRational::Infinity
        }
    } else {
        ExtRational::Finite(Rational::from(base.e_abs * k))
    })
}

/// A valuation known exactly or only from below.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ValBound {
    pub lower: ExtRational,
    pub exact: bool,
}

impl ValBound {
    pub fn exact(v: Rational) -> Self {
        ValBound {
            lower: ExtRational::Finite(v),
            exact: true,
        }
    }

    pub fn at_least(v: Rational) -> Self {
        ValBound {
            lower: ExtRational::Finite(v),
            exact: false,
        }
    }

    /// The valuation of zero.
    pub fn zero_element() -> Self {
        ValBound {
            lower: ExtRational::Infinity,
            exact: true,
        }
    }

    pub fn new(lower: ExtRational, exact: bool) -> Self {
        let exact = exact || lower.is_infinite();
        ValBound { lower, exact }
    }

    pub fn is_zero_element(&self) -> bool {
        self.lower.is_infinite()
    }

    pub fn finite_lower(&self) -> Option<&Rational> {
        self.lower.finite()
    }

    /// Valuation of a product with an element of known exact valuation.
    pub fn shifted(&self, by: &ExtRational) -> ValBound {
        ValBound::new(&self.lower + by, self.exact)
    }
}

impl fmt::Debug for ValBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.lower)
        } else {
            write!(f, ">={}", self.lower)
        }
    }
}

impl fmt::Display for ValBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValBoundRepr {
    Exact(ExtRational),
    Min { min: ExtRational },
}

impl Serialize for ValBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = if self.exact {
            ValBoundRepr::Exact(self.lower.clone())
        } else {
            ValBoundRepr::Min {
                min: self.lower.clone(),
            }
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ValBound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match ValBoundRepr::deserialize(deserializer)? {
            ValBoundRepr::Exact(v) => ValBound::new(v, true),
            ValBoundRepr::Min { min } => ValBound::new(min, false),
        })
    }
}

/// Valuation of a sum from the valuations of its terms.
///
/// The minimum is exact only when a single exact term attains it; a tie may
/// cancel, so it only bounds the result from below.
pub fn val_sum(terms: &[ValBound]) -> Result<ValBound> {
    if terms.is_empty() {
        return Err(Error::Precondition("val_sum of an empty list".into()));
    }
    let min = terms.iter().map(|t| &t.lower).min().expect("nonempty").clone();
    if min.is_infinite() {
        return Ok(ValBound::zero_element());
    }
    let mut attaining = terms.iter().filter(|t| t.lower == min);
    let first = attaining.next().expect("min is attained");
    let exact = first.exact && attaining.next().is_none();
    Ok(ValBound::new(min, exact))
}
