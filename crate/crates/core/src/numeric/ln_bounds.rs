//! Rigorous rational enclosures of the natural logarithm.
//!
//! `ln r = k ln 2 + 2 atanh(z)` with `r = 2^k s`, `s` in `[1, 2)` and
//! `z = (s - 1)/(s + 1) < 1/3`. The atanh series is truncated and its tail
//! bounded by a geometric series, and `z` is rounded outward onto a `2^-64`
//! grid so denominators stay small.

use num_bigint::BigInt;
use num_traits::One;

use super::rational::Rational;

const SERIES_TERMS: u32 = 24;
const GRID_BITS: u32 = 64;

/// Returns `(lo, hi)` with `lo <= atanh(z) <= hi`, for `0 <= z < 1`.
fn atanh_enclosure(z: &Rational) -> (Rational, Rational) {
    let z2 = z * z;
    let mut power = z.clone();
    let mut sum = Rational::zero();
    for m in 0..SERIES_TERMS {
        sum += &(&power / Rational::from(u64::from(2 * m + 1)));
        power = &power * &z2;
    }
    let tail = &power / (Rational::from(u64::from(2 * SERIES_TERMS + 1)) * (Rational::one() - &z2));
    let hi = &sum + &tail;
    (sum, hi)
}

fn round_to_grid(x: &Rational, up: bool) -> Rational {
    let scale = BigInt::one() << GRID_BITS;
    let scaled = x * Rational::from(scale.clone());
    let mut n = scaled.floor();
    if up && !scaled.is_integer() {
        n += 1;
    }
    Rational::new(n, scale)
}

fn ln2_enclosure() -> (Rational, Rational) {
    let (lo, hi) = atanh_enclosure(&Rational::new(1, 3));
    (&lo + &lo, &hi + &hi)
}

/// Splits `r >= 1` as `2^k * s` with `1 <= s < 2`.
fn split_power_of_two(r: &Rational) -> (u64, Rational) {
    let bits_n = r.numer().bits();
    let bits_d = r.denom().bits();
    let mut k = bits_n.saturating_sub(bits_d).saturating_sub(1);
    let mut s = r / Rational::from(BigInt::one() << k);
    let two = Rational::from(2i64);
    while s >= two {
        s = &s / &two;
        k += 1;
    }
    (k, s)
}

fn ln_enclosure_at_least_one(r: &Rational) -> (Rational, Rational) {
    debug_assert!(*r >= Rational::one());
    let (k, s) = split_power_of_two(r);
    let z = (&s - Rational::one()) / (&s + Rational::one());
    let (lo_s, _) = atanh_enclosure(&round_to_grid(&z, false));
    let (_, hi_s) = atanh_enclosure(&round_to_grid(&z, true));
    let (ln2_lo, ln2_hi) = ln2_enclosure();
    let k = Rational::from(k);
    (&k * &ln2_lo + &lo_s + &lo_s, &k * &ln2_hi + &hi_s + &hi_s)
}

/// A rational `>= ln r`. Panics unless `r > 0`.
pub fn ln_upper(r: &Rational) -> Rational {
    assert!(r.is_positive(), "ln of a non-positive number");
    if *r == Rational::one() {
        return Rational::zero();
    }
    if *r > Rational::one() {
        ln_enclosure_at_least_one(r).1
    } else {
        -ln_enclosure_at_least_one(&r.recip()).0
    }
}

/// A rational `<= ln r`. Panics unless `r > 0`.
pub fn ln_lower(r: &Rational) -> Rational {
    assert!(r.is_positive(), "ln of a non-positive number");
    if *r == Rational::one() {
        return Rational::zero();
    }
    if *r > Rational::one() {
        ln_enclosure_at_least_one(r).0
    } else {
        -ln_enclosure_at_least_one(&r.recip()).1
    }
}
