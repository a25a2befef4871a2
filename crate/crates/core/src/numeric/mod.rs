//! Exact scalars and valuations.

mod ln_bounds;
mod rational;
mod valuation;

pub use ln_bounds::{ln_lower, ln_upper};
pub use rational::{q, ExtRational, Rational};
pub use valuation::{
    is_prime, v_of_binomial_in_k, v_of_integer_in_k, val_sum, vp_binomial, vp_int, BaseField, ValBound,
};
