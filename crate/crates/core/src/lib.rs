//! Exact ramification data for towers of totally wildly ramified extensions
//! of a local field, and certificates for strict APF-ness.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod newton;
pub mod numeric;
pub mod plot;
pub mod pwl;
pub mod tower;

pub use error::{Error, Result};
pub use newton::{copolygon, legendre_dual, newton_polygon, NewtonPolygon, ValuationProfile};
pub use numeric::{BaseField, ExtRational, Rational, ValBound};
pub use pwl::{agreement_prefix, lower_envelope, Line, PLFunction, Shape};
pub use tower::{classify, theorem1_certify, Convention, RamificationReport, StepTemplate, TowerSpec, Verdict};
