//! Newton polygons and copolygons of valuation profiles.
//!
//! A [`ValuationProfile`] records only `v_K` of each coefficient. Its Newton
//! polygon is the lower convex hull of `(i, v_i)`; its copolygon is the lower
//! envelope of the lines `y = i x + v_i`. The two are dual: the copolygon's
//! vertex abscissae are the absolute values of the polygon's segment slopes.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{Rational, ValBound};
use crate::pwl::{lower_envelope, Line, PLFunction};

/// Coefficient valuations of a polynomial of fixed degree. Omitted indices
/// are zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationProfile {
    degree: usize,
    entries: BTreeMap<usize, ValBound>,
    monic: bool,
}

impl ValuationProfile {
    pub fn new(degree: usize, entries: BTreeMap<usize, ValBound>, monic: bool) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidProfile("degree must be positive".into()));
        }
        if let Some(&i) = entries.keys().find(|&&i| i > degree) {
            return Err(Error::InvalidProfile(format!("index {i} exceeds degree {degree}")));
        }
        let mut entries: BTreeMap<usize, ValBound> =
            entries.into_iter().filter(|(_, v)| !v.is_zero_element()).collect();
        if monic {
            let lead = entries.entry(degree).or_insert_with(|| ValBound::exact(Rational::zero()));
            if *lead != ValBound::exact(Rational::zero()) {
                return Err(Error::InvalidProfile(format!(
                    "monic profile needs exact valuation 0 at index {degree}, found {lead}"
                )));
            }
        }
        Ok(ValuationProfile { degree, entries, monic })
    }

    pub fn monic(degree: usize, entries: impl IntoIterator<Item = (usize, ValBound)>) -> Result<Self> {
        ValuationProfile::new(degree, entries.into_iter().collect(), true)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_monic(&self) -> bool {
        self.monic
    }

    pub fn get(&self, i: usize) -> ValBound {
        self.entries.get(&i).cloned().unwrap_or_else(ValBound::zero_element)
    }

    /// Entries with finite lower bound, by increasing index.
    pub fn finite_entries(&self) -> impl Iterator<Item = (usize, &ValBound)> {
        self.entries.iter().map(|(&i, v)| (i, v))
    }

    pub fn is_exact(&self) -> bool {
        self.entries.values().all(|v| v.exact)
    }
}

impl Serialize for ValuationProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // numeric key order, not string order
        use serde::ser::SerializeMap;
        let mut out = serializer.serialize_map(Some(self.entries.len()))?;
        for (i, v) in &self.entries {
            out.serialize_entry(&i.to_string(), v)?;
        }
        out.end()
    }
}

impl<'de> Deserialize<'de> for ValuationProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, ValBound>::deserialize(deserializer)?;
        let mut entries = BTreeMap::new();
        for (k, v) in raw {
            let i: usize = k
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("invalid index {k:?}")))?;
            entries.insert(i, v);
        }
        entries.retain(|_, v: &mut ValBound| !v.is_zero_element());
        let degree = *entries
            .keys()
            .next_back()
            .ok_or_else(|| serde::de::Error::custom("empty profile"))?;
        let monic = entries[&degree] == ValBound::exact(Rational::zero());
        ValuationProfile::new(degree, entries, monic).map_err(serde::de::Error::custom)
    }
}

/// Lower convex hull of the finite points of a profile, as its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(Rational, Rational)>,
}

impl NewtonPolygon {
    pub fn vertices(&self) -> &[(Rational, Rational)] {
        &self.vertices
    }

    /// Segment slopes, strictly increasing left to right.
    pub fn slopes(&self) -> Vec<Rational> {
        self.vertices
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }
}

fn cross(o: &(Rational, Rational), a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

pub fn newton_polygon(profile: &ValuationProfile) -> Result<NewtonPolygon> {
    let points: Vec<(Rational, Rational)> = profile
        .finite_entries()
        .map(|(i, v)| (Rational::from(i as u64), v.finite_lower().expect("finite").clone()))
        .collect();
    if points.len() < 2 {
        return Err(Error::DegeneratePolygon);
    }
    let mut hull: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_positive() {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(NewtonPolygon { vertices: hull })
}

/// Boundary of the copolygon of a polynomial without constant term, with the
/// envelope's uncertainty flag.
pub fn copolygon(profile: &ValuationProfile) -> Result<(PLFunction, bool)> {
    if profile.get(0).finite_lower().is_some() {
        return Err(Error::ShiftedPolynomialRequired);
    }
    let lines: Vec<Line> = profile
        .finite_entries()
        .map(|(i, v)| Line::new(Rational::from(i as u64), v.clone()))
        .collect();
    lower_envelope(&lines)
}

/// The copolygon read off directly from the polygon's vertices and slopes.
pub fn legendre_dual(polygon: &NewtonPolygon) -> Result<PLFunction> {
    let vs = &polygon.vertices;
    let slopes = polygon.slopes();
    // leftmost vertex of minimal height is active just right of 0
    let min_height = vs.iter().map(|(_, v)| v).min().expect("nonempty");
    let start = vs.iter().position(|(_, v)| v == min_height).expect("attained");
    let breakpoints: Vec<Rational> = (1..=start).rev().map(|j| -&slopes[j - 1]).collect();
    let line_slopes: Vec<Rational> = (0..=start).rev().map(|j| vs[j].0.clone()).collect();
    let last = line_slopes.last().expect("nonempty");
    if !last.is_positive() {
        return Err(Error::EnvelopeNotIncreasing(last.clone()));
    }
    PLFunction::from_breakpoints(min_height.clone(), breakpoints, line_slopes)
}
