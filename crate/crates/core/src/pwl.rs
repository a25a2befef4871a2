//! Continuous, strictly increasing piecewise-linear functions on `[0, inf)`
//! with exact rational vertices and slopes.
//!
//! Transition functions and their inverses, the accumulated `Phi_n`, and
//! copolygon boundaries are all values of [`PLFunction`]. The representation
//! is normalized: vertices have strictly increasing positive abscissae and no
//! two adjacent pieces share a slope, so equal functions compare equal.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{ExtRational, Rational, ValBound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// A single piece; both concave and convex.
    Linear,
    Concave,
    Convex,
    General,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLFunction {
    initial_value: Rational,
    vertices: Vec<(Rational, Rational)>,
    /// `slopes[k]` applies left of `vertices[k]`; the last one is unbounded.
    slopes: Vec<Rational>,
}

impl PLFunction {
    pub fn identity() -> Self {
        PLFunction::linear(Rational::zero(), Rational::one()).expect("slope 1")
    }

    pub fn linear(initial_value: Rational, slope: Rational) -> Result<Self> {
        if !slope.is_positive() {
            return Err(Error::Precondition(format!("slope {slope} is not positive")));
        }
        Ok(PLFunction {
            initial_value,
            vertices: Vec::new(),
            slopes: vec![slope],
        })
    }

    /// Builds from breakpoint abscissae and one slope per piece.
    pub fn from_breakpoints(initial_value: Rational, xs: Vec<Rational>, slopes: Vec<Rational>) -> Result<Self> {
        if slopes.len() != xs.len() + 1 {
            return Err(Error::Precondition(format!(
                "{} breakpoints need {} slopes, got {}",
                xs.len(),
                xs.len() + 1,
                slopes.len()
            )));
        }
        if let Some(s) = slopes.iter().find(|s| !s.is_positive()) {
            return Err(Error::Precondition(format!("slope {s} is not positive")));
        }
        let mut prev = Rational::zero();
        let mut y = initial_value.clone();
        let mut vertices = Vec::with_capacity(xs.len());
        for (x, s) in xs.into_iter().zip(&slopes) {
            if x <= prev && !(x.is_zero() && vertices.is_empty()) {
                return Err(Error::Precondition("breakpoints must be strictly increasing and positive".into()));
            }
            y = &y + s * (&x - &prev);
            prev = x.clone();
            vertices.push((x, y.clone()));
        }
        Ok(PLFunction {
            initial_value,
            vertices,
            slopes,
        }
        .normalized())
    }

    /// Builds from explicit vertices, checking continuity.
    pub fn from_vertices(
        initial_value: Rational,
        vertices: Vec<(Rational, Rational)>,
        slopes: Vec<Rational>,
    ) -> Result<Self> {
        let xs = vertices.iter().map(|(x, _)| x.clone()).collect();
        let f = PLFunction::from_breakpoints(initial_value, xs, slopes)?;
        for (x, y) in &vertices {
            if f.eval_unchecked(x) != *y {
                return Err(Error::Precondition(format!("vertex ({x}, {y}) breaks continuity")));
            }
        }
        Ok(f)
    }

    /// Builds from points `(x, f(x))` with increasing `x >= 0` and the slope
    /// beyond the last one. Slopes in between are chords.
    fn from_points(initial_value: Rational, points: Vec<(Rational, Rational)>, final_slope: Rational) -> Result<Self> {
        let mut prev = (Rational::zero(), initial_value.clone());
        let mut slopes = Vec::with_capacity(points.len() + 1);
        let mut vertices = Vec::with_capacity(points.len());
        for (x, y) in points {
            if x.is_zero() {
                continue;
            }
            let slope = (&y - &prev.1) / (&x - &prev.0);
            if !slope.is_positive() {
                return Err(Error::Precondition(format!("slope {slope} is not positive")));
            }
            slopes.push(slope);
            vertices.push((x.clone(), y.clone()));
            prev = (x, y);
        }
        if !final_slope.is_positive() {
            return Err(Error::Precondition(format!("slope {final_slope} is not positive")));
        }
        slopes.push(final_slope);
        Ok(PLFunction {
            initial_value,
            vertices,
            slopes,
        }
        .normalized())
    }

    fn normalized(mut self) -> Self {
        let mut vertices = Vec::with_capacity(self.vertices.len());
        let mut slopes = Vec::with_capacity(self.slopes.len());
        let mut iter = self.slopes.drain(..);
        let mut current = iter.next().expect("at least one slope");
        for (vertex, next) in self.vertices.drain(..).zip(iter) {
            if vertex.0.is_zero() {
                current = next;
                continue;
            }
            if next != current {
                vertices.push(vertex);
                slopes.push(std::mem::replace(&mut current, next));
            }
        }
        slopes.push(current);
        PLFunction {
            initial_value: self.initial_value,
            vertices,
            slopes,
        }
    }

    pub fn initial_value(&self) -> &Rational {
        &self.initial_value
    }

    pub fn vertices(&self) -> &[(Rational, Rational)] {
        &self.vertices
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn initial_slope(&self) -> &Rational {
        &self.slopes[0]
    }

    pub fn final_slope(&self) -> &Rational {
        self.slopes.last().expect("at least one slope")
    }

    /// Slope of the piece immediately right of vertex `k`.
    pub fn slope_right_of(&self, k: usize) -> &Rational {
        &self.slopes[k + 1]
    }

    pub fn shape(&self) -> Shape {
        if self.slopes.len() == 1 {
            return Shape::Linear;
        }
        let pairs = || self.slopes.windows(2);
        if pairs().all(|w| w[1] < w[0]) {
            Shape::Concave
        } else if pairs().all(|w| w[1] > w[0]) {
            Shape::Convex
        } else {
            Shape::General
        }
    }

    pub fn is_concave(&self) -> bool {
        matches!(self.shape(), Shape::Linear | Shape::Concave)
    }

    pub fn is_convex(&self) -> bool {
        matches!(self.shape(), Shape::Linear | Shape::Convex)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() {
            return Err(Error::Precondition(format!("evaluation at negative x = {x}")));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &Rational) -> Rational {
        let k = self.vertices.partition_point(|(vx, _)| vx <= x);
        let (x0, y0) = match k {
            0 => (Rational::zero(), self.initial_value.clone()),
            _ => self.vertices[k - 1].clone(),
        };
        y0 + &self.slopes[k] * (x - x0)
    }

    /// The unique `x >= 0` with `f(x) = y`, if `y >= f(0)`.
    pub fn preimage(&self, y: &Rational) -> Option<Rational> {
        if *y < self.initial_value {
            return None;
        }
        let k = self.vertices.partition_point(|(_, vy)| vy <= y);
        let (x0, y0) = match k {
            0 => (Rational::zero(), self.initial_value.clone()),
            _ => self.vertices[k - 1].clone(),
        };
        Some(x0 + (y - y0) / &self.slopes[k])
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.initial_value.is_zero() {
            return Err(Error::NotBijection(self.initial_value.clone()));
        }
        Ok(PLFunction {
            initial_value: Rational::zero(),
            vertices: self.vertices.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
            slopes: self.slopes.iter().map(Rational::recip).collect(),
        })
    }

    /// `outer ∘ inner`. The result's breakpoints are the inner vertices and
    /// the inner preimages of the outer vertices.
    pub fn compose(outer: &PLFunction, inner: &PLFunction) -> Result<PLFunction> {
        if inner.initial_value.is_negative() {
            return Err(Error::Precondition("inner function leaves [0, inf)".into()));
        }
        let mut xs: Vec<Rational> = inner.vertices.iter().map(|(x, _)| x.clone()).collect();
        xs.extend(
            outer
                .vertices
                .iter()
                .filter_map(|(ox, _)| inner.preimage(ox))
                .filter(Rational::is_positive),
        );
        xs.sort();
        xs.dedup();
        let points = xs
            .into_iter()
            .map(|x| {
                let y = outer.eval_unchecked(&inner.eval_unchecked(&x));
                (x, y)
            })
            .collect();
        let initial = outer.eval_unchecked(&inner.initial_value);
        PLFunction::from_points(initial, points, outer.final_slope() * inner.final_slope())
    }

    /// `x ↦ a f(x / b)`.
    pub fn conjugate_scale(&self, out_scale: &Rational, in_scale: &Rational) -> Result<Self> {
        if !out_scale.is_positive() || !in_scale.is_positive() {
            return Err(Error::Precondition("scales must be positive".into()));
        }
        let ratio = out_scale / in_scale;
        Ok(PLFunction {
            initial_value: out_scale * &self.initial_value,
            vertices: self
                .vertices
                .iter()
                .map(|(x, y)| (in_scale * x, out_scale * y))
                .collect(),
            slopes: self.slopes.iter().map(|s| s * &ratio).collect(),
        })
    }

    /// Rewrites a transition function in the convention shifted by one:
    /// `phi_S(x) = phi(x + 1) - 1`.
    pub fn serre_shift(&self) -> Result<Self> {
        let one = Rational::one();
        let identity_on_unit = self.initial_value.is_zero()
            && *self.initial_slope() == one
            && self.vertices.first().is_none_or(|(x, _)| *x >= one);
        if !identity_on_unit {
            return Err(Error::NotTransitionFunction);
        }
        let vertices: Vec<_> = self.vertices.iter().map(|(x, _)| x - &one).collect();
        let f = PLFunction::from_breakpoints(Rational::zero(), vertices, self.slopes.clone())?;
        Ok(f)
    }

    /// Inverse of [`serre_shift`](Self::serre_shift): `phi(x) = x` on `[0, 1]`
    /// and `1 + phi_S(x - 1)` beyond.
    pub fn serre_unshift(&self) -> Result<Self> {
        if !self.initial_value.is_zero() {
            return Err(Error::NotTransitionFunction);
        }
        let one = Rational::one();
        let mut xs = vec![one.clone()];
        xs.extend(self.vertices.iter().map(|(x, _)| x + &one));
        let mut slopes = vec![one];
        slopes.extend(self.slopes.iter().cloned());
        PLFunction::from_breakpoints(Rational::zero(), xs, slopes)
    }
}

/// The exact supremum of `a` such that `f = g` on `[0, a]`.
pub fn agreement_prefix(f: &PLFunction, g: &PLFunction) -> ExtRational {
    if f.initial_value != g.initial_value {
        return ExtRational::Finite(Rational::zero());
    }
    let mut xs: Vec<&Rational> = f.vertices.iter().chain(&g.vertices).map(|(x, _)| x).collect();
    xs.sort();
    xs.dedup();
    let mut left = Rational::zero();
    for x in xs {
        // both are affine on [left, x] and agree at `left`
        let slope_f = &f.slopes[f.vertices.partition_point(|(vx, _)| *vx <= left)];
        let slope_g = &g.slopes[g.vertices.partition_point(|(vx, _)| *vx <= left)];
        if slope_f != slope_g {
            return ExtRational::Finite(left);
        }
        left = x.clone();
    }
    if f.final_slope() == g.final_slope() {
        ExtRational::Infinity
    } else {
        ExtRational::Finite(left)
    }
}

/// `y = slope·x + intercept`, where the intercept may be a lower bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub slope: Rational,
    pub intercept: ValBound,
}

impl Line {
    pub fn new(slope: Rational, intercept: ValBound) -> Self {
        Line { slope, intercept }
    }
}

/// Pointwise minimum of a family of lines on `[0, inf)`, using the lower bound
/// of each intercept. The flag is set when a line with an inexact intercept is
/// active on an interval of positive length.
pub fn lower_envelope(lines: &[Line]) -> Result<(PLFunction, bool)> {
    if lines.iter().any(|l| l.slope.is_negative()) {
        return Err(Error::Precondition("line slopes must be nonnegative".into()));
    }
    let finite: Vec<(&Rational, &Rational, bool)> = lines
        .iter()
        .filter_map(|l| l.intercept.finite_lower().map(|b| (&l.slope, b, l.intercept.exact)))
        .collect();
    let start = finite
        .iter()
        .min_by(|a, b| (a.1, a.0, !a.2).cmp(&(b.1, b.0, !b.2)))
        .ok_or(Error::ZeroPolynomial)?;
    let initial = start.1.clone();
    let mut current = *start;
    let mut x_cur = Rational::zero();
    let mut points = Vec::new();
    let mut uncertain = false;
    loop {
        let next = finite
            .iter()
            .filter(|l| l.0 < current.0)
            .map(|l| ((l.1 - current.1) / (current.0 - l.0), l))
            .min_by(|(xa, a), (xb, b)| (xa, a.0, !a.2).cmp(&(xb, b.0, !b.2)));
        let Some((x_next, line)) = next else { break };
        if x_next > x_cur {
            uncertain |= !current.2;
            let y = current.0 * &x_next + current.1;
            points.push((x_next.clone(), y));
        }
        x_cur = x_next;
        current = *line;
    }
    uncertain |= !current.2;
    if !current.0.is_positive() {
        return Err(Error::EnvelopeNotIncreasing(current.0.clone()));
    }
    let f = PLFunction::from_points(initial, points, current.0.clone())?;
    Ok((f, uncertain))
}

impl fmt::Debug for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PL(f(0)={}", self.initial_value)?;
        for ((x, y), s) in self.vertices.iter().zip(&self.slopes) {
            write!(f, " /{s}/ ({x}, {y})")?;
        }
        write!(f, " /{}/)", self.final_slope())
    }
}

#[derive(Serialize, Deserialize)]
struct PLFunctionRepr {
    vertices: Vec<[Rational; 2]>,
    slopes: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Rational::is_zero")]
    initial_value: Rational,
}

impl Serialize for PLFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PLFunctionRepr {
            vertices: self.vertices.iter().map(|(x, y)| [x.clone(), y.clone()]).collect(),
            slopes: self.slopes.clone(),
            initial_value: self.initial_value.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PLFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PLFunctionRepr::deserialize(deserializer)?;
        let vertices = repr.vertices.into_iter().map(|[x, y]| (x, y)).collect();
        PLFunction::from_vertices(repr.initial_value, vertices, repr.slopes).map_err(serde::de::Error::custom)
    }
}
