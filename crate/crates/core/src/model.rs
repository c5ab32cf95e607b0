//! The delayed Ricker recurrence with stocking,
//!
//! ```text
//! y[n+1] = y[n] * exp(r - y[n-1]) + h[n mod p],
//! ```
//!
//! its planar vector form `T_j(x, y) = (x f(y) + h_j, x)` and parameter validation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A state `(y_n, y_{n-1})` of the planar vector form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Planar<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Planar<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// The reflected point `(y, x)`.
    pub fn swap(self) -> Self {
        Self::new(self.y, self.x)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist_sup(&self, other: &Self) -> T {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

/// A point of the four-dimensional embedding space, read as a pair of planar points
/// `((x, y), (u, v))`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Quad<T> {
    pub x: T,
    pub y: T,
    pub u: T,
    pub v: T,
}

impl<T: Scalar> Quad<T> {
    pub fn new(x: T, y: T, u: T, v: T) -> Self {
        Self { x, y, u, v }
    }

    /// Diagonal lift `(X, X)` of a planar point.
    pub fn diagonal(p: Planar<T>) -> Self {
        Self::new(p.x, p.y, p.x, p.y)
    }

    /// Lower corner `(A, B)` of the box with vertices `A = (a, b)`, `B = (b, a)`.
    pub fn lower_corner(a: T, b: T) -> Self {
        Self::new(a, b, b, a)
    }

    /// Upper corner `(B, A)`.
    pub fn upper_corner(a: T, b: T) -> Self {
        Self::new(b, a, a, b)
    }

    pub fn first(&self) -> Planar<T> {
        Planar::new(self.x, self.y)
    }

    pub fn second(&self) -> Planar<T> {
        Planar::new(self.u, self.v)
    }

    pub fn to_array(self) -> [T; 4] {
        [self.x, self.y, self.u, self.v]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    pub fn dist_sup(&self, other: &Self) -> T {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }
}

/// Growth rate and periodic stocking schedule.
///
/// The schedule is stored at its minimal period, so `(2, 2)` becomes the constant
/// schedule `(2)` and `period() == 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params<T> {
    r: T,
    stocking: Vec<T>,
}

impl<T: Scalar> Params<T> {
    pub fn new(r: T, stocking: Vec<T>) -> Result<Self> {
        if !(r.is_finite() && r > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "growth rate r must be positive, got {r}"
            )));
        }
        if stocking.is_empty() {
            return Err(Error::InvalidParams("stocking schedule is empty".into()));
        }
        if let Some(h) = stocking
            .iter()
            .find(|h| !(h.is_finite() && **h >= T::zero()))
        {
            return Err(Error::InvalidParams(format!(
                "stocking must be non-negative, got {h}"
            )));
        }
        let p = minimal_period(&stocking);
        let mut stocking = stocking;
        stocking.truncate(p);
        Ok(Self { r, stocking })
    }

    pub fn constant(r: T, h: T) -> Result<Self> {
        Self::new(r, vec![h])
    }

    pub fn two_periodic(r: T, h0: T, h1: T) -> Result<Self> {
        Self::new(r, vec![h0, h1])
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn stocking(&self) -> &[T] {
        &self.stocking
    }

    /// Minimal period `p` of the stocking schedule.
    pub fn period(&self) -> usize {
        self.stocking.len()
    }

    pub fn is_constant(&self) -> bool {
        self.period() == 1
    }

    /// Stocking applied at step `n`, i.e. `h[n mod p]`.
    pub fn h(&self, n: usize) -> T {
        self.stocking[n % self.period()]
    }

    pub fn min_stocking(&self) -> T {
        self.stocking.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_stocking(&self) -> T {
        self.stocking
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max)
    }

    pub fn with_r(&self, r: T) -> Result<Self> {
        Self::new(r, self.stocking.clone())
    }

    /// Density factor `f(t) = exp(r - t)`, unchecked.
    #[inline]
    pub fn f(&self, t: T) -> T {
        (self.r - t).exp()
    }

    /// `F_n(x, y) = x f(y) + h_n`, unchecked.
    #[inline]
    pub fn apply(&self, n: usize, x: T, y: T) -> T {
        x * self.f(y) + self.h(n)
    }

    /// `T_n(P) = (F_n(P.x, P.y), P.x)`, unchecked.
    #[inline]
    pub fn apply_vector(&self, n: usize, p: Planar<T>) -> Planar<T> {
        Planar::new(self.apply(n, p.x, p.y), p.x)
    }

    /// The scalar map `F_j` as a closure.
    pub fn component(&self, j: usize) -> impl Fn(T, T) -> T + Clone + '_ {
        move |x, y| self.apply(j, x, y)
    }

    /// The planar map `T_j` as a closure.
    pub fn vector_map(&self, j: usize) -> impl Fn(Planar<T>) -> Planar<T> + Clone + '_ {
        move |p| self.apply_vector(j, p)
    }

    /// Upper bound `max_j (e^r + h_j) e^r + h_{j+1}` valid for every term from the second
    /// step on.
    pub fn two_step_bound(&self) -> T {
        let er = self.r.exp();
        (0..self.period())
            .map(|j| (er + self.h(j)) * er + self.h(j + 1))
            .fold(T::neg_infinity(), T::max)
    }

    /// Lower bound `min_j h_j + h_{j-1} f(M)` valid for every term from the fourth step on,
    /// where `M` is [`Self::two_step_bound`].
    pub fn eventual_lower_bound(&self) -> T {
        let p = self.period();
        let fm = self.f(self.two_step_bound());
        (0..p)
            .map(|j| self.h(j) + self.h(j + p - 1) * fm)
            .fold(T::infinity(), T::min)
    }
}

fn minimal_period<T: PartialEq>(seq: &[T]) -> usize {
    let n = seq.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (d..n).all(|i| seq[i] == seq[i % d]))
        .unwrap_or(n)
}

/// `f(t) = exp(r - t)`.
pub fn density_f<T: Scalar>(t: T, r: T) -> Result<T> {
    let value = (r - t).exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutOfRange(format!("exp({r} - {t}) overflows")))
    }
}

fn check_state<T: Scalar>(x: T, y: T) -> Result<()> {
    if x.is_finite() && y.is_finite() && x >= T::zero() && y >= T::zero() {
        Ok(())
    } else {
        Err(Error::NegativeState {
            x: x.to_f64().unwrap_or(f64::NAN),
            y: y.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// One step of the recurrence: `x f(y) + h_{n mod p}` for the state `(x, y) = (y_n, y_{n-1})`.
pub fn step<T: Scalar>(x: T, y: T, params: &Params<T>, n: usize) -> Result<T> {
    check_state(x, y)?;
    let next = x * density_f(y, params.r())? + params.h(n);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::OutOfRange(format!("step from ({x}, {y}) overflows")))
    }
}

/// Vector form `T_n(x, y) = (F_n(x, y), x)`.
pub fn vector_step<T: Scalar>(state: Planar<T>, params: &Params<T>, n: usize) -> Result<Planar<T>> {
    Ok(Planar::new(step(state.x, state.y, params, n)?, state.x))
}
