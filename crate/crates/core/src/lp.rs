//! Dense tableau simplex for small packing LPs
//! `max cᵀy  s.t.  Ay ≤ b, y ≥ 0` with `b ≥ 0`, using Bland's rule.
//!
//! The solver is generic over the scalar so the same code runs in `f64` and
//! in exact rationals.

use std::ops::{Add, Div, Mul, Sub};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_PIVOTS: usize = 100_000;

pub trait Scalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Pivot tolerance; zero for exact arithmetic.
    fn eps() -> Self;
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn eps() -> Self {
        1e-12
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn eps() -> Self {
        BigRational::zero()
    }
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Ratio of huge integers: scale down both parts.
            let shift = self.denom().bits().max(self.numer().bits()).saturating_sub(1000);
            let n = (self.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
            let d = (self.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }
}

/// Optimal primal and dual solutions of a packing LP.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingSolution<T> {
    pub value: T,
    /// Optimal `y`.
    pub primal: Vec<T>,
    /// Optimal multipliers of the rows of `A`, i.e. an optimal solution of
    /// the covering dual `min bᵀx  s.t.  Aᵀx ≥ c, x ≥ 0`.
    pub dual: Vec<T>,
}

/// Solves `max cᵀy  s.t.  Ay ≤ b, y ≥ 0`. Requires `b ≥ 0`, so the slack
/// basis is feasible. `a` is row-major with `b.len()` rows.
pub fn solve_packing<T: Scalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<PackingSolution<T>> {
    let m = b.len();
    let n = c.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("constraint matrix has the wrong shape".into()));
    }
    if b.iter().any(|x| *x < T::zero()) {
        return Err(Error::InvalidArgument("right-hand side must be nonnegative".into()));
    }
    let eps = T::eps();
    let width = n + m;
    // Rows: [A | I | b]; reduced costs r (maximisation: enter when r_j > eps).
    let mut tab: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let mut r = row.clone();
            r.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            r.push(bi.clone());
            r
        })
        .collect();
    let mut reduced: Vec<T> = c.iter().cloned().chain((0..m).map(|_| T::zero())).collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..width).find(|&j| reduced[j] > eps) else {
            return Ok(extract(&tab, &reduced, &basis, c, n, m));
        };
        let mut leave: Option<(usize, T)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter] > eps {
                let ratio = row[width].clone() / row[enter].clone();
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            return Err(Error::LpNumericalFailure("packing LP is unbounded".into()));
        };
        pivot(&mut tab, &mut reduced, pr, enter);
        basis[pr] = enter;
    }
    Err(Error::LpNumericalFailure("simplex pivot limit reached".into()))
}

fn pivot<T: Scalar>(tab: &mut [Vec<T>], reduced: &mut [T], pr: usize, pc: usize) {
    let piv = tab[pr][pc].clone();
    for x in tab[pr].iter_mut() {
        *x = x.clone() / piv.clone();
    }
    let prow = tab[pr].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (x, p) in row.iter_mut().zip(&prow) {
            *x = x.clone() - f.clone() * p.clone();
        }
    }
    let f = reduced[pc].clone();
    if !f.is_zero() {
        for (x, p) in reduced.iter_mut().zip(&prow) {
            *x = x.clone() - f.clone() * p.clone();
        }
    }
}

fn extract<T: Scalar>(tab: &[Vec<T>], reduced: &[T], basis: &[usize], c: &[T], n: usize, m: usize) -> PackingSolution<T> {
    let mut primal = vec![T::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            primal[bv] = tab[i][n + m].clone();
        }
    }
    let value = primal
        .iter()
        .zip(c)
        .fold(T::zero(), |acc, (y, cj)| acc + y.clone() * cj.clone());
    let dual = (0..m).map(|i| T::zero() - reduced[n + i].clone()).collect();
    PackingSolution { value, primal, dual }
}

/// Converts an `f64` problem to exact rationals.
pub fn to_rational(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>, Vec<BigRational>)> {
    let conv = |x: f64| {
        BigRational::from_f64(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite LP coefficient {x}")))
    };
    let a = a
        .iter()
        .map(|row| row.iter().map(|&x| conv(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let b = b.iter().map(|&x| conv(x)).collect::<Result<Vec<_>>>()?;
    let c = c.iter().map(|&x| conv(x)).collect::<Result<Vec<_>>>()?;
    Ok((a, b, c))
}
