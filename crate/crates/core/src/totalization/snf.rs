//! Smith normal form over the integers. Invariant factors are computed with
//! checked `i64` arithmetic first and recomputed with big integers if any
//! intermediate entry overflows.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::IntegerMatrix;

trait Scalar: Clone + PartialEq + Sized {
    fn is_zero(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn divides(&self, other: &Self) -> bool;
    /// Truncated quotient.
    fn quot(&self, d: &Self) -> Self;
    /// `self - q * b`, or `None` on overflow.
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn add(&self, b: &Self) -> Option<Self>;
    fn negate(&self) -> Option<Self>;
    fn is_negative(&self) -> bool;
}

impl Scalar for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn divides(&self, other: &Self) -> bool {
        *self != 0 && other.checked_rem(*self).is_none_or(|r| r == 0)
    }
    fn quot(&self, d: &Self) -> Self {
        self.checked_div(*d).unwrap_or(i64::MAX)
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn add(&self, b: &Self) -> Option<Self> {
        self.checked_add(*b)
    }
    fn negate(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
}

impl Scalar for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.abs() < other.abs()
    }
    fn divides(&self, other: &Self) -> bool {
        !Zero::is_zero(self) && Zero::is_zero(&(other % self))
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn add(&self, b: &Self) -> Option<Self> {
        Some(self + b)
    }
    fn negate(&self) -> Option<Self> {
        Some(-self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// Dense working matrix with optional tracking of the row and column
/// transforms (`U·M·V = D`).
struct Work<T> {
    a: Vec<Vec<T>>,
    u: Option<Vec<Vec<T>>>,
    v: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> Work<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in &mut self.a {
            r.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for r in v {
                r.swap(i, j);
            }
        }
    }

    /// row_i -= q * row_j
    fn row_op(&mut self, i: usize, j: usize, q: &T) -> Option<()> {
        fn op<T: Scalar>(m: &mut [Vec<T>], i: usize, j: usize, q: &T) -> Option<()> {
            let (ri, rj) = if i < j {
                let (x, y) = m.split_at_mut(j);
                (&mut x[i], &y[0])
            } else {
                let (x, y) = m.split_at_mut(i);
                (&mut y[0], &x[j])
            };
            for (a, b) in ri.iter_mut().zip(rj.iter()) {
                if !b.is_zero() {
                    *a = a.sub_mul(q, b)?;
                }
            }
            Some(())
        }
        op(&mut self.a, i, j, q)?;
        if let Some(u) = &mut self.u {
            op(u, i, j, q)?;
        }
        Some(())
    }

    /// col_i -= q * col_j
    fn col_op(&mut self, i: usize, j: usize, q: &T) -> Option<()> {
        fn op<T: Scalar>(m: &mut [Vec<T>], i: usize, j: usize, q: &T) -> Option<()> {
            for r in m.iter_mut() {
                if !r[j].is_zero() {
                    let x = r[i].sub_mul(q, &r[j])?;
                    r[i] = x;
                }
            }
            Some(())
        }
        op(&mut self.a, i, j, q)?;
        if let Some(v) = &mut self.v {
            op(v, i, j, q)?;
        }
        Some(())
    }

    fn add_row(&mut self, dst: usize, src: usize) -> Option<()> {
        let rows = |m: &mut Vec<Vec<T>>| -> Option<()> {
            let s = m[src].clone();
            for (a, b) in m[dst].iter_mut().zip(&s) {
                *a = a.add(b)?;
            }
            Some(())
        };
        rows(&mut self.a)?;
        if let Some(u) = &mut self.u {
            rows(u)?;
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for x in self.a[i].iter_mut() {
            *x = x.negate()?;
        }
        if let Some(u) = &mut self.u {
            for x in u[i].iter_mut() {
                *x = x.negate()?;
            }
        }
        Some(())
    }

    /// Diagonalize in place. `None` on overflow.
    fn run(&mut self) -> Option<()> {
        let rows = self.a.len();
        let cols = self.a.first().map_or(0, |r| r.len());
        let mut t = 0;
        while t < rows.min(cols) {
            // Smallest nonzero entry of the remaining block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &self.a[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs_lt(&self.a[bi][bj])) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            self.swap_rows(t, bi);
            self.swap_cols(t, bj);
            loop {
                let mut clean = true;
                for i in t + 1..rows {
                    if !self.a[i][t].is_zero() {
                        let q = self.a[i][t].quot(&self.a[t][t]);
                        self.row_op(i, t, &q)?;
                        if !self.a[i][t].is_zero() {
                            clean = false;
                        }
                    }
                }
                for j in t + 1..cols {
                    if !self.a[t][j].is_zero() {
                        let q = self.a[t][j].quot(&self.a[t][t]);
                        self.col_op(j, t, &q)?;
                        if !self.a[t][j].is_zero() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    // Move the smallest remainder in row or column t to the pivot.
                    let mut bi = t;
                    let mut bj = t;
                    for i in t + 1..rows {
                        let x = &self.a[i][t];
                        if !x.is_zero() && x.abs_lt(&self.a[bi][bj]) {
                            (bi, bj) = (i, t);
                        }
                    }
                    for j in t + 1..cols {
                        let x = &self.a[t][j];
                        if !x.is_zero() && x.abs_lt(&self.a[bi][bj]) {
                            (bi, bj) = (t, j);
                        }
                    }
                    self.swap_rows(t, bi);
                    self.swap_cols(t, bj);
                    continue;
                }
                // Enforce that the pivot divides the rest of the block.
                let p = self.a[t][t].clone();
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !p.divides(&self.a[i][j])));
                match bad {
                    Some(i) => self.add_row(t, i)?,
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t)?;
            }
            t += 1;
        }
        Some(())
    }
}

fn to_big(m: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn identity_big(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { <BigInt as One>::one() } else { <BigInt as Zero>::zero() }).collect()).collect()
}

fn diagonal<T: Scalar>(a: &[Vec<T>]) -> Vec<T> {
    let n = a.len().min(a.first().map_or(0, |r| r.len()));
    (0..n).map(|i| a[i][i].clone()).take_while(|x| !x.is_zero()).collect()
}

/// The nonzero invariant factors `d₁ | d₂ | …` of `m`, all positive.
pub fn invariant_factors(m: &IntegerMatrix) -> Vec<BigInt> {
    if m.rows() == 0 || m.cols() == 0 || m.is_zero() {
        return Vec::new();
    }
    let mut w = Work { a: m.to_rows(), u: None, v: None };
    if w.run().is_some() {
        return diagonal(&w.a).into_iter().map(BigInt::from).collect();
    }
    let mut w = Work { a: to_big(m), u: None, v: None };
    w.run().expect("big integers do not overflow");
    diagonal(&w.a)
}

/// Rank of an integer matrix.
pub fn rank(m: &IntegerMatrix) -> usize {
    invariant_factors(m).len()
}

/// Full decomposition `(U, D, V)` with `U·M·V = D` and `U`, `V` unimodular.
pub fn smith_normal_form(m: &IntegerMatrix) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut w = Work { a: to_big(m), u: Some(identity_big(m.rows())), v: Some(identity_big(m.cols())) };
    w.run().expect("big integers do not overflow");
    (w.u.unwrap(), w.a, w.v.unwrap())
}

/// Invariant factors greater than one, as `u64`.
pub(crate) fn torsion_of(factors: &[BigInt]) -> Vec<u64> {
    factors
        .iter()
        .filter(|d| !d.is_one())
        .map(|d| d.to_u64().expect("torsion coefficient fits in u64"))
        .collect()
}
