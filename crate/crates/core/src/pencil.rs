//! The Hessenberg pencil `A - λU` with `U` unitary Hessenberg in factored
//! form, plus the projective scalar type used for shifts, poles and
//! eigenvalues.

use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::unitary::{BlockVariant, FactoredUnitary};

/// Dense 2x2 block, row major.
pub type Block2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A value `num / den` on the Riemann sphere; `den == 0` is infinity.
///
/// Stored scaled by a power of two so that the largest real or imaginary
/// component lies in `[1/2, 1)`. The scaling is exact, so `value()` returns
/// `num / den` of the inputs up to one rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveValue {
    num: Complex64,
    den: Complex64,
}

impl ProjectiveValue {
    pub fn new(num: Complex64, den: Complex64) -> Result<Self> {
        let m = num.re.abs().max(num.im.abs()).max(den.re.abs()).max(den.im.abs());
        if m == 0.0 || !m.is_finite() || num.is_nan() || den.is_nan() {
            return Err(Error::UndefinedProjective);
        }
        // two steps keep both factors representable across the exponent range
        let e = m.log2().floor() as i32 + 1;
        let (e1, e2) = (e / 2, e - e / 2);
        let f1 = 2f64.powi(-e1);
        let f2 = 2f64.powi(-e2);
        Ok(Self { num: num * f1 * f2, den: den * f1 * f2 })
    }

    pub fn finite(value: Complex64) -> Self {
        Self::new(value, ONE).expect("den = 1 is never degenerate")
    }

    pub fn infinity() -> Self {
        Self::new(ONE, ZERO).expect("1/0 is a valid projective value")
    }

    pub fn num(&self) -> Complex64 {
        self.num
    }

    pub fn den(&self) -> Complex64 {
        self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den == ZERO
    }

    /// `num / den`, or `None` for infinity.
    pub fn value(&self) -> Option<Complex64> {
        if self.is_infinite() {
            return None;
        }
        let d = self.den;
        if d.im == 0.0 {
            return Some(self.num.unscale(d.re));
        }
        // bring den to unit scale first so |den|^2 cannot underflow
        let k = 2f64.powi(-(d.re.abs().max(d.im.abs()).log2().floor() as i32));
        Some((self.num * k) / (d * k))
    }

    /// Chordal distance on the Riemann sphere, in `[0, 1]`.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        let cross = self.num * other.den - other.num * self.den;
        let na = (self.num.norm_sqr() + self.den.norm_sqr()).sqrt();
        let nb = (other.num.norm_sqr() + other.den.norm_sqr()).sqrt();
        cross.norm() / (na * nb)
    }

    /// Distance used to pick the Wilkinson root closest to `target`.
    ///
    /// Euclidean `|λ - target|` when `target` is finite (infinite candidates
    /// are infinitely far), chordal otherwise.
    pub fn distance_to(&self, target: &Self) -> f64 {
        if target.is_infinite() {
            return self.chordal_distance(target);
        }
        if self.is_infinite() {
            return f64::INFINITY;
        }
        let cross = self.num * target.den - target.num * self.den;
        cross.norm() / (self.den.norm() * target.den.norm())
    }
}

impl fmt::Display for ProjectiveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{} {}", v.re, v.im),
            None => write!(f, "inf"),
        }
    }
}

/// Magnitudes of the roundoff bulges removed after pole swaps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ResidualStats {
    pub count: usize,
    pub max: f64,
    pub sum: f64,
    pub last: f64,
}

impl ResidualStats {
    pub fn record(&mut self, magnitude: f64) {
        self.count += 1;
        self.max = self.max.max(magnitude);
        self.sum += magnitude;
        self.last = magnitude;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.max = self.max.max(other.max);
        self.sum += other.sum;
        if other.count > 0 {
            self.last = other.last;
        }
    }
}

#[derive(Debug, Clone)]
pub struct HessenbergPencil {
    pub(crate) a: Array2<Complex64>,
    pub(crate) u: FactoredUnitary,
    pub(crate) lo: usize,
    pub(crate) hi: usize,
    pub(crate) residuals: ResidualStats,
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &Array2<Complex64>) -> f64 {
    let scale = m.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * m.iter().map(|z| (z / scale).norm_sqr()).sum::<f64>().sqrt()
}

impl HessenbergPencil {
    /// Wraps an upper Hessenberg `A` as the pencil `A - λI`.
    ///
    /// Entries below the subdiagonal must not exceed `eps * ||A||_F`; they
    /// are then set to exactly zero.
    pub fn from_hessenberg(a: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = a.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let n = rows;
        let u = FactoredUnitary::identity(n)?;
        let mut a = a;
        let tol = f64::EPSILON * frobenius(&a);
        for j in 0..n {
            for i in (j + 2)..n {
                let m = a[[i, j]].norm();
                if m > tol || m.is_nan() {
                    return Err(Error::NotHessenberg { row: i + 1, col: j + 1, magnitude: m });
                }
                a[[i, j]] = ZERO;
            }
        }
        Ok(Self { a, u, lo: 1, hi: n, residuals: ResidualStats::default() })
    }

    /// Assembles a pencil from parts; `a` must be exactly upper Hessenberg.
    pub fn from_parts(a: Array2<Complex64>, u: FactoredUnitary) -> Result<Self> {
        let (rows, cols) = a.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows != u.dim() {
            return Err(Error::NotSquare { rows, cols: u.dim() });
        }
        for j in 0..cols {
            for i in (j + 2)..rows {
                if a[[i, j]] != ZERO {
                    return Err(Error::NotHessenberg {
                        row: i + 1,
                        col: j + 1,
                        magnitude: a[[i, j]].norm(),
                    });
                }
            }
        }
        Ok(Self { a, u, lo: 1, hi: rows, residuals: ResidualStats::default() })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &Array2<Complex64> {
        &self.a
    }

    pub fn u(&self) -> &FactoredUnitary {
        &self.u
    }

    /// 1-based `a_{ij}`.
    #[inline]
    pub fn a_entry(&self, i: usize, j: usize) -> Complex64 {
        self.a[[i - 1, j - 1]]
    }

    /// Active window `(lo, hi)`, 1-based and inclusive.
    pub fn window(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn set_window(&mut self, lo: usize, hi: usize) -> Result<()> {
        if lo == 0 || lo > hi || hi > self.dim() {
            return Err(Error::IndexOutOfRange { row: lo, col: hi, dim: self.dim() });
        }
        self.lo = lo;
        self.hi = hi;
        Ok(())
    }

    pub fn residuals(&self) -> &ResidualStats {
        &self.residuals
    }

    /// Pole `σ_j = a_{j+1,j} / s_j`.
    pub fn pole(&self, j: usize) -> Result<ProjectiveValue> {
        let n = self.dim();
        if j == 0 || j >= n {
            return Err(Error::PositionOutOfRange { position: j, dim: n });
        }
        ProjectiveValue::new(self.a_entry(j + 1, j), self.u.core(j).s())
    }

    /// Triangular 2x2 pencil whose eigenvalues are the poles `σ_{j-1}`, `σ_j`.
    pub fn swap_subpencil(&self, j: usize) -> Result<(Block2, Block2)> {
        if j < self.lo + 1 || j + 1 > self.hi {
            return Err(Error::SwapOutOfWindow(j));
        }
        let a2 = [
            [self.a_entry(j, j - 1), self.a_entry(j, j)],
            [ZERO, self.a_entry(j + 1, j)],
        ];
        let b2 = self.u.corner_block(j, BlockVariant::Swap)?;
        Ok((a2, b2))
    }

    /// Clears the bulge slot `(i, j)` with `i = j + 2` (1-based) and records
    /// the discarded magnitude.
    pub fn zero_residual(&mut self, i: usize, j: usize) -> Result<f64> {
        let n = self.dim();
        if j == 0 || i != j + 2 || i > n {
            return Err(Error::NotBulgeSlot { row: i, col: j });
        }
        let m = self.a[[i - 1, j - 1]].norm();
        self.a[[i - 1, j - 1]] = ZERO;
        self.residuals.record(m);
        Ok(m)
    }

    /// `(a_{ii}, u_{ii})` for a position decoupled from both neighbours.
    pub fn extract_eigenvalue(&self, i: usize) -> Result<ProjectiveValue> {
        let n = self.dim();
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { row: i, col: i, dim: n });
        }
        let below_ok = i == n || (self.a_entry(i + 1, i) == ZERO && self.u.core(i).s() == ZERO);
        let above_ok =
            i == 1 || (self.a_entry(i, i - 1) == ZERO && self.u.core(i - 1).s() == ZERO);
        if !(below_ok && above_ok) {
            return Err(Error::NotDeflated(i));
        }
        ProjectiveValue::new(self.a_entry(i, i), self.u.entry_unchecked(i, i))
    }

    pub fn into_parts(self) -> (Array2<Complex64>, FactoredUnitary) {
        (self.a, self.u)
    }
}
