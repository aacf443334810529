//! Equivalence transformations on a [`HessenbergPencil`]: replacing the
//! first or last pole (type I) and exchanging two adjacent poles (type II).
//!
//! Every move acts on the full rows/columns of `A` so that the accumulated
//! transforms reproduce the final pencil exactly from the initial one.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pencil::{HessenbergPencil, ProjectiveValue};
use crate::rotations::{left_eliminator, right_eliminator, PositionedCore};

/// Optional accumulators for the left (`Q`) and right (`Z`) transforms, so
/// that `Q^H A_0 Z = A` and `Q^H U_0 Z = U` after any sequence of moves.
///
/// Stored as `Q^H` and `Z^H` so that each update touches two contiguous rows.
#[derive(Debug, Clone, Default)]
pub struct TransformRecorder {
    qh: Option<Array2<Complex64>>,
    zh: Option<Array2<Complex64>>,
}

fn adjoint(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

impl TransformRecorder {
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn enabled(n: usize) -> Self {
        Self { qh: Some(Array2::eye(n)), zh: Some(Array2::eye(n)) }
    }

    pub fn is_enabled(&self) -> bool {
        self.qh.is_some()
    }

    pub fn q(&self) -> Option<Array2<Complex64>> {
        self.qh.as_ref().map(adjoint)
    }

    pub fn z(&self) -> Option<Array2<Complex64>> {
        self.zh.as_ref().map(adjoint)
    }

    pub fn into_parts(self) -> Option<(Array2<Complex64>, Array2<Complex64>)> {
        match (self.qh, self.zh) {
            (Some(qh), Some(zh)) => Some((adjoint(&qh), adjoint(&zh))),
            _ => None,
        }
    }

    /// Records a left transform: the pencil was multiplied by `g^H` from the left.
    pub fn left(&mut self, g: &PositionedCore) {
        if let Some(qh) = self.qh.as_mut() {
            g.apply_left(qh, true).expect("recorded core fits the recorder");
        }
    }

    /// Records a right transform: the pencil was multiplied by `g` from the right.
    pub fn right(&mut self, g: &PositionedCore) {
        if let Some(zh) = self.zh.as_mut() {
            g.apply_left(zh, true).expect("recorded core fits the recorder");
        }
    }
}

/// Result of a type I move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveOutcome {
    Applied,
    /// The insertion vector vanished: the requested pole is an eigenvalue of
    /// the leading (or trailing) 1x1 block, and the pencil was left unchanged.
    Degenerate,
}

/// Which of the two swap variants a type II move used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapBranch {
    /// `|λ_1| >= |λ_2|`: `Z_{j-1}` computed from the pencil, `Q_j` from the turnover.
    ZFirst,
    /// `|λ_1| < |λ_2|`: `Q_j` computed from the pencil, `Z_{j-1}` from the turnover.
    QFirst,
}

fn window_size_check(p: &HessenbergPencil) -> Result<(usize, usize)> {
    let (lo, hi) = p.window();
    if hi < lo + 1 {
        return Err(Error::WindowTooSmall);
    }
    Ok((lo, hi))
}

/// Replaces the first pole of the active window by `rho`.
pub fn move_type1_top(
    p: &mut HessenbergPencil,
    rho: &ProjectiveValue,
    rec: &mut TransformRecorder,
) -> Result<MoveOutcome> {
    let (lo, _) = window_size_check(p)?;
    let n = p.dim();
    let (alpha, beta) = (rho.num(), rho.den());
    let x1 = beta * p.a_entry(lo, lo) - alpha * p.u.entry_unchecked(lo, lo);
    let x2 = beta * p.a_entry(lo + 1, lo) - alpha * p.u.core(lo).s();
    let q = match left_eliminator(x1, x2) {
        Ok((g, _)) => PositionedCore::new(g, lo),
        Err(_) => return Ok(MoveOutcome::Degenerate),
    };
    q.apply_left_cols(&mut p.a, true, (lo - 1)..n)?;
    p.u.absorb_left_in_window(&q.inverse())?;
    rec.left(&q);
    Ok(MoveOutcome::Applied)
}

/// Replaces the last pole of the active window by `tau`.
pub fn move_type1_bottom(
    p: &mut HessenbergPencil,
    tau: &ProjectiveValue,
    rec: &mut TransformRecorder,
) -> Result<MoveOutcome> {
    let (_, hi) = window_size_check(p)?;
    let (alpha, beta) = (tau.num(), tau.den());
    let w1 = beta * p.a_entry(hi, hi - 1) - alpha * p.u.core(hi - 1).s();
    let w2 = beta * p.a_entry(hi, hi) - alpha * p.u.entry_unchecked(hi, hi);
    let z = match right_eliminator(w1, w2) {
        Ok((g, _)) => PositionedCore::new(g, hi - 1),
        Err(_) => return Ok(MoveOutcome::Degenerate),
    };
    z.apply_right_rows(&mut p.a, false, 0..hi)?;
    p.u.absorb_right_in_window(&z)?;
    rec.right(&z);
    Ok(MoveOutcome::Applied)
}

/// Exchanges the poles `σ_{j-1}` and `σ_j` (`lo + 1 <= j <= hi - 1`).
pub fn move_type2_swap(
    p: &mut HessenbergPencil,
    j: usize,
    rec: &mut TransformRecorder,
) -> Result<SwapBranch> {
    let (lo, hi) = p.window();
    if j < lo + 1 || j + 1 > hi {
        return Err(Error::SwapOutOfWindow(j));
    }
    let n = p.dim();
    let a_left = p.a_entry(j, j - 1);
    let a_diag = p.a_entry(j, j);
    let a_below = p.a_entry(j + 1, j);
    let s_left = p.u.core(j - 1).s();
    let s_below = p.u.core(j).s();
    let u_diag = p.u.entry_unchecked(j, j);

    // |λ_1| >= |λ_2| without dividing
    if a_left.norm() * s_below.norm() >= a_below.norm() * s_left.norm() {
        let h1 = s_below * a_left - a_below * s_left;
        let h2 = s_below * a_diag - a_below * u_diag;
        let (zc, _) = right_eliminator(h1, h2).map_err(|_| Error::SwapOnDeflatable(j))?;
        let z = PositionedCore::new(zc, j - 1);
        z.apply_right_rows(&mut p.a, false, 0..(j + 1))?;
        let q = p.u.pass_right_to_left(&z)?;
        q.apply_left_cols(&mut p.a, true, (j - 2)..n)?;
        p.zero_residual(j + 1, j - 1)?;
        rec.right(&z);
        rec.left(&q);
        Ok(SwapBranch::ZFirst)
    } else {
        let g1 = s_left * a_diag - a_left * u_diag;
        let g2 = s_left * a_below - a_left * s_below;
        let (qc, _) = left_eliminator(g1, g2).map_err(|_| Error::SwapOnDeflatable(j))?;
        let q = PositionedCore::new(qc, j);
        q.apply_left_cols(&mut p.a, true, (j - 2)..n)?;
        let z = p.u.pass_left_to_right(&q.inverse())?.inverse();
        z.apply_right_rows(&mut p.a, false, 0..(j + 1))?;
        p.zero_residual(j + 1, j - 1)?;
        rec.left(&q);
        rec.right(&z);
        Ok(SwapBranch::QFirst)
    }
}
