//! Core transformations: 2x2 special-unitary blocks acting on two adjacent
//! rows or columns, and the kernels built on them (eliminators, fusion,
//! turnover).
//!
//! A core with parameters `(c, s)` has active part
//!
//! ```text
//! [ c  -conj(s) ]
//! [ s   conj(c) ]
//! ```
//!
//! so its determinant is `|c|^2 + |s|^2 = 1`. Both parameters are complex,
//! which makes the set closed under multiplication.

use std::ops::Range;

use ndarray::{s, Array2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreTransformation {
    c: Complex64,
    s: Complex64,
}

impl Default for CoreTransformation {
    fn default() -> Self {
        Self::identity()
    }
}

/// Euclidean norm of a complex pair without intermediate overflow.
#[inline]
pub(crate) fn pair_norm(a: Complex64, b: Complex64) -> f64 {
    let scale = a.re.abs().max(a.im.abs()).max(b.re.abs()).max(b.im.abs());
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let (ar, ai, br, bi) = (a.re / scale, a.im / scale, b.re / scale, b.im / scale);
    scale * (ar * ar + ai * ai + br * br + bi * bi).sqrt()
}

impl CoreTransformation {
    pub const fn identity() -> Self {
        Self { c: ONE, s: ZERO }
    }

    /// Builds a core from raw parameters and renormalizes them.
    ///
    /// Returns `None` when both parameters vanish.
    pub fn new(c: Complex64, s: Complex64) -> Option<Self> {
        let r = pair_norm(c, s);
        if r == 0.0 || !r.is_finite() {
            return None;
        }
        Some(Self { c: c / r, s: s / r })
    }

    #[inline]
    pub(crate) fn from_parts_unchecked(c: Complex64, s: Complex64) -> Self {
        Self { c, s }
    }

    #[inline]
    pub fn c(&self) -> Complex64 {
        self.c
    }

    #[inline]
    pub fn s(&self) -> Complex64 {
        self.s
    }

    /// The active 2x2 part as `[[g00, g01], [g10, g11]]`.
    pub fn active(&self) -> [[Complex64; 2]; 2] {
        [[self.c, -self.s.conj()], [self.s, self.c.conj()]]
    }

    /// Inverse, equal to the conjugate transpose.
    #[inline]
    pub fn inverse(&self) -> Self {
        Self { c: self.c.conj(), s: -self.s }
    }

    pub fn is_identity(&self) -> bool {
        self.c == ONE && self.s == ZERO
    }

    /// `| |c|^2 + |s|^2 - 1 |`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.c.norm_sqr() + self.s.norm_sqr() - 1.0).abs()
    }

    #[inline]
    fn renormalized(c: Complex64, s: Complex64) -> Self {
        let r = pair_norm(c, s);
        Self { c: c / r, s: s / r }
    }

    /// Conjugation by the 3x3 anti-identity: a core at frame rows (0, 1)
    /// becomes a core at frame rows (1, 2) and vice versa.
    #[inline]
    fn flipped(&self) -> Self {
        Self { c: self.c.conj(), s: -self.s.conj() }
    }

    /// `diag(1, p) G diag(1, conj(p))` for a unit-modulus `p`: `c` is kept
    /// and `s` is scaled by `p`.
    #[inline]
    pub(crate) fn with_s_rotated(&self, phase: Complex64) -> Self {
        Self { c: self.c, s: self.s * phase }
    }
}

/// Core `G` with `G^H (x1, x2)^T = (r, 0)^T`, `r >= 0` real.
pub fn left_eliminator(x1: Complex64, x2: Complex64) -> Result<(CoreTransformation, f64)> {
    let r = pair_norm(x1, x2);
    if r == 0.0 {
        return Err(Error::DegenerateEliminator);
    }
    Ok((CoreTransformation { c: x1 / r, s: x2 / r }, r))
}

/// Row analogue of [`left_eliminator`]: `(w1, w2) G = (0, r)`.
pub fn right_eliminator(w1: Complex64, w2: Complex64) -> Result<(CoreTransformation, f64)> {
    let r = pair_norm(w1, w2);
    if r == 0.0 {
        return Err(Error::DegenerateEliminator);
    }
    Ok((CoreTransformation { c: w2 / r, s: -w1 / r }, r))
}

/// Identity fallback for a vanishing vector.
#[inline]
fn left_eliminator_or_identity(x1: Complex64, x2: Complex64) -> (CoreTransformation, f64) {
    left_eliminator(x1, x2).unwrap_or((CoreTransformation::identity(), 0.0))
}

/// Product `g * h` of two cores at the same position.
pub fn fuse(g: &CoreTransformation, h: &CoreTransformation) -> CoreTransformation {
    let c = g.c * h.c - g.s.conj() * h.s;
    let s = g.s * h.c + g.c.conj() * h.s;
    CoreTransformation::renormalized(c, s)
}

/// A core together with the (1-based) index `j` of the first row/column it acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionedCore {
    pub core: CoreTransformation,
    pub position: usize,
}

impl PositionedCore {
    pub fn new(core: CoreTransformation, position: usize) -> Self {
        Self { core, position }
    }

    pub fn identity(position: usize) -> Self {
        Self { core: CoreTransformation::identity(), position }
    }

    pub fn inverse(&self) -> Self {
        Self { core: self.core.inverse(), position: self.position }
    }

    fn check_rows(&self, dim: usize) -> Result<usize> {
        if self.position == 0 || self.position + 1 > dim {
            return Err(Error::PositionOutOfRange { position: self.position, dim });
        }
        Ok(self.position - 1)
    }

    /// Rows `(p, p+1)` of `m` are replaced by `G` (or `G^H`) times those rows.
    pub fn apply_left(&self, m: &mut Array2<Complex64>, conjugate_transpose: bool) -> Result<()> {
        let ncols = m.ncols();
        self.apply_left_cols(m, conjugate_transpose, 0..ncols)
    }

    /// [`apply_left`](Self::apply_left) restricted to a 0-based column range.
    pub fn apply_left_cols(
        &self,
        m: &mut Array2<Complex64>,
        conjugate_transpose: bool,
        cols: Range<usize>,
    ) -> Result<()> {
        let r0 = self.check_rows(m.nrows())?;
        let [[g00, g01], [g10, g11]] = if conjugate_transpose {
            self.core.inverse().active()
        } else {
            self.core.active()
        };
        let (mut top, mut bottom) =
            m.multi_slice_mut((s![r0, cols.clone()], s![r0 + 1, cols]));
        Zip::from(&mut top).and(&mut bottom).for_each(|x, y| {
            let (a, b) = (*x, *y);
            *x = g00 * a + g01 * b;
            *y = g10 * a + g11 * b;
        });
        Ok(())
    }

    /// Columns `(p, p+1)` of `m` are replaced by those columns times `G` (or `G^H`).
    pub fn apply_right(&self, m: &mut Array2<Complex64>, conjugate_transpose: bool) -> Result<()> {
        let nrows = m.nrows();
        self.apply_right_rows(m, conjugate_transpose, 0..nrows)
    }

    /// [`apply_right`](Self::apply_right) restricted to a 0-based row range.
    pub fn apply_right_rows(
        &self,
        m: &mut Array2<Complex64>,
        conjugate_transpose: bool,
        rows: Range<usize>,
    ) -> Result<()> {
        let c0 = self.check_rows(m.ncols())?;
        let [[g00, g01], [g10, g11]] = if conjugate_transpose {
            self.core.inverse().active()
        } else {
            self.core.active()
        };
        let (mut left, mut right) =
            m.multi_slice_mut((s![rows.clone(), c0], s![rows, c0 + 1]));
        Zip::from(&mut left).and(&mut right).for_each(|x, y| {
            let (a, b) = (*x, *y);
            *x = a * g00 + b * g10;
            *y = a * g01 + b * g11;
        });
        Ok(())
    }
}

/// Forward turnover in a local 3x3 frame: cores at (0,1), (1,2), (0,1)
/// are refactored into cores at (1,2), (0,1), (1,2) with the same product.
fn turnover_down(
    g1: &CoreTransformation,
    g2: &CoreTransformation,
    g3: &CoreTransformation,
) -> (CoreTransformation, CoreTransformation, CoreTransformation) {
    let (c1, s1) = (g1.c, g1.s);
    let (c2, s2) = (g2.c, g2.s);
    let (c3, s3) = (g3.c, g3.s);

    // first two columns of M = G1 G2 G3
    let m00 = c1 * c3 - s1.conj() * c2 * s3;
    let m10 = s1 * c3 + c1.conj() * c2 * s3;
    let m20 = s2 * s3;
    let m01 = -c1 * s3.conj() - s1.conj() * c2 * c3.conj();
    let m11 = -s1 * s3.conj() + c1.conj() * c2 * c3.conj();
    let m21 = s2 * c3.conj();

    // H1 is taken with real c >= 0 so that a trivial turnover stays trivial;
    // then H1^H (m10, m20) = (e^{i phi} r1, 0) with phi = arg(m10)
    let r1 = pair_norm(m10, m20);
    let (h1, top) = if r1 == 0.0 {
        (CoreTransformation::identity(), ZERO)
    } else {
        let a10 = m10.norm();
        let phase = if a10 == 0.0 { ONE } else { m10 / a10 };
        (
            CoreTransformation { c: Complex64::new(a10 / r1, 0.0), s: m20 * phase.conj() / r1 },
            phase * r1,
        )
    };
    let (h2, _) = left_eliminator_or_identity(m00, top);

    // second column of H2^H H1^H M; H1 acts on frame rows (1,2), H2 on (0,1)
    let t1 = h1.c.conj() * m11 + h1.s.conj() * m21;
    let t2 = -h1.s * m11 + h1.c * m21;
    let u1 = -h2.s * m01 + h2.c * t1;

    let h3 = CoreTransformation::new(u1, t2).unwrap_or_default();
    (h1, h2, h3)
}

/// Refactors three cores in a V or Λ pattern into the opposite pattern.
///
/// Accepts positions `(p, p+1, p)` (returned as `(p+1, p, p+1)`) or
/// `(p+1, p, p+1)` (returned as `(p, p+1, p)`). The product of the outputs
/// equals the product of the inputs. The factorization is fixed by giving
/// the first output core a real nonnegative `c`.
pub fn turnover(
    g1: &PositionedCore,
    g2: &PositionedCore,
    g3: &PositionedCore,
) -> Result<(PositionedCore, PositionedCore, PositionedCore)> {
    let (p1, p2, p3) = (g1.position, g2.position, g3.position);
    if p1 == p3 && p2 == p1 + 1 {
        let (h1, h2, h3) = turnover_down(&g1.core, &g2.core, &g3.core);
        Ok((
            PositionedCore::new(h1, p2),
            PositionedCore::new(h2, p1),
            PositionedCore::new(h3, p2),
        ))
    } else if p1 == p3 && p1 == p2 + 1 && p2 >= 1 {
        let (h1, h2, h3) =
            turnover_down(&g1.core.flipped(), &g2.core.flipped(), &g3.core.flipped());
        Ok((
            PositionedCore::new(h1.flipped(), p2),
            PositionedCore::new(h2.flipped(), p1),
            PositionedCore::new(h3.flipped(), p2),
        ))
    } else {
        Err(Error::InvalidTurnoverPattern(p1, p2, p3))
    }
}
