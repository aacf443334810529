//! Unitary upper Hessenberg matrices stored as a descending product of
//! core transformations, `U = U_1 U_2 ... U_{n-1}`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rotations::{fuse, turnover, CoreTransformation, PositionedCore};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which 2x2 block [`FactoredUnitary::corner_block`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockVariant {
    /// `[[u_{j,j-1}, u_{jj}], [0, u_{j+1,j}]]`, the B-side of a pole swap.
    Swap,
    /// `[[u_{jj}, u_{j,j+1}], [u_{j+1,j}, u_{j+1,j+1}]]`.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactoredUnitary {
    n: usize,
    cores: Vec<CoreTransformation>,
}

impl FactoredUnitary {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self { n, cores: vec![CoreTransformation::identity(); n - 1] })
    }

    /// Builds `U` from its `n - 1` cores, `cores[k]` acting on rows `(k+1, k+2)`.
    pub fn from_cores(cores: Vec<CoreTransformation>) -> Self {
        Self { n: cores.len() + 1, cores }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cores(&self) -> &[CoreTransformation] {
        &self.cores
    }

    /// Core at 1-based position `j`.
    pub fn core(&self, j: usize) -> CoreTransformation {
        self.cores[j - 1]
    }

    fn check_position(&self, j: usize) -> Result<()> {
        if j == 0 || j >= self.n {
            return Err(Error::PositionOutOfRange { position: j, dim: self.n });
        }
        Ok(())
    }

    #[inline]
    fn c_ext(&self, j: usize) -> Complex64 {
        // c_0 = c_n = 1
        if j == 0 || j >= self.n {
            ONE
        } else {
            self.cores[j - 1].c()
        }
    }

    /// `u_{ij}` (1-based) from the core parameters, in `O(j - i)`.
    pub fn entry(&self, i: usize, j: usize) -> Result<Complex64> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(Error::IndexOutOfRange { row: i, col: j, dim: self.n });
        }
        Ok(self.entry_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn entry_unchecked(&self, i: usize, j: usize) -> Complex64 {
        if i > j + 1 {
            return ZERO;
        }
        if i == j + 1 {
            return self.cores[j - 1].s();
        }
        let mut v = self.c_ext(i - 1).conj();
        for k in i..j {
            v *= -self.cores[k - 1].s().conj();
        }
        v * self.c_ext(j)
    }

    pub fn corner_block(&self, j: usize, variant: BlockVariant) -> Result<[[Complex64; 2]; 2]> {
        match variant {
            BlockVariant::Swap => {
                if j < 2 || j + 1 > self.n {
                    return Err(Error::PositionOutOfRange { position: j, dim: self.n });
                }
                Ok([
                    [self.cores[j - 2].s(), self.entry_unchecked(j, j)],
                    [ZERO, self.cores[j - 1].s()],
                ])
            }
            BlockVariant::Full => {
                self.check_position(j)?;
                Ok([
                    [self.entry_unchecked(j, j), self.entry_unchecked(j, j + 1)],
                    [self.entry_unchecked(j + 1, j), self.entry_unchecked(j + 1, j + 1)],
                ])
            }
        }
    }

    /// `U <- q U` for a core `q` at position 1.
    pub fn absorb_left_at(&mut self, q: &PositionedCore) -> Result<()> {
        if q.position != 1 || self.n < 2 {
            return Err(Error::PositionOutOfRange { position: q.position, dim: self.n });
        }
        self.cores[0] = fuse(&q.core, &self.cores[0]);
        Ok(())
    }

    /// `U <- U z` for a core `z` at position `n - 1`.
    pub fn absorb_right_at(&mut self, z: &PositionedCore) -> Result<()> {
        if self.n < 2 || z.position != self.n - 1 {
            return Err(Error::PositionOutOfRange { position: z.position, dim: self.n });
        }
        let k = self.n - 2;
        self.cores[k] = fuse(&self.cores[k], &z.core);
        Ok(())
    }

    /// `U <- q U` for a core `q` at position `p`, where the core at `p - 1`
    /// (if any) is deflated, i.e. a diagonal phase `diag(d, conj(d))`.
    ///
    /// `q` is moved past that diagonal by conjugation, which only rotates
    /// the phase of its `s` parameter.
    pub fn absorb_left_in_window(&mut self, q: &PositionedCore) -> Result<()> {
        let p = q.position;
        self.check_position(p)?;
        if p == 1 {
            return self.absorb_left_at(q);
        }
        let above = self.cores[p - 2];
        if above.s() != ZERO {
            return Err(Error::BoundaryNotDeflated(p - 1));
        }
        let moved = q.core.with_s_rotated(above.c().conj());
        self.cores[p - 1] = fuse(&moved, &self.cores[p - 1]);
        Ok(())
    }

    /// `U <- U z` for a core `z` at position `p`, where the core at `p + 1`
    /// (if any) is a deflated diagonal phase.
    pub fn absorb_right_in_window(&mut self, z: &PositionedCore) -> Result<()> {
        let p = z.position;
        self.check_position(p)?;
        if p == self.n - 1 {
            return self.absorb_right_at(z);
        }
        let below = self.cores[p];
        if below.s() != ZERO {
            return Err(Error::BoundaryNotDeflated(p + 1));
        }
        let moved = z.core.with_s_rotated(below.c());
        self.cores[p - 1] = fuse(&self.cores[p - 1], &moved);
        Ok(())
    }

    /// Given `z` at position `k`, refactors `U z = q U'` and returns `q`
    /// (at position `k + 1`); `U` is replaced by `U'`.
    pub fn pass_right_to_left(&mut self, z: &PositionedCore) -> Result<PositionedCore> {
        let k = z.position;
        if k == 0 || k + 2 > self.n {
            return Err(Error::PositionOutOfRange { position: k, dim: self.n });
        }
        let (q, a, b) = turnover(
            &PositionedCore::new(self.cores[k - 1], k),
            &PositionedCore::new(self.cores[k], k + 1),
            z,
        )?;
        self.cores[k - 1] = a.core;
        self.cores[k] = b.core;
        Ok(q)
    }

    /// Given `q` at position `k + 1`, refactors `q U = U' z` and returns `z`
    /// (at position `k`); `U` is replaced by `U'`.
    pub fn pass_left_to_right(&mut self, q: &PositionedCore) -> Result<PositionedCore> {
        let p = q.position;
        if p < 2 || p + 1 > self.n {
            return Err(Error::PositionOutOfRange { position: p, dim: self.n });
        }
        let k = p - 1;
        // (q U_k U_{k+1})^H = U_{k+1}^H U_k^H q^H = z^H U'_{k+1}^H U'_k^H, so the
        // emitted core comes out first and inherits the turnover's gauge
        let (zh, bh, ah) = turnover(
            &PositionedCore::new(self.cores[k].inverse(), k + 1),
            &PositionedCore::new(self.cores[k - 1].inverse(), k),
            &q.inverse(),
        )?;
        self.cores[k - 1] = ah.core.inverse();
        self.cores[k] = bh.core.inverse();
        Ok(zh.inverse())
    }

    /// Drops `s_j`, keeping the phase of `c_j`.
    pub fn deflate_core(&mut self, j: usize) -> Result<()> {
        self.check_position(j)?;
        let c = self.cores[j - 1].c();
        let r = c.norm();
        assert!(r > 0.0, "deflating core {j} with |c| = 0");
        self.cores[j - 1] = CoreTransformation::from_parts_unchecked(c / r, ZERO);
        Ok(())
    }

    pub fn materialize(&self) -> Array2<Complex64> {
        let mut m = Array2::eye(self.n);
        for (k, core) in self.cores.iter().enumerate() {
            // U_1 ... U_k only touches the leading (k+2) rows
            PositionedCore::new(*core, k + 1)
                .apply_right_rows(&mut m, false, 0..(k + 2).min(self.n))
                .expect("core position within dimension");
        }
        m
    }
}
