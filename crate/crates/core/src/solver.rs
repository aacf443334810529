//! Rational QR iteration on the pencil `(A, U)` and a single-shift Francis QR
//! baseline on `A` alone.
//!
//! Both solvers share the deflation scan and the 2x2 terminal path. One
//! iteration is one full sweep over the active block; direct 2x2
//! terminations are not counted.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moves::{move_type1_bottom, move_type1_top, move_type2_swap, TransformRecorder};
use crate::pencil::{HessenbergPencil, ProjectiveValue, ResidualStats};
use crate::rotations::{left_eliminator, PositionedCore};
use crate::unitary::{BlockVariant, FactoredUnitary};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftStrategy {
    RayleighQuotient,
    #[default]
    Wilkinson,
}

/// Relative deflation threshold `factor * eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflationCriterion {
    factor: f64,
}

impl DeflationCriterion {
    pub fn new(factor: f64) -> Option<Self> {
        (factor > 0.0 && factor.is_finite()).then_some(Self { factor })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    fn threshold(&self) -> f64 {
        self.factor * f64::EPSILON
    }
}

impl Default for DeflationCriterion {
    fn default() -> Self {
        Self { factor: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub strategy: ShiftStrategy,
    pub criterion: DeflationCriterion,
    pub max_sweeps_per_eig: usize,
    pub record: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            strategy: ShiftStrategy::Wilkinson,
            criterion: DeflationCriterion::default(),
            max_sweeps_per_eig: 30,
            record: false,
        }
    }
}

impl SolveOptions {
    pub fn recorded() -> Self {
        Self { record: true, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Rqr,
    Qr,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Rqr => "rqr",
            Algorithm::Qr => "qr",
        }
    }

    pub fn solve(&self, a: Array2<Complex64>, opts: &SolveOptions) -> Result<SolveReport> {
        match self {
            Algorithm::Rqr => rqr_solve(a, opts),
            Algorithm::Qr => qr_solve(a, opts),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rqr" => Ok(Algorithm::Rqr),
            "qr" => Ok(Algorithm::Qr),
            other => Err(format!("unknown algorithm '{other}' (expected rqr or qr)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iterations",
        }
    }
}

/// A subdiagonal position set to zero, with the sweep count at that moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeflationEvent {
    pub position: usize,
    pub sweep: usize,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    /// Eigenvalues in the order they were split off.
    pub eigenvalues: Vec<ProjectiveValue>,
    /// Diagonal position (1-based) each eigenvalue was read from.
    pub positions: Vec<usize>,
    pub iterations: usize,
    pub swaps: usize,
    pub deflations: Vec<DeflationEvent>,
    pub status: SolveStatus,
    pub residuals: ResidualStats,
    /// Bottom poles that came out infinite.
    pub infinite_poles: usize,
    /// Type I moves skipped because the insertion vector vanished.
    pub degenerate_moves: usize,
    /// Final `A` (block upper triangular, 2x2 blocks left in place).
    pub a: Array2<Complex64>,
    /// Final `U` (the identity for the QR baseline).
    pub u: FactoredUnitary,
    pub q: Option<Array2<Complex64>>,
    pub z: Option<Array2<Complex64>>,
}

impl SolveReport {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn iters_per_n(&self) -> f64 {
        self.iterations as f64 / self.dim() as f64
    }

    /// Finite eigenvalues as complex numbers; infinite ones are `None`.
    pub fn values(&self) -> Vec<Option<Complex64>> {
        self.eigenvalues.iter().map(|v| v.value()).collect()
    }
}

fn max_abs(m: &[[Complex64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

fn det2(m: &[[Complex64; 2]; 2]) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Roots of `det(A2 - λ B2)`, returned projectively.
pub fn eig2x2_pencil(
    a2: &[[Complex64; 2]; 2],
    b2: &[[Complex64; 2]; 2],
) -> Result<(ProjectiveValue, ProjectiveValue)> {
    if a2[1][0] == ZERO && b2[1][0] == ZERO {
        let first = ProjectiveValue::new(a2[0][0], b2[0][0]).map_err(|_| Error::SingularPencil)?;
        let second = ProjectiveValue::new(a2[1][1], b2[1][1]).map_err(|_| Error::SingularPencil)?;
        return Ok((first, second));
    }
    let sa = max_abs(a2);
    let sb = max_abs(b2);
    if sa == 0.0 && sb == 0.0 {
        return Err(Error::SingularPencil);
    }
    let ka = if sa > 0.0 { sa } else { 1.0 };
    let kb = if sb > 0.0 { sb } else { 1.0 };
    let a = a2.map(|row| row.map(|z| z / ka));
    let b = b2.map(|row| row.map(|z| z / kb));

    let det_a = det2(&a);
    let det_b = det2(&b);
    let mid = a[0][0] * b[1][1] + a[1][1] * b[0][0] - a[0][1] * b[1][0] - a[1][0] * b[0][1];
    // det_b α² - mid αβ + det_a β² = 0
    let disc = (mid * mid - 4.0 * det_a * det_b).sqrt();
    let plus = (mid + disc) * 0.5;
    let minus = (mid - disc) * 0.5;
    let q = if plus.norm() >= minus.norm() { plus } else { minus };

    let (first, second) = if q == ZERO {
        // mid = 0 and det_a det_b = 0: a double root at 0 or at infinity
        if det_a != ZERO {
            ((ONE, ZERO), (ONE, ZERO))
        } else if det_b != ZERO {
            ((ZERO, ONE), (ZERO, ONE))
        } else {
            return Err(Error::SingularPencil);
        }
    } else {
        ((q, det_b), (det_a, q))
    };
    let unscale = |(num, den): (Complex64, Complex64)| {
        ProjectiveValue::new(num * ka, den * kb).map_err(|_| Error::SingularPencil)
    };
    Ok((unscale(first)?, unscale(second)?))
}

fn closer(
    roots: (ProjectiveValue, ProjectiveValue),
    target: &ProjectiveValue,
) -> ProjectiveValue {
    if roots.1.distance_to(target) < roots.0.distance_to(target) {
        roots.1
    } else {
        roots.0
    }
}

fn diagonal_ratio(p: &HessenbergPencil, i: usize) -> Result<ProjectiveValue> {
    ProjectiveValue::new(p.a_entry(i, i), p.u.entry_unchecked(i, i))
}

fn full_a_block(p: &HessenbergPencil, j: usize) -> [[Complex64; 2]; 2] {
    [
        [p.a_entry(j, j), p.a_entry(j, j + 1)],
        [p.a_entry(j + 1, j), p.a_entry(j + 1, j + 1)],
    ]
}

/// Shift for the top insertion, taken from the trailing 2x2 of the window.
pub fn wilkinson_shift(p: &HessenbergPencil, strategy: ShiftStrategy) -> Result<ProjectiveValue> {
    let (lo, hi) = p.window();
    if hi < lo + 1 {
        return Err(Error::WindowTooSmall);
    }
    let target = diagonal_ratio(p, hi)?;
    if strategy == ShiftStrategy::RayleighQuotient {
        return Ok(target);
    }
    let b2 = p.u.corner_block(hi - 1, BlockVariant::Full)?;
    Ok(closer(eig2x2_pencil(&full_a_block(p, hi - 1), &b2)?, &target))
}

/// Pole for the bottom insertion, taken from the leading 2x2 of the window.
pub fn wilkinson_pole(p: &HessenbergPencil, strategy: ShiftStrategy) -> Result<ProjectiveValue> {
    let (lo, hi) = p.window();
    if hi < lo + 1 {
        return Err(Error::WindowTooSmall);
    }
    let target = diagonal_ratio(p, lo)?;
    if strategy == ShiftStrategy::RayleighQuotient {
        return Ok(target);
    }
    let b2 = p.u.corner_block(lo, BlockVariant::Full)?;
    Ok(closer(eig2x2_pencil(&full_a_block(p, lo), &b2)?, &target))
}

fn negligible(value: f64, scale: f64, tol: f64, floor: f64) -> bool {
    value <= (tol * scale).max(floor)
}

/// Zeroes every negligible subdiagonal pair in rows `1..=hi` and moves the
/// window top to the start of the bottom-most unreduced block.
///
/// Returns the newly deflated positions.
pub fn deflation_scan(p: &mut HessenbergPencil, criterion: &DeflationCriterion) -> Vec<usize> {
    let n = p.dim();
    let (_, hi) = p.window();
    let tol = criterion.threshold();
    let floor = f64::MIN_POSITIVE * (n as f64 / f64::EPSILON);
    let mut deflated = Vec::new();
    let mut lo = 1;
    for j in 1..hi {
        let sub = p.a_entry(j + 1, j);
        let s = p.u.core(j).s();
        if sub == ZERO && s == ZERO {
            lo = j + 1;
            continue;
        }
        let mut tst = p.a_entry(j, j).norm() + p.a_entry(j + 1, j + 1).norm();
        if tst == 0.0 {
            if j > 1 {
                tst += p.a_entry(j, j - 1).norm();
            }
            if j + 2 <= n {
                tst += p.a_entry(j + 2, j + 1).norm();
            }
        }
        let tst_u = p.u.entry_unchecked(j, j).norm() + p.u.entry_unchecked(j + 1, j + 1).norm();
        if negligible(sub.norm(), tst, tol, floor) && negligible(s.norm(), tst_u, tol, floor) {
            p.a[[j, j - 1]] = ZERO;
            p.u.deflate_core(j).expect("position within window");
            deflated.push(j);
            lo = j + 1;
        }
    }
    p.lo = lo;
    deflated
}

struct Progress {
    eigenvalues: Vec<ProjectiveValue>,
    positions: Vec<usize>,
    deflations: Vec<DeflationEvent>,
    iterations: usize,
    since_emission: usize,
}

impl Progress {
    fn new(n: usize) -> Self {
        Self {
            eigenvalues: Vec::with_capacity(n),
            positions: Vec::with_capacity(n),
            deflations: Vec::new(),
            iterations: 0,
            since_emission: 0,
        }
    }

    fn emit(&mut self, value: ProjectiveValue, position: usize) {
        self.eigenvalues.push(value);
        self.positions.push(position);
        self.since_emission = 0;
    }

    /// Harvests a converged bottom block of size 1 or 2; returns false if the
    /// block still needs sweeps.
    fn harvest(&mut self, p: &mut HessenbergPencil) -> Result<bool> {
        let (lo, hi) = p.window();
        match hi + 1 - lo {
            1 => {
                self.emit(p.extract_eigenvalue(hi)?, hi);
            }
            2 => {
                let b2 = p.u.corner_block(lo, BlockVariant::Full)?;
                let (first, second) = eig2x2_pencil(&full_a_block(p, lo), &b2)?;
                self.emit(first, lo);
                self.emit(second, hi);
            }
            _ => return Ok(false),
        }
        p.lo = 1;
        p.hi = lo - 1;
        Ok(true)
    }
}

fn finish(
    algorithm: Algorithm,
    p: HessenbergPencil,
    progress: Progress,
    status: SolveStatus,
    counters: (usize, usize, usize),
    rec: TransformRecorder,
) -> SolveReport {
    let residuals = *p.residuals();
    let (a, u) = p.into_parts();
    let (q, z) = match rec.into_parts() {
        Some((q, z)) => (Some(q), Some(z)),
        None => (None, None),
    };
    SolveReport {
        algorithm,
        eigenvalues: progress.eigenvalues,
        positions: progress.positions,
        iterations: progress.iterations,
        swaps: counters.0,
        deflations: progress.deflations,
        status,
        residuals,
        infinite_poles: counters.1,
        degenerate_moves: counters.2,
        a,
        u,
        q,
        z,
    }
}

fn recorder(n: usize, opts: &SolveOptions) -> TransformRecorder {
    if opts.record {
        TransformRecorder::enabled(n)
    } else {
        TransformRecorder::disabled()
    }
}

/// Shared outer loop: deflate, harvest small blocks, otherwise sweep.
fn drive<F>(
    algorithm: Algorithm,
    mut p: HessenbergPencil,
    opts: &SolveOptions,
    mut rec: TransformRecorder,
    mut sweep: F,
) -> SolveReport
where
    F: FnMut(&mut HessenbergPencil, &mut TransformRecorder) -> Result<()>,
{
    let n = p.dim();
    let mut progress = Progress::new(n);
    let mut status = SolveStatus::Converged;
    let mut failed_sweeps = 0;
    p.hi = n;
    while p.hi >= 1 {
        for position in deflation_scan(&mut p, &opts.criterion) {
            progress.deflations.push(DeflationEvent { position, sweep: progress.iterations });
        }
        if progress.harvest(&mut p).expect("deflated block yields eigenvalues") {
            continue;
        }
        let (lo, hi) = p.window();
        if progress.since_emission >= opts.max_sweeps_per_eig * (hi + 1 - lo) {
            status = SolveStatus::MaxIterations;
            break;
        }
        progress.iterations += 1;
        progress.since_emission += 1;
        if sweep(&mut p, &mut rec).is_err() {
            // a pair became exactly deflatable mid-sweep; the next scan takes it
            failed_sweeps += 1;
        }
    }
    finish(algorithm, p, progress, status, (0, 0, failed_sweeps), rec)
}

/// Rational QR iteration. `a` must be upper Hessenberg.
pub fn rqr_solve(a: Array2<Complex64>, opts: &SolveOptions) -> Result<SolveReport> {
    let p = HessenbergPencil::from_hessenberg(a)?;
    let rec = recorder(p.dim(), opts);
    let strategy = opts.strategy;
    let mut swaps = 0;
    let mut infinite = 0;
    let mut degenerate = 0;
    let mut report = drive(Algorithm::Rqr, p, opts, rec, |p, rec| {
        let (lo, hi) = p.window();
        let rho = wilkinson_shift(p, strategy)?;
        if move_type1_top(p, &rho, rec)? == crate::moves::MoveOutcome::Degenerate {
            degenerate += 1;
        }
        for j in (lo + 1)..hi {
            move_type2_swap(p, j, rec)?;
            swaps += 1;
        }
        let tau = wilkinson_pole(p, strategy)?;
        if tau.is_infinite() {
            infinite += 1;
        }
        if move_type1_bottom(p, &tau, rec)? == crate::moves::MoveOutcome::Degenerate {
            degenerate += 1;
        }
        Ok(())
    });
    report.swaps = swaps;
    report.infinite_poles = infinite;
    report.degenerate_moves += degenerate;
    Ok(report)
}

/// Single-shift implicit QR (Francis) iteration on `A`; `Q = Z` in the report.
pub fn qr_solve(a: Array2<Complex64>, opts: &SolveOptions) -> Result<SolveReport> {
    let p = HessenbergPencil::from_hessenberg(a)?;
    let n = p.dim();
    let rec = recorder(n, opts);
    let strategy = opts.strategy;
    let report = drive(Algorithm::Qr, p, opts, rec, |p, rec| {
        let (lo, hi) = p.window();
        let mu = wilkinson_shift(p, strategy)?.value().ok_or(Error::SingularPencil)?;
        let mut g = match left_eliminator(p.a_entry(lo, lo) - mu, p.a_entry(lo + 1, lo)) {
            Ok((g, _)) => PositionedCore::new(g, lo),
            Err(_) => return Ok(()),
        };
        for k in lo..hi {
            if k > lo {
                g = match left_eliminator(p.a_entry(k, k - 1), p.a_entry(k + 1, k - 1)) {
                    Ok((g, _)) => PositionedCore::new(g, k),
                    Err(_) => PositionedCore::identity(k),
                };
            }
            g.apply_left_cols(&mut p.a, true, (k.max(2) - 2)..n)?;
            if k > lo {
                p.a[[k, k - 2]] = ZERO;
            }
            g.apply_right_rows(&mut p.a, false, 0..(k + 2).min(hi))?;
            rec.left(&g);
            rec.right(&g);
        }
        Ok(())
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotations::CoreTransformation;
    use ndarray::array;

    const EPS: f64 = f64::EPSILON;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2(m: [[f64; 2]; 2]) -> [[Complex64; 2]; 2] {
        m.map(|row| row.map(|x| cx(x, 0.0)))
    }

    fn near(v: &ProjectiveValue, z: Complex64, tol: f64) -> bool {
        v.value().is_some_and(|w| (w - z).norm() <= tol)
    }

    #[test]
    fn eig2x2_examples() {
        let id = m2([[1.0, 0.0], [0.0, 1.0]]);
        let (r1, r2) = eig2x2_pencil(&m2([[4.0, 1.0], [1.0, 2.0]]), &id).unwrap();
        let (hi, lo) = (cx(3.0 + 2f64.sqrt(), 0.0), cx(3.0 - 2f64.sqrt(), 0.0));
        assert!(
            (near(&r1, hi, 8.0 * EPS) && near(&r2, lo, 8.0 * EPS))
                || (near(&r1, lo, 8.0 * EPS) && near(&r2, hi, 8.0 * EPS))
        );

        let (r1, r2) =
            eig2x2_pencil(&m2([[1.0, 0.0], [0.0, 2.0]]), &m2([[1.0, 0.0], [0.0, 0.0]])).unwrap();
        assert_eq!(r1.value(), Some(cx(1.0, 0.0)));
        assert!(r2.is_infinite());

        let (r1, r2) = eig2x2_pencil(&m2([[-3.0, 0.0], [0.0, 5.0]]), &id).unwrap();
        assert!(near(&r1, cx(-3.0, 0.0), 8.0 * EPS) && near(&r2, cx(5.0, 0.0), 8.0 * EPS));
    }

    #[test]
    fn eig2x2_singular_and_infinite() {
        let zero = m2([[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(eig2x2_pencil(&zero, &zero), Err(Error::SingularPencil));
        // singular B, non-triangular A: one finite root, one infinite
        let a = m2([[1.0, 2.0], [3.0, 4.0]]);
        let b = m2([[1.0, 0.0], [0.0, 0.0]]);
        let (r1, r2) = eig2x2_pencil(&a, &b).unwrap();
        let (fin, inf) = if r1.is_infinite() { (r2, r1) } else { (r1, r2) };
        assert!(inf.is_infinite());
        // det(A - λB) = -2 - 4λ
        assert!(near(&fin, cx(-0.5, 0.0), 8.0 * EPS));
        // det(A - λB) = -2 for B of all ones: both roots infinite
        let (r1, r2) = eig2x2_pencil(&a, &m2([[1.0, 1.0], [1.0, 1.0]])).unwrap();
        assert!(r1.is_infinite() && r2.is_infinite());
    }

    #[test]
    fn eig2x2_roots_satisfy_characteristic_polynomial() {
        let mut st = 3u64;
        let mut next = || {
            st = st.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((st >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..500 {
            let a = [[cx(next(), next()), cx(next(), next())], [cx(next(), next()), cx(next(), next())]];
            let b = [[cx(next(), next()), cx(next(), next())], [cx(next(), next()), cx(next(), next())]];
            let (r1, r2) = eig2x2_pencil(&a, &b).unwrap();
            for r in [r1, r2] {
                let (al, be) = (r.num(), r.den());
                let m = [
                    [be * a[0][0] - al * b[0][0], be * a[0][1] - al * b[0][1]],
                    [be * a[1][0] - al * b[1][0], be * a[1][1] - al * b[1][1]],
                ];
                let scale = max_abs(&a) + max_abs(&b);
                assert!(det2(&m).norm() <= 1e-13 * scale * scale);
            }
        }
    }

    #[test]
    fn shift_and_pole_selection() {
        let a = array![[cx(4.0, 0.0), cx(1.0, 0.0)], [cx(1.0, 0.0), cx(2.0, 0.0)]];
        let p = HessenbergPencil::from_hessenberg(a).unwrap();
        let want = cx(3.0 - 2f64.sqrt(), 0.0);
        assert!(near(&wilkinson_shift(&p, ShiftStrategy::Wilkinson).unwrap(), want, 8.0 * EPS));
        assert_eq!(
            wilkinson_shift(&p, ShiftStrategy::RayleighQuotient).unwrap().value(),
            Some(cx(2.0, 0.0))
        );
        // pole targets a_11 = 4
        let want = cx(3.0 + 2f64.sqrt(), 0.0);
        assert!(near(&wilkinson_pole(&p, ShiftStrategy::Wilkinson).unwrap(), want, 8.0 * EPS));
        assert_eq!(
            wilkinson_pole(&p, ShiftStrategy::RayleighQuotient).unwrap().value(),
            Some(cx(4.0, 0.0))
        );

        let a = array![[cx(1.0, 0.0), cx(5.0, 0.0)], [cx(0.0, 0.0), cx(7.0, 0.0)]];
        let p = HessenbergPencil::from_hessenberg(a).unwrap();
        assert_eq!(wilkinson_shift(&p, ShiftStrategy::Wilkinson).unwrap().value(), Some(cx(7.0, 0.0)));
        assert_eq!(wilkinson_pole(&p, ShiftStrategy::Wilkinson).unwrap().value(), Some(cx(1.0, 0.0)));
    }

    #[test]
    fn deflation_is_conjunctive() {
        let a = array![[cx(1.0, 0.0), cx(1.0, 0.0)], [cx(1e-20, 0.0), cx(2.0, 0.0)]];
        let s = CoreTransformation::new(cx(0.6, 0.0), cx(0.8, 0.0)).unwrap();
        let mut p = HessenbergPencil::from_parts(a.clone(), FactoredUnitary::from_cores(vec![s])).unwrap();
        assert!(deflation_scan(&mut p, &DeflationCriterion::default()).is_empty());
        assert_eq!(p.window(), (1, 2));

        let mut p = HessenbergPencil::from_hessenberg(a).unwrap();
        assert_eq!(deflation_scan(&mut p, &DeflationCriterion::default()), vec![1]);
        assert_eq!(p.window(), (2, 2));
        assert_eq!(p.a_entry(2, 1), ZERO);
    }

    #[test]
    fn deflation_full_on_triangular_with_phase_cores() {
        let n = 5;
        let a = Array2::from_shape_fn((n, n), |(i, j)| {
            if i > j {
                ZERO
            } else {
                cx(1.0 + i as f64, j as f64 - 0.5)
            }
        });
        let cores = (0..n - 1)
            .map(|k| CoreTransformation::new(Complex64::from_polar(1.0, 0.3 * k as f64 + 0.1), ZERO).unwrap())
            .collect();
        let u = FactoredUnitary::from_cores(cores);
        let dense_u = u.materialize();
        let mut p = HessenbergPencil::from_parts(a.clone(), u).unwrap();
        // exact zeros are already split, so nothing is newly deflated
        assert!(deflation_scan(&mut p, &DeflationCriterion::default()).is_empty());
        assert_eq!(p.window(), (n, n));
        for i in 1..=n {
            let v = p.extract_eigenvalue(i).unwrap().value().unwrap();
            let want = a[[i - 1, i - 1]] / dense_u[[i - 1, i - 1]];
            assert!((v - want).norm() <= 4.0 * EPS * want.norm());
        }
    }

    #[test]
    fn deflation_scan_marks_tiny_pairs() {
        let n = 4;
        let a = Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j + 1 {
                cx(1e-18, 0.0)
            } else if i > j {
                ZERO
            } else {
                cx(1.0, (i + j) as f64)
            }
        });
        let cores = (0..n - 1)
            .map(|_| CoreTransformation::new(ONE, cx(1e-18, 0.0)).unwrap())
            .collect();
        let mut p = HessenbergPencil::from_parts(a, FactoredUnitary::from_cores(cores)).unwrap();
        assert_eq!(deflation_scan(&mut p, &DeflationCriterion::default()), vec![1, 2, 3]);
        assert_eq!(p.window(), (4, 4));
        assert!(p.u().core(2).is_identity());
    }

    #[test]
    fn triangular_input_takes_no_sweeps() {
        let a = array![
            [cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)],
            [ZERO, cx(4.0, 1.0), cx(5.0, 0.0)],
            [ZERO, ZERO, cx(-6.0, 0.0)]
        ];
        for solve in [rqr_solve, qr_solve] {
            let r = solve(a.clone(), &SolveOptions::default()).unwrap();
            assert!(r.converged());
            assert_eq!(r.iterations, 0);
            let mut vals: Vec<_> = r.values().into_iter().map(Option::unwrap).collect();
            vals.sort_by(|x, y| x.re.total_cmp(&y.re));
            assert_eq!(vals, vec![cx(-6.0, 0.0), cx(1.0, 0.0), cx(4.0, 1.0)]);
        }
    }

    #[test]
    fn swap_matrix_solved_directly() {
        let a = array![[ZERO, ONE], [ONE, ZERO]];
        for solve in [rqr_solve, qr_solve] {
            let r = solve(a.clone(), &SolveOptions::default()).unwrap();
            assert_eq!(r.iterations, 0);
            let mut vals: Vec<_> = r.values().into_iter().map(|v| v.unwrap().re).collect();
            vals.sort_by(f64::total_cmp);
            assert!((vals[0] + 1.0).abs() <= 4.0 * EPS && (vals[1] - 1.0).abs() <= 4.0 * EPS);
        }
    }

    #[test]
    fn one_by_one() {
        let a = array![[cx(2.5, -1.0)]];
        let r = rqr_solve(a, &SolveOptions::recorded()).unwrap();
        assert_eq!(r.values(), vec![Some(cx(2.5, -1.0))]);
        assert_eq!(r.positions, vec![1]);
    }

    #[test]
    fn solvers_agree_on_small_hessenberg() {
        let n = 8;
        let a = Array2::from_shape_fn((n, n), |(i, j)| {
            if i > j + 1 {
                ZERO
            } else {
                cx(((3 * i + 7 * j) % 11) as f64 - 5.0, ((i * j) % 5) as f64 - 2.0)
            }
        });
        let r = rqr_solve(a.clone(), &SolveOptions::recorded()).unwrap();
        let q = qr_solve(a.clone(), &SolveOptions::recorded()).unwrap();
        assert!(r.converged() && q.converged());
        assert_eq!(r.eigenvalues.len(), n);
        let tol = 1e-9 * crate::pencil::frobenius(&a);
        for v in r.values() {
            let v = v.unwrap();
            let best = q.values().iter().map(|w| (w.unwrap() - v).norm()).fold(f64::INFINITY, f64::min);
            assert!(best <= tol, "unmatched eigenvalue {v}");
        }
    }

    #[test]
    fn sweep_cap_reports_non_convergence() {
        let n = 6;
        let a = Array2::from_shape_fn((n, n), |(i, j)| if i > j + 1 { ZERO } else { cx((i + j + 2) as f64, 0.0) });
        let opts = SolveOptions { max_sweeps_per_eig: 0, ..SolveOptions::default() };
        let r = rqr_solve(a, &opts).unwrap();
        assert_eq!(r.status, SolveStatus::MaxIterations);
        assert!(r.eigenvalues.len() < n);
    }
}
