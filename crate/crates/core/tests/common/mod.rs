#![allow(dead_code)]

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rqr::matio::reduce_to_hessenberg;
use rqr::pencil::frobenius;
use rqr::solver::{qr_solve, SolveOptions};

pub const EPS: f64 = f64::EPSILON;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn adjoint(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

pub fn eye(n: usize) -> Array2<Complex64> {
    Array2::eye(n)
}

/// Eigenvalues of a dense matrix through the Francis QR baseline.
pub fn dense_eigenvalues(m: &Array2<Complex64>) -> Vec<Complex64> {
    let r = qr_solve(reduce_to_hessenberg(m.clone()), &SolveOptions::default()).unwrap();
    assert!(r.converged());
    r.values().into_iter().map(|v| v.unwrap()).collect()
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns `assign[i] = j`.
pub fn min_cost_matching(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Largest pairwise distance under the matching that minimises the summed
/// distances. Both inputs must have the same length.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let assign = min_cost_matching(&cost);
    assign.iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max)
}

/// Solves `m x = b` by Gaussian elimination with partial pivoting. Pivots
/// below `tiny` are replaced by `tiny`, as inverse iteration wants.
pub fn lu_solve(m: &Array2<Complex64>, b: &Array1<Complex64>, tiny: f64) -> Array1<Complex64> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut x = b.clone();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[[i, k]].norm().total_cmp(&a[[j, k]].norm())).unwrap();
        if piv != k {
            for j in 0..n {
                a.swap([k, j], [piv, j]);
            }
            x.swap(k, piv);
        }
        if a[[k, k]].norm() < tiny {
            a[[k, k]] = cx(tiny, 0.0);
        }
        for i in (k + 1)..n {
            let f = a[[i, k]] / a[[k, k]];
            if f == cx(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let t = a[[k, j]];
                a[[i, j]] -= f * t;
            }
            let t = x[k];
            x[i] -= f * t;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s -= a[[k, j]] * x[j];
        }
        x[k] = s / a[[k, k]];
    }
    x
}

fn vnorm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Residual `||A v - λ v||` of the unit vector found by inverse iteration.
pub fn inverse_iteration_residual(a: &Array2<Complex64>, lambda: Complex64) -> f64 {
    let n = a.nrows();
    let shifted = a - &(eye(n) * lambda);
    let mut v = Array1::from_shape_fn(n, |i| cx(1.0, 0.3 * i as f64) / n as f64);
    let mut best = f64::INFINITY;
    let tiny = EPS * frobenius(a).max(f64::MIN_POSITIVE);
    for _ in 0..3 {
        let w = lu_solve(&shifted, &v, tiny);
        let nw = vnorm(&w);
        if !nw.is_finite() || nw == 0.0 {
            break;
        }
        v = w.mapv(|z| z / nw);
        best = best.min(vnorm(&(a.dot(&v) - v.mapv(|z| z * lambda))));
    }
    best
}
