//! Small dense linear algebra over a [`Real`] domain.

use crate::num::{Domain, Real};

pub type Matrix<R> = Vec<Vec<R>>;

/// Largest size for which determinants use cofactor expansion.
pub const COFACTOR_MAX: usize = 4;

pub fn identity<R: Real>(n: usize, d: &Domain) -> Matrix<R> {
    (0..n).map(|i| (0..n).map(|j| if i == j { R::one(d) } else { R::zero(d) }).collect()).collect()
}

fn minor<R: Real>(m: &Matrix<R>, row: usize, col: usize) -> Matrix<R> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

fn cofactor_det<R: Real>(m: &Matrix<R>, d: &Domain) -> R {
    match m.len() {
        0 => R::one(d),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        n => {
            let mut acc = R::zero(d);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let t = m[0][j].mul(&cofactor_det(&minor(m, 0, j), d));
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

/// In-place LU with partial pivoting; returns the row permutation sign, or
/// `None` when a zero pivot is met.
fn lu_in_place<R: Real>(a: &mut Matrix<R>) -> Option<bool> {
    let n = a.len();
    let mut odd = false;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if a[p][k].is_zero() {
            return None;
        }
        if p != k {
            a.swap(p, k);
            odd = !odd;
        }
        for i in k + 1..n {
            let f = a[i][k].div(&a[k][k]);
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = f.mul(&a[k][j]);
                a[i][j] = a[i][j].sub(&t);
            }
        }
    }
    Some(odd)
}

fn lu_det<R: Real>(m: &Matrix<R>, d: &Domain) -> R {
    let mut a = m.clone();
    match lu_in_place(&mut a) {
        None => R::zero(d),
        Some(odd) => {
            let mut acc = R::one(d);
            for (k, row) in a.iter().enumerate() {
                acc = acc.mul(&row[k]);
            }
            if odd {
                acc.neg()
            } else {
                acc
            }
        }
    }
}

/// Determinant: cofactor expansion up to [`COFACTOR_MAX`], LU beyond.
pub fn det<R: Real>(m: &Matrix<R>, d: &Domain) -> R {
    if m.len() <= COFACTOR_MAX {
        cofactor_det(m, d)
    } else {
        lu_det(m, d)
    }
}

/// Adjugate from minors, well defined for singular `m` as well.
pub fn adjugate<R: Real>(m: &Matrix<R>, d: &Domain) -> Matrix<R> {
    let n = m.len();
    if n == 1 {
        return vec![vec![R::one(d)]];
    }
    let mut adj = vec![vec![R::zero(d); n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = det(&minor(m, i, j), d);
            adj[j][i] = if (i + j) % 2 == 0 { c } else { c.neg() };
        }
    }
    adj
}

/// Solves `a x = b`; `None` for a numerically singular matrix.
pub fn solve<R: Real>(a: &Matrix<R>, b: &[R]) -> Option<Vec<R>> {
    let n = a.len();
    let mut m: Matrix<R> = a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect()).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if m[p][k].is_zero() {
            return None;
        }
        m.swap(p, k);
        for i in k + 1..n {
            let f = m[i][k].div(&m[k][k]);
            for j in k..=n {
                let t = f.mul(&m[k][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    let mut x = vec![m[0][0].sub(&m[0][0]); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc = acc.sub(&m[i][j].mul(&x[j]));
        }
        x[i] = acc.div(&m[i][i]);
    }
    Some(x)
}

pub fn max_abs<R: Real>(v: &[R]) -> f64 {
    v.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

/// Perron root and eigenvector of a nonnegative matrix by power iteration
/// on `A + I` (primitive whenever `A` is irreducible).  `transpose` selects
/// the left eigenvector.
pub fn perron(a: &[Vec<f64>], transpose: bool, tol: f64, max_iter: usize) -> Option<(f64, Vec<f64>)> {
    let n = a.len();
    let at = |i: usize, j: usize| if transpose { a[j][i] } else { a[i][j] };
    let mut x = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let mut y: Vec<f64> = (0..n).map(|i| x[i] + (0..n).map(|j| at(i, j) * x[j]).sum::<f64>()).collect();
        let s: f64 = y.iter().sum();
        if !(s.is_finite() && s > 0.0) {
            return None;
        }
        y.iter_mut().for_each(|v| *v /= s);
        let next = s - 1.0;
        let delta = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if delta < tol && (next - lambda).abs() < tol {
            return Some((next, x));
        }
        lambda = next;
    }
    None
}
