//! Bordered tridiagonal linear systems.
//!
//! The Newton matrices of the scheme have a tridiagonal core (the
//! concentration unknowns) coupled to a handful of dense border rows and
//! columns (interface positions and width). They are solved by block
//! elimination: one pivoted tridiagonal factorization, `k + 1` tridiagonal
//! solves, and a `k x k` Schur complement. A dense LU of the assembled
//! matrix is used when the block route breaks down.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Matrix of the form
///
/// ```text
/// [ T  B ]
/// [ C  D ]
/// ```
///
/// with `T` tridiagonal of order `n`, `B` of size `n x k`, `C` of size
/// `k x n` and `D` of size `k x k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderedMatrix {
    pub(crate) sub: Vec<f64>,
    pub(crate) diag: Vec<f64>,
    pub(crate) sup: Vec<f64>,
    /// Columns of `B`, each of length `n`.
    pub(crate) right: Vec<Vec<f64>>,
    /// Rows of `C`, each of length `n`.
    pub(crate) bottom: Vec<Vec<f64>>,
    /// `D`, row major.
    pub(crate) corner: Vec<Vec<f64>>,
}

impl BorderedMatrix {
    pub fn zeros(n: usize, k: usize) -> Self {
        Self {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
            right: vec![vec![0.0; n]; k],
            bottom: vec![vec![0.0; n]; k],
            corner: vec![vec![0.0; k]; k],
        }
    }

    pub fn core_dim(&self) -> usize {
        self.diag.len()
    }

    pub fn border_dim(&self) -> usize {
        self.corner.len()
    }

    pub fn dim(&self) -> usize {
        self.core_dim() + self.border_dim()
    }

    /// Adds `value` at `(row, col)` of the full matrix. Entries outside the
    /// stored pattern panic.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let n = self.core_dim();
        match (row < n, col < n) {
            (true, true) => {
                if row == col {
                    self.diag[row] += value;
                } else if col + 1 == row {
                    self.sub[col] += value;
                } else if row + 1 == col {
                    self.sup[row] += value;
                } else {
                    panic!("entry ({row}, {col}) outside the tridiagonal core");
                }
            }
            (true, false) => self.right[col - n][row] += value,
            (false, true) => self.bottom[row - n][col] += value,
            (false, false) => self.corner[row - n][col - n] += value,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.core_dim();
        let k = self.border_dim();
        let mut m = DMatrix::zeros(n + k, n + k);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.sub[i];
                m[(i, i + 1)] = self.sup[i];
            }
        }
        for j in 0..k {
            for i in 0..n {
                m[(i, n + j)] = self.right[j][i];
                m[(n + j, i)] = self.bottom[j][i];
            }
            for l in 0..k {
                m[(n + j, n + l)] = self.corner[j][l];
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.core_dim();
        let k = self.border_dim();
        let mut y = vec![0.0; n + k];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            for j in 0..k {
                acc += self.right[j][i] * x[n + j];
            }
            y[i] = acc;
        }
        for j in 0..k {
            let mut acc: f64 = self.bottom[j].iter().zip(&x[..n]).map(|(c, v)| c * v).sum();
            for l in 0..k {
                acc += self.corner[j][l] * x[n + l];
            }
            y[n + j] = acc;
        }
        y
    }

    /// Solves `M x = rhs`, block elimination first, dense LU as fallback.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match self.solve_block(rhs) {
            Some(x) => Ok(x),
            None => self.solve_dense(rhs),
        }
    }

    fn solve_block(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.core_dim();
        let k = self.border_dim();
        let lu = TridiagonalLu::factor(&self.sub, &self.diag, &self.sup)?;
        let z = lu.solve(&rhs[..n]);
        let y: Vec<Vec<f64>> = self.right.iter().map(|col| lu.solve(col)).collect();

        let mut schur = DMatrix::zeros(k, k);
        let mut g = DVector::zeros(k);
        for j in 0..k {
            let c = &self.bottom[j];
            g[j] = rhs[n + j] - dot(c, &z);
            for l in 0..k {
                schur[(j, l)] = self.corner[j][l] - dot(c, &y[l]);
            }
        }
        let w = if k == 0 {
            DVector::zeros(0)
        } else {
            schur.lu().solve(&g)?
        };

        let mut x = z;
        for (l, yl) in y.iter().enumerate() {
            for (xi, yi) in x.iter_mut().zip(yl) {
                *xi -= yi * w[l];
            }
        }
        x.extend(w.iter());
        x.iter().all(|v| v.is_finite()).then_some(x)
    }

    fn solve_dense(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let b = DVector::from_column_slice(rhs);
        let x = self.to_dense().lu().solve(&b).ok_or(Error::Singular)?;
        if x.iter().all(|v| v.is_finite()) {
            Ok(x.iter().copied().collect())
        } else {
            Err(Error::Singular)
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LU factorization of a tridiagonal matrix with partial pivoting (row
/// interchanges introduce a second superdiagonal).
#[derive(Debug, Clone)]
struct TridiagonalLu {
    /// Multipliers.
    l: Vec<f64>,
    /// Diagonal, first and second superdiagonals of `U`.
    d: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    /// `swapped[i]`: rows `i` and `i + 1` were exchanged at step `i`.
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Option<Self> {
        let n = diag.len();
        let mut d = diag.to_vec();
        let mut u1 = sup.to_vec();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut sub = sub.to_vec();
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale = diag
            .iter()
            .chain(sup)
            .chain(sub.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }

        for i in 0..n.saturating_sub(1) {
            if sub[i].abs() > d[i].abs() {
                // Exchange rows i and i + 1.
                swapped[i] = true;
                let (ri_d, ri_u1, ri_u2) = (d[i], u1[i], u2[i]);
                d[i] = sub[i];
                u1[i] = d[i + 1];
                u2[i] = u1[i + 1];
                let m = ri_d / d[i];
                l[i] = m;
                d[i + 1] = ri_u1 - m * u1[i];
                u1[i + 1] = ri_u2 - m * u2[i];
                sub[i] = 0.0;
            } else {
                if d[i] == 0.0 {
                    return None;
                }
                let m = sub[i] / d[i];
                l[i] = m;
                d[i + 1] -= m * u1[i];
                u1[i + 1] -= m * u2[i];
            }
        }
        let tiny = scale * f64::EPSILON * 1e-3;
        if d.iter().any(|v| v.abs() <= tiny || !v.is_finite()) {
            return None;
        }
        Some(Self {
            l,
            d,
            u1,
            u2,
            swapped,
        })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut y = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.l[i] * y[i];
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            if i + 1 < n {
                acc -= self.u1[i] * y[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * y[i + 2];
            }
            y[i] = acc / self.d[i];
        }
        y
    }
}
