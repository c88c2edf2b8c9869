//! Matrix norms and estimation-error reports.

use crate::cov::CovMatrix;
use crate::error::{LrcError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Denominator floor for relative errors.
pub const REL_SAFEGUARD: f64 = 1e-12;

const QL_MAX_ITER: usize = 60;

pub fn frobenius_norm<T: Scalar>(a: &Matrix<T>) -> T {
    a.as_slice().iter().map(|&v| v * v).sum::<T>().sqrt()
}

/// Induced 1-norm: largest absolute column sum.
pub fn induced_l1_norm<T: Scalar>(a: &Matrix<T>) -> T {
    let mut col_sums = vec![T::zero(); a.cols()];
    for row in a.iter_rows() {
        for (s, &v) in col_sums.iter_mut().zip(row) {
            *s += v.abs();
        }
    }
    col_sums.into_iter().fold(T::zero(), T::max)
}

/// Entrywise maximum absolute value.
pub fn max_norm<T: Scalar>(a: &Matrix<T>) -> T {
    a.as_slice().iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Largest absolute eigenvalue of a symmetric matrix.
///
/// Computed from the full spectrum (see [`symmetric_eigenvalues`]), so both
/// ends are resolved exactly even when the top of the spectrum is clustered.
pub fn spectral_norm<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    let eig = symmetric_eigenvalues(a)?;
    let (lo, hi) = match (eig.first(), eig.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Ok(T::zero()),
    };
    Ok(lo.abs().max(hi.abs()))
}

/// Eigenvalues of the symmetric part of `a`, ascending.
///
/// Householder reduction to tridiagonal form followed by implicit QL with
/// Wilkinson shifts, carried out in `f64`.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(LrcError::Dimension {
            expected: "square matrix".into(),
            got: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    if !a.all_finite() {
        return Err(LrcError::numerical(
            "eigenvalues of a matrix with non-finite entries",
        ));
    }
    let p = a.rows();
    let mut m: Vec<f64> = a
        .symmetrized()
        .as_slice()
        .iter()
        .map(|v| v.as_f64())
        .collect();
    let (mut d, mut e) = tridiagonalize(&mut m, p);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d.into_iter().map(T::lit).collect())
}

/// Reduces the symmetric row-major `a` in place; returns the diagonal and the
/// subdiagonal (`e[i]` couples `i` and `i + 1`, last entry zero).
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    // shift so that e[i] sits between i and i + 1
    if n > 0 {
        e.remove(0);
        e.push(0.0);
    }
    (d, e)
}

/// Eigenvalues of a symmetric tridiagonal matrix, overwriting `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(LrcError::numerical(
                    "tridiagonal QL iteration did not converge",
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Absolute and relative errors of an estimate in the four reporting norms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub frob: f64,
    pub l1: f64,
    pub max: f64,
    pub spectral: f64,
    pub rel_frob: f64,
    pub rel_l1: f64,
    pub rel_max: f64,
    pub rel_spectral: f64,
}

impl ErrorReport {
    pub const FIELD_NAMES: [&'static str; 8] = [
        "frob", "l1", "max", "spec", "rel_frob", "rel_l1", "rel_max", "rel_spec",
    ];

    /// Fields in reporting order: absolute F, 1, max, 2, then the relatives.
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.frob,
            self.l1,
            self.max,
            self.spectral,
            self.rel_frob,
            self.rel_l1,
            self.rel_max,
            self.rel_spectral,
        ]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        Self {
            frob: v[0],
            l1: v[1],
            max: v[2],
            spectral: v[3],
            rel_frob: v[4],
            rel_l1: v[5],
            rel_max: v[6],
            rel_spectral: v[7],
        }
    }
}

/// The four reporting norms of one matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatrixNorms {
    pub frob: f64,
    pub l1: f64,
    pub max: f64,
    pub spectral: f64,
}

impl MatrixNorms {
    pub fn of<T: Scalar>(a: &Matrix<T>) -> Result<Self> {
        Ok(Self {
            frob: frobenius_norm(a).as_f64(),
            l1: induced_l1_norm(a).as_f64(),
            max: max_norm(a).as_f64(),
            spectral: spectral_norm(a)?.as_f64(),
        })
    }
}

/// Norms of `E = est − target`, and each divided by the same norm of `target`.
pub fn error_report<T: Scalar>(est: &CovMatrix<T>, target: &CovMatrix<T>) -> Result<ErrorReport> {
    error_report_with_norms(est, target, &MatrixNorms::of(target.values())?)
}

/// [`error_report`] with the norms of `target` precomputed.
pub fn error_report_with_norms<T: Scalar>(
    est: &CovMatrix<T>,
    target: &CovMatrix<T>,
    target_norms: &MatrixNorms,
) -> Result<ErrorReport> {
    if est.p() != target.p() {
        return Err(LrcError::Dimension {
            expected: format!("{0}x{0}", target.p()),
            got: format!("{0}x{0}", est.p()),
        });
    }
    let e = MatrixNorms::of(&est.values().sub(target.values())?)?;
    let v = target_norms;
    let rel = |num: f64, den: f64| num / den.max(REL_SAFEGUARD);
    Ok(ErrorReport {
        frob: e.frob,
        l1: e.l1,
        max: e.max,
        spectral: e.spectral,
        rel_frob: rel(e.frob, v.frob),
        rel_l1: rel(e.l1, v.l1),
        rel_max: rel(e.max, v.max),
        rel_spectral: rel(e.spectral, v.spectral),
    })
}
