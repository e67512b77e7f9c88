//! Per-fiber Gramian assembly and a deterministic Hermitian eigensolver.
//!
//! The eigensolver runs cyclic Jacobi sweeps with complex Givens rotations
//! until the off-diagonal Frobenius mass drops below 1e-14 of the matrix
//! norm, capped at 100 sweeps. Output follows the left-eigenvector
//! convention: the stored rows y_i satisfy y_i G = lambda_i y_i.

use num_complex::Complex64;

use crate::error::{Result, TfError};

const OFF_DIAG_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;
const HERMITIAN_TOL: f64 = 1e-12;
const PHASE_TOL: f64 = 1e-10;
const CLAMP_TOL: f64 = 1e-12;

/// Dense m x m Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    pub entries: Vec<Vec<Complex64>>,
}

impl HermitianMatrix {
    /// Wrap entries after checking Hermitian symmetry to 1e-12 (relative to
    /// the largest entry).
    pub fn new(entries: Vec<Vec<Complex64>>) -> Result<Self> {
        let m = entries.len();
        for row in &entries {
            if row.len() != m {
                return Err(TfError::DimensionMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
        }
        let scale = entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(1.0_f64, f64::max);
        for i in 0..m {
            for j in i..m {
                let dev = (entries[i][j] - entries[j][i].conj()).norm();
                if dev > HERMITIAN_TOL * scale {
                    return Err(TfError::NotHermitian { i, j, deviation: dev });
                }
            }
        }
        Ok(HermitianMatrix { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[i][i].re).sum()
    }
}

/// Descending eigenvalues with phase-normalized orthonormal left
/// eigenvectors stored as rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

/// Gramian of fiber vectors: entry (i, j) = sum_h v_i(h) conj(v_j(h)).
pub fn gramian(fibers: &[Vec<Complex64>]) -> Result<HermitianMatrix> {
    let m = fibers.len();
    let r = fibers[0].len();
    for v in fibers {
        if v.len() != r {
            return Err(TfError::DimensionMismatch {
                expected: r,
                got: v.len(),
            });
        }
    }
    let mut entries = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for i in 0..m {
        for j in 0..=i {
            let z: Complex64 = fibers[i]
                .iter()
                .zip(&fibers[j])
                .map(|(a, b)| a * b.conj())
                .sum();
            entries[i][j] = z;
            entries[j][i] = z.conj();
        }
        entries[i][i] = Complex64::new(entries[i][i].re, 0.0);
    }
    HermitianMatrix::new(entries)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn eigh(g: &HermitianMatrix) -> Result<EigenDecomposition> {
    let m = g.dim();
    let mut a = g.entries.clone();
    // Columns of v accumulate the right eigenvectors.
    let mut v = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }

    let frob: f64 = a
        .iter()
        .flatten()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let stop = OFF_DIAG_TOL * frob.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let gpq = a[p][q];
                if gpq.norm() <= stop / (m as f64) {
                    continue;
                }
                let alpha = a[p][p].re;
                let beta = a[q][q].re;
                let mag = gpq.norm();
                let phase = gpq / mag;
                // Zero the (p, q) entry: tangent of the rotation angle from
                // the real Jacobi formula applied to |gpq|.
                let theta = (alpha - beta) / (2.0 * mag);
                let t = if theta >= 0.0 {
                    -1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s1 = phase * (t * c);

                // A <- R^H A R with R = [[c, s1], [-conj(s1), c]] on (p, q).
                for k in 0..m {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s1.conj() * akq;
                    a[k][q] = s1 * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s1 * aqk;
                    a[q][k] = s1.conj() * apk + c * aqk;
                }
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
                a[p][p] = Complex64::new(a[p][p].re, 0.0);
                a[q][q] = Complex64::new(a[q][q].re, 0.0);

                for k in 0..m {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s1.conj() * vkq;
                    v[k][q] = s1 * vkp + c * vkq;
                }
            }
        }
    }

    let lambda_max = (0..m).map(|i| a[i][i].re).fold(0.0_f64, f64::max);
    let clamp = CLAMP_TOL * lambda_max.max(1.0);
    let mut order: Vec<usize> = (0..m).collect();
    // Stable sort: ties keep the Jacobi output order.
    order.sort_by(|&i, &j| a[j][j].re.partial_cmp(&a[i][i].re).unwrap());

    let mut values = Vec::with_capacity(m);
    let mut vectors = Vec::with_capacity(m);
    for &idx in &order {
        let mut lam = a[idx][idx].re;
        if lam < 0.0 && lam >= -clamp {
            lam = 0.0;
        }
        values.push(lam);
        // Left eigenvector row: conjugate of the right-eigenvector column.
        let mut y: Vec<Complex64> = (0..m).map(|k| v[k][idx].conj()).collect();
        if let Some(lead) = y.iter().find(|z| z.norm() > PHASE_TOL) {
            let u = lead / lead.norm();
            for z in &mut y {
                *z /= u;
            }
        }
        vectors.push(y);
    }
    Ok(EigenDecomposition { values, vectors })
}
