//! Independent oracles for the main construction: a power-iteration
//! eigensolver with deflation, a brute per-fiber best-rank-n residual, and
//! a seeded random-subspace sweep against the optimality claim.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::approx::{approximation_error, optimal_generators, DataSet, TFSubspace};
use crate::error::{Result, TfError};
use crate::spectral::{gramian, HermitianMatrix};
use crate::transforms::Signal;

const POWER_MAX_ITERS: usize = 10_000;
const POWER_RESIDUAL: f64 = 1e-13;

/// One oracle comparison: the main-path value against the independently
/// computed one.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub case: String,
    pub main_value: f64,
    pub oracle_value: f64,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(case: String, main_value: f64, oracle_value: f64, tolerance: f64) -> Self {
        let abs_deviation = (main_value - oracle_value).abs();
        let rel_deviation = abs_deviation / main_value.abs().max(oracle_value.abs()).max(1.0);
        OracleReport {
            case,
            main_value,
            oracle_value,
            abs_deviation,
            rel_deviation,
            pass: main_value <= oracle_value + tolerance,
        }
    }
}

/// Top `count` eigenvalues of a PSD matrix by power iteration with
/// deflation. Start vectors come from a fixed seed so runs are
/// reproducible.
pub fn power_iteration_eigs(g: &HermitianMatrix, count: usize) -> Result<Vec<f64>> {
    let m = g.dim();
    if count > m {
        return Err(TfError::InvalidRank { n: count, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut deflated: Vec<(f64, Vec<Complex64>)> = Vec::new();
    let scale = g.trace().max(1.0);

    for _ in 0..count {
        let mut v: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        orthogonalize(&mut v, &deflated);
        normalize(&mut v);
        let mut lam = 0.0;
        let mut converged = false;
        for _ in 0..POWER_MAX_ITERS {
            let mut w = mat_vec(g, &v);
            orthogonalize(&mut w, &deflated);
            lam = v
                .iter()
                .zip(&w)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>();
            let norm = normalize(&mut w);
            if norm <= POWER_RESIDUAL * scale {
                // Remaining spectrum in this deflated block is numerically
                // zero.
                lam = 0.0;
                converged = true;
                v = w;
                break;
            }
            let residual: f64 = w
                .iter()
                .zip(&v)
                .map(|(a, b)| {
                    let d1 = (a - b).norm_sqr();
                    let d2 = (a + b).norm_sqr();
                    d1.min(d2)
                })
                .sum::<f64>()
                .sqrt();
            v = w;
            if residual <= POWER_RESIDUAL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(TfError::ConvergenceFailure {
                iterations: POWER_MAX_ITERS,
            });
        }
        deflated.push((lam.max(0.0), v));
    }
    Ok(deflated.into_iter().map(|(lam, _)| lam).collect())
}

fn mat_vec(g: &HermitianMatrix, v: &[Complex64]) -> Vec<Complex64> {
    g.entries
        .iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn orthogonalize(v: &mut [Complex64], against: &[(f64, Vec<Complex64>)]) {
    for (_, u) in against {
        let ip: Complex64 = v.iter().zip(u).map(|(a, b)| a * b.conj()).sum();
        for (a, b) in v.iter_mut().zip(u) {
            *a -= ip * b;
        }
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

/// Minimal residual energy of m fiber vectors after projection onto any
/// subspace of dimension at most n: trace of the Gramian minus the top n
/// eigenvalues, with the eigenvalues taken from the power-iteration path.
pub fn fiber_best_rank_error(fibers: &[Vec<Complex64>], n: usize) -> Result<f64> {
    let g = gramian(fibers)?;
    let m = g.dim();
    let keep = n.min(m);
    let top = power_iteration_eigs(&g, keep)?;
    let residual = g.trace() - top.iter().sum::<f64>();
    Ok(residual.max(0.0))
}

/// Sample `trials` random subspaces with n Gaussian generators and compare
/// each sampled approximation error against the optimal one.
pub fn random_subspace_sweep(
    data: &DataSet,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<OracleReport>> {
    let optimal = optimal_generators(data, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(trials);
    for trial in 0..trials {
        let generators: Vec<Signal> = (0..n)
            .map(|_| {
                Signal::new(
                    (0..data.config.d)
                        .map(|_| {
                            let re: f64 = rng.sample(StandardNormal);
                            let im: f64 = rng.sample(StandardNormal);
                            Complex64::new(re, im)
                        })
                        .collect(),
                    data.config,
                )
                .unwrap()
            })
            .collect();
        let space = TFSubspace::new(generators)?;
        let sampled = approximation_error(data, &space)?;
        reports.push(OracleReport::new(
            format!("trial {trial} (seed {seed})"),
            optimal.error,
            sampled,
            1e-9,
        ));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::error_from_spectrum;
    use crate::group::make_config;
    use crate::spectral::eigh;
    use crate::transforms::{helson, helson_inverse, FiberTensor};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(values: &[f64]) -> HermitianMatrix {
        let m = values.len();
        let mut entries = vec![vec![c(0.0, 0.0); m]; m];
        for (i, &v) in values.iter().enumerate() {
            entries[i][i] = c(v, 0.0);
        }
        HermitianMatrix::new(entries).unwrap()
    }

    #[test]
    fn power_iteration_examples() {
        let eigs = power_iteration_eigs(&diag(&[1.0, 1.0, 1.0]), 3).unwrap();
        for e in eigs {
            assert!((e - 1.0).abs() < 1e-8);
        }

        let g = HermitianMatrix::new(vec![
            vec![c(2.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let eigs = power_iteration_eigs(&g, 2).unwrap();
        assert!((eigs[0] - 3.0).abs() < 1e-8);
        assert!((eigs[1] - 1.0).abs() < 1e-8);

        let eigs = power_iteration_eigs(&diag(&[5.0, 2.0, 0.0]), 2).unwrap();
        assert!((eigs[0] - 5.0).abs() < 1e-8);
        assert!((eigs[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn oracle_vs_jacobi_random_psd() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for m in 2..=8 {
            for _ in 0..8 {
                let k = m + 1;
                let cols: Vec<Vec<Complex64>> = (0..m)
                    .map(|_| {
                        (0..k)
                            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                            .collect()
                    })
                    .collect();
                let g = gramian(&cols).unwrap();
                let main = eigh(&g).unwrap();
                let oracle = power_iteration_eigs(&g, m).unwrap();
                for (a, b) in main.values.iter().zip(&oracle) {
                    assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn fiber_best_rank_examples() {
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let e2 = vec![c(0.0, 0.0), c(1.0, 0.0)];
        let err = fiber_best_rank_error(&[e1.clone(), e2], 1).unwrap();
        assert!((err - 1.0).abs() <= 1e-9);

        let err = fiber_best_rank_error(&[e1.clone(), e1.clone()], 1).unwrap();
        assert!(err <= 1e-9);

        let err = fiber_best_rank_error(&[e1.clone(), e1], 2).unwrap();
        assert!(err <= 1e-9);
    }

    #[test]
    fn fiber_oracle_matches_spectral_tail() {
        use rand::{Rng, SeedableRng};
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = 3;
        let data = DataSet::new(
            (0..m)
                .map(|_| {
                    Signal::new(
                        (0..cfg.d)
                            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                            .collect(),
                        cfg,
                    )
                    .unwrap()
                })
                .collect(),
        )
        .unwrap();
        let res = optimal_generators(&data, 1).unwrap();
        let tensors: Vec<FiberTensor> = data.signals.iter().map(helson).collect();
        for omega in 0..cfg.q {
            for tau in 0..cfg.s {
                let fibers: Vec<Vec<Complex64>> = tensors
                    .iter()
                    .map(|t| t.fiber(omega, tau).to_vec())
                    .collect();
                let oracle = fiber_best_rank_error(&fibers, 1).unwrap();
                let main: f64 = (1..m).map(|i| res.eigenvalues[i][omega][tau]).sum();
                assert!((oracle - main).abs() <= 1e-9, "{oracle} vs {main}");
            }
        }
        // Totals agree too.
        let total: f64 = (0..cfg.q)
            .flat_map(|omega| (0..cfg.s).map(move |tau| (omega, tau)))
            .map(|(omega, tau)| {
                let fibers: Vec<Vec<Complex64>> = tensors
                    .iter()
                    .map(|t| t.fiber(omega, tau).to_vec())
                    .collect();
                fiber_best_rank_error(&fibers, 1).unwrap()
            })
            .sum();
        let spectral = error_from_spectrum(&res.eigenvalues, 1).unwrap();
        assert!((total - spectral).abs() <= 1e-9 * (1.0 + total));
    }

    #[test]
    fn sweep_never_beats_optimal() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut t1 = FiberTensor::zero(cfg);
        t1.values[0][0][0] = c(1.0, 0.0);
        let mut t2 = FiberTensor::zero(cfg);
        t2.values[0][0][1] = c(1.0, 0.0);
        let data = DataSet::new(vec![helson_inverse(&t1), helson_inverse(&t2)]).unwrap();
        let reports = random_subspace_sweep(&data, 1, 50, 7).unwrap();
        assert_eq!(reports.len(), 50);
        for rep in &reports {
            assert!(rep.pass, "{rep:?}");
            assert!((rep.main_value - 1.0).abs() <= 1e-9);
        }

        // m = 1: optimal error is zero, below everything sampled.
        let single = DataSet::new(vec![data.signals[0].clone()]).unwrap();
        let reports = random_subspace_sweep(&single, 1, 10, 3).unwrap();
        for rep in &reports {
            assert!(rep.pass);
            assert!(rep.main_value.abs() <= 1e-10);
        }

        // n = m: optimal error zero again.
        let reports = random_subspace_sweep(&data, 2, 10, 5).unwrap();
        for rep in &reports {
            assert!(rep.pass);
        }
    }
}
