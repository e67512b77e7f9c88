//! Optimal time-frequency subspace approximation: per-fiber Gramian
//! eigendecomposition, assembly of the optimal generators, orthogonal
//! projection onto finitely generated invariant subspaces, and the two
//! error routes (direct residual and spectral tail sum).

use num_complex::Complex64;

use crate::error::{Result, TfError};
use crate::group::GroupConfig;
use crate::spectral::{eigh, gramian, EigenDecomposition};
use crate::transforms::{helson, helson_inverse, FiberTensor, Signal};

/// Relative threshold below which an eigenvalue is treated as exactly zero.
const RANK_TOL: f64 = 1e-12;

/// A finite collection of signals sharing one configuration.
#[derive(Debug, Clone)]
pub struct DataSet {
    pub signals: Vec<Signal>,
    pub config: GroupConfig,
}

impl DataSet {
    pub fn new(signals: Vec<Signal>) -> Result<Self> {
        let config = signals
            .first()
            .map(|f| f.config)
            .ok_or(TfError::InvalidRank { n: 0, m: 0 })?;
        if signals.iter().any(|f| f.config != config) {
            return Err(TfError::ConfigMismatch);
        }
        Ok(DataSet { signals, config })
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn total_energy(&self) -> f64 {
        self.signals.iter().map(Signal::norm_sq).sum()
    }
}

/// A time-frequency invariant subspace given by its generators, with the
/// generator fiber tensors cached.
#[derive(Debug, Clone)]
pub struct TFSubspace {
    pub generators: Vec<Signal>,
    pub config: GroupConfig,
    fibers: Vec<FiberTensor>,
}

impl TFSubspace {
    pub fn new(generators: Vec<Signal>) -> Result<Self> {
        let config = generators
            .first()
            .map(|f| f.config)
            .ok_or(TfError::InvalidRank { n: 0, m: 0 })?;
        if generators.iter().any(|f| f.config != config) {
            return Err(TfError::ConfigMismatch);
        }
        let fibers = generators.iter().map(helson).collect();
        Ok(TFSubspace {
            generators,
            config,
            fibers,
        })
    }

    /// Generator fiber vectors at one grid point.
    fn basis_at(&self, omega: usize, tau: usize) -> Vec<Vec<Complex64>> {
        self.fibers
            .iter()
            .map(|t| t.fiber(omega, tau).to_vec())
            .collect()
    }
}

/// Eigenvalue field indexed [i][omega][tau], descending in i at every grid
/// point.
pub type EigenField = Vec<Vec<Vec<f64>>>;

/// Output of `optimal_generators`.
#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub generators: Vec<Signal>,
    pub eigenvalues: EigenField,
    pub error: f64,
    pub config: GroupConfig,
    pub m: usize,
    pub n: usize,
}

/// Compute the best subspace with at most n generators for the data set.
///
/// Per fiber: Gramian of the m fiber vectors, eigendecomposition, then the
/// normalized combinations q_i = sigma_i * sum_j y_{i,j} fiber_j for
/// i <= n. The generators are the inverse fiberization of the q_i tensors;
/// the error is the tail sum of eigenvalues.
pub fn optimal_generators(data: &DataSet, n: usize) -> Result<ApproxResult> {
    let m = data.len();
    if n < 1 || n > m {
        return Err(TfError::InvalidRank { n, m });
    }
    let c = data.config;
    let tensors: Vec<FiberTensor> = data.signals.iter().map(helson).collect();

    // First pass: eigendecompose every fiber Gramian and find the global
    // eigenvalue scale for the zero threshold.
    let mut decomps: Vec<Vec<EigenDecomposition>> = Vec::with_capacity(c.q);
    let mut lambda_global = 0.0_f64;
    for omega in 0..c.q {
        let mut row = Vec::with_capacity(c.s);
        for tau in 0..c.s {
            let fibers: Vec<Vec<Complex64>> =
                tensors.iter().map(|t| t.fiber(omega, tau).to_vec()).collect();
            let g = gramian(&fibers)?;
            let d = eigh(&g)?;
            lambda_global = lambda_global.max(d.values[0]);
            row.push(d);
        }
        decomps.push(row);
    }
    let zero_thresh = RANK_TOL * lambda_global.max(1.0);

    // Second pass: assemble the generator tensors and the eigenvalue field.
    let mut gen_tensors: Vec<FiberTensor> = (0..n).map(|_| FiberTensor::zero(c)).collect();
    let mut eigenvalues: EigenField = vec![vec![vec![0.0; c.s]; c.q]; m];
    for omega in 0..c.q {
        for tau in 0..c.s {
            let d = &decomps[omega][tau];
            for i in 0..m {
                eigenvalues[i][omega][tau] = d.values[i];
            }
            for i in 0..n {
                let lam = d.values[i];
                if lam <= zero_thresh {
                    continue; // q_i stays zero on this fiber
                }
                let sigma = 1.0 / lam.sqrt();
                let out = &mut gen_tensors[i].values[omega][tau];
                for (j, t) in tensors.iter().enumerate() {
                    let y = d.vectors[i][j];
                    for (h, z) in t.fiber(omega, tau).iter().enumerate() {
                        out[h] += sigma * y * z;
                    }
                }
            }
        }
    }

    let generators = gen_tensors.iter().map(helson_inverse).collect();
    let error = error_from_spectrum(&eigenvalues, n)?;
    Ok(ApproxResult {
        generators,
        eigenvalues,
        error,
        config: c,
        m,
        n,
    })
}

/// Orthogonal projection of v onto span(basis), by Gram-matrix least
/// squares with an eigenvalue pseudo-inverse.
pub fn fiber_projection(v: &[Complex64], basis: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let r = v.len();
    for b in basis {
        if b.len() != r {
            return Err(TfError::DimensionMismatch {
                expected: r,
                got: b.len(),
            });
        }
    }
    if basis.is_empty() {
        return Ok(vec![Complex64::new(0.0, 0.0); r]);
    }
    let g = gramian(basis)?;
    let d = eigh(&g)?;
    let lam_max = d.values[0];
    if lam_max <= 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); r]);
    }
    let thresh = RANK_TOL * lam_max;

    // rhs_j = <v, b_j>
    let rhs: Vec<Complex64> = basis
        .iter()
        .map(|b| v.iter().zip(b).map(|(a, w)| a * w.conj()).sum())
        .collect();

    // Solve a G = rhs in the eigenbasis: with right eigenvectors
    // u_k = conj(y_k), the coefficient along u_k is <rhs, conj(u_k)> / lam_k.
    let k = basis.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
    for (lam, y) in d.values.iter().zip(&d.vectors) {
        if *lam <= thresh {
            continue;
        }
        // u_k(j) = conj(y[j]); t = sum_j rhs_j u_k(j) / lam
        let t: Complex64 = rhs
            .iter()
            .zip(y)
            .map(|(cj, yj)| cj * yj.conj())
            .sum::<Complex64>()
            / lam;
        for (a, yj) in coeffs.iter_mut().zip(y) {
            *a += t * yj;
        }
    }

    let mut out = vec![Complex64::new(0.0, 0.0); r];
    for (a, b) in coeffs.iter().zip(basis) {
        for (o, w) in out.iter_mut().zip(b) {
            *o += a * w;
        }
    }
    Ok(out)
}

/// Projection of a signal onto the invariant subspace: project every fiber
/// onto the span of the generator fibers, then invert the fiberization.
pub fn project(f: &Signal, subspace: &TFSubspace) -> Result<Signal> {
    if f.config != subspace.config {
        return Err(TfError::ConfigMismatch);
    }
    let c = f.config;
    let hf = helson(f);
    let mut out = FiberTensor::zero(c);
    for omega in 0..c.q {
        for tau in 0..c.s {
            let basis = subspace.basis_at(omega, tau);
            out.values[omega][tau] = fiber_projection(hf.fiber(omega, tau), &basis)?;
        }
    }
    Ok(helson_inverse(&out))
}

/// Direct route: sum of squared residuals of the data signals after
/// projection onto the subspace.
pub fn approximation_error(data: &DataSet, subspace: &TFSubspace) -> Result<f64> {
    if data.config != subspace.config {
        return Err(TfError::ConfigMismatch);
    }
    let mut total = 0.0;
    for f in &data.signals {
        let pf = project(f, subspace)?;
        total += f
            .values
            .iter()
            .zip(&pf.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
    }
    Ok(total)
}

/// Spectral route: tail sum of the eigenvalue field over i > n, iterated
/// omega outer, tau inner, i innermost.
pub fn error_from_spectrum(eigenvalues: &EigenField, n: usize) -> Result<f64> {
    let m = eigenvalues.len();
    if n > m {
        return Err(TfError::InvalidRank { n, m });
    }
    if m == 0 {
        return Ok(0.0);
    }
    let q = eigenvalues[0].len();
    let s = if q > 0 { eigenvalues[0][0].len() } else { 0 };
    let mut total = 0.0;
    for omega in 0..q {
        for tau in 0..s {
            for field in eigenvalues.iter().skip(n) {
                total += field[omega][tau];
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{lattice_elements, make_config};
    use crate::transforms::{modulate, translate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_signal(config: GroupConfig, rng: &mut ChaCha8Rng) -> Signal {
        Signal::new(
            (0..config.d)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
            config,
        )
        .unwrap()
    }

    /// The config(12,6,3) pair whose Helson images are orthogonal basis
    /// tensors in the (0,0) fiber: Gramian there is the identity, every
    /// other fiber is zero.
    pub fn orthogonal_fiber_pair() -> DataSet {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut t1 = FiberTensor::zero(cfg);
        t1.values[0][0][0] = c(1.0, 0.0);
        let mut t2 = FiberTensor::zero(cfg);
        t2.values[0][0][1] = c(1.0, 0.0);
        DataSet::new(vec![helson_inverse(&t1), helson_inverse(&t2)]).unwrap()
    }

    #[test]
    fn single_signal_exact() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_signal(cfg, &mut rng);
        let data = DataSet::new(vec![f.clone()]).unwrap();
        let res = optimal_generators(&data, 1).unwrap();
        assert!(res.error.abs() <= 1e-10 * f.norm_sq());
        // Per fiber, q_1 is the normalized fiber where nonzero.
        let hf = helson(&f);
        let hq = helson(&res.generators[0]);
        for omega in 0..cfg.q {
            for tau in 0..cfg.s {
                let fv = hf.fiber(omega, tau);
                let qv = hq.fiber(omega, tau);
                let norm: f64 = fv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    for (a, b) in qv.iter().zip(fv) {
                        assert!((a - b / norm).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn colinear_pair_rank_one() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_signal(cfg, &mut rng);
        let g = translate(&modulate(&f, 4).unwrap(), 6).unwrap();
        let data = DataSet::new(vec![f, g]).unwrap();
        let res = optimal_generators(&data, 1).unwrap();
        assert!(res.error <= 1e-10 * data.total_energy());
    }

    #[test]
    fn orthogonal_pair_error_field() {
        let data = orthogonal_fiber_pair();
        for (n, expect) in [(1usize, 1.0), (2, 0.0)] {
            let res = optimal_generators(&data, n).unwrap();
            assert!(
                (res.error - expect).abs() <= 1e-10,
                "n={n}: {} vs {expect}",
                res.error
            );
        }
        let res = optimal_generators(&data, 2).unwrap();
        assert!((error_from_spectrum(&res.eigenvalues, 0).unwrap() - 2.0).abs() <= 1e-10);
        // The single carrying fiber has lambda = (1, 1).
        assert!((res.eigenvalues[0][0][0] - 1.0).abs() <= 1e-10);
        assert!((res.eigenvalues[1][0][0] - 1.0).abs() <= 1e-10);

        // Confirm by the direct route.
        let opt = TFSubspace::new(optimal_generators(&data, 1).unwrap().generators).unwrap();
        let direct = approximation_error(&data, &opt).unwrap();
        assert!((direct - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn invalid_rank_and_mismatch() {
        let data = orthogonal_fiber_pair();
        assert!(matches!(
            optimal_generators(&data, 0),
            Err(TfError::InvalidRank { .. })
        ));
        assert!(matches!(
            optimal_generators(&data, 3),
            Err(TfError::InvalidRank { .. })
        ));

        let other = make_config(4, 2, 2).unwrap();
        let mixed = DataSet::new(vec![
            Signal::delta(data.config, 0),
            Signal::delta(other, 0),
        ]);
        assert!(matches!(mixed, Err(TfError::ConfigMismatch)));
    }

    #[test]
    fn fiber_projection_examples() {
        let v = [c(1.0, 0.0), c(1.0, 0.0)];
        let basis = vec![vec![c(1.0, 0.0), c(0.0, 0.0)]];
        let p = fiber_projection(&v, &basis).unwrap();
        assert!((p[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(p[1].norm() < 1e-12);

        let p = fiber_projection(&v, &[]).unwrap();
        assert!(p.iter().all(|z| z.norm() == 0.0));
        let zeros = vec![vec![c(0.0, 0.0), c(0.0, 0.0)]];
        let p = fiber_projection(&v, &zeros).unwrap();
        assert!(p.iter().all(|z| z.norm() == 0.0));

        // Dependent basis spanning the line through (1, 1).
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let basis = vec![
            vec![c(inv_sqrt2, 0.0), c(inv_sqrt2, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ];
        let p = fiber_projection(&[c(1.0, 0.0), c(0.0, 0.0)], &basis).unwrap();
        assert!((p[0] - c(0.5, 0.0)).norm() < 1e-10);
        assert!((p[1] - c(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn project_examples() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_signal(cfg, &mut rng);
        let space = TFSubspace::new(vec![f.clone()]).unwrap();
        let pf = project(&f, &space).unwrap();
        for (a, b) in pf.values.iter().zip(&f.values) {
            assert!((a - b).norm() < 1e-10);
        }

        // Gamma-invariance: a lattice shift of f stays in the span of f.
        let shifted = translate(&f, 6).unwrap();
        let ps = project(&shifted, &space).unwrap();
        for (a, b) in ps.values.iter().zip(&shifted.values) {
            assert!((a - b).norm() < 1e-10);
        }

        // Disjoint fiber supports project to zero.
        let data = orthogonal_fiber_pair();
        let space = TFSubspace::new(vec![data.signals[0].clone()]).unwrap();
        let p = project(&data.signals[1], &space).unwrap();
        assert!(p.norm() < 1e-10);
    }

    #[test]
    fn projection_idempotent_self_adjoint() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gens = vec![random_signal(cfg, &mut rng), random_signal(cfg, &mut rng)];
        let space = TFSubspace::new(gens).unwrap();
        let f = random_signal(cfg, &mut rng);
        let g = random_signal(cfg, &mut rng);
        let pf = project(&f, &space).unwrap();
        let pg = project(&g, &space).unwrap();
        assert!(pf.norm() <= f.norm() + 1e-10);
        let ppf = project(&pf, &space).unwrap();
        for (a, b) in ppf.values.iter().zip(&pf.values) {
            assert!((a - b).norm() < 1e-10);
        }
        assert!((pf.inner(&g) - f.inner(&pg)).norm() <= 1e-10);
    }

    #[test]
    fn error_route_examples() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_signal(cfg, &mut rng);
        let data = DataSet::new(vec![f.clone()]).unwrap();

        let own = TFSubspace::new(vec![f.clone()]).unwrap();
        assert!(approximation_error(&data, &own).unwrap() <= 1e-10 * f.norm_sq());

        let zero_space = TFSubspace::new(vec![Signal::zero(cfg)]).unwrap();
        let e = approximation_error(&data, &zero_space).unwrap();
        assert!((e - f.norm_sq()).abs() <= 1e-10 * f.norm_sq());
    }

    #[test]
    fn error_from_spectrum_examples() {
        let data = orthogonal_fiber_pair();
        let res = optimal_generators(&data, 2).unwrap();
        assert_eq!(error_from_spectrum(&res.eigenvalues, 2).unwrap(), 0.0);
        let total = error_from_spectrum(&res.eigenvalues, 0).unwrap();
        assert!((total - data.total_energy()).abs() <= 1e-9);
        assert!((error_from_spectrum(&res.eigenvalues, 1).unwrap() - 1.0).abs() <= 1e-10);
        assert!(matches!(
            error_from_spectrum(&res.eigenvalues, 3),
            Err(TfError::InvalidRank { .. })
        ));
    }

    #[test]
    fn error_consistency_and_monotonicity() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = 4;
        let data =
            DataSet::new((0..m).map(|_| random_signal(cfg, &mut rng)).collect()).unwrap();
        let full = optimal_generators(&data, m).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=m {
            let res = optimal_generators(&data, n).unwrap();
            let spectral = error_from_spectrum(&full.eigenvalues, n).unwrap();
            let space = TFSubspace::new(res.generators.clone()).unwrap();
            let direct = approximation_error(&data, &space).unwrap();
            assert!(
                (direct - spectral).abs() <= 1e-9 * (1.0 + direct),
                "n={n}: {direct} vs {spectral}"
            );
            assert!(res.error <= prev + 1e-12);
            prev = res.error;
        }
        assert!(full.error <= 1e-9 * data.total_energy());
    }

    #[test]
    fn parseval_frame_per_fiber() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data =
            DataSet::new((0..3).map(|_| random_signal(cfg, &mut rng)).collect()).unwrap();
        let n = 2;
        let res = optimal_generators(&data, n).unwrap();
        let q_tensors: Vec<FiberTensor> = res.generators.iter().map(helson).collect();
        for omega in 0..cfg.q {
            for tau in 0..cfg.s {
                if res.eigenvalues[n - 1][omega][tau] <= 1e-8 {
                    continue;
                }
                let frame: Vec<Vec<Complex64>> = q_tensors
                    .iter()
                    .map(|t| t.fiber(omega, tau).to_vec())
                    .collect();
                // v in the span: random combination of the frame vectors.
                let mut v = vec![c(0.0, 0.0); cfg.r];
                for q in &frame {
                    let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    for (o, z) in v.iter_mut().zip(q) {
                        *o += a * z;
                    }
                }
                let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                let frame_sum: f64 = frame
                    .iter()
                    .map(|q| {
                        v.iter()
                            .zip(q)
                            .map(|(a, b)| a * b.conj())
                            .sum::<Complex64>()
                            .norm_sqr()
                    })
                    .sum();
                assert!((frame_sum - norm_sq).abs() <= 1e-9 * (1.0 + norm_sq));
            }
        }
    }

    #[test]
    fn unitary_data_invariance() {
        let cfg = make_config(12, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data =
            DataSet::new((0..3).map(|_| random_signal(cfg, &mut rng)).collect()).unwrap();
        let lat = lattice_elements(&cfg);
        let moved = DataSet::new(
            data.signals
                .iter()
                .map(|f| translate(&modulate(f, lat.b[1]).unwrap(), lat.l[1]).unwrap())
                .collect(),
        )
        .unwrap();
        let a = optimal_generators(&data, 2).unwrap();
        let b = optimal_generators(&moved, 2).unwrap();
        assert!((a.error - b.error).abs() <= 1e-10 * (1.0 + a.error));
        for i in 0..3 {
            for omega in 0..cfg.q {
                for tau in 0..cfg.s {
                    assert!(
                        (a.eigenvalues[i][omega][tau] - b.eigenvalues[i][omega][tau]).abs()
                            <= 1e-10 * (1.0 + a.eigenvalues[0][omega][tau])
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_config_r1() {
        // r = 1: one-dimensional fibers.
        let cfg = make_config(4, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data =
            DataSet::new((0..2).map(|_| random_signal(cfg, &mut rng)).collect()).unwrap();
        let res = optimal_generators(&data, 1).unwrap();
        let space = TFSubspace::new(res.generators.clone()).unwrap();
        let direct = approximation_error(&data, &space).unwrap();
        assert!((direct - res.error).abs() <= 1e-9 * (1.0 + direct));
    }
}
