//! Transforms on Z_d: the unitary Fourier transform, lattice translation and
//! modulation, the Zak transform (frequency-side and time-side evaluation),
//! and the fiberization map sending a signal to its per-(omega, tau) fiber
//! vectors in C^r, together with its inverse.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Result, TfError};
use crate::group::{character, GroupConfig};

/// A complex vector of length d attached to a group configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub values: Vec<Complex64>,
    pub config: GroupConfig,
}

impl Signal {
    pub fn new(values: Vec<Complex64>, config: GroupConfig) -> Result<Self> {
        if values.len() != config.d {
            return Err(TfError::DimensionMismatch {
                expected: config.d,
                got: values.len(),
            });
        }
        Ok(Signal { values, config })
    }

    pub fn zero(config: GroupConfig) -> Self {
        Signal {
            values: vec![Complex64::new(0.0, 0.0); config.d],
            config,
        }
    }

    /// The delta signal supported at `at`.
    pub fn delta(config: GroupConfig, at: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); config.d];
        values[at % config.d] = Complex64::new(1.0, 0.0);
        Signal { values, config }
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// <self, other> = sum self(x) * conj(other(x)).
    pub fn inner(&self, other: &Signal) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum()
    }
}

/// Zak values on the q x p grid; entry (omega, ell) is the transform at
/// frequency omega and point t = ell/q.
#[derive(Debug, Clone, PartialEq)]
pub struct ZakGrid {
    pub values: Vec<Vec<Complex64>>,
    pub config: GroupConfig,
}

/// Fiber vectors indexed [omega][tau][h]; the (omega, tau) fiber lives in
/// C^r.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberTensor {
    pub values: Vec<Vec<Vec<Complex64>>>,
    pub config: GroupConfig,
}

impl FiberTensor {
    pub fn zero(config: GroupConfig) -> Self {
        FiberTensor {
            values: vec![vec![vec![Complex64::new(0.0, 0.0); config.r]; config.s]; config.q],
            config,
        }
    }

    pub fn fiber(&self, omega: usize, tau: usize) -> &[Complex64] {
        &self.values[omega][tau]
    }

    pub fn norm_sq(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Full tensor inner product, linear in self.
    pub fn inner(&self, other: &FiberTensor) -> Complex64 {
        self.values
            .iter()
            .flatten()
            .flatten()
            .zip(other.values.iter().flatten().flatten())
            .map(|(a, b)| a * b.conj())
            .sum()
    }
}

/// Unitary discrete Fourier transform: fhat(w) = (1/sqrt(d)) sum f(g) e^{-2 pi i g w / d}.
pub fn dft(f: &Signal) -> Signal {
    transform(f, -1.0)
}

/// Inverse of `dft`.
pub fn idft(f: &Signal) -> Signal {
    transform(f, 1.0)
}

fn transform(f: &Signal, sign: f64) -> Signal {
    let d = f.config.d;
    let scale = 1.0 / (d as f64).sqrt();
    let values = (0..d)
        .map(|w| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (g, v) in f.values.iter().enumerate() {
                let e = ((g * w) % d) as f64;
                acc += v * Complex64::from_polar(1.0, sign * TAU * e / d as f64);
            }
            acc * scale
        })
        .collect();
    Signal {
        values,
        config: f.config,
    }
}

/// T_ell f (x) = f(x - ell); ell must belong to L.
pub fn translate(f: &Signal, ell: usize) -> Result<Signal> {
    let c = &f.config;
    let ell = ell % c.d;
    if ell % c.p != 0 {
        return Err(TfError::LatticeMembership {
            element: ell,
            lattice: "L",
        });
    }
    let values = (0..c.d)
        .map(|x| f.values[(x + c.d - ell) % c.d])
        .collect();
    Ok(Signal {
        values,
        config: f.config,
    })
}

/// M_beta f (x) = e^{2 pi i x beta / d} f(x); beta must belong to B.
pub fn modulate(f: &Signal, beta: usize) -> Result<Signal> {
    let c = &f.config;
    let beta = beta % c.d;
    if beta % (c.r * c.q) != 0 {
        return Err(TfError::LatticeMembership {
            element: beta,
            lattice: "B",
        });
    }
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(x, v)| character(c.d, x as i64, beta as i64) * v)
        .collect();
    Ok(Signal {
        values,
        config: f.config,
    })
}

/// Zak transform via the frequency side:
/// entry (omega, ell) = (1/sqrt(p)) sum_k fhat(omega + k q) e^{-2 pi i k ell / p}.
///
/// The 1/sqrt(p) factor makes the finite grid transform unitary with plain
/// unweighted sums.
pub fn zak(f: &Signal) -> ZakGrid {
    let c = f.config;
    let fhat = dft(f);
    let values = (0..c.q)
        .map(|omega| {
            (0..c.p)
                .map(|ell| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..c.p {
                        let phase = ((k * ell) % c.p) as f64;
                        acc += fhat.values[(omega + k * c.q) % c.d]
                            * Complex64::from_polar(1.0, -TAU * phase / c.p as f64);
                    }
                    acc / (c.p as f64).sqrt()
                })
                .collect()
        })
        .collect();
    ZakGrid { values, config: c }
}

/// Zak transform via the time side:
/// entry (omega, ell) = e^{2 pi i ell omega / d} (1/sqrt(q)) sum_n f(p n - ell) e^{-2 pi i n omega / q},
/// i.e. the closed form obtained by folding the time samples over L, under
/// the same 1/sqrt(p) normalization as `zak`. The two routes agree entrywise.
pub fn zak_time_domain(f: &Signal) -> ZakGrid {
    let c = f.config;
    let values = (0..c.q)
        .map(|omega| {
            (0..c.p)
                .map(|ell| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for n in 0..c.q {
                        let x = (n * c.p + c.d - ell) % c.d;
                        let phase = ((n * omega) % c.q) as f64;
                        acc += f.values[x]
                            * Complex64::from_polar(1.0, -TAU * phase / c.q as f64);
                    }
                    let front =
                        Complex64::from_polar(1.0, TAU * ((ell * omega) % c.d) as f64 / c.d as f64);
                    front * acc / (c.q as f64).sqrt()
                })
                .collect()
        })
        .collect();
    ZakGrid { values, config: c }
}

/// The fiberization map: tensor entry (omega, tau, h) is the Zak value at
/// (omega, ell) with ell = tau + h*s.
pub fn helson(f: &Signal) -> FiberTensor {
    let c = f.config;
    let grid = zak(f);
    let values = (0..c.q)
        .map(|omega| {
            (0..c.s)
                .map(|tau| {
                    (0..c.r)
                        .map(|h| grid.values[omega][c.fiber_to_ell(tau, h)])
                        .collect()
                })
                .collect()
        })
        .collect();
    FiberTensor { values, config: c }
}

/// Inverse of `helson`: undo the (tau, h) -> ell regrouping, invert the
/// per-omega ell-transform, and apply the inverse Fourier transform.
pub fn helson_inverse(tensor: &FiberTensor) -> Signal {
    let c = tensor.config;
    // Regroup back into the q x p Zak grid.
    let mut grid = vec![vec![Complex64::new(0.0, 0.0); c.p]; c.q];
    for omega in 0..c.q {
        for tau in 0..c.s {
            for h in 0..c.r {
                grid[omega][c.fiber_to_ell(tau, h)] = tensor.values[omega][tau][h];
            }
        }
    }
    // Per omega, invert the unitary ell-transform to recover fhat(omega + k q).
    let mut fhat = vec![Complex64::new(0.0, 0.0); c.d];
    let scale = 1.0 / (c.p as f64).sqrt();
    for omega in 0..c.q {
        for k in 0..c.p {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ell, z) in grid[omega].iter().enumerate() {
                let phase = ((k * ell) % c.p) as f64;
                acc += z * Complex64::from_polar(1.0, TAU * phase / c.p as f64);
            }
            fhat[(omega + k * c.q) % c.d] = acc * scale;
        }
    }
    idft(&Signal {
        values: fhat,
        config: c,
    })
}

/// The lattice pair (ell, beta) acting through the transforms: the image of
/// T_ell M_beta f under `helson` is the image of f multiplied per entry by
/// X_{-ell}(omega) X_{-beta}(t).
///
/// With beta = j*r*q and grid indices (omega, tau) the two factors are
/// exp(-2 pi i ell omega / d) and exp(-2 pi i j r tau / p).
pub fn intertwining_factor(
    config: &GroupConfig,
    ell: usize,
    beta: usize,
    omega: usize,
    tau: usize,
) -> Complex64 {
    let j = beta / (config.r * config.q);
    character(config.d, ell as i64, omega as i64).conj()
        * character(config.p, (j * config.r) as i64, tau as i64).conj()
}
