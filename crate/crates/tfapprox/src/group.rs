//! Cyclic-group lattice structure: G = Z_d with a time lattice L of size q,
//! its annihilator L^perp of size p, a frequency lattice B of size s inside
//! L^perp, and the annihilator B^perp of size r in the dual of L^perp.
//!
//! B^perp elements are the rationals h*s/q; they are carried around as the
//! integer numerators h*s (denominator q implicit in the config) so that all
//! lattice arithmetic stays exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Result, TfError};

/// The integers (d, p, q, s, r) with d = p*q and p = r*s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfig {
    /// Order of the group Z_d.
    pub d: usize,
    /// Period of the L generator; also |L^perp|.
    pub p: usize,
    /// Size of L.
    pub q: usize,
    /// Size of B.
    pub s: usize,
    /// Size of B^perp.
    pub r: usize,
}

/// Grid point of the fiber cross-section: omega in [0, q), tau in [0, s),
/// and optionally the B^perp index h in [0, r).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberIndex {
    pub omega: usize,
    pub tau: usize,
    pub h: Option<usize>,
}

/// The four lattices as explicit element lists in [0, d) (numerators for
/// B^perp).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeElements {
    pub l: Vec<usize>,
    pub l_perp: Vec<usize>,
    pub b: Vec<usize>,
    pub b_perp_numerators: Vec<usize>,
}

/// Build a config from (d, p, s), deriving q = d/p and r = p/s.
pub fn make_config(d: usize, p: usize, s: usize) -> Result<GroupConfig> {
    if d == 0 || p == 0 || s == 0 {
        return Err(TfError::Divisibility {
            dividend: d.max(1),
            divisor: 0,
            relation: "d, p, s must be positive",
        });
    }
    if d % p != 0 {
        return Err(TfError::Divisibility {
            dividend: d,
            divisor: p,
            relation: "d = p*q",
        });
    }
    if p % s != 0 {
        return Err(TfError::Divisibility {
            dividend: p,
            divisor: s,
            relation: "p = r*s",
        });
    }
    Ok(GroupConfig {
        d,
        p,
        q: d / p,
        s,
        r: p / s,
    })
}

/// L = {n*p}, L^perp = {k*q}, B = {j*r*q}, B^perp numerators = {h*s}.
pub fn lattice_elements(config: &GroupConfig) -> LatticeElements {
    LatticeElements {
        l: (0..config.q).map(|n| n * config.p).collect(),
        l_perp: (0..config.p).map(|k| k * config.q).collect(),
        b: (0..config.s).map(|j| j * config.r * config.q).collect(),
        b_perp_numerators: (0..config.r).map(|h| h * config.s).collect(),
    }
}

/// The character exp(2*pi*i*x*w/d). Inputs are reduced mod d.
pub fn character(d: usize, x: i64, w: i64) -> Complex64 {
    let d_i = d as i64;
    let x = x.rem_euclid(d_i);
    let w = w.rem_euclid(d_i);
    // Reduce the product mod d before going to floats.
    let e = (x * w).rem_euclid(d_i);
    Complex64::from_polar(1.0, TAU * e as f64 / d as f64)
}

impl GroupConfig {
    /// Bijection (tau, h) -> ell = tau + h*s onto [0, p).
    pub fn fiber_to_ell(&self, tau: usize, h: usize) -> usize {
        tau + h * self.s
    }

    /// Inverse of `fiber_to_ell`.
    pub fn ell_to_fiber(&self, ell: usize) -> (usize, usize) {
        (ell % self.s, ell / self.s)
    }
}
