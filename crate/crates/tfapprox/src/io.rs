//! File formats and result persistence.
//!
//! Signal files are UTF-8 CSV: first line `d=<int>,m=<int>`, then m*d lines
//! `re,im` with the signals concatenated in order. Generator files use the
//! same layout with the generator count in the `m` slot. The eigenvalue
//! field is CSV with columns `i,omega,tau,lambda`, i-major then omega then
//! tau. The manifest is JSON tying a run together.
//!
//! All writes go to a temporary file in the target directory and are
//! renamed into place once complete.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx::{ApproxResult, DataSet, EigenField};
use crate::error::{Result, TfError};
use crate::group::GroupConfig;
use crate::transforms::Signal;

/// JSON manifest describing one `approx` run. Referenced paths are file
/// names relative to the manifest's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultManifest {
    pub config: GroupConfig,
    pub m: usize,
    pub n: usize,
    pub error: f64,
    pub generators_path: String,
    pub eigenvalues_path: String,
    pub seed: Option<u64>,
    pub version: String,
}

/// Parse a signal file into a data set. `p` and `s` complete the group
/// configuration; `d` comes from the header.
pub fn read_signals(path: &Path, p: usize, s: usize) -> Result<DataSet> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| TfError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let (d, m) = parse_header(header)?;
    let config = crate::group::make_config(d, p, s)?;

    let mut samples = Vec::with_capacity(d * m);
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (re, im) = parse_sample(line).map_err(|message| TfError::Parse {
            line: idx + 1,
            message,
        })?;
        samples.push(Complex64::new(re, im));
    }
    if samples.len() != d * m {
        return Err(TfError::LengthMismatch {
            expected: d * m,
            got: samples.len(),
        });
    }
    let signals = samples
        .chunks(d)
        .map(|chunk| Signal::new(chunk.to_vec(), config))
        .collect::<Result<Vec<_>>>()?;
    DataSet::new(signals)
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let err = |message: String| TfError::Parse { line: 1, message };
    let mut d = None;
    let mut m = None;
    for part in header.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got {part:?}")))?;
        let value: usize = value
            .trim()
            .parse()
            .map_err(|_| err(format!("invalid integer {value:?}")))?;
        match key.trim() {
            "d" => d = Some(value),
            "m" => m = Some(value),
            other => return Err(err(format!("unknown header key {other:?}"))),
        }
    }
    match (d, m) {
        (Some(d), Some(m)) if d > 0 && m > 0 => Ok((d, m)),
        _ => Err(err("header must declare positive d and m".into())),
    }
}

fn parse_sample(line: &str) -> std::result::Result<(f64, f64), String> {
    let (re, im) = line
        .split_once(',')
        .ok_or_else(|| format!("expected re,im, got {line:?}"))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| format!("invalid number {re:?}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| format!("invalid number {im:?}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(format!("non-finite sample {line:?}"));
    }
    Ok((re, im))
}

/// Serialize signals in the header + `re,im` rows format, 17 significant
/// digits.
pub fn write_signals(path: &Path, signals: &[Signal]) -> Result<()> {
    let d = signals.first().map(|f| f.config.d).unwrap_or(0);
    let mut out = format!("d={},m={}\n", d, signals.len());
    for f in signals {
        for z in &f.values {
            out.push_str(&format!("{:.16e},{:.16e}\n", z.re, z.im));
        }
    }
    atomic_write(path, out.as_bytes())
}

/// Eigenvalue field CSV, columns `i,omega,tau,lambda` with i 1-based.
pub fn write_eigenvalue_field(path: &Path, field: &EigenField) -> Result<()> {
    let mut out = String::from("i,omega,tau,lambda\n");
    for (i, per_omega) in field.iter().enumerate() {
        for (omega, per_tau) in per_omega.iter().enumerate() {
            for (tau, lam) in per_tau.iter().enumerate() {
                out.push_str(&format!("{},{},{},{:.16e}\n", i + 1, omega, tau, lam));
            }
        }
    }
    atomic_write(path, out.as_bytes())
}

/// Error-curve CSV, columns `n,error` for n = 0..=n_max.
pub fn write_error_curve(path: &Path, field: &EigenField, n_max: usize) -> Result<()> {
    let mut out = String::from("n,error\n");
    for n in 0..=n_max {
        let e = crate::approx::error_from_spectrum(field, n)?;
        out.push_str(&format!("{},{:.16e}\n", n, e));
    }
    atomic_write(path, out.as_bytes())
}

/// Persist an `ApproxResult` as generators + eigenvalue field + manifest.
/// Returns the manifest path.
pub fn write_result(
    dir: &Path,
    result: &ApproxResult,
    seed: Option<u64>,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let generators_path = "generators.csv";
    let eigenvalues_path = "eigenvalues.csv";
    write_signals(&dir.join(generators_path), &result.generators)?;
    write_eigenvalue_field(&dir.join(eigenvalues_path), &result.eigenvalues)?;
    let manifest = ResultManifest {
        config: result.config,
        m: result.m,
        n: result.n,
        error: result.error,
        generators_path: generators_path.into(),
        eigenvalues_path: eigenvalues_path.into(),
        seed,
        version: env!("CARGO_PKG_VERSION").into(),
    };
    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)
        .expect("manifest serialization cannot fail");
    atomic_write(&manifest_path, json.as_bytes())?;
    Ok(manifest_path)
}

pub fn read_manifest(path: &Path) -> Result<ResultManifest> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| TfError::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out")
    ));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
