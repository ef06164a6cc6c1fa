//! Mask-weighted spatial covariances and MVDR / GEVD beamformers.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{add_diagonal, hermitize, principal_generalized_eig, quadratic_form, trace, CMatrix};
use crate::signal::StftTensor;

/// Relative diagonal loading applied before every inverse.
pub const LOADING: f64 = 1e-6;
const EMPTY_BIN_EPS: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum BeamformError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("reference channel {reference} out of range for {channels} channels")]
    ReferenceOutOfRange { reference: usize, channels: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamformerKind {
    #[default]
    Mvdr,
    Gevd,
}

impl std::str::FromStr for BeamformerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mvdr" => Ok(Self::Mvdr),
            "gevd" => Ok(Self::Gevd),
            other => Err(format!("unknown beamformer {other:?} (expected mvdr or gevd)")),
        }
    }
}

/// Per-bin `C x C` covariance matrices.
#[derive(Debug, Clone)]
pub struct SpatialCovariance {
    pub matrices: Vec<CMatrix>,
    pub weight_mass: Vec<f64>,
    /// Bins with zero mask mass, filled with a tiny scaled identity.
    pub degenerate: Vec<bool>,
}

impl SpatialCovariance {
    pub fn num_bins(&self) -> usize {
        self.matrices.len()
    }

    pub fn num_channels(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|d| **d).count()
    }
}

/// `mask` is laid out `[t * bins + f]`, weights in `[0, 1]`.
pub fn estimate_covariance(tensor: &StftTensor, mask: &[f64]) -> Result<SpatialCovariance, BeamformError> {
    let (c_n, t_n, f_n) = (tensor.num_channels(), tensor.num_frames(), tensor.num_bins());
    if mask.len() != t_n * f_n {
        return Err(BeamformError::Shape(format!("mask has {} entries, tensor has {t_n}x{f_n}", mask.len())));
    }
    let total = tensor.values().len();
    let mean_power = if total == 0 { 0.0 } else { tensor.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / total as f64 };
    let eps = EMPTY_BIN_EPS * if mean_power > 0.0 { mean_power } else { 1.0 };

    let per_bin: Vec<(CMatrix, f64, bool)> = (0..f_n)
        .into_par_iter()
        .map(|f| {
            let mut acc = vec![Complex64::new(0.0, 0.0); c_n * c_n];
            let mut mass = 0.0;
            let mut x = vec![Complex64::new(0.0, 0.0); c_n];
            for t in 0..t_n {
                let m = mask[t * f_n + f];
                if m == 0.0 {
                    continue;
                }
                mass += m;
                for (c, xc) in x.iter_mut().enumerate() {
                    *xc = tensor.get(c, t, f);
                }
                for i in 0..c_n {
                    let xi = x[i] * m;
                    for j in i..c_n {
                        acc[i * c_n + j] += xi * x[j].conj();
                    }
                }
            }
            if mass <= 0.0 {
                let mut m = CMatrix::zeros(c_n, c_n);
                add_diagonal(&mut m, eps);
                return (m, 0.0, true);
            }
            let m = CMatrix::from_fn(c_n, c_n, |i, j| {
                if i <= j { acc[i * c_n + j] / mass } else { acc[j * c_n + i].conj() / mass }
            });
            (m, mass, false)
        })
        .collect();

    let mut out = SpatialCovariance { matrices: Vec::with_capacity(f_n), weight_mass: Vec::with_capacity(f_n), degenerate: Vec::with_capacity(f_n) };
    for (m, mass, bad) in per_bin {
        out.matrices.push(m);
        out.weight_mass.push(mass);
        out.degenerate.push(bad);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerWeights {
    /// Per bin, one weight per channel.
    pub weights: Vec<Vec<Complex64>>,
    pub reference: usize,
    pub kind: BeamformerKind,
    /// Bins that fell back to passing the reference channel through.
    pub fallback_bins: usize,
}

impl BeamformerWeights {
    /// Selects channel `reference` unchanged at every bin.
    pub fn pass_through(channels: usize, bins: usize, reference: usize, kind: BeamformerKind) -> Self {
        Self { weights: vec![unit(channels, reference); bins], reference, kind, fallback_bins: 0 }
    }
}

fn unit(channels: usize, reference: usize) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); channels];
    e[reference] = Complex64::new(1.0, 0.0);
    e
}

fn check_pair(target: &SpatialCovariance, noise: &SpatialCovariance, reference: usize) -> Result<(), BeamformError> {
    if target.num_bins() != noise.num_bins() || target.num_channels() != noise.num_channels() {
        return Err(BeamformError::Shape(format!(
            "target {}x{} vs noise {}x{}",
            target.num_bins(),
            target.num_channels(),
            noise.num_bins(),
            noise.num_channels()
        )));
    }
    let channels = target.num_channels();
    if reference >= channels {
        return Err(BeamformError::ReferenceOutOfRange { reference, channels });
    }
    Ok(())
}

fn loaded(noise: &CMatrix) -> CMatrix {
    let c = noise.nrows() as f64;
    let mut m = hermitize(noise);
    let load = LOADING * trace(&m).re / c;
    add_diagonal(&mut m, load);
    m
}

fn finite(w: &[Complex64]) -> bool {
    w.iter().all(|v| v.re.is_finite() && v.im.is_finite()) && w.iter().any(|v| v.norm_sqr() > 0.0)
}

fn per_bin(
    target: &SpatialCovariance,
    noise: &SpatialCovariance,
    reference: usize,
    kind: BeamformerKind,
    solve: impl Fn(&CMatrix, &CMatrix) -> Option<Vec<Complex64>> + Sync,
) -> BeamformerWeights {
    let channels = target.num_channels();
    let solved: Vec<Option<Vec<Complex64>>> = (0..target.num_bins())
        .into_par_iter()
        .map(|f| solve(&target.matrices[f], &loaded(&noise.matrices[f])).filter(|w| finite(w)))
        .collect();
    let fallback_bins = solved.iter().filter(|w| w.is_none()).count();
    if fallback_bins > 0 {
        log::warn!("{fallback_bins} bins fell back to reference channel pass-through");
    }
    let weights = solved.into_iter().map(|w| w.unwrap_or_else(|| unit(channels, reference))).collect();
    BeamformerWeights { weights, reference, kind, fallback_bins }
}

/// Reference-channel MVDR: `w = Phi_n^-1 Phi_t e_ref / tr(Phi_n^-1 Phi_t)`.
pub fn mvdr_weights(
    target: &SpatialCovariance,
    noise: &SpatialCovariance,
    reference: usize,
) -> Result<BeamformerWeights, BeamformError> {
    check_pair(target, noise, reference)?;
    Ok(per_bin(target, noise, reference, BeamformerKind::Mvdr, |phi_t, phi_n| {
        let chol = phi_n.clone().cholesky()?;
        let numerator = chol.solve(&hermitize(phi_t));
        let tr = trace(&numerator);
        if !(tr.re.is_finite() && tr.norm() > 0.0) {
            return None;
        }
        Some(numerator.column(reference).iter().map(|v| v / tr).collect())
    }))
}

/// Principal generalized eigenvector of `(Phi_t, Phi_n)` with blind
/// analytic normalization, phased so the reference weight is real and
/// nonnegative.
pub fn gevd_weights(
    target: &SpatialCovariance,
    noise: &SpatialCovariance,
    reference: usize,
) -> Result<BeamformerWeights, BeamformError> {
    check_pair(target, noise, reference)?;
    Ok(per_bin(target, noise, reference, BeamformerKind::Gevd, |phi_t, phi_n| {
        let (_, w) = principal_generalized_eig(&hermitize(phi_t), phi_n)?;
        let c = w.len() as f64;
        let nw = phi_n * &w;
        let num = (nw.iter().map(|v| v.norm_sqr()).sum::<f64>() / c).sqrt();
        let den = quadratic_form(phi_n, w.as_slice());
        if !(den > 0.0) {
            return None;
        }
        let mut w: Vec<Complex64> = w.iter().map(|v| v * (num / den)).collect();
        let r = w[reference];
        if r.norm() > 0.0 {
            let phase = r.conj() / r.norm();
            w.iter_mut().for_each(|v| *v *= phase);
        }
        Some(w)
    }))
}

pub fn beamformer_weights(
    kind: BeamformerKind,
    target: &SpatialCovariance,
    noise: &SpatialCovariance,
    reference: usize,
) -> Result<BeamformerWeights, BeamformError> {
    match kind {
        BeamformerKind::Mvdr => mvdr_weights(target, noise, reference),
        BeamformerKind::Gevd => gevd_weights(target, noise, reference),
    }
}

/// `y[t][f] = w_f^H x[t][f]`, as a one-channel tensor.
pub fn apply_beamformer(tensor: &StftTensor, weights: &BeamformerWeights) -> Result<StftTensor, BeamformError> {
    let (c_n, t_n, f_n) = (tensor.num_channels(), tensor.num_frames(), tensor.num_bins());
    if weights.weights.len() != f_n || weights.weights.iter().any(|w| w.len() != c_n) {
        return Err(BeamformError::Shape(format!("weights do not match {c_n} channels x {f_n} bins")));
    }
    let mut out = tensor.zeros_like(1);
    let values = out.values_mut();
    for t in 0..t_n {
        for (f, w) in weights.weights.iter().enumerate() {
            values[t * f_n + f] = (0..c_n).map(|c| w[c].conj() * tensor.get(c, t, f)).sum();
        }
    }
    Ok(out)
}
