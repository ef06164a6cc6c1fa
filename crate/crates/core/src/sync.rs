//! Cross-channel time alignment by normalized cross-correlation.
//!
//! A coarse lag is found on 50 Hz RMS envelopes, then refined at sample
//! resolution within two envelope frames of it.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::{MultichannelWave, SignalError};

const ENVELOPE_RATE_HZ: u32 = 50;
const REFINE_FRAMES: i64 = 2;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SyncError {
    #[error("correlation undefined: {0} signal has zero energy")]
    Silent(&'static str),
    #[error("max_lag {max_lag} must be smaller than the shorter signal ({len} samples)")]
    MaxLagTooLarge { max_lag: usize, len: usize },
    #[error("reference channel {reference} out of range for {channels} channels")]
    ReferenceOutOfRange { reference: usize, channels: usize },
    #[error("channel {channel}: {source}")]
    Channel { channel: usize, source: Box<SyncError> },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Lag of `channel` relative to the reference; positive means the channel is
/// delayed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagEstimate {
    pub channel: usize,
    #[serde(rename = "lag_samples")]
    pub lag: i64,
    pub peak: f64,
}

fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Candidate lags ordered so that the first maximum wins ties: 0, -1, 1, -2, 2, ...
fn tie_order(lo: i64, hi: i64) -> impl Iterator<Item = i64> {
    let reach = lo.abs().max(hi.abs());
    (0..=reach).flat_map(|m| if m == 0 { vec![0] } else { vec![-m, m] }).filter(move |l| *l >= lo && *l <= hi)
}

fn argmax_lag(lo: i64, hi: i64, score: impl Fn(i64) -> f64) -> (i64, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for l in tie_order(lo, hi) {
        let s = score(l);
        if s > best.1 + TIE_EPS {
            best = (l, s);
        }
    }
    best
}

/// `sum_n x[n] * y[n + lag]` for every lag in `[lo, hi]`, via FFT.
fn cross_correlation(x: &[f64], y: &[f64], lo: i64, hi: i64) -> Vec<f64> {
    let size = (x.len() + y.len()).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut xf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    xf.resize(size, Complex64::new(0.0, 0.0));
    let mut yf: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    yf.resize(size, Complex64::new(0.0, 0.0));
    fwd.process(&mut xf);
    fwd.process(&mut yf);
    let mut r: Vec<Complex64> = xf.iter().zip(&yf).map(|(a, b)| a.conj() * b).collect();
    inv.process(&mut r);
    (lo..=hi).map(|l| r[l.rem_euclid(size as i64) as usize].re / size as f64).collect()
}

fn direct_correlation(x: &[f64], y: &[f64], lag: i64) -> f64 {
    let (xs, ys) = if lag >= 0 { (0usize, lag as usize) } else { ((-lag) as usize, 0usize) };
    let n = x.len().saturating_sub(xs).min(y.len().saturating_sub(ys));
    (0..n).map(|k| x[xs + k] * y[ys + k]).sum()
}

fn envelope(x: &[f64], frame: usize) -> Vec<f64> {
    let env: Vec<f64> = x.chunks(frame).map(|c| (energy(c) / c.len() as f64).sqrt()).collect();
    let mean = env.iter().sum::<f64>() / env.len().max(1) as f64;
    env.into_iter().map(|v| v - mean).collect()
}

/// Lag of `y` relative to `x` maximizing the cross-correlation normalized by
/// both signals' total energy, searched over `[-max_lag, max_lag]`. Ties go
/// to the smaller `|lag|`, then to the negative lag.
pub fn estimate_lag(x: &[f64], y: &[f64], max_lag: usize, sample_rate: u32) -> Result<LagEstimate, SyncError> {
    let len = x.len().min(y.len());
    if max_lag >= len {
        return Err(SyncError::MaxLagTooLarge { max_lag, len });
    }
    let (ex, ey) = (energy(x), energy(y));
    if ex <= 0.0 {
        return Err(SyncError::Silent("first"));
    }
    if ey <= 0.0 {
        return Err(SyncError::Silent("second"));
    }
    let norm = (ex * ey).sqrt();
    let max_lag = max_lag as i64;

    let frame = ((sample_rate / ENVELOPE_RATE_HZ) as usize).max(1);
    let (ex_env, ey_env) = (envelope(x, frame), envelope(y, frame));
    let env_norm = (energy(&ex_env) * energy(&ey_env)).sqrt();
    let (lo, hi) = if env_norm > 0.0 {
        let reach = (max_lag + frame as i64 - 1) / frame as i64;
        let coarse = cross_correlation(&ex_env, &ey_env, -reach, reach);
        let (best, _) = argmax_lag(-reach, reach, |l| coarse[(l + reach) as usize] / env_norm);
        let center = best * frame as i64;
        let span = REFINE_FRAMES * frame as i64;
        ((center - span).max(-max_lag), (center + span).min(max_lag))
    } else {
        // flat envelopes carry no timing information
        (-max_lag, max_lag)
    };
    let (lo, hi) = if lo > hi { (-max_lag, max_lag) } else { (lo, hi) };

    let fine = cross_correlation(x, y, lo, hi);
    let (lag, _) = argmax_lag(lo, hi, |l| fine[(l - lo) as usize] / norm);
    let peak = (direct_correlation(x, y, lag) / norm).clamp(-1.0, 1.0);
    Ok(LagEstimate { channel: 1, lag, peak })
}

/// Delay-compensate every channel against `reference`. Each channel is
/// shifted by `-lag` and zero-filled at the vacated end; lengths are kept.
pub fn synchronize(
    wave: &MultichannelWave,
    reference: usize,
    max_lag: usize,
) -> Result<(MultichannelWave, Vec<LagEstimate>), SyncError> {
    let channels = wave.num_channels();
    if reference >= channels {
        return Err(SyncError::ReferenceOutOfRange { reference, channels });
    }
    let ref_signal = wave.channel(reference);
    let estimates: Vec<LagEstimate> = (0..channels)
        .into_par_iter()
        .map(|c| {
            if c == reference {
                return Ok(LagEstimate { channel: c, lag: 0, peak: 1.0 });
            }
            estimate_lag(ref_signal, wave.channel(c), max_lag, wave.sample_rate())
                .map(|e| LagEstimate { channel: c, ..e })
                .map_err(|e| SyncError::Channel { channel: c, source: Box::new(e) })
        })
        .collect::<Result<_, _>>()?;

    let n = wave.len();
    let shifted = estimates
        .iter()
        .map(|e| {
            let src = wave.channel(e.channel);
            (0..n as i64)
                .map(|k| {
                    let from = k + e.lag;
                    if from >= 0 && (from as usize) < n { src[from as usize] } else { 0.0 }
                })
                .collect()
        })
        .collect();
    Ok((MultichannelWave::new(wave.sample_rate(), shifted)?, estimates))
}
