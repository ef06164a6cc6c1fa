//! Envelope-variance channel ranking, virtual subarrays and selection
//! policies.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beamform::{apply_beamformer, estimate_covariance, mvdr_weights, BeamformError};
use crate::cacgmm::ActivityMatrix;
use crate::signal::{SignalError, StftTensor};

pub const MEL_BANDS: usize = 20;
pub const MIN_EV_FRAMES: usize = 50;
pub const DEFAULT_K: usize = 5;
pub const SINR_CLAMP_DB: f64 = 60.0;

#[derive(Debug, Error, PartialEq)]
pub enum SelectError {
    #[error("need ≥ 2 channels, got {0}")]
    TooFewChannels(usize),
    #[error("need >= {MIN_EV_FRAMES} frames for envelope variance, got {0}")]
    TooFewFrames(usize),
    #[error("subarray size K must be >= 1")]
    ZeroGroupSize,
    #[error("no frame is free of speech; add a noise-floor (no-speech) region to the annotation")]
    NoNoiseFrames,
    #[error("no frame has exactly one active speaker")]
    NoTargetFrames,
    #[error("activity has {activity} frames, tensor has {tensor}")]
    FrameMismatch { activity: usize, tensor: usize },
    #[error("policy {0:?} needs a scored subarray plan")]
    Unscored(SelectionPolicy),
    #[error("plan and ranking disagree: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Beamform(#[from] BeamformError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRanking {
    /// Channel indices, best first.
    pub order: Vec<usize>,
    /// Per channel, in channel order.
    pub scores: Vec<f64>,
    /// Channels with zero energy (score forced to 0).
    #[serde(default)]
    pub silent: Vec<usize>,
}

impl ChannelRanking {
    pub fn from_scores(scores: Vec<f64>, silent: Vec<usize>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        // stable: equal scores keep the lower index first
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        Self { order, scores, silent }
    }

    pub fn num_channels(&self) -> usize {
        self.scores.len()
    }

    /// Position of `channel` in `order`.
    pub fn rank_of(&self, channel: usize) -> Option<usize> {
        self.order.iter().position(|&c| c == channel)
    }

    pub fn best(&self) -> usize {
        self.order[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubarrayPlan {
    pub k: usize,
    pub subarrays: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sinr_db: Option<Vec<f64>>,
    /// Subarray indices, best SINR first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

impl SubarrayPlan {
    pub fn num_groups(&self) -> usize {
        self.subarrays.len()
    }

    pub fn is_scored(&self) -> bool {
        self.order.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionPolicy {
    #[serde(rename = "single", alias = "single_subarray")]
    SingleSubarray,
    #[serde(rename = "front50", alias = "front_half_subarrays")]
    FrontHalfSubarrays,
    #[serde(rename = "ev80", alias = "ev_top_80pct")]
    EvTop80Pct,
}

impl SelectionPolicy {
    pub fn needs_sinr(self) -> bool {
        !matches!(self, Self::EvTop80Pct)
    }
}

impl FromStr for SelectionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" | "single_subarray" => Ok(Self::SingleSubarray),
            "front50" | "front_half_subarrays" => Ok(Self::FrontHalfSubarrays),
            "ev80" | "ev_top_80pct" => Ok(Self::EvTop80Pct),
            other => Err(format!("unknown policy {other:?} (expected single, front50 or ev80)")),
        }
    }
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular mel filters spanning 0 Hz to Nyquist, `[band][bin]`.
pub fn mel_filterbank(bands: usize, bins: usize, sample_rate: u32) -> Vec<Vec<f64>> {
    let nyquist = sample_rate as f64 / 2.0;
    let top = hz_to_mel(nyquist);
    let edges: Vec<f64> = (0..bands + 2).map(|i| mel_to_hz(top * i as f64 / (bands + 1) as f64)).collect();
    let bin_hz = |f: usize| f as f64 * nyquist / (bins - 1).max(1) as f64;
    (0..bands)
        .map(|b| {
            let (lo, mid, hi) = (edges[b], edges[b + 1], edges[b + 2]);
            (0..bins)
                .map(|f| {
                    let hz = bin_hz(f);
                    if hz <= lo || hz >= hi {
                        0.0
                    } else if hz <= mid {
                        (hz - lo) / (mid - lo)
                    } else {
                        (hi - hz) / (hi - mid)
                    }
                })
                .collect()
        })
        .collect()
}

/// Envelope-variance score per channel, higher meaning closer or cleaner.
///
/// Each channel's mel sub-band magnitude envelope is divided by its own
/// temporal mean, cube-root compressed, and its temporal variance taken.
/// Variances are normalized per band by their maximum over channels and
/// summed over bands.
pub fn ev_scores(tensor: &StftTensor) -> Result<ChannelRanking, SelectError> {
    let (c_n, t_n, f_n) = (tensor.num_channels(), tensor.num_frames(), tensor.num_bins());
    if c_n < 2 {
        return Err(SelectError::TooFewChannels(c_n));
    }
    if t_n < MIN_EV_FRAMES {
        return Err(SelectError::TooFewFrames(t_n));
    }
    let bank = mel_filterbank(MEL_BANDS, f_n, tensor.sample_rate());

    // variances[c][b], None for silent channels
    let variances: Vec<Option<Vec<f64>>> = (0..c_n)
        .into_par_iter()
        .map(|c| {
            let spec = tensor.channel(c);
            if spec.iter().all(|v| v.norm_sqr() == 0.0) {
                return None;
            }
            let mags: Vec<f64> = spec.iter().map(|v| v.norm()).collect();
            let per_band = bank
                .iter()
                .map(|w| {
                    let env: Vec<f64> =
                        mags.chunks(f_n).map(|row| row.iter().zip(w).map(|(m, w)| m * w).sum()).collect();
                    let mean = env.iter().sum::<f64>() / t_n as f64;
                    if mean <= 0.0 {
                        return 0.0;
                    }
                    let comp: Vec<f64> = env.iter().map(|e| (e / mean).cbrt()).collect();
                    let cm = comp.iter().sum::<f64>() / t_n as f64;
                    comp.iter().map(|v| (v - cm).powi(2)).sum::<f64>() / t_n as f64
                })
                .collect();
            Some(per_band)
        })
        .collect();

    let silent: Vec<usize> = (0..c_n).filter(|&c| variances[c].is_none()).collect();
    if !silent.is_empty() {
        log::warn!("silent channels {silent:?} get envelope-variance score 0");
    }
    let mut scores = vec![0.0; c_n];
    for b in 0..MEL_BANDS {
        let max = variances.iter().flatten().map(|v| v[b]).fold(0.0, f64::max);
        if max <= 0.0 {
            continue;
        }
        for (s, v) in scores.iter_mut().zip(&variances) {
            if let Some(v) = v {
                *s += v[b] / max;
            }
        }
    }
    Ok(ChannelRanking::from_scores(scores, silent))
}

/// Consecutive runs of `k` channels from the ranking; the last group holds
/// the remainder.
pub fn partition_subarrays(ranking: &ChannelRanking, k: usize) -> Result<SubarrayPlan, SelectError> {
    if k == 0 {
        return Err(SelectError::ZeroGroupSize);
    }
    let subarrays = ranking.order.chunks(k).map(|c| c.to_vec()).collect();
    Ok(SubarrayPlan { k, subarrays, sinr_db: None, order: None })
}

fn clamp_db(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        return -SINR_CLAMP_DB;
    }
    if den <= 0.0 {
        return SINR_CLAMP_DB;
    }
    (10.0 * (num / den).log10()).clamp(-SINR_CLAMP_DB, SINR_CLAMP_DB)
}

/// SINR of each subarray's MVDR output, averaged over speakers, with the
/// subarrays sorted best first. Ties keep EV order.
pub fn score_subarrays(plan: &SubarrayPlan, tensor: &StftTensor, activity: &ActivityMatrix) -> Result<SubarrayPlan, SelectError> {
    let (t_n, f_n) = (tensor.num_frames(), tensor.num_bins());
    if activity.num_frames() != t_n {
        return Err(SelectError::FrameMismatch { activity: activity.num_frames(), tensor: t_n });
    }
    if let Some(&c) = plan.subarrays.iter().flatten().find(|&&c| c >= tensor.num_channels()) {
        return Err(SelectError::Inconsistent(format!("channel {c} not in a {}-channel tensor", tensor.num_channels())));
    }
    let speakers = activity.speakers().len();
    let active = |t: usize| (0..speakers).filter(|&k| activity.get(k, t) > 0.5).collect::<Vec<_>>();
    let mut noise_frames = Vec::new();
    let mut single: Vec<Vec<usize>> = vec![Vec::new(); speakers];
    for t in 0..t_n {
        match active(t).as_slice() {
            [] => noise_frames.push(t),
            [k] => single[*k].push(t),
            _ => {}
        }
    }
    if noise_frames.is_empty() {
        return Err(SelectError::NoNoiseFrames);
    }
    let targets: Vec<&Vec<usize>> = single.iter().filter(|f| !f.is_empty()).collect();
    if targets.is_empty() {
        return Err(SelectError::NoTargetFrames);
    }
    let frame_mask = |frames: &[usize]| {
        let mut m = vec![0.0; t_n * f_n];
        for &t in frames {
            m[t * f_n..(t + 1) * f_n].iter_mut().for_each(|v| *v = 1.0);
        }
        m
    };
    let noise_mask = frame_mask(&noise_frames);
    let target_masks: Vec<Vec<f64>> = targets.iter().map(|f| frame_mask(f)).collect();
    let mean_power = |y: &StftTensor, frames: &[usize]| {
        let s: f64 = frames.iter().map(|&t| y.channel(0)[t * f_n..(t + 1) * f_n].iter().map(|v| v.norm_sqr()).sum::<f64>()).sum();
        s / (frames.len() * f_n) as f64
    };

    let sinr: Vec<f64> = plan
        .subarrays
        .par_iter()
        .map(|group| -> Result<f64, SelectError> {
            let sub = tensor.select_channels(group)?;
            let phi_n = estimate_covariance(&sub, &noise_mask)?;
            let mut total = 0.0;
            for (mask, frames) in target_masks.iter().zip(&targets) {
                let phi_t = estimate_covariance(&sub, mask)?;
                let y = apply_beamformer(&sub, &mvdr_weights(&phi_t, &phi_n, 0)?)?;
                total += clamp_db(mean_power(&y, frames), mean_power(&y, &noise_frames));
            }
            Ok(total / targets.len() as f64)
        })
        .collect::<Result<_, _>>()?;

    let mut order: Vec<usize> = (0..plan.num_groups()).collect();
    order.sort_by(|&a, &b| sinr[b].total_cmp(&sinr[a]));
    Ok(SubarrayPlan { sinr_db: Some(sinr), order: Some(order), ..plan.clone() })
}

fn ceil_ratio(n: usize, num: usize, den: usize) -> usize {
    (n * num).div_ceil(den)
}

/// Channels chosen by `policy`, listed in EV-rank order (best first).
pub fn select_channels(plan: &SubarrayPlan, ranking: &ChannelRanking, policy: SelectionPolicy) -> Result<Vec<usize>, SelectError> {
    let n = ranking.num_channels();
    if n == 0 {
        return Err(SelectError::TooFewChannels(0));
    }
    let take_groups = |count: usize| -> Result<Vec<usize>, SelectError> {
        let order = plan.order.as_ref().ok_or(SelectError::Unscored(policy))?;
        let mut chosen: Vec<usize> = order.iter().take(count).flat_map(|&g| plan.subarrays[g].iter().copied()).collect();
        let rank = |c: &usize| ranking.rank_of(*c).ok_or_else(|| SelectError::Inconsistent(format!("channel {c} not ranked")));
        for c in &chosen {
            rank(c)?;
        }
        chosen.sort_by_key(|c| ranking.rank_of(*c));
        Ok(chosen)
    };
    match policy {
        SelectionPolicy::SingleSubarray => take_groups(1),
        SelectionPolicy::FrontHalfSubarrays => take_groups(ceil_ratio(plan.num_groups(), 1, 2)),
        SelectionPolicy::EvTop80Pct => Ok(ranking.order[..ceil_ratio(n, 4, 5)].to_vec()),
    }
}
