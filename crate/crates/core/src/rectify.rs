//! Sliding-window cACGMM rectification of an initial diarization.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cacgmm::{cacgmm_em, segments_to_activity_for, CacgmmError, Constraint, EmOptions};
use crate::rttm::{RttmError, Segment, SegmentList};
use crate::signal::{stft_range, MultichannelWave, SignalError, StftConfig};

#[derive(Debug, Error)]
pub enum RectifyError {
    #[error("invalid rectify config: {0}")]
    InvalidConfig(String),
    #[error("initial diarization is empty")]
    EmptyInit,
    #[error("need ≥ 2 channels, got {0}")]
    TooFewChannels(usize),
    #[error("frame {0} is not covered by any window")]
    Uncovered(usize),
    #[error("window shape mismatch: {0}")]
    Shape(String),
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Cacgmm(#[from] CacgmmError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Rttm(#[from] RttmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RectifyConfig {
    pub window_s: f64,
    pub shift_s: f64,
    pub threshold: f64,
    pub median_frames: usize,
    pub min_segment_s: f64,
    pub min_gap_s: f64,
    pub em_iterations: usize,
}

impl Default for RectifyConfig {
    fn default() -> Self {
        Self {
            window_s: 120.0,
            shift_s: 60.0,
            threshold: 0.5,
            median_frames: 11,
            min_segment_s: 0.2,
            min_gap_s: 0.3,
            em_iterations: 10,
        }
    }
}

impl RectifyConfig {
    pub fn validate(&self) -> Result<(), RectifyError> {
        let bad = |m: String| Err(RectifyError::InvalidConfig(m));
        if !(self.window_s.is_finite() && self.shift_s > 0.0 && self.shift_s <= self.window_s) {
            return bad(format!("need 0 < shift_s ({}) <= window_s ({})", self.shift_s, self.window_s));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold {} must lie in (0, 1)", self.threshold));
        }
        if self.median_frames.is_multiple_of(2) {
            return bad(format!("median_frames {} must be odd", self.median_frames));
        }
        if !(self.min_segment_s >= 0.0 && self.min_gap_s >= 0.0) {
            return bad("min_segment_s and min_gap_s must be >= 0".into());
        }
        if self.em_iterations == 0 {
            return bad("em_iterations must be >= 1".into());
        }
        Ok(())
    }
}

/// Per-speaker per-frame speech probability.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameProbabilities {
    pub speakers: Vec<String>,
    pub frame_rate: f64,
    /// `probs[speaker][frame]`
    pub probs: Vec<Vec<f64>>,
    /// Number of windows covering each frame.
    pub coverage: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    speakers: Vec<String>,
    frame_rate: f64,
    n_frames: usize,
}

impl FrameProbabilities {
    pub fn num_frames(&self) -> usize {
        self.coverage.len()
    }

    /// Row-major float32 (speaker-major) little-endian bytes.
    pub fn to_f32_bytes(&self) -> Vec<u8> {
        self.probs.iter().flatten().flat_map(|&p| (p as f32).to_le_bytes()).collect()
    }

    /// Writes `<prefix>.f32` and the `<prefix>.json` sidecar.
    pub fn write(&self, prefix: &Path) -> Result<(), RectifyError> {
        let sidecar = Sidecar { speakers: self.speakers.clone(), frame_rate: self.frame_rate, n_frames: self.num_frames() };
        let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        for (ext, bytes) in [("f32", self.to_f32_bytes()), ("json", json.into_bytes())] {
            let path = prefix.with_extension(ext);
            std::fs::File::create(&path)
                .and_then(|mut f| f.write_all(&bytes))
                .map_err(|source| RectifyError::Io { path: path.display().to_string(), source })?;
        }
        Ok(())
    }
}

/// Window start times in seconds: every `shift_s` while the window fits
/// strictly inside the recording, then one right-aligned to its end.
pub fn window_starts(duration_s: f64, window_s: f64, shift_s: f64) -> Vec<f64> {
    if duration_s <= window_s {
        return vec![0.0];
    }
    let mut starts = Vec::new();
    let mut s = 0.0;
    let mut i = 0u32;
    while s + window_s < duration_s {
        starts.push(s);
        i += 1;
        s = i as f64 * shift_s;
    }
    starts.push(duration_s - window_s);
    starts
}

/// Frame range `[start, end)` of each window.
pub fn window_frames(duration_s: f64, total_frames: usize, frame_rate: f64, cfg: &RectifyConfig) -> Vec<(usize, usize)> {
    let starts = window_starts(duration_s, cfg.window_s, cfg.shift_s);
    let last = starts.len() - 1;
    starts
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let a = ((s * frame_rate).round() as usize).min(total_frames);
            let b = if i == last { total_frames } else { (((s + cfg.window_s) * frame_rate).round() as usize).min(total_frames) };
            (a, b)
        })
        .collect()
}

/// Probabilities of one window, starting at absolute frame `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowProbabilities {
    pub start: usize,
    /// `probs[speaker][local frame]`
    pub probs: Vec<Vec<f64>>,
}

/// Arithmetic mean of the windows covering each frame.
pub fn combine_windows(
    windows: &[WindowProbabilities],
    speakers: &[String],
    frame_rate: f64,
    n_frames: usize,
) -> Result<FrameProbabilities, RectifyError> {
    let mut sums = vec![vec![0.0; n_frames]; speakers.len()];
    let mut coverage = vec![0u32; n_frames];
    for w in windows {
        if w.probs.len() != speakers.len() {
            return Err(RectifyError::Shape(format!("{} rows for {} speakers", w.probs.len(), speakers.len())));
        }
        let len = w.probs.first().map_or(0, Vec::len);
        if w.start + len > n_frames || w.probs.iter().any(|r| r.len() != len) {
            return Err(RectifyError::Shape(format!("window at {} with {len} frames exceeds {n_frames}", w.start)));
        }
        for (row, sum) in w.probs.iter().zip(&mut sums) {
            for (t, p) in row.iter().enumerate() {
                sum[w.start + t] += p;
            }
        }
        coverage[w.start..w.start + len].iter_mut().for_each(|c| *c += 1);
    }
    if let Some(t) = coverage.iter().position(|&c| c == 0) {
        return Err(RectifyError::Uncovered(t));
    }
    let probs = sums
        .into_iter()
        .map(|row| row.iter().zip(&coverage).map(|(s, &c)| (s / c as f64).clamp(0.0, 1.0)).collect())
        .collect();
    Ok(FrameProbabilities { speakers: speakers.to_vec(), frame_rate, probs, coverage })
}

/// Majority vote over a centered window, truncated at the edges.
fn median_binary(x: &[bool], width: usize) -> Vec<bool> {
    let half = width / 2;
    let mut prefix = vec![0usize; x.len() + 1];
    for (i, &v) in x.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v as usize;
    }
    (0..x.len())
        .map(|t| {
            let (a, b) = (t.saturating_sub(half), (t + half + 1).min(x.len()));
            2 * (prefix[b] - prefix[a]) > b - a
        })
        .collect()
}

/// Threshold, median-filter, then turn runs into segments. Frame `t`
/// stands for `[t, t + 1) / frame_rate`. Segments shorter than
/// `min_segment_s` are dropped, then same-speaker gaps shorter than
/// `min_gap_s` are closed.
pub fn probabilities_to_segments(probs: &FrameProbabilities, cfg: &RectifyConfig, session: &str) -> SegmentList {
    let fr = probs.frame_rate;
    let mut out = Vec::new();
    for (speaker, row) in probs.speakers.iter().zip(&probs.probs) {
        let active: Vec<bool> = row.iter().map(|&p| p > cfg.threshold).collect();
        let active = median_binary(&active, cfg.median_frames.max(1));
        let mut runs: Vec<(f64, f64)> = Vec::new();
        let mut t = 0;
        while t < active.len() {
            if !active[t] {
                t += 1;
                continue;
            }
            let start = t;
            while t < active.len() && active[t] {
                t += 1;
            }
            runs.push((start as f64 / fr, t as f64 / fr));
        }
        runs.retain(|(a, b)| b - a >= cfg.min_segment_s - 1e-9);
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in runs {
            match merged.last_mut() {
                Some(last) if a - last.1 < cfg.min_gap_s - 1e-9 => last.1 = b,
                _ => merged.push((a, b)),
            }
        }
        out.extend(merged.into_iter().map(|(a, b)| Segment::new(session, speaker.clone(), a, b - a)));
    }
    SegmentList::new(out).expect("runs have positive length")
}

/// One rectification stage.
pub fn rectify(
    wave: &MultichannelWave,
    init: &SegmentList,
    cfg: &RectifyConfig,
    stft_cfg: &StftConfig,
) -> Result<(SegmentList, FrameProbabilities), RectifyError> {
    cfg.validate()?;
    stft_cfg.validate()?;
    if init.is_empty() {
        return Err(RectifyError::EmptyInit);
    }
    if wave.num_channels() < 2 {
        return Err(RectifyError::TooFewChannels(wave.num_channels()));
    }
    let speakers = init.speakers();
    let fr = wave.sample_rate() as f64 / stft_cfg.hop as f64;
    let total = stft_cfg.frames_for(wave.len());
    let em = EmOptions { iterations: cfg.em_iterations, constraint: Constraint::InitOnly };

    let mut windows = Vec::new();
    for (a, b) in window_frames(wave.duration_s(), total, fr, cfg) {
        let tensor = stft_range(wave, stft_cfg, a, b)?;
        let activity = segments_to_activity_for(init, &speakers, fr, a, b - a)?;
        let fit = cacgmm_em(&tensor, &activity, &em)?;
        let probs = (0..speakers.len()).map(|k| fit.masks.frame_means(k)).collect();
        windows.push(WindowProbabilities { start: a, probs });
    }
    let probs = combine_windows(&windows, &speakers, fr, total)?;
    let session = init.session().unwrap_or("rect").to_string();
    Ok((probabilities_to_segments(&probs, cfg, &session), probs))
}

/// `stages` rectifications, each fed the previous output. Returns the
/// output of every stage.
pub fn rectify_stages(
    wave: &MultichannelWave,
    init: &SegmentList,
    cfg: &RectifyConfig,
    stft_cfg: &StftConfig,
    stages: usize,
) -> Result<Vec<(SegmentList, FrameProbabilities)>, RectifyError> {
    let mut out: Vec<(SegmentList, FrameProbabilities)> = Vec::with_capacity(stages);
    for _ in 0..stages {
        let input = out.last().map_or(init, |(s, _)| s);
        out.push(rectify(wave, input, cfg, stft_cfg)?);
    }
    Ok(out)
}
