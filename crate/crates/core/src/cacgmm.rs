//! Complex angular central Gaussian mixture model, fit per frequency bin by
//! EM with per-frame speaker activity as initialization and constraint.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{add_diagonal, inverse_logdet, CMatrix};
use crate::rttm::SegmentList;
use crate::signal::StftTensor;

/// Name of the always-active class appended after the speakers.
pub const NOISE_CLASS: &str = "<noise>";

/// Observations whose energy is below this fraction of the tensor's mean
/// observation energy are treated as silent.
const SILENT_REL: f64 = 1e-24;
const MIN_MASS: f64 = 1e-300;
/// Slack on segment boundaries so `onset + duration` rounding cannot move
/// a frame across the boundary.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum CacgmmError {
    #[error("need ≥ 2 channels, got {0}")]
    TooFewChannels(usize),
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("activity covers frames {activity_offset}..+{activity_frames}, tensor covers {tensor_offset}..+{tensor_frames}")]
    FrameMismatch { activity_frames: usize, activity_offset: usize, tensor_frames: usize, tensor_offset: usize },
    #[error("invalid activity: {0}")]
    InvalidActivity(String),
}

/// Per-class per-frame activity in `[0, 1]`. The last class is the noise
/// class and is active everywhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityMatrix {
    classes: Vec<String>,
    frames: usize,
    values: Vec<f64>,
    frame_rate: f64,
    frame_offset: usize,
    /// Segments that extended past the last frame.
    clipped: usize,
}

impl ActivityMatrix {
    /// `speaker_rows[k][t]` for each speaker; the noise row is appended.
    pub fn from_rows(
        speakers: Vec<String>,
        speaker_rows: Vec<Vec<f64>>,
        frame_rate: f64,
        frame_offset: usize,
    ) -> Result<Self, CacgmmError> {
        if speakers.len() != speaker_rows.len() {
            return Err(CacgmmError::InvalidActivity(format!("{} speakers, {} rows", speakers.len(), speaker_rows.len())));
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(CacgmmError::InvalidActivity(format!("frame rate {frame_rate}")));
        }
        let frames = speaker_rows.first().map_or(0, |r| r.len());
        let mut values = Vec::with_capacity((speakers.len() + 1) * frames);
        for (s, row) in speakers.iter().zip(&speaker_rows) {
            if row.len() != frames {
                return Err(CacgmmError::InvalidActivity(format!("row {s:?} has {} frames, expected {frames}", row.len())));
            }
            if row.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(CacgmmError::InvalidActivity(format!("row {s:?} leaves [0, 1]")));
            }
            values.extend_from_slice(row);
        }
        values.extend(std::iter::repeat_n(1.0, frames));
        let mut classes = speakers;
        classes.push(NOISE_CLASS.to_string());
        Ok(Self { classes, frames, values, frame_rate, frame_offset, clipped: 0 })
    }

    /// Speaker ids followed by [`NOISE_CLASS`].
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn speakers(&self) -> &[String] {
        &self.classes[..self.classes.len() - 1]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_frames(&self) -> usize {
        self.frames
    }

    pub fn noise_class(&self) -> usize {
        self.classes.len() - 1
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn frame_offset(&self) -> usize {
        self.frame_offset
    }

    pub fn clipped(&self) -> usize {
        self.clipped
    }

    pub fn get(&self, class: usize, t: usize) -> f64 {
        self.values[class * self.frames + t]
    }

    pub fn row(&self, class: usize) -> &[f64] {
        &self.values[class * self.frames..(class + 1) * self.frames]
    }
}

/// Frame `t` is active for a speaker iff its center time
/// `(t + frame_offset) / frame_rate` lies in `[onset, onset + duration)` of
/// one of that speaker's segments. Speakers are taken from `segments`.
pub fn segments_to_activity(segments: &SegmentList, frame_rate: f64, n_frames: usize) -> Result<ActivityMatrix, CacgmmError> {
    segments_to_activity_for(segments, &segments.speakers(), frame_rate, 0, n_frames)
}

/// As [`segments_to_activity`] with an explicit speaker list (speakers
/// without segments get an all-zero row; segments of unlisted speakers are
/// ignored) and an absolute frame offset.
pub fn segments_to_activity_for(
    segments: &SegmentList,
    speakers: &[String],
    frame_rate: f64,
    frame_offset: usize,
    n_frames: usize,
) -> Result<ActivityMatrix, CacgmmError> {
    let mut rows = vec![vec![0.0; n_frames]; speakers.len()];
    let end_time = (frame_offset + n_frames) as f64 / frame_rate;
    let mut clipped = 0;
    for seg in segments {
        let Some(k) = speakers.iter().position(|s| *s == seg.speaker) else { continue };
        if seg.end() > end_time {
            clipped += 1;
        }
        let time = |t: usize| (t + frame_offset) as f64 / frame_rate;
        let first = ((seg.onset * frame_rate).floor() as usize).saturating_sub(frame_offset + 1);
        let mut t = first.min(n_frames);
        while t < n_frames && time(t) < seg.onset - TIME_EPS {
            t += 1;
        }
        while t < n_frames && time(t) < seg.end() - TIME_EPS {
            rows[k][t] = 1.0;
            t += 1;
        }
    }
    if clipped > 0 {
        log::warn!("{clipped} segments extend past the last frame and were clipped");
    }
    let mut m = ActivityMatrix::from_rows(speakers.to_vec(), rows, frame_rate, frame_offset)?;
    m.clipped = clipped;
    Ok(m)
}

/// How activity enters EM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Constraint {
    /// Activity multiplies the class prior in every E-step.
    #[default]
    EveryStep,
    /// Activity only sets the initial posteriors.
    InitOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmOptions {
    pub iterations: usize,
    pub constraint: Constraint,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self { iterations: 20, constraint: Constraint::EveryStep }
    }
}

/// Posteriors `gamma[k][t * bins + f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TFMaskSet {
    pub classes: Vec<String>,
    pub frames: usize,
    pub bins: usize,
    pub gamma: Vec<Vec<f64>>,
}

impl TFMaskSet {
    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }

    pub fn mask(&self, class: usize) -> &[f64] {
        &self.gamma[class]
    }

    /// Mean over frequency bins of one class's posterior, per frame.
    pub fn frame_means(&self, class: usize) -> Vec<f64> {
        self.gamma[class].chunks(self.bins).map(|row| row.iter().sum::<f64>() / self.bins as f64).collect()
    }

    /// Sum of the posteriors of every class except `class`.
    pub fn complement(&self, class: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.frames * self.bins];
        for (k, g) in self.gamma.iter().enumerate() {
            if k != class {
                out.iter_mut().zip(g).for_each(|(o, v)| *o += v);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CacgmmParams {
    /// `pi[f][k]`
    pub pi: Vec<Vec<f64>>,
    /// `shapes[f][k]`, Hermitian positive definite with trace `channels`.
    pub shapes: Vec<Vec<CMatrix>>,
    pub channels: usize,
}

#[derive(Debug, Clone)]
pub struct EmResult {
    pub masks: TFMaskSet,
    pub params: CacgmmParams,
    /// Total log-likelihood after each iteration.
    pub loglik: Vec<f64>,
    /// Time-frequency points excluded as silent.
    pub silent_points: usize,
}

struct BinFit {
    gamma: Vec<f64>,
    pi: Vec<f64>,
    shapes: Vec<CMatrix>,
    loglik: Vec<f64>,
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `z^H m z` with `m` Hermitian, flattened row-major.
#[inline]
fn hermitian_form(m: &[Complex64], z: &[Complex64]) -> f64 {
    let d = z.len();
    let mut acc = 0.0;
    for i in 0..d {
        acc += m[i * d + i].re * z[i].norm_sqr();
        let zi = z[i].conj();
        for j in i + 1..d {
            acc += 2.0 * (zi * m[i * d + j] * z[j]).re;
        }
    }
    acc
}

fn normalized_prior(weights: impl Iterator<Item = f64>, out: &mut [f64]) {
    let mut sum = 0.0;
    for (o, w) in out.iter_mut().zip(weights) {
        *o = w;
        sum += w;
    }
    if sum > 0.0 {
        out.iter_mut().for_each(|o| *o /= sum);
    } else {
        let n = out.len() as f64;
        out.iter_mut().for_each(|o| *o = 1.0 / n);
    }
}

/// EM for one bin. `z` holds `frames * d` unit vectors, `valid[t]` marks
/// usable frames, `init` and `prior` are `classes * frames`.
fn fit_bin(z: &[Complex64], valid: &[bool], init: &[f64], prior: &[f64], k_n: usize, d: usize, iterations: usize) -> BinFit {
    let t_n = valid.len();
    let t_valid = valid.iter().filter(|v| **v).count();
    let eps = 1e-10 * d as f64;
    let constant = ln_factorial(d - 1) - std::f64::consts::LN_2 - d as f64 * std::f64::consts::PI.ln();

    let mut gamma = init.to_vec();
    let mut q = vec![1.0; k_n * t_n];
    let mut pi = vec![1.0 / k_n as f64; k_n];
    let mut shapes = vec![CMatrix::identity(d, d); k_n];
    let mut inverses: Vec<Vec<Complex64>> = vec![CMatrix::identity(d, d).transpose().iter().copied().collect(); k_n];
    let mut logdets = vec![0.0; k_n];
    let mut loglik = Vec::with_capacity(iterations);
    let mut col = vec![0.0; k_n];
    let mut log_p = vec![0.0; k_n];

    for _ in 0..iterations {
        if t_valid > 0 {
            for k in 0..k_n {
                let mut mass = 0.0;
                let mut acc = vec![Complex64::new(0.0, 0.0); d * d];
                for t in (0..t_n).filter(|&t| valid[t]) {
                    let g = gamma[k * t_n + t];
                    if g == 0.0 {
                        continue;
                    }
                    mass += g;
                    let w = g / q[k * t_n + t];
                    let zt = &z[t * d..(t + 1) * d];
                    for i in 0..d {
                        let zi = zt[i] * w;
                        for j in i..d {
                            acc[i * d + j] += zi * zt[j].conj();
                        }
                    }
                }
                pi[k] = mass / t_valid as f64;
                if mass <= MIN_MASS {
                    continue;
                }
                let scale = d as f64 / mass;
                let mut b = CMatrix::from_fn(d, d, |i, j| if i <= j { acc[i * d + j] * scale } else { acc[j * d + i].conj() * scale });
                add_diagonal(&mut b, eps);
                let tr: f64 = (0..d).map(|i| b[(i, i)].re).sum();
                b *= Complex64::new(d as f64 / tr, 0.0);
                if let Some((inv, logdet)) = inverse_logdet(&b) {
                    // row-major copy of the inverse
                    inverses[k] = inv.transpose().iter().copied().collect();
                    logdets[k] = logdet;
                    shapes[k] = b;
                }
            }
        }

        let mut ll = 0.0;
        for t in 0..t_n {
            if !valid[t] {
                normalized_prior((0..k_n).map(|k| prior[k * t_n + t] * pi[k]), &mut col);
                if col.iter().any(|v| !v.is_finite()) {
                    normalized_prior((0..k_n).map(|k| prior[k * t_n + t]), &mut col);
                }
                (0..k_n).for_each(|k| gamma[k * t_n + t] = col[k]);
                continue;
            }
            let zt = &z[t * d..(t + 1) * d];
            for k in 0..k_n {
                let qk = hermitian_form(&inverses[k], zt).max(f64::MIN_POSITIVE);
                q[k * t_n + t] = qk;
                let a = prior[k * t_n + t];
                log_p[k] = if a > 0.0 && pi[k] > 0.0 {
                    a.ln() + pi[k].ln() + constant - logdets[k] - d as f64 * qk.ln()
                } else {
                    f64::NEG_INFINITY
                };
            }
            let m = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if m == f64::NEG_INFINITY {
                normalized_prior((0..k_n).map(|k| prior[k * t_n + t]), &mut col);
                (0..k_n).for_each(|k| gamma[k * t_n + t] = col[k]);
                continue;
            }
            let s: f64 = log_p.iter().map(|l| (l - m).exp()).sum();
            ll += m + s.ln();
            for k in 0..k_n {
                gamma[k * t_n + t] = (log_p[k] - m).exp() / s;
            }
        }
        loglik.push(ll);
    }
    BinFit { gamma, pi, shapes, loglik }
}

pub fn cacgmm_em(tensor: &StftTensor, activity: &ActivityMatrix, opts: &EmOptions) -> Result<EmResult, CacgmmError> {
    let (d, t_n, f_n) = (tensor.num_channels(), tensor.num_frames(), tensor.num_bins());
    if d < 2 {
        return Err(CacgmmError::TooFewChannels(d));
    }
    if opts.iterations == 0 {
        return Err(CacgmmError::NoIterations);
    }
    if activity.num_frames() != t_n || activity.frame_offset() != tensor.frame_offset() {
        return Err(CacgmmError::FrameMismatch {
            activity_frames: activity.num_frames(),
            activity_offset: activity.frame_offset(),
            tensor_frames: t_n,
            tensor_offset: tensor.frame_offset(),
        });
    }
    let k_n = activity.num_classes();

    let mut init = vec![0.0; k_n * t_n];
    let mut col = vec![0.0; k_n];
    for t in 0..t_n {
        normalized_prior((0..k_n).map(|k| activity.get(k, t)), &mut col);
        (0..k_n).for_each(|k| init[k * t_n + t] = col[k]);
    }
    let prior = match opts.constraint {
        Constraint::EveryStep => activity.values.clone(),
        Constraint::InitOnly => vec![1.0; k_n * t_n],
    };

    let n_obs = (t_n * f_n).max(1);
    let mean_energy = tensor.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / n_obs as f64;
    let threshold = SILENT_REL * mean_energy;

    let fits: Vec<(BinFit, usize)> = (0..f_n)
        .into_par_iter()
        .map(|f| {
            let mut z = vec![Complex64::new(0.0, 0.0); t_n * d];
            let mut valid = vec![false; t_n];
            for t in 0..t_n {
                let obs = &mut z[t * d..(t + 1) * d];
                for (c, o) in obs.iter_mut().enumerate() {
                    *o = tensor.get(c, t, f);
                }
                let energy: f64 = obs.iter().map(|v| v.norm_sqr()).sum();
                if energy > threshold && energy > 0.0 {
                    let norm = energy.sqrt();
                    obs.iter_mut().for_each(|v| *v /= norm);
                    valid[t] = true;
                }
            }
            let silent = valid.iter().filter(|v| !**v).count();
            (fit_bin(&z, &valid, &init, &prior, k_n, d, opts.iterations), silent)
        })
        .collect();

    let mut gamma = vec![vec![0.0; t_n * f_n]; k_n];
    let mut loglik = vec![0.0; opts.iterations];
    let mut pi = Vec::with_capacity(f_n);
    let mut shapes = Vec::with_capacity(f_n);
    let mut silent_points = 0;
    for (f, (fit, silent)) in fits.into_iter().enumerate() {
        for k in 0..k_n {
            for t in 0..t_n {
                gamma[k][t * f_n + f] = fit.gamma[k * t_n + t];
            }
        }
        loglik.iter_mut().zip(&fit.loglik).for_each(|(a, b)| *a += b);
        pi.push(fit.pi);
        shapes.push(fit.shapes);
        silent_points += silent;
    }
    Ok(EmResult {
        masks: TFMaskSet { classes: activity.classes().to_vec(), frames: t_n, bins: f_n, gamma },
        params: CacgmmParams { pi, shapes, channels: d },
        loglik,
        silent_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rttm::Segment;
    use crate::signal::{stft, MultichannelWave, StftConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn segs(list: &[(&str, f64, f64)]) -> SegmentList {
        SegmentList::new(list.iter().map(|&(s, on, dur)| Segment::new("x", s, on, dur)).collect()).unwrap()
    }

    /// Active frames by direct enumeration of center times.
    fn enumerate_active(onset: f64, end: f64, rate: f64, n: usize) -> Vec<usize> {
        (0..n).filter(|&t| {
            let c = t as f64 / rate;
            c >= onset && c < end
        }).collect()
    }

    #[test]
    fn center_time_rule() {
        let a = segments_to_activity(&segs(&[("a", 1.0, 2.0)]), 62.5, 300).unwrap();
        let active: Vec<usize> = (0..300).filter(|&t| a.get(0, t) == 1.0).collect();
        assert_eq!(active, enumerate_active(1.0, 3.0, 62.5, 300));
        assert_eq!((active[0], *active.last().unwrap()), (63, 187));
        assert!(a.row(a.noise_class()).iter().all(|v| *v == 1.0));
    }

    #[test]
    fn empty_overlapping_and_clipped() {
        let empty = segments_to_activity(&SegmentList::default(), 62.5, 10).unwrap();
        assert_eq!(empty.num_classes(), 1);
        assert!(empty.row(0).iter().all(|v| *v == 1.0));

        let m = segments_to_activity(&segs(&[("a", 0.0, 1.0), ("b", 0.5, 1.0)]), 10.0, 12).unwrap();
        assert_eq!(m.classes(), ["a", "b", NOISE_CLASS]);
        assert!((5..10).all(|t| m.get(0, t) == 1.0 && m.get(1, t) == 1.0));
        assert_eq!(m.clipped(), 1);
        assert_eq!(m.get(1, 11), 1.0);
    }

    #[test]
    fn offset_activity_matches_enumeration() {
        let list = segs(&[("a", 2.01, 1.3), ("b", 0.4, 5.0)]);
        let speakers = list.speakers();
        let full = segments_to_activity_for(&list, &speakers, 31.25, 0, 400).unwrap();
        let part = segments_to_activity_for(&list, &speakers, 31.25, 70, 100).unwrap();
        for k in 0..2 {
            assert_eq!(part.row(k), &full.row(k)[70..170]);
        }
    }

    fn random_tensor(seed: u64, channels: usize, len: usize) -> StftTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chans = (0..channels).map(|_| (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
        stft(&MultichannelWave::new(8000, chans).unwrap(), &StftConfig::new(64, 16, 64, Default::default()).unwrap())
            .unwrap()
    }

    fn two_speaker_activity(frames: usize, rate: f64) -> ActivityMatrix {
        let a: Vec<f64> = (0..frames).map(|t| if t < frames / 2 { 1.0 } else { 0.0 }).collect();
        let b: Vec<f64> = (0..frames).map(|t| if t > frames / 3 { 1.0 } else { 0.0 }).collect();
        ActivityMatrix::from_rows(vec!["a".into(), "b".into()], vec![a, b], rate, 0).unwrap()
    }

    #[test]
    fn posteriors_normalized_and_constrained() {
        let tensor = random_tensor(1, 3, 4000);
        let act = two_speaker_activity(tensor.num_frames(), tensor.frame_rate());
        let res = cacgmm_em(&tensor, &act, &EmOptions { iterations: 5, ..Default::default() }).unwrap();
        let n = tensor.num_frames() * tensor.num_bins();
        for i in 0..n {
            let s: f64 = res.masks.gamma.iter().map(|g| g[i]).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        for t in 0..tensor.num_frames() {
            for k in 0..2 {
                if act.get(k, t) == 0.0 {
                    assert!(res.masks.gamma[k][t * tensor.num_bins()..(t + 1) * tensor.num_bins()].iter().all(|v| *v == 0.0));
                }
            }
        }
        for (pi, shapes) in res.params.pi.iter().zip(&res.params.shapes) {
            assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for b in shapes {
                let tr: f64 = (0..3).map(|i| b[(i, i)].re).sum();
                assert!((tr - 3.0).abs() < 1e-9);
                assert!((b - b.adjoint()).iter().all(|v| v.norm() < 1e-10));
            }
        }
    }

    #[test]
    fn loglik_non_decreasing() {
        for seed in 0..5 {
            let tensor = random_tensor(seed, 4, 3000);
            let act = two_speaker_activity(tensor.num_frames(), tensor.frame_rate());
            for constraint in [Constraint::EveryStep, Constraint::InitOnly] {
                let res = cacgmm_em(&tensor, &act, &EmOptions { iterations: 8, constraint }).unwrap();
                for w in res.loglik.windows(2) {
                    assert!(w[1] - w[0] >= -1e-6 * w[0].abs(), "{:?}", res.loglik);
                }
            }
        }
    }

    #[test]
    fn phase_and_scale_invariance() {
        let tensor = random_tensor(7, 3, 3000);
        let act = two_speaker_activity(tensor.num_frames(), tensor.frame_rate());
        let opts = EmOptions { iterations: 6, ..Default::default() };
        let base = cacgmm_em(&tensor, &act, &opts).unwrap();

        let mut rotated = tensor.clone();
        let frames_bins = tensor.num_frames() * tensor.num_bins();
        let phase = Complex64::from_polar(1.0, 1.234);
        rotated.values_mut()[frames_bins..2 * frames_bins].iter_mut().for_each(|v| *v *= phase);
        let mut scaled = tensor.clone();
        scaled.scale(37.5);
        for other in [rotated, scaled] {
            let res = cacgmm_em(&other, &act, &opts).unwrap();
            for (g, h) in base.masks.gamma.iter().zip(&res.masks.gamma) {
                assert!(g.iter().zip(h).all(|(a, b)| (a - b).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn deterministic_and_silent_frames_follow_prior() {
        let mut tensor = random_tensor(9, 2, 3000);
        let bins = tensor.num_bins();
        let frames = tensor.num_frames();
        for c in 0..2 {
            for f in 0..bins {
                tensor.set(c, 10, f, Complex64::new(0.0, 0.0));
            }
        }
        let act = two_speaker_activity(frames, tensor.frame_rate());
        let opts = EmOptions { iterations: 4, ..Default::default() };
        let a = cacgmm_em(&tensor, &act, &opts).unwrap();
        let b = cacgmm_em(&tensor, &act, &opts).unwrap();
        assert_eq!(a.masks, b.masks);
        assert_eq!(a.loglik, b.loglik);
        assert_eq!(a.silent_points, bins);
        // frame 10: only speaker a and noise are active
        for f in 0..bins {
            let pi = &a.params.pi[f];
            let expected = pi[0] / (pi[0] + pi[2]);
            assert!((a.masks.gamma[0][10 * bins + f] - expected).abs() < 1e-12);
            assert_eq!(a.masks.gamma[1][10 * bins + f], 0.0);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let tensor = random_tensor(3, 2, 2000);
        let act = two_speaker_activity(tensor.num_frames(), tensor.frame_rate());
        assert_eq!(cacgmm_em(&tensor, &act, &EmOptions { iterations: 0, ..Default::default() }).unwrap_err(), CacgmmError::NoIterations);
        let mono = tensor.select_channels(&[0]).unwrap();
        assert_eq!(cacgmm_em(&mono, &act, &EmOptions::default()).unwrap_err(), CacgmmError::TooFewChannels(1));
        let short = two_speaker_activity(tensor.num_frames() - 1, tensor.frame_rate());
        assert!(matches!(cacgmm_em(&tensor, &short, &EmOptions::default()), Err(CacgmmError::FrameMismatch { .. })));
    }
}
