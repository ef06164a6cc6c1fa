//! Deterministic synthetic microphone-array scenes with ground truth.
//!
//! Sources are point emitters with fractional-delay propagation at 343 m/s
//! and `1/r` attenuation, optionally followed by an exponentially decaying
//! velvet-noise tail. Diffuse noise is independent pink noise per mic.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rttm::{Segment, SegmentList};
use crate::signal::{read_wav, MultichannelWave, SignalError};

pub const SPEED_OF_SOUND: f64 = 343.0;
const SINC_HALF_WIDTH: i64 = 16;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scene at {pointer}: {message}")]
    InvalidSpec { pointer: String, message: String },
    #[error("source {source_index} coincides with mic {mic}")]
    Coincident { source_index: usize, mic: usize },
    #[error("source file: {0}")]
    SourceFile(String),
    #[error("target signal is silent")]
    SilentTarget,
    #[error("length mismatch: estimate {estimate}, target {target}")]
    LengthMismatch { estimate: usize, target: usize },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> SimError {
    SimError::InvalidSpec { pointer: pointer.into(), message: message.into() }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Room {
    #[default]
    Anechoic,
    /// Exponential-decay tail; `decay_s` is the time to fall by 60 dB.
    Reverb { decay_s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalKind {
    /// Pink noise amplitude-modulated at a syllabic rate of about 4 Hz.
    SpeechLike,
    Sinusoid { freq_hz: f64 },
    /// First channel of a WAV file at the render sample rate.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub id: String,
    pub position: [f64; 3],
    pub signal: SignalKind,
    #[serde(default)]
    pub gain_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub source: String,
    pub onset: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    #[serde(default = "default_session")]
    pub session: String,
    pub duration_s: f64,
    #[serde(default)]
    pub room: Room,
    pub mics: Vec<[f64; 3]>,
    pub sources: Vec<SourceSpec>,
    /// A source is audible only inside its schedule entries.
    #[serde(default)]
    pub schedule: Vec<ScheduleEntry>,
    /// Diffuse noise power relative to the mean clean-mixture power, in dB.
    #[serde(default)]
    pub noise_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_session() -> String {
    "sim".to_string()
}

impl SceneSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(invalid("/duration_s", "must be positive"));
        }
        if self.mics.is_empty() {
            return Err(invalid("/mics", "need at least one microphone"));
        }
        if self.sources.is_empty() {
            return Err(invalid("/sources", "need at least one source"));
        }
        if let Room::Reverb { decay_s } = self.room {
            if !(decay_s.is_finite() && decay_s > 0.0) {
                return Err(invalid("/room/decay_s", "must be positive"));
            }
        }
        let mut ids = BTreeSet::new();
        for (i, s) in self.sources.iter().enumerate() {
            if s.id.is_empty() || s.id.contains(char::is_whitespace) {
                return Err(invalid(format!("/sources/{i}/id"), "must be a non-empty token"));
            }
            if !ids.insert(s.id.as_str()) {
                return Err(invalid(format!("/sources/{i}/id"), format!("duplicate id {:?}", s.id)));
            }
            if !s.gain_db.is_finite() {
                return Err(invalid(format!("/sources/{i}/gain_db"), "must be finite"));
            }
            if let SignalKind::Sinusoid { freq_hz } = s.signal {
                if !(freq_hz.is_finite() && freq_hz >= 0.0) {
                    return Err(invalid(format!("/sources/{i}/signal/freq_hz"), "must be non-negative"));
                }
            }
        }
        for (i, e) in self.schedule.iter().enumerate() {
            if !ids.contains(e.source.as_str()) {
                return Err(invalid(format!("/schedule/{i}/source"), format!("unknown source {:?}", e.source)));
            }
            if !(e.onset.is_finite() && e.onset >= 0.0) {
                return Err(invalid(format!("/schedule/{i}/onset"), "must be non-negative"));
            }
            if !(e.duration.is_finite() && e.duration > 0.0) {
                return Err(invalid(format!("/schedule/{i}/duration"), "must be positive"));
            }
            if e.onset + e.duration > self.duration_s + 1e-9 {
                return Err(invalid(format!("/schedule/{i}/duration"), "extends past the scene duration"));
            }
        }
        if let Some(db) = self.noise_db {
            if !db.is_finite() {
                return Err(invalid("/noise_db", "must be finite"));
            }
        }
        Ok(())
    }

    pub fn truth(&self) -> SegmentList {
        SegmentList::new(
            self.schedule.iter().map(|e| Segment::new(self.session.clone(), e.source.clone(), e.onset, e.duration)).collect(),
        )
        .expect("validated schedule")
    }
}

#[derive(Debug, Clone)]
pub struct Render {
    pub mixture: MultichannelWave,
    /// Per-source multichannel images, in source order.
    pub images: Vec<MultichannelWave>,
    pub noise: MultichannelWave,
    pub truth: SegmentList,
    pub source_ids: Vec<String>,
}

impl Render {
    pub fn image(&self, id: &str) -> Option<&MultichannelWave> {
        self.source_ids.iter().position(|s| s == id).map(|i| &self.images[i])
    }
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn stream_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03).wrapping_add(stream)
}

/// Pink noise via Kellet's refined filter on white Gaussian noise.
pub fn pink_noise(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut b = [0.0f64; 7];
    (0..n)
        .map(|_| {
            let white: f64 = rng.sample(StandardNormal);
            b[0] = 0.99886 * b[0] + white * 0.0555179;
            b[1] = 0.99332 * b[1] + white * 0.0750759;
            b[2] = 0.96900 * b[2] + white * 0.1538520;
            b[3] = 0.86650 * b[3] + white * 0.3104856;
            b[4] = 0.55000 * b[4] + white * 0.5329522;
            b[5] = -0.7616 * b[5] - white * 0.0168980;
            let out = b.iter().sum::<f64>() + white * 0.5362;
            b[6] = white * 0.115926;
            out
        })
        .collect()
}

/// Syllable-rate envelope: raised-cosine bumps every ~250 ms over a -20 dB floor.
fn syllable_envelope(n: usize, sample_rate: u32, rng: &mut impl Rng) -> Vec<f64> {
    let sr = sample_rate as f64;
    let mut env = vec![0.1; n];
    let mut start = 0.0;
    while (start * sr) < n as f64 {
        let len = rng.random_range(0.2..0.3);
        let peak = rng.random_range(0.4..1.0);
        let a = (start * sr) as usize;
        let b = (((start + len) * sr) as usize).min(n);
        for (k, e) in env[a..b].iter_mut().enumerate() {
            let phase = k as f64 / (b - a).max(1) as f64;
            *e = 0.1 + (peak - 0.1) * 0.5 * (1.0 - (2.0 * PI * phase).cos());
        }
        start += len;
    }
    env
}

fn normalize_rms(x: &mut [f64]) {
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt();
    if rms > 0.0 {
        x.iter_mut().for_each(|v| *v /= rms);
    }
}

/// Unit-RMS speech-like signal.
pub fn speech_like(n: usize, sample_rate: u32, rng: &mut impl Rng) -> Vec<f64> {
    let mut x = pink_noise(n, rng);
    normalize_rms(&mut x);
    let env = syllable_envelope(n, sample_rate, rng);
    x.iter_mut().zip(&env).for_each(|(v, e)| *v *= e);
    normalize_rms(&mut x);
    x
}

/// Exponentially decaying velvet-noise tail of `decay_s` seconds with unit
/// energy; the 60 dB decay point is at the end.
pub fn velvet_tail(decay_s: f64, sample_rate: u32, rng: &mut impl Rng) -> Vec<f64> {
    let sr = sample_rate as f64;
    let len = (decay_s * sr).ceil().max(1.0) as usize;
    let spacing = (sr / 2000.0).max(1.0);
    let mut tail = vec![0.0; len];
    let mut cell = 0.0;
    while cell < len as f64 {
        let pos = (cell + rng.random_range(0.0..spacing)) as usize;
        if pos < len {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            tail[pos] = sign * (-6.907_755 * pos as f64 / len as f64).exp();
        }
        cell += spacing;
    }
    let energy: f64 = tail.iter().map(|v| v * v).sum();
    if energy > 0.0 {
        tail.iter_mut().for_each(|v| *v /= energy.sqrt());
    }
    tail
}

/// Hann-windowed sinc impulse delayed by `delay` samples, scaled by `gain`,
/// added into `kernel`. Integer delays produce a single exact tap.
fn add_fractional_impulse(kernel: &mut [f64], delay: f64, gain: f64) {
    let base = delay.floor() as i64;
    let frac = delay - base as f64;
    if frac.abs() < 1e-9 {
        if let Some(v) = kernel.get_mut(base as usize) {
            *v += gain;
        }
        return;
    }
    for k in base - SINC_HALF_WIDTH + 1..=base + SINC_HALF_WIDTH {
        if k < 0 || k as usize >= kernel.len() {
            continue;
        }
        let x = k as f64 - delay;
        let sinc = (PI * x).sin() / (PI * x);
        let w = 0.5 * (1.0 + (PI * x / SINC_HALF_WIDTH as f64).cos());
        kernel[k as usize] += gain * sinc * w;
    }
}

/// Linear convolution of `x` with `h`, truncated to `x.len()` samples,
/// computed by FFT overlap-add.
pub fn fft_convolve(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.is_empty() || h.is_empty() {
        return vec![0.0; x.len()];
    }
    let size = (4 * h.len()).max(4096).next_power_of_two();
    let block = size - h.len() + 1;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut hf: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    hf.resize(size, Complex64::new(0.0, 0.0));
    fwd.process(&mut hf);
    let mut out = vec![0.0; x.len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    for start in (0..x.len()).step_by(block) {
        let end = (start + block).min(x.len());
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (b, &v) in buf.iter_mut().zip(&x[start..end]) {
            b.re = v;
        }
        fwd.process(&mut buf);
        buf.iter_mut().zip(&hf).for_each(|(b, h)| *b *= h);
        inv.process(&mut buf);
        for (k, v) in buf.iter().enumerate() {
            let n = start + k;
            if n >= x.len() {
                break;
            }
            out[n] += v.re / size as f64;
        }
    }
    out
}

fn dry_signal(
    spec: &SourceSpec,
    index: usize,
    n: usize,
    sample_rate: u32,
    rng: &mut impl Rng,
) -> Result<Vec<f64>, SimError> {
    let mut x = match &spec.signal {
        SignalKind::SpeechLike => speech_like(n, sample_rate, rng),
        SignalKind::Sinusoid { freq_hz } => (0..n)
            .map(|k| 2f64.sqrt() * (2.0 * PI * freq_hz * k as f64 / sample_rate as f64).sin())
            .collect(),
        SignalKind::File { path } => {
            let w = read_wav(path).map_err(|e| SimError::SourceFile(format!("/sources/{index}/signal/path: {e}")))?;
            if w.sample_rate() != sample_rate {
                return Err(SimError::Signal(SignalError::RateMismatch(w.sample_rate(), sample_rate)));
            }
            let mut x = w.channel(0).to_vec();
            x.resize(n, 0.0);
            normalize_rms(&mut x);
            x
        }
    };
    let gain = 10f64.powf(spec.gain_db / 20.0);
    x.iter_mut().for_each(|v| *v *= gain);
    Ok(x)
}

pub fn render(spec: &SceneSpec, sample_rate: u32) -> Result<Render, SimError> {
    spec.validate()?;
    if sample_rate == 0 {
        return Err(SignalError::ZeroSampleRate.into());
    }
    let sr = sample_rate as f64;
    let n = (spec.duration_s * sr).round() as usize;
    let n_mics = spec.mics.len();

    let mut images = Vec::with_capacity(spec.sources.len());
    for (i, src) in spec.sources.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(spec.seed, 1 + i as u64));
        let mut dry = dry_signal(src, i, n, sample_rate, &mut rng)?;
        let mut gate = vec![false; n];
        for e in spec.schedule.iter().filter(|e| e.source == src.id) {
            let a = (e.onset * sr).ceil() as usize;
            let b = (((e.onset + e.duration) * sr).ceil() as usize).min(n);
            gate[a.min(n)..b].iter_mut().for_each(|g| *g = true);
        }
        dry.iter_mut().zip(&gate).for_each(|(v, g)| if !g { *v = 0.0 });

        let mut channels = Vec::with_capacity(n_mics);
        for (m, &mic) in spec.mics.iter().enumerate() {
            let r = distance(src.position, mic);
            if r < 1e-3 {
                return Err(SimError::Coincident { source_index: i, mic: m });
            }
            let delay = r / SPEED_OF_SOUND * sr;
            let tail = match spec.room {
                Room::Anechoic => Vec::new(),
                Room::Reverb { decay_s } => {
                    let mut trng =
                        ChaCha8Rng::seed_from_u64(stream_seed(spec.seed, 1000 + (i * n_mics + m) as u64));
                    velvet_tail(decay_s, sample_rate, &mut trng)
                }
            };
            // tail starts 2 ms after the direct path, with the same energy
            let tail_start = delay.ceil() as usize + (0.002 * sr) as usize;
            let len = (delay.ceil() as usize + SINC_HALF_WIDTH as usize + 1).max(tail_start + tail.len());
            let mut kernel = vec![0.0; len];
            add_fractional_impulse(&mut kernel, delay, 1.0 / r);
            for (k, t) in tail.iter().enumerate() {
                kernel[tail_start + k] += t / r;
            }
            channels.push(fft_convolve(&dry, &kernel));
        }
        images.push(MultichannelWave::new(sample_rate, channels)?);
    }

    let mut clean = vec![vec![0.0; n]; n_mics];
    for img in &images {
        for (m, ch) in clean.iter_mut().enumerate() {
            ch.iter_mut().zip(img.channel(m)).for_each(|(a, b)| *a += b);
        }
    }
    let mut noise = vec![vec![0.0; n]; n_mics];
    if let Some(db) = spec.noise_db {
        let power = clean.iter().flatten().map(|v| v * v).sum::<f64>() / (n * n_mics).max(1) as f64;
        let scale = (power * 10f64.powf(db / 10.0)).sqrt();
        for (m, ch) in noise.iter_mut().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(spec.seed, 500_000 + m as u64));
            let mut p = pink_noise(n, &mut rng);
            normalize_rms(&mut p);
            ch.iter_mut().zip(&p).for_each(|(a, b)| *a = b * scale);
        }
    }
    let mixture: Vec<Vec<f64>> = clean
        .iter()
        .zip(&noise)
        .map(|(c, z)| c.iter().zip(z).map(|(a, b)| a + b).collect())
        .collect();

    Ok(Render {
        mixture: MultichannelWave::new(sample_rate, mixture)?,
        images,
        noise: MultichannelWave::new(sample_rate, noise)?,
        truth: spec.truth(),
        source_ids: spec.sources.iter().map(|s| s.id.clone()).collect(),
    })
}

pub const SI_SNR_CLAMP_DB: f64 = 60.0;

/// Scale-invariant SNR of `estimate` against `target` (both mean-removed),
/// clamped to +-60 dB.
pub fn si_snr(estimate: &[f64], target: &[f64]) -> Result<f64, SimError> {
    if estimate.len() != target.len() {
        return Err(SimError::LengthMismatch { estimate: estimate.len(), target: target.len() });
    }
    let n = target.len().max(1) as f64;
    let mt = target.iter().sum::<f64>() / n;
    let me = estimate.iter().sum::<f64>() / n;
    let t: Vec<f64> = target.iter().map(|v| v - mt).collect();
    let e: Vec<f64> = estimate.iter().map(|v| v - me).collect();
    let tt: f64 = t.iter().map(|v| v * v).sum();
    if tt <= 0.0 {
        return Err(SimError::SilentTarget);
    }
    let alpha = e.iter().zip(&t).map(|(a, b)| a * b).sum::<f64>() / tt;
    let proj: f64 = alpha * alpha * tt;
    let resid: f64 = e.iter().zip(&t).map(|(a, b)| (a - alpha * b).powi(2)).sum();
    let db = 10.0 * (proj / resid).log10();
    Ok(if db.is_nan() { -SI_SNR_CLAMP_DB } else { db.clamp(-SI_SNR_CLAMP_DB, SI_SNR_CLAMP_DB) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_source(mics: Vec<[f64; 3]>, pos: [f64; 3], noise_db: Option<f64>) -> SceneSpec {
        SceneSpec {
            session: "t".into(),
            duration_s: 2.0,
            room: Room::Anechoic,
            mics,
            sources: vec![SourceSpec { id: "a".into(), position: pos, signal: SignalKind::SpeechLike, gain_db: 0.0 }],
            schedule: vec![ScheduleEntry { source: "a".into(), onset: 0.0, duration: 2.0 }],
            noise_db,
            seed: 7,
        }
    }

    #[test]
    fn equidistant_mics_are_identical_without_noise() {
        let spec = one_source(vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]], [0.0, 0.0, 0.0], None);
        let r = render(&spec, 16000).unwrap();
        assert_eq!(r.mixture.channel(0), r.mixture.channel(1));
    }

    #[test]
    fn mixture_is_sum_of_images_and_noise() {
        let mut spec = one_source(vec![[1.0, 0.0, 0.0], [0.0, 1.3, 0.2]], [0.1, 0.2, 0.0], Some(-20.0));
        spec.sources.push(SourceSpec {
            id: "b".into(),
            position: [2.0, 1.0, 0.0],
            signal: SignalKind::Sinusoid { freq_hz: 440.0 },
            gain_db: -3.0,
        });
        spec.schedule.push(ScheduleEntry { source: "b".into(), onset: 0.5, duration: 1.0 });
        let r = render(&spec, 16000).unwrap();
        for m in 0..2 {
            for k in 0..r.mixture.len() {
                let sum = r.images[0].channel(m)[k] + r.images[1].channel(m)[k] + r.noise.channel(m)[k];
                assert_eq!(r.mixture.channel(m)[k], sum);
            }
        }
        assert_eq!(r.truth, spec.truth());
    }

    #[test]
    fn deterministic_for_seed() {
        let mut spec = one_source(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [0.0, 0.0, 0.5], Some(-10.0));
        spec.room = Room::Reverb { decay_s: 0.3 };
        let a = render(&spec, 16000).unwrap();
        let b = render(&spec, 16000).unwrap();
        assert_eq!(a.mixture, b.mixture);
        spec.seed += 1;
        assert_ne!(render(&spec, 16000).unwrap().mixture, a.mixture);
    }

    #[test]
    fn gain_scales_image_energy_exactly() {
        let spec = one_source(vec![[1.0, 0.0, 0.0]], [0.0, 0.0, 0.0], None);
        let mut louder = spec.clone();
        louder.sources[0].gain_db = 6.0;
        let e = |r: &Render| r.images[0].channel(0).iter().map(|v| v * v).sum::<f64>();
        let ratio = 10.0 * (e(&render(&louder, 16000).unwrap()) / e(&render(&spec, 16000).unwrap())).log10();
        assert!((ratio - 6.0).abs() < 1e-9);
    }

    #[test]
    fn source_is_silent_outside_schedule() {
        let mut spec = one_source(vec![[1.0, 0.0, 0.0]], [0.0, 0.0, 0.0], None);
        spec.schedule = vec![ScheduleEntry { source: "a".into(), onset: 1.0, duration: 0.5 }];
        let r = render(&spec, 16000).unwrap();
        // direct path is ~47 samples late; sinc taps reach 16 samples early
        assert!(r.mixture.channel(0)[..16000 - 20].iter().all(|v| v.abs() < 1e-12));
        assert!(r.mixture.channel(0)[16000 + 100..16000 + 7900].iter().any(|v| *v != 0.0));
        assert!(r.mixture.channel(0)[24000 + 100..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn invalid_specs_name_the_field() {
        let mut spec = one_source(vec![[1.0, 0.0, 0.0]], [0.0, 0.0, 0.0], None);
        spec.sources.clear();
        assert!(matches!(render(&spec, 16000), Err(SimError::InvalidSpec { pointer, .. }) if pointer == "/sources"));
        let mut spec = one_source(vec![[1.0, 0.0, 0.0]], [0.0, 0.0, 0.0], None);
        spec.schedule[0].source = "zz".into();
        assert!(matches!(render(&spec, 16000), Err(SimError::InvalidSpec { pointer, .. }) if pointer == "/schedule/0/source"));
        let spec = one_source(vec![[1.0, 0.0, 0.0]], [1.0, 0.0, 0.0], None);
        assert!(matches!(render(&spec, 16000), Err(SimError::Coincident { source_index: 0, mic: 0 })));
    }

    #[test]
    fn si_snr_clamps_and_is_scale_invariant() {
        let t: Vec<f64> = (0..1000).map(|k| (k as f64 * 0.05).sin()).collect();
        assert_eq!(si_snr(&t, &t).unwrap(), 60.0);
        let neg: Vec<f64> = t.iter().map(|v| -2.0 * v).collect();
        assert_eq!(si_snr(&neg, &t).unwrap(), 60.0);
        let orth: Vec<f64> = (0..1000).map(|k| (k as f64 * 0.05).cos()).collect();
        let a: Vec<f64> = (0..1000).map(|k| if k < 500 { 1.0 } else { -1.0 }).collect();
        let b: Vec<f64> = (0..1000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(si_snr(&b, &a).unwrap(), -60.0);
        assert!(si_snr(&orth, &t).unwrap() < -10.0);
        assert!(matches!(si_snr(&t, &vec![0.0; 1000]), Err(SimError::SilentTarget)));
    }

    #[test]
    fn convolution_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..10000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h: Vec<f64> = (0..300).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = fft_convolve(&x, &h);
        for n in (0..10000).step_by(97) {
            let direct: f64 = (0..h.len()).filter(|&k| k <= n).map(|k| h[k] * x[n - k]).sum();
            assert!((fast[n] - direct).abs() < 1e-9);
        }
    }
}
