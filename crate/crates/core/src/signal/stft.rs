//! Centered STFT with reflect padding and window-sum normalized overlap-add.
//!
//! Frame `t` is centered on sample `t * hop`; the signal is reflect-padded by
//! `window_length / 2` on both sides, giving `1 + len / hop` frames.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{MultichannelWave, SignalError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Square-root periodic Hann, used for both analysis and synthesis.
    #[default]
    SqrtHann,
    /// Periodic Hann for both analysis and synthesis.
    Hann,
}

impl Window {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        (0..len)
            .map(|n| {
                let hann = 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos();
                match self {
                    Window::SqrtHann => hann.sqrt(),
                    Window::Hann => hann,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StftConfig {
    pub window_length: usize,
    pub hop: usize,
    pub fft_size: usize,
    pub window: Window,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self { window_length: 1024, hop: 256, fft_size: 1024, window: Window::SqrtHann }
    }
}

impl StftConfig {
    pub fn new(window_length: usize, hop: usize, fft_size: usize, window: Window) -> Result<Self, SignalError> {
        let cfg = Self { window_length, hop, fft_size, window };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn frames_for(&self, len: usize) -> usize {
        1 + len / self.hop
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if !(0 < self.hop && self.hop <= self.window_length && self.window_length <= self.fft_size) {
            return Err(SignalError::InvalidConfig(format!(
                "need 0 < hop ({}) <= window_length ({}) <= fft_size ({})",
                self.hop, self.window_length, self.fft_size
            )));
        }
        if !self.window_length.is_multiple_of(2) {
            return Err(SignalError::InvalidConfig("window_length must be even".into()));
        }
        let dev = self.cola_deviation();
        if dev > 1e-6 {
            return Err(SignalError::InvalidConfig(format!(
                "window/hop pair violates constant overlap-add (relative deviation {dev:.3e})"
            )));
        }
        Ok(())
    }

    /// Relative spread of the overlap-added analysis*synthesis window.
    pub fn cola_deviation(&self) -> f64 {
        let w = self.window.coefficients(self.window_length);
        let sums: Vec<f64> = (0..self.hop)
            .map(|n| w.iter().skip(n).step_by(self.hop).map(|v| v * v).sum())
            .collect();
        let max = sums.iter().cloned().fold(f64::MIN, f64::max);
        let min = sums.iter().cloned().fold(f64::MAX, f64::min);
        if max <= 0.0 {
            return f64::INFINITY;
        }
        (max - min) / max
    }
}

/// Complex spectrogram indexed `[channel][frame][bin]`.
///
/// `frame_offset` is non-zero for tensors cropped out of a longer recording;
/// it keeps frame-to-time conversion absolute.
#[derive(Debug, Clone, PartialEq)]
pub struct StftTensor {
    values: Vec<Complex64>,
    channels: usize,
    frames: usize,
    bins: usize,
    config: StftConfig,
    original_length: usize,
    sample_rate: u32,
    frame_offset: usize,
}

impl StftTensor {
    pub fn from_parts(
        values: Vec<Complex64>,
        channels: usize,
        frames: usize,
        config: StftConfig,
        original_length: usize,
        sample_rate: u32,
    ) -> Result<Self, SignalError> {
        config.validate()?;
        let bins = config.bins();
        if values.len() != channels * frames * bins {
            return Err(SignalError::Shape(format!(
                "{} values for {channels}x{frames}x{bins}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SignalError::Shape("non-finite STFT value".into()));
        }
        if sample_rate == 0 {
            return Err(SignalError::ZeroSampleRate);
        }
        Ok(Self { values, channels, frames, bins, config, original_length, sample_rate, frame_offset: 0 })
    }

    pub fn zeros_like(&self, channels: usize) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); channels * self.frames * self.bins], channels, ..self.clone() }
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }

    pub fn num_frames(&self) -> usize {
        self.frames
    }

    pub fn num_bins(&self) -> usize {
        self.bins
    }

    pub fn config(&self) -> &StftConfig {
        &self.config
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn frame_offset(&self) -> usize {
        self.frame_offset
    }

    /// Frames per second.
    pub fn frame_rate(&self) -> f64 {
        self.sample_rate as f64 / self.config.hop as f64
    }

    /// Absolute center time of local frame `t`, in seconds.
    pub fn frame_time(&self, t: usize) -> f64 {
        ((t + self.frame_offset) * self.config.hop) as f64 / self.sample_rate as f64
    }

    #[inline]
    fn index(&self, c: usize, t: usize, f: usize) -> usize {
        (c * self.frames + t) * self.bins + f
    }

    #[inline]
    pub fn get(&self, c: usize, t: usize, f: usize) -> Complex64 {
        self.values[self.index(c, t, f)]
    }

    #[inline]
    pub fn set(&mut self, c: usize, t: usize, f: usize, v: Complex64) {
        let i = self.index(c, t, f);
        self.values[i] = v;
    }

    /// Frames x bins block of one channel.
    pub fn channel(&self, c: usize) -> &[Complex64] {
        let n = self.frames * self.bins;
        &self.values[c * n..(c + 1) * n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Observation vector across channels at one time-frequency point.
    pub fn observation(&self, t: usize, f: usize) -> Vec<Complex64> {
        (0..self.channels).map(|c| self.get(c, t, f)).collect()
    }

    pub fn select_channels(&self, indices: &[usize]) -> Result<Self, SignalError> {
        let n = self.frames * self.bins;
        let mut values = Vec::with_capacity(indices.len() * n);
        for &i in indices {
            if i >= self.channels {
                return Err(SignalError::ChannelOutOfRange { index: i, channels: self.channels });
            }
            values.extend_from_slice(self.channel(i));
        }
        Ok(Self { values, channels: indices.len(), ..self.clone() })
    }

    /// Local frames `[start, end)`, clipped to the tensor.
    pub fn crop_frames(&self, start: usize, end: usize) -> Self {
        let end = end.min(self.frames);
        let start = start.min(end);
        let frames = end - start;
        let mut values = Vec::with_capacity(self.channels * frames * self.bins);
        for c in 0..self.channels {
            let ch = self.channel(c);
            values.extend_from_slice(&ch[start * self.bins..end * self.bins]);
        }
        Self { values, frames, frame_offset: self.frame_offset + start, ..self.clone() }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

fn reflect_index(i: isize, len: usize) -> Option<usize> {
    if len == 0 {
        return None;
    }
    if len == 1 {
        return Some(0);
    }
    let period = 2 * (len as isize - 1);
    let mut k = i.rem_euclid(period);
    if k >= len as isize {
        k = period - k;
    }
    Some(k as usize)
}

fn analyze_channel(
    x: &[f64],
    cfg: &StftConfig,
    window: &[f64],
    fft: &Arc<dyn Fft<f64>>,
    frames: std::ops::Range<usize>,
) -> Vec<Complex64> {
    let half = (cfg.window_length / 2) as isize;
    let bins = cfg.bins();
    let mut out = Vec::with_capacity(frames.len() * bins);
    let mut buf = vec![Complex64::new(0.0, 0.0); cfg.fft_size];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for t in frames {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let start = (t * cfg.hop) as isize - half;
        for (j, w) in window.iter().enumerate() {
            let s = reflect_index(start + j as isize, x.len()).map_or(0.0, |i| x[i]);
            buf[j] = Complex64::new(s * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        out.extend_from_slice(&buf[..bins]);
    }
    out
}

pub fn stft(wave: &MultichannelWave, cfg: &StftConfig) -> Result<StftTensor, SignalError> {
    stft_range(wave, cfg, 0, cfg.frames_for(wave.len()))
}

/// Frames `[start, end)` of [`stft`], computed without the rest. The result
/// equals `stft(wave, cfg)?.crop_frames(start, end)`.
pub fn stft_range(wave: &MultichannelWave, cfg: &StftConfig, start: usize, end: usize) -> Result<StftTensor, SignalError> {
    cfg.validate()?;
    let end = end.min(cfg.frames_for(wave.len()));
    let start = start.min(end);
    let window = cfg.window.coefficients(cfg.window_length);
    let fft = FftPlanner::new().plan_fft_forward(cfg.fft_size);
    let per_channel: Vec<Vec<Complex64>> =
        wave.channels().par_iter().map(|x| analyze_channel(x, cfg, &window, &fft, start..end)).collect();
    let mut tensor = StftTensor::from_parts(
        per_channel.concat(),
        wave.num_channels(),
        end - start,
        *cfg,
        wave.len(),
        wave.sample_rate(),
    )?;
    tensor.frame_offset = start;
    Ok(tensor)
}

/// Inverse of [`stft`] for a full (uncropped) tensor, trimmed to the
/// original length.
pub fn istft(tensor: &StftTensor) -> Result<MultichannelWave, SignalError> {
    let expected = tensor.config.frames_for(tensor.original_length);
    if tensor.frame_offset != 0 || tensor.frames != expected {
        return Err(SignalError::Shape(format!(
            "tensor has {} frames at offset {}, a {}-sample signal needs {expected} frames at offset 0",
            tensor.frames, tensor.frame_offset, tensor.original_length
        )));
    }
    Ok(istft_span(tensor, 0, tensor.original_length))
}

/// Overlap-add synthesis of absolute samples `[start, end)` from whatever
/// frames the tensor holds. Samples not covered by any frame are zero.
pub fn istft_span(tensor: &StftTensor, start: usize, end: usize) -> MultichannelWave {
    let cfg = tensor.config;
    let end = end.max(start);
    let window = cfg.window.coefficients(cfg.window_length);
    let ifft = FftPlanner::new().plan_fft_inverse(cfg.fft_size);
    let half = cfg.window_length / 2;
    let bins = tensor.bins;
    let channels: Vec<Vec<f64>> = (0..tensor.channels)
        .into_par_iter()
        .map(|c| {
            let len = end - start;
            let mut acc = vec![0.0; len];
            let mut norm = vec![0.0; len];
            let mut buf = vec![Complex64::new(0.0, 0.0); cfg.fft_size];
            let mut scratch = vec![Complex64::new(0.0, 0.0); ifft.get_inplace_scratch_len()];
            let block = tensor.channel(c);
            for t in 0..tensor.frames {
                let abs_t = t + tensor.frame_offset;
                // first sample of the frame, in unpadded coordinates
                let first = (abs_t * cfg.hop) as isize - half as isize;
                let last = first + cfg.window_length as isize;
                if last <= start as isize || first >= end as isize {
                    continue;
                }
                let spec = &block[t * bins..(t + 1) * bins];
                buf[..bins].copy_from_slice(spec);
                for k in bins..cfg.fft_size {
                    buf[k] = spec[cfg.fft_size - k].conj();
                }
                ifft.process_with_scratch(&mut buf, &mut scratch);
                let scale = 1.0 / cfg.fft_size as f64;
                for (j, w) in window.iter().enumerate() {
                    let n = first + j as isize;
                    if n < start as isize || n >= end as isize {
                        continue;
                    }
                    let k = (n - start as isize) as usize;
                    acc[k] += buf[j].re * scale * w;
                    norm[k] += w * w;
                }
            }
            acc.iter().zip(&norm).map(|(a, n)| if *n > 1e-10 { a / n } else { 0.0 }).collect()
        })
        .collect();
    MultichannelWave::new(tensor.sample_rate, channels).expect("overlap-add output is finite")
}
