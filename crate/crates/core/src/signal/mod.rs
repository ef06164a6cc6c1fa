//! Audio containers, WAV I/O and STFT analysis/synthesis.

mod stft;
mod wav;

pub use stft::{istft, istft_span, stft, stft_range, StftConfig, StftTensor, Window};
pub use wav::{decode_wav, encode_wav, read_wav, write_wav, WavEncoding, WavError, WriteReport};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("sample rate must be positive")]
    ZeroSampleRate,
    #[error("wave needs at least one channel")]
    NoChannels,
    #[error("channel {channel} has {found} samples, expected {expected}")]
    RaggedChannels { channel: usize, expected: usize, found: usize },
    #[error("non-finite sample in channel {channel} at index {index}")]
    NonFinite { channel: usize, index: usize },
    #[error("invalid STFT configuration: {0}")]
    InvalidConfig(String),
    #[error("tensor shape mismatch: {0}")]
    Shape(String),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(u32, u32),
    #[error("channel index {index} out of range for {channels} channels")]
    ChannelOutOfRange { index: usize, channels: usize },
}

/// Synchronized multi-channel audio. Samples are stored per channel in
/// double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct MultichannelWave {
    sample_rate: u32,
    channels: Vec<Vec<f64>>,
}

impl MultichannelWave {
    pub fn new(sample_rate: u32, channels: Vec<Vec<f64>>) -> Result<Self, SignalError> {
        if sample_rate == 0 {
            return Err(SignalError::ZeroSampleRate);
        }
        let Some(first) = channels.first() else {
            return Err(SignalError::NoChannels);
        };
        let expected = first.len();
        for (c, ch) in channels.iter().enumerate() {
            if ch.len() != expected {
                return Err(SignalError::RaggedChannels { channel: c, expected, found: ch.len() });
            }
            if let Some(index) = ch.iter().position(|v| !v.is_finite()) {
                return Err(SignalError::NonFinite { channel: c, index });
            }
        }
        Ok(Self { sample_rate, channels })
    }

    pub fn mono(sample_rate: u32, samples: Vec<f64>) -> Result<Self, SignalError> {
        Self::new(sample_rate, vec![samples])
    }

    pub fn zeros(sample_rate: u32, channels: usize, len: usize) -> Result<Self, SignalError> {
        Self::new(sample_rate, vec![vec![0.0; len]; channels])
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    /// Keep only the listed channels, in the given order.
    pub fn select_channels(&self, indices: &[usize]) -> Result<Self, SignalError> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            let ch = self.channels.get(i).ok_or(SignalError::ChannelOutOfRange {
                index: i,
                channels: self.channels.len(),
            })?;
            out.push(ch.clone());
        }
        Self::new(self.sample_rate, out)
    }

    pub fn extract_channel(&self, c: usize) -> Result<Self, SignalError> {
        self.select_channels(&[c])
    }

    /// Sample range `[start, end)` of every channel, clipped to the wave.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        let end = end.min(self.len());
        let start = start.min(end);
        Self {
            sample_rate: self.sample_rate,
            channels: self.channels.iter().map(|c| c[start..end].to_vec()).collect(),
        }
    }
}
