//! RIFF/WAVE reader and writer for 16-bit PCM and 32-bit IEEE float.

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{MultichannelWave, SignalError};

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed WAV header: {0}")]
    MalformedHeader(String),
    #[error("unsupported WAV encoding: format tag {format_tag:#06x}, {bits} bits per sample")]
    UnsupportedEncoding { format_tag: u16, bits: u16 },
    #[error("truncated WAV data: header declares {declared} bytes, only {available} present")]
    Truncated { declared: usize, available: usize },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Int16,
    Float32,
}

/// Outcome of a successful write. `clamped` counts samples whose amplitude
/// exceeded the int16 range and were saturated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WriteReport {
    pub clamped: usize,
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<MultichannelWave, WavError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| WavError::Io { path: path.display().to_string(), source })?;
    decode_wav(&bytes)
}

pub fn write_wav(
    wave: &MultichannelWave,
    path: impl AsRef<Path>,
    encoding: WavEncoding,
) -> Result<WriteReport, WavError> {
    let path = path.as_ref();
    let (bytes, report) = encode_wav(wave, encoding);
    fs::write(path, bytes).map_err(|source| WavError::Io { path: path.display().to_string(), source })?;
    Ok(report)
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

struct Format {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits: u16,
}

fn parse_fmt(body: &[u8]) -> Result<Format, WavError> {
    if body.len() < 16 {
        return Err(WavError::MalformedHeader(format!("fmt chunk is {} bytes, need 16", body.len())));
    }
    let mut tag = u16_at(body, 0);
    let bits = u16_at(body, 14);
    if tag == FORMAT_EXTENSIBLE {
        if body.len() < 40 {
            return Err(WavError::MalformedHeader("extensible fmt chunk shorter than 40 bytes".into()));
        }
        // first two bytes of the sub-format GUID carry the actual format tag
        tag = u16_at(body, 24);
    }
    Ok(Format {
        tag,
        channels: u16_at(body, 2),
        sample_rate: u32_at(body, 4),
        block_align: u16_at(body, 12),
        bits,
    })
}

/// Decode an in-memory RIFF/WAVE image.
pub fn decode_wav(bytes: &[u8]) -> Result<MultichannelWave, WavError> {
    if bytes.len() < 12 {
        return Err(WavError::MalformedHeader(format!("file is {} bytes, shorter than a RIFF header", bytes.len())));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(WavError::MalformedHeader("missing RIFF magic".into()));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(WavError::MalformedHeader("missing WAVE form type".into()));
    }
    let riff_end = 8usize.saturating_add(u32_at(bytes, 4) as usize);

    let mut format: Option<Format> = None;
    let mut pos = 12;
    loop {
        if pos + 8 > bytes.len() {
            return Err(WavError::MalformedHeader("no data chunk".into()));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        if id == b"data" {
            let fmt = format.ok_or_else(|| WavError::MalformedHeader("data chunk before fmt chunk".into()))?;
            let available = bytes.len().min(riff_end).saturating_sub(body_start);
            if size > available {
                return Err(WavError::Truncated { declared: size, available });
            }
            return decode_samples(&fmt, &bytes[body_start..body_start + size]);
        }
        if body_start + size > bytes.len() {
            return Err(WavError::Truncated { declared: size, available: bytes.len() - body_start });
        }
        if id == b"fmt " {
            format = Some(parse_fmt(&bytes[body_start..body_start + size])?);
        }
        // chunks are word aligned
        pos = body_start + size + (size & 1);
    }
}

fn decode_samples(fmt: &Format, data: &[u8]) -> Result<MultichannelWave, WavError> {
    let bytes_per_sample = match (fmt.tag, fmt.bits) {
        (FORMAT_PCM, 16) => 2,
        (FORMAT_FLOAT, 32) => 4,
        (tag, bits) => return Err(WavError::UnsupportedEncoding { format_tag: tag, bits }),
    };
    let n_ch = fmt.channels as usize;
    if n_ch == 0 {
        return Err(WavError::MalformedHeader("zero channels".into()));
    }
    if fmt.sample_rate == 0 {
        return Err(WavError::MalformedHeader("zero sample rate".into()));
    }
    let frame_bytes = n_ch * bytes_per_sample;
    if fmt.block_align as usize != frame_bytes {
        return Err(WavError::MalformedHeader(format!(
            "block align {} does not match {} channels of {} bits",
            fmt.block_align, n_ch, fmt.bits
        )));
    }
    if !data.len().is_multiple_of(frame_bytes) {
        let whole = data.len() - data.len() % frame_bytes;
        return Err(WavError::Truncated { declared: whole + frame_bytes, available: data.len() });
    }
    let n = data.len() / frame_bytes;
    let mut channels = vec![Vec::with_capacity(n); n_ch];
    for frame in data.chunks_exact(frame_bytes) {
        for (c, s) in frame.chunks_exact(bytes_per_sample).enumerate() {
            let v = if bytes_per_sample == 2 {
                i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0
            } else {
                f32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64
            };
            channels[c].push(v);
        }
    }
    Ok(MultichannelWave::new(fmt.sample_rate, channels)?)
}

/// Encode a wave as an interleaved RIFF/WAVE image.
pub fn encode_wav(wave: &MultichannelWave, encoding: WavEncoding) -> (Vec<u8>, WriteReport) {
    let n_ch = wave.num_channels();
    let (tag, bits): (u16, u16) = match encoding {
        WavEncoding::Int16 => (FORMAT_PCM, 16),
        WavEncoding::Float32 => (FORMAT_FLOAT, 32),
    };
    let bytes_per_sample = bits as usize / 8;
    let data_len = wave.len() * n_ch * bytes_per_sample;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&tag.to_le_bytes());
    out.extend_from_slice(&(n_ch as u16).to_le_bytes());
    out.extend_from_slice(&wave.sample_rate().to_le_bytes());
    let block_align = (n_ch * bytes_per_sample) as u16;
    out.extend_from_slice(&(wave.sample_rate() * block_align as u32).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());

    let mut report = WriteReport::default();
    for i in 0..wave.len() {
        for c in 0..n_ch {
            let v = wave.channel(c)[i];
            match encoding {
                WavEncoding::Float32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
                WavEncoding::Int16 => {
                    if v.abs() > 1.0 {
                        report.clamped += 1;
                    }
                    let q = (v * 32768.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
                    out.extend_from_slice(&q.to_le_bytes());
                }
            }
        }
    }
    (out, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_channel(n: usize) -> MultichannelWave {
        let a = (0..n).map(|i| ((i as f64) * 0.01).sin() * 0.5).collect();
        let b = (0..n).map(|i| ((i as f64) * 0.003).cos() * 0.25).collect();
        MultichannelWave::new(16000, vec![a, b]).unwrap()
    }

    #[test]
    fn header_round_trip() {
        let w = two_channel(16000);
        let (bytes, _) = encode_wav(&w, WavEncoding::Int16);
        let r = decode_wav(&bytes).unwrap();
        assert_eq!(r.num_channels(), 2);
        assert_eq!(r.len(), 16000);
        assert_eq!(r.sample_rate(), 16000);
    }

    #[test]
    fn int16_full_scale_positive() {
        let mut bytes = encode_wav(&MultichannelWave::mono(8000, vec![0.0]).unwrap(), WavEncoding::Int16).0;
        let n = bytes.len();
        bytes[n - 2..].copy_from_slice(&32767i16.to_le_bytes());
        let w = decode_wav(&bytes).unwrap();
        assert_eq!(w.channel(0)[0], 32767.0 / 32768.0);
    }

    #[test]
    fn float32_is_bit_exact() {
        let samples: Vec<f64> = (0..1000).map(|i| (((i as f32) * 0.37).sin() * 0.9) as f64).collect();
        let w = MultichannelWave::mono(44100, samples).unwrap();
        let (bytes, report) = encode_wav(&w, WavEncoding::Float32);
        assert_eq!(report.clamped, 0);
        assert_eq!(decode_wav(&bytes).unwrap(), w);
    }

    #[test]
    fn int16_within_one_lsb() {
        let w = two_channel(4000);
        let r = decode_wav(&encode_wav(&w, WavEncoding::Int16).0).unwrap();
        for c in 0..2 {
            for (a, b) in w.channel(c).iter().zip(r.channel(c)) {
                assert!((a - b).abs() <= 1.0 / 32768.0);
            }
        }
    }

    #[test]
    fn int16_overflow_is_clamped_and_counted() {
        let w = MultichannelWave::mono(16000, vec![1.5, 0.2, -1.5, 1.5]).unwrap();
        let (bytes, report) = encode_wav(&w, WavEncoding::Int16);
        assert_eq!(report.clamped, 3);
        let r = decode_wav(&bytes).unwrap();
        assert_eq!(r.channel(0)[0], 32767.0 / 32768.0);
        assert_eq!(r.channel(0)[2], -1.0);
    }

    #[test]
    fn empty_wave_is_valid() {
        let w = MultichannelWave::zeros(16000, 3, 0).unwrap();
        let (bytes, _) = encode_wav(&w, WavEncoding::Float32);
        assert_eq!(bytes.len(), 44);
        let r = decode_wav(&bytes).unwrap();
        assert_eq!(r.num_channels(), 3);
        assert!(r.is_empty());
    }

    #[test]
    fn byte_truncated_file_reports_truncation() {
        let (bytes, _) = encode_wav(&two_channel(1000), WavEncoding::Int16);
        let cut = &bytes[..bytes.len() - 100];
        assert!(matches!(decode_wav(cut), Err(WavError::Truncated { declared: 4000, available: 3900 })));
    }

    #[test]
    fn riff_size_shorter_than_data_chunk() {
        let (mut bytes, _) = encode_wav(&two_channel(1000), WavEncoding::Int16);
        bytes[4..8].copy_from_slice(&1000u32.to_le_bytes());
        assert!(matches!(decode_wav(&bytes), Err(WavError::Truncated { .. })));
    }

    #[test]
    fn distinct_header_errors() {
        assert!(matches!(decode_wav(b"RIFX\0\0\0\0WAVE"), Err(WavError::MalformedHeader(_))));
        let (mut bytes, _) = encode_wav(&two_channel(10), WavEncoding::Int16);
        // 24-bit PCM
        bytes[34..36].copy_from_slice(&24u16.to_le_bytes());
        assert!(matches!(
            decode_wav(&bytes),
            Err(WavError::UnsupportedEncoding { format_tag: 1, bits: 24 })
        ));
        let (mut bytes, _) = encode_wav(&two_channel(10), WavEncoding::Int16);
        bytes[20..22].copy_from_slice(&6u16.to_le_bytes());
        assert!(matches!(decode_wav(&bytes), Err(WavError::UnsupportedEncoding { format_tag: 6, .. })));
    }

    #[test]
    fn skips_unknown_chunks() {
        let (bytes, _) = encode_wav(&two_channel(50), WavEncoding::Float32);
        let mut patched = bytes[..36].to_vec();
        patched.extend_from_slice(b"LIST");
        patched.extend_from_slice(&3u32.to_le_bytes());
        patched.extend_from_slice(&[1, 2, 3, 0]);
        patched.extend_from_slice(&bytes[36..]);
        let riff = (patched.len() - 8) as u32;
        patched[4..8].copy_from_slice(&riff.to_le_bytes());
        assert_eq!(decode_wav(&patched).unwrap(), decode_wav(&bytes).unwrap());
    }
}
