//! Guided source separation: per-segment activity-constrained cACGMM masks
//! driving a beamformer toward one speaker.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beamform::{apply_beamformer, beamformer_weights, estimate_covariance, BeamformError, BeamformerKind};
use crate::cacgmm::{cacgmm_em, segments_to_activity_for, CacgmmError, Constraint, EmOptions};
use crate::rttm::{Segment, SegmentList};
use crate::signal::{istft_span, stft_range, MultichannelWave, SignalError, StftConfig};

#[derive(Debug, Error, PartialEq)]
pub enum GssError {
    #[error("no segments to enhance")]
    EmptySegments,
    #[error("unknown speaker {speaker:?}; known speakers: {}", known.join(", "))]
    UnknownSpeaker { speaker: String, known: Vec<String> },
    #[error("reference channel {reference} out of range for {channels} channels")]
    ReferenceOutOfRange { reference: usize, channels: usize },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error(transparent)]
    Cacgmm(#[from] CacgmmError),
    #[error(transparent)]
    Beamform(#[from] BeamformError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GssOptions {
    /// Seconds of context on each side of a segment.
    pub context_s: f64,
    pub iterations: usize,
    pub beamformer: BeamformerKind,
    /// Beamformer reference channel; channel 0 when unset, so callers pass
    /// channels best-first.
    pub reference: Option<usize>,
}

impl Default for GssOptions {
    fn default() -> Self {
        Self { context_s: 15.0, iterations: 20, beamformer: BeamformerKind::Mvdr, reference: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnhancedSegment {
    pub segment: Segment,
    pub start_sample: usize,
    pub end_sample: usize,
    pub samples: Vec<f64>,
    pub fallback_bins: usize,
}

impl EnhancedSegment {
    pub fn file_name(&self) -> String {
        segment_file_name(&self.segment)
    }
}

/// `<session>-<speaker>-<start_ms>-<end_ms>.wav`
pub fn segment_file_name(seg: &Segment) -> String {
    let ms = |s: f64| (s * 1000.0).round() as u64;
    format!("{}-{}-{}-{}.wav", seg.session, seg.speaker, ms(seg.onset), ms(seg.end()))
}

/// Time-ordered segments of `speaker`, overlapping or touching ones merged.
fn merged_segments(segments: &SegmentList, speaker: &str) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for s in segments.for_speaker(speaker) {
        match out.last_mut() {
            Some(last) if s.onset <= last.end() => {
                let end = last.end().max(s.end());
                last.duration = end - last.onset;
            }
            _ => out.push(s.clone()),
        }
    }
    out
}

pub fn gss_enhance(
    wave: &MultichannelWave,
    segments: &SegmentList,
    target: &str,
    stft_cfg: &StftConfig,
    opts: &GssOptions,
) -> Result<Vec<EnhancedSegment>, GssError> {
    if segments.is_empty() {
        return Err(GssError::EmptySegments);
    }
    let speakers = segments.speakers();
    let Some(target_class) = speakers.iter().position(|s| s == target) else {
        return Err(GssError::UnknownSpeaker { speaker: target.to_string(), known: speakers });
    };
    if !(opts.context_s.is_finite() && opts.context_s >= 0.0) {
        return Err(GssError::InvalidOption(format!("context_s {}", opts.context_s)));
    }
    let reference = opts.reference.unwrap_or(0);
    if reference >= wave.num_channels() {
        return Err(GssError::ReferenceOutOfRange { reference, channels: wave.num_channels() });
    }
    stft_cfg.validate()?;
    let sr = wave.sample_rate() as f64;
    let fr = sr / stft_cfg.hop as f64;
    let total_frames = stft_cfg.frames_for(wave.len());
    // frames reaching into a sample on either side
    let reach = stft_cfg.window_length.div_ceil(stft_cfg.hop);
    let em = EmOptions { iterations: opts.iterations, constraint: Constraint::EveryStep };

    let mut out = Vec::new();
    for seg in merged_segments(segments, target) {
        let start_sample = ((seg.onset * sr).round() as usize).min(wave.len());
        let end_sample = ((seg.end() * sr).round() as usize).min(wave.len());
        let lo = ((seg.onset - opts.context_s).max(0.0) * fr).floor() as usize;
        let hi = ((seg.end() + opts.context_s) * fr).ceil() as usize;
        let a = lo.saturating_sub(reach);
        let b = (hi + reach + 1).min(total_frames);
        let tensor = stft_range(wave, stft_cfg, a, b)?;
        let activity = segments_to_activity_for(segments, &speakers, fr, a, b - a)?;
        let fit = cacgmm_em(&tensor, &activity, &em)?;
        let phi_t = estimate_covariance(&tensor, fit.masks.mask(target_class))?;
        let phi_n = estimate_covariance(&tensor, &fit.masks.complement(target_class))?;
        let weights = beamformer_weights(opts.beamformer, &phi_t, &phi_n, reference)?;
        let y = apply_beamformer(&tensor, &weights)?;
        let samples = istft_span(&y, start_sample, end_sample).into_channels().remove(0);
        out.push(EnhancedSegment { segment: seg, start_sample, end_sample, samples, fallback_bins: weights.fallback_bins });
    }
    Ok(out)
}

/// Enhanced segments joined end to end in time order.
pub fn concatenate(segments: &[EnhancedSegment], sample_rate: u32) -> Result<MultichannelWave, SignalError> {
    MultichannelWave::mono(sample_rate, segments.iter().flat_map(|s| s.samples.iter().copied()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{render, si_snr, Room, SceneSpec, ScheduleEntry, SignalKind, SourceSpec};

    fn scene(sources: &[(&str, [f64; 3], f64, f64)], noise_db: Option<f64>) -> SceneSpec {
        SceneSpec {
            session: "t".into(),
            duration_s: 6.0,
            room: Room::Anechoic,
            mics: vec![[2.0, 2.0, 1.2], [2.1, 2.0, 1.2], [2.0, 2.1, 1.2], [2.1, 2.1, 1.2]],
            sources: sources
                .iter()
                .map(|(id, p, _, _)| SourceSpec { id: id.to_string(), position: *p, signal: SignalKind::SpeechLike, gain_db: 0.0 })
                .collect(),
            schedule: sources.iter().map(|(id, _, on, dur)| ScheduleEntry { source: id.to_string(), onset: *on, duration: *dur }).collect(),
            noise_db,
            seed: 11,
        }
    }

    #[test]
    fn naming_rule() {
        assert_eq!(segment_file_name(&Segment::new("S02", "spkA", 1.2346, 2.0)), "S02-spkA-1235-3235.wav");
    }

    #[test]
    fn merges_overlapping_target_segments() {
        let list = SegmentList::new(vec![
            Segment::new("s", "a", 0.0, 1.0),
            Segment::new("s", "a", 0.5, 1.0),
            Segment::new("s", "a", 3.0, 1.0),
            Segment::new("s", "b", 1.0, 1.0),
        ])
        .unwrap();
        let m = merged_segments(&list, "a");
        assert_eq!(m.len(), 2);
        assert!((m[0].duration - 1.5).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let wave = MultichannelWave::zeros(16000, 2, 16000).unwrap();
        let cfg = StftConfig::default();
        let opts = GssOptions::default();
        assert_eq!(gss_enhance(&wave, &SegmentList::default(), "a", &cfg, &opts), Err(GssError::EmptySegments));
        let list = SegmentList::new(vec![Segment::new("s", "a", 0.0, 0.5), Segment::new("s", "b", 0.2, 0.5)]).unwrap();
        let err = gss_enhance(&wave, &list, "c", &cfg, &opts).unwrap_err();
        assert_eq!(err.to_string(), "unknown speaker \"c\"; known speakers: a, b");
    }

    #[test]
    fn single_speaker_is_never_worse_than_reference() {
        let spec = scene(&[("a", [3.0, 4.0, 1.5], 1.0, 3.0)], Some(-10.0));
        let r = render(&spec, 16000).unwrap();
        let truth = spec.truth();
        let opts = GssOptions { iterations: 10, ..Default::default() };
        let out = gss_enhance(&r.mixture, &truth, "a", &StftConfig::default(), &opts).unwrap();
        assert_eq!(out.len(), 1);
        let seg = &out[0];
        assert_eq!((seg.start_sample, seg.end_sample), (16000, 64000));
        let target = &r.image("a").unwrap().channel(0)[16000..64000];
        let input = si_snr(&r.mixture.channel(0)[16000..64000], target).unwrap();
        let output = si_snr(&seg.samples, target).unwrap();
        assert!(output >= input, "{output} < {input}");
    }

    #[test]
    fn deterministic_and_beamformer_flag_matters() {
        let spec = scene(&[("a", [3.0, 4.0, 1.5], 0.5, 3.0), ("b", [0.5, 1.0, 1.5], 2.0, 3.0)], Some(-20.0));
        let r = render(&spec, 16000).unwrap();
        let truth = spec.truth();
        let opts = GssOptions { iterations: 5, context_s: 1.0, ..Default::default() };
        let cfg = StftConfig::default();
        let a = gss_enhance(&r.mixture, &truth, "b", &cfg, &opts).unwrap();
        let b = gss_enhance(&r.mixture, &truth, "b", &cfg, &opts).unwrap();
        assert_eq!(a, b);
        let g = gss_enhance(&r.mixture, &truth, "b", &cfg, &GssOptions { beamformer: BeamformerKind::Gevd, ..opts }).unwrap();
        assert_ne!(a[0].samples, g[0].samples);
        assert_eq!(concatenate(&a, 16000).unwrap().len(), a[0].samples.len());
    }
}
