//! Speaker-attributed segments and their RTTM serialization.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RttmError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: negative duration {duration}")]
    NegativeDuration { line: usize, duration: f64 },
    #[error("invalid segment: {0}")]
    InvalidSegment(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub session: String,
    pub speaker: String,
    pub onset: f64,
    pub duration: f64,
}

impl Segment {
    pub fn new(session: impl Into<String>, speaker: impl Into<String>, onset: f64, duration: f64) -> Self {
        Self { session: session.into(), speaker: speaker.into(), onset, duration }
    }

    pub fn end(&self) -> f64 {
        self.onset + self.duration
    }

    fn check(&self) -> Result<(), RttmError> {
        if self.speaker.is_empty() {
            return Err(RttmError::InvalidSegment("empty speaker id".into()));
        }
        if !(self.onset.is_finite() && self.onset >= 0.0) {
            return Err(RttmError::InvalidSegment(format!("onset {} must be finite and >= 0", self.onset)));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(RttmError::InvalidSegment(format!("duration {} must be finite and > 0", self.duration)));
        }
        Ok(())
    }
}

/// Segments ordered by `(onset, speaker)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SegmentList {
    entries: Vec<Segment>,
}

impl SegmentList {
    pub fn new(mut entries: Vec<Segment>) -> Result<Self, RttmError> {
        for s in &entries {
            s.check()?;
        }
        entries.sort_by(|a, b| a.onset.total_cmp(&b.onset).then_with(|| a.speaker.cmp(&b.speaker)));
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Segment] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Segment> {
        self.entries.iter()
    }

    /// Sorted, de-duplicated speaker ids.
    pub fn speakers(&self) -> Vec<String> {
        self.entries.iter().map(|s| s.speaker.clone()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn sessions(&self) -> Vec<String> {
        self.entries.iter().map(|s| s.session.clone()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Session of the first entry, if any.
    pub fn session(&self) -> Option<&str> {
        self.entries.first().map(|s| s.session.as_str())
    }

    pub fn for_speaker<'a>(&'a self, speaker: &'a str) -> impl Iterator<Item = &'a Segment> + 'a {
        self.entries.iter().filter(move |s| s.speaker == speaker)
    }

    /// Total attributed speech time, counting overlapping speakers separately.
    pub fn total_duration(&self) -> f64 {
        self.entries.iter().map(|s| s.duration).sum()
    }

    /// Copy with every segment moved by `offset` seconds. Segments pushed
    /// before zero are clipped, and dropped when nothing is left.
    pub fn shifted(&self, offset: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .filter_map(|s| {
                let onset = (s.onset + offset).max(0.0);
                let end = s.end() + offset;
                (end > onset).then(|| Segment { onset, duration: end - onset, ..s.clone() })
            })
            .collect();
        Self::new(entries).expect("shifted segments stay valid")
    }
}

impl<'a> IntoIterator for &'a SegmentList {
    type Item = &'a Segment;
    type IntoIter = std::slice::Iter<'a, Segment>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Parse `SPEAKER` records. Lines starting with `;;` and blank lines are
/// skipped; zero-duration records are dropped.
pub fn parse_rttm(text: &str) -> Result<SegmentList, RttmError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with(";;") {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields[0] != "SPEAKER" {
            return Err(RttmError::Malformed { line, message: format!("unsupported record type {:?}", fields[0]) });
        }
        if fields.len() < 8 {
            return Err(RttmError::Malformed { line, message: format!("expected at least 8 fields, found {}", fields.len()) });
        }
        let number = |idx: usize, what: &str| -> Result<f64, RttmError> {
            let v: f64 = fields[idx]
                .parse()
                .map_err(|_| RttmError::Malformed { line, message: format!("bad {what} {:?}", fields[idx]) })?;
            if !v.is_finite() {
                return Err(RttmError::Malformed { line, message: format!("non-finite {what}") });
            }
            Ok(v)
        };
        let onset = number(3, "onset")?;
        let duration = number(4, "duration")?;
        if duration < 0.0 {
            return Err(RttmError::NegativeDuration { line, duration });
        }
        if onset < 0.0 {
            return Err(RttmError::Malformed { line, message: format!("negative onset {onset}") });
        }
        if duration == 0.0 {
            continue;
        }
        entries.push(Segment::new(fields[1], fields[7], onset, duration));
    }
    SegmentList::new(entries)
}

/// Render as RTTM with millisecond precision, ordered by `(onset, speaker)`.
pub fn write_rttm(segments: &SegmentList) -> String {
    let mut out = String::new();
    for s in segments {
        let _ = writeln!(
            out,
            "SPEAKER {} 1 {:.3} {:.3} <NA> <NA> {} <NA> <NA>",
            s.session, s.onset, s.duration, s.speaker
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_single_line() {
        let list = parse_rttm("SPEAKER S1 1 10.00 2.50 <NA> <NA> spkA <NA> <NA>\n").unwrap();
        assert_eq!(list.entries(), &[Segment::new("S1", "spkA", 10.0, 2.5)]);
    }

    #[test]
    fn empty_and_comments() {
        assert!(parse_rttm("").unwrap().is_empty());
        assert!(parse_rttm(";; comment\n\n   \n").unwrap().is_empty());
    }

    #[test]
    fn whitespace_tolerant() {
        let list = parse_rttm("  SPEAKER\tS1  1 1.5\t0.5 <NA> <NA>   b <NA> <NA>  ").unwrap();
        assert_eq!(list.entries()[0], Segment::new("S1", "b", 1.5, 0.5));
    }

    #[test]
    fn negative_duration_reports_line() {
        let text = "SPEAKER S1 1 0.0 1.0 <NA> <NA> a <NA> <NA>\nSPEAKER S1 1 2.0 -1.0 <NA> <NA> a <NA> <NA>\n";
        assert_eq!(parse_rttm(text), Err(RttmError::NegativeDuration { line: 2, duration: -1.0 }));
    }

    #[test]
    fn malformed_lines_report_line() {
        assert!(matches!(parse_rttm("SPEAKER S1 1 x 1.0 <NA> <NA> a"), Err(RttmError::Malformed { line: 1, .. })));
        assert!(matches!(parse_rttm("\nSPEAKER S1 1 1.0"), Err(RttmError::Malformed { line: 2, .. })));
        assert!(matches!(parse_rttm("LEXEME S1 1 1.0 1.0 a b c"), Err(RttmError::Malformed { line: 1, .. })));
    }

    #[test]
    fn millisecond_rendering() {
        let list = SegmentList::new(vec![Segment::new("S", "a", 1.23456, 1.0)]).unwrap();
        assert_eq!(write_rttm(&list), "SPEAKER S 1 1.235 1.000 <NA> <NA> a <NA> <NA>\n");
    }

    #[test]
    fn ordering_is_onset_then_speaker() {
        let list = SegmentList::new(vec![
            Segment::new("S", "b", 1.0, 1.0),
            Segment::new("S", "a", 1.0, 1.0),
            Segment::new("S", "c", 0.5, 1.0),
        ])
        .unwrap();
        let text = write_rttm(&list);
        let speakers: Vec<&str> = text.lines().map(|l| l.split_whitespace().nth(7).unwrap()).collect();
        assert_eq!(speakers, ["c", "a", "b"]);
    }

    fn segment_strategy() -> impl Strategy<Value = Segment> {
        (0u64..3_600_000, 1u64..60_000, 0usize..4).prop_map(|(on, dur, spk)| {
            Segment::new("sess", format!("spk{spk}"), on as f64 / 1000.0, dur as f64 / 1000.0)
        })
    }

    proptest! {
        #[test]
        fn round_trip_at_millisecond_precision(segs in prop::collection::vec(segment_strategy(), 0..100)) {
            let list = SegmentList::new(segs).unwrap();
            prop_assert_eq!(parse_rttm(&write_rttm(&list)).unwrap(), list);
        }
    }
}
