//! Diarization error rate with a forgiveness collar.
//!
//! Overlapped speech is scored: a region with `n_ref` reference and `n_hyp`
//! hypothesis speakers contributes `max(0, n_ref - n_hyp)` missed,
//! `max(0, n_hyp - n_ref)` false-alarm and `min(n_ref, n_hyp) - n_correct`
//! confused speaker-seconds per second.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::rttm::SegmentList;

#[derive(Debug, Error, PartialEq)]
pub enum DerError {
    #[error("no reference speech left after applying the {collar_s} s collar")]
    EmptyReference { collar_s: f64 },
    #[error("reference covers sessions {reference:?}, hypothesis covers {hypothesis:?}")]
    SessionMismatch { reference: Vec<String>, hypothesis: Vec<String> },
    #[error("collar must be finite and non-negative, got {0}")]
    InvalidCollar(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerReport {
    pub miss_s: f64,
    pub false_alarm_s: f64,
    pub speaker_error_s: f64,
    pub scored_speech_s: f64,
    pub miss_pct: f64,
    pub false_alarm_pct: f64,
    pub speaker_error_pct: f64,
    pub der: f64,
    /// hypothesis speaker -> reference speaker
    pub mapping: BTreeMap<String, String>,
}

/// Per-speaker disjoint, sorted intervals.
fn merged_intervals(list: &SegmentList) -> Vec<(String, Vec<(f64, f64)>)> {
    list.speakers()
        .into_iter()
        .map(|spk| {
            let mut iv: Vec<(f64, f64)> = list.for_speaker(&spk).map(|s| (s.onset, s.end())).collect();
            iv.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut merged: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
            for (a, b) in iv {
                match merged.last_mut() {
                    Some(last) if a <= last.1 => last.1 = last.1.max(b),
                    _ => merged.push((a, b)),
                }
            }
            (spk, merged)
        })
        .collect()
}

fn contains(intervals: &[(f64, f64)], t: f64) -> bool {
    let idx = intervals.partition_point(|iv| iv.1 <= t);
    intervals.get(idx).is_some_and(|iv| iv.0 <= t && t < iv.1)
}

pub fn der(reference: &SegmentList, hypothesis: &SegmentList, collar_s: f64) -> Result<DerReport, DerError> {
    if !(collar_s.is_finite() && collar_s >= 0.0) {
        return Err(DerError::InvalidCollar(collar_s));
    }
    let ref_sessions = reference.sessions();
    let hyp_sessions = hypothesis.sessions();
    if ref_sessions.len() > 1 || (!hyp_sessions.is_empty() && hyp_sessions != ref_sessions) {
        return Err(DerError::SessionMismatch { reference: ref_sessions, hypothesis: hyp_sessions });
    }

    let refs = merged_intervals(reference);
    let hyps = merged_intervals(hypothesis);

    let mut zones: Vec<(f64, f64)> = Vec::new();
    if collar_s > 0.0 {
        for (_, iv) in &refs {
            for &(a, b) in iv {
                zones.push((a - collar_s, a + collar_s));
                zones.push((b - collar_s, b + collar_s));
            }
        }
        zones.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(zones.len());
        for (a, b) in zones {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        zones = merged;
    }

    let mut points: Vec<f64> = Vec::new();
    for (_, iv) in refs.iter().chain(&hyps) {
        for &(a, b) in iv {
            points.push(a);
            points.push(b);
        }
    }
    for &(a, b) in &zones {
        points.push(a);
        points.push(b);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    struct Region {
        duration: f64,
        refs: Vec<usize>,
        hyps: Vec<usize>,
    }
    let mut regions = Vec::new();
    let mut overlap = vec![vec![0.0; refs.len()]; hyps.len()];
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        if b <= a || contains(&zones, mid) {
            continue;
        }
        let r: Vec<usize> = (0..refs.len()).filter(|&i| contains(&refs[i].1, mid)).collect();
        let h: Vec<usize> = (0..hyps.len()).filter(|&i| contains(&hyps[i].1, mid)).collect();
        if r.is_empty() && h.is_empty() {
            continue;
        }
        for &hi in &h {
            for &ri in &r {
                overlap[hi][ri] += b - a;
            }
        }
        regions.push(Region { duration: b - a, refs: r, hyps: h });
    }

    let assignment = best_assignment(&overlap);
    let (mut miss, mut fa, mut conf, mut total) = (0.0, 0.0, 0.0, 0.0);
    for reg in &regions {
        let (nr, nh) = (reg.refs.len(), reg.hyps.len());
        let correct = reg.hyps.iter().filter(|&&h| assignment[h].is_some_and(|r| reg.refs.contains(&r))).count();
        total += nr as f64 * reg.duration;
        miss += nr.saturating_sub(nh) as f64 * reg.duration;
        fa += nh.saturating_sub(nr) as f64 * reg.duration;
        conf += (nr.min(nh) - correct) as f64 * reg.duration;
    }
    if total <= 0.0 {
        return Err(DerError::EmptyReference { collar_s });
    }
    let mapping = assignment
        .iter()
        .enumerate()
        .filter_map(|(h, r)| r.filter(|&r| overlap[h][r] > 0.0).map(|r| (hyps[h].0.clone(), refs[r].0.clone())))
        .collect();
    let pct = |x: f64| 100.0 * x / total;
    let (miss_pct, false_alarm_pct, speaker_error_pct) = (pct(miss), pct(fa), pct(conf));
    Ok(DerReport {
        miss_s: miss,
        false_alarm_s: fa,
        speaker_error_s: conf,
        scored_speech_s: total,
        miss_pct,
        false_alarm_pct,
        speaker_error_pct,
        der: miss_pct + false_alarm_pct + speaker_error_pct,
        mapping,
    })
}

const EXHAUSTIVE_LIMIT: usize = 6;

/// One-to-one row->column assignment maximizing the summed weight.
pub fn best_assignment(weights: &[Vec<f64>]) -> Vec<Option<usize>> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows <= EXHAUSTIVE_LIMIT && cols <= EXHAUSTIVE_LIMIT {
        exhaustive_assignment(weights)
    } else {
        hungarian_assignment(weights)
    }
}

pub(crate) fn exhaustive_assignment(weights: &[Vec<f64>]) -> Vec<Option<usize>> {
    fn search(
        row: usize,
        weights: &[Vec<f64>],
        used: &mut Vec<bool>,
        current: &mut Vec<Option<usize>>,
        score: f64,
        best: &mut (f64, Vec<Option<usize>>),
    ) {
        if row == weights.len() {
            if score > best.0 {
                *best = (score, current.clone());
            }
            return;
        }
        current[row] = None;
        search(row + 1, weights, used, current, score, best);
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                current[row] = Some(c);
                search(row + 1, weights, used, current, score + weights[row][c], best);
                used[c] = false;
            }
        }
        current[row] = None;
    }
    let cols = weights.first().map_or(0, Vec::len);
    let mut best = (f64::NEG_INFINITY, vec![None; weights.len()]);
    search(0, weights, &mut vec![false; cols], &mut vec![None; weights.len()], 0.0, &mut best);
    best.1
}

/// Kuhn-Munkres with potentials on the zero-padded square cost matrix.
pub(crate) fn hungarian_assignment(weights: &[Vec<f64>]) -> Vec<Option<usize>> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    if n == 0 {
        return Vec::new();
    }
    let max_w = weights.iter().flatten().cloned().fold(0.0, f64::max);
    let cost = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            max_w - weights[i][j]
        } else {
            max_w
        }
    };
    // 1-based arrays as in the classic formulation
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![None; rows];
    for j in 1..=n {
        let i = p[j];
        if i >= 1 && i <= rows && j <= cols {
            out[i - 1] = Some(j - 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rttm::Segment;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn list(items: &[(&str, f64, f64)]) -> SegmentList {
        SegmentList::new(items.iter().map(|&(s, a, d)| Segment::new("S", s, a, d)).collect()).unwrap()
    }

    fn value(weights: &[Vec<f64>], a: &[Option<usize>]) -> f64 {
        a.iter().enumerate().filter_map(|(i, c)| c.map(|c| weights[i][c])).sum()
    }

    #[test]
    fn identity_scores_zero() {
        let r = list(&[("a", 0.0, 5.0), ("b", 4.0, 3.0), ("a", 9.0, 2.0)]);
        let rep = der(&r, &r, 0.25).unwrap();
        assert_eq!(rep.der, 0.0);
        assert_eq!(rep.mapping.get("a").map(String::as_str), Some("a"));
    }

    #[test]
    fn empty_hypothesis_is_all_miss() {
        let r = list(&[("a", 0.0, 5.0), ("b", 6.0, 3.0)]);
        let rep = der(&r, &SegmentList::default(), 0.25).unwrap();
        assert!((rep.der - 100.0).abs() < 1e-12);
        assert!((rep.miss_pct - 100.0).abs() < 1e-12);
    }

    #[test]
    fn label_permutation_is_free() {
        let r = list(&[("a", 0.0, 5.0), ("b", 6.0, 3.0)]);
        let h = list(&[("x", 0.0, 5.0), ("y", 6.0, 3.0)]);
        assert_eq!(der(&r, &h, 0.0).unwrap().der, 0.0);
    }

    #[test]
    fn confusion_and_false_alarm() {
        let r = list(&[("a", 0.0, 10.0)]);
        let h = list(&[("x", 0.0, 6.0), ("y", 6.0, 4.0), ("y", 20.0, 1.0)]);
        let rep = der(&r, &h, 0.0).unwrap();
        assert!((rep.speaker_error_s - 4.0).abs() < 1e-12);
        assert!((rep.false_alarm_s - 1.0).abs() < 1e-12);
        assert!((rep.der - 50.0).abs() < 1e-9);
        assert!((rep.der - (rep.miss_pct + rep.false_alarm_pct + rep.speaker_error_pct)).abs() < 1e-9);
    }

    #[test]
    fn shifted_boundaries_inside_collar_are_forgiven() {
        let r = list(&[("a", 1.0, 4.0), ("b", 7.0, 3.0)]);
        let h = r.shifted(0.2);
        assert_eq!(der(&r, &h, 0.25).unwrap().der, 0.0);
        assert!(der(&r, &h, 0.0).unwrap().der > 0.0);
    }

    #[test]
    fn empty_reference_is_an_error() {
        assert!(matches!(der(&SegmentList::default(), &SegmentList::default(), 0.25), Err(DerError::EmptyReference { .. })));
        let tiny = list(&[("a", 1.0, 0.3)]);
        assert!(matches!(der(&tiny, &tiny, 0.25), Err(DerError::EmptyReference { .. })));
    }

    #[test]
    fn session_mismatch() {
        let r = list(&[("a", 0.0, 1.0)]);
        let h = SegmentList::new(vec![Segment::new("T", "a", 0.0, 1.0)]).unwrap();
        assert!(matches!(der(&r, &h, 0.25), Err(DerError::SessionMismatch { .. })));
    }

    #[test]
    fn hungarian_matches_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let rows = rng.random_range(0..6);
            let cols = rng.random_range(1..6);
            let w: Vec<Vec<f64>> =
                (0..rows).map(|_| (0..cols).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..10.0) }).collect()).collect();
            let a = exhaustive_assignment(&w);
            let b = hungarian_assignment(&w);
            assert!((value(&w, &a) - value(&w, &b)).abs() < 1e-9);
        }
    }

    #[test]
    fn collar_monotone() {
        let r = list(&[("a", 0.0, 5.0), ("b", 4.5, 3.0), ("a", 9.0, 2.0)]);
        let h = list(&[("x", 0.3, 4.0), ("y", 5.0, 3.3), ("y", 9.1, 1.0)]);
        let mut last = f64::INFINITY;
        for k in 0..10 {
            let d = der(&r, &h, k as f64 * 0.1).unwrap().der;
            assert!(d <= last + 1e-12);
            last = d;
        }
    }

    #[test]
    fn time_shift_invariance() {
        let r = list(&[("a", 0.0, 5.0), ("b", 4.5, 3.0)]);
        let h = list(&[("x", 0.3, 4.0), ("y", 5.0, 3.3)]);
        let a = der(&r, &h, 0.25).unwrap();
        let b = der(&r.shifted(10.0), &h.shifted(10.0), 0.25).unwrap();
        assert!((a.der - b.der).abs() < 1e-9);
        assert_eq!(a.mapping, b.mapping);
    }
}
