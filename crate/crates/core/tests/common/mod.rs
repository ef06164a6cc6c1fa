#![allow(dead_code)]

use farfield::rttm::{Segment, SegmentList};
use farfield::sim::{Room, SceneSpec, ScheduleEntry, SignalKind, SourceSpec};
use rand::Rng;

pub const SQUARE_MICS: [[f64; 3]; 4] = [[2.0, 2.0, 1.2], [2.1, 2.0, 1.2], [2.0, 2.1, 1.2], [2.1, 2.1, 1.2]];

pub fn source(id: &str, position: [f64; 3]) -> SourceSpec {
    SourceSpec { id: id.into(), position, signal: SignalKind::SpeechLike, gain_db: 0.0 }
}

pub fn entry(source: &str, onset: f64, duration: f64) -> ScheduleEntry {
    ScheduleEntry { source: source.into(), onset, duration }
}

/// Alternating two-speaker conversation with small overlaps and pauses.
pub fn conversation(duration_s: f64, seed: u64, rng: &mut impl Rng) -> SceneSpec {
    let mut schedule = Vec::new();
    let mut t = 0.5;
    let mut who = 0;
    while t < duration_s - 3.0 {
        let len: f64 = rng.random_range(2.0..8.0f64).min(duration_s - t - 0.5);
        schedule.push(entry(["A", "B"][who], t, len));
        t += len + rng.random_range(-0.5..1.5f64);
        who = 1 - who;
    }
    SceneSpec {
        session: "conv".into(),
        duration_s,
        room: Room::Reverb { decay_s: 0.3 },
        mics: SQUARE_MICS.to_vec(),
        sources: vec![source("A", [3.5, 2.5, 1.5]), source("B", [1.0, 3.2, 1.5])],
        schedule,
        noise_db: Some(-20.0),
        seed,
    }
}

/// Two-speaker list with the labels exchanged inside `[a, b)`.
pub fn swap_labels(list: &SegmentList, a: f64, b: f64) -> SegmentList {
    let speakers = list.speakers();
    let other = |s: &str| speakers.iter().find(|x| x.as_str() != s).cloned().unwrap_or_else(|| s.to_string());
    let mut out = Vec::new();
    for s in list.iter() {
        let pieces = [(s.onset, s.end().min(a), false), (s.onset.max(a), s.end().min(b), true), (s.onset.max(b), s.end(), false)];
        for (x, y, swapped) in pieces {
            if y - x > 1e-9 {
                let spk = if swapped { other(&s.speaker) } else { s.speaker.clone() };
                out.push(Segment::new(s.session.clone(), spk, x, y - x));
            }
        }
    }
    SegmentList::new(out).unwrap()
}

/// Random segments with onsets and durations on whole milliseconds.
pub fn random_segments(rng: &mut impl Rng, speakers: &[&str], span: f64, count: usize) -> SegmentList {
    let segs = (0..count)
        .map(|_| {
            let onset = rng.random_range(0..(span * 1000.0) as u32) as f64 / 1000.0;
            let dur = rng.random_range(50..2000u32) as f64 / 1000.0;
            Segment::new("s", speakers[rng.random_range(0..speakers.len())], onset, dur)
        })
        .collect();
    SegmentList::new(segs).unwrap()
}

fn injective_maps(n_hyp: usize, n_ref: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n_hyp {
        let mut next = Vec::new();
        for m in &out {
            next.push([m.clone(), vec![None]].concat());
            for r in 0..n_ref {
                if !m.contains(&Some(r)) {
                    next.push([m.clone(), vec![Some(r)]].concat());
                }
            }
        }
        out = next;
    }
    out
}

/// DER in percent on a 1 ms grid, every speaker mapping tried.
pub fn der_oracle(reference: &SegmentList, hypothesis: &SegmentList, collar: f64) -> f64 {
    const STEP: f64 = 1e-3;
    let refs = reference.speakers();
    let hyps = hypothesis.speakers();
    let end = reference.iter().chain(hypothesis.iter()).map(|s| s.end()).fold(0.0, f64::max) + collar;
    let n = (end / STEP).ceil() as usize + 1;
    let active = |list: &SegmentList, spk: &str, t: f64| list.for_speaker(spk).any(|s| s.onset <= t && t < s.end());
    let grid: Vec<(Vec<bool>, Vec<bool>)> = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * STEP;
            (refs.iter().map(|s| active(reference, s, t)).collect(), hyps.iter().map(|s| active(hypothesis, s, t)).collect())
        })
        .collect();
    // a reference boundary sits wherever some reference speaker switches on or off
    let mut boundaries: Vec<f64> = Vec::new();
    for i in 0..n {
        let before = if i == 0 { None } else { Some(&grid[i - 1].0) };
        for (k, spk) in refs.iter().enumerate() {
            if before.is_some_and(|b| b[k]) != grid[i].0[k] {
                // exact edge of the segment responsible for the switch
                let (lo, hi) = ((i as f64 - 0.5) * STEP, (i as f64 + 0.5) * STEP);
                let edge = reference
                    .for_speaker(spk)
                    .flat_map(|s| [s.onset, s.end()])
                    .find(|&e| lo <= e && e <= hi)
                    .unwrap_or(i as f64 * STEP);
                boundaries.push(edge);
            }
        }
    }
    let frames: Vec<(Vec<bool>, Vec<bool>)> = grid
        .into_iter()
        .enumerate()
        .filter(|(i, _)| {
            let t = (*i as f64 + 0.5) * STEP;
            collar == 0.0 || !boundaries.iter().any(|b| (t - b).abs() < collar)
        })
        .map(|(_, f)| f)
        .collect();
    let total: usize = frames.iter().map(|(r, _)| r.iter().filter(|&&x| x).count()).sum();
    let mut best = f64::INFINITY;
    for map in injective_maps(hyps.len(), refs.len()) {
        let mut err = 0usize;
        for (r, h) in &frames {
            let nr = r.iter().filter(|&&x| x).count();
            let nh = h.iter().filter(|&&x| x).count();
            let correct = h.iter().enumerate().filter(|&(j, &on)| on && map[j].is_some_and(|k| r[k])).count();
            err += nr.max(nh) - correct;
        }
        best = best.min(err as f64);
    }
    100.0 * best / total as f64
}
