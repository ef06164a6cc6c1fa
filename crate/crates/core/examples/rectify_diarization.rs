//! Repair a diarization whose labels are swapped for 20 s, over two
//! rectification stages. Usage: rectify_diarization [duration_s]

use farfield::der::der;
use farfield::rectify::{rectify_stages, RectifyConfig};
use farfield::rttm::{Segment, SegmentList};
use farfield::signal::StftConfig;
use farfield::sim::{render, Room, SceneSpec, ScheduleEntry, SignalKind, SourceSpec};
use rand::{Rng, SeedableRng};

fn main() {
    let duration: f64 = std::env::args().nth(1).map(|s| s.parse().expect("duration in seconds")).unwrap_or(180.0);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut schedule = Vec::new();
    let (mut t, mut who) = (0.5, 0);
    while t < duration - 3.0 {
        let len = rng.random_range(2.0..8.0f64).min(duration - t - 0.5);
        schedule.push(ScheduleEntry { source: ["A", "B"][who].into(), onset: t, duration: len });
        t += len + rng.random_range(-0.5..1.5f64);
        who = 1 - who;
    }
    let source = |id: &str, position| SourceSpec { id: id.into(), position, signal: SignalKind::SpeechLike, gain_db: 0.0 };
    let spec = SceneSpec {
        session: "conv".into(),
        duration_s: duration,
        room: Room::Reverb { decay_s: 0.3 },
        mics: vec![[2.0, 2.0, 1.2], [2.1, 2.0, 1.2], [2.0, 2.1, 1.2], [2.1, 2.1, 1.2]],
        sources: vec![source("A", [3.5, 2.5, 1.5]), source("B", [1.0, 3.2, 1.5])],
        schedule,
        noise_db: Some(-20.0),
        seed: 9,
    };
    let r = render(&spec, 16000).unwrap();
    let truth = spec.truth();

    let (a, b) = (duration / 3.0, duration / 3.0 + 20.0);
    let corrupted = truth
        .iter()
        .flat_map(|s| {
            let swapped = if s.speaker == "A" { "B" } else { "A" };
            [(s.onset, s.end().min(a), s.speaker.as_str()), (s.onset.max(a), s.end().min(b), swapped), (s.onset.max(b), s.end(), s.speaker.as_str())]
                .into_iter()
                .filter(|(x, y, _)| y - x > 1e-9)
                .map(|(x, y, spk)| Segment::new("conv", spk, x, y - x))
                .collect::<Vec<_>>()
        })
        .collect();
    let init = SegmentList::new(corrupted).unwrap();

    let cfg = RectifyConfig::default();
    println!("initial DER {:.2}%", der(&truth, &init, 0.25).unwrap().der);
    for (i, (segments, probs)) in rectify_stages(&r.mixture, &init, &cfg, &StftConfig::default(), 2).unwrap().iter().enumerate() {
        let report = der(&truth, segments, 0.25).unwrap();
        println!(
            "stage {}: DER {:.2}% (miss {:.2}, false alarm {:.2}, confusion {:.2}), {} frames",
            i + 1,
            report.der,
            report.miss_pct,
            report.false_alarm_pct,
            report.speaker_error_pct,
            probs.num_frames()
        );
    }
}
