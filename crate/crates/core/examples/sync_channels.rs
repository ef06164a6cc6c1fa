//! Misalign the channels of a simulated recording and recover the offsets.

use farfield::signal::MultichannelWave;
use farfield::sim::{render, Room, SceneSpec, ScheduleEntry, SignalKind, SourceSpec};
use farfield::sync::synchronize;

fn main() {
    let spec = SceneSpec {
        session: "sync".into(),
        duration_s: 5.0,
        room: Room::Reverb { decay_s: 0.3 },
        mics: vec![[1.0, 1.0, 1.2], [3.0, 1.0, 1.2], [1.0, 3.0, 1.2]],
        sources: vec![SourceSpec { id: "a".into(), position: [2.0, 2.0, 1.5], signal: SignalKind::SpeechLike, gain_db: 0.0 }],
        schedule: vec![ScheduleEntry { source: "a".into(), onset: 0.3, duration: 4.5 }],
        noise_db: Some(-20.0),
        seed: 1,
    };
    let r = render(&spec, 16000).unwrap();
    let offsets = [0i64, 1234, -777];
    let shifted: Vec<Vec<f64>> = r
        .mixture
        .channels()
        .iter()
        .zip(offsets)
        .map(|(x, d)| (0..x.len() as i64).map(|k| x.get((k - d) as usize).copied().filter(|_| k >= d).unwrap_or(0.0)).collect())
        .collect();
    let wave = MultichannelWave::new(16000, shifted).unwrap();
    let (_, lags) = synchronize(&wave, 0, 2 * 16000).unwrap();
    for (lag, injected) in lags.iter().zip(offsets) {
        println!("channel {}: injected {injected:>5}, estimated {:>5}, peak {:.3}", lag.channel, lag.lag, lag.peak);
    }
}
