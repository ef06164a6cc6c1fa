//! Rank a 12-mic distributed array by envelope variance, score 3-mic
//! subarrays by MVDR SINR, and apply each selection policy.

use farfield::cacgmm::segments_to_activity;
use farfield::select::{ev_scores, partition_subarrays, score_subarrays, select_channels, SelectionPolicy};
use farfield::signal::{stft, StftConfig};
use farfield::sim::{render, Room, SceneSpec, ScheduleEntry, SignalKind, SourceSpec};

fn main() {
    let mics = (0..12).map(|m| [0.5 + 0.4 * m as f64, 0.8 + 0.3 * (m % 3) as f64, 1.2]).collect();
    let speaker = |id: &str, position| SourceSpec { id: id.into(), position, signal: SignalKind::SpeechLike, gain_db: 0.0 };
    let turn = |id: &str, onset, duration| ScheduleEntry { source: id.into(), onset, duration };
    let spec = SceneSpec {
        session: "sel".into(),
        duration_s: 8.0,
        room: Room::Reverb { decay_s: 0.4 },
        mics,
        sources: vec![speaker("a", [0.6, 2.0, 1.5]), speaker("b", [1.5, 2.5, 1.5])],
        schedule: vec![turn("a", 0.5, 3.0), turn("b", 4.0, 3.0)],
        noise_db: Some(-15.0),
        seed: 2,
    };
    let r = render(&spec, 16000).unwrap();
    let tensor = stft(&r.mixture, &StftConfig::default()).unwrap();

    let ranking = ev_scores(&tensor).unwrap();
    println!("EV order (best first): {:?}", ranking.order);
    let plan = partition_subarrays(&ranking, 3).unwrap();
    let activity = segments_to_activity(&spec.truth(), tensor.frame_rate(), tensor.num_frames()).unwrap();
    let plan = score_subarrays(&plan, &tensor, &activity).unwrap();
    for (g, (group, sinr)) in plan.subarrays.iter().zip(plan.sinr_db.as_ref().unwrap()).enumerate() {
        println!("subarray {g}: {group:?} SINR {sinr:.1} dB");
    }
    for policy in [SelectionPolicy::SingleSubarray, SelectionPolicy::FrontHalfSubarrays, SelectionPolicy::EvTop80Pct] {
        println!("{policy:?}: {:?}", select_channels(&plan, &ranking, policy).unwrap());
    }
}
