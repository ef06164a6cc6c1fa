//! MVDR and GEVD beamformers from oracle spatial covariances.

use farfield::beamform::{apply_beamformer, beamformer_weights, estimate_covariance, BeamformerKind};
use farfield::signal::{stft, MultichannelWave, StftConfig, StftTensor};
use farfield::sim::{render, Room, SceneSpec, ScheduleEntry, SignalKind, SourceSpec};

fn energy(t: &StftTensor) -> f64 {
    t.channel(0).iter().map(|v| v.norm_sqr()).sum()
}

fn main() {
    let source = |id: &str, position| SourceSpec { id: id.into(), position, signal: SignalKind::SpeechLike, gain_db: 0.0 };
    let spec = SceneSpec {
        session: "bf".into(),
        duration_s: 4.0,
        room: Room::Anechoic,
        mics: vec![[2.0, 2.0, 1.2], [2.2, 2.0, 1.2], [2.0, 2.2, 1.2], [2.2, 2.2, 1.2]],
        sources: vec![source("target", [4.0, 2.5, 1.5]), source("interferer", [1.0, 3.8, 1.5])],
        schedule: vec![
            ScheduleEntry { source: "target".into(), onset: 0.0, duration: 4.0 },
            ScheduleEntry { source: "interferer".into(), onset: 0.0, duration: 4.0 },
        ],
        noise_db: Some(-40.0),
        seed: 4,
    };
    let r = render(&spec, 16000).unwrap();
    let cfg = StftConfig::default();
    let target = stft(r.image("target").unwrap(), &cfg).unwrap();
    let rest: Vec<Vec<f64>> = (0..4)
        .map(|c| r.image("interferer").unwrap().channel(c).iter().zip(r.noise.channel(c)).map(|(a, b)| a + b).collect())
        .collect();
    let rest = stft(&MultichannelWave::new(16000, rest).unwrap(), &cfg).unwrap();

    let everywhere = vec![1.0; target.num_frames() * target.num_bins()];
    let phi_t = estimate_covariance(&target, &everywhere).unwrap();
    let phi_n = estimate_covariance(&rest, &everywhere).unwrap();
    println!("input SINR at channel 0: {:.1} dB", 10.0 * (energy(&target) / energy(&rest)).log10());
    for kind in [BeamformerKind::Mvdr, BeamformerKind::Gevd] {
        let w = beamformer_weights(kind, &phi_t, &phi_n, 0).unwrap();
        let (yt, yn) = (apply_beamformer(&target, &w).unwrap(), apply_beamformer(&rest, &w).unwrap());
        println!("{kind:?} output SINR: {:.1} dB ({} fallback bins)", 10.0 * (energy(&yt) / energy(&yn)).log10(), w.fallback_bins);
    }
}
