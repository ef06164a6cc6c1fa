//! Guided source separation of one speaker in an overlapped recording.
//! Pass a directory to also write the enhanced segments there.

use farfield::gss::{concatenate, gss_enhance, GssOptions};
use farfield::signal::{write_wav, StftConfig, WavEncoding};
use farfield::sim::{render, si_snr, Room, SceneSpec, ScheduleEntry, SignalKind, SourceSpec};

fn main() {
    let out_dir = std::env::args().nth(1);
    let source = |id: &str, position| SourceSpec { id: id.into(), position, signal: SignalKind::SpeechLike, gain_db: 0.0 };
    let turn = |id: &str, onset, duration| ScheduleEntry { source: id.into(), onset, duration };
    let spec = SceneSpec {
        session: "meeting".into(),
        duration_s: 10.0,
        room: Room::Reverb { decay_s: 0.2 },
        mics: vec![[2.0, 2.0, 1.2], [2.1, 2.0, 1.2], [2.0, 2.1, 1.2], [2.1, 2.1, 1.2]],
        sources: vec![source("alice", [3.5, 2.5, 1.5]), source("bob", [1.0, 3.2, 1.5])],
        schedule: vec![turn("alice", 0.5, 2.0), turn("bob", 1.5, 3.0), turn("alice", 4.0, 3.5), turn("bob", 6.0, 3.5)],
        noise_db: Some(-25.0),
        seed: 7,
    };
    let r = render(&spec, 16000).unwrap();
    let truth = spec.truth();

    let image = r.image("alice").unwrap();
    let segments = gss_enhance(&r.mixture, &truth, "alice", &StftConfig::default(), &GssOptions::default()).unwrap();
    for seg in &segments {
        let (a, b) = (seg.start_sample, seg.end_sample);
        let before = si_snr(&r.mixture.channel(0)[a..b], &image.channel(0)[a..b]).unwrap();
        let after = si_snr(&seg.samples, &image.channel(0)[a..b]).unwrap();
        println!("{}: SI-SNR {before:.1} dB -> {after:.1} dB", seg.file_name());
        if let Some(dir) = &out_dir {
            let mono = farfield::signal::MultichannelWave::mono(16000, seg.samples.clone()).unwrap();
            write_wav(&mono, std::path::Path::new(dir).join(seg.file_name()), WavEncoding::Float32).unwrap();
        }
    }
    let joined = concatenate(&segments, 16000).unwrap();
    println!("{} enhanced seconds in total", joined.duration_s());
}
