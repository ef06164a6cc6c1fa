//! Render a scene described in JSON to WAV and RTTM files.
//! Usage: simulate_scene [out_dir]

use farfield::rttm::write_rttm;
use farfield::signal::{write_wav, WavEncoding};
use farfield::sim::{render, SceneSpec};

const SCENE: &str = r#"{
  "session": "demo",
  "duration_s": 6.0,
  "room": {"kind": "reverb", "decay_s": 0.4},
  "mics": [[2.0, 2.0, 1.2], [2.1, 2.0, 1.2], [2.0, 2.1, 1.2]],
  "sources": [
    {"id": "talker", "position": [3.0, 3.0, 1.6], "signal": {"kind": "speech_like"}},
    {"id": "hum", "position": [0.5, 0.5, 0.3], "signal": {"kind": "sinusoid", "freq_hz": 120.0}, "gain_db": -12.0}
  ],
  "schedule": [
    {"source": "talker", "onset": 0.5, "duration": 2.0},
    {"source": "talker", "onset": 3.2, "duration": 2.5},
    {"source": "hum", "onset": 0.0, "duration": 6.0}
  ],
  "noise_db": -25.0,
  "seed": 42
}"#;

fn main() {
    let spec: SceneSpec = serde_json::from_str(SCENE).unwrap();
    let r = render(&spec, 16000).unwrap();
    println!("{} channels, {:.1} s, sources {:?}", r.mixture.num_channels(), r.mixture.duration_s(), r.source_ids);
    print!("{}", write_rttm(&r.truth));
    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::Path::new(&dir);
        std::fs::create_dir_all(dir).unwrap();
        write_wav(&r.mixture, dir.join("demo.wav"), WavEncoding::Float32).unwrap();
        std::fs::write(dir.join("demo.rttm"), write_rttm(&r.truth)).unwrap();
        println!("wrote {}", dir.display());
    }
}
