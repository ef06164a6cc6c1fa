//! Analyse a two-channel signal, inspect the tensor, and resynthesize it.

use farfield::signal::{istft, stft, MultichannelWave, StftConfig, Window};

fn main() {
    let sr = 16000;
    let tone = |f: f64| (0..sr as usize).map(|n| (std::f64::consts::TAU * f * n as f64 / sr as f64).sin()).collect::<Vec<_>>();
    let wave = MultichannelWave::new(sr, vec![tone(440.0), tone(1000.0)]).unwrap();

    for cfg in [StftConfig::default(), StftConfig::new(512, 128, 1024, Window::Hann).unwrap()] {
        let spec = stft(&wave, &cfg).unwrap();
        let peak = |c: usize| {
            let t = spec.num_frames() / 2;
            (0..spec.num_bins()).max_by(|&a, &b| spec.get(c, t, a).norm().total_cmp(&spec.get(c, t, b).norm())).unwrap()
        };
        let hz = |bin: usize| bin as f64 * sr as f64 / cfg.fft_size as f64;
        let back = istft(&spec).unwrap();
        let err = wave.channels().iter().flatten().zip(back.channels().iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "{:?}: {} frames x {} bins at {:.1} frames/s, peaks {:.0} Hz / {:.0} Hz, round-trip error {err:.1e}",
            cfg,
            spec.num_frames(),
            spec.num_bins(),
            spec.frame_rate(),
            hz(peak(0)),
            hz(peak(1)),
        );
    }
}
