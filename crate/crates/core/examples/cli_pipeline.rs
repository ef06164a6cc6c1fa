//! The command-line pipeline driven in-process: simulate, sync, select,
//! enhance, rectify and score, all in a scratch directory.

use farfield::cli::run;

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).display().to_string();
    let scene = serde_json::json!({
        "session": "cli", "duration_s": 20.0, "room": {"kind": "reverb", "decay_s": 0.25},
        "mics": [[2.0, 2.0, 1.2], [2.1, 2.0, 1.2], [2.0, 2.1, 1.2], [2.1, 2.1, 1.2]],
        "sources": [
            {"id": "A", "position": [3.5, 2.5, 1.5], "signal": {"kind": "speech_like"}},
            {"id": "B", "position": [1.0, 3.2, 1.5], "signal": {"kind": "speech_like"}}
        ],
        "schedule": [
            {"source": "A", "onset": 1.0, "duration": 5.0}, {"source": "B", "onset": 6.5, "duration": 5.0},
            {"source": "A", "onset": 12.0, "duration": 3.5}, {"source": "B", "onset": 15.0, "duration": 4.0}
        ],
        "noise_db": -20.0, "seed": 3
    });
    std::fs::write(p("scene.json"), scene.to_string()).unwrap();
    let steps: Vec<Vec<String>> = vec![
        vec!["simulate", "--spec", &p("scene.json"), "--out-prefix", &p("scene")],
        vec!["sync", "--in", &p("scene.wav"), "--out", &p("synced.wav")],
        vec!["select", "--in", &p("synced.wav"), "--rttm", &p("scene.rttm"), "--k", "2", "--policy", "front50", "--out", &p("plan.json")],
        vec!["enhance", "--in", &p("synced.wav"), "--rttm", &p("scene.rttm"), "--speaker", "B", "--channels", &p("plan.json"), "--out-dir", &p("enhanced")],
        vec!["rectify", "--in", &p("synced.wav"), "--rttm", &p("scene.rttm"), "--window-s", "10", "--shift-s", "5", "--out", &p("rect.rttm")],
        vec!["score", "--ref", &p("scene.rttm"), "--hyp", &p("rect.rttm")],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for step in steps {
        println!("$ farfield {}", step.join(" "));
        let code = run(std::iter::once("farfield".to_string()).chain(step), &mut std::io::stdout(), &mut std::io::stderr());
        if code != 0 {
            std::process::exit(code);
        }
    }
}
