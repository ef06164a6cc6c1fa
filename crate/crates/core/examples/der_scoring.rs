//! Score a hypothesis RTTM against a reference, with and without a collar.

use farfield::der::der;
use farfield::rttm::parse_rttm;

const REFERENCE: &str = "\
SPEAKER s1 1 0.00 4.00 <NA> <NA> alice <NA> <NA>
SPEAKER s1 1 4.00 3.00 <NA> <NA> bob <NA> <NA>
SPEAKER s1 1 6.50 2.00 <NA> <NA> alice <NA> <NA>
";

const HYPOTHESIS: &str = "\
SPEAKER s1 1 0.10 4.10 <NA> <NA> spk0 <NA> <NA>
SPEAKER s1 1 4.20 2.80 <NA> <NA> spk1 <NA> <NA>
SPEAKER s1 1 7.00 1.50 <NA> <NA> spk1 <NA> <NA>
";

fn main() {
    let reference = parse_rttm(REFERENCE).unwrap();
    let hypothesis = parse_rttm(HYPOTHESIS).unwrap();
    for collar in [0.0, 0.25] {
        let r = der(&reference, &hypothesis, collar).unwrap();
        println!(
            "collar {collar:.2} s: DER {:.2}% = miss {:.2} + false alarm {:.2} + confusion {:.2} over {:.2} s, mapping {:?}",
            r.der, r.miss_pct, r.false_alarm_pct, r.speaker_error_pct, r.scored_speech_s, r.mapping
        );
    }
}
