#![no_main]

use eptest::sim::SourceDistribution;
use eptest::ProblemSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(d) = s.parse::<SourceDistribution>() {
        let _ = d.to_string().parse::<SourceDistribution>().expect("display round-trips");
        let _ = d.mean();
        if let Ok(p) = ProblemSpec::bounded_two_sided(0.5) {
            let _ = d.to_finite(&p);
        }
    }
});
