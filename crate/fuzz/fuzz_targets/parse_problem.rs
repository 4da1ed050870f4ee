#![no_main]

use eptest::ProblemSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(p) = s.parse::<ProblemSpec>() {
        let again: ProblemSpec = p.to_string().parse().expect("display round-trips");
        assert_eq!(again.to_string(), p.to_string());
    }
});
