#![no_main]

use eptest::StrategySpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(spec) = s.parse::<StrategySpec>() {
        let again: StrategySpec = spec.to_string().parse().expect("display round-trips");
        assert_eq!(again.to_string(), spec.to_string());
    }
});
