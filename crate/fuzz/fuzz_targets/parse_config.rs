#![no_main]

use eptest::sim::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(c) = ExperimentConfig::from_toml_str(s) {
        let _ = c.validate();
        let _ = c.all_alphas();
    }
});
