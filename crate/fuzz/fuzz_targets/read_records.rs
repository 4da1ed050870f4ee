#![no_main]

use eptest::sim::read_records_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_records_csv(data);
});
