#![no_main]

use libfuzzer_sys::fuzz_target;
use vacuumcone::CorrelationResult;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(result) = CorrelationResult::from_json(text) {
            let _ = result.spectrum_csv();
            let _ = result.total_spectrum();
            let _ = result.trace();
        }
    }
});
