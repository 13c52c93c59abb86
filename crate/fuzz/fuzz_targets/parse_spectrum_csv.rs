#![no_main]

use libfuzzer_sys::fuzz_target;
use vacuumcone::signal::{parse_spectrum_csv, spectrum_to_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spectrum) = parse_spectrum_csv(text) {
            let again = parse_spectrum_csv(&spectrum_to_csv(&spectrum)).expect("written spectra parse");
            assert_eq!(again.values, spectrum.values);
        }
    }
});
