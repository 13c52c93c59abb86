#![no_main]

use libfuzzer_sys::fuzz_target;
use vacuumcone::dispersion::parse_dispersion_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = parse_dispersion_csv(text) {
            // a parsed table must be usable across its whole range
            let (lo, hi) = model.range();
            for i in 0..=8 {
                let w = lo + (hi - lo) * i as f64 / 8.0;
                let _ = model.refractive_index(w);
                let _ = model.group_index(w);
            }
        }
    }
});
