#![no_main]

use libfuzzer_sys::fuzz_target;
use vacuumcone::signal::{parse_trace_csv, trace_to_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(trace) = parse_trace_csv(text) {
            let again = parse_trace_csv(&trace_to_csv(&trace)).expect("written traces parse");
            assert_eq!(again.values, trace.values);
        }
    }
});
