#![no_main]

use libfuzzer_sys::fuzz_target;
use vacuumcone::config::parse_config_str;
use vacuumcone::validate_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // whatever parses must validate to either a config or a list of errors
        if let Ok(cfg) = parse_config_str(text) {
            if let Err(errors) = validate_config(cfg) {
                assert!(!errors.0.is_empty());
            }
        }
    }
});
