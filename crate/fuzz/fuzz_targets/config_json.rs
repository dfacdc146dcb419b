#![no_main]

use libfuzzer_sys::fuzz_target;

// Any byte string either parses into a checked config or is rejected with a
// config error. It must never panic.
fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = hscaler_cli::RunConfig::from_json_bytes(data) {
        let again = serde_json::to_vec(&cfg).unwrap();
        let round = hscaler_cli::RunConfig::from_json_bytes(&again).unwrap();
        assert_eq!(round, cfg);
    }
});
