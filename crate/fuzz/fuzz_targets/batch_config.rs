#![no_main]

use icenav::bench::BatchConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(c) = BatchConfig::from_toml_str(text) {
        assert_eq!(BatchConfig::from_toml_str(&c.to_toml_string()).unwrap(), c);
    }
});
