#![no_main]

use icenav::ice::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = Scenario::from_json(text) {
        // anything accepted must survive a write/read cycle unchanged
        let again = Scenario::from_json(&s.to_json()).expect("re-read of written scenario");
        assert_eq!(again, s);
    }
});
