#![no_main]

use std::io::Cursor;

use icenav::bench::{read_records, TrialRecord};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = TrialRecord::from_line(text) {
            assert_eq!(TrialRecord::from_line(&r.to_line()).unwrap(), r);
        }
    }
    if let Ok((_, Some(offset))) = read_records(Cursor::new(data), true) {
        assert!(offset as usize <= data.len());
    }
});
