#![no_main]

use icenav::sim::{read_trajectory_log, write_trajectory_log};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = read_trajectory_log(data) {
        let mut out = Vec::new();
        write_trajectory_log(&samples, &mut out).unwrap();
        assert_eq!(read_trajectory_log(out.as_slice()).unwrap(), samples);
    }
});
