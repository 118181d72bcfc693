#![no_main]

use libfuzzer_sys::fuzz_target;
use subsim::io::read_summary_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = read_summary_json(data) {
        let _ = file.config.into_config();
    }
});
