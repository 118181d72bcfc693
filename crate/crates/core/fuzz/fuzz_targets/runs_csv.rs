#![no_main]

use libfuzzer_sys::fuzz_target;
use subsim::io::{read_runs_csv, write_runs_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(records) = read_runs_csv(data) else {
        return;
    };
    let bins = records.first().map_or(0, |r| r.pi_hats.len());
    if records.iter().any(|r| r.pi_hats.len() != bins) {
        return;
    }
    let mut out = Vec::new();
    write_runs_csv(&mut out, &records, bins).expect("write");
    let again = read_runs_csv(out.as_slice()).expect("reparse");
    assert_eq!(records.len(), again.len());
});
