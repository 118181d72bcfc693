#![no_main]

use libfuzzer_sys::fuzz_target;
use subsim::partition::PartitionSpec;

fuzz_target!(|data: &[u8]| {
    let Some((&dim, json)) = data.split_first() else {
        return;
    };
    let Ok(spec) = serde_json::from_slice::<PartitionSpec>(json) else {
        return;
    };
    let Ok(p) = spec.build(dim as usize % 8 + 1) else {
        return;
    };
    let total: f64 = p.probs().iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
    let probe = vec![0.5; p.dim()];
    assert!(p.classify(&probe.into()).index() < p.num_bins());
});
