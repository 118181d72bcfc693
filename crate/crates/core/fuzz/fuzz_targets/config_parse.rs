#![no_main]

use libfuzzer_sys::fuzz_target;
use subsim::config::{parse_config, ExperimentConfig};
use subsim::Registry;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(raw) = parse_config(text) else {
        return;
    };
    let Ok(cfg) = raw.into_config() else {
        return;
    };
    let _ = cfg.resolve(&Registry::builtin());
    // A validated config must survive both serializations unchanged.
    let again: ExperimentConfig = cfg.to_toml().parse().expect("toml round trip");
    assert_eq!(cfg, again);
    let json = serde_json::to_string(&cfg.to_raw()).expect("serialize");
    let again: ExperimentConfig = json.parse().expect("json round trip");
    assert_eq!(cfg, again);
});
