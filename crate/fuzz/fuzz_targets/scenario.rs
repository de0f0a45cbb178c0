#![no_main]

use curveflow::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = Scenario::from_toml_str(text) {
        // anything accepted must survive a round trip and build a state
        let again = Scenario::from_toml_str(&s.to_toml_string()).expect("round trip");
        assert_eq!(again, s);
        let _ = s.system_state();
    }
});
