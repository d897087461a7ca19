//! Fuzzes the scenario-file front door: TOML text in, resolved scenario out.
//!
//! Invariants exercised on arbitrary input:
//! - parsing and resolution may reject, but must never panic or hang;
//! - any document that resolves must re-serialize, and the serialized form
//!   must parse and resolve again (configuration round trips are stable).

#![no_main]

use libfuzzer_sys::fuzz_target;
use manakov::config::ScenarioDoc;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = ScenarioDoc::from_toml(text) else {
        return;
    };
    let Ok(scenario) = doc.resolve() else {
        return;
    };
    let rendered = scenario.resolved_doc().to_toml();
    let again = ScenarioDoc::from_toml(&rendered)
        .expect("a resolved scenario must serialize to parseable TOML");
    again
        .resolve()
        .expect("a re-parsed resolved scenario must resolve again");
});
