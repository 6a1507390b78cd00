#![no_main]

use imagclass_cli::reference::parse_notes;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_notes(text);
    }
});
