#![no_main]

use imagclass_cli::reference::{parse_reference_table, Reference};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_reference_table(text) {
        let n = rows.len();
        let reference = Reference::new(rows, Vec::new());
        assert_eq!(reference.rows.len(), n);
    }
});
