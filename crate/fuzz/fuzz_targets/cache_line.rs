#![no_main]

use imagclass_cli::cache::{parse_cache_line, Cache, CacheRecord};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rec) = parse_cache_line(text) {
        let again = parse_cache_line(&rec.to_line()).expect("serialized records parse");
        assert_eq!(again, rec);
        let row = rec.into_row();
        assert_eq!(CacheRecord::from_row(&row).to_line().lines().count(), 1);
    }
    let _ = Cache::from_text(text);
});
