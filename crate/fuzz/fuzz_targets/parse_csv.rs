#![no_main]

use fairprep::tabular::{parse_csv, to_csv_string, ColumnSpec, Role};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let schema = [
        ColumnSpec::numeric("x", Role::Feature),
        ColumnSpec::categorical("c", Role::Feature, Vec::<String>::new()),
        ColumnSpec::binary("g", Role::Protected),
    ];
    if let Ok(t) = parse_csv(data, &schema) {
        // anything that parses must survive a write/parse cycle
        let text = to_csv_string(&t).unwrap();
        let back = parse_csv(text.as_bytes(), &t.schema()).unwrap();
        assert_eq!(back, t);
    }
});
