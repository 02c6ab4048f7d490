#![no_main]

use fairprep::debias::DebiasModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = DebiasModel::from_json(text) {
            let _ = m.to_json();
        }
    }
});
