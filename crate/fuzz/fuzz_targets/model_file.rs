#![no_main]

use fairprep::linalg::Matrix;
use fairprep::ml::ModelFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = ModelFile::from_json(text) else { return };
    if let Ok(net) = file.to_mlp() {
        let d = net.dims()[0];
        if d <= 64 {
            let _ = net.predict(&Matrix::zeros(1, d));
        }
    }
});
