#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    jbtriple_cli::decoders::decode("config_json", data);
});
