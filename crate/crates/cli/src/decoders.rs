//! Entry points shared by the fuzz targets and the corpus replay test.
//!
//! Each decoder must return (never panic) on arbitrary bytes. Inputs that
//! decode must survive an encode/decode round trip unchanged.

use jbtriple::moebius::BallAutomorphism;
use jbtriple::spectral::SpectralData;
use jbtriple::{Element, Factor, LinearMap};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::FileConfig;

pub const TARGETS: &[&str] = &[
    "factor_spec",
    "factor_json",
    "element_json",
    "linear_map_json",
    "automorphism_json",
    "spectral_json",
    "config_json",
];

/// Whether the input decoded. Panics only on a broken round trip, which is
/// the bug the fuzzers look for.
pub fn decode(target: &str, data: &[u8]) -> bool {
    let Ok(text) = std::str::from_utf8(data) else {
        return false;
    };
    match target {
        "factor_spec" => match text.parse::<Factor>() {
            Ok(f) => {
                let again: Factor = f.to_string().parse().expect("display re-parses");
                assert_eq!(again, f);
                true
            }
            Err(_) => false,
        },
        "factor_json" => round_trip::<Factor>(text),
        "element_json" => round_trip::<Element>(text),
        "linear_map_json" => round_trip::<LinearMap>(text),
        "automorphism_json" => round_trip::<BallAutomorphism>(text),
        "spectral_json" => round_trip::<SpectralData>(text),
        "config_json" => FileConfig::from_json(text).is_ok(),
        other => panic!("unknown decoder target {other}"),
    }
}

fn round_trip<T>(text: &str) -> bool
where
    T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug,
{
    let Ok(v) = serde_json::from_str::<T>(text) else {
        return false;
    };
    let encoded = serde_json::to_string(&v).expect("decoded values encode");
    let back: T = serde_json::from_str(&encoded).expect("encoded values decode");
    assert_eq!(back, v);
    true
}
