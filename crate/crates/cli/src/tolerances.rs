//! The one table of default tolerances. Every name can be overridden with
//! `--tol.<name>=<value>` or the `tolerances` object of a config file, and
//! every report record echoes the value it was checked against.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::CliError;

/// `(name, default, what it bounds)`.
pub const DEFAULTS: &[(&str, f64, &str)] = &[
    (
        "jordan",
        1e-10,
        "Jordan identity residual relative to 1+‖a‖‖b‖‖x‖‖y‖‖z‖",
    ),
    ("hermitian", 1e-10, "negative eigenvalues of D(x,x)"),
    ("norm-axiom", 1e-8, "|‖D(x,x)‖ − ‖x‖²|"),
    (
        "symmetry",
        1e-12,
        "symmetry, additivity and conjugate-linearity of the product",
    ),
    ("contractivity", 1e-12, "‖{x,y,z}‖ − ‖x‖‖y‖‖z‖"),
    (
        "catalogue",
        1e-9,
        "Jordan-pair identities relative to max(1, ‖lhs‖, ‖rhs‖)",
    ),
    (
        "bergmann-identity",
        1e-9,
        "B(g_a(b),g_a(b)) factorisation, Frobenius",
    ),
    ("gamma", 1e-8, "‖B(g(e),g(e))‖_F for maximal e"),
    ("gamma1", 1e-8, "‖Q_{g(u)}Q_{g(u)} − Id‖_F for unitary u"),
    ("kaup-sauter", 1e-10, "‖B_{tu}‖ against its closed form"),
    ("composition", 1e-9, "composition and swap laws, pointwise"),
    ("isometry", 1e-10, "norm defect of k(a,b) on probes"),
    (
        "derivative",
        1e-5,
        "relative error against central differences",
    ),
    ("russo-dye", 1e-8, "reconstruction error at N ≥ 512"),
    (
        "monotone-floor",
        1e-14,
        "allowed increase of the quadrature error between grids",
    ),
    ("mean-value", 1e-8, "mean-value residual at N = 512"),
    (
        "boundary",
        1e-8,
        "iterate versus spectral boundary tripotent",
    ),
    ("membership", 1e-9, "boundary-component certificate"),
    (
        "unitary",
        1e-8,
        "classification of maximal tripotents as unitary",
    ),
    ("algnorm", 1e-12, "slack in ‖x‖² ≤ ‖x‖²_a ≤ rank·‖x‖²"),
    (
        "inner-frame",
        1e-10,
        "canonical versus frame-based inner product",
    ),
    (
        "gap-constant",
        0.5,
        "determining-set gap tolerance is this over √samples",
    ),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(
            DEFAULTS
                .iter()
                .map(|(k, v, _)| (k.to_string(), *v))
                .collect(),
        )
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        *self
            .0
            .get(name)
            .unwrap_or_else(|| panic!("tolerance {name} is not in the table"))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        if !self.0.contains_key(name) {
            return Err(CliError::Usage(format!(
                "unknown tolerance {name:?}; known: {}",
                DEFAULTS.iter().map(|d| d.0).collect::<Vec<_>>().join(", ")
            )));
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(CliError::Usage(format!(
                "tolerance {name} must be a non-negative number, got {value}"
            )));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }
}

/// `(name, value)` pairs taken from `--tol.*` flags.
pub type Overrides = Vec<(String, f64)>;

/// Splits `--tol.<name>=<v>` and `--tol.<name> <v>` out of an argument
/// list, since their names are open-ended.
pub fn extract_overrides(args: Vec<String>) -> Result<(Vec<String>, Overrides), CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let Some(spec) = arg.strip_prefix("--tol.") else {
            rest.push(arg);
            continue;
        };
        let (name, raw) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = iter
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("--tol.{spec} needs a value")))?;
                (spec.to_string(), v)
            }
        };
        let value: f64 = raw
            .parse()
            .map_err(|_| CliError::Usage(format!("--tol.{name}: {raw:?} is not a number")))?;
        overrides.push((name, value));
    }
    Ok((rest, overrides))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn overrides_are_split_out() {
        let (rest, o) = extract_overrides(strings(&[
            "jbtriple",
            "verify",
            "--tol.jordan=1e-8",
            "--suite",
            "axioms",
            "--tol.gamma",
            "0.5",
        ]))
        .unwrap();
        assert_eq!(rest, strings(&["jbtriple", "verify", "--suite", "axioms"]));
        assert_eq!(o, vec![("jordan".into(), 1e-8), ("gamma".into(), 0.5)]);
        assert!(extract_overrides(strings(&["--tol.jordan"])).is_err());
        assert!(extract_overrides(strings(&["--tol.jordan=abc"])).is_err());
    }

    #[test]
    fn unknown_names_are_rejected() {
        let mut t = Tolerances::default();
        assert!(t.set("jordan", 1e-6).is_ok());
        assert_eq!(t.get("jordan"), 1e-6);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("jordan", -1.0).is_err());
    }
}
