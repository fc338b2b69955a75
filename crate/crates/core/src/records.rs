//! Flat row types for tabular output. Floating fields serialize with 17
//! significant digits so every emitted value parses back to the same double.

use serde::{Deserialize, Serialize};

use crate::inequalities::CheckReport;

pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "NaN" | "nan" => Some(f64::NAN),
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

/// Serde adapter for `f64` fields using [`format_f64`].
pub mod sci {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_f64(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_f64(&s).ok_or_else(|| D::Error::custom(format!("invalid number {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub model: String,
    #[serde(with = "sci")]
    pub inv_p: f64,
    #[serde(with = "sci")]
    pub inv_q: f64,
    #[serde(with = "sci")]
    pub lhs: f64,
    #[serde(with = "sci")]
    pub rhs: f64,
    #[serde(with = "sci")]
    pub slack: f64,
    pub holds: bool,
    pub regime: String,
    pub element_hash: String,
    pub seed: Option<u64>,
}

impl From<&CheckReport> for CheckRow {
    fn from(r: &CheckReport) -> Self {
        Self {
            name: r.name.clone(),
            model: r.context.model.clone(),
            inv_p: r.context.inv_p,
            inv_q: r.context.inv_q,
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            holds: r.holds,
            regime: r.regime.map(|g| g.as_str().to_string()).unwrap_or_default(),
            element_hash: r.context.element_hash.clone(),
            seed: r.context.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(with = "sci")]
    pub inv_p: f64,
    #[serde(with = "sci")]
    pub inv_q: f64,
    pub region: String,
    #[serde(rename = "K", with = "sci")]
    pub k: f64,
    #[serde(rename = "empirical_C", with = "sci")]
    pub empirical_c: f64,
    #[serde(with = "sci")]
    pub gap: f64,
    pub family: String,
    /// The best element belongs to the family of the table row at this point.
    pub matched: bool,
    pub restarts: usize,
    pub converged_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityRow {
    #[serde(with = "sci")]
    pub inv_p: f64,
    #[serde(with = "sci")]
    pub inv_q: f64,
    pub region: String,
    #[serde(with = "sci")]
    pub min_slack: f64,
    pub witness_hash: String,
    pub regime: String,
    /// Number of elements evaluated (candidates plus samples).
    pub evaluated: usize,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRow {
    pub family: String,
    /// Space-separated table rows whose family accepts the element.
    pub matched_rows: String,
    #[serde(with = "sci")]
    pub norm_p: f64,
    #[serde(with = "sci")]
    pub norm_q: f64,
    #[serde(with = "sci")]
    pub ratio: f64,
    #[serde(rename = "K", with = "sci")]
    pub k: f64,
    #[serde(with = "sci")]
    pub gap: f64,
}
