//! JSON payloads. Key order is fixed by field order; exact values are strings.

use kissing_core::exactmath::approx;
use kissing_core::search::SearchStats;
use kissing_core::{BigRational, SearchResult, SimplexPair};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct RunReport<I: Serialize, R: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub inputs: I,
    pub result: R,
}

impl<I: Serialize, R: Serialize> RunReport<I, R> {
    pub fn new(command: &'static str, inputs: I, result: R) -> Self {
        Self {
            command,
            version: VERSION,
            inputs,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(rename = "P")]
    pub p: Vec<Vec<i64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<i64>>,
}

impl From<&SimplexPair> for Witness {
    fn from(pair: &SimplexPair) -> Self {
        Self {
            p: pair.p.clone(),
            q: pair.q.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Stats {
    pub subsets: String,
    pub singular: String,
    pub zero: String,
    pub seconds: f64,
}

impl From<&SearchStats> for Stats {
    fn from(s: &SearchStats) -> Self {
        Self {
            subsets: s.subsets_evaluated.to_string(),
            singular: s.singular_count.to_string(),
            zero: s.zero_count.to_string(),
            seconds: s.elapsed.as_secs_f64(),
        }
    }
}

/// Approximate `sqrt(value)`; display only.
pub fn sqrt_approx(value: &BigRational) -> f64 {
    approx(value).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonPayload {
    pub d: usize,
    pub k: i64,
    pub inv_eps_sq: String,
    pub eps_approx: f64,
    pub certified: bool,
    pub complete: bool,
    pub sharp: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

impl From<&SearchResult> for EpsilonPayload {
    fn from(r: &SearchResult) -> Self {
        Self {
            d: r.d,
            k: r.k,
            inv_eps_sq: r.inv_eps_squared.to_string(),
            eps_approx: sqrt_approx(&r.min_squared_distance),
            certified: r.certified,
            complete: r.complete,
            sharp: r.sharp,
            witness: r.witness.as_ref().map(Witness::from),
            stats: Stats::from(&r.stats),
        }
    }
}
