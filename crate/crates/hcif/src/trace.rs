//! Line-delimited trace records written by the simulator.
//!
//! One JSON object per line so downstream tools can stream them.
//! Consecutive records chain: the post state of record `k` equals the pre
//! state of record `k + 1`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::predicate::{Valuation, Value};
use crate::sos::{TrajectoryBundle, TransitionLabel};

/// One simulation step.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminating: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    pub pre: BTreeMap<String, Value>,
    pub post: BTreeMap<String, Value>,
    /// Pinned-location tree of the post composition.
    pub tree: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<BTreeMap<String, Value>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<bool>>,
}

/// A valuation as a flat name-to-value map, dotted names spelled `x'`.
pub fn valuation_map(sigma: &Valuation) -> BTreeMap<String, Value> {
    sigma.iter().map(|(var, value)| (var.to_string(), *value)).collect()
}

type BundleFields = (Vec<BTreeMap<String, Value>>, Vec<Vec<String>>, Vec<bool>);

fn bundle_fields(bundle: &TrajectoryBundle) -> BundleFields {
    let rho = bundle.rho.iter().map(valuation_map).collect();
    let theta = bundle
        .theta
        .iter()
        .map(|set| set.iter().cloned().collect())
        .collect();
    (rho, theta, bundle.omega.clone())
}

impl TraceRecord {
    pub fn new(
        step: usize,
        label: &TransitionLabel,
        pre: &Valuation,
        post: &Valuation,
        tree: String,
    ) -> Self {
        let mut record = TraceRecord {
            step,
            kind: "",
            label: None,
            terminating: None,
            duration: None,
            pre: valuation_map(pre),
            post: valuation_map(post),
            tree,
            rho: None,
            theta: None,
            omega: None,
        };
        match label {
            TransitionLabel::Action(a) => {
                record.kind = "action";
                record.label = Some(a.clone());
            }
            TransitionLabel::Env(b) => {
                record.kind = "env";
                record.terminating = Some(*b);
            }
            TransitionLabel::Time(bundle) => {
                record.kind = "time";
                record.duration = Some(bundle.duration());
                let (rho, theta, omega) = bundle_fields(bundle);
                record.rho = Some(rho);
                record.theta = Some(theta);
                record.omega = Some(omega);
            }
        }
        record
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace records serialize")
    }
}
