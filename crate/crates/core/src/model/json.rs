//! Canonical ensemble JSON.
//!
//! ```json
//! {"num_features": 2,
//!  "trees": [{"feature": 0, "threshold": 4.0,
//!             "yes": {"value": 30}, "no": {"value": 35}}]}
//! ```
//!
//! An internal node may carry `"op": "<"` (the default) or `"op": "<="`.
//! A `<=` guard is normalized to `<` on the next representable threshold,
//! which selects exactly the same inputs.

use serde::Serialize;
use serde_json::{Map, Value};

use super::tree::{Ensemble, TreeNode};
use crate::error::ModelError;

pub fn parse_ensemble(document: &[u8]) -> Result<Ensemble, ModelError> {
    let root: Value = serde_json::from_slice(document)?;
    let obj = root.as_object().ok_or_else(|| malformed("$", "top level must be an object"))?;
    let num_features = obj
        .get("num_features")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("$", "missing or invalid \"num_features\""))?
        as usize;
    let trees = obj
        .get("trees")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("$", "missing or invalid \"trees\""))?;
    let trees = trees
        .iter()
        .enumerate()
        .map(|(i, t)| parse_node(t, &format!("trees[{i}]"), num_features))
        .collect::<Result<Vec<_>, _>>()?;
    Ensemble::new(trees, num_features)
}

fn malformed(path: &str, reason: &str) -> ModelError {
    ModelError::MalformedNode {
        path: path.to_string(),
        reason: reason.to_string(),
    }
}

fn number(obj: &Map<String, Value>, key: &'static str, path: &str) -> Result<f64, ModelError> {
    let v = obj
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| malformed(path, &format!("\"{key}\" must be a number")))?;
    if !v.is_finite() {
        return Err(ModelError::NonFinite {
            what: key,
            path: path.to_string(),
        });
    }
    Ok(v)
}

fn parse_node(v: &Value, path: &str, num_features: usize) -> Result<TreeNode, ModelError> {
    let obj = v.as_object().ok_or_else(|| malformed(path, "node must be an object"))?;
    let has_yes = obj.contains_key("yes");
    let has_no = obj.contains_key("no");
    if obj.contains_key("value") {
        if has_yes || has_no || obj.contains_key("feature") {
            return Err(malformed(path, "leaf must not have children or a feature"));
        }
        return Ok(TreeNode::leaf(number(obj, "value", path)?));
    }
    if !(has_yes && has_no) {
        return Err(malformed(path, "internal node needs both \"yes\" and \"no\" children"));
    }
    let feature = obj
        .get("feature")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed(path, "\"feature\" must be a non-negative integer"))?
        as usize;
    if feature >= num_features {
        return Err(ModelError::FeatureOutOfRange {
            feature,
            num_features,
            path: path.to_string(),
        });
    }
    let mut threshold = number(obj, "threshold", path)?;
    match obj.get("op").map(|op| op.as_str()) {
        None | Some(Some("<")) => {}
        Some(Some("<=")) => threshold = threshold.next_up(),
        Some(_) => return Err(malformed(path, "\"op\" must be \"<\" or \"<=\"")),
    }
    let yes = parse_node(&obj["yes"], &format!("{path}.yes"), num_features)?;
    let no = parse_node(&obj["no"], &format!("{path}.no"), num_features)?;
    Ok(TreeNode::split(feature, threshold, yes, no))
}

#[derive(Serialize)]
#[serde(untagged)]
enum NodeDoc {
    Internal {
        feature: usize,
        threshold: f64,
        yes: Box<NodeDoc>,
        no: Box<NodeDoc>,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Serialize)]
struct EnsembleDoc {
    num_features: usize,
    trees: Vec<NodeDoc>,
}

fn to_doc(node: &TreeNode) -> NodeDoc {
    match node {
        TreeNode::Leaf { value } => NodeDoc::Leaf { value: *value },
        TreeNode::Internal { guard, yes, no } => NodeDoc::Internal {
            feature: guard.feature,
            threshold: guard.threshold,
            yes: Box::new(to_doc(yes)),
            no: Box::new(to_doc(no)),
        },
    }
}

/// Serializes to the canonical schema; `parse_ensemble` inverts this exactly.
pub fn to_json(e: &Ensemble) -> String {
    let doc = EnsembleDoc {
        num_features: e.num_features(),
        trees: e.trees().iter().map(to_doc).collect(),
    };
    serde_json::to_string(&doc).expect("ensemble serialization cannot fail")
}
