use serde::Deserialize;

use super::ScenarioError;
use crate::qforcing::{QCondition, QConditionSpec};
use crate::registry::{Registry, TreeRef, TreeSpec};
use crate::trees::{to_dot, DotOptions};

/// What `export-dot` can draw: a tree reference (explicit, named, thinned,
/// intersection, ...) or the stem tree of a condition.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DotObject {
    Condition { condition: QConditionSpec },
    Tree(TreeRef),
}

impl DotObject {
    /// A file path, inline JSON, or a bare tree name.
    pub fn parse(arg: &str) -> Result<Self, ScenarioError> {
        let text = match std::fs::read_to_string(arg) {
            Ok(text) => text,
            Err(_) if arg.trim_start().starts_with(['{', '[', '"']) => arg.to_string(),
            Err(_) => return Ok(DotObject::Tree(TreeRef::Name(arg.to_string()))),
        };
        serde_json::from_str(&text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }
}

/// DOT text of the object truncated to `depth`. Thinned trees get their
/// enforced designated sub-block starts marked.
pub fn export_dot(obj: &DotObject, depth: usize, value_bound: Option<u64>) -> Result<String, ScenarioError> {
    let mut reg = Registry::new();
    let invalid = |e: &dyn std::fmt::Display| ScenarioError::Invalid(e.to_string());
    match obj {
        DotObject::Condition { condition } => {
            let c = QCondition::from_spec(condition, &mut reg).map_err(|e| invalid(&e))?;
            let opts = DotOptions {
                name: Some("F".into()),
                ..Default::default()
            };
            Ok(to_dot(&c.f, &opts))
        }
        DotObject::Tree(r) => {
            let tree = reg.resolve(r).map_err(|e| invalid(&e))?;
            let finite = tree.truncate(depth, value_bound).map_err(|e| invalid(&e))?;
            let marked_levels = match r {
                TreeRef::Spec(spec) => match spec.as_ref() {
                    TreeSpec::Thinned { plan, .. } | TreeSpec::LaverThinned { plan, .. } => {
                        plan.enforced_levels().map_err(|e| invalid(&e))?
                    }
                    _ => Default::default(),
                },
                TreeRef::Name(_) => Default::default(),
            };
            let name = match r {
                TreeRef::Name(n) => n.clone(),
                TreeRef::Spec(_) => "tree".into(),
            };
            Ok(to_dot(
                &finite,
                &DotOptions {
                    name: Some(name),
                    marked_levels,
                },
            ))
        }
    }
}
