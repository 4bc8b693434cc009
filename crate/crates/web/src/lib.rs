//! Browser bindings: thin the full binary tree by a coloring, sweep a window
//! predicate, and certify a pair of thinned trees.
//!
//! Each export wraps a plain function returning `Result<String, String>` so
//! the logic runs and is tested natively.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::json;
use treeforge_core::baire::EnumeratedSet;
use treeforge_core::registry::{Registry, TreeRef};
use treeforge_core::scenario::{sweep, sweep_csv, SweepPredicate};
use treeforge_core::surgery::{
    divergence_level, good_blocks, sacks_incompatibility, sacks_thin, Coloring, LowPolicy, ThinPlan,
};
use treeforge_core::trees::{to_dot, BelowMode, DotOptions, FiniteTree, LazyTree};
use wasm_bindgen::prelude::*;

const MAX_DEPTH: usize = 24;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_set(json: &str) -> Result<EnumeratedSet, String> {
    serde_json::from_str(json).map_err(err)
}

fn full_binary() -> Result<LazyTree, String> {
    Registry::new().resolve(&TreeRef::Name("full-binary".into())).map_err(err)
}

/// The thinning by `h = α mod 2^i` on the good blocks `≤ i_max`.
fn thinned(x: &EnumeratedSet, alpha: u64, i_max: u32) -> Result<(LazyTree, ThinPlan), String> {
    let base = full_binary()?;
    let enforced = good_blocks(&base, x, i_max, BelowMode::Inclusive).map_err(err)?;
    let plan = ThinPlan::new(x.clone(), Coloring::Modular(alpha), enforced, LowPolicy::Keep).map_err(err)?;
    Ok((sacks_thin(&base, &plan).map_err(err)?, plan))
}

/// Layered drawing: leaves spread evenly, parents centred over children,
/// ramification points drawn as rings, marked levels shaded.
pub fn tree_svg(tree: &FiniteTree, marked: &std::collections::BTreeSet<usize>) -> String {
    let depth = tree.depth();
    let leaves: Vec<_> = tree.leaves().cloned().collect();
    let (dx, dy, pad) = (14.0, 22.0, 12.0);
    let mut x: BTreeMap<_, f64> = BTreeMap::new();
    for (k, l) in leaves.iter().enumerate() {
        x.insert(l.clone(), pad + k as f64 * dx);
    }
    for len in (0..depth).rev() {
        for n in tree.level(len) {
            if x.contains_key(n) {
                continue;
            }
            let kids: Vec<f64> = tree.children(n).iter().map(|&c| x[&n.child(c)]).collect();
            x.insert(n.clone(), kids.iter().sum::<f64>() / kids.len() as f64);
        }
    }
    let width = pad * 2.0 + leaves.len().saturating_sub(1) as f64 * dx;
    let height = pad * 2.0 + depth as f64 * dy;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    for &level in marked {
        if level <= depth {
            let y = pad + level as f64 * dy;
            writeln!(s, r##"<rect x="0" y="{}" width="{width}" height="{dy}" fill="#fbf1c7"/>"##, y - dy / 2.0).unwrap();
        }
    }
    for n in tree.nodes() {
        if let Some(p) = n.parent() {
            let (x1, y1) = (x[&p], pad + p.len() as f64 * dy);
            let (x2, y2) = (x[n], pad + n.len() as f64 * dy);
            writeln!(s, r##"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#555"/>"##).unwrap();
        }
    }
    for n in tree.nodes() {
        let (cx, cy) = (x[n], pad + n.len() as f64 * dy);
        if tree.ramifies(n) {
            writeln!(s, r##"<circle cx="{cx}" cy="{cy}" r="5" fill="white" stroke="#b03a2e" stroke-width="2"><title>{n}</title></circle>"##).unwrap();
        } else {
            writeln!(s, r##"<circle cx="{cx}" cy="{cy}" r="2.5" fill="#333"><title>{n}</title></circle>"##).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn thin_json(x_json: &str, alpha: u64, i_max: u32, depth: usize) -> Result<String, String> {
    if depth > MAX_DEPTH {
        return Err(format!("depth is capped at {MAX_DEPTH} here"));
    }
    let x = parse_set(x_json)?;
    let (s, plan) = thinned(&x, alpha, i_max)?;
    let t = s.truncate(depth, None).map_err(err)?;
    let marked = plan.enforced_levels().map_err(err)?;
    let dot = to_dot(
        &t,
        &DotOptions {
            name: Some(format!("thinned-{alpha}")),
            marked_levels: marked.clone(),
        },
    );
    Ok(json!({
        "enforced": plan.enforced,
        "enforced_levels": marked,
        "ramification_levels": t.ramification_levels(),
        "nodes": t.len(),
        "svg": tree_svg(&t, &marked),
        "dot": dot,
    })
    .to_string())
}

pub fn sweep_text(predicate: &str, x_json: &str, y_json: &str, from: u64, to: u64) -> Result<String, String> {
    let predicate = match predicate {
        "dominates" => SweepPredicate::Dominates,
        "weakly-dominates" => SweepPredicate::WeaklyDominates,
        other => return Err(format!("unknown predicate {other:?}")),
    };
    if from > to || to - from > 4096 {
        return Err("range must be nonempty and at most 4096 long".into());
    }
    let rows = sweep(predicate, &parse_set(x_json)?, &parse_set(y_json)?, from, to).map_err(err)?;
    Ok(sweep_csv(predicate, &rows))
}

pub fn certificate_json(x_json: &str, alpha: u64, beta: u64, i_max: u32, depth: usize) -> Result<String, String> {
    if alpha == beta {
        return Err("α and β must differ".into());
    }
    let x = parse_set(x_json)?;
    let (s1, _) = thinned(&x, alpha, i_max)?;
    let (s2, _) = thinned(&x, beta, i_max)?;
    let div = divergence_level(&x, alpha, beta).map_err(err)?;
    let cert = sacks_incompatibility(&s1, &s2, div, depth).map_err(err)?;
    Ok(json!({"passed": cert.passed(), "certificate": cert}).to_string())
}

#[wasm_bindgen]
pub fn thin(x_json: &str, alpha: u64, i_max: u32, depth: usize) -> Result<String, JsError> {
    thin_json(x_json, alpha, i_max, depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sweepCsv)]
pub fn sweep_csv_js(predicate: &str, x_json: &str, y_json: &str, from: u64, to: u64) -> Result<String, JsError> {
    sweep_text(predicate, x_json, y_json, from, to).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pairCertificate)]
pub fn pair_certificate(x_json: &str, alpha: u64, beta: u64, i_max: u32, depth: usize) -> Result<String, JsError> {
    certificate_json(x_json, alpha, beta, i_max, depth).map_err(|e| JsError::new(&e))
}
