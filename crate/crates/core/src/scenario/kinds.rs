use std::collections::BTreeMap;
use std::error::Error;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use super::corpus::{random_pattern, rng};
use super::sweep::{sweep, sweep_csv, SweepPredicate};
use super::{Artifact, KindOutput, Kind, RunOptions, Scenario, ScenarioError, Verdict};
use crate::baire::EnumeratedSet;
use crate::namecraft::{build_phi, check_phi, verify_star, AntichainFamily, FinitePoset};
use crate::qforcing::{q_generic_run, q_validate, ForbiddenList, QCondition, QConditionSpec, Task};
use crate::registry::{Registry, TreeRef, TreeSpec};
use crate::surgery::{
    antichain_build, branching_antichain, branching_thin, sacks_thin, silver_antichain, silver_thin,
    split_permitted, Antichain, BranchingKind, ForcingKind, Horizon, LowPolicy, SilverCondition, ThinPlan,
};
use crate::trees::{to_dot, DotOptions, FiniteTree, LazyTree};

type Dyn = Box<dyn Error + Send + Sync>;

pub(crate) fn execute(sc: &Scenario, opts: RunOptions) -> Result<KindOutput, ScenarioError> {
    let mut reg = Registry::new();
    for (name, r) in &sc.trees {
        reg.define(name.clone(), r.clone());
    }
    match sc.kind {
        Kind::Thin => thin(sc, &mut reg),
        Kind::Antichain => antichain(sc, &mut reg, opts),
        Kind::Qrun => qrun(sc, &mut reg),
        Kind::Name => name(sc),
        Kind::PredicateSweep => predicate_sweep(sc),
    }
}

fn params<T: DeserializeOwned>(sc: &Scenario) -> Result<T, ScenarioError> {
    serde_json::from_value(sc.params.clone()).map_err(|e| ScenarioError::Invalid(format!("params: {e}")))
}

fn resolve(reg: &mut Registry, r: &TreeRef) -> Result<LazyTree, ScenarioError> {
    reg.resolve(r).map_err(ScenarioError::invalid)
}

fn dot_artifact(name: &str, tree: &FiniteTree, marked: std::collections::BTreeSet<usize>) -> Artifact {
    let opts = DotOptions {
        name: Some(name.to_string()),
        marked_levels: marked,
    };
    Artifact {
        name: format!("{name}.dot"),
        bytes: to_dot(tree, &opts).into_bytes(),
    }
}

fn clause(name: &str, failures: Vec<String>) -> Verdict {
    let v = Verdict::new(name, failures.is_empty());
    if failures.is_empty() {
        v
    } else {
        let shown: Vec<String> = failures.iter().take(8).cloned().collect();
        v.with_detail(format!("{} failures: {}", failures.len(), shown.join("; ")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThinParams {
    forcing: ForcingKind,
    #[serde(default)]
    tree: Option<TreeRef>,
    #[serde(default)]
    condition: Option<SilverCondition>,
    plan: ThinPlan,
}

fn thin(sc: &Scenario, reg: &mut Registry) -> Result<KindOutput, ScenarioError> {
    let p: ThinParams = params(sc)?;
    p.plan.validate().map_err(ScenarioError::invalid)?;
    let depth = sc.horizons.depth()?;
    let mut provenance = json!({"forcing": p.forcing, "plan": p.plan, "horizons": sc.horizons});
    let mut out = match p.forcing {
        ForcingKind::Silver => {
            let cond = p
                .condition
                .ok_or_else(|| ScenarioError::Invalid("silver thinning needs params.condition".into()))?;
            cond.validate().map_err(ScenarioError::invalid)?;
            provenance["condition"] = json!(cond);
            thin_silver(&cond, &p.plan, depth)
        }
        forcing => {
            let r = p
                .tree
                .ok_or_else(|| ScenarioError::Invalid("thinning needs params.tree".into()))?;
            let base = resolve(reg, &r)?;
            provenance["tree"] = json!(r);
            match forcing {
                ForcingKind::Sacks => thin_sacks(&base, &p.plan, depth, sc.dot),
                ForcingKind::Laver | ForcingKind::Miller => {
                    let kind = if forcing == ForcingKind::Laver {
                        BranchingKind::Laver
                    } else {
                        BranchingKind::Miller
                    };
                    let horizon = Horizon {
                        depth,
                        value_bound: sc.horizons.value_bound()?,
                    };
                    thin_branching(&base, &p.plan, kind, horizon, sc.dot)
                }
                ForcingKind::Silver => unreachable!(),
            }
        }
    }
    .unwrap_or_else(|e| KindOutput {
        verdicts: vec![Verdict::failed("construct", e)],
        ..Default::default()
    });
    out.provenance = provenance;
    Ok(out)
}

fn thin_sacks(base: &LazyTree, plan: &ThinPlan, depth: usize, dot: bool) -> Result<KindOutput, Dyn> {
    let s = sacks_thin(base, plan)?;
    let ts = s.truncate(depth, None)?;
    let mut outside = Vec::new();
    for n in ts.nodes() {
        if !base.contains(n)? {
            outside.push(n.to_string());
        }
    }
    let points = ts.ramification_points();
    let mut forbidden = Vec::new();
    for n in &points {
        if !split_permitted(&plan.x, &plan.h, n.len() as u64)? {
            forbidden.push(n.to_string());
        }
    }
    let mut missing = Vec::new();
    let mut checked = Vec::new();
    for &i in &plan.enforced {
        let b = plan.designated(i)?;
        if b.hi as usize > depth {
            continue;
        }
        checked.push(i);
        for n in ts.level(b.lo as usize) {
            let split = points
                .iter()
                .any(|m| n.is_prefix_of(m) && (b.lo..b.hi).contains(&(m.len() as u64)));
            if !split {
                missing.push(format!("block {i} above {n}"));
            }
        }
    }
    let enforced_levels = plan.enforced_levels()?;
    let mut artifacts = Vec::new();
    if dot {
        artifacts.push(dot_artifact("thinned", &ts, enforced_levels.clone()));
    }
    Ok(KindOutput {
        verdicts: vec![
            Verdict::new("construct", true),
            clause("contained", outside),
            clause("single-child-where-forbidden", forbidden),
            {
                let v = clause("enforced-splits", missing);
                let checked = format!("blocks checked: {checked:?}");
                let detail = v.detail.clone().map_or(checked.clone(), |d| format!("{checked}; {d}"));
                v.with_detail(detail)
            },
        ],
        outputs: json!({
            "nodes": ts.len(),
            "ramification_levels": ts.ramification_levels(),
            "enforced_levels": enforced_levels,
        }),
        artifacts,
        ..Default::default()
    })
}

fn thin_branching(
    base: &LazyTree,
    plan: &ThinPlan,
    kind: BranchingKind,
    horizon: Horizon,
    dot: bool,
) -> Result<KindOutput, Dyn> {
    let s = branching_thin(base, plan, kind, horizon)?;
    let ts = s.truncate(horizon.depth, Some(horizon.value_bound))?;
    let blocks = plan
        .enforced
        .iter()
        .map(|&i| Ok((i, plan.designated(i)?)))
        .collect::<Result<Vec<_>, Dyn>>()?;
    let mut outside = Vec::new();
    let mut stray = Vec::new();
    let mut missing = Vec::new();
    for n in ts.nodes() {
        if !base.contains(n)? {
            outside.push(n.to_string());
        }
        if n.len() >= horizon.depth || !kind.acts_on(&base.successors(n)?) {
            continue;
        }
        let children = ts.children(n);
        for &c in children {
            if !blocks.iter().any(|(_, b)| b.contains(c)) {
                stray.push(format!("{n} -> {c}"));
            }
        }
        for (i, b) in &blocks {
            if b.hi <= horizon.value_bound && !children.iter().any(|&c| b.contains(c)) {
                missing.push(format!("block {i} at {n}"));
            }
        }
    }
    let mut artifacts = Vec::new();
    if dot {
        artifacts.push(dot_artifact("thinned", &ts, Default::default()));
    }
    Ok(KindOutput {
        verdicts: vec![
            Verdict::new("construct", true),
            clause("contained", outside),
            clause("successors-in-designated-blocks", stray),
            clause("enforced-successors", missing),
        ],
        outputs: json!({
            "nodes": ts.len(),
            "designated_blocks": blocks.iter().map(|(i, b)| json!({"i": i, "lo": b.lo, "hi": b.hi})).collect::<Vec<_>>(),
        }),
        artifacts,
        ..Default::default()
    })
}

fn thin_silver(p: &SilverCondition, plan: &ThinPlan, depth: usize) -> Result<KindOutput, Dyn> {
    let q = silver_thin(p, plan)?;
    let mut outside = Vec::new();
    let mut forbidden = Vec::new();
    let mut free = Vec::new();
    for k in 0..depth as u64 {
        let (pf, qf) = (p.is_free(k)?, q.is_free(k)?);
        if (qf && !pf) || (!pf && q.value(k) != p.value(k)) {
            outside.push(k.to_string());
        }
        if qf {
            free.push(k);
            if !split_permitted(&plan.x, &plan.h, k)? {
                forbidden.push(k.to_string());
            }
        }
    }
    let mut missing = Vec::new();
    for &i in &plan.enforced {
        let b = plan.designated(i)?;
        if b.hi as usize <= depth && q.free_in(b.lo, b.hi)?.is_empty() {
            missing.push(format!("block {i}"));
        }
    }
    Ok(KindOutput {
        verdicts: vec![
            Verdict::new("construct", true),
            clause("contained", outside),
            clause("free-only-where-permitted", forbidden),
            clause("enforced-free-positions", missing),
        ],
        outputs: json!({ "free": free }),
        ..Default::default()
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Generated {
    count: usize,
    max_gap: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AntichainParams {
    forcing: ForcingKind,
    #[serde(rename = "X")]
    x: EnumeratedSet,
    #[serde(default)]
    trees: Vec<TreeRef>,
    #[serde(default)]
    conditions: Vec<SilverCondition>,
    #[serde(default)]
    generated: Option<Generated>,
    #[serde(default)]
    low_policy: LowPolicy,
}

fn antichain(sc: &Scenario, reg: &mut Registry, opts: RunOptions) -> Result<KindOutput, ScenarioError> {
    let p: AntichainParams = params(sc)?;
    let depth = sc.horizons.depth()?;
    let i_max = sc.horizons.i_max()?;
    let mut refs = p.trees.clone();
    let mut provenance = json!({"forcing": p.forcing, "X": p.x, "horizons": sc.horizons});
    if let Some(g) = &p.generated {
        let mut r = rng(opts.seed);
        refs.extend((0..g.count).map(|_| TreeRef::spec(TreeSpec::Pattern(random_pattern(&mut r, g.max_gap)))));
        provenance["seed"] = json!(opts.seed);
    }
    let built: Result<Antichain, _> = if p.forcing == ForcingKind::Silver {
        if p.conditions.len() < 2 {
            return Err(ScenarioError::Invalid("silver antichain needs two or more conditions".into()));
        }
        for c in &p.conditions {
            c.validate().map_err(ScenarioError::invalid)?;
        }
        provenance["conditions"] = json!(p.conditions);
        silver_antichain(&p.x, &p.conditions, i_max, depth)
    } else {
        if refs.len() < 2 {
            return Err(ScenarioError::Invalid("antichain needs two or more trees".into()));
        }
        let trees = refs.iter().map(|r| resolve(reg, r)).collect::<Result<Vec<_>, _>>()?;
        provenance["trees"] = json!(refs);
        match p.forcing {
            ForcingKind::Sacks => antichain_build(&p.x, &trees, i_max, depth, p.low_policy),
            kind => {
                let horizon = Horizon {
                    depth,
                    value_bound: sc.horizons.value_bound()?,
                };
                let b = if kind == ForcingKind::Laver {
                    BranchingKind::Laver
                } else {
                    BranchingKind::Miller
                };
                branching_antichain(b, &p.x, &trees, i_max, horizon)
            }
        }
    };
    let ac = match built {
        Ok(ac) => ac,
        Err(e) => {
            return Ok(KindOutput {
                verdicts: vec![Verdict::failed("construct", e)],
                provenance,
                ..Default::default()
            })
        }
    };
    provenance["members"] = json!(ac.members);
    let mut verdicts = vec![Verdict::new("construct", true).with_detail(format!("{} members", ac.members.len()))];
    for c in &ac.certificates {
        let v = Verdict::new(format!("incompatible {}-{}", c.alpha, c.beta), c.certificate.passed());
        verdicts.push(if c.certificate.passed() {
            v
        } else {
            v.with_detail(format!("{} violations", c.certificate.violations.len()))
        });
    }
    let mut artifacts = Vec::new();
    if sc.dot {
        let vb = (p.forcing == ForcingKind::Laver || p.forcing == ForcingKind::Miller)
            .then(|| sc.horizons.value_bound())
            .transpose()?;
        for m in &ac.members {
            match m.tree.truncate(depth, vb) {
                Ok(t) => {
                    let marked = m.plan.enforced_levels().unwrap_or_default();
                    artifacts.push(dot_artifact(&format!("member{}", m.index), &t, marked));
                }
                Err(e) => verdicts.push(Verdict::failed(format!("dot member {}", m.index), e)),
            }
        }
    }
    Ok(KindOutput {
        verdicts,
        certificates: json!(ac.certificates),
        provenance,
        outputs: json!({
            "members": ac.members.len(),
            "pairs": ac.certificates.len(),
            "passed": ac.certificates.iter().filter(|c| c.certificate.passed()).count(),
        }),
        artifacts,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ForbiddenSpec {
    #[serde(default)]
    trees: Vec<TreeRef>,
    depth: usize,
    #[serde(default)]
    divergence_level: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QrunParams {
    seed: QConditionSpec,
    #[serde(default)]
    forbidden: Option<ForbiddenSpec>,
    schedule: Vec<Task>,
}

fn qrun(sc: &Scenario, reg: &mut Registry) -> Result<KindOutput, ScenarioError> {
    let p: QrunParams = params(sc)?;
    let horizon = sc.horizons.depth()?;
    let seed = QCondition::from_spec(&p.seed, reg).map_err(ScenarioError::invalid)?;
    let forbidden = match &p.forbidden {
        None => ForbiddenList::empty(horizon),
        Some(f) => {
            let trees = f.trees.iter().map(|r| resolve(reg, r)).collect::<Result<Vec<_>, _>>()?;
            ForbiddenList {
                trees,
                depth: f.depth,
                divergence_level: f.divergence_level.unwrap_or(f.depth as u64 / 2),
            }
        }
    };
    let seed_verdict = match q_validate(&seed, &forbidden) {
        Ok(v) if v.valid => Verdict::new("seed-valid", true),
        Ok(v) => {
            let bad: Vec<String> = v.clauses.iter().filter(|c| !c.ok).map(|c| c.clause.clone()).collect();
            Verdict::new("seed-valid", false).with_detail(format!("failing clauses: {}", bad.join(", ")))
        }
        Err(e) => Verdict::failed("seed-valid", e),
    };
    let run = q_generic_run(&seed, &forbidden, &p.schedule, horizon);

    let mut stems: Vec<(usize, &FiniteTree)> = vec![(seed.n, &seed.f)];
    stems.extend(run.trace.iter().map(|s| (s.condition.n, &s.condition.f)));
    let not_skew: Vec<String> = stems
        .iter()
        .enumerate()
        .filter(|(_, (_, f))| !f.is_skew())
        .map(|(k, _)| format!("F{k}"))
        .collect();
    let not_extending: Vec<String> = stems
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].0 < w[0].0 || w[1].1.truncate(w[0].0) != *w[0].1)
        .map(|(k, _)| format!("F{} -> F{}", k, k + 1))
        .collect();
    let completed = match &run.aborted {
        None => Verdict::new("completed", true).with_detail(format!("{} steps", run.trace.len())),
        Some(why) => Verdict::new("completed", false).with_detail(why.clone()),
    };
    let certificates: Vec<Value> = run
        .trace
        .iter()
        .enumerate()
        .flat_map(|(k, s)| s.certificates.iter().map(move |c| json!({"step": k, "certificate": c})))
        .collect();
    let certs_ok = certificates.is_empty()
        || run
            .trace
            .iter()
            .all(|s| s.certificates.iter().all(|c| c.certificate.passed()));
    let mut artifacts = vec![Artifact {
        name: "trace.json".into(),
        bytes: {
            let mut s = serde_json::to_string_pretty(&run).unwrap();
            s.push('\n');
            s.into_bytes()
        },
    }];
    if sc.dot {
        artifacts.push(dot_artifact("F", &run.f, Default::default()));
    }
    Ok(KindOutput {
        verdicts: vec![
            seed_verdict,
            completed,
            clause("skew", not_skew),
            clause("extends", not_extending),
            Verdict::new("certificates", certs_ok),
        ],
        certificates: json!(certificates),
        provenance: json!({
            "seed": p.seed,
            "forbidden": p.forbidden.as_ref().map(|f| json!({"trees": f.trees, "depth": f.depth, "divergence_level": forbidden.divergence_level})),
            "schedule": p.schedule,
            "horizons": sc.horizons,
        }),
        outputs: json!({
            "steps": run.trace.len(),
            "n": run.last.as_ref().map(|c| c.n),
            "F": run.f,
            "aborted": run.aborted,
        }),
        artifacts,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NameParams {
    poset: FinitePoset,
    antichains: Vec<Vec<String>>,
    targets: Vec<String>,
    threshold: usize,
    #[serde(default)]
    phi_antichain: usize,
}

fn name(sc: &Scenario) -> Result<KindOutput, ScenarioError> {
    let p: NameParams = params(sc)?;
    let fam = AntichainFamily::from_names(&p.poset, &p.antichains).map_err(ScenarioError::invalid)?;
    let a = fam
        .sets()
        .get(p.phi_antichain)
        .ok_or_else(|| ScenarioError::Invalid(format!("no antichain {}", p.phi_antichain)))?
        .clone();
    let star = verify_star(&p.poset, &fam, p.targets.len(), p.threshold).map_err(ScenarioError::invalid)?;
    let names = |k: usize| p.poset.name(k).to_string();
    let (phi_verdict, phi_out) = match build_phi(&p.poset, &a, &p.targets, p.threshold) {
        Ok(phi) => {
            let ok = check_phi(&p.poset, &a, &phi, p.targets.len(), p.threshold);
            let assignment: BTreeMap<String, String> =
                phi.assignment.iter().map(|&(q, t)| (names(q), p.targets[t].clone())).collect();
            (
                Verdict::new("phi", ok),
                json!({
                    "assignment": assignment,
                    "large": phi.large.iter().map(|&k| names(k)).collect::<Vec<_>>(),
                    "precondition": phi.precondition,
                }),
            )
        }
        Err(e) => (Verdict::failed("phi", e), Value::Null),
    };
    Ok(KindOutput {
        verdicts: vec![phi_verdict],
        provenance: json!({
            "antichains": p.antichains,
            "targets": p.targets,
            "threshold": p.threshold,
            "phi_antichain": p.phi_antichain,
        }),
        outputs: json!({"star": star, "star_holds": star.holds(), "phi": phi_out}),
        ..Default::default()
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepParams {
    predicate: SweepPredicate,
    #[serde(rename = "X")]
    x: EnumeratedSet,
    #[serde(rename = "Y")]
    y: EnumeratedSet,
    from: u64,
    to: u64,
    #[serde(default)]
    expect: Option<bool>,
}

fn predicate_sweep(sc: &Scenario) -> Result<KindOutput, ScenarioError> {
    let p: SweepParams = params(sc)?;
    if p.from > p.to {
        return Err(ScenarioError::Invalid("sweep range is empty".into()));
    }
    let provenance = json!({"predicate": p.predicate, "X": p.x, "Y": p.y, "from": p.from, "to": p.to});
    let rows = match sweep(p.predicate, &p.x, &p.y, p.from, p.to) {
        Ok(rows) => rows,
        Err(e) => {
            return Ok(KindOutput {
                verdicts: vec![Verdict::failed("evaluated", e)],
                provenance,
                ..Default::default()
            })
        }
    };
    let mut verdicts = vec![Verdict::new("evaluated", true)];
    if let Some(want) = p.expect {
        let off: Vec<String> = rows.iter().filter(|r| r.verdict != want).map(|r| r.index.to_string()).collect();
        verdicts.push(clause("expected", off));
    }
    Ok(KindOutput {
        verdicts,
        provenance,
        artifacts: vec![Artifact {
            name: "sweep.csv".into(),
            bytes: sweep_csv(p.predicate, &rows).into_bytes(),
        }],
        outputs: json!({ "rows": rows }),
        ..Default::default()
    })
}
