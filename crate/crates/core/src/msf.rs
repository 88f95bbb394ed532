//! JSON file format for meta-strategies.
//!
//! ```json
//! {
//!   "stem": [ { "point": ["a"], "interval": [["a"], []] } ],
//!   "loop": [ { "point": [], "interval": [[]] } ]
//! }
//! ```
//!
//! Every unit names the actions enabled at its integer instant and the
//! ordered, nonempty list of sets used inside the following open interval.
//! `stem` may be omitted; `loop` must be nonempty.

use serde::Deserialize;
use thiserror::Error;

use crate::strategy::{MetaStrategy, StrategyError, UnitPlan};
use crate::ta::{ActionSet, Ta};

#[derive(Debug, Error)]
pub enum MsfError {
    #[error("malformed strategy file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("action `{0}` is not controllable")]
    Uncontrollable(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    point: Vec<String>,
    interval: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    #[serde(default)]
    stem: Vec<PlanFile>,
    #[serde(rename = "loop")]
    cycle: Vec<PlanFile>,
}

fn to_set(ta: &Ta, names: &[String]) -> Result<ActionSet, MsfError> {
    let mut s = ActionSet::EMPTY;
    for n in names {
        let a = ta
            .action_id(n)
            .ok_or_else(|| MsfError::UnknownAction(n.clone()))?;
        if !ta.actions[a].controllable {
            return Err(MsfError::Uncontrollable(n.clone()));
        }
        s = s.with(a);
    }
    Ok(s)
}

fn to_names(ta: &Ta, s: ActionSet) -> Vec<String> {
    s.iter().map(|a| ta.actions[a].name.clone()).collect()
}

fn to_plan(ta: &Ta, p: &PlanFile) -> Result<UnitPlan, MsfError> {
    Ok(UnitPlan::new(
        to_set(ta, &p.point)?,
        p.interval
            .iter()
            .map(|i| to_set(ta, i))
            .collect::<Result<_, _>>()?,
    ))
}

fn from_plan(ta: &Ta, p: &UnitPlan) -> PlanFile {
    PlanFile {
        point: to_names(ta, p.at_point),
        interval: p.in_interval.iter().map(|&s| to_names(ta, s)).collect(),
    }
}

/// Reads a meta-strategy, resolving action names against `ta`.
pub fn parse_msf(ta: &Ta, src: &str) -> Result<MetaStrategy, MsfError> {
    let f: StrategyFile = serde_json::from_str(src)?;
    let stem = f
        .stem
        .iter()
        .map(|p| to_plan(ta, p))
        .collect::<Result<_, _>>()?;
    let cycle = f
        .cycle
        .iter()
        .map(|p| to_plan(ta, p))
        .collect::<Result<_, _>>()?;
    Ok(MetaStrategy::new(stem, cycle)?)
}

fn names_json(names: &[String]) -> String {
    let quoted: Vec<String> = names
        .iter()
        .map(|n| serde_json::to_string(n).expect("string serializes"))
        .collect();
    format!("[{}]", quoted.join(", "))
}

fn plans_json(ta: &Ta, plans: &[UnitPlan]) -> String {
    if plans.is_empty() {
        return "[]".to_string();
    }
    let rows: Vec<String> = plans
        .iter()
        .map(|p| {
            let f = from_plan(ta, p);
            let interval: Vec<String> = f.interval.iter().map(|i| names_json(i)).collect();
            format!(
                "    {{ \"point\": {}, \"interval\": [{}] }}",
                names_json(&f.point),
                interval.join(", ")
            )
        })
        .collect();
    format!("[\n{}\n  ]", rows.join(",\n"))
}

/// JSON form of `phi`, one unit per line.
pub fn print_msf(ta: &Ta, phi: &MetaStrategy) -> String {
    format!(
        "{{\n  \"stem\": {},\n  \"loop\": {}\n}}\n",
        plans_json(ta, &phi.stem),
        plans_json(ta, &phi.cycle)
    )
}
