//! Scenario files: JSON with exact rationals as `"p/q"` strings.

use std::collections::BTreeMap;
use std::path::Path;

use filtration_core::hypotheses::EdData;
use filtration_core::random_time::{ConditionalDistributionField, RandomTime};
use filtration_core::rational::{format_rational, parse_rational};
use filtration_core::{build_space, Error as CoreError, FilteredSpace, Process, ProcessKind, RandomVariable, Rational, Time};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const VERSION: &str = "filtration-lab/1";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error at {pointer}: {message}")]
    Validation { pointer: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl ScenarioError {
    pub fn pointer(&self) -> Option<&str> {
        match self {
            ScenarioError::Validation { pointer, .. } => Some(pointer),
            _ => None,
        }
    }
}

fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        pointer: pointer.into(),
        message: message.into(),
    }
}

type Result<T> = std::result::Result<T, ScenarioError>;

/// A validated scenario. Processes, field and ED tables carry one entry per slot `0..=T, ∞`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub space: FilteredSpace,
    pub tau: Option<RandomTime>,
    pub processes: BTreeMap<String, Process>,
    pub field: Option<ConditionalDistributionField>,
    pub ed: Option<EdData>,
    pub market: Option<Process>,
}

impl Scenario {
    pub fn new(space: FilteredSpace) -> Self {
        Scenario {
            space,
            tau: None,
            processes: BTreeMap::new(),
            field: None,
            ed: None,
            market: None,
        }
    }

    pub fn require_tau(&self) -> Result<&RandomTime> {
        self.tau.as_ref().ok_or_else(|| invalid("/tau", "this command needs a random time"))
    }

    pub fn process(&self, name: &str) -> Result<&Process> {
        self.processes
            .get(name)
            .ok_or_else(|| invalid(format!("/processes/{}", escape(name)), "no such process"))
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

pub fn kind_name(kind: ProcessKind) -> &'static str {
    match kind {
        ProcessKind::Raw => "raw",
        ProcessKind::Adapted => "adapted",
        ProcessKind::Predictable => "predictable",
        ProcessKind::Increasing => "increasing",
        ProcessKind::FiniteVariation => "finite_variation",
    }
}

fn parse_kind(s: &str) -> Option<ProcessKind> {
    Some(match s {
        "raw" => ProcessKind::Raw,
        "adapted" => ProcessKind::Adapted,
        "predictable" => ProcessKind::Predictable,
        "increasing" => ProcessKind::Increasing,
        "finite_variation" => ProcessKind::FiniteVariation,
        _ => return None,
    })
}

struct Reader {
    strict: bool,
}

impl Reader {
    fn object<'a>(&self, v: &'a Value, ptr: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
        let map = v.as_object().ok_or_else(|| invalid(ptr, "expected an object"))?;
        if self.strict {
            if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(invalid(format!("{ptr}/{}", escape(k)), "unknown key"));
            }
        }
        Ok(map)
    }

    fn array<'a>(&self, v: &'a Value, ptr: &str, len: Option<usize>) -> Result<&'a Vec<Value>> {
        let a = v.as_array().ok_or_else(|| invalid(ptr, "expected an array"))?;
        match len {
            Some(n) if a.len() != n => Err(invalid(ptr, format!("expected {n} entries, found {}", a.len()))),
            _ => Ok(a),
        }
    }

    fn rational(&self, v: &Value, ptr: &str) -> Result<Rational> {
        let s = v.as_str().ok_or_else(|| invalid(ptr, "rationals are written as \"p/q\" strings"))?;
        parse_rational(s).map_err(|e| invalid(ptr, e.to_string()))
    }

    fn variable(&self, v: &Value, ptr: &str, n: usize) -> Result<RandomVariable> {
        self.array(v, ptr, Some(n))?
            .iter()
            .enumerate()
            .map(|(a, x)| self.rational(x, &format!("{ptr}/{a}")))
            .collect()
    }

    fn variables(&self, v: &Value, ptr: &str, slots: usize, n: usize) -> Result<Vec<RandomVariable>> {
        self.array(v, ptr, Some(slots))?
            .iter()
            .enumerate()
            .map(|(t, x)| self.variable(x, &format!("{ptr}/{t}"), n))
            .collect()
    }

    fn table(&self, v: &Value, ptr: &str, slots: usize, n: usize) -> Result<Vec<Vec<RandomVariable>>> {
        self.array(v, ptr, Some(slots))?
            .iter()
            .enumerate()
            .map(|(u, row)| self.variables(row, &format!("{ptr}/{u}"), slots, n))
            .collect()
    }

    fn time(&self, v: &Value, ptr: &str, horizon: usize) -> Result<Time> {
        match v {
            Value::String(s) if s == "inf" => Ok(Time::Infinity),
            Value::Number(x) => match x.as_u64() {
                Some(t) if t as usize <= horizon => Ok(Time::At(t as usize)),
                _ => Err(invalid(ptr, format!("expected a time in 0..={horizon} or \"inf\""))),
            },
            _ => Err(invalid(ptr, "expected an integer time or \"inf\"")),
        }
    }

    fn space(&self, root: &Map<String, Value>) -> Result<FilteredSpace> {
        let field = |k: &str| root.get(k).ok_or_else(|| invalid(format!("/{k}"), "missing"));
        let atoms: Vec<String> = self
            .array(field("atoms")?, "/atoms", None)?
            .iter()
            .enumerate()
            .map(|(i, a)| a.as_str().map(str::to_string).ok_or_else(|| invalid(format!("/atoms/{i}"), "expected a string")))
            .collect::<Result<_>>()?;
        let index: BTreeMap<&str, usize> = atoms.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        if index.len() != atoms.len() {
            return Err(invalid("/atoms", "atom names must be distinct"));
        }
        let n = atoms.len();
        let prob: Vec<Rational> = self
            .array(field("probabilities")?, "/probabilities", Some(n))?
            .iter()
            .enumerate()
            .map(|(i, x)| self.rational(x, &format!("/probabilities/{i}")))
            .collect::<Result<_>>()?;
        let horizon = field("horizon")?
            .as_u64()
            .ok_or_else(|| invalid("/horizon", "expected a nonnegative integer"))? as usize;
        let levels = self.array(field("filtration")?, "/filtration", Some(horizon + 1))?;
        let mut partitions = Vec::with_capacity(levels.len());
        for (t, level) in levels.iter().enumerate() {
            let ptr = format!("/filtration/{t}");
            let blocks = self
                .array(level, &ptr, None)?
                .iter()
                .enumerate()
                .map(|(b, block)| {
                    let bptr = format!("{ptr}/{b}");
                    self.array(block, &bptr, None)?
                        .iter()
                        .enumerate()
                        .map(|(i, name)| {
                            name.as_str()
                                .and_then(|s| index.get(s).copied())
                                .ok_or_else(|| invalid(format!("{bptr}/{i}"), "unknown atom"))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            partitions.push(blocks);
        }
        build_space(atoms, prob, partitions).map_err(|e| {
            let ptr = match &e {
                CoreError::ProbabilityNotNormalized { .. } => "/probabilities".to_string(),
                CoreError::NegativeProbability { atom } | CoreError::ZeroProbabilityBlock { atom } => {
                    format!("/probabilities/{atom}")
                }
                CoreError::PartitionNotRefining { level } | CoreError::InvalidPartition { level, .. } => {
                    format!("/filtration/{level}")
                }
                _ => String::new(),
            };
            invalid(ptr, e.to_string())
        })
    }

    fn process(&self, space: &FilteredSpace, v: &Value, ptr: &str) -> Result<Process> {
        let map = self.object(v, ptr, &["kind", "values"])?;
        let kind = match map.get("kind") {
            None => ProcessKind::Adapted,
            Some(k) => k
                .as_str()
                .and_then(parse_kind)
                .ok_or_else(|| invalid(format!("{ptr}/kind"), "unknown process kind"))?,
        };
        let values = map.get("values").ok_or_else(|| invalid(format!("{ptr}/values"), "missing"))?;
        let values = self.variables(values, &format!("{ptr}/values"), space.slots(), space.n())?;
        let p = Process::new(values, kind);
        let checked = match kind {
            ProcessKind::Raw => Ok(()),
            ProcessKind::Predictable => space.check_predictable(&p, "process"),
            _ => space.check_adapted(&p, "process"),
        };
        checked.map_err(|e| invalid(format!("{ptr}/values"), e.to_string()))?;
        if kind == ProcessKind::Increasing {
            if let Some(t) = (1..space.slots()).find(|&t| !p.increment(t).is_nonnegative()) {
                return Err(invalid(format!("{ptr}/values/{t}"), "process decreases"));
            }
        }
        Ok(p)
    }
}

const TOP_KEYS: &[&str] = &[
    "version",
    "atoms",
    "probabilities",
    "horizon",
    "filtration",
    "tau",
    "processes",
    "field",
    "ed",
    "market",
];

pub fn parse_scenario(text: &str, strict: bool) -> Result<Scenario> {
    let root: Value = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let r = Reader { strict };
    let top = r.object(&root, "", TOP_KEYS)?;
    match top.get("version").and_then(Value::as_str) {
        Some(VERSION) => {}
        _ => return Err(invalid("/version", format!("expected \"{VERSION}\""))),
    }
    let space = r.space(top)?;
    let (n, slots) = (space.n(), space.slots());
    let mut sc = Scenario::new(space);

    if let Some(v) = top.get("tau") {
        let times = r
            .array(v, "/tau", Some(n))?
            .iter()
            .enumerate()
            .map(|(a, x)| r.time(x, &format!("/tau/{a}"), sc.space.horizon()))
            .collect::<Result<Vec<_>>>()?;
        sc.tau = Some(RandomTime::new(&sc.space, times).map_err(|e| invalid("/tau", e.to_string()))?);
    }
    if let Some(v) = top.get("processes") {
        let map = v.as_object().ok_or_else(|| invalid("/processes", "expected an object"))?;
        for (name, p) in map {
            let ptr = format!("/processes/{}", escape(name));
            sc.processes.insert(name.clone(), r.process(&sc.space, p, &ptr)?);
        }
    }
    if let Some(v) = top.get("field") {
        let table = r.table(v, "/field", slots, n)?;
        sc.field = Some(ConditionalDistributionField::new(&sc.space, table).map_err(|e| invalid("/field", e.to_string()))?);
    }
    if let Some(v) = top.get("ed") {
        let map = r.object(v, "/ed", &["m", "d"])?;
        let m = r.table(map.get("m").ok_or_else(|| invalid("/ed/m", "missing"))?, "/ed/m", slots, n)?;
        let d = r.process(&sc.space, map.get("d").ok_or_else(|| invalid("/ed/d", "missing"))?, "/ed/d")?;
        sc.ed = Some(EdData::new(&sc.space, m, d).map_err(|e| invalid("/ed", e.to_string()))?);
    }
    if let Some(v) = top.get("market") {
        let map = r.object(v, "/market", &["x"])?;
        let x = map.get("x").ok_or_else(|| invalid("/market/x", "missing"))?;
        sc.market = Some(r.process(&sc.space, x, "/market/x")?);
    }
    Ok(sc)
}

pub fn load_scenario(path: &Path, strict: bool) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text, strict)
}

pub fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn variable_json(x: &RandomVariable) -> Value {
    Value::Array(x.values().iter().map(rational_json).collect())
}

pub fn variables_json(xs: &[RandomVariable]) -> Value {
    Value::Array(xs.iter().map(variable_json).collect())
}

pub fn time_json(t: Time) -> Value {
    match t {
        Time::At(t) => json!(t),
        Time::Infinity => json!("inf"),
    }
}

fn process_json(p: &Process) -> Value {
    json!({ "kind": kind_name(p.kind()), "values": variables_json(p.values()) })
}

fn table_json(rows: &[Vec<RandomVariable>]) -> Value {
    Value::Array(rows.iter().map(|r| variables_json(r)).collect())
}

/// Canonical JSON value: sorted keys, lowest-terms rationals.
pub fn scenario_json(sc: &Scenario) -> Value {
    let space = &sc.space;
    let names = space.atoms();
    let filtration: Vec<Value> = space
        .filtration()
        .levels()
        .iter()
        .map(|p| {
            Value::Array(
                p.blocks()
                    .iter()
                    .map(|b| Value::Array(b.iter().map(|&a| json!(names[a])).collect()))
                    .collect(),
            )
        })
        .collect();
    let mut root = Map::new();
    root.insert("version".into(), json!(VERSION));
    root.insert("atoms".into(), json!(names));
    root.insert("probabilities".into(), Value::Array(space.prob().iter().map(rational_json).collect()));
    root.insert("horizon".into(), json!(space.horizon()));
    root.insert("filtration".into(), Value::Array(filtration));
    if let Some(tau) = &sc.tau {
        root.insert("tau".into(), Value::Array(tau.values().iter().map(|&t| time_json(t)).collect()));
    }
    if !sc.processes.is_empty() {
        let map: Map<String, Value> = sc.processes.iter().map(|(k, p)| (k.clone(), process_json(p))).collect();
        root.insert("processes".into(), Value::Object(map));
    }
    if let Some(field) = &sc.field {
        root.insert("field".into(), table_json(field.table()));
    }
    if let Some(ed) = &sc.ed {
        root.insert("ed".into(), json!({ "m": table_json(ed.table()), "d": process_json(ed.d()) }));
    }
    if let Some(x) = &sc.market {
        root.insert("market".into(), json!({ "x": process_json(x) }));
    }
    Value::Object(root)
}

pub fn scenario_text(sc: &Scenario) -> String {
    let mut s = serde_json::to_string_pretty(&scenario_json(sc)).expect("values serialize");
    s.push('\n');
    s
}

pub fn save_scenario(sc: &Scenario, path: &Path) -> Result<()> {
    std::fs::write(path, scenario_text(sc)).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use filtration_core::fixtures;

    fn s1_text() -> String {
        let (space, tau) = fixtures::s1();
        let mut sc = Scenario::new(space);
        sc.tau = Some(tau);
        scenario_text(&sc)
    }

    #[test]
    fn s1_round_trips() {
        let text = s1_text();
        let back = parse_scenario(&text, true).unwrap();
        assert_eq!(scenario_text(&back), text);
    }

    #[test]
    fn non_canonical_rationals_are_reduced() {
        let text = s1_text().replacen("\"1/4\"", "\"2/8\"", 1);
        let back = parse_scenario(&text, true).unwrap();
        assert_eq!(scenario_text(&back), s1_text());
    }

    #[test]
    fn unknown_keys_only_rejected_when_strict() {
        let text = s1_text().replacen('{', "{\"comment\": \"x\",", 1);
        assert!(parse_scenario(&text, false).is_ok());
        let err = parse_scenario(&text, true).unwrap_err();
        assert_eq!(err.pointer(), Some("/comment"));
    }

    #[test]
    fn tau_beyond_horizon_is_located() {
        let text = s1_text().replace("\"inf\"", "7");
        assert_eq!(parse_scenario(&text, true).unwrap_err().pointer(), Some("/tau/3"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert!(matches!(parse_scenario("{\"version\": ", true), Err(ScenarioError::Parse { line: 1, .. })));
    }
}
