//! Deterministic reports: ordered sections of named checks.

use std::fmt::Write as _;

use filtration_core::{Error as CoreError, FilteredSpace, Verdict, Witness};
use serde_json::{json, Map, Value};

use crate::scenario::{rational_json, time_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Unknown,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unknown => "UNKNOWN",
            Status::Skipped => "SKIPPED-precondition",
        }
    }
}

/// A witness with atom names resolved, ready for output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessOut {
    pub check: String,
    pub coords: Vec<(String, Value)>,
    pub atoms: Vec<String>,
    pub lhs: Value,
    pub rhs: Value,
}

impl WitnessOut {
    pub fn new(w: &Witness, space: &FilteredSpace) -> Self {
        WitnessOut {
            check: w.check.clone(),
            coords: w.coords.iter().map(|(n, t)| (n.clone(), time_json(*t))).collect(),
            atoms: w.atoms.iter().map(|&a| space.atoms()[a].clone()).collect(),
            lhs: rational_json(&w.lhs),
            rhs: rational_json(&w.rhs),
        }
    }

    fn json(&self) -> Value {
        let coords: Vec<Value> = self.coords.iter().map(|(n, t)| json!({ "name": n, "time": t })).collect();
        json!({
            "check": self.check,
            "coords": coords,
            "atoms": self.atoms,
            "lhs": self.lhs,
            "rhs": self.rhs,
        })
    }

    fn text(&self) -> String {
        let mut s = self.check.clone();
        for (n, t) in &self.coords {
            let t = t.as_str().map_or_else(|| t.to_string(), str::to_string);
            let _ = write!(s, " {n}={t}");
        }
        let _ = write!(
            s,
            " on {{{}}}: lhs {}, rhs {}",
            self.atoms.join(","),
            self.lhs.as_str().unwrap_or_default(),
            self.rhs.as_str().unwrap_or_default()
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: Option<WitnessOut>,
    pub detail: Option<String>,
}

impl Check {
    pub fn verdict(name: impl Into<String>, v: &Verdict, space: &FilteredSpace) -> Self {
        let (status, witness, detail) = match v {
            Verdict::Pass => (Status::Pass, None, None),
            Verdict::Fail(w) => (Status::Fail, Some(WitnessOut::new(w, space)), None),
            Verdict::Unknown(why) => (Status::Unknown, None, Some(why.clone())),
        };
        Check {
            name: name.into(),
            status,
            witness,
            detail,
        }
    }

    pub fn pass_if(name: impl Into<String>, ok: bool, detail: &str) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: None,
            detail: (!ok).then(|| detail.to_string()),
        }
    }

    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skipped,
            witness: None,
            detail: Some(why.into()),
        }
    }

    /// A library refusal, reported as a skipped precondition with its witness when it has one.
    pub fn refused(name: impl Into<String>, e: &CoreError, space: &FilteredSpace) -> Self {
        Check {
            witness: error_witness(e).map(|w| WitnessOut::new(w, space)),
            ..Check::skipped(name, e.to_string())
        }
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("status".into(), json!(self.status.as_str()));
        if let Some(w) = &self.witness {
            m.insert("witness".into(), w.json());
        }
        if let Some(d) = &self.detail {
            m.insert("detail".into(), json!(d));
        }
        Value::Object(m)
    }
}

pub fn error_witness(e: &CoreError) -> Option<&Witness> {
    match e {
        CoreError::FieldAxiomViolation(w)
        | CoreError::HypothesisHPFails(w)
        | CoreError::FieldNotStrictlyPositive(w)
        | CoreError::EDVerificationFails(w)
        | CoreError::RealizationMismatch(w)
        | CoreError::PositivityFails(w)
        | CoreError::NotMartingale(w)
        | CoreError::InitialDecompositionInvalid(w)
        | CoreError::DensityNotPositive(w)
        | CoreError::NormalizationFails(w)
        | CoreError::DriftDensityMissing(w) => Some(w),
        _ => None,
    }
}

/// Results for one scenario. `classification` lists properties of the random time, which are
/// descriptive and do not count as failures.
#[derive(Debug, Clone, Default)]
pub struct Section {
    pub label: String,
    pub classification: Vec<Check>,
    pub checks: Vec<Check>,
    pub outputs: Map<String, Value>,
    pub elapsed_ms: Option<f64>,
}

impl Section {
    pub fn new(label: impl Into<String>) -> Self {
        Section {
            label: label.into(),
            ..Section::default()
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("label".into(), json!(self.label));
        m.insert("checks".into(), Value::Array(self.checks.iter().map(Check::json).collect()));
        if !self.classification.is_empty() {
            m.insert(
                "classification".into(),
                Value::Array(self.classification.iter().map(Check::json).collect()),
            );
        }
        if !self.outputs.is_empty() {
            m.insert("outputs".into(), Value::Object(self.outputs.clone()));
        }
        if let Some(ms) = self.elapsed_ms {
            m.insert("elapsed_ms".into(), json!(ms));
        }
        Value::Object(m)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
    pub skipped: usize,
}

impl Report {
    pub fn new(command: impl Into<String>, sections: Vec<Section>) -> Self {
        Report {
            command: command.into(),
            sections,
        }
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.sections.iter().flat_map(|s| &s.checks)
    }

    pub fn counts(&self) -> Counts {
        self.checks().fold(Counts::default(), |mut c, x| {
            match x.status {
                Status::Pass => c.pass += 1,
                Status::Fail => c.fail += 1,
                Status::Unknown => c.unknown += 1,
                Status::Skipped => c.skipped += 1,
            }
            c
        })
    }

    /// 0 iff nothing failed; under `strict`, skipped preconditions also count.
    pub fn exit_code(&self, strict: bool) -> i32 {
        let c = self.counts();
        i32::from(c.fail > 0 || (strict && c.skipped > 0))
    }

    pub fn to_json(&self) -> Value {
        let c = self.counts();
        json!({
            "command": self.command,
            "sections": self.sections.iter().map(Section::json).collect::<Vec<_>>(),
            "summary": { "pass": c.pass, "fail": c.fail, "unknown": c.unknown, "skipped": c.skipped },
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for sec in &self.sections {
            let _ = writeln!(s, "== {} ==", sec.label);
            for c in &sec.classification {
                let _ = writeln!(s, "  [{}] {}{}", c.name, c.status.as_str(), suffix(c));
            }
            for c in &sec.checks {
                let _ = writeln!(s, "  {:<20} {}{}", c.status.as_str(), c.name, suffix(c));
            }
            if let Some(ms) = sec.elapsed_ms {
                let _ = writeln!(s, "  ({ms:.1} ms)");
            }
        }
        let c = self.counts();
        let _ = writeln!(
            s,
            "{}: {} pass, {} fail, {} unknown, {} skipped",
            self.command, c.pass, c.fail, c.unknown, c.skipped
        );
        s
    }
}

fn suffix(c: &Check) -> String {
    match (&c.witness, &c.detail) {
        (Some(w), _) => format!(": {}", w.text()),
        (None, Some(d)) => format!(": {d}"),
        _ => String::new(),
    }
}
