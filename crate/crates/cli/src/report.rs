//! The report every command emits, in a text and a JSON rendering that carry the same
//! numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use autloop_core::{Error, ErrorClass, RankTable};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct Parameters {
    pub max_degree: Option<u32>,
    pub format: Format,
    pub growth: bool,
}

/// One table: values indexed by degree, `None` where the table has no entry.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub values: Vec<Option<u64>>,
    /// Largest trusted degree; `None` means every entry is trusted.
    pub trusted_up_to: Option<u32>,
}

impl Table {
    pub fn from_rank_table(t: &RankTable, first: u32, last: u32) -> Self {
        let values = (0..=last)
            .map(|n| (n >= first).then(|| t.get(n) as u64))
            .collect();
        Table {
            values,
            trusted_up_to: t.trusted_up_to,
        }
    }

    fn is_trusted(&self, degree: usize) -> bool {
        self.trusted_up_to.is_none_or(|t| degree as u64 <= t as u64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    pub degree: Option<i64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub model: String,
    pub command: String,
    pub parameters: Parameters,
    /// Trust bound per table label.
    pub trusted_up_to: BTreeMap<String, Option<u32>>,
    pub tables: BTreeMap<String, Vec<Option<u64>>>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    pub exit_code: i32,
    #[serde(skip)]
    stage: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Validation => 1,
        ErrorClass::Input => 2,
        ErrorClass::Mismatch => 3,
        ErrorClass::Internal => 4,
    }
}

impl Report {
    pub fn new(model: impl Into<String>, command: &str, parameters: Parameters) -> Self {
        Report {
            model: model.into(),
            command: command.to_string(),
            parameters,
            trusted_up_to: BTreeMap::new(),
            tables: BTreeMap::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            exit_code: 0,
            stage: String::new(),
        }
    }

    /// Names the check that is about to run, so a failure can be attributed to it.
    pub fn stage(&mut self, name: &str) {
        self.stage = name.to_string();
    }

    pub fn table(&mut self, label: &str, table: Table) {
        self.trusted_up_to
            .insert(label.to_string(), table.trusted_up_to);
        self.tables.insert(label.to_string(), table.values);
    }

    pub fn verdict(&mut self, check: &str, degree: Option<i64>, pass: bool) {
        self.verdicts.push(Verdict {
            check: check.to_string(),
            degree,
            pass,
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Records a failure of the current stage.
    pub fn fail(&mut self, error: &Error) {
        let stage = if self.stage.is_empty() {
            self.command.clone()
        } else {
            self.stage.clone()
        };
        self.verdict(&stage, None, false);
        self.note(format!("error: {error}"));
        self.exit_code = exit_code(error);
    }

    pub fn render(&self) -> String {
        match self.parameters.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", self.model);
        let _ = writeln!(out, "command: {}", self.command);
        let p = &self.parameters;
        let _ = writeln!(
            out,
            "parameters: max_degree={} growth={}",
            p.max_degree.map_or("-".to_string(), |m| m.to_string()),
            p.growth
        );
        for (label, values) in &self.tables {
            let trust = self.trusted_up_to.get(label).copied().flatten();
            let table = Table {
                values: values.clone(),
                trusted_up_to: trust,
            };
            let _ = writeln!(
                out,
                "table {label} (trusted to {})",
                trust.map_or("all".to_string(), |t| t.to_string())
            );
            for (n, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    let mark = if table.is_trusted(n) { "" } else { "?" };
                    let _ = writeln!(out, "  {n:>3}: {v}{mark}");
                }
            }
        }
        for v in &self.verdicts {
            let degree = v.degree.map_or(String::new(), |d| format!(" [degree {d}]"));
            let _ = writeln!(
                out,
                "{} {}{degree}",
                if v.pass { "PASS" } else { "FAIL" },
                v.check
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "exit_code: {}", self.exit_code);
        out
    }
}
