//! Report model and the CSV/JSON writers.
//!
//! A report is one experiment's inputs, data table, scalar results, and
//! verdicts. The CSV form is a single rectangular table (RFC 4180, CRLF
//! records): a `record` discriminator column, the data columns, then the
//! verdict columns; every row is padded to the full width. Floats are
//! printed with 17 significant digits so they round-trip exactly, which
//! also makes the CSV byte-reproducible. Wall time appears only in the
//! JSON form to keep it that way.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "N/A",
        }
    }
}

/// One tolerance check: the observed quantity must stay at or below the
/// threshold.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    pub observed: Option<f64>,
    pub threshold: Option<f64>,
    pub status: Status,
}

impl Verdict {
    pub fn at_most(name: &str, observed: f64, threshold: f64) -> Verdict {
        Verdict {
            name: name.to_string(),
            observed: Some(observed),
            threshold: Some(threshold),
            status: if observed <= threshold {
                Status::Pass
            } else {
                Status::Fail
            },
        }
    }

    pub fn not_applicable(name: &str) -> Verdict {
        Verdict {
            name: name.to_string(),
            observed: None,
            threshold: None,
            status: Status::NotApplicable,
        }
    }

    fn comparison(&self) -> &'static str {
        match self.status {
            Status::NotApplicable => "",
            _ => "<=",
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub experiment: String,
    pub inputs: Vec<(String, String)>,
    pub notes: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub results: Vec<(String, f64)>,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(experiment: &str) -> Report {
        Report {
            experiment: experiment.to_string(),
            ..Report::default()
        }
    }

    pub fn input(&mut self, name: &str, value: impl ToString) {
        self.inputs.push((name.to_string(), value.to_string()));
    }

    pub fn note(&mut self, name: &str, value: impl ToString) {
        self.notes.push((name.to_string(), value.to_string()));
    }

    pub fn result(&mut self, name: &str, value: f64) {
        self.results.push((name.to_string(), value));
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }

    pub fn to_csv(&self) -> String {
        let verdict_heads = [
            "name",
            "value",
            "observed",
            "threshold",
            "comparison",
            "status",
        ];
        let width = 1 + self.columns.len() + verdict_heads.len();
        let mut out = String::new();

        let mut header = vec!["record".to_string()];
        header.extend(self.columns.iter().cloned());
        header.extend(verdict_heads.iter().map(|s| s.to_string()));
        push_record(&mut out, &header, width);

        for (name, value) in &self.inputs {
            let mut row = vec!["input".to_string()];
            row.resize(1 + self.columns.len(), String::new());
            row.push(name.clone());
            row.push(value.clone());
            push_record(&mut out, &row, width);
        }
        for (name, value) in &self.notes {
            let mut row = vec!["note".to_string()];
            row.resize(1 + self.columns.len(), String::new());
            row.push(name.clone());
            row.push(value.clone());
            push_record(&mut out, &row, width);
        }
        for data in &self.rows {
            let mut row = vec!["data".to_string()];
            row.extend(data.iter().map(|v| fmt_f64(*v)));
            push_record(&mut out, &row, width);
        }
        for (name, value) in &self.results {
            let mut row = vec!["result".to_string()];
            row.resize(1 + self.columns.len(), String::new());
            row.push(name.clone());
            row.push(fmt_f64(*value));
            push_record(&mut out, &row, width);
        }
        for v in &self.verdicts {
            let mut row = vec!["verdict".to_string()];
            row.resize(1 + self.columns.len(), String::new());
            row.push(v.name.clone());
            row.push(String::new());
            row.push(v.observed.map(fmt_f64).unwrap_or_default());
            row.push(v.threshold.map(fmt_f64).unwrap_or_default());
            row.push(v.comparison().to_string());
            row.push(v.status.as_str().to_string());
            push_record(&mut out, &row, width);
        }
        out
    }

    pub fn to_json(&self, wall_time_s: f64) -> String {
        #[derive(Serialize)]
        struct Pair<'a, T> {
            name: &'a str,
            value: T,
        }
        #[derive(Serialize)]
        struct JsonVerdict<'a> {
            name: &'a str,
            observed: Option<f64>,
            threshold: Option<f64>,
            comparison: &'a str,
            status: &'a str,
        }
        #[derive(Serialize)]
        struct JsonReport<'a> {
            experiment: &'a str,
            inputs: Vec<Pair<'a, &'a str>>,
            notes: Vec<Pair<'a, &'a str>>,
            columns: &'a [String],
            data: &'a [Vec<f64>],
            results: Vec<Pair<'a, f64>>,
            verdicts: Vec<JsonVerdict<'a>>,
            wall_time_s: f64,
        }
        let doc = JsonReport {
            experiment: &self.experiment,
            inputs: self
                .inputs
                .iter()
                .map(|(n, v)| Pair {
                    name: n,
                    value: v.as_str(),
                })
                .collect(),
            notes: self
                .notes
                .iter()
                .map(|(n, v)| Pair {
                    name: n,
                    value: v.as_str(),
                })
                .collect(),
            columns: &self.columns,
            data: &self.rows,
            results: self
                .results
                .iter()
                .map(|(n, v)| Pair { name: n, value: *v })
                .collect(),
            verdicts: self
                .verdicts
                .iter()
                .map(|v| JsonVerdict {
                    name: &v.name,
                    observed: v.observed,
                    threshold: v.threshold,
                    comparison: v.comparison(),
                    status: v.status.as_str(),
                })
                .collect(),
            wall_time_s,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }
}

/// 17 significant digits: enough for an exact f64 round-trip.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_record(out: &mut String, fields: &[String], width: usize) {
    for i in 0..width {
        if i > 0 {
            out.push(',');
        }
        if let Some(field) = fields.get(i) {
            out.push_str(&quote_csv(field));
        }
    }
    out.push_str("\r\n");
}

fn quote_csv(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
