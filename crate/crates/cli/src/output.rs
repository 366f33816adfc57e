use std::io::Write;

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Emit {
    Text,
    Json,
    Csv,
}

/// One line of output.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub command: String,
    pub inputs: Vec<(String, String)>,
    pub result: Vec<(String, Value)>,
    pub certified: bool,
    pub provenance: String,
}

impl Record {
    pub fn new(command: &str, provenance: &str) -> Self {
        Record {
            command: command.to_string(),
            inputs: Vec::new(),
            result: Vec::new(),
            certified: true,
            provenance: provenance.to_string(),
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.result.push((key.to_string(), value.into()));
        self
    }

    pub fn certified(mut self, certified: bool) -> Self {
        self.certified = certified;
        self
    }

    pub fn to_json(&self) -> Value {
        let inputs: Map<String, Value> = self
            .inputs
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let result: Map<String, Value> = self.result.iter().cloned().collect();
        let mut out = Map::new();
        out.insert("command".into(), Value::String(self.command.clone()));
        out.insert("inputs".into(), Value::Object(inputs));
        out.insert("result".into(), Value::Object(result));
        out.insert("certified".into(), Value::Bool(self.certified));
        out.insert("provenance".into(), Value::String(self.provenance.clone()));
        Value::Object(out)
    }

    fn text(&self) -> String {
        let mut line = self.command.clone();
        for (k, v) in &self.inputs {
            line.push_str(&format!(" {k}={v}"));
        }
        line.push_str(" ->");
        for (k, v) in &self.result {
            line.push_str(&format!(" {k}={}", plain(v)));
        }
        line.push_str(if self.certified {
            " [certified]"
        } else {
            " [uncertified]"
        });
        line.push_str(&format!("  # {}", self.provenance));
        line
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".to_string(),
        other => other.to_string(),
    }
}

pub fn write_records(out: &mut dyn Write, records: &[Record], emit: Emit) -> std::io::Result<()> {
    match emit {
        Emit::Text => {
            for r in records {
                writeln!(out, "{}", r.text())?;
            }
        }
        Emit::Json => {
            for r in records {
                writeln!(out, "{}", r.to_json())?;
            }
        }
        Emit::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            if let Some(first) = records.first() {
                let mut header = vec!["command".to_string()];
                header.extend(first.inputs.iter().map(|(k, _)| k.clone()));
                header.extend(first.result.iter().map(|(k, _)| k.clone()));
                header.push("certified".into());
                header.push("provenance".into());
                w.write_record(&header)?;
            }
            for r in records {
                let mut row = vec![r.command.clone()];
                row.extend(r.inputs.iter().map(|(_, v)| v.clone()));
                row.extend(r.result.iter().map(|(_, v)| plain(v)));
                row.push(r.certified.to_string());
                row.push(r.provenance.clone());
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
