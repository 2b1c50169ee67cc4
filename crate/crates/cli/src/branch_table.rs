//! Branch CSV: columns s, lambda, u_max, stable, first_eigenvalue, with the solve settings in
//! `# key=value` comment lines so that `stability` and `check` can re-solve a row.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use stablab::radial::BifurcationBranch;

use crate::output::{csv_text, num, opt_num, Table};
use crate::Failure;

pub const COLUMNS: [&str; 5] = ["s", "lambda", "u_max", "stable", "first_eigenvalue"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchMeta {
    pub dim: usize,
    pub nl: String,
    pub nodes: usize,
    pub smax: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub s: f64,
    pub lambda: f64,
    pub u_max: f64,
    pub stable: Option<bool>,
    pub first_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTable {
    pub meta: BranchMeta,
    pub rows: Vec<BranchRow>,
}

impl BranchTable {
    #[must_use]
    pub fn from_branch(meta: BranchMeta, branch: &BifurcationBranch) -> Self {
        let rows = branch
            .points
            .iter()
            .map(|p| BranchRow {
                s: p.center_value,
                lambda: p.lambda,
                u_max: p.field.max_value(),
                stable: p.stable,
                first_eigenvalue: p.first_eigenvalue,
            })
            .collect();
        Self { meta, rows }
    }

    #[must_use]
    pub fn header(&self) -> Vec<(&'static str, String)> {
        vec![
            ("dim", self.meta.dim.to_string()),
            ("nl", self.meta.nl.clone()),
            ("nodes", self.meta.nodes.to_string()),
            ("smax", num(self.meta.smax)),
            ("steps", self.meta.steps.to_string()),
        ]
    }

    #[must_use]
    pub fn table(&self) -> Table {
        let mut t = Table::new(&COLUMNS);
        for r in &self.rows {
            t.push(vec![
                num(r.s),
                num(r.lambda),
                num(r.u_max),
                r.stable.map(|b| b.to_string()).unwrap_or_default(),
                opt_num(r.first_eigenvalue),
            ]);
        }
        t
    }

    pub fn emit(&self, manifest_hash: &str) -> Result<String, Failure> {
        csv_text(manifest_hash, &self.header(), &self.table())
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let bad = |m: String| Failure::Usage(format!("branch CSV: {m}"));
        let mut meta = BTreeMap::new();
        for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
            if let Some((k, v)) = line.trim().split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let get = |k: &str| meta.get(k).ok_or_else(|| bad(format!("missing '# {k}=' header")));
        let parse_usize = |k: &str| get(k)?.parse::<usize>().map_err(|_| bad(format!("bad {k}")));
        let meta = BranchMeta {
            dim: parse_usize("dim")?,
            nl: get("nl")?.clone(),
            nodes: parse_usize("nodes")?,
            smax: get("smax")?.parse().map_err(|_| bad("bad smax".into()))?,
            steps: parse_usize("steps")?,
        };
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let headers = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
        if headers.iter().ne(COLUMNS) {
            return Err(bad(format!("expected columns {COLUMNS:?}, got {headers:?}")));
        }
        let f = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number {s:?}")));
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            rows.push(BranchRow {
                s: f(&rec[0])?,
                lambda: f(&rec[1])?,
                u_max: f(&rec[2])?,
                stable: match &rec[3] {
                    "" => None,
                    "true" => Some(true),
                    "false" => Some(false),
                    other => return Err(bad(format!("bad stable flag {other:?}"))),
                },
                first_eigenvalue: if rec[4].is_empty() { None } else { Some(f(&rec[4])?) },
            });
        }
        Ok(Self { meta, rows })
    }

    pub fn row(&self, index: usize) -> Result<&BranchRow, Failure> {
        self.rows.get(index).ok_or_else(|| Failure::Usage(format!("row {index} out of range: the branch has {} rows", self.rows.len())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips() {
        let x = BranchTable {
            meta: BranchMeta { dim: 3, nl: "power:2".into(), nodes: 512, smax: 12.0, steps: 4 },
            rows: vec![
                BranchRow { s: 0.0, lambda: 0.0, u_max: 0.0, stable: Some(true), first_eigenvalue: Some(9.869604401089358) },
                BranchRow { s: 1.0 / 3.0, lambda: 2.5000000000000004, u_max: 1.0 / 3.0, stable: Some(false), first_eigenvalue: Some(-1e-7) },
                BranchRow { s: 6.0, lambda: 1.5e-300, u_max: 6.0, stable: None, first_eigenvalue: None },
            ],
        };
        assert_eq!(BranchTable::parse(&x.emit("abc").unwrap()).unwrap(), x);
    }

    #[test]
    fn missing_header_is_a_usage_error() {
        assert!(matches!(BranchTable::parse("s,lambda,u_max,stable,first_eigenvalue\n"), Err(Failure::Usage(_))));
    }
}
