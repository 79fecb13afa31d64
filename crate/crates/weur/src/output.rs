//! CSV and JSON emission.
//!
//! Every CSV starts with a `#` comment naming the table kind and format version, followed by the
//! header row. Floats are written with 17 significant digits; absent values are empty fields.

use std::io::{self, Write};

use serde::Serialize;
use weur_core::bounds::BoundReport;

pub const CSV_FORMAT_VERSION: u32 = 1;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// A table with fixed columns, written as versioned CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub kind: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(kind: &'static str, columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        CsvTable { kind, columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# weur {} v{CSV_FORMAT_VERSION}", self.kind)?;
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    }

    pub fn to_string_lossy(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// Long-format table of every bound in a report: `quantity,alpha,first,second,value`.
pub fn bound_report_table(r: &BoundReport) -> CsvTable {
    let mut t = CsvTable::new("bound", ["quantity", "alpha", "first", "second", "value"]);
    let mut scalar = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            t.push(vec![name.into(), String::new(), String::new(), String::new(), fmt_f64(v)]);
        }
    };
    scalar("i_com", Some(r.state.i_com));
    scalar("s_rho", Some(r.state.s_rho));
    scalar("g_avg_norm", Some(r.view.g_avg_norm));
    scalar("g_tot_norm", Some(r.view.g_tot_norm));
    scalar("x_tot", Some(r.view.exclusivity));
    scalar("q_1", r.q_1);
    scalar("q_s", r.q_s);
    scalar("q_lmf", r.q_lmf);
    scalar("q_lmf_best_order", r.q_lmf_best_order);
    scalar("q_scb", r.q_scb);
    for q in &r.q_alpha {
        t.push(vec!["q_alpha".into(), q.alpha.clone(), String::new(), String::new(), fmt_f64(q.value)]);
    }
    for b in &r.b_alpha {
        t.push(vec!["b_alpha".into(), b.alpha.clone(), String::new(), String::new(), fmt_f64(b.value)]);
    }
    for p in &r.q_mu {
        t.push(vec!["q_mu".into(), String::new(), p.first.to_string(), p.second.to_string(), fmt_f64(p.value)]);
    }
    t
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = fmt_f64(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        let third = 1.0 / 3.0;
        assert_eq!(fmt_f64(third).parse::<f64>().unwrap().to_bits(), third.to_bits());
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn table_has_versioned_comment_and_header() {
        let mut t = CsvTable::new("demo", ["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_string_lossy(), "# weur demo v1\na,b\n1,2\n");
    }
}
