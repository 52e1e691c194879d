//! JSON run reports and CSV export.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Value};

use qwalk_core::acceptance::Check;
use qwalk_core::decoherence::DecoherenceMatrix;
use qwalk_core::{Cx, Mat2F64};

/// Everything a subcommand reports. Parameters and results share one flat,
/// key-sorted map so identical invocations serialise identically apart from
/// `wall_time_s`.
#[derive(Debug, Serialize)]
pub struct RunReport {
    command: &'static str,
    argv: Vec<String>,
    #[serde(flatten)]
    fields: BTreeMap<String, Value>,
    checks: Vec<Check>,
    pass: bool,
    wall_time_s: f64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunReport {
    pub fn start(command: &'static str) -> Self {
        Self {
            command,
            argv: std::env::args().skip(1).collect(),
            fields: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            wall_time_s: 0.0,
            started: Some(Instant::now()),
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_owned(), v.into());
        self
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.param(key, v)
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.pass &= c.pass;
        self.checks.push(c);
        self
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn print(mut self) -> Result<()> {
        if let Some(t) = self.started {
            self.wall_time_s = t.elapsed().as_secs_f64();
        }
        let mut out = std::io::stdout().lock();
        serde_json::to_writer_pretty(&mut out, &self)?;
        writeln!(out)?;
        Ok(())
    }
}

pub fn cx_json(z: Cx<f64>) -> Value {
    json!([z.re, z.im])
}

/// `[[a, b], [c, d]]` with each entry as `[re, im]`.
pub fn mat_json(m: &Mat2F64) -> Value {
    json!([[cx_json(m.a), cx_json(m.b)], [cx_json(m.c), cx_json(m.d)]])
}

/// Columns `x,prob,psiL_re,psiL_im,psiR_re,psiR_im`.
pub fn write_dist_csv<W: Write>(w: W, rows: &[(i64, f64, Cx<f64>, Cx<f64>)]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["x", "prob", "psiL_re", "psiL_im", "psiR_re", "psiR_im"])?;
    for (x, p, l, r) in rows {
        csv.serialize((x, p, l.re, l.im, r.re, r.im))?;
    }
    csv.flush()?;
    Ok(())
}

/// Columns `k,kp,re,im`, one row per entry, row-major.
pub fn write_matrix_csv<W: Write>(w: W, d: &DecoherenceMatrix<f64>) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["k", "kp", "re", "im"])?;
    for k in 0..d.dim() {
        for kp in 0..d.dim() {
            let z = d.get(k, kp);
            csv.serialize((k, kp, z.re, z.im))?;
        }
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let rows = [(-2, 0.25, Cx::new(0.5, 0.0), Cx::new(0.0, -0.0))];
        write_dist_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "x,prob,psiL_re,psiL_im,psiR_re,psiR_im\n-2,0.25,0.5,0.0,0.0,-0.0\n"
        );
    }

    #[test]
    fn failing_check_clears_pass() {
        let mut r = RunReport::start("t");
        r.check(Check::at_most("a", 1.0, 2.0));
        assert!(r.pass);
        r.check(Check::at_most("b", 3.0, 2.0));
        assert!(!r.pass);
        assert_eq!(r.first_failure().unwrap().name, "b");
    }
}
