use std::fmt::Display;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::sim::risk::{CalibrationTable, SimulationReport};

fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Per-run CSV, ordered by run and then by estimator.
pub fn write_runs_csv<W: Write>(report: &SimulationReport, mut w: W) -> Result<()> {
    writeln!(w, "run,estimator,h1,h2,sq_error,status")?;
    let runs = report.estimators.first().map_or(0, |e| e.runs.len());
    for run in 0..runs {
        for est in &report.estimators {
            let r = &est.runs[run];
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.run,
                est.estimator,
                opt(r.h1),
                opt(r.h2),
                opt(r.sq_error),
                r.status.as_str()
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_calibration_csv<W: Write>(table: &CalibrationTable, mut w: W) -> Result<()> {
    writeln!(w, "c01,c02,median_risk,mean_risk,failures")?;
    for row in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            row.c0_sine,
            row.c0_cosine,
            opt(row.median_risk),
            opt(row.mean_risk),
            row.failures
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::risk::{RiskReport, RiskSummary, RunRecord, RunStatus};
    use crate::sim::scenario::Scenario;

    fn scenario() -> Scenario {
        Scenario::from_json(
            r#"{"model":"m1","design":{"kind":"uniform","a":-5,"b":5},"n":10,"x_eval":0,
                "estimators":[{"method":"gl"},{"method":"nw"}],"runs":2,"seed":3}"#,
        )
        .unwrap()
    }

    #[test]
    fn runs_csv_layout() {
        let rec = |run, status| RunRecord {
            run,
            h1: Some(0.5),
            h2: None,
            estimate: None,
            sq_error: (status == RunStatus::Ok).then_some(0.25),
            status,
        };
        let est = |name: &str| {
            let runs = vec![rec(0, RunStatus::Ok), rec(1, RunStatus::Degenerate)];
            RiskReport {
                estimator: name.into(),
                summary: RiskSummary::from_records(&runs),
                runs,
            }
        };
        let report = SimulationReport {
            schema_version: 1,
            scenario: scenario(),
            truth: 0.0,
            estimators: vec![est("gl"), est("nw")],
        };
        let mut buf = Vec::new();
        write_runs_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "run,estimator,h1,h2,sq_error,status\n\
             0,gl,0.5,,0.25,ok\n0,nw,0.5,,0.25,ok\n\
             1,gl,0.5,,,degenerate\n1,nw,0.5,,,degenerate\n"
        );
    }
}
