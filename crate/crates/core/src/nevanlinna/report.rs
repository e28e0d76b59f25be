use std::fmt::{self, Write};

use serde::Serialize;

/// Outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The hypotheses of the statement are not met; nothing to verify.
    Vacuous,
    /// Statistically undecided.
    Inconclusive,
}

impl Verdict {
    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }

    /// `Pass` when `ok`, otherwise `Fail`.
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Vacuous => "vacuous",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One data point of a check: `value` and `margin` at abscissa `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    /// Sub-series label, e.g. the hypersurface index; empty for single-series checks.
    pub series: String,
    pub r: f64,
    pub value: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub rows: Vec<ReportRow>,
    pub fitted_constant: f64,
    pub slope_estimate: f64,
    pub verdict: Verdict,
    pub details: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            rows: Vec::new(),
            fitted_constant: 0.0,
            slope_estimate: 0.0,
            verdict: Verdict::Pass,
            details: String::new(),
        }
    }

    pub fn push(&mut self, series: impl Into<String>, r: f64, value: f64, margin: f64) {
        self.rows.push(ReportRow { series: series.into(), r, value, margin });
    }

    pub fn radii(&self) -> Vec<f64> {
        self.rows.iter().map(|row| row.r).collect()
    }

    pub fn margins(&self) -> Vec<f64> {
        self.rows.iter().map(|row| row.margin).collect()
    }

    pub fn note(&mut self, text: impl AsRef<str>) {
        if !self.details.is_empty() {
            self.details.push_str("; ");
        }
        self.details.push_str(text.as_ref());
    }

    /// `check,r,value,margin` lines, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,r,value,margin\n");
        for row in &self.rows {
            let check = if row.series.is_empty() { self.name.clone() } else { format!("{}:{}", self.name, row.series) };
            writeln!(out, "{},{:e},{:e},{:e}", check, row.r, row.value, row.margin).unwrap();
        }
        out
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `max - min` of the values.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        0.0
    } else {
        max - min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        assert!((least_squares_slope(&xs, &ys) - 2.5).abs() < 1e-12);
        assert_eq!(spread(&[1.0, 4.0, -2.0]), 6.0);
    }

    #[test]
    fn csv_layout() {
        let mut r = CheckReport::new("fmt");
        r.push("Q1", 2.0, 0.5, -0.25);
        r.push("", 4.0, 1.0, 0.0);
        assert_eq!(r.to_csv(), "check,r,value,margin\nfmt:Q1,2e0,5e-1,-2.5e-1\nfmt,4e0,1e0,0e0\n");
    }
}
