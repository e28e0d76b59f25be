use std::fmt;

use serde::Serialize;
use smtlab_core::family::{
    check_subgeneral_position, smt_coefficient, subgeneral_coefficient, uniqueness_thresholds, FamilyError,
};

use crate::scenario::Scenario;

/// Side-by-side coefficients of the distributive-constant bound and the
/// subgeneral-position bound, plus both uniqueness thresholds.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsTable {
    pub q: usize,
    pub k: usize,
    pub d: u32,
    pub hilbert: usize,
    pub truncation: usize,
    pub delta: String,
    /// `q − Δ(M+1)`.
    pub distributive: String,
    pub subgeneral_n: Option<usize>,
    /// Whether the family really is in `N`-subgeneral position; `None` without `N`.
    pub subgeneral_holds: Option<bool>,
    /// `q − (2N−k+1)H/(k+1)`, only with `N`.
    pub subgeneral: Option<String>,
    pub threshold_a: String,
    pub threshold_b: String,
}

pub fn compare_bounds(scenario: &Scenario) -> Result<BoundsTable, FamilyError> {
    let inst = &scenario.instance;
    let variety = &scenario.variety;
    let k = variety.dim().finite().ok_or(FamilyError::EmptyVariety)?;
    let d = inst.d();
    let hilbert = variety.hilbert_function(d);
    let delta = &inst.delta.value;
    let q = inst.q();
    let thresholds = uniqueness_thresholds(variety, &inst.family, delta)?;
    let n = scenario.file.hypersurfaces.subgeneral;
    let holds = match n {
        Some(n) => Some(check_subgeneral_position(&inst.family, variety, n)?.is_ok()),
        None => None,
    };
    Ok(BoundsTable {
        q,
        k,
        d,
        hilbert,
        truncation: hilbert - 1,
        delta: delta.to_string(),
        distributive: smt_coefficient(q, delta, hilbert).to_string(),
        subgeneral_n: n,
        subgeneral_holds: holds,
        subgeneral: n.map(|n| subgeneral_coefficient(q, n, k, hilbert).to_string()),
        threshold_a: thresholds.a.to_string(),
        threshold_b: thresholds.b.to_string(),
    })
}

/// `a/b` with a decimal approximation appended; integers unchanged.
fn approx(s: &str) -> String {
    let ratio = s.split_once('/').and_then(|(a, b)| Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?));
    match ratio {
        Some(v) => format!("{s} (≈ {v:.4})"),
        None => s.to_string(),
    }
}

impl fmt::Display for BoundsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q                         {}", self.q)?;
        writeln!(f, "dim V (k)                 {}", self.k)?;
        writeln!(f, "common degree d           {}", self.d)?;
        writeln!(f, "H_V(d)                    {}", self.hilbert)?;
        writeln!(f, "truncation M              {}", self.truncation)?;
        writeln!(f, "distributive constant     {}", approx(&self.delta))?;
        writeln!(f, "q - Delta(M+1)            {}", approx(&self.distributive))?;
        match (&self.subgeneral_n, &self.subgeneral) {
            (Some(n), Some(c)) => {
                let holds = if self.subgeneral_holds == Some(true) { "holds" } else { "VIOLATED" };
                writeln!(f, "subgeneral position N     {n} ({holds})")?;
                writeln!(f, "q - (2N-k+1)H/(k+1)       {}", approx(c))?;
            }
            _ => writeln!(f, "subgeneral position N     (not given)")?,
        }
        writeln!(f, "uniqueness threshold (a)  {}", approx(&self.threshold_a))?;
        write!(f, "uniqueness threshold (b)  {}", approx(&self.threshold_b))
    }
}
