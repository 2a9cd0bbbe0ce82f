use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
}

/// Outcome of one check. A failing report always carries a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub status: Status,
    pub residual: f64,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl Report {
    pub fn pass(check: impl Into<String>, residual: f64, seed: Option<u64>) -> Self {
        Report {
            check: check.into(),
            status: Status::Pass,
            residual,
            seed,
            witness: None,
        }
    }

    pub fn fail(
        check: impl Into<String>,
        residual: f64,
        seed: Option<u64>,
        witness: impl Into<String>,
    ) -> Self {
        Report {
            check: check.into(),
            status: Status::Fail,
            residual,
            seed,
            witness: Some(witness.into()),
        }
    }

    pub fn vacuous(check: impl Into<String>, seed: Option<u64>, note: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            status: Status::Vacuous,
            residual: 0.0,
            seed,
            witness: Some(note.into()),
        }
    }

    /// Folds per-sample `(residual, witness)` pairs: passes when the maximum
    /// residual is within `tol`, otherwise reports the first offending sample.
    pub fn from_samples(
        check: impl Into<String>,
        samples: Vec<(f64, Option<String>)>,
        tol: f64,
        seed: Option<u64>,
    ) -> Self {
        let max = samples
            .iter()
            .map(|(r, _)| if r.is_nan() { f64::INFINITY } else { *r })
            .fold(0.0, f64::max);
        if max <= tol {
            return Report::pass(check, max, seed);
        }
        let witness = samples
            .into_iter()
            .enumerate()
            .find(|(_, (r, _))| !(*r <= tol))
            .map(|(k, (r, w))| match w {
                Some(w) => format!("sample {k}: residual {r:e}; {w}"),
                None => format!("sample {k}: residual {r:e}"),
            })
            .unwrap_or_default();
        Report::fail(check, max, seed, witness)
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

pub fn all_pass(reports: &[Report]) -> bool {
    reports.iter().all(Report::passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_samples_carry_witness() {
        let r = Report::from_samples(
            "x",
            vec![(0.0, None), (1.0, Some("bad".into())), (2.0, None)],
            0.5,
            Some(1),
        );
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.residual, 2.0);
        assert!(r.witness.unwrap().starts_with("sample 1"));
    }

    #[test]
    fn nan_residual_fails() {
        let r = Report::from_samples("x", vec![(f64::NAN, None)], 1.0, None);
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn json_keys() {
        let r = Report::pass("fell.9", 1e-16, Some(42));
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["seed"], 42);
        assert!(v.get("witness").is_none());
    }
}
