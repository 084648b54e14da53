//! Pass/fail records shared by the recipe, moment and CLI layers.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassPolicy {
    /// abs_err ≤ tol or rel_err ≤ tol
    Either,
    Absolute,
    Relative,
    /// |lhs| ≤ |rhs| (inequalities); errors are reported, not tested
    UpperBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub check_name: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub metadata: BTreeMap<String, String>,
}

impl MomentReport {
    pub fn compare(name: impl Into<String>, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        Self::with_policy(name, lhs, rhs, tolerance, PassPolicy::Either)
    }

    pub fn with_policy(
        name: impl Into<String>,
        lhs: Complex64,
        rhs: Complex64,
        tolerance: f64,
        policy: PassPolicy,
    ) -> Self {
        let abs_err = (lhs - rhs).norm();
        let rel_err = if rhs.norm() > 0.0 {
            abs_err / rhs.norm()
        } else {
            abs_err
        };
        let pass = match policy {
            PassPolicy::Either => abs_err <= tolerance || rel_err <= tolerance,
            PassPolicy::Absolute => abs_err <= tolerance,
            PassPolicy::Relative => rel_err <= tolerance,
            PassPolicy::UpperBound => lhs.norm() <= rhs.norm() * (1.0 + tolerance),
        };
        let pass = pass && lhs.re.is_finite() && lhs.im.is_finite();
        let mut metadata = BTreeMap::new();
        metadata.insert("policy".to_string(), format!("{policy:?}").to_lowercase());
        MomentReport {
            check_name: name.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            tolerance,
            pass,
            metadata,
        }
    }

    pub fn note(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    /// Marks the check failed with a reason, keeping the numbers.
    pub fn fail(mut self, reason: impl ToString) -> Self {
        self.pass = false;
        self.metadata.insert("failure".into(), reason.to_string());
        self
    }
}
