//! Verification reports.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::format::render_coeff;
use crate::qring::{QExp, QSeries};

/// Wall-clock timer for `runtime_ms`. Reads zero on wasm32, which has no clock.
pub(crate) struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Stopwatch {
    pub(crate) fn start() -> Stopwatch {
        Stopwatch(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    pub(crate) fn millis(&self) -> u64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_millis() as u64;
        #[cfg(target_arch = "wasm32")]
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    FirstDifference,
    Error,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equal => "Equal",
            Verdict::FirstDifference => "FirstDifference",
            Verdict::Error => "Error",
        })
    }
}

/// Where two sides first disagree. `exponent` is absent for comparisons of
/// exact values such as cyclotomic residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub check: String,
    pub exponent: Option<QExp>,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub identity_name: String,
    pub params: BTreeMap<String, String>,
    pub order: QExp,
    pub verdict: Verdict,
    pub difference: Option<Mismatch>,
    pub message: Option<String>,
    /// Number of individual side pairs compared.
    pub checks: usize,
    pub runtime_ms: u64,
}

impl IdentityReport {
    pub fn new(name: &str, params: BTreeMap<String, String>, order: QExp) -> IdentityReport {
        IdentityReport {
            identity_name: name.to_string(),
            params,
            order,
            verdict: Verdict::Equal,
            difference: None,
            message: None,
            checks: 0,
            runtime_ms: 0,
        }
    }

    pub fn is_equal(&self) -> bool {
        self.verdict == Verdict::Equal
    }

    /// Compares two sides below `order`; records the first mismatch only.
    /// Either side being exact to less than `order` is itself a mismatch.
    pub fn compare(&mut self, label: &str, left: &QSeries, right: &QSeries) {
        self.compare_below(label, left, right, self.order);
    }

    /// Same as [`compare`](Self::compare) with an explicit cut.
    pub fn compare_below(&mut self, label: &str, left: &QSeries, right: &QSeries, order: QExp) {
        self.checks += 1;
        if self.verdict != Verdict::Equal {
            return;
        }
        let cut = left.order().min(right.order());
        if cut < order {
            self.verdict = Verdict::Error;
            self.message = Some(format!("{label}: sides only exact below q^{cut}, requested q^{order}"));
            return;
        }
        let l = left.truncated(order);
        let r = right.truncated(order);
        if let Some(d) = l.first_difference(&r) {
            self.verdict = Verdict::FirstDifference;
            self.difference = Some(Mismatch {
                check: label.to_string(),
                exponent: Some(d.exponent),
                left: render_coeff(&d.left.0, &d.left.1),
                right: render_coeff(&d.right.0, &d.right.1),
            });
        }
    }

    /// Records an exact comparison of two rendered values.
    pub fn compare_values(&mut self, label: &str, left: String, right: String) {
        self.checks += 1;
        if self.verdict == Verdict::Equal && left != right {
            self.verdict = Verdict::FirstDifference;
            self.difference = Some(Mismatch { check: label.to_string(), exponent: None, left, right });
        }
    }

    pub fn fail(&mut self, message: String) {
        self.verdict = Verdict::Error;
        self.message = Some(message);
    }

    pub fn to_json(&self) -> Value {
        let params: serde_json::Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let difference = match &self.difference {
            None => Value::Null,
            Some(d) => json!({
                "check": d.check,
                "q": d.exponent.map(|e| e.to_string()),
                "left": d.left,
                "right": d.right,
            }),
        };
        json!({
            "identity": self.identity_name,
            "params": Value::Object(params),
            "order": self.order.to_string(),
            "verdict": self.verdict.to_string(),
            "checks": self.checks,
            "difference": difference,
            "message": self.message,
            "runtime_ms": self.runtime_ms,
        })
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{} [{}] order q^{}: {} ({} checks)", self.identity_name, params.join(" "), self.order, self.verdict, self.checks)?;
        if let Some(d) = &self.difference {
            match d.exponent {
                Some(e) => write!(f, "\n  {}: first difference at q^{e}: left {} right {}", d.check, d.left, d.right)?,
                None => write!(f, "\n  {}: left {} right {}", d.check, d.left, d.right)?,
            }
        }
        if let Some(m) = &self.message {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}
