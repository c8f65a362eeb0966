//! Structured `key = value` reports shared by the library checks and the CLI.

use std::fmt::Write as _;

/// Outcome of one inequality or identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub id: String,
    /// Short neutral identifier of the checked relation.
    pub tag: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Smallest (normalized) margin; nonnegative means satisfied.
    pub min_margin: f64,
    pub mean_margin: f64,
    pub tolerance: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub passed: bool,
    pub extras: Vec<(String, f64)>,
}

impl BoundReport {
    /// Pass iff every normalized margin is at least `-tolerance`.
    pub fn from_margins(id: &str, tag: &str, margins: &[f64], tolerance: f64, skipped: usize) -> Self {
        let (min, mean) = if margins.is_empty() {
            (0.0, 0.0)
        } else {
            let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
            (min, crate::fields::pairwise_sum(margins) / margins.len() as f64)
        };
        let finite = margins.iter().all(|m| m.is_finite());
        BoundReport {
            id: id.into(),
            tag: tag.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            min_margin: min,
            mean_margin: mean,
            tolerance,
            evaluated: margins.len(),
            skipped,
            passed: finite && min >= -tolerance,
            extras: Vec::new(),
        }
    }

    /// Single inequality `lhs <= rhs`, margin normalized by `scale`.
    pub fn inequality(id: &str, tag: &str, lhs: f64, rhs: f64, tolerance: f64, scale: f64) -> Self {
        let margin = (rhs - lhs) / scale.abs().max(f64::MIN_POSITIVE);
        BoundReport {
            id: id.into(),
            tag: tag.into(),
            lhs,
            rhs,
            min_margin: margin,
            mean_margin: margin,
            tolerance,
            evaluated: 1,
            skipped: 0,
            passed: margin.is_finite() && margin >= -tolerance,
            extras: Vec::new(),
        }
    }

    /// Identity `lhs == rhs` up to relative error `tolerance` (scale-normalized).
    pub fn identity(id: &str, tag: &str, lhs: f64, rhs: f64, tolerance: f64, scale: f64) -> Self {
        let err = (lhs - rhs).abs() / scale.abs().max(f64::MIN_POSITIVE);
        BoundReport {
            id: id.into(),
            tag: tag.into(),
            lhs,
            rhs,
            min_margin: -err,
            mean_margin: -err,
            tolerance,
            evaluated: 1,
            skipped: 0,
            passed: err.is_finite() && err <= tolerance,
            extras: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.extras.push((key.into(), value));
        self
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[check {}]", self.id);
        let _ = writeln!(s, "tag = {}", self.tag);
        let _ = writeln!(s, "lhs = {:.12e}", self.lhs);
        let _ = writeln!(s, "rhs = {:.12e}", self.rhs);
        let _ = writeln!(s, "min_margin = {:.6e}", self.min_margin);
        let _ = writeln!(s, "mean_margin = {:.6e}", self.mean_margin);
        let _ = writeln!(s, "tolerance = {:.3e}", self.tolerance);
        let _ = writeln!(s, "evaluated = {}", self.evaluated);
        let _ = writeln!(s, "skipped = {}", self.skipped);
        for (k, v) in &self.extras {
            let _ = writeln!(s, "{k} = {v:.12e}");
        }
        let _ = writeln!(s, "pass = {}", self.passed);
        s
    }
}

/// Ordered collection of sections written as `[section]` blocks of `key = value` lines.
#[derive(Clone, Debug, Default)]
pub struct Document {
    sections: Vec<(String, Vec<(String, String)>)>,
    checks: Vec<BoundReport>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, name: &str) -> &mut Vec<(String, String)> {
        self.sections.push((name.into(), Vec::new()));
        &mut self.sections.last_mut().expect("just pushed").1
    }

    pub fn push(&mut self, section: &str, key: &str, value: impl ToString) {
        match self.sections.iter_mut().find(|(n, _)| n == section) {
            Some((_, kv)) => kv.push((key.into(), value.to_string())),
            None => self.section(section).push((key.into(), value.to_string())),
        }
    }

    pub fn check(&mut self, report: BoundReport) {
        self.checks.push(report);
    }

    pub fn checks(&self) -> &[BoundReport] {
        &self.checks
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, kv) in &self.sections {
            let _ = writeln!(s, "[{name}]");
            for (k, v) in kv {
                let _ = writeln!(s, "{k} = {v}");
            }
            s.push('\n');
        }
        for c in &self.checks {
            s.push_str(&c.to_text());
            s.push('\n');
        }
        let _ = writeln!(s, "[summary]");
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "checks = {}", self.checks.len());
        let _ = writeln!(s, "failed = {failed}");
        let _ = writeln!(s, "pass = {}", failed == 0);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_decide_pass() {
        let r = BoundReport::from_margins("a", "t", &[0.1, -1e-12, 0.3], 1e-10, 2);
        assert!(r.passed);
        assert_eq!(r.skipped, 2);
        let r = BoundReport::from_margins("a", "t", &[0.1, -1e-9], 1e-10, 0);
        assert!(!r.passed);
        let r = BoundReport::from_margins("a", "t", &[f64::NAN], 1e-10, 0);
        assert!(!r.passed);
    }

    #[test]
    fn document_summary() {
        let mut d = Document::new();
        d.push("job", "seed", 7);
        d.check(BoundReport::inequality("x", "t", 1.0, 2.0, 0.0, 1.0));
        let text = d.to_text();
        assert!(text.contains("seed = 7"));
        assert!(text.contains("pass = true"));
        assert!(d.all_passed());
    }
}
