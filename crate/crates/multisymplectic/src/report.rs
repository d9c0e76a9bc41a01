//! Structured check results.

use serde::Serialize;

/// Outcome of one named check: pass/fail plus numeric witnesses.
///
/// Serialization is deterministic for fixed inputs, seed, and tolerances;
/// wall-clock time is therefore kept out of the JSON shape and only carried
/// for text rendering.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    pub args: String,
    pub pass: bool,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

impl Verdict {
    pub fn new(
        check: impl Into<String>,
        args: impl Into<String>,
        pass: bool,
        residual: f64,
    ) -> Self {
        Verdict {
            check: check.into(),
            args: args.into(),
            pass,
            max_residual: residual,
            witness: None,
            elapsed_ms: 0.0,
        }
    }

    pub fn with_witness(mut self, witness: serde_json::Value) -> Self {
        self.witness = Some(witness);
        self
    }
}

/// Render a verdict list as aligned text lines.
pub fn render_text(verdicts: &[Verdict]) -> String {
    let mut out = String::new();
    for v in verdicts {
        let status = if v.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{status}  {:<40} residual {:<12.3e} ({:.1} ms)",
            format!("{} {}", v.check, v.args).trim(),
            v.max_residual,
            v.elapsed_ms
        ));
        if let Some(w) = &v.witness {
            out.push_str(&format!("  witness {w}"));
        }
        out.push('\n');
    }
    out
}
