//! Library surface behind the `tm` binary: exports, trace persistence,
//! table rendering, diagnostic output, and the batch runner.

pub mod export;
pub mod table;
pub mod trace_io;

use tm_core::diag::{Diagnostic, Severity};
use tm_core::dsl::ScenarioScript;
use tm_core::dynamics::{LiftError, Trace};
use tm_core::StaticModel;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Colored diagnostics are opt-in via `TM_COLOR=1`; `TM_COLOR=0` and an
/// unset variable both render plain text.
pub fn color_enabled() -> bool {
    std::env::var("TM_COLOR").ok().as_deref() == Some("1")
}

pub fn render_diagnostic(diagnostic: &Diagnostic, color: bool) -> String {
    if !color {
        return diagnostic.to_string();
    }
    let (tint, kind) = match diagnostic.severity {
        Severity::Error => ("\x1b[1;31m", "error"),
        Severity::Warning => ("\x1b[1;33m", "warning"),
    };
    format!(
        "{tint}{kind}[{}]\x1b[0m: {}\n  --> {}",
        diagnostic.code, diagnostic.message, diagnostic.span
    )
}

/// Runs several scenarios over one frozen model. With the `parallel`
/// feature the runs execute on the rayon pool; results come back in
/// input order either way.
pub fn run_batch(
    model: &StaticModel,
    scripts: &[ScenarioScript],
) -> Vec<Result<Trace, LiftError>> {
    #[cfg(feature = "parallel")]
    {
        scripts
            .par_iter()
            .map(|s| tm_core::run_scenario(model, s))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        scripts
            .iter()
            .map(|s| tm_core::run_scenario(model, s))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tm_core::{parse_model, parse_scenario};

    #[test]
    fn batch_results_follow_input_order() {
        let src = "thimac A { action create }\nevent E1 \"a\" { A.create }\n";
        let model = parse_model(src, "m.tm").unwrap();
        let scripts: Vec<_> = (1..=8)
            .map(|i| {
                parse_scenario(
                    &format!("slots 9\nat {i} actualize E1\n"),
                    &model,
                    &format!("s{i}.tms"),
                    None,
                )
                .unwrap()
            })
            .collect();
        let traces = run_batch(&model, &scripts);
        assert_eq!(traces.len(), 8);
        for (i, t) in traces.iter().enumerate() {
            assert_eq!(t.as_ref().unwrap().scenario, format!("s{}", i + 1));
        }
    }
}
