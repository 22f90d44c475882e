//! `check`: the invariant suite as a JSON report; exit 0 iff all pass.

use serde_json::json;

use ptfesh_core::verify::run_invariant_checks;

use crate::config::RunConfig;
use crate::emit::write_json;
use crate::AppError;

pub fn run(cfg: &RunConfig) -> Result<(), AppError> {
    let outcomes = run_invariant_checks(cfg.seed, cfg.custom.as_ref());
    let all_pass = outcomes.iter().all(|o| o.pass);
    let mut checks = serde_json::Map::new();
    for o in &outcomes {
        checks.insert(
            o.name.to_string(),
            json!({
                "pass": o.pass,
                "measured": o.measured,
                "threshold": o.threshold,
                "detail": o.detail,
            }),
        );
    }
    let report = json!({
        "seed": cfg.seed,
        "all_pass": all_pass,
        "checks": checks,
    });
    write_json(&report, cfg.json_out.as_deref())?;
    if all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = outcomes
            .iter()
            .filter(|o| !o.pass)
            .map(|o| o.name)
            .collect();
        Err(AppError::check_failed(format!(
            "failed invariants: {}",
            failed.join(", ")
        )))
    }
}
