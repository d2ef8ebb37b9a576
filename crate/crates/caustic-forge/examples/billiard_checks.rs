//! The machine-check battery for a reflection law.
//!
//! Four independent invariants hold for the genuine billiard reflection and
//! are cheap to verify numerically:
//!
//! * exactness — every beam keeps ∮ p dα = 0;
//! * symplectic Jacobian — the reflection map has Jacobian determinant 1 in
//!   the (α, p) chart;
//! * generating function — the chord length generates the map: partial
//!   derivatives of |B(t) − B(t′)| reproduce the tangential momenta;
//! * Crofton length — integrating the number of boundary hits over all lines
//!   recovers the perimeter.
//!
//! A deliberately broken law (reflection followed by a unit shear p ↦ p + 1)
//! is run through the same battery: it is still area preserving, so the
//! Jacobian test stays quiet, but exactness fails by exactly 2π per loop —
//! the invariant that catches it.  Reports land in
//! `target/out/billiard_checks/{standard,sheared}/`.

use std::f64::consts::TAU;
use std::path::PathBuf;

use caustic_forge::scenario::{CheckReport, Runner, Scenario};
use caustic_forge::Result;

fn run(label: &str, scenario: Scenario) -> Result<CheckReport> {
    let out = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../target/out/billiard_checks")
        .join(label);
    let runner = Runner::new(scenario, &out)?;
    let report = runner.run_check()?;
    println!("{label} law:");
    for row in &report.checks {
        let verdict = match row.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        let tol = row.tolerance.map_or(String::new(), |t| format!(" (tol {t:.0e})"));
        println!("  {verdict}  {:28} {:.3e}{tol}", row.name, row.value);
    }
    Ok(report)
}

fn main() -> Result<()> {
    let standard: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.118033988749895, "b": 1.0 },
        "source": [0.6, 0.2],
        "n_list": [1, 2, 3],
    }))?;
    let report = run("standard", standard)?;
    assert!(report.pass, "the genuine reflection law must pass the battery");

    let sheared: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.118033988749895, "b": 1.0 },
        "source": [0.6, 0.2],
        "law": "shear_control",
        "n_list": [1],
    }))?;
    let report = run("sheared", sheared)?;
    let defect = report
        .checks
        .iter()
        .find(|r| r.name.starts_with("shear_defect"))
        .expect("shear control reports its defect");
    println!(
        "sheared law: ∮ p dα lands on 2π ≈ {TAU:.9} instead of 0; |∮ p dα − 2π| = {:.2e}",
        defect.value,
    );
    Ok(())
}
