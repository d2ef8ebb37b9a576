//! The projective reflection law on a circular mirror.
//!
//! The standard law reflects the incident direction across the normal; the
//! projective variant instead asks for the harmonic conjugate of the
//! incident line with respect to the tangent and a transverse direction
//! field — the cross-ratio of the four lines at the impact point is −1.
//! With the normal field it IS the standard law; swapping in another
//! transverse field (here the gradient of x⁴ + y⁴) keeps the billiard
//! projectively honest but completely reshapes the caustics: the circle with
//! a central source, whose standard caustic degenerates to a point, now
//! shows an eight-cusp first caustic.
//!
//! Reports land in `target/out/projective_circle/{gradient,normal}/`.

use std::path::PathBuf;

use caustic_forge::scenario::{Runner, Scenario};
use caustic_forge::Result;

fn main() -> Result<()> {
    let out_root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/out/projective_circle");

    // Gradient transverse field: ∇(x⁴ + y⁴).
    let gradient: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.0, "b": 1.0 },
        "source": [0.0, 0.0],
        "law": { "projective": { "field": { "gradient": [[4, 0, 1.0], [0, 4, 1.0]] } } },
        "n_list": [1],
    }))?;
    let runner = Runner::new(gradient, &out_root.join("gradient"))?;
    let reports = runner.run_caustic()?;
    println!(
        "projective law, transverse field ∇(x⁴ + y⁴), central source: {} cusps",
        reports[0].cusps,
    );
    let checks = runner.run_check()?;
    for row in checks.checks.iter().filter(|r| r.name.starts_with("harmonic")) {
        println!(
            "  harmonic-quadruple certificate: worst |cross-ratio + 1| = {:.2e}",
            row.value,
        );
    }

    // Normal transverse field: must reproduce the standard law exactly.
    let normal: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.0, "b": 1.0 },
        "source": [0.5, 0.0],
        "law": { "projective": { "field": "normal" } },
        "n_list": [1],
    }))?;
    let runner_n = Runner::new(normal, &out_root.join("normal"))?;
    let rep_n = &runner_n.run_caustic()?[0];

    let standard: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.0, "b": 1.0 },
        "source": [0.5, 0.0],
        "n_list": [1],
    }))?;
    let runner_s = Runner::new(standard, &out_root.join("standard"))?;
    let rep_s = &runner_s.run_caustic()?[0];

    let worst = rep_n
        .cusp_parameters
        .iter()
        .zip(&rep_s.cusp_parameters)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    println!(
        "projective law with the normal field vs standard law: {} vs {} cusps, \
         worst cusp-parameter gap {:.1e}",
        rep_n.cusps, rep_s.cusps, worst,
    );
    println!("files in {}", out_root.display());
    Ok(())
}
