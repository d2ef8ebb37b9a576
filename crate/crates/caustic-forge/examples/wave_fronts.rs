//! Wave fronts of a reflected beam, and the front/caustic duality.
//!
//! Sliding every point of a beam a fixed distance z₀ along its ray sweeps a
//! wave front.  Fronts of one beam at different distances are equidistant
//! along the shared normals, and each front's vertex count (local extrema of
//! curvature) equals the cusp count of the caustic — the caustic is the
//! locus the fronts wrinkle around.
//!
//! This example builds fronts at two offsets for the first three reflection
//! generations of an elliptic mirror, cross-checks vertices against cusps,
//! and verifies equidistance.  Curves, reports and a figure land in
//! `target/out/wave_fronts/`.

use std::path::PathBuf;

use caustic_forge::scenario::{Runner, Scenario};
use caustic_forge::Result;

fn main() -> Result<()> {
    let scenario: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.118033988749895, "b": 1.0 },
        "source": [0.6, 0.2],
        "n_list": [1, 2, 3],
        "front": { "z0_list": [0.3, 0.5] },
    }))?;
    let out = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/out/wave_fronts");
    let runner = Runner::new(scenario, &out)?;
    let report = runner.run_front()?;

    for g in &report.generations {
        println!("generation n = {}: caustic has {} cusps", g.n, g.cusps);
        for f in &g.fronts {
            let verdict = match f.matches_cusps {
                Some(true) => "matches the cusp count",
                Some(false) => "MISMATCH",
                None => "no isolated vertices to count",
            };
            println!(
                "  front at z₀ = {}: {} vertices, closure gap {:.1e} — {verdict}",
                f.z0, f.vertices, f.closure_gap,
            );
        }
        for e in &g.equidistance {
            println!(
                "  fronts at z₀ = {} and {}: normal distance off by {:.2e} — {}",
                e.z0_pair[0],
                e.z0_pair[1],
                e.defect,
                if e.pass { "equidistant" } else { "NOT equidistant" },
            );
        }
    }
    println!("files in {}", out.display());
    Ok(())
}
