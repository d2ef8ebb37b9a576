//! Caustics by reflection in a circular mirror with the source off centre.
//!
//! The light of a point source at (0.5, 0) reflects off the unit circle; the
//! envelope of the rays after one, two and three reflections is the caustic
//! of that generation.  Each one carries exactly four cusps.  The first
//! generation is the classic coffee-cup picture with a twist: its fourth
//! cusp lies at infinity — the envelope's two arms run off along the axis of
//! symmetry, so the curve is unbounded even though every ray stays inside
//! the disk.
//!
//! Writes CSV curves, JSON cusp reports and an overview figure into
//! `target/out/circle_caustics/`.

use std::path::PathBuf;

use caustic_forge::scenario::{Runner, Scenario};
use caustic_forge::Result;

fn main() -> Result<()> {
    let scenario: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.0, "b": 1.0 },
        "source": [0.5, 0.0],
        "n_list": [1, 2, 3],
    }))?;
    let out = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/out/circle_caustics");
    let runner = Runner::new(scenario, &out)?;
    let reports = runner.run_caustic()?;

    println!("circle mirror, source at (0.5, 0):");
    for r in &reports {
        let finite = r.cusp_points.iter().filter(|p| p.is_some()).count();
        println!(
            "  n = {}: {} cusps ({} finite{}), {} arcs, |oriented area of the beam| = {:.2e}",
            r.n,
            r.cusps,
            finite,
            if r.at_infinity { ", envelope passes through infinity" } else { "" },
            r.arcs,
            r.signed_area.abs(),
        );
        for (s, pt) in r.cusp_parameters.iter().zip(&r.cusp_points) {
            match pt {
                Some([x, y]) => println!("      cusp at s = {s:.4}: ({x:+.4}, {y:+.4})"),
                None => println!("      cusp at s = {s:.4}: at infinity"),
            }
        }
    }
    println!("files in {}", out.display());
    Ok(())
}
