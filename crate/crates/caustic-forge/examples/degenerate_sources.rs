//! Sources where the caustic collapses to a point.
//!
//! Two classical degeneracies, caught by the concurrency detector instead of
//! the cusp machinery:
//!
//! * source at a focus of an ellipse — every once-reflected ray passes
//!   through the other focus, so the first caustic is that point and the
//!   fronts are circles around it;
//! * source at the centre of a circle — every reflected ray runs straight
//!   back through the centre; fronts are concentric circles with constant
//!   curvature and no isolated vertices at all.
//!
//! Reports land in `target/out/degenerate_sources/{focus,center}/`.

use std::path::PathBuf;

use caustic_forge::beam::{BeamSource, RaySystem};
use caustic_forge::billiard::ReflectionLaw;
use caustic_forge::caustic::{envelope, normal_front, vertex_census};
use caustic_forge::oval::OvalFamily;
use caustic_forge::scenario::{Runner, Scenario};
use caustic_forge::{Oval, Result, Vec2};

fn main() -> Result<()> {
    let out_root =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/out/degenerate_sources");

    // Ellipse x²/1 + y²/0.75 = 1 has foci (±0.5, 0).
    let b = 0.75_f64.sqrt();
    let oval = Oval::build(OvalFamily::Ellipse { a: 1.0, b }, Vec2::new(0.5, 0.0))?;
    let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point)?;
    let beam = sys.beam(1, 1024)?;
    let caustic = envelope(&sys, &beam)?;
    match caustic.degenerate {
        Some(pt) => {
            let gap = pt.dist(Vec2::new(-0.5, 0.0));
            println!("focal source: first caustic degenerates to ({:+.6}, {:+.6})", pt.x, pt.y);
            println!("  distance from the other focus: {gap:.2e}");
            assert!(gap < 1e-7, "degenerate caustic missed the focus");
        }
        None => panic!("focal caustic failed to degenerate"),
    }
    let front = normal_front(&sys, 1, 0.4, 2048)?;
    let census = vertex_census(&front);
    println!(
        "  front at z₀ = 0.4: constant curvature = {} (circles about the focus)",
        census.constant_curvature,
    );

    // The same pair of runs through the reporting pipeline, for the files.
    let focus: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.0, "b": b },
        "source": [0.5, 0.0],
        "n_list": [1],
        "front": { "z0_list": [0.4, 0.8] },
    }))?;
    let runner = Runner::new(focus, &out_root.join("focus"))?;
    runner.run_caustic()?;
    runner.run_front()?;

    let center: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.0, "b": 1.0 },
        "source": [0.0, 0.0],
        "n_list": [1, 2],
        "front": { "z0_list": [0.3] },
    }))?;
    let runner_c = Runner::new(center, &out_root.join("center"))?;
    let reports = runner_c.run_caustic()?;
    for r in &reports {
        match r.degenerate {
            Some([x, y]) => println!(
                "central source, n = {}: caustic is the point ({x:+.1e}, {y:+.1e})",
                r.n,
            ),
            None => println!("central source, n = {}: unexpectedly non-degenerate", r.n),
        }
    }
    println!("files in {}", out_root.display());
    Ok(())
}
