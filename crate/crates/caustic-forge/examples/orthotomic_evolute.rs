//! The orthotomic detour: caustics as evolutes.
//!
//! Reflecting the source in every tangent line of the mirror traces the
//! orthotomic curve.  The reflected rays are exactly the normals of the
//! orthotomic, so the first caustic is its evolute — a second, completely
//! independent pipeline to the same curve.  For a circular mirror the
//! orthotomic is the limaçon Z(t) = 2(1 − d·cos t)(cos t, sin t), and the
//! evolute pipeline must land on the ray-envelope pipeline to within
//! discretisation error.
//!
//! The duality also exchanges differential features: curvature extrema
//! (vertices) of the orthotomic sit in bijection with the cusps of the
//! caustic, including the one at infinity.

use caustic_forge::beam::{BeamSource, RaySystem};
use caustic_forge::billiard::ReflectionLaw;
use caustic_forge::caustic::{envelope_dense_refined, hausdorff_between, orthotomic};
use caustic_forge::oval::OvalFamily;
use caustic_forge::{Oval, Result, Vec2};

fn main() -> Result<()> {
    let oval = Oval::build(OvalFamily::Ellipse { a: 1.0, b: 1.0 }, Vec2::new(0.5, 0.0))?;
    let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point)?;
    let m = 16384;

    let orth = orthotomic(&oval, m);
    let dual = orth.evolute(oval.source())?;
    let direct = envelope_dense_refined(&sys, 1, m)?;

    println!("circle mirror, source (0.5, 0):");
    println!("  envelope pipeline:  {} cusps", direct.cusp_count());
    println!("  orthotomic evolute: {} cusps", dual.cusp_count());
    assert_eq!(dual.cusp_count(), direct.cusp_count());

    // The first caustic runs off to infinity along the axis, so the
    // comparison clips to the desk: only sample points within twice the
    // mirror's circumradius about the source enter the distance.
    let clip = 2.0 * oval.circumradius_about_source();
    let d = hausdorff_between(&dual, &direct, oval.source(), clip);
    println!("  Hausdorff distance on the bounded arcs (clip {clip}): {d:.2e}");
    assert!(d < 1e-6, "pipelines disagree beyond discretisation error: {d:.2e}");

    let census = orth.vertex_census(&oval);
    println!(
        "  orthotomic vertices: {} at t = {:?}",
        census.count,
        census.locations.iter().map(|t| (t * 1e4).round() / 1e4).collect::<Vec<_>>(),
    );
    assert_eq!(census.count, direct.cusp_count(), "vertices must match cusps");
    println!("the two pipelines agree; the duality is numerical fact here");
    Ok(())
}
