// Temporary diagnostic probe; deleted before release.
use caustic_forge::beam::{BeamSource, RaySystem};
use caustic_forge::billiard::{self, ReflectionLaw};
use caustic_forge::caustic::envelope;
use caustic_forge::geom::{Vec2, TAU};
use caustic_forge::oval::{Oval, OvalFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
#[ignore]
fn probe_fuzz_scenario() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_97A7);
    let mut done = 0usize;
    let mut attempts = 0usize;
    loop {
        attempts += 1;
        assert!(attempts < 100, "did not reach the target scenario");
        let family = match rng.gen_range(0..3u32) {
            0 => OvalFamily::Ellipse { a: 0.8 + 0.8 * rng.gen::<f64>(), b: 1.0 },
            1 => OvalFamily::SuperEllipse4 { a: 0.9 + 0.5 * rng.gen::<f64>(), b: 1.0 },
            _ => OvalFamily::PerturbedEllipse {
                c0: 0.35 + 0.3 * rng.gen::<f64>(),
                c1: 0.28 * rng.gen::<f64>(),
            },
        };
        let t = rng.gen::<f64>() * TAU;
        let f = 0.7 * rng.gen::<f64>();
        let n = rng.gen_range(1..=6usize);
        let probe = match Oval::build(family.clone(), Vec2::ZERO) {
            Ok(o) => o,
            Err(e) => {
                println!("attempt {attempts}: probe build failed: {e}");
                continue;
            }
        };
        let src = f * probe.point(t);
        let oval = match Oval::build(family.clone(), src) {
            Ok(o) => o,
            Err(e) => {
                println!("attempt {attempts}: build failed: {e}");
                continue;
            }
        };
        let sys = match RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point) {
            Ok(s) => s,
            Err(e) => {
                println!("attempt {attempts}: system failed: {e}");
                continue;
            }
        };
        let beam = sys.beam(n, 1024).expect("beam");
        let env = envelope(&sys, &beam).expect("envelope");
        done += 1;
        println!(
            "attempt {attempts} -> scenario {done}: {family:?} src=({:.6},{:.6}) |src|={:.4} f={f:.4} n={n} degenerate={:?} cusps={}",
            src.x,
            src.y,
            src.norm(),
            env.degenerate.is_some(),
            env.cusp_count()
        );
        if done == 2 {
            // Dump the beam for inspection.
            let mut csv = String::from("s,alpha,p\n");
            for i in 0..beam.curve.s.len() {
                csv.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e}\n",
                    beam.curve.s[i], beam.curve.alpha[i], beam.curve.p[i]
                ));
            }
            std::fs::write("/root/crate/target/probe_fuzz.csv", csv).unwrap();
            println!(
                "dumped beam: m={} at_infinity={} arcs={} finite_cusps={}",
                beam.curve.s.len(),
                env.passes_infinity,
                env.arcs().len(),
                env.cusps.iter().filter(|c| c.point.is_some()).count()
            );
            // distance from source to boundary (inradius about source)
            println!(
                "inradius about src = {:.6}, circumradius = {:.6}",
                oval.inradius_about_source(),
                oval.circumradius_about_source()
            );
            // cusp parameter histogram: print first 30 cusp s values
            for (k, c) in env.cusps.iter().enumerate().take(30) {
                println!("  cusp {k}: s={:.9} finite={}", c.s, c.point.is_some());
            }
            break;
        }
    }
}

#[test]
#[ignore]
fn probe_jacobian_points() {
    let tables = [
        ("circle", OvalFamily::Ellipse { a: 1.0, b: 1.0 }, Vec2::new(0.5, 0.0)),
        (
            "ellipse",
            OvalFamily::Ellipse { a: 1.25_f64.sqrt(), b: 1.0 },
            Vec2::new(0.6, 0.2),
        ),
        ("quartic", OvalFamily::SuperEllipse4 { a: 1.0, b: 1.0 }, Vec2::new(0.6, 0.4)),
        (
            "perturbed",
            OvalFamily::PerturbedEllipse { c0: 0.5, c1: 0.25 },
            Vec2::new(0.5, 0.3),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x57A7_C4EC);
    for (label, family, src) in tables {
        let oval = Oval::build(family, src).unwrap();
        let scale = oval.perimeter() / TAU;
        let mut kept = 0usize;
        let mut worst = (0.0_f64, 0.0, 0.0);
        let mut misses = 0usize;
        while kept < 100 {
            let alpha = rng.gen::<f64>() * TAU;
            let p = (rng.gen::<f64>() - 0.5) * scale;
            match billiard::jacobian_determinant(&oval, &ReflectionLaw::Standard, alpha, p, 1e-5) {
                Ok(det) => {
                    kept += 1;
                    let dev = (det - 1.0).abs();
                    if dev > worst.0 {
                        worst = (dev, alpha, p);
                    }
                }
                Err(_) => {
                    misses += 1;
                    continue;
                }
            }
        }
        let (dev, alpha, p) = worst;
        let chord = billiard::chord_of(&oval, alpha, p);
        match chord {
            Ok(ch) => println!(
                "{label}: worst |det-1|={dev:.3e} at alpha={alpha:.6} p={p:.6} (misses={misses}); phi_entry={:.4e} phi_exit={:.4e}",
                ch.phi_entry, ch.phi_exit
            ),
            Err(e) => println!(
                "{label}: worst |det-1|={dev:.3e} at alpha={alpha:.6} p={p:.6} (misses={misses}); chord now errs: {e}"
            ),
        }
        // Consume the generating draws so the next table sees the same
        // stream as the acceptance test.
        for _ in 0..100 {
            let _ = rng.gen::<f64>();
            let _ = rng.gen::<f64>();
        }
    }
}
