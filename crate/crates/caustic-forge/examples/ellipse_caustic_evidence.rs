//! Cusp counts across generations of an elliptic mirror.
//!
//! For a point source inside an ellipse the caustic of every reflection
//! generation is observed to carry exactly four cusps — the conjectured
//! sharp lower bound, attained.  This example runs generations 1 through 8
//! for a generic interior source and tabulates the counts; runs where a
//! non-circular mirror under the standard law lands exactly on four cusps
//! are tagged as evidence in the JSON reports.
//!
//! Figures and per-generation reports land in
//! `target/out/ellipse_caustic_evidence/`.

use std::path::PathBuf;

use caustic_forge::scenario::{Runner, Scenario};
use caustic_forge::Result;

fn main() -> Result<()> {
    let scenario: Scenario = serde_json::from_value(serde_json::json!({
        "oval": { "family": "ellipse", "a": 1.118033988749895, "b": 1.0 },
        "source": [0.6, 0.2],
        "n_list": [1, 2, 3, 4, 5, 6, 7, 8],
        "rays": 0,
    }))?;
    let out =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/out/ellipse_caustic_evidence");
    let runner = Runner::new(scenario, &out)?;
    let reports = runner.run_caustic()?;

    println!("ellipse 4x²/5 + y² = 1, source (0.6, 0.2):");
    println!("   n   cusps   at-infinity   evidence");
    for r in &reports {
        println!(
            "  {:2}   {:5}   {:11}   {}",
            r.n,
            r.cusps,
            if r.at_infinity { "yes" } else { "no" },
            if r.conjecture_evidence { "four-cusp run" } else { "-" },
        );
    }
    let all_four = reports.iter().all(|r| r.cusps == 4);
    println!(
        "result: {} generations, {}",
        reports.len(),
        if all_four { "every caustic has exactly four cusps" } else { "counts vary" },
    );
    println!("files in {}", out.display());
    Ok(())
}
