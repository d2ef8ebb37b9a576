//! Beams: one-parameter families of rays propagated through `n` reflections.
//!
//! A beam starts either as the pencil of rays leaving the point source (the
//! zero section `p = 0` of the cylinder) or as the outward normal rays of a
//! smaller oval contained in the mirror.  Each sample of the family is
//! propagated independently — the reflection law's lifted angle is
//! continuous in the input line, so independently computed samples share a
//! consistent lift and the family closes with its winding read off the seam.
//!
//! Refinement never interpolates in the chart: a midpoint sample is
//! re-propagated from the source parameter, so refined beams are exactly on
//! the true family.  The signed area `∮ p dα` — the quantity reflection
//! must conserve — gets a dedicated evaluator with Richardson extrapolation,
//! since the plain sample polygon's O(h²) bias would drown the conservation
//! defect it is supposed to measure.

use crate::billiard::{self, ReflectionLaw};
use crate::error::{Error, Result};
use crate::geom::{self, Vec2, TAU};
use crate::lines::CylinderCurve;
use crate::oval::{Oval, OvalFamily};
use crate::tolerances;

/// Where the rays of generation zero come from.
#[derive(Clone, Debug)]
pub enum BeamSource {
    /// All directions out of the point source (the chart origin).
    Point,
    /// Outward normal rays of a smaller oval (its implicit form must contain
    /// the world origin as an interior point, which anchors its own
    /// parametrization).
    InnerOval(OvalFamily),
}

/// A mirror, a reflection law and a generation-zero family, bundled so any
/// generation's line can be evaluated at any source parameter on demand.
pub struct RaySystem<'a> {
    oval: &'a Oval,
    law: ReflectionLaw,
    inner: Option<Oval>,
}

impl<'a> RaySystem<'a> {
    pub fn new(oval: &'a Oval, law: ReflectionLaw, source: &BeamSource) -> Result<Self> {
        let inner = match source {
            BeamSource::Point => None,
            BeamSource::InnerOval(family) => {
                let inner = Oval::build(family.clone(), Vec2::ZERO)?;
                for &pt in inner.grid_points() {
                    if !oval.contains(pt) {
                        return Err(Error::NotContained);
                    }
                }
                Some(inner)
            }
        };
        Ok(RaySystem { oval, law, inner })
    }

    pub fn oval(&self) -> &Oval {
        self.oval
    }

    pub fn law(&self) -> &ReflectionLaw {
        &self.law
    }

    /// The generation-zero ray at source parameter `s` (wrapped to one
    /// period), in the source chart with a lift continuous on `[0, 2π)`.
    pub fn initial_line(&self, s: f64) -> (f64, f64) {
        let sw = geom::wrap_angle(s);
        match &self.inner {
            None => (sw, 0.0),
            Some(inner) => {
                // Outward normal of the inner oval: tangent turned −90°.
                let alpha = inner.tangent_angle_lifted(sw) - std::f64::consts::FRAC_PI_2;
                let d = Vec2::from_angle(alpha);
                let p = (inner.point(sw) - self.oval.source()).det(d);
                (alpha, p)
            }
        }
    }

    /// The generation-`n` ray at source parameter `s`.
    pub fn line_at(&self, s: f64, n: usize) -> Result<(f64, f64)> {
        let (alpha, p) = self.initial_line(s);
        billiard::iterate(self.oval, &self.law, alpha, p, n)
    }

    /// The broken ray path at source parameter `s` through `n` reflections:
    /// start point (the source, or the inner-oval point), each mirror point
    /// in turn, and finally the point where the generation-`n` ray meets the
    /// mirror again — so drawing the last segment shows the line that is
    /// tangent to the caustic.  World-frame points, for figures.
    pub fn trajectory(&self, s: f64, n: usize) -> Result<Vec<Vec2>> {
        let (mut alpha, mut p) = self.initial_line(s);
        let mut pts = Vec::with_capacity(n + 2);
        pts.push(match &self.inner {
            None => self.oval.source(),
            Some(inner) => inner.point(geom::wrap_angle(s)),
        });
        for _ in 0..n {
            let r = billiard::reflect(self.oval, &self.law, alpha, p)?;
            pts.push(self.oval.point(r.chord.t_exit));
            alpha = r.alpha;
            p = r.p;
        }
        let last = billiard::chord_of(self.oval, alpha, p)?;
        pts.push(self.oval.point(last.t_exit));
        Ok(pts)
    }

    /// Propagate a closed beam of generation `n`, starting from
    /// `initial_samples` uniform source parameters and refining where the
    /// sampled family is still coarse.
    pub fn beam(&self, n: usize, initial_samples: usize) -> Result<Beam> {
        let m = initial_samples.max(16);
        let mut s: Vec<f64> = (0..m).map(|i| TAU * i as f64 / m as f64).collect();
        let mut alpha = Vec::with_capacity(m);
        let mut p = Vec::with_capacity(m);
        for &si in &s {
            let (a, q) = self.line_at(si, n)?;
            alpha.push(a);
            p.push(q);
        }

        let mut rounds = 0usize;
        loop {
            let insertions = self.refinement_targets(&s, &alpha, &p);
            if insertions.is_empty() {
                break;
            }
            if s.len() + insertions.len() > tolerances::BEAM_SAMPLE_BUDGET {
                return Err(Error::RefinementBudgetExceeded {
                    budget: tolerances::BEAM_SAMPLE_BUDGET,
                });
            }
            // Insert from the back so earlier indices stay valid.
            for &(idx, sm) in insertions.iter().rev() {
                let (a, q) = self.line_at(sm, n)?;
                s.insert(idx, sm);
                alpha.insert(idx, a);
                p.insert(idx, q);
            }
            rounds += 1;
            if rounds > 32 {
                return Err(Error::RefinementBudgetExceeded {
                    budget: tolerances::BEAM_SAMPLE_BUDGET,
                });
            }
        }

        let diagnostics = BeamDiagnostics::measure(&s, &alpha, &p, rounds);
        let curve = CylinderCurve::from_samples(s, alpha, p, TAU)?;
        Ok(Beam { curve, generation: n, diagnostics })
    }

    /// Sorted list of `(insert_at_index, midpoint_parameter)` for intervals
    /// violating the refinement rules.
    fn refinement_targets(&self, s: &[f64], alpha: &[f64], p: &[f64]) -> Vec<(usize, f64)> {
        let n = s.len();
        let p_scale = p.iter().fold(1.0_f64, |m, &v| m.max(v.abs()));
        let max_turn = tolerances::REFINE_MAX_TURN_DEG.to_radians();
        let mut want = vec![false; n]; // interval i spans s[i]..s[i+1]
        let da = |i: usize| {
            if i + 1 == n {
                alpha[0] + TAU - alpha[n - 1]
            } else {
                alpha[i + 1] - alpha[i]
            }
        };
        let dp = |i: usize| p[(i + 1) % n] - p[i];
        for i in 0..n {
            if da(i).abs() > tolerances::REFINE_MAX_DALPHA
                || dp(i).abs() > tolerances::REFINE_MAX_DP_REL * p_scale
            {
                want[i] = true;
            }
        }
        for i in 0..n {
            let j = (i + 1) % n;
            let v1 = Vec2::new(da(i), dp(i));
            let v2 = Vec2::new(da(j), dp(j));
            if v1.norm() > 0.0 && v2.norm() > 0.0 {
                let turn = geom::angle_between(v1, v2).abs();
                if turn > max_turn {
                    want[i] = true;
                    want[j] = true;
                }
            }
        }
        let mut out = Vec::new();
        for i in 0..n {
            if !want[i] {
                continue;
            }
            if i + 1 == n {
                let m = 0.5 * (s[n - 1] + s[0] + TAU);
                if m < TAU {
                    out.push((n, m));
                } else {
                    out.push((0, m - TAU));
                }
            } else {
                out.push((i + 1, 0.5 * (s[i] + s[i + 1])));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
        out
    }

    /// Signed area `∮ p dα` of generation `n` to high accuracy: uniform
    /// resampling at `m` and `2m` nodes plus Richardson extrapolation of the
    /// polygon values (the O(h²) polygon bias cancels, leaving O(h⁴)).
    /// Returns `(area, error_estimate)`.
    pub fn accurate_signed_area(&self, n: usize, m: usize) -> Result<(f64, f64)> {
        let area_at = |count: usize| -> Result<f64> {
            let mut alpha = Vec::with_capacity(count);
            let mut p = Vec::with_capacity(count);
            for i in 0..count {
                let (a, q) = self.line_at(TAU * i as f64 / count as f64, n)?;
                alpha.push(a);
                p.push(q);
            }
            let c = CylinderCurve::from_samples(
                (0..count).map(|i| TAU * i as f64 / count as f64).collect(),
                alpha,
                p,
                TAU,
            )?;
            Ok(c.signed_area())
        };
        let coarse = area_at(m)?;
        let fine = area_at(2 * m)?;
        Ok(((4.0 * fine - coarse) / 3.0, (fine - coarse).abs() / 3.0))
    }

    /// Signed area `∮ p dα` of generation `n` by adaptive subdivision of the
    /// 1-form `p dα`, with per-interval Richardson control.  High generations
    /// develop narrow near-stall layers in `α(s)` that defeat uniform
    /// sampling; subdivision spends its evaluations inside the layers, where
    /// the increments are small and converge quickly.  Returns
    /// `(area, line evaluations)`.
    pub fn adaptive_signed_area(&self, n: usize, tol: f64) -> Result<(f64, usize)> {
        const PANELS: usize = 1024;
        const MAX_DEPTH: u32 = 40;
        const EVAL_BUDGET: usize = 16_000_000;
        // Lift branches are re-derived pairwise at every level (each sample's
        // lift is anchored to its neighbour); a 2π offset between panels is
        // harmless because only differences of α enter the 1-form.
        struct Ctx<'b, 'a> {
            sys: &'b RaySystem<'a>,
            n: usize,
            evals: usize,
        }
        impl Ctx<'_, '_> {
            fn at(&mut self, s: f64) -> Result<(f64, f64)> {
                self.evals += 1;
                if self.evals > EVAL_BUDGET {
                    return Err(Error::RefinementBudgetExceeded { budget: EVAL_BUDGET });
                }
                self.sys.line_at(s, self.n)
            }
            #[allow(clippy::too_many_arguments)]
            fn refine(
                &mut self,
                s0: f64,
                a0: f64,
                p0: f64,
                s1: f64,
                a1: f64,
                p1: f64,
                tol: f64,
                depth: u32,
            ) -> Result<f64> {
                let sm = 0.5 * (s0 + s1);
                let (am_raw, pm) = self.at(sm)?;
                let am = a0 + crate::geom::wrap_to_pm_pi(am_raw - a0);
                // Re-branch the right endpoint relative to the midpoint.
                let a1 = am + crate::geom::wrap_to_pm_pi(a1 - am);
                let coarse = 0.5 * (p0 + p1) * (a1 - a0);
                let fine = 0.5 * (p0 + pm) * (am - a0) + 0.5 * (pm + p1) * (a1 - am);
                let correction = (fine - coarse) / 3.0;
                let wide = (am - a0).abs().max((a1 - am).abs()) > 0.5;
                if (!wide && correction.abs() <= tol) || depth >= MAX_DEPTH {
                    return Ok(fine + correction);
                }
                let left = self.refine(s0, a0, p0, sm, am, pm, 0.5 * tol, depth + 1)?;
                let right = self.refine(sm, am, pm, s1, a1, p1, 0.5 * tol, depth + 1)?;
                Ok(left + right)
            }
        }
        let mut ctx = Ctx { sys: self, n, evals: 0 };
        let mut nodes = Vec::with_capacity(PANELS + 1);
        for i in 0..PANELS {
            let s = TAU * i as f64 / PANELS as f64;
            nodes.push((s, ctx.at(s)?));
        }
        nodes.push((TAU, nodes[0].1));
        let mut total = 0.0;
        for w in nodes.windows(2) {
            let (s0, (a0_raw, p0)) = w[0];
            let (s1, (a1_raw, p1)) = w[1];
            let a1 = a0_raw + crate::geom::wrap_to_pm_pi(a1_raw - a0_raw);
            total += ctx.refine(s0, a0_raw, p0, s1, a1, p1, tol / PANELS as f64, 0)?;
        }
        Ok((total, ctx.evals))
    }
}

/// A propagated beam: the family as a cylinder curve, plus bookkeeping.
#[derive(Clone, Debug)]
pub struct Beam {
    pub curve: CylinderCurve,
    pub generation: usize,
    pub diagnostics: BeamDiagnostics,
}

/// What propagation actually did and how the result looks.  `simple` is
/// reported, never asserted: beams of high generations may legitimately
/// self-intersect on the cylinder.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BeamDiagnostics {
    pub samples: usize,
    pub refinement_rounds: usize,
    pub max_dalpha: f64,
    pub max_turn_deg: f64,
    pub simple: bool,
    pub polygon_area: f64,
}

impl BeamDiagnostics {
    fn measure(s: &[f64], alpha: &[f64], p: &[f64], rounds: usize) -> Self {
        let n = s.len();
        let da = |i: usize| {
            if i + 1 == n {
                alpha[0] + TAU - alpha[n - 1]
            } else {
                alpha[i + 1] - alpha[i]
            }
        };
        let dp = |i: usize| p[(i + 1) % n] - p[i];
        let mut max_dalpha = 0.0_f64;
        let mut max_turn = 0.0_f64;
        for i in 0..n {
            max_dalpha = max_dalpha.max(da(i).abs());
            let j = (i + 1) % n;
            let v1 = Vec2::new(da(i), dp(i));
            let v2 = Vec2::new(da(j), dp(j));
            if v1.norm() > 0.0 && v2.norm() > 0.0 {
                max_turn = max_turn.max(geom::angle_between(v1, v2).abs());
            }
        }
        BeamDiagnostics {
            samples: n,
            refinement_rounds: rounds,
            max_dalpha,
            max_turn_deg: max_turn.to_degrees(),
            simple: !crate::numerics::cylinder_polyline_self_intersects(alpha, p, 1),
            polygon_area: crate::numerics::polygon_area_cylinder(alpha, p, 1),
        }
    }
}
