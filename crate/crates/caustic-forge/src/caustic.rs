//! Caustics, orthotomics, wave fronts, and the dualities tying them together.
//!
//! The envelope of a family of lines `(α(s), p(s))` is
//! `X = p·n + (p′/α′)·d`, which moves along the ray direction with signed
//! speed `D/α′²`, where `D = p α′³ − p′ α″ + p″ α′` is the same indicator
//! whose sign changes mark inflections of the family.  Cusps of the caustic
//! are therefore exactly the robust sign changes of `D`, and points with
//! `α′ ≈ 0` are where the envelope escapes to infinity.
//!
//! A wave front of the family at lift value `z` is `X = p·n + z·d` with
//! `dz = −p dα` along the family; its tangent is `(p′ − z α′)·n`, so the
//! rays are normal to every front, the front's centre of curvature is the
//! envelope point, and extrema of its cooriented curvature (vertices) sit
//! at sign changes of `D/α′²` — the caustic's cusps — independent of `z`.
//! These coincidences are not assumed anywhere: fronts and caustics are
//! computed through separate pipelines precisely so the dualities can be
//! measured.

use crate::beam::{Beam, RaySystem};
use crate::error::{Error, Result};
use crate::geom::{self, Vec2, TAU};
use crate::lines::CylinderCurve;
use crate::numerics::{self, SignChangeOptions};
use crate::oval::Oval;
use crate::tolerances;

/// A cusp of a caustic: source parameter and world-frame location.  Cusps
/// are sign changes of the indicator `D`, which is smooth even where the
/// family's direction stalls — there the caustic reverses at infinity and
/// `point` is `None`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct CuspPoint {
    pub s: f64,
    pub point: Option<[f64; 2]>,
}

/// A planar curve traced with cusp and arc bookkeeping (world frame).
#[derive(Clone, Debug)]
pub struct PlanarCurveWithCusps {
    /// Source parameter per retained sample.
    pub s: Vec<f64>,
    /// World-frame points (samples near infinity are dropped, see `arc_id`).
    pub points: Vec<Vec2>,
    /// Arc index per sample; increments at cusps and at-infinity gaps.
    pub arc_id: Vec<usize>,
    pub cusps: Vec<CuspPoint>,
    /// All lines of the family pass through one point: the caustic
    /// degenerates to it and the fields above are left empty.
    pub degenerate: Option<Vec2>,
    /// The family's direction stalls somewhere (`α′ ≈ 0`): the envelope has
    /// unbounded arcs and was split there.
    pub passes_infinity: bool,
}

impl PlanarCurveWithCusps {
    pub fn cusp_count(&self) -> usize {
        self.cusps.len()
    }

    /// Arcs as index ranges into `points`.
    pub fn arcs(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let n = self.points.len();
        let mut start = 0;
        for i in 1..=n {
            if i == n || self.arc_id[i] != self.arc_id[start] {
                out.push(start..i);
                start = i;
            }
        }
        out
    }
}

/// If every line of the family passes through one point, return it (in the
/// chart frame).  Least squares over all samples; accepted when the worst
/// perpendicular offset stays below `tol`.
pub fn concurrent_point(curve: &CylinderCurve, tol: f64) -> Option<Vec2> {
    let n = curve.len();
    let (mut m11, mut m12, mut m22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let nrm = Vec2::new(curve.alpha[i].sin(), -curve.alpha[i].cos());
        m11 += nrm.x * nrm.x;
        m12 += nrm.x * nrm.y;
        m22 += nrm.y * nrm.y;
        b1 += curve.p[i] * nrm.x;
        b2 += curve.p[i] * nrm.y;
    }
    let det = m11 * m22 - m12 * m12;
    if det.abs() < 1e-12 * (m11 + m22).powi(2) {
        return None;
    }
    let x = Vec2::new((m22 * b1 - m12 * b2) / det, (m11 * b2 - m12 * b1) / det);
    let mut worst = 0.0_f64;
    for i in 0..n {
        let nrm = Vec2::new(curve.alpha[i].sin(), -curve.alpha[i].cos());
        worst = worst.max((x.dot(nrm) - curve.p[i]).abs());
    }
    if worst < tol {
        Some(x)
    } else {
        None
    }
}

/// Envelope of a sampled line family.  Pure sample computation: derivatives
/// by periodic finite differences, cusps located by interpolating the sign
/// change of the indicator between samples.
pub fn envelope_of_family(curve: &CylinderCurve, source: Vec2) -> Result<PlanarCurveWithCusps> {
    if curve.len() < 8 {
        return Err(Error::TooFewSamples { got: curve.len(), need: 8 });
    }
    let p_scale = curve.p.iter().fold(1.0_f64, |m, &v| m.max(v.abs()));
    if let Some(pt) = concurrent_point(curve, tolerances::DEGENERATE_REL * p_scale) {
        return Ok(PlanarCurveWithCusps {
            s: Vec::new(),
            points: Vec::new(),
            arc_id: Vec::new(),
            cusps: Vec::new(),
            degenerate: Some(pt + source),
            passes_infinity: false,
        });
    }

    let n = curve.len();
    let jump = TAU * curve.winding as f64;
    let (a1, a2) = numerics::periodic_derivatives(&curve.s, &curve.alpha, curve.period, jump);
    let (p1, p2) = numerics::periodic_derivatives(&curve.s, &curve.p, curve.period, 0.0);
    let d_ind: Vec<f64> = (0..n)
        .map(|i| curve.p[i] * a1[i] * a1[i] * a1[i] - p1[i] * a2[i] + p2[i] * a1[i])
        .collect();

    let a1_max = a1.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let finite: Vec<bool> =
        a1.iter().map(|&v| v.abs() > tolerances::AT_INFINITY_REL * a1_max).collect();
    let escape_after = escape_flags(&curve.s, curve.period, &a1, &p1, &finite);
    let passes_infinity = finite.iter().any(|&f| !f) || escape_after.iter().any(|&e| e);

    // Cusps: every robust sign change of the indicator.  The indicator is
    // smooth through direction stalls, so a crossing whose bracket touches
    // the at-infinity zone is still a cusp — one without a finite point.
    let (changes, _) = numerics::robust_sign_changes(&d_ind, SignChangeOptions::default());
    let mut cusps = Vec::new();
    for ch in &changes {
        let (i, j) = (ch.before, ch.after);
        let (di, dj) = (d_ind[i], d_ind[j]);
        let frac = if (di - dj).abs() > 0.0 { di / (di - dj) } else { 0.5 };
        let si = curve.s[i];
        let sj = if j >= i { curve.s[j] } else { curve.s[j] + curve.period };
        let s_star = si + frac * (sj - si);
        // The envelope point is stationary at a cusp, so linear
        // interpolation of the neighbouring points is second-order accurate
        // — unless the bracket straddles an infinite branch, in which case
        // the cusp has no finite point.
        let mut escapes = false;
        let mut k = i;
        while k != j {
            if escape_after[k] {
                escapes = true;
                break;
            }
            k = (k + 1) % n;
        }
        let point = if finite[i] && finite[j] && !escapes {
            let xi = envelope_point(curve, &a1, &p1, i);
            let xj = envelope_point(curve, &a1, &p1, j);
            let pt = xi + frac * (xj - xi) + source;
            Some([pt.x, pt.y])
        } else {
            None
        };
        cusps.push(CuspPoint {
            s: if s_star >= curve.period { s_star - curve.period } else { s_star },
            point,
        });
    }
    cusps.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());

    let all_points: Vec<Vec2> = (0..n)
        .map(|i| if finite[i] { envelope_point(curve, &a1, &p1, i) + source } else { Vec2::ZERO })
        .collect();
    let (s_out, points, arc_id) =
        assemble_traced(&curve.s, &all_points, &finite, &escape_after, &cusps);
    Ok(PlanarCurveWithCusps { s: s_out, points, arc_id, cusps, degenerate: None, passes_infinity })
}

/// Intervals across which the envelope escapes to infinity.  `escape[i]`
/// marks the interval between samples `i` and `i+1` (cyclically).  Two
/// mechanisms, both tied to a zero of α′ where p′ stays away from zero:
///
/// * an odd-order zero crosses between two samples and flips the sign of α′
///   — both neighbours sit outside the near-zero band, so the sign change is
///   the reliable marker;
/// * an even-order zero only touches zero, so the samples keep one sign and
///   may all stay outside the band.  At a local minimum of |α′| the parabola
///   through the three neighbouring samples recovers the touch to quadratic
///   accuracy: if its vertex dips below the band, α′ vanishes inside.  The
///   three-point derivative estimates carry their own h²α‴/6 bias, which at
///   a touch lifts the whole parabola by c·h²/3 (α‴ ≈ 2c there) — subtracted
///   before the comparison, the fitted minimum of an exact touch is zero
///   again at any resolution.
///
/// When p′ vanishes together with α′ the family is locally degenerate
/// (consecutive lines coincide rather than turn) and the envelope can stay
/// finite, so those minima are not flagged.
fn escape_flags(
    s: &[f64],
    period: f64,
    a1: &[f64],
    p1: &[f64],
    finite: &[bool],
) -> Vec<bool> {
    let n = s.len();
    let a1_max = a1.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let p1_max = p1.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let band = tolerances::AT_INFINITY_REL * a1_max;
    let mut escape = vec![false; n];
    for i in 0..n {
        let j = (i + 1) % n;
        if finite[i] && finite[j] && a1[i].signum() != a1[j].signum() {
            escape[i] = true;
        }
    }
    for i in 0..n {
        let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
        if !(finite[im] && finite[i] && finite[ip]) {
            continue;
        }
        let w = a1[i].signum();
        let (gm, g0, gp) = (w * a1[im], w * a1[i], w * a1[ip]);
        if gm <= 0.0 || gp <= 0.0 || g0 > gm || g0 > gp {
            continue; // not a same-sign local minimum
        }
        if p1[i].abs() <= tolerances::DEGENERATE_REL * p1_max {
            continue; // locally degenerate: envelope limit may be finite
        }
        let h1 = (s[i] - s[im]).rem_euclid(period);
        let h2 = (s[ip] - s[i]).rem_euclid(period);
        if h1 == 0.0 || h2 == 0.0 {
            continue;
        }
        let (dm, dp) = (gm - g0, gp - g0);
        let denom = h1 * h2 * (h1 + h2);
        let c = (dp * h1 + dm * h2) / denom;
        let b = (dp * h1 * h1 - dm * h2 * h2) / denom;
        if c <= 0.0 {
            continue;
        }
        let vertex = -b / (2.0 * c);
        if vertex <= -h1 || vertex >= h2 {
            continue;
        }
        if g0 - b * b / (4.0 * c) - c * h1 * h2 / 3.0 < band {
            escape[if vertex < 0.0 { im } else { i }] = true;
        }
    }
    escape
}

/// Arc bookkeeping for a traced envelope: drop non-finite samples, start a
/// new arc after every gap and at every cusp parameter.
fn assemble_traced(
    s_vals: &[f64],
    points_world: &[Vec2],
    finite: &[bool],
    escape_after: &[bool],
    cusps: &[CuspPoint],
) -> (Vec<f64>, Vec<Vec2>, Vec<usize>) {
    let n = s_vals.len();
    let mut s_out = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut arc_id = Vec::with_capacity(n);
    let mut arc = 0usize;
    let mut prev_finite = finite[n - 1];
    let cusp_between = |s_prev: f64, s_cur: f64| -> bool {
        cusps.iter().any(|c| {
            if s_prev <= s_cur {
                c.s > s_prev && c.s <= s_cur
            } else {
                c.s > s_prev || c.s <= s_cur
            }
        })
    };
    for i in 0..n {
        if !finite[i] {
            prev_finite = false;
            continue;
        }
        if !prev_finite {
            arc += 1;
        } else if i > 0 && (escape_after[i - 1] || cusp_between(s_vals[i - 1], s_vals[i])) {
            arc += 1;
        }
        s_out.push(s_vals[i]);
        points.push(points_world[i]);
        arc_id.push(arc);
        prev_finite = true;
    }
    (s_out, points, arc_id)
}

/// Richardson-extrapolated envelope points on uniform parameter grids: the
/// finite-difference envelope carries an O(h²) bias with a smooth
/// coefficient, so combining evaluations at `2m` and `m` samples cancels it.
/// Inputs are the uniform fine grid (even length) and the chart source;
/// cusps and flags should come from the fine-grid envelope.
fn richardson_points(
    curve_fine: &CylinderCurve,
    curve_coarse: &CylinderCurve,
    source: Vec2,
) -> (Vec<f64>, Vec<Vec2>, Vec<bool>, Vec<bool>) {
    let jump_f = TAU * curve_fine.winding as f64;
    let jump_c = TAU * curve_coarse.winding as f64;
    let (a1f, _) = numerics::periodic_derivatives(&curve_fine.s, &curve_fine.alpha, curve_fine.period, jump_f);
    let (p1f, _) = numerics::periodic_derivatives(&curve_fine.s, &curve_fine.p, curve_fine.period, 0.0);
    let (a1c, _) = numerics::periodic_derivatives(&curve_coarse.s, &curve_coarse.alpha, curve_coarse.period, jump_c);
    let (p1c, _) = numerics::periodic_derivatives(&curve_coarse.s, &curve_coarse.p, curve_coarse.period, 0.0);
    let max_f = a1f.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let m = curve_coarse.len();
    let mut s = Vec::with_capacity(m);
    let mut pts = Vec::with_capacity(m);
    let mut finite = Vec::with_capacity(m);
    for k in 0..m {
        let i = 2 * k;
        let ok = a1f[i].abs() > tolerances::AT_INFINITY_REL * max_f
            && a1c[k].abs() > tolerances::AT_INFINITY_REL * max_f;
        s.push(curve_coarse.s[k]);
        if ok {
            let ef = envelope_point(curve_fine, &a1f, &p1f, i);
            let ec = envelope_point(curve_coarse, &a1c, &p1c, k);
            pts.push((4.0 * ef - ec) * (1.0 / 3.0) + source);
        } else {
            pts.push(Vec2::ZERO);
        }
        finite.push(ok);
    }
    let escape = escape_flags(&s, curve_coarse.period, &a1c, &p1c, &finite);
    (s, pts, finite, escape)
}

/// Envelope of generation `n` on a uniform grid of `m` parameters, with
/// Richardson-extrapolated points (sampled internally at `2m`).  Cusps and
/// flags come from the fine grid.
pub fn envelope_dense_refined(
    system: &RaySystem,
    n: usize,
    m: usize,
) -> Result<PlanarCurveWithCusps> {
    let fine = 2 * m;
    let mut s_f = Vec::with_capacity(fine);
    let mut alpha_f = Vec::with_capacity(fine);
    let mut p_f = Vec::with_capacity(fine);
    for i in 0..fine {
        let si = TAU * i as f64 / fine as f64;
        let (a, q) = system.line_at(si, n)?;
        s_f.push(si);
        alpha_f.push(a);
        p_f.push(q);
    }
    let curve_fine = CylinderCurve::from_samples(s_f.clone(), alpha_f.clone(), p_f.clone(), TAU)?;
    let result_fine = envelope_of_family(&curve_fine, system.oval().source())?;
    if result_fine.degenerate.is_some() {
        return Ok(result_fine);
    }
    let curve_coarse = CylinderCurve::from_samples(
        s_f.iter().step_by(2).cloned().collect(),
        alpha_f.iter().step_by(2).cloned().collect(),
        p_f.iter().step_by(2).cloned().collect(),
        TAU,
    )?;
    let (s, pts, finite, escape) =
        richardson_points(&curve_fine, &curve_coarse, system.oval().source());
    let (s_out, points, arc_id) = assemble_traced(&s, &pts, &finite, &escape, &result_fine.cusps);
    Ok(PlanarCurveWithCusps {
        s: s_out,
        points,
        arc_id,
        cusps: result_fine.cusps,
        degenerate: None,
        passes_infinity: result_fine.passes_infinity,
    })
}

fn envelope_point(curve: &CylinderCurve, a1: &[f64], p1: &[f64], i: usize) -> Vec2 {
    let d = Vec2::from_angle(curve.alpha[i]);
    let nrm = Vec2::new(curve.alpha[i].sin(), -curve.alpha[i].cos());
    curve.p[i] * nrm + (p1[i] / a1[i]) * d
}

/// Envelope of a propagated beam, with cusp locations sharpened by bisecting
/// the indicator's sign change on freshly propagated local stencils (the
/// beam's own samples only bracket it).
pub fn envelope(system: &RaySystem, beam: &Beam) -> Result<PlanarCurveWithCusps> {
    let mut result = envelope_of_family(&beam.curve, system.oval().source())?;
    if result.degenerate.is_some() {
        return Ok(result);
    }
    let n = beam.generation;
    let h = tolerances::LOCAL_STENCIL_H;
    let jump = TAU * beam.curve.winding as f64;
    let (a1_all, _) =
        numerics::periodic_derivatives(&beam.curve.s, &beam.curve.alpha, beam.curve.period, jump);
    let a1_max = a1_all.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let ind = |s: f64| -> Result<f64> {
        let (am, pm) = system.line_at(s - h, n)?;
        let (a0, p0) = system.line_at(s, n)?;
        let (ap, pp) = system.line_at(s + h, n)?;
        // Stencil lifts are independent; re-anchor the neighbours to the
        // centre so differences are seam-free.
        let am = a0 + geom::wrap_to_pm_pi(am - a0);
        let ap = a0 + geom::wrap_to_pm_pi(ap - a0);
        let a1 = (ap - am) / (2.0 * h);
        let a2 = (ap - 2.0 * a0 + am) / (h * h);
        let p1 = (pp - pm) / (2.0 * h);
        let p2 = (pp - 2.0 * p0 + pm) / (h * h);
        Ok(p0 * a1 * a1 * a1 - p1 * a2 + p2 * a1)
    };
    for cusp in result.cusps.iter_mut() {
        // Bracket the stencil indicator around the sampled estimate.
        let mut lo = cusp.s - 2.0 * tolerances::REFINE_MAX_DALPHA.max(4.0 * h);
        let mut hi = cusp.s + 2.0 * tolerances::REFINE_MAX_DALPHA.max(4.0 * h);
        let (mut flo, fhi) = (ind(lo)?, ind(hi)?);
        if (flo > 0.0) == (fhi > 0.0) {
            continue; // stencil disagrees with samples: keep the estimate
        }
        for _ in 0..64 {
            if hi - lo <= tolerances::CUSP_BISECT_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let fm = ind(mid)?;
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let s_star = 0.5 * (lo + hi);
        // Envelope point from the same stencil; a stalled direction means
        // the cusp reverses at infinity and keeps no finite point.
        let (am, pm) = system.line_at(s_star - h, n)?;
        let (a0, p0) = system.line_at(s_star, n)?;
        let (ap, pp) = system.line_at(s_star + h, n)?;
        let am = a0 + geom::wrap_to_pm_pi(am - a0);
        let ap = a0 + geom::wrap_to_pm_pi(ap - a0);
        let a1 = (ap - am) / (2.0 * h);
        let p1 = (pp - pm) / (2.0 * h);
        cusp.s = geom::wrap_angle(s_star);
        cusp.point = if a1.abs() > tolerances::AT_INFINITY_REL * a1_max {
            let d = Vec2::from_angle(a0);
            let nrm = Vec2::new(a0.sin(), -a0.cos());
            let pt = p0 * nrm + (p1 / a1) * d + system.oval().source();
            Some([pt.x, pt.y])
        } else {
            None
        };
    }
    result.cusps.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
    Ok(result)
}

/// Envelope of generation `n` evaluated on a fresh uniform grid of `m`
/// source parameters (no reuse of beam refinement).
pub fn envelope_dense(system: &RaySystem, n: usize, m: usize) -> Result<PlanarCurveWithCusps> {
    let mut s = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    for i in 0..m {
        let si = TAU * i as f64 / m as f64;
        let (a, q) = system.line_at(si, n)?;
        s.push(si);
        alpha.push(a);
        p.push(q);
    }
    let curve = CylinderCurve::from_samples(s, alpha, p, TAU)?;
    envelope_of_family(&curve, system.oval().source())
}

// ───────────────────────────── orthotomic ─────────────────────────────

/// Pointwise analytic data of the orthotomic: the curve, its velocity, the
/// coorientation (reflected ray direction) and its derivative.  Everything
/// reduces to first and second derivatives of the boundary.
struct OrthoPoint {
    z: Vec2,
    z_prime: Vec2,
    w: Vec2,
    w_prime: Vec2,
}

fn ortho_point(oval: &Oval, t: f64) -> OrthoPoint {
    let a = oval.point(t) - oval.source();
    let v = oval.velocity(t);
    let speed = v.norm();
    let tau = v * (1.0 / speed);
    let tau_prime = oval.curvature(t) * speed * tau.perp();
    // Z = 2(A − (A·τ)τ), the source reflected in the tangent line.
    let z = 2.0 * (a - a.dot(tau) * tau);
    let z_prime =
        2.0 * (v - (v.dot(tau) + a.dot(tau_prime)) * tau - a.dot(tau) * tau_prime);
    // w = 2(û·τ)τ − û, the reflected unit direction.
    let norm_a = a.norm();
    let u_hat = a * (1.0 / norm_a);
    let u_prime = (v - u_hat.dot(v) * u_hat) * (1.0 / norm_a);
    let w = 2.0 * u_hat.dot(tau) * tau - u_hat;
    let w_prime =
        2.0 * ((u_prime.dot(tau) + u_hat.dot(tau_prime)) * tau + u_hat.dot(tau) * tau_prime)
            - u_prime;
    OrthoPoint { z, z_prime, w, w_prime }
}

/// Curvature of the orthotomic at `t`: analytic velocity, acceleration by a
/// short central difference of the analytic velocity.
fn ortho_curvature(oval: &Oval, t: f64) -> f64 {
    let h = 1e-5;
    let z1 = ortho_point(oval, t).z_prime;
    let z2 = (ortho_point(oval, t + h).z_prime - ortho_point(oval, t - h).z_prime) * (0.5 / h);
    z1.det(z2) / z1.norm().powi(3)
}

/// The orthotomic of the mirror with respect to the source: the source's
/// mirror image in every tangent line.  Reflected rays are normal to it, so
/// its evolute is the one-reflection caustic — by construction here, not by
/// fiat: the curve is built from boundary data alone.
#[derive(Clone, Debug)]
pub struct Orthotomic {
    /// Boundary parameter per sample.
    pub t: Vec<f64>,
    /// Points in the source frame.
    pub points: Vec<Vec2>,
    /// Velocity per sample (analytic, not finite differences).
    pub velocity: Vec<Vec2>,
    /// Unit tangent directions.
    pub tangents: Vec<Vec2>,
    /// Unit coorientation: the direction of the reflected ray.
    pub coorient: Vec<Vec2>,
    /// Analytic derivative of the coorientation.
    coorient_prime: Vec<Vec2>,
}

/// Build the orthotomic on `m` uniform boundary parameters.
pub fn orthotomic(oval: &Oval, m: usize) -> Orthotomic {
    let mut t = Vec::with_capacity(m);
    let mut points = Vec::with_capacity(m);
    let mut velocity = Vec::with_capacity(m);
    let mut tangents = Vec::with_capacity(m);
    let mut coorient = Vec::with_capacity(m);
    let mut coorient_prime = Vec::with_capacity(m);
    for i in 0..m {
        let ti = TAU * i as f64 / m as f64;
        let op = ortho_point(oval, ti);
        t.push(ti);
        points.push(op.z);
        velocity.push(op.z_prime);
        tangents.push(op.z_prime.normalized());
        coorient.push(op.w);
        coorient_prime.push(op.w_prime);
    }
    Orthotomic { t, points, velocity, tangents, coorient, coorient_prime }
}

impl Orthotomic {
    /// The family of the orthotomic's normal lines, as a cylinder curve in
    /// the source chart.  Normal direction comes from the curve's own
    /// tangents; the coorientation only picks its sign.
    pub fn normal_family(&self) -> Result<CylinderCurve> {
        let m = self.t.len();
        let mut alpha_raw = Vec::with_capacity(m);
        let mut p = Vec::with_capacity(m);
        for i in 0..m {
            let mut nu = self.tangents[i].perp();
            if nu.dot(self.coorient[i]) < 0.0 {
                nu = -nu;
            }
            alpha_raw.push(nu.angle());
            p.push(self.points[i].det(nu));
        }
        geom::unwrap_angles(&mut alpha_raw);
        CylinderCurve::from_samples(self.t.clone(), alpha_raw, p, TAU)
    }

    /// Evolute: envelope of the normal family.  Cusp detection and arc
    /// bookkeeping run on the sampled family; the returned points use the
    /// analytic derivatives (`α′ = det(w, w′)`, `p′ = det(Z′, w) + det(Z, w′)`),
    /// so they carry no finite-difference truncation.
    pub fn evolute(&self, source: Vec2) -> Result<PlanarCurveWithCusps> {
        let mut result = envelope_of_family(&self.normal_family()?, source)?;
        if result.degenerate.is_some() {
            return Ok(result);
        }
        let exact: Vec<Vec2> = (0..self.t.len())
            .map(|i| {
                let w = self.coorient[i];
                let a1 = w.det(self.coorient_prime[i]);
                let p = self.points[i].det(w);
                let p1 = self.velocity[i].det(w) + self.points[i].det(self.coorient_prime[i]);
                let nrm = Vec2::new(w.y, -w.x);
                p * nrm + (p1 / a1) * w + source
            })
            .collect();
        let mut idx = 0usize;
        for (j, &s) in result.s.iter().enumerate() {
            while self.t[idx] != s {
                idx += 1;
            }
            result.points[j] = exact[idx];
        }
        Ok(result)
    }

    /// Vertex census of the orthotomic: robust extrema of its curvature,
    /// each refined by bisecting the curvature slope of the analytic
    /// pointwise pipeline.
    pub fn vertex_census(&self, oval: &Oval) -> VertexCensus {
        let m = self.t.len();
        let kappa: Vec<f64> = {
            let xs: Vec<f64> = self.velocity.iter().map(|v| v.x).collect();
            let ys: Vec<f64> = self.velocity.iter().map(|v| v.y).collect();
            let (x1, _) = numerics::periodic_derivatives(&self.t, &xs, TAU, 0.0);
            let (y1, _) = numerics::periodic_derivatives(&self.t, &ys, TAU, 0.0);
            (0..m)
                .map(|i| {
                    let v = self.velocity[i];
                    v.det(Vec2::new(x1[i], y1[i])) / v.norm().powi(3)
                })
                .collect()
        };
        let k_min = kappa.iter().cloned().fold(f64::INFINITY, f64::min);
        let k_max = kappa.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let spread = k_max - k_min;
        if spread < tolerances::CONST_CURVATURE_REL * k_min.abs().max(k_max.abs()).max(1e-300) {
            return VertexCensus { count: 0, locations: Vec::new(), constant_curvature: true };
        }
        let plateau = tolerances::PLATEAU_TOL * spread;
        let mut dirs: Vec<(usize, i8)> = Vec::new();
        for i in 0..m {
            let d = kappa[(i + 1) % m] - kappa[i];
            if d > plateau {
                dirs.push((i, 1));
            } else if d < -plateau {
                dirs.push((i, -1));
            }
        }
        let mut locations = Vec::new();
        let len = dirs.len();
        if len >= 2 {
            let ds = TAU / m as f64;
            let slope = |t: f64| -> f64 {
                let h = 1e-4;
                (ortho_curvature(oval, t + h) - ortho_curvature(oval, t - h)) / (2.0 * h)
            };
            for k in 0..len {
                let (_, d1) = dirs[k];
                let (i2, d2) = dirs[(k + 1) % len];
                if d1 != d2 {
                    let t0 = self.t[i2];
                    let (mut lo, mut hi) = (t0 - ds, t0 + 2.0 * ds);
                    let mut flo = slope(lo);
                    if (flo > 0.0) == (slope(hi) > 0.0) {
                        locations.push(geom::wrap_angle(t0));
                        continue;
                    }
                    for _ in 0..50 {
                        let mid = 0.5 * (lo + hi);
                        let fm = slope(mid);
                        if (fm > 0.0) == (flo > 0.0) {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                    locations.push(geom::wrap_angle(0.5 * (lo + hi)));
                }
            }
        }
        locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
        VertexCensus { count: locations.len(), locations, constant_curvature: false }
    }
}

// ─────────────────────────────── fronts ───────────────────────────────

/// A cooriented wave front (world frame).
#[derive(Clone, Debug)]
pub struct Front {
    /// Source parameter per sample.
    pub s: Vec<f64>,
    pub points: Vec<Vec2>,
    /// Unit ray direction (coorientation) per sample.
    pub ray_dir: Vec<Vec2>,
    /// Lifted direction angle per sample.
    pub alpha: Vec<f64>,
    /// Chart offset per sample.
    pub p: Vec<f64>,
    /// Lift value per sample (`dz = −p dα`, anchored at `z[0] = z0`).
    pub z: Vec<f64>,
    pub z0: f64,
    /// Winding of the generating direction field over one period.
    pub winding: i32,
    /// Sample indices straddling front cusps (`p′ − z α′` sign changes).
    pub cusp_marks: Vec<usize>,
    /// Closure defect of the lift before the linear correction.
    pub closure_gap: f64,
}

/// Build the front of generation `n` at lift value `z0`, on `m` uniform
/// source parameters.
///
/// The lift only closes when the family conserves `∮ p dα = 0`; that is
/// checked first with Richardson-extrapolated areas (precondition
/// [`Error::NotClosed`]).  The cumulative lift is also Richardson-corrected
/// node by node, and the (tiny) remaining defect is spread linearly so the
/// returned front closes exactly.
pub fn normal_front(system: &RaySystem, n: usize, z0: f64, m: usize) -> Result<Front> {
    let fine = 2 * m;
    let mut s_f = Vec::with_capacity(fine);
    let mut alpha_f = Vec::with_capacity(fine);
    let mut p_f = Vec::with_capacity(fine);
    for i in 0..fine {
        let si = TAU * i as f64 / fine as f64;
        let (a, q) = system.line_at(si, n)?;
        s_f.push(si);
        alpha_f.push(a);
        p_f.push(q);
    }
    // Detect the winding (and validate closure of the lift) up front.
    let winding =
        CylinderCurve::from_samples(s_f, alpha_f.clone(), p_f.clone(), TAU)?.winding;
    let seam = alpha_f[0] + TAU * winding as f64 - alpha_f[fine - 1];
    // Cumulative lift: polygon increments on the fine and coarse grids.
    let mut z_fine = vec![0.0; fine + 1];
    for i in 0..fine {
        let j = (i + 1) % fine;
        let da = if j == 0 { seam } else { alpha_f[j] - alpha_f[i] };
        z_fine[i + 1] = z_fine[i] - 0.5 * (p_f[i] + p_f[j]) * da;
    }
    let mut z_coarse = vec![0.0; m + 1];
    for k in 0..m {
        let i = 2 * k;
        let j = (2 * k + 2) % fine;
        let da = if j == 0 {
            alpha_f[0] + TAU * winding as f64 - alpha_f[i]
        } else {
            alpha_f[j] - alpha_f[i]
        };
        z_coarse[k + 1] = z_coarse[k] - 0.5 * (p_f[i] + p_f[j]) * da;
    }
    // Richardson: areas and partial sums share the h² error structure.
    let area_fine = -z_fine[fine];
    let area_coarse = -z_coarse[m];
    let area = (4.0 * area_fine - area_coarse) / 3.0;
    let scale = p_f.iter().fold(1.0_f64, |mx, &v| mx.max(v.abs()));
    if area.abs() > tolerances::FRONT_CLOSURE_AREA_REL * scale * TAU {
        return Err(Error::NotClosed { gap: area });
    }
    let z_rich: Vec<f64> = (0..=m).map(|k| (4.0 * z_fine[2 * k] - z_coarse[k]) / 3.0).collect();
    let closure_gap = z_rich[m];

    let mut s = Vec::with_capacity(m);
    let mut points = Vec::with_capacity(m);
    let mut ray_dir = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    let mut z = Vec::with_capacity(m);
    let src = system.oval().source();
    for k in 0..m {
        let a = alpha_f[2 * k];
        let q = p_f[2 * k];
        let zk = z0 + z_rich[k] - closure_gap * k as f64 / m as f64;
        let d = Vec2::from_angle(a);
        let nrm = Vec2::new(a.sin(), -a.cos());
        s.push(TAU * k as f64 / m as f64);
        points.push(q * nrm + zk * d + src);
        ray_dir.push(d);
        alpha.push(a);
        p.push(q);
        z.push(zk);
    }

    let mut front = Front {
        s,
        points,
        ray_dir,
        alpha,
        p,
        z,
        z0,
        winding,
        cusp_marks: Vec::new(),
        closure_gap: closure_gap.abs(),
    };
    front.mark_cusps();
    Ok(front)
}

impl Front {
    /// The mirror boundary itself as a front, cooriented inward.
    pub fn from_oval(oval: &Oval) -> Front {
        let m = oval.grid_len();
        let src = oval.source();
        let mut s = Vec::with_capacity(m);
        let mut points = Vec::with_capacity(m);
        let mut ray_dir = Vec::with_capacity(m);
        let mut alpha = Vec::with_capacity(m);
        let mut p = Vec::with_capacity(m);
        for i in 0..m {
            // Inward normal: tangent turned +90°.
            let a = oval.grid_tangent_lift()[i] + std::f64::consts::FRAC_PI_2;
            let d = Vec2::from_angle(a);
            s.push(oval.grid_ts()[i]);
            points.push(oval.grid_points()[i]);
            ray_dir.push(d);
            alpha.push(a);
            p.push((oval.grid_points()[i] - src).det(d));
        }
        Front {
            s,
            points,
            ray_dir,
            alpha,
            p,
            z: vec![0.0; m],
            z0: 0.0,
            winding: 1,
            cusp_marks: Vec::new(),
            closure_gap: 0.0,
        }
    }

    fn mark_cusps(&mut self) {
        let m = self.s.len();
        let jump = TAU * self.winding as f64;
        let (a1, _) = numerics::periodic_derivatives(&self.s, &self.alpha, TAU, jump);
        let (p1, _) = numerics::periodic_derivatives(&self.s, &self.p, TAU, 0.0);
        let w: Vec<f64> = (0..m).map(|i| p1[i] - self.z[i] * a1[i]).collect();
        let (changes, _) = numerics::robust_sign_changes(&w, SignChangeOptions::default());
        self.cusp_marks = changes.iter().map(|c| c.before).collect();
    }

    /// Cooriented curvature per sample, from the traced points alone:
    /// `κ = ⟨X″, d⟩ / ⟨X′, X′⟩` (finite differences on the world points).
    pub fn cooriented_curvature(&self) -> Vec<f64> {
        let m = self.s.len();
        let xs: Vec<f64> = self.points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p.y).collect();
        let (x1, x2) = numerics::periodic_derivatives(&self.s, &xs, TAU, 0.0);
        let (y1, y2) = numerics::periodic_derivatives(&self.s, &ys, TAU, 0.0);
        (0..m)
            .map(|i| {
                let d = self.ray_dir[i];
                let num = x2[i] * d.x + y2[i] * d.y;
                let den = x1[i] * x1[i] + y1[i] * y1[i];
                num / den
            })
            .collect()
    }

    /// Normal-line family reconstructed from the traced points: tangents by
    /// finite differences, the stored coorientation only fixing signs.
    pub fn normal_family(&self, source: Vec2) -> Result<CylinderCurve> {
        normal_family_from(&self.s, &self.points, &self.ray_dir, source)
    }

    /// Evolute: envelope of the finite-difference normal family.  For
    /// immersed fronts this reproduces the caustic of the generating beam —
    /// measured, not assumed.
    pub fn evolute(&self, source: Vec2) -> Result<PlanarCurveWithCusps> {
        envelope_of_family(&self.normal_family(source)?, source)
    }

    /// Evolute with Richardson-extrapolated points (requires a uniform
    /// sample grid of even length; returns half-resolution points).  Cusps
    /// and flags come from the full-resolution envelope.
    pub fn evolute_refined(&self, source: Vec2) -> Result<PlanarCurveWithCusps> {
        let fine = self.normal_family(source)?;
        let result_fine = envelope_of_family(&fine, source)?;
        if result_fine.degenerate.is_some() {
            return Ok(result_fine);
        }
        let sub = |v: &[Vec2]| -> Vec<Vec2> { v.iter().step_by(2).cloned().collect() };
        let s_half: Vec<f64> = self.s.iter().step_by(2).cloned().collect();
        let coarse =
            normal_family_from(&s_half, &sub(&self.points), &sub(&self.ray_dir), source)?;
        let (s, pts, finite, escape) = richardson_points(&fine, &coarse, source);
        let (s_out, points, arc_id) =
            assemble_traced(&s, &pts, &finite, &escape, &result_fine.cusps);
        Ok(PlanarCurveWithCusps {
            s: s_out,
            points,
            arc_id,
            cusps: result_fine.cusps,
            degenerate: None,
            passes_infinity: result_fine.passes_infinity,
        })
    }
}

fn normal_family_from(
    s: &[f64],
    points: &[Vec2],
    ray_dir: &[Vec2],
    source: Vec2,
) -> Result<CylinderCurve> {
    let m = s.len();
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    let (x1, _) = numerics::periodic_derivatives(s, &xs, TAU, 0.0);
    let (y1, _) = numerics::periodic_derivatives(s, &ys, TAU, 0.0);
    let mut alpha_raw = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    for i in 0..m {
        let tangent = Vec2::new(x1[i], y1[i]);
        if tangent.norm() == 0.0 {
            return Err(Error::DegenerateTangent { t: s[i] });
        }
        let mut nu = tangent.perp().normalized();
        if nu.dot(ray_dir[i]) < 0.0 {
            nu = -nu;
        }
        alpha_raw.push(nu.angle());
        p.push((points[i] - source).det(nu));
    }
    geom::unwrap_angles(&mut alpha_raw);
    CylinderCurve::from_samples(s.to_vec(), alpha_raw, p, TAU)
}

/// Vertex census of a front: robust extrema of the cooriented curvature.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VertexCensus {
    pub count: usize,
    /// Source parameters of the vertices (parabolic refinement).
    pub locations: Vec<f64>,
    /// Curvature is constant to working precision (circle front): vertex
    /// counting is meaningless and `count` is zero.
    pub constant_curvature: bool,
}

/// Count the vertices of a front.  The curve is split at front cusps (the
/// curvature has poles there) and extrema are counted per smooth arc.
pub fn vertex_census(front: &Front) -> VertexCensus {
    let kappa = front.cooriented_curvature();
    let m = kappa.len();
    let k_min = kappa.iter().cloned().fold(f64::INFINITY, f64::min);
    let k_max = kappa.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = k_max - k_min;
    let k_scale = k_min.abs().max(k_max.abs()).max(1e-300);
    if spread < tolerances::CONST_CURVATURE_REL * k_scale {
        return VertexCensus { count: 0, locations: Vec::new(), constant_curvature: true };
    }
    let plateau = tolerances::PLATEAU_TOL * spread.max(1e-300);

    let refine = |i: usize| -> f64 {
        // Parabola through (s, κ) at i−1, i, i+1 (uniform spacing assumed
        // only locally; good enough for a location label).
        let im = (i + m - 1) % m;
        let ip = (i + 1) % m;
        let (k0, k1, k2) = (kappa[im], kappa[i], kappa[ip]);
        let denom = k0 - 2.0 * k1 + k2;
        let ds = TAU / m as f64;
        if denom.abs() < 1e-300 {
            return front.s[i];
        }
        let shift = 0.5 * (k0 - k2) / denom;
        geom::wrap_angle(front.s[i] + shift.clamp(-1.0, 1.0) * ds)
    };

    let mut locations = Vec::new();
    if front.cusp_marks.is_empty() {
        // Cyclic count over the whole closed curve.
        let mut dirs: Vec<(usize, i8)> = Vec::new();
        for i in 0..m {
            let d = kappa[(i + 1) % m] - kappa[i];
            if d > plateau {
                dirs.push((i, 1));
            } else if d < -plateau {
                dirs.push((i, -1));
            }
        }
        let len = dirs.len();
        if len >= 2 {
            for k in 0..len {
                let (_, d1) = dirs[k];
                let (i2, d2) = dirs[(k + 1) % len];
                if d1 != d2 {
                    locations.push(refine(i2));
                }
            }
        }
    } else {
        // Count interior extrema on each arc between consecutive cusps.
        let marks = &front.cusp_marks;
        let c = marks.len();
        for a in 0..c {
            let start = (marks[a] + 1) % m;
            let end = marks[(a + 1) % c]; // inclusive
            let mut idx = Vec::new();
            let mut i = start;
            loop {
                idx.push(i);
                if i == end {
                    break;
                }
                i = (i + 1) % m;
            }
            let vals: Vec<f64> = idx.iter().map(|&i| kappa[i]).collect();
            // Direction changes strictly inside the arc.
            let mut dirs: Vec<(usize, i8)> = Vec::new();
            for w in 0..vals.len().saturating_sub(1) {
                let d = vals[w + 1] - vals[w];
                if d > plateau {
                    dirs.push((w, 1));
                } else if d < -plateau {
                    dirs.push((w, -1));
                }
            }
            for w in 0..dirs.len().saturating_sub(1) {
                if dirs[w].1 != dirs[w + 1].1 {
                    locations.push(refine(idx[dirs[w + 1].0]));
                }
            }
        }
    }
    locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    VertexCensus { count: locations.len(), locations, constant_curvature: false }
}

/// Symmetric Hausdorff distance between two traced curves, arc-aware (no
/// segment ever bridges a cusp or an at-infinity gap) and clipped: sample
/// points farther than `clip` from `center` are ignored on both sides.
pub fn hausdorff_between(
    a: &PlanarCurveWithCusps,
    b: &PlanarCurveWithCusps,
    center: Vec2,
    clip: f64,
) -> f64 {
    let arcs_of = |c: &PlanarCurveWithCusps| -> Vec<Vec<Vec2>> {
        c.arcs().into_iter().map(|r| c.points[r].to_vec()).collect()
    };
    let arcs_a = arcs_of(a);
    let arcs_b = arcs_of(b);
    let one_way = |pts: &[Vec<Vec2>], arcs: &[Vec<Vec2>]| -> f64 {
        let mut worst = 0.0_f64;
        for arc in pts {
            for &x in arc {
                if x.dist(center) > clip {
                    continue;
                }
                let mut best = f64::INFINITY;
                for other in arcs {
                    if other.len() >= 2 {
                        best = best.min(numerics::point_polyline_dist(x, other));
                    } else if other.len() == 1 {
                        best = best.min(x.dist(other[0]));
                    }
                }
                worst = worst.max(best);
            }
        }
        worst
    };
    one_way(&arcs_a, &arcs_b).max(one_way(&arcs_b, &arcs_a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::BeamSource;
    use crate::billiard::ReflectionLaw;
    use crate::oval::OvalFamily;

    fn ellipse(a: f64, b: f64, src: Vec2) -> Oval {
        Oval::build(OvalFamily::Ellipse { a, b }, src).unwrap()
    }

    #[test]
    fn evolute_of_an_ellipse_is_the_astroid() {
        // Normal lines of (2cos t, sin t) envelope
        // ((a²−b²)/a·cos³t, −(a²−b²)/b·sin³t).
        let oval = ellipse(2.0, 1.0, Vec2::ZERO);
        let front = Front::from_oval(&oval);
        let evolute = front.evolute(oval.source()).unwrap();
        assert!(evolute.degenerate.is_none());
        assert_eq!(evolute.cusp_count(), 4);
        assert!(!evolute.passes_infinity);
        for (k, &pt) in evolute.points.iter().enumerate() {
            let t = evolute.s[k];
            let expect = Vec2::new(1.5 * t.cos().powi(3), -3.0 * t.sin().powi(3));
            assert!(pt.dist(expect) < 1e-5, "evolute off astroid at t={t}: {pt:?} vs {expect:?}");
        }
    }

    #[test]
    fn source_fronts_are_circles() {
        let oval = ellipse(2.0, 1.0, Vec2::new(0.6, 0.2));
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        let front = normal_front(&sys, 0, 0.7, 1024).unwrap();
        assert!(front.closure_gap < 1e-10);
        for &x in &front.points {
            assert!((x.dist(oval.source()) - 0.7).abs() < 1e-12);
        }
        let census = vertex_census(&front);
        assert!(census.constant_curvature);
        let kappa = front.cooriented_curvature();
        // Centre of curvature X + d/κ is the source for every sample
        // (tolerance set by the O(h²) finite-difference curvature bias).
        for i in (0..kappa.len()).step_by(111) {
            let center = front.points[i] + (1.0 / kappa[i]) * front.ray_dir[i];
            assert!(center.dist(oval.source()) < 1e-4);
        }
    }

    #[test]
    fn focal_beam_fronts_are_circles_about_the_other_focus() {
        let c = (4.0_f64 - 1.0).sqrt();
        let oval = ellipse(2.0, 1.0, Vec2::new(c, 0.0));
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        let front = normal_front(&sys, 1, 5.0, 4096).unwrap();
        let f2 = Vec2::new(-c, 0.0);
        let d0 = front.points[0].dist(f2);
        for &x in &front.points {
            assert!((x.dist(f2) - d0).abs() < 1e-7, "not a circle about F2");
        }
        assert!(vertex_census(&front).constant_curvature);
    }

    #[test]
    fn focal_beam_caustics_degenerate_to_the_foci() {
        let c = (4.0_f64 - 1.0).sqrt();
        let oval = ellipse(2.0, 1.0, Vec2::new(c, 0.0));
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        let beam1 = sys.beam(1, 512).unwrap();
        let env1 = envelope(&sys, &beam1).unwrap();
        let f2 = env1.degenerate.expect("C1 from a focus must be concurrent");
        assert!(f2.dist(Vec2::new(-c, 0.0)) < 1e-9, "wrong focus: {f2:?}");
        let beam2 = sys.beam(2, 512).unwrap();
        let env2 = envelope(&sys, &beam2).unwrap();
        let f1 = env2.degenerate.expect("C2 from a focus must be concurrent");
        assert!(f1.dist(Vec2::new(c, 0.0)) < 1e-9, "wrong focus: {f1:?}");
    }

    #[test]
    fn orthotomic_of_a_circle_is_a_limacon() {
        let d = 0.5;
        let oval = ellipse(1.0, 1.0, Vec2::new(d, 0.0));
        let orth = orthotomic(&oval, 512);
        for (k, &z) in orth.points.iter().enumerate() {
            let t = orth.t[k];
            let expect = 2.0 * (1.0 - d * t.cos()) * Vec2::new(t.cos(), t.sin());
            assert!(z.dist(expect) < 1e-12, "limaçon mismatch at t={t}");
            // Reflected rays are normal to the orthotomic.
            assert!(orth.coorient[k].dot(orth.tangents[k]).abs() < 1e-10);
        }
        // Immersed: the analytic tangent never vanished (normalized() of a
        // zero vector would be NaN and fail the dot test above).
    }

    #[test]
    fn even_touches_of_the_direction_rate_mark_infinite_branches() {
        // Circle with the source on the axis: the first caustic's fourth
        // cusp lies at infinity down the axis — α′ touches zero
        // quadratically at s = 0 without changing sign while both arms run
        // off along the axis (x ~ −1/(3s²)).  The flag must not depend on
        // whether a sample lands exactly on the touch.
        let oval = ellipse(1.0, 1.0, Vec2::new(0.5, 0.0));
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        for offset in [0.0, 0.5] {
            let m = 1024usize;
            let mut s = Vec::with_capacity(m);
            let mut alpha = Vec::with_capacity(m);
            let mut p = Vec::with_capacity(m);
            for i in 0..m {
                let si = TAU * (i as f64 + offset) / m as f64;
                let (a, q) = sys.line_at(si, 1).unwrap();
                s.push(si);
                alpha.push(a);
                p.push(q);
            }
            let curve = CylinderCurve::from_samples(s, alpha, p, TAU).unwrap();
            let env = envelope_of_family(&curve, oval.source()).unwrap();
            assert!(env.passes_infinity, "missed the infinite branch at offset {offset}");
            assert_eq!(env.cusp_count(), 4, "cusp count at offset {offset}");
            let missing: Vec<&CuspPoint> =
                env.cusps.iter().filter(|c| c.point.is_none()).collect();
            assert_eq!(missing.len(), 1, "expected one cusp at infinity at offset {offset}");
            let s0 = missing[0].s;
            assert!(s0.min(TAU - s0) < 0.02, "infinite cusp misplaced: s = {s0}");
            for c in &env.cusps {
                if let Some([x, y]) = c.point {
                    assert!(x.hypot(y) < 10.0, "finite cusp escaped: ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn orthotomic_evolute_matches_the_reflected_caustic() {
        let oval = ellipse(2.0, 1.0, Vec2::new(0.6, 0.2));
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        let m = 8192;
        let dual = orthotomic(&oval, m).evolute(oval.source()).unwrap();
        let direct = envelope_dense(&sys, 1, m).unwrap();
        assert_eq!(dual.cusp_count(), direct.cusp_count());
        let clip = 10.0 * oval.circumradius_about_source();
        let d = hausdorff_between(&dual, &direct, oval.source(), clip);
        assert!(d < 1e-4, "pipelines disagree: hausdorff {d}");
    }

    #[test]
    fn vertices_of_fronts_count_the_caustic_cusps() {
        let oval = ellipse(2.0, 1.0, Vec2::new(0.6, 0.2));
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        let beam = sys.beam(1, 1024).unwrap();
        let caustic = envelope(&sys, &beam).unwrap();
        assert!(caustic.cusp_count() >= 4);
        for z0 in [2.0, 3.5] {
            let front = normal_front(&sys, 1, z0, 4096).unwrap();
            let census = vertex_census(&front);
            assert!(!census.constant_curvature);
            assert_eq!(
                census.count,
                caustic.cusp_count(),
                "vertices at z0={z0} vs cusps: {} vs {}",
                census.count,
                caustic.cusp_count()
            );
        }
    }

    #[test]
    fn envelope_of_the_tangent_family_is_the_oval() {
        // Tangent lines of the boundary envelope the boundary itself.
        // Richardson extrapolation across a grid halving kills the O(h²)
        // finite-difference bias, so the match is tight.
        let oval = Oval::build(
            OvalFamily::PerturbedEllipse { c0: 0.5, c1: 0.25 },
            Vec2::new(0.1, -0.2),
        )
        .unwrap();
        let fine = oval.tangent_line_curve(1);
        let coarse = CylinderCurve::from_samples(
            fine.s.iter().step_by(2).cloned().collect(),
            fine.alpha.iter().step_by(2).cloned().collect(),
            fine.p.iter().step_by(2).cloned().collect(),
            TAU,
        )
        .unwrap();
        let (s, pts, finite, _) = super::richardson_points(&fine, &coarse, oval.source());
        let mut worst = 0.0_f64;
        for k in 0..s.len() {
            assert!(finite[k]);
            worst = worst.max(pts[k].dist(oval.point(s[k])));
        }
        assert!(worst < 1e-8, "tangent-family envelope misses the oval by {worst:.3e}");
    }

    #[test]
    fn front_evolute_reproduces_the_beam_caustic() {
        // Evolute of an involute: the caustic rebuilt from any one of its
        // wave fronts matches the caustic built from the beam.  The circle
        // with the source at 0.3 keeps the caustic bounded, so a front
        // beyond it is cusp-free and its tangents are clean everywhere.
        let oval = ellipse(1.0, 1.0, Vec2::new(0.3, 0.0));
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        let m = 8192;
        let front = normal_front(&sys, 1, 4.0, m).unwrap();
        assert!(front.cusp_marks.is_empty(), "pick z0 beyond the caustic");
        let via_front = front.evolute_refined(oval.source()).unwrap();
        let direct = envelope_dense_refined(&sys, 1, m / 2).unwrap();
        assert_eq!(via_front.cusp_count(), direct.cusp_count());
        let clip = 10.0 * oval.circumradius_about_source();
        let d = hausdorff_between(&via_front, &direct, oval.source(), clip);
        assert!(d < 1e-6, "front evolute off the caustic: hausdorff {d:.3e}");
    }

    #[test]
    fn orthotomic_vertices_sit_at_the_caustic_cusp_parameters() {
        // Circle, source (0.5, 0): four vertices, and each one's boundary
        // parameter matches the first-bounce point of a caustic cusp ray.
        let oval = ellipse(1.0, 1.0, Vec2::new(0.5, 0.0));
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        let beam = sys.beam(1, 1024).unwrap();
        let caustic = envelope(&sys, &beam).unwrap();
        assert_eq!(caustic.cusp_count(), 4);
        let orth = orthotomic(&oval, 8192);
        let census = orth.vertex_census(&oval);
        assert_eq!(census.count, 4);
        for cusp in &caustic.cusps {
            let hit = crate::billiard::chord_of(&oval, cusp.s, 0.0).unwrap().t_exit;
            let best = census
                .locations
                .iter()
                .map(|&v| {
                    let d = (v - hit).abs() % TAU;
                    d.min(TAU - d)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "no vertex near bounce point {hit}: off by {best:.3e}");
        }
    }

    #[test]
    fn shear_families_do_not_close_into_fronts() {
        let oval = ellipse(1.0, 1.0, Vec2::new(0.5, 0.0));
        let sys = RaySystem::new(&oval, ReflectionLaw::ShearControl, &BeamSource::Point).unwrap();
        assert!(matches!(normal_front(&sys, 1, 1.0, 512), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn concurrent_families_are_detected_with_tight_residual() {
        // Lines through (0.4, −0.3), plus one far-from-concurrent family.
        let pt = Vec2::new(0.4, -0.3);
        let curve = CylinderCurve::from_graph(256, |a| pt.x * a.sin() - pt.y * a.cos());
        let hit = concurrent_point(&curve, 1e-9).expect("pencil not detected");
        assert!(hit.dist(pt) < 1e-12);
        let other = CylinderCurve::from_graph(256, |a| 0.5 + 0.1 * (2.0 * a).cos());
        assert!(concurrent_point(&other, 1e-9).is_none());
    }
}
