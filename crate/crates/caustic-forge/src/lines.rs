//! Oriented lines in the plane and closed curves of lines on the cylinder.
//!
//! An oriented line is coded by the chart `(α, p)`: `α ∈ [0, 2π)` is the
//! direction angle and `p = det(X, e^{iα})` the signed offset of any point
//! `X` on the line.  The chart fixes an origin (we always put the light
//! source there), so `p` is the signed distance from the source to the line,
//! positive when the source lies to the left of the oriented line's
//! direction... precisely: `p = X·n` with `n = (sin α, −cos α)` and
//! `det(n, d) = 1` for `d = (cos α, sin α)`.
//!
//! A one-parameter family of rays is a closed curve on this cylinder, stored
//! in structure-of-arrays form with an unwrapped `α` lift so downstream
//! derivative work never fights the seam.

use std::io::Write as _;

use crate::error::{Error, Result};
use crate::geom::{self, Vec2, TAU};
use crate::numerics;

/// An oriented line, chart `(α, p)` about the current origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedLine {
    pub alpha: f64,
    pub p: f64,
}

impl OrientedLine {
    pub fn new(alpha: f64, p: f64) -> Self {
        OrientedLine { alpha, p }
    }

    /// The line through `x` with direction angle `alpha`.
    pub fn through_point(x: Vec2, alpha: f64) -> Self {
        let n = Vec2::new(alpha.sin(), -alpha.cos());
        OrientedLine { alpha, p: x.dot(n) }
    }

    /// Unit direction `e^{iα}`.
    pub fn direction(&self) -> Vec2 {
        Vec2::from_angle(self.alpha)
    }

    /// Unit normal with `det(n, d) = 1`; the foot of the perpendicular from
    /// the origin is `p·n`.
    pub fn normal(&self) -> Vec2 {
        Vec2::new(self.alpha.sin(), -self.alpha.cos())
    }

    /// Foot of the perpendicular from the origin.
    pub fn foot(&self) -> Vec2 {
        self.p * self.normal()
    }

    /// Point at signed arclength `q` from the foot, along the direction.
    pub fn point_at(&self, q: f64) -> Vec2 {
        self.foot() + q * self.direction()
    }

    /// Signed offset of `x` from the line (zero iff `x` lies on it).
    pub fn signed_offset(&self, x: Vec2) -> f64 {
        x.dot(self.normal()) - self.p
    }

    /// Same line, reversed orientation: `(α + π, −p)`.
    pub fn reversed(&self) -> Self {
        OrientedLine { alpha: geom::wrap_angle(self.alpha + std::f64::consts::PI), p: -self.p }
    }

    /// Representative with `α ∈ [0, 2π)`.
    pub fn canonical(&self) -> Self {
        OrientedLine { alpha: geom::wrap_angle(self.alpha), p: self.p }
    }

    /// Lift `(cos α, sin α, p)` to the graph cylinder embedded in 3-space.
    /// Pencils of lines through a fixed point `(a, b)` lift to plane sections
    /// with normal `(b, −a, 1)`.
    pub fn lift(&self) -> [f64; 3] {
        [self.alpha.cos(), self.alpha.sin(), self.p]
    }
}

/// A closed sampled curve on the cylinder of oriented lines.
///
/// Invariants: `s` strictly increasing in `[0, period)`; `alpha` is an
/// unwrapped lift whose closing jump is `2π·winding`; all arrays share one
/// length ≥ 3.
#[derive(Clone, Debug)]
pub struct CylinderCurve {
    pub s: Vec<f64>,
    pub alpha: Vec<f64>,
    pub p: Vec<f64>,
    pub period: f64,
    pub winding: i32,
}

impl CylinderCurve {
    /// Build from an unwrapped `alpha` lift.  The winding number is read off
    /// the closing jump, which must land within ±π/2 of a multiple of 2π.
    pub fn from_samples(s: Vec<f64>, alpha: Vec<f64>, p: Vec<f64>, period: f64) -> Result<Self> {
        let n = s.len();
        if n < 3 || alpha.len() != n || p.len() != n {
            return Err(Error::TooFewSamples { got: n.min(alpha.len()).min(p.len()), need: 3 });
        }
        let total = alpha[n - 1] - alpha[0] + geom::wrap_to_pm_pi(alpha[0] - alpha[n - 1]);
        let winding_f = total / TAU;
        let winding = winding_f.round();
        if (winding_f - winding).abs() > 0.25 {
            return Err(Error::NotClosed { gap: (winding_f - winding).abs() * TAU });
        }
        Ok(CylinderCurve { s, alpha, p, period, winding: winding as i32 })
    }

    /// Build a graph `p = f(α)` on a uniform grid of `n` angles; the curve
    /// parameter is `α` itself and the winding is 1.
    pub fn from_graph(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let alpha: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let p: Vec<f64> = alpha.iter().map(|&a| f(a)).collect();
        CylinderCurve { s: alpha.clone(), alpha, p, period: TAU, winding: 1 }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// The `i`-th sample as an oriented line (canonical chart).
    pub fn line(&self, i: usize) -> OrientedLine {
        OrientedLine::new(geom::wrap_angle(self.alpha[i]), self.p[i]).canonical()
    }

    /// Closing jump of the lift: `α(s₀ + period) − α(last)`.
    pub fn closing_dalpha(&self) -> f64 {
        self.alpha[0] + TAU * self.winding as f64 - self.alpha[self.len() - 1]
    }

    /// Signed area `∮ p dα` of the sample polygon on the cylinder.
    pub fn signed_area(&self) -> f64 {
        numerics::polygon_area_cylinder(&self.alpha, &self.p, self.winding)
    }

    /// Pointwise inflection indicator `D = p α′³ − p′ α″ + p″ α′`, the
    /// determinant `det[P, P′, P″]` of the lift `P = (cos α, sin α, p)`.
    /// Its sign is reparametrization-invariant (scales by speed³), so sign
    /// changes mark inflections of the line family.
    pub fn inflection_indicator(&self) -> Vec<f64> {
        let jump = TAU * self.winding as f64;
        let (a1, a2) = numerics::periodic_derivatives(&self.s, &self.alpha, self.period, jump);
        let (p1, p2) = numerics::periodic_derivatives(&self.s, &self.p, self.period, 0.0);
        (0..self.len())
            .map(|i| self.p[i] * a1[i] * a1[i] * a1[i] - p1[i] * a2[i] + p2[i] * a1[i])
            .collect()
    }

    /// Count of robust sign changes of the inflection indicator.
    pub fn inflection_count(&self) -> usize {
        let d = self.inflection_indicator();
        let (changes, _) = numerics::robust_sign_changes(&d, numerics::SignChangeOptions::default());
        changes.len()
    }

    /// True when the sample polygon is embedded on the cylinder.
    pub fn is_simple(&self) -> bool {
        !numerics::cylinder_polyline_self_intersects(&self.alpha, &self.p, self.winding)
    }

    /// Minimum forward step of the `α` lift, seam included.  Positive values
    /// mean the curve is a graph over the angle with at least that margin.
    pub fn graph_margin(&self) -> f64 {
        let n = self.len();
        let mut m = f64::INFINITY;
        for i in 0..n {
            let da = if i + 1 == n { self.closing_dalpha() } else { self.alpha[i + 1] - self.alpha[i] };
            m = m.min(da);
        }
        m
    }

    /// Write `s, alpha, p` as CSV with `#`-prefixed header lines and full
    /// float precision.
    pub fn write_csv(&self, path: &std::path::Path, headers: &[String]) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for h in headers {
            writeln!(f, "# {h}")?;
        }
        writeln!(f, "s,alpha,p")?;
        for i in 0..self.len() {
            writeln!(f, "{:.16e},{:.16e},{:.16e}", self.s[i], self.alpha[i], self.p[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn through_point_and_offset_are_inverse() {
        let x = Vec2::new(1.3, -0.4);
        for k in 0..12 {
            let alpha = TAU * k as f64 / 12.0;
            let l = OrientedLine::through_point(x, alpha);
            assert!(l.signed_offset(x).abs() < 1e-15);
            assert!(l.signed_offset(l.point_at(2.7)).abs() < 1e-14);
            // Normal frame is right-handed: det(n, d) = 1.
            assert!((l.normal().det(l.direction()) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reversal_is_an_involution() {
        let l = OrientedLine::new(1.1, 0.7);
        let r = l.reversed();
        assert!((r.p + l.p).abs() < 1e-15);
        let rr = r.reversed();
        assert!((rr.alpha - l.alpha).abs() < 1e-15 && (rr.p - l.p).abs() < 1e-15);
        // Same unoriented line: offsets of any point agree up to sign.
        let x = Vec2::new(0.2, 0.9);
        assert!((l.signed_offset(x) + r.signed_offset(x)).abs() < 1e-15);
    }

    #[test]
    fn pencil_through_a_point_lifts_to_a_plane() {
        let pt = Vec2::new(0.8, -0.3);
        let nu = [pt.y, -pt.x, 1.0];
        for k in 0..32 {
            let alpha = TAU * k as f64 / 32.0;
            let p = OrientedLine::through_point(pt, alpha).lift();
            let dot = nu[0] * p[0] + nu[1] * p[1] + nu[2] * p[2];
            assert!(dot.abs() < 1e-15, "lift off plane: {dot}");
        }
    }

    #[test]
    fn harmonic_graph_has_zero_area_and_cos2_indicator() {
        let eps = 0.05;
        let c = CylinderCurve::from_graph(2048, |a| eps * (2.0 * a).cos());
        assert!(c.signed_area().abs() < 1e-12);
        let d = c.inflection_indicator();
        for (i, &a) in c.alpha.iter().enumerate() {
            let expect = -3.0 * eps * (2.0 * a).cos();
            assert!((d[i] - expect).abs() < 1e-5, "D mismatch at {a}: {} vs {expect}", d[i]);
        }
        assert_eq!(c.inflection_count(), 4);
        assert!(c.is_simple());
        assert!(c.graph_margin() > 0.0);
    }

    #[test]
    fn constant_graph_is_a_circle_family() {
        let r = 0.8;
        let c = CylinderCurve::from_graph(512, |_| r);
        assert!((c.signed_area() - TAU * r).abs() < 1e-12);
        assert_eq!(c.inflection_count(), 0);
        let l = c.line(17);
        // Tangent lines of a circle about the origin stay at distance r.
        assert!((l.foot().norm() - r).abs() < 1e-14);
    }

    #[test]
    fn winding_read_from_lift() {
        let n = 128;
        let s: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let alpha: Vec<f64> = s.iter().map(|&t| 2.0 * t + 0.1 * t.sin()).collect();
        let p = vec![1.0; n];
        let c = CylinderCurve::from_samples(s, alpha, p, TAU).unwrap();
        assert_eq!(c.winding, 2);
    }
}
