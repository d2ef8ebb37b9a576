//! Convex oval boundaries ("mirrors") with a marked interior light source.
//!
//! Every family carries an implicit polynomial `f` with `f < 0` inside.  The
//! ellipse is parametrized by the standard trigonometric angle; the other
//! families are parametrized by the polar angle about the source, with the
//! radius recovered from `f = 0` by Newton's method and differentiated
//! implicitly, so tangents and curvatures are exact up to root tolerance
//! (no finite differences on the boundary itself).
//!
//! Construction validates the data the rest of the crate relies on: the
//! source is strictly interior, the boundary is a single closed strictly
//! convex loop, and the radial solve succeeds everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Vec2, TAU};
use crate::lines::CylinderCurve;
use crate::tolerances;

/// Bivariate polynomial Σ c·x^i·y^j, stored as `(i, j, c)` terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly2 {
    pub terms: Vec<(u32, u32, f64)>,
}

impl Poly2 {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        Poly2 { terms }
    }

    pub fn eval(&self, x: Vec2) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * x.x.powi(i as i32) * x.y.powi(j as i32))
            .sum()
    }

    pub fn grad(&self, x: Vec2) -> Vec2 {
        let mut g = Vec2::ZERO;
        for &(i, j, c) in &self.terms {
            if i > 0 {
                g.x += c * i as f64 * x.x.powi(i as i32 - 1) * x.y.powi(j as i32);
            }
            if j > 0 {
                g.y += c * j as f64 * x.x.powi(i as i32) * x.y.powi(j as i32 - 1);
            }
        }
        g
    }

    /// Hessian as `(f_xx, f_xy, f_yy)`.
    pub fn hessian(&self, x: Vec2) -> (f64, f64, f64) {
        let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
        for &(i, j, c) in &self.terms {
            let (fi, fj) = (i as f64, j as f64);
            if i >= 2 {
                xx += c * fi * (fi - 1.0) * x.x.powi(i as i32 - 2) * x.y.powi(j as i32);
            }
            if i >= 1 && j >= 1 {
                xy += c * fi * fj * x.x.powi(i as i32 - 1) * x.y.powi(j as i32 - 1);
            }
            if j >= 2 {
                yy += c * fj * (fj - 1.0) * x.x.powi(i as i32) * x.y.powi(j as i32 - 2);
            }
        }
        (xx, xy, yy)
    }

    /// Curvature of the level set `f = 0` at a point on it, oriented with
    /// the region `f < 0` on the left (counterclockwise travel):
    /// `κ = (f_xx f_y² − 2 f_xy f_x f_y + f_yy f_x²) / |∇f|³`.
    pub fn level_set_curvature(&self, x: Vec2) -> f64 {
        let g = self.grad(x);
        let (xx, xy, yy) = self.hessian(x);
        let num = xx * g.y * g.y - 2.0 * xy * g.x * g.y + yy * g.x * g.x;
        num / g.norm().powi(3)
    }
}

/// The supported mirror shapes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OvalFamily {
    /// `(x/a)² + (y/b)² = 1`
    Ellipse { a: f64, b: f64 },
    /// `(x/a)⁴ + (y/b)⁴ = 1`
    SuperEllipse4 {
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "one")]
        b: f64,
    },
    /// `c0·x² + (1 + c1·x)·y² = 1`
    PerturbedEllipse { c0: f64, c1: f64 },
    /// Arbitrary polynomial level set `f = 0`, `f < 0` inside.
    Implicit { poly: Poly2 },
}

fn one() -> f64 {
    1.0
}

impl OvalFamily {
    /// Implicit form of the boundary, `f < 0` inside.
    pub fn implicit(&self) -> Poly2 {
        match self {
            OvalFamily::Ellipse { a, b } => Poly2::new(vec![
                (2, 0, 1.0 / (a * a)),
                (0, 2, 1.0 / (b * b)),
                (0, 0, -1.0),
            ]),
            OvalFamily::SuperEllipse4 { a, b } => Poly2::new(vec![
                (4, 0, 1.0 / a.powi(4)),
                (0, 4, 1.0 / b.powi(4)),
                (0, 0, -1.0),
            ]),
            OvalFamily::PerturbedEllipse { c0, c1 } => Poly2::new(vec![
                (2, 0, *c0),
                (0, 2, 1.0),
                (1, 2, *c1),
                (0, 0, -1.0),
            ]),
            OvalFamily::Implicit { poly } => poly.clone(),
        }
    }

    fn validate_params(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::ConfigInvalid(msg.to_string()));
        match self {
            OvalFamily::Ellipse { a, b } | OvalFamily::SuperEllipse4 { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return bad("semi-axes must be finite and positive");
                }
            }
            OvalFamily::PerturbedEllipse { c0, c1 } => {
                if !(c0.is_finite() && c1.is_finite() && *c0 > 0.0) {
                    return bad("perturbed ellipse needs finite coefficients with c0 > 0");
                }
            }
            OvalFamily::Implicit { poly } => {
                if poly.terms.is_empty() || poly.terms.iter().any(|t| !t.2.is_finite()) {
                    return bad("implicit polynomial must be nonempty with finite coefficients");
                }
            }
        }
        Ok(())
    }
}

enum Param {
    Trig { a: f64, b: f64 },
    RadialAboutSource,
}

struct GridTables {
    t: Vec<f64>,
    point: Vec<Vec2>,
    speed: Vec<f64>,
    kappa: Vec<f64>,
    tangent_lift: Vec<f64>,
    arclen: Vec<f64>,
    r: Vec<f64>,
    perimeter: f64,
    r_min: f64,
    r_max: f64,
}

/// A validated convex mirror with its interior light source.
pub struct Oval {
    family: OvalFamily,
    implicit: Poly2,
    source: Vec2,
    param: Param,
    grid: GridTables,
}

impl Oval {
    /// Validate and build, caching boundary tables on a uniform parameter
    /// grid of [`tolerances::OVAL_GRID`] nodes.
    pub fn build(family: OvalFamily, source: Vec2) -> Result<Self> {
        family.validate_params()?;
        let implicit = family.implicit();
        if !(implicit.eval(source) < 0.0) {
            return Err(Error::SourceOutside);
        }
        let param = match family {
            OvalFamily::Ellipse { a, b } => Param::Trig { a, b },
            _ => Param::RadialAboutSource,
        };
        let mut oval = Oval {
            family,
            implicit,
            source,
            param,
            grid: GridTables {
                t: Vec::new(),
                point: Vec::new(),
                speed: Vec::new(),
                kappa: Vec::new(),
                tangent_lift: Vec::new(),
                arclen: Vec::new(),
                r: Vec::new(),
                perimeter: 0.0,
                r_min: 0.0,
                r_max: 0.0,
            },
        };
        oval.fill_grid(tolerances::OVAL_GRID)?;
        oval.validate_geometry()?;
        Ok(oval)
    }

    fn fill_grid(&mut self, n: usize) -> Result<()> {
        let mut t = Vec::with_capacity(n);
        let mut point = Vec::with_capacity(n);
        let mut speed = Vec::with_capacity(n);
        let mut kappa = Vec::with_capacity(n);
        let mut tangent_raw = Vec::with_capacity(n);
        let mut r = Vec::with_capacity(n);
        let mut warm = None;
        for i in 0..n {
            let ti = TAU * i as f64 / n as f64;
            let loc = self.solve_local(ti, warm)?;
            warm = Some(loc.r);
            t.push(ti);
            point.push(loc.point);
            speed.push(loc.velocity.norm());
            kappa.push(loc.velocity.det(loc.acceleration) / loc.velocity.norm().powi(3));
            tangent_raw.push(loc.velocity.angle());
            r.push(loc.r);
        }
        geom::unwrap_angles(&mut tangent_raw);
        let mut arclen = Vec::with_capacity(n);
        let dt = TAU / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            arclen.push(acc);
            let next = speed[(i + 1) % n];
            acc += 0.5 * (speed[i] + next) * dt;
        }
        let perimeter = acc;
        let (mut r_min, mut r_max) = (f64::INFINITY, 0.0_f64);
        for (pt, ri) in point.iter().zip(&r) {
            let d = pt.dist(self.source);
            r_min = r_min.min(d);
            r_max = r_max.max(d);
            let _ = ri;
        }
        self.grid = GridTables { t, point, speed, kappa, tangent_lift: tangent_raw, arclen, r, perimeter, r_min, r_max };
        Ok(())
    }

    fn validate_geometry(&self) -> Result<()> {
        let n = self.grid.t.len();
        // Convexity: families like the quartic have isolated exact
        // curvature zeros at symmetry points, and a grid node can land
        // arbitrarily close to one, so a pointwise positive floor would
        // reject legitimate mirrors.  Reject instead on evidence of a real
        // defect: curvature measurably negative anywhere (a dent), or a run
        // of consecutive sub-floor nodes (a straight segment).  An isolated
        // flat touch passes; its neighbours one cell away already sit
        // orders of magnitude above the floor.
        let mut run = 0usize;
        let mut lead = 0usize; // sub-floor run entering from the seam
        let mut at_start = true;
        for i in 0..n {
            let kappa = self.grid.kappa[i];
            let t = self.grid.t[i];
            if kappa < -tolerances::CONVEXITY_MIN_KAPPA {
                return Err(Error::NotConvex { t, kappa });
            }
            if kappa < tolerances::CONVEXITY_MIN_KAPPA {
                run += 1;
                if at_start {
                    lead += 1;
                }
                if run >= 3 {
                    return Err(Error::NotConvex { t, kappa });
                }
            } else {
                run = 0;
                at_start = false;
            }
        }
        if !at_start && run + lead >= 3 {
            let t = self.grid.t[0];
            return Err(Error::NotConvex { t, kappa: self.grid.kappa[0] });
        }
        // Source strictly interior to a convex loop: the boundary winds once
        // around it, i.e. det(γ − source, γ′) > 0 everywhere.
        for i in 0..n {
            let tangent = Vec2::from_angle(self.grid.tangent_lift[i]);
            if (self.grid.point[i] - self.source).det(tangent) <= 0.0 {
                return Err(Error::SourceOutside);
            }
        }
        // Tangent direction must make exactly one positive turn.
        let turn = self.grid.tangent_lift[n - 1] - self.grid.tangent_lift[0]
            + geom::wrap_to_pm_pi(self.grid.tangent_lift[0] - self.grid.tangent_lift[n - 1]);
        if (turn - TAU).abs() > 0.3 {
            return Err(Error::SelfIntersecting);
        }
        Ok(())
    }

    // ───────────────────────── local geometry ─────────────────────────

    /// Solve for the boundary point at parameter `t`, with derivatives.
    fn solve_local(&self, t: f64, warm: Option<f64>) -> Result<LocalData> {
        match self.param {
            Param::Trig { a, b } => {
                let (s, c) = t.sin_cos();
                let point = Vec2::new(a * c, b * s);
                Ok(LocalData {
                    point,
                    velocity: Vec2::new(-a * s, b * c),
                    acceleration: Vec2::new(-a * c, -b * s),
                    r: point.dist(self.source),
                })
            }
            Param::RadialAboutSource => {
                let e = Vec2::from_angle(t);
                let ep = e.perp();
                let r = self.solve_radius(t, warm)?;
                let point = self.source + r * e;
                let g = self.implicit.grad(point);
                let (hxx, hxy, hyy) = self.implicit.hessian(point);
                let he = Vec2::new(hxx * e.x + hxy * e.y, hxy * e.x + hyy * e.y);
                let hep = Vec2::new(hxx * ep.x + hxy * ep.y, hxy * ep.x + hyy * ep.y);
                let f_r = g.dot(e);
                if f_r.abs() < 1e-14 {
                    return Err(Error::RadialSolveFailed { theta: t });
                }
                let f_th = r * g.dot(ep);
                let rp = -f_th / f_r;
                let f_rr = e.dot(he);
                let f_rth = g.dot(ep) + r * e.dot(hep);
                let f_thth = -r * g.dot(e) + r * r * ep.dot(hep);
                let rpp = -(f_thth + 2.0 * f_rth * rp + f_rr * rp * rp) / f_r;
                Ok(LocalData {
                    point,
                    velocity: rp * e + r * ep,
                    acceleration: (rpp - r) * e + 2.0 * rp * ep,
                    r,
                })
            }
        }
    }

    /// Newton solve of `f(source + r·e(t)) = 0` for `r > 0`.
    fn solve_radius(&self, t: f64, warm: Option<f64>) -> Result<f64> {
        let e = Vec2::from_angle(t);
        let fval = |r: f64| self.implicit.eval(self.source + r * e);
        let fboth = |r: f64| {
            let x = self.source + r * e;
            (self.implicit.eval(x), self.implicit.grad(x).dot(e))
        };
        // Warm Newton first: boundary radii vary smoothly with t.
        if let Some(r0) = warm {
            let mut r = r0;
            for _ in 0..30 {
                let (f, df) = fboth(r);
                if df.abs() < 1e-300 {
                    break;
                }
                let step = f / df;
                r -= step;
                if !(r > 0.0) || !r.is_finite() {
                    break;
                }
                if step.abs() <= 1e-15 * (1.0 + r.abs()) {
                    if fval(r).abs() < 1e-10 {
                        return Ok(r);
                    }
                    break;
                }
            }
        }
        // Bracket by doubling, then safeguarded Newton.
        let mut hi = warm.unwrap_or(1.0).max(1e-6);
        let mut tries = 0;
        while fval(hi) <= 0.0 {
            hi *= 2.0;
            tries += 1;
            if tries > 80 {
                return Err(Error::RadialSolveFailed { theta: t });
            }
        }
        let lo = 0.0;
        let root = crate::numerics::newton_safeguarded(
            fboth,
            lo,
            hi,
            fval(lo) > 0.0,
            0.5 * (lo + hi),
        );
        if !(root > 0.0) || fval(root).abs() > 1e-9 {
            return Err(Error::RadialSolveFailed { theta: t });
        }
        Ok(root)
    }

    /// Warm-start radius for arbitrary `t` by linear interpolation in the
    /// grid table.
    fn warm_radius(&self, t: f64) -> f64 {
        let n = self.grid.t.len();
        let tw = geom::wrap_angle(t);
        let x = tw / TAU * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let frac = x - i as f64;
        let r0 = self.grid.r[i];
        let r1 = self.grid.r[(i + 1) % n];
        r0 + frac * (r1 - r0)
    }

    fn local(&self, t: f64) -> LocalData {
        let warm = match self.param {
            Param::Trig { .. } => None,
            Param::RadialAboutSource => Some(self.warm_radius(t)),
        };
        // Radii interpolate well; by this point construction has validated
        // the solve everywhere, so failure here indicates a logic error.
        self.solve_local(geom::wrap_angle(t), warm)
            .expect("boundary solve failed after successful validation")
    }

    // ───────────────────────── public geometry ─────────────────────────

    pub fn family(&self) -> &OvalFamily {
        &self.family
    }

    pub fn implicit(&self) -> &Poly2 {
        &self.implicit
    }

    pub fn source(&self) -> Vec2 {
        self.source
    }

    /// Boundary point at parameter `t` (world frame).
    pub fn point(&self, t: f64) -> Vec2 {
        self.local(t).point
    }

    /// dγ/dt.
    pub fn velocity(&self, t: f64) -> Vec2 {
        self.local(t).velocity
    }

    /// d²γ/dt².
    pub fn acceleration(&self, t: f64) -> Vec2 {
        self.local(t).acceleration
    }

    /// Unit tangent.
    pub fn tangent(&self, t: f64) -> Vec2 {
        self.local(t).velocity.normalized()
    }

    /// |dγ/dt|.
    pub fn speed(&self, t: f64) -> f64 {
        self.local(t).velocity.norm()
    }

    /// Curvature (positive: counterclockwise convex loop).
    pub fn curvature(&self, t: f64) -> f64 {
        let l = self.local(t);
        l.velocity.det(l.acceleration) / l.velocity.norm().powi(3)
    }

    /// Continuous lift of the tangent direction angle, pinned to the cached
    /// grid lift so queries never jump by 2π between neighbouring `t`.
    pub fn tangent_angle_lifted(&self, t: f64) -> f64 {
        let raw = self.local(t).velocity.angle();
        let n = self.grid.t.len();
        let i = ((geom::wrap_angle(t) / TAU * n as f64).round() as usize) % n;
        let anchor = self.grid.tangent_lift[i];
        anchor + geom::wrap_to_pm_pi(raw - anchor)
    }

    pub fn perimeter(&self) -> f64 {
        self.grid.perimeter
    }

    /// Distance from the source to the nearest boundary point.
    pub fn inradius_about_source(&self) -> f64 {
        self.grid.r_min
    }

    /// Distance from the source to the farthest boundary point.
    pub fn circumradius_about_source(&self) -> f64 {
        self.grid.r_max
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.implicit.eval(x) < 0.0
    }

    // Cached tables (uniform parameter grid).
    pub fn grid_len(&self) -> usize {
        self.grid.t.len()
    }
    pub fn grid_ts(&self) -> &[f64] {
        &self.grid.t
    }
    pub fn grid_points(&self) -> &[Vec2] {
        &self.grid.point
    }
    pub fn grid_speeds(&self) -> &[f64] {
        &self.grid.speed
    }
    pub fn grid_curvatures(&self) -> &[f64] {
        &self.grid.kappa
    }
    pub fn grid_tangent_lift(&self) -> &[f64] {
        &self.grid.tangent_lift
    }
    pub fn grid_arclens(&self) -> &[f64] {
        &self.grid.arclen
    }

    /// Family of oriented tangent lines as a cylinder curve about the
    /// source.  `orientation = +1` runs along the tangent, `−1` against it;
    /// either way the family closes with winding 1.
    pub fn tangent_line_curve(&self, orientation: i32) -> CylinderCurve {
        let n = self.grid.t.len();
        let shift = if orientation >= 0 { 0.0 } else { std::f64::consts::PI };
        let mut alpha = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.grid.tangent_lift[i] + shift;
            let d = Vec2::from_angle(a);
            alpha.push(a);
            p.push((self.grid.point[i] - self.source).det(d));
        }
        CylinderCurve { s: self.grid.t.clone(), alpha, p, period: TAU, winding: 1 }
    }

    /// `∮ p dα` over the positively oriented tangent-line family, computed
    /// with the analytic angular speed `dα/dt = κ·|γ′|` on the uniform grid
    /// (spectrally accurate).  For a convex oval this reproduces the
    /// perimeter — the support-function form of Cauchy's formula.
    pub fn crofton_integral(&self) -> f64 {
        let n = self.grid.t.len();
        let dt = TAU / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let d = Vec2::from_angle(self.grid.tangent_lift[i]);
            let p = (self.grid.point[i] - self.source).det(d);
            acc += p * self.grid.kappa[i] * self.grid.speed[i];
        }
        acc * dt
    }
}

struct LocalData {
    point: Vec2,
    velocity: Vec2,
    acceleration: Vec2,
    r: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse21() -> Oval {
        Oval::build(OvalFamily::Ellipse { a: 2.0, b: 1.0 }, Vec2::new(0.6, 0.2)).unwrap()
    }

    #[test]
    fn ellipse_perimeter_matches_elliptic_integral() {
        // 4a·E(e) for a=2, b=1, via the arithmetic–geometric mean.
        let expect = 9.688448220547675;
        let oval = ellipse21();
        assert!(
            (oval.perimeter() - expect).abs() < 1e-11,
            "perimeter {} vs {}",
            oval.perimeter(),
            expect
        );
    }

    #[test]
    fn crofton_integral_equals_perimeter() {
        for oval in [
            ellipse21(),
            Oval::build(OvalFamily::SuperEllipse4 { a: 1.0, b: 1.0 }, Vec2::new(0.3, 0.1)).unwrap(),
            Oval::build(OvalFamily::PerturbedEllipse { c0: 0.5, c1: 0.25 }, Vec2::new(0.5, 0.3)).unwrap(),
        ] {
            let rel = (oval.crofton_integral() - oval.perimeter()).abs() / oval.perimeter();
            assert!(rel < 1e-10, "relative defect {rel}");
        }
    }

    #[test]
    fn radial_families_match_implicit_curvature() {
        let oval =
            Oval::build(OvalFamily::SuperEllipse4 { a: 1.0, b: 1.0 }, Vec2::new(0.2, -0.1)).unwrap();
        for k in 0..64 {
            let t = TAU * (k as f64 + 0.37) / 64.0;
            let x = oval.point(t);
            let on_curve = oval.implicit().eval(x);
            assert!(on_curve.abs() < 1e-10, "point off the level set: {on_curve}");
            let k_param = oval.curvature(t);
            let k_level = oval.implicit().level_set_curvature(x);
            assert!(
                (k_param - k_level).abs() < 1e-9 * (1.0 + k_level.abs()),
                "curvature mismatch at t={t}: {k_param} vs {k_level}"
            );
        }
    }

    #[test]
    fn quartic_curvature_closed_form() {
        // On x⁴ + y⁴ = 1 the curvature is 3x²y²/(x⁶+y⁶)^{3/2}.
        let oval =
            Oval::build(OvalFamily::SuperEllipse4 { a: 1.0, b: 1.0 }, Vec2::new(0.0, 0.0)).unwrap();
        for k in 0..32 {
            let t = TAU * (k as f64 + 0.21) / 32.0;
            let x = oval.point(t);
            let expect = 3.0 * x.x * x.x * x.y * x.y
                / (x.x.powi(6) + x.y.powi(6)).powf(1.5);
            let got = oval.curvature(t);
            assert!((got - expect).abs() < 1e-9 * (1.0 + expect), "{got} vs {expect}");
        }
    }

    #[test]
    fn source_placement_is_validated() {
        let fam = OvalFamily::Ellipse { a: 2.0, b: 1.0 };
        assert!(matches!(
            Oval::build(fam.clone(), Vec2::new(2.5, 0.0)),
            Err(Error::SourceOutside)
        ));
        assert!(Oval::build(fam, Vec2::new(1.9, 0.0)).is_ok());
    }

    #[test]
    fn nonconvexity_is_rejected() {
        // A quartic with four dents: x⁴ + y⁴ − 1.6·x²y² = 1 has κ < 0 on the
        // diagonals.
        let poly = Poly2::new(vec![(4, 0, 1.0), (0, 4, 1.0), (2, 2, -1.6), (0, 0, -1.0)]);
        let res = Oval::build(OvalFamily::Implicit { poly }, Vec2::new(0.0, 0.0));
        assert!(matches!(res, Err(Error::NotConvex { .. })), "expected NotConvex");
    }

    #[test]
    fn tangent_family_supports_the_source_chart() {
        let oval = ellipse21();
        let fam = oval.tangent_line_curve(1);
        assert_eq!(fam.winding, 1);
        // Each tangent line passes through its boundary point.
        for k in (0..fam.len()).step_by(173) {
            let l = fam.line(k);
            let x = oval.grid_points()[k] - oval.source();
            assert!(l.signed_offset(x).abs() < 1e-12);
        }
        // Support function of a convex oval about an interior point is positive.
        assert!(fam.p.iter().all(|&v| v > 0.0));
        // Reversed orientation flips the area sign.
        let rev = oval.tangent_line_curve(-1);
        assert!((fam.signed_area() + rev.signed_area()).abs() < 1e-9);
    }

    #[test]
    fn circle_tables_are_exact() {
        let oval = Oval::build(OvalFamily::Ellipse { a: 1.0, b: 1.0 }, Vec2::ZERO).unwrap();
        assert!((oval.perimeter() - TAU).abs() < 1e-12);
        assert!((oval.inradius_about_source() - 1.0).abs() < 1e-12);
        assert!((oval.circumradius_about_source() - 1.0).abs() < 1e-12);
        for k in 0..8 {
            let t = TAU * k as f64 / 8.0;
            assert!((oval.curvature(t) - 1.0).abs() < 1e-12);
            assert!((oval.speed(t) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn poly2_serde_roundtrip() {
        let poly = Poly2::new(vec![(4, 0, 1.0), (0, 4, 1.0), (0, 0, -1.0)]);
        let json = serde_json::to_string(&poly).unwrap();
        assert_eq!(json, "[[4,0,1.0],[0,4,1.0],[0,0,-1.0]]");
        let back: Poly2 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, poly);
        let fam: OvalFamily =
            serde_json::from_str(r#"{"family":"ellipse","a":2.0,"b":1.0}"#).unwrap();
        assert_eq!(fam, OvalFamily::Ellipse { a: 2.0, b: 1.0 });
    }
}
