//! Shared numerical utilities: finite differences on periodic grids, robust
//! sign counting, quadrature, root finding, resampling, intersection tests.

use crate::geom::Vec2;

/// Three-point first and second derivatives on a possibly nonuniform periodic
/// grid.  `period` is the parameter period; `jump` is how much `f` increases
/// over one period (2π·winding for a lifted angle, 0 for a periodic value).
pub fn periodic_derivatives(s: &[f64], f: &[f64], period: f64, jump: f64) -> (Vec<f64>, Vec<f64>) {
    let n = s.len();
    assert!(n >= 3, "need at least 3 samples");
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let (sm, fm) = if i == 0 {
            (s[n - 1] - period, f[n - 1] - jump)
        } else {
            (s[i - 1], f[i - 1])
        };
        let (sp, fp) = if i == n - 1 {
            (s[0] + period, f[0] + jump)
        } else {
            (s[i + 1], f[i + 1])
        };
        let hm = s[i] - sm;
        let hp = sp - s[i];
        let denom = hm * hp * (hm + hp);
        d1[i] = (-hp * hp * fm + (hp * hp - hm * hm) * f[i] + hm * hm * fp) / denom;
        d2[i] = 2.0 * (hp * fm - (hm + hp) * f[i] + hm * fp) / denom;
    }
    (d1, d2)
}

#[derive(Clone, Copy, Debug)]
pub struct SignChangeOptions {
    /// Minimum samples in each flanking run.
    pub min_run: usize,
    /// Dead-zone floor as a fraction of max|v|.
    pub floor_rel: f64,
}

impl Default for SignChangeOptions {
    fn default() -> Self {
        SignChangeOptions {
            min_run: crate::tolerances::SIGN_RUN,
            floor_rel: crate::tolerances::SIGN_FLOOR_REL,
        }
    }
}

/// A robust sign change between sample indices `before` and `after`
/// (cyclically ordered; `after` may wrap past the seam).
#[derive(Clone, Copy, Debug)]
pub struct SignChange {
    pub before: usize,
    pub after: usize,
}

/// Count sign changes of a cyclic sample sequence, ignoring flips not flanked
/// by runs of at least `min_run` samples beyond the dead-zone floor.
///
/// Returns the bracket list plus the number of discarded (non-robust) flips.
pub fn robust_sign_changes(v: &[f64], opts: SignChangeOptions) -> (Vec<SignChange>, usize) {
    let n = v.len();
    let vmax = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if n < 2 || vmax == 0.0 {
        return (Vec::new(), 0);
    }
    let floor = opts.floor_rel * vmax;
    // Runs of consecutive samples with the same nonzero class.
    struct Run {
        sign: i8,
        start: usize,
        end: usize, // inclusive
        len: usize,
    }
    let class = |x: f64| -> i8 {
        if x > floor {
            1
        } else if x < -floor {
            -1
        } else {
            0
        }
    };
    let mut runs: Vec<Run> = Vec::new();
    for i in 0..n {
        let c = class(v[i]);
        if c == 0 {
            continue;
        }
        match runs.last_mut() {
            Some(r) if r.sign == c && r.end + 1 == i => {
                r.end = i;
                r.len += 1;
            }
            _ => runs.push(Run { sign: c, start: i, end: i, len: 1 }),
        }
    }
    if runs.len() >= 2 {
        // Cyclic join: last run wraps onto the first.
        let joins = {
            let first = &runs[0];
            let last = runs.last().unwrap();
            first.sign == last.sign && last.end == n - 1 && first.start == 0 && runs.len() > 1
        };
        if joins {
            let first = runs.remove(0);
            let last = runs.last_mut().unwrap();
            last.end = first.end;
            last.len += first.len;
        }
    }
    if runs.len() < 2 {
        return (Vec::new(), 0);
    }
    let mut changes = Vec::new();
    let mut discarded = 0;
    let m = runs.len();
    for k in 0..m {
        let a = &runs[k];
        let b = &runs[(k + 1) % m];
        if a.sign != b.sign {
            if a.len >= opts.min_run && b.len >= opts.min_run {
                changes.push(SignChange { before: a.end, after: b.start });
            } else {
                discarded += 1;
            }
        }
    }
    (changes, discarded)
}

/// Count robust local extrema of a cyclic sample sequence.  Plateaus (steps
/// smaller than `plateau_tol`) are compressed first; an extremum is a
/// direction change of the compressed sequence.
pub fn count_extrema_cyclic(v: &[f64], plateau_tol: f64) -> usize {
    direction_changes(v, plateau_tol, true)
}

/// Count direction changes of consecutive differences; `cyclic` wraps the
/// sequence.  Open sequences only count interior extrema.
pub fn direction_changes(v: &[f64], plateau_tol: f64, cyclic: bool) -> usize {
    let n = v.len();
    if n < 3 {
        return 0;
    }
    let mut dirs: Vec<i8> = Vec::with_capacity(n);
    let last = if cyclic { n } else { n - 1 };
    for i in 0..last {
        let d = v[(i + 1) % n] - v[i];
        if d > plateau_tol {
            dirs.push(1);
        } else if d < -plateau_tol {
            dirs.push(-1);
        }
        // plateau steps dropped: compression
    }
    if dirs.len() < 2 {
        return 0;
    }
    let mut count = 0;
    let m = dirs.len();
    let limit = if cyclic { m } else { m - 1 };
    for i in 0..limit {
        if dirs[i] != dirs[(i + 1) % m] {
            count += 1;
        }
    }
    count
}

/// Polygon line integral ∮ p dα of a closed cylinder polyline given unwrapped
/// samples; the seam closes with α += 2π·winding.
pub fn polygon_area_cylinder(alpha: &[f64], p: &[f64], winding: i32) -> f64 {
    let n = alpha.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (a1, p1) = (alpha[i], p[i]);
        let (a2, p2) = if i + 1 == n {
            (alpha[0] + crate::geom::TAU * winding as f64, p[0])
        } else {
            (alpha[i + 1], p[i + 1])
        };
        acc += 0.5 * (p1 + p2) * (a2 - a1);
    }
    acc
}

/// Bisection on a bracketing interval; `fa` is f(a)'s sign.  Stops when the
/// interval is below `xtol`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, xtol: f64) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Newton iteration with a bisection safeguard inside [a, b].  Converges to
/// fp precision; bails to plain bisection on derivative trouble.
pub fn newton_safeguarded(
    mut f: impl FnMut(f64) -> (f64, f64),
    mut a: f64,
    mut b: f64,
    fa_pos: bool,
    x0: f64,
) -> f64 {
    let mut x = x0;
    for _ in 0..60 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == fa_pos {
            a = x;
        } else {
            b = x;
        }
        let mut next = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        if !next.is_finite() || next <= a.min(b) || next >= a.max(b) {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    x
}

/// Trapezoid rule over one period with grid doubling until two successive
/// refinements agree to `rel_tol`.  Periodic smooth integrands converge
/// spectrally, so this terminates quickly.
pub fn integrate_periodic(f: impl Fn(f64) -> f64, period: f64, rel_tol: f64, max_pow: u32) -> f64 {
    let mut n = 64usize;
    let eval = |n: usize| -> f64 {
        let h = period / n as f64;
        (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
    };
    let mut prev = eval(n);
    for _ in 0..max_pow {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).abs() <= rel_tol * cur.abs().max(1.0) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Closed Catmull–Rom interpolation through `pts` at parameter `u ∈ [0, n)`
/// measured in segments.
pub fn catmull_rom_closed(pts: &[Vec2], u: f64) -> Vec2 {
    let n = pts.len();
    let i1 = (u.floor() as usize).min(n - 1);
    let t = u - i1 as f64;
    let i0 = (i1 + n - 1) % n;
    let i2 = (i1 + 1) % n;
    let i3 = (i1 + 2) % n;
    let (p0, p1, p2, p3) = (pts[i0], pts[i1], pts[i2], pts[i3]);
    let t2 = t * t;
    let t3 = t2 * t;
    0.5 * ((2.0 * t2 - t3 - t) * p0
        + (3.0 * t3 - 5.0 * t2 + 2.0) * p1
        + (4.0 * t2 - 3.0 * t3 + t) * p2
        + (t3 - t2) * p3)
}

/// Resample a closed polyline to `n_out` nodes uniformly spaced in cumulative
/// chord length, interpolating with closed Catmull–Rom.
pub fn resample_closed_by_arclength(pts: &[Vec2], n_out: usize) -> Vec<Vec2> {
    let n = pts.len();
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for i in 0..n {
        let d = pts[(i + 1) % n].dist(pts[i]);
        cum.push(cum[i] + d);
    }
    let total = cum[n];
    let mut out = Vec::with_capacity(n_out);
    let mut seg = 0usize;
    for k in 0..n_out {
        let target = total * k as f64 / n_out as f64;
        while seg + 1 < n && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let frac = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        out.push(catmull_rom_closed(pts, seg as f64 + frac));
    }
    out
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).det(c - a)
}

/// Proper segment intersection (shared endpoints of adjacent polyline
/// segments are the caller's business — this tests open segments).
pub fn segments_intersect(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> bool {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    false
}

/// Self-intersection test for a closed polyline on the cylinder, given
/// unwrapped (α, p) samples of a curve whose α advances by 2π·winding per
/// cycle.  Non-adjacent segment pairs are tested in the universal cover with
/// the ±2π shifted copies; an interval sweep in α keeps it near-linear.
pub fn cylinder_polyline_self_intersects(alpha: &[f64], p: &[f64], winding: i32) -> bool {
    let n = alpha.len();
    if n < 4 {
        return false;
    }
    let tau = crate::geom::TAU * winding as f64;
    let node = |i: usize| -> Vec2 {
        if i < n {
            Vec2::new(alpha[i], p[i])
        } else {
            Vec2::new(alpha[i - n] + tau, p[i - n])
        }
    };
    // Segment i spans nodes i..i+1 for i in 0..n (cyclic).
    #[derive(Clone, Copy)]
    struct Seg {
        id: usize,    // original segment index 0..n
        shift: i8,    // 0 or ±1 copies
        lo: f64,
        hi: f64,
        a: Vec2,
        b: Vec2,
    }
    let mut segs: Vec<Seg> = Vec::with_capacity(3 * n);
    for i in 0..n {
        let a = node(i);
        let b = node(i + 1);
        for shift in [-1i8, 0, 1] {
            let off = shift as f64 * crate::geom::TAU;
            let (sa, sb) = (Vec2::new(a.x + off, a.y), Vec2::new(b.x + off, b.y));
            segs.push(Seg {
                id: i,
                shift,
                lo: sa.x.min(sb.x),
                hi: sa.x.max(sb.x),
                a: sa,
                b: sb,
            });
        }
    }
    segs.sort_by(|u, v| u.lo.partial_cmp(&v.lo).unwrap());
    let mut active: Vec<usize> = Vec::new();
    for (k, s) in segs.iter().enumerate() {
        active.retain(|&j| segs[j].hi >= s.lo);
        for &j in &active {
            let t = &segs[j];
            // Same copy-pair seen from two shifts is the same geometric pair.
            if t.id == s.id {
                continue;
            }
            let adjacent = (t.id + 1) % n == s.id || (s.id + 1) % n == t.id;
            if adjacent && (t.shift == s.shift || {
                // The seam-adjacent pair (n−1, 0) is adjacent across one shift.
                let wrap_adj = (t.id + 1 == n && s.id == 0) || (s.id + 1 == n && t.id == 0);
                wrap_adj
            }) {
                continue;
            }
            if adjacent {
                continue;
            }
            if segments_intersect(s.a, s.b, t.a, t.b) {
                return true;
            }
        }
        active.push(k);
    }
    false
}

/// Distance from a point to a polyline (list of vertices, consecutive
/// segments; not closed — pass a closing vertex if needed).
pub fn point_polyline_dist(x: Vec2, poly: &[Vec2]) -> f64 {
    let mut best = f64::INFINITY;
    for w in poly.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ab = b - a;
        let l2 = ab.norm2();
        let t = if l2 > 0.0 { ((x - a).dot(ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
        let proj = a + t * ab;
        best = best.min(x.dist(proj));
    }
    best
}

/// Symmetric Hausdorff distance between two point sets, each also given as a
/// polyline for the point-to-segment direction.
pub fn hausdorff_polylines(a: &[Vec2], b: &[Vec2]) -> f64 {
    let d_ab = a.iter().map(|&x| point_polyline_dist(x, b)).fold(0.0_f64, f64::max);
    let d_ba = b.iter().map(|&x| point_polyline_dist(x, a)).fold(0.0_f64, f64::max);
    d_ab.max(d_ba)
}

/// k-th discrete Fourier coefficient c_k = (1/N) Σ v_j e^{−2πi jk/N}.
pub fn dft_coefficient(v: &[f64], k: usize) -> (f64, f64) {
    let n = v.len();
    let w = -crate::geom::TAU * k as f64 / n as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (j, &x) in v.iter().enumerate() {
        let ang = w * j as f64;
        re += x * ang.cos();
        im += x * ang.sin();
    }
    (re / n as f64, im / n as f64)
}

/// Cross-ratio of four concurrent lines given by direction vectors, via the
/// sine formula (directions matter mod π).
pub fn line_pencil_cross_ratio(d1: Vec2, d2: Vec2, d3: Vec2, d4: Vec2) -> f64 {
    let s = |u: Vec2, v: Vec2| u.det(v); // ∝ sin of the angle between the lines
    (s(d1, d3) / s(d2, d3)) * (s(d2, d4) / s(d1, d4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::TAU;

    #[test]
    fn derivatives_match_trig_on_nonuniform_grid() {
        let n = 400;
        // Smoothly jittered spacing.
        let s: Vec<f64> = (0..n)
            .map(|i| {
                let u = TAU * i as f64 / n as f64;
                u + 0.3 * (TAU / n as f64) * (3.0 * u).sin()
            })
            .collect();
        let f: Vec<f64> = s.iter().map(|&x| (2.0 * x).sin()).collect();
        let (d1, d2) = periodic_derivatives(&s, &f, TAU, 0.0);
        for i in 0..n {
            assert!((d1[i] - 2.0 * (2.0 * s[i]).cos()).abs() < 2e-3);
            assert!((d2[i] + 4.0 * (2.0 * s[i]).sin()).abs() < 2e-2);
        }
    }

    #[test]
    fn robust_sign_counting_ignores_noise_blips() {
        let n = 240;
        let mut v: Vec<f64> = (0..n).map(|i| (TAU * i as f64 / n as f64).sin()).collect();
        v[10] = -1e-9; // blip inside a positive run, below the floor
        let (changes, _) = robust_sign_changes(&v, SignChangeOptions::default());
        assert_eq!(changes.len(), 2);
        // A hard flip of a single sample is discarded by the run rule.
        v[40] = -0.9;
        let (changes, discarded) = robust_sign_changes(&v, SignChangeOptions::default());
        assert_eq!(changes.len(), 2);
        assert!(discarded >= 1);
    }

    #[test]
    fn polygon_area_of_harmonic_graph_vanishes() {
        let n = 512;
        let alpha: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let p: Vec<f64> = alpha.iter().map(|&a| 0.7 * a.sin() - 0.2 * a.cos()).collect();
        let area = polygon_area_cylinder(&alpha, &p, 1);
        assert!(area.abs() < 1e-12, "area {area}");
        let shifted: Vec<f64> = p.iter().map(|&x| x + 1.0).collect();
        assert!((polygon_area_cylinder(&alpha, &shifted, 1) - TAU).abs() < 1e-12);
    }

    #[test]
    fn extrema_count_with_plateaus() {
        let v = vec![0.0, 1.0, 1.0 + 1e-12, 1.0, 0.0, -1.0, -1.0, 0.0];
        assert_eq!(count_extrema_cyclic(&v, 1e-9), 2);
    }

    #[test]
    fn figure_eight_polyline_detected() {
        // A crossing pair on the cylinder chart.
        let alpha = vec![0.0, 1.5, 3.0, 4.5, 4.6, 1.4, 3.1, 6.0];
        let p = vec![0.0, 1.0, 1.0, 0.5, -0.5, -1.2, -0.1, 0.05];
        // Not asserting a specific picture here beyond: the test curve crosses itself.
        assert!(cylinder_polyline_self_intersects(&alpha, &p, 1));
        // A plain graph never does.
        let n = 64;
        let a2: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let p2: Vec<f64> = a2.iter().map(|&a| (2.0 * a).sin()).collect();
        assert!(!cylinder_polyline_self_intersects(&a2, &p2, 1));
    }

    #[test]
    fn dft_picks_out_harmonics() {
        let n = 256;
        let v: Vec<f64> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                1.5 + 2.0 * t.cos() + 0.5 * (3.0 * t).sin()
            })
            .collect();
        let (c0, _) = dft_coefficient(&v, 0);
        let (re1, im1) = dft_coefficient(&v, 1);
        assert!((c0 - 1.5).abs() < 1e-12);
        assert!((re1 - 1.0).abs() < 1e-12); // cos t ↦ c1 = 1/2·2.0
        assert!(im1.abs() < 1e-12);
    }

    #[test]
    fn harmonic_pencil_cross_ratio() {
        // u = τ + v, w = τ − v is harmonic with respect to (τ, v).
        let tau = Vec2::new(1.0, 0.0);
        let v = Vec2::new(0.3, 1.0);
        let u = tau + v;
        let w = tau - v;
        let cr = line_pencil_cross_ratio(tau, v, u, w);
        assert!((cr + 1.0).abs() < 1e-12, "cr {cr}");
    }
}
