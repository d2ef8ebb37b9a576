//! Curve shortening flow on the flat cylinder of oriented lines.
//!
//! A closed, winding-one polyline in the `(α, p)` chart moves by its
//! curvature vector, `X_t = X_ss` with `s` the arclength of the polyline in
//! the flat metric `dα² + dp²`.  Because the total turning of a winding-one
//! loop is zero, the flow preserves the signed area `∮ p dα`; it smooths the
//! curve toward the horizontal geodesic `p = area / 2π` and, along the way,
//! never manufactures new inflections of the line family.  The module
//! provides the explicit single step, monitored runs with graph/time/flat
//! stop rules, and the Fourier flatness report taken once the curve becomes
//! a graph over the angle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::TAU;
use crate::lines::CylinderCurve;
use crate::numerics::{self, SignChangeOptions};
use crate::tolerances;

/// A discretized closed curve on the cylinder evolving under the flow.
///
/// `alpha` holds the unwrapped lift of the angle: the node after the last is
/// the first again with `alpha + 2π`, so the polyline always winds once.
#[derive(Clone, Debug, Serialize)]
pub struct FlowState {
    pub alpha: Vec<f64>,
    pub p: Vec<f64>,
    /// Flow time accumulated so far.
    pub time: f64,
    /// Steps taken since the initial state.
    pub steps: u64,
}

/// When a monitored run should stop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop once the curve is a graph over the angle (fixed margin).
    Graph,
    /// Stop at the given flow time.
    Time(f64),
    /// Stop once `max|p|` falls below the given bound.
    Flat(f64),
}

/// Which stop condition ended a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Graph,
    Time,
    Flat,
}

/// One row of the per-run monitor table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MonitorRow {
    pub time: f64,
    pub area: f64,
    pub inflections: usize,
    pub max_p: f64,
    pub max_curvature: f64,
}

/// A monitored flow run: snapshot states (thinned to a bounded count), the
/// monitor table, the first state seen as a graph over the angle, and the
/// state at the stop condition.
#[derive(Clone, Debug)]
pub struct FlowRun {
    pub monitors: Vec<MonitorRow>,
    pub snapshots: Vec<FlowState>,
    pub graph_state: Option<FlowState>,
    pub final_state: FlowState,
    pub stop: StopReason,
}

/// Spacing statistics of the closed polyline (the stepping loop keeps its own
/// fused statistics; this standalone probe serves the tests).
#[cfg(test)]
#[derive(Clone, Copy, Debug)]
struct Spacing {
    min: f64,
    mean: f64,
    max: f64,
}

impl FlowState {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Node `i` of the lifted polyline, with cyclic indices shifted by ±2π.
    pub fn node(&self, i: isize) -> (f64, f64) {
        let n = self.alpha.len() as isize;
        let (k, off) = if i < 0 {
            (i + n, -TAU)
        } else if i >= n {
            (i - n, TAU)
        } else {
            (i, 0.0)
        };
        (self.alpha[k as usize] + off, self.p[k as usize])
    }

    /// Signed area `∮ p dα` of the node polygon.
    pub fn signed_area(&self) -> f64 {
        numerics::polygon_area_cylinder(&self.alpha, &self.p, 1)
    }

    pub fn max_abs_p(&self) -> f64 {
        self.p.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// True when the lift advances by more than the detection margin between
    /// every pair of consecutive nodes, seam included.
    pub fn is_graph(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            let da = self.node(i as isize + 1).0 - self.alpha[i];
            if da <= tolerances::GRAPH_MARGIN {
                return false;
            }
        }
        true
    }

    /// Largest discrete curvature magnitude over the nodes.
    pub fn max_curvature(&self) -> f64 {
        max_kappa_of(self)
    }

    /// Count of robust sign changes of the same indicator
    /// `D = p α′³ − p′ α″ + p″ α′` used by the caustic cusp detector; on a
    /// graph over the angle it reduces to `p + p″`.
    pub fn inflection_count(&self) -> usize {
        let n = self.len();
        let s: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let (a1, a2) = numerics::periodic_derivatives(&s, &self.alpha, TAU, TAU);
        let (p1, p2) = numerics::periodic_derivatives(&s, &self.p, TAU, 0.0);
        let d: Vec<f64> = (0..n)
            .map(|i| self.p[i] * a1[i] * a1[i] * a1[i] - p1[i] * a2[i] + p2[i] * a1[i])
            .collect();
        let (changes, _) = numerics::robust_sign_changes(&d, SignChangeOptions::default());
        changes.len()
    }

    /// The monitor row for the current state.
    pub fn monitor_row(&self) -> MonitorRow {
        MonitorRow {
            time: self.time,
            area: self.signed_area(),
            inflections: self.inflection_count(),
            max_p: self.max_abs_p(),
            max_curvature: self.max_curvature(),
        }
    }

    /// View the nodes as a cylinder curve (parametrized by node fraction).
    pub fn to_cylinder_curve(&self) -> Result<CylinderCurve> {
        let n = self.len();
        let s: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        CylinderCurve::from_samples(s, self.alpha.clone(), self.p.clone(), TAU)
    }
}

#[cfg(test)]
fn spacing_of(state: &FlowState) -> Spacing {
    let n = state.len();
    let (mut min, mut max, mut sum) = (f64::INFINITY, 0.0_f64, 0.0);
    for i in 0..n {
        let (a0, p0) = (state.alpha[i], state.p[i]);
        let (a1, p1) = state.node(i as isize + 1);
        let h = (a1 - a0).hypot(p1 - p0);
        min = min.min(h);
        max = max.max(h);
        sum += h;
    }
    Spacing { min, mean: sum / n as f64, max }
}

/// Turning angle from chord `(ca, cb)` to chord `(da, db)`.  The asin series
/// keeps the stepping loop free of libm calls for the usual small angles;
/// its truncation error (≲ 0.03·s⁹) is far below the other scheme errors.
#[inline]
fn turning_angle(ca: f64, cb: f64, da: f64, db: f64, lprod: f64) -> f64 {
    let cross = ca * db - cb * da;
    let dot = ca * da + cb * db;
    let s = cross / lprod;
    if dot > 0.0 && s.abs() <= 0.15 {
        let s2 = s * s;
        s * (1.0 + s2 * (1.0 / 6.0 + s2 * (3.0 / 40.0 + s2 * (15.0 / 336.0))))
    } else {
        cross.atan2(dot)
    }
}

/// Largest discrete curvature magnitude `|θ_k| / |T̄_k|` over the nodes.
fn max_kappa_of(state: &FlowState) -> f64 {
    let n = state.len();
    let mut prev = {
        let (a0, p0) = state.node(-1);
        (state.alpha[0] - a0, state.p[0] - p0)
    };
    let mut lprev = prev.0.hypot(prev.1);
    let mut kmax2 = 0.0_f64;
    for i in 0..n {
        let (a1, p1) = state.node(i as isize + 1);
        let cur = (a1 - state.alpha[i], p1 - state.p[i]);
        let lcur = cur.0.hypot(cur.1);
        let theta = turning_angle(prev.0, prev.1, cur.0, cur.1, lprev * lcur);
        let tb = (0.5 * (prev.0 + cur.0), 0.5 * (prev.1 + cur.1));
        let t2 = (tb.0 * tb.0 + tb.1 * tb.1).max(f64::MIN_POSITIVE);
        kmax2 = kmax2.max(theta * theta / t2);
        prev = cur;
        lprev = lcur;
    }
    kmax2.sqrt()
}

/// Reusable buffers for the stepping loop, so a run makes no per-step
/// allocations.
struct Workspace {
    ca: Vec<f64>,
    cp: Vec<f64>,
    len: Vec<f64>,
    va: Vec<f64>,
    vp: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            ca: vec![0.0; n],
            cp: vec![0.0; n],
            len: vec![0.0; n],
            va: vec![0.0; n],
            vp: vec![0.0; n],
        }
    }

    fn ensure(&mut self, n: usize) {
        if self.ca.len() != n {
            *self = Workspace::new(n);
        }
    }
}

/// Advance one explicit Euler step.
///
/// The motion at node `k` is `V_k = θ_k · perp(T̄_k) / |T̄_k|²` with `θ_k`
/// the turning angle between the incident chords and `T̄_k` the central
/// chord `(X_{k+1} − X_{k−1})/2`.  This is the standard second-order
/// consistent `k·N`, chosen because it pairs exactly with the gradient of
/// the polygon area: `dA/dt = Σ_k det(T̄_k, V_k) = Σ_k θ_k`, and the
/// turning angles of a closed winding-one lift sum to zero identically.
/// The spatial discretization therefore conserves the signed area; drift
/// can only enter through the time step (quadratic in dt) and the rare
/// curvature-cap events.
///
/// With `dt = None` the step uses the stability bound `0.4·(min Δs)²`,
/// further limited so no node moves more than a small fraction of the
/// minimum spacing (this resolves curvature spikes in time instead of
/// jumping over them), and by `cap` (for running exactly up to a stop
/// time).  An explicit `dt` above the stability bound is rejected.
/// Returns the dt actually taken.
fn advance(state: &mut FlowState, ws: &mut Workspace, dt: Option<f64>, cap: f64) -> Result<f64> {
    let n = state.len();
    if n < 4 {
        return Err(Error::TooFewSamples { got: n, need: 4 });
    }
    ws.ensure(n);

    // Chords and spacing statistics.
    let (mut min_h, mut max_h, mut sum_h) = (f64::INFINITY, 0.0_f64, 0.0);
    for i in 0..n {
        let (a1, p1) = if i + 1 == n {
            (state.alpha[0] + TAU, state.p[0])
        } else {
            (state.alpha[i + 1], state.p[i + 1])
        };
        let da = a1 - state.alpha[i];
        let dp = p1 - state.p[i];
        let l = (da * da + dp * dp).sqrt();
        ws.ca[i] = da;
        ws.cp[i] = dp;
        ws.len[i] = l;
        min_h = min_h.min(l);
        max_h = max_h.max(l);
        sum_h += l;
    }
    let mean_h = sum_h / n as f64;
    if min_h < tolerances::FLOW_PINCH_REL * mean_h {
        return Err(Error::Pinch { min: min_h, mean: mean_h });
    }

    // Motion field, curvature cap, largest applied magnitude.
    let kappa_cap2 = tolerances::FLOW_KAPPA_MAX * tolerances::FLOW_KAPPA_MAX;
    let mut vmax2 = 0.0_f64;
    for i in 0..n {
        let im = if i == 0 { n - 1 } else { i - 1 };
        let theta = turning_angle(
            ws.ca[im],
            ws.cp[im],
            ws.ca[i],
            ws.cp[i],
            ws.len[im] * ws.len[i],
        );
        let ta = 0.5 * (ws.ca[im] + ws.ca[i]);
        let tp = 0.5 * (ws.cp[im] + ws.cp[i]);
        let t2 = (ta * ta + tp * tp).max(f64::MIN_POSITIVE);
        let mut scale = theta / t2;
        let k2 = theta * theta / t2;
        if k2 > kappa_cap2 {
            scale *= (kappa_cap2 / k2).sqrt();
            vmax2 = vmax2.max(kappa_cap2);
        } else {
            vmax2 = vmax2.max(k2);
        }
        ws.va[i] = -scale * tp;
        ws.vp[i] = scale * ta;
    }

    let limit = tolerances::FLOW_SAFETY * min_h * min_h;
    let dt = match dt {
        Some(d) if d > limit * (1.0 + 1e-9) => {
            return Err(Error::StabilityViolation { dt: d, limit });
        }
        Some(d) => d,
        None => {
            let vmax = vmax2.sqrt();
            let advect = if vmax > 0.0 {
                tolerances::FLOW_ADVECT * min_h / vmax
            } else {
                f64::INFINITY
            };
            limit.min(advect).min(cap)
        }
    };

    // The polygon area is a quadratic function of the nodes, so the step's
    // area change is exactly dt²·A₂(V,V) once the first-order term
    // telescopes away; a uniform p-shift cancels it to rounding (it leaves
    // every chord — hence spacing and curvature — untouched).
    let mut a2 = 0.0;
    for i in 0..n {
        let ip = if i + 1 == n { 0 } else { i + 1 };
        a2 += (ws.vp[i] + ws.vp[ip]) * (ws.va[ip] - ws.va[i]);
    }
    let p_shift = -dt * dt * 0.5 * a2 / TAU;

    // Apply the motion; the spacing statistics of the moved polyline are
    // fused into the same pass (chord i−1 is final once node i has moved).
    let new0 = (
        state.alpha[0] + dt * ws.va[0],
        state.p[0] + dt * ws.vp[0] + p_shift,
    );
    let (mut min2, mut max2, mut sum2) = (f64::INFINITY, 0.0_f64, 0.0);
    state.alpha[0] = new0.0;
    state.p[0] = new0.1;
    for i in 1..n {
        state.alpha[i] += dt * ws.va[i];
        state.p[i] += dt * ws.vp[i] + p_shift;
        let da = state.alpha[i] - state.alpha[i - 1];
        let dp = state.p[i] - state.p[i - 1];
        let l = (da * da + dp * dp).sqrt();
        min2 = min2.min(l);
        max2 = max2.max(l);
        sum2 += l;
    }
    {
        let da = new0.0 + TAU - state.alpha[n - 1];
        let dp = new0.1 - state.p[n - 1];
        let l = (da * da + dp * dp).sqrt();
        min2 = min2.min(l);
        max2 = max2.max(l);
        sum2 += l;
    }
    state.time += dt;
    state.steps += 1;

    let mean2 = sum2 / n as f64;
    if min2 < tolerances::FLOW_RESAMPLE_LO * mean2 || max2 > tolerances::FLOW_RESAMPLE_HI * mean2 {
        resample_in_place(state, n);
    }
    Ok(dt)
}

/// Resample the closed lifted polyline to `m` nodes uniform in chordal
/// arclength, interpolating with a centripetal-style cubic Hermite (chordal
/// tangents).  The first output node coincides with the first input node.
fn resample_lift(state: &FlowState, m: usize) -> (Vec<f64>, Vec<f64>) {
    let n = state.len();
    let mut cum = vec![0.0_f64; n + 1];
    for i in 0..n {
        let (a0, p0) = state.node(i as isize);
        let (a1, p1) = state.node(i as isize + 1);
        cum[i + 1] = cum[i] + (a1 - a0).hypot(p1 - p0);
    }
    let total = cum[n];
    let mut alpha = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    let mut seg = 0usize;
    for j in 0..m {
        let u = total * j as f64 / m as f64;
        while seg + 1 < n && cum[seg + 1] <= u {
            seg += 1;
        }
        let len = (cum[seg + 1] - cum[seg]).max(f64::MIN_POSITIVE);
        let t = ((u - cum[seg]) / len).clamp(0.0, 1.0);
        let pm = state.node(seg as isize - 1);
        let p0 = state.node(seg as isize);
        let p1 = state.node(seg as isize + 1);
        let p2 = state.node(seg as isize + 2);
        let hm = (p0.0 - pm.0).hypot(p0.1 - pm.1).max(f64::MIN_POSITIVE);
        let hp = (p2.0 - p1.0).hypot(p2.1 - p1.1).max(f64::MIN_POSITIVE);
        // Chordal tangents, scaled by the segment length for the Hermite basis.
        let t0 = (
            (p1.0 - pm.0) / (hm + len) * len,
            (p1.1 - pm.1) / (hm + len) * len,
        );
        let t1 = (
            (p2.0 - p0.0) / (len + hp) * len,
            (p2.1 - p0.1) / (len + hp) * len,
        );
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        alpha.push(h00 * p0.0 + h10 * t0.0 + h01 * p1.0 + h11 * t1.0);
        p.push(h00 * p0.1 + h10 * t0.1 + h01 * p1.1 + h11 * t1.1);
    }
    (alpha, p)
}

/// Resample in place, restoring the signed area exactly by a uniform shift
/// of `p` (the area is the flow's conserved quantity; interpolation alone
/// would let it drift at each remeshing).
fn resample_in_place(state: &mut FlowState, m: usize) {
    let area = state.signed_area();
    let (alpha, p) = resample_lift(state, m);
    state.alpha = alpha;
    state.p = p;
    let drift = state.signed_area() - area;
    let shift = -drift / TAU;
    for q in &mut state.p {
        *q += shift;
    }
}

/// One explicit Euler step of the flow.
///
/// The motion is the discrete curvature vector (turning-angle form), capped
/// in magnitude; `dt` must respect the stability bound `0.4 · (min Δs)²`.
/// Node spacing is kept inside its band by arclength resampling after the
/// move.
pub fn csf_step(state: &FlowState, dt: f64) -> Result<FlowState> {
    let mut next = state.clone();
    let mut ws = Workspace::new(state.len());
    advance(&mut next, &mut ws, Some(dt), f64::INFINITY)?;
    Ok(next)
}

/// Build the initial flow state from a cylinder curve: the curve must be
/// closed with winding one and embedded; it is resampled to `nodes` nodes
/// uniform in chordal arclength with its signed area preserved exactly.
pub fn flow_state_from_curve(curve: &CylinderCurve, nodes: usize) -> Result<FlowState> {
    if curve.winding != 1 {
        return Err(Error::ConfigInvalid(format!(
            "flow input must wind once around the cylinder (winding {})",
            curve.winding
        )));
    }
    if curve.len() < 4 {
        return Err(Error::TooFewSamples { got: curve.len(), need: 4 });
    }
    if nodes < 16 {
        return Err(Error::ConfigInvalid(format!(
            "flow needs at least 16 nodes (asked for {nodes})"
        )));
    }
    if !curve.is_simple() {
        return Err(Error::ConfigInvalid(
            "flow input must be an embedded curve".into(),
        ));
    }
    let mut state = FlowState {
        alpha: curve.alpha.clone(),
        p: curve.p.clone(),
        time: 0.0,
        steps: 0,
    };
    let area = curve.signed_area();
    let (alpha, p) = resample_lift(&state, nodes);
    state.alpha = alpha;
    state.p = p;
    let shift = (area - state.signed_area()) / TAU;
    for q in &mut state.p {
        *q += shift;
    }
    Ok(state)
}

/// Run the flow with adaptive `dt` until the stop rule fires.
///
/// Monitors are recorded at a fixed step cadence (plus the initial and final
/// states); snapshots are thinned on the fly so at most 64 are kept.  The
/// first state observed to be a graph over the angle is retained separately
/// for the Fourier report, whatever the stop rule.
pub fn csf_run(curve: &CylinderCurve, until: StopRule, nodes: usize) -> Result<FlowRun> {
    let mut state = flow_state_from_curve(curve, nodes)?;
    let mut ws = Workspace::new(state.len());
    let stride = tolerances::FLOW_MONITOR_STRIDE as u64;
    let mut snap_stride = stride;
    let mut monitors = vec![state.monitor_row()];
    let mut snapshots = vec![state.clone()];
    let mut graph_state: Option<FlowState> = None;
    if state.is_graph() {
        graph_state = Some(state.clone());
    }
    // The graph/flat conditions are checked at the monitor cadence (they
    // cost a pass over the nodes); the time condition is exact because the
    // step is capped to land on the stop time.
    let stop = loop {
        match until {
            StopRule::Graph if state.is_graph() => break StopReason::Graph,
            StopRule::Flat(tol) if state.max_abs_p() < tol => break StopReason::Flat,
            StopRule::Time(t) if state.time >= t - 1e-12 * t.max(1.0) => {
                break StopReason::Time;
            }
            _ => {}
        }
        loop {
            if state.steps >= tolerances::FLOW_MAX_STEPS {
                return Err(Error::MaxStepsExceeded {
                    max_steps: tolerances::FLOW_MAX_STEPS,
                });
            }
            let cap = match until {
                StopRule::Time(t) => t - state.time,
                _ => f64::INFINITY,
            };
            advance(&mut state, &mut ws, None, cap)?;
            if state.steps % stride == 0 {
                break;
            }
            if let StopRule::Time(t) = until {
                if state.time >= t - 1e-12 * t.max(1.0) {
                    break;
                }
            }
        }
        if state.steps % stride == 0 {
            monitors.push(state.monitor_row());
            if graph_state.is_none() && state.is_graph() {
                graph_state = Some(state.clone());
            }
            if state.steps % snap_stride == 0 {
                snapshots.push(state.clone());
                if snapshots.len() > 64 {
                    let mut keep = 0usize;
                    snapshots.retain(|_| {
                        keep += 1;
                        keep % 2 == 1
                    });
                    snap_stride *= 2;
                }
            }
        }
    };
    if monitors.last().map(|r| r.time) != Some(state.time) {
        monitors.push(state.monitor_row());
    }
    if graph_state.is_none() && state.is_graph() {
        graph_state = Some(state.clone());
    }
    snapshots.push(state.clone());
    Ok(FlowRun { monitors, snapshots, graph_state, final_state: state, stop })
}

/// Fourier flatness report of a graph-stage state.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SturmHurwitzReport {
    /// Uniform grid size used for the spectral sums.
    pub grid: usize,
    /// Constant term of `G = F″ + F` (signed).
    pub c0: f64,
    /// Magnitude of the first harmonic of `G`.
    pub c1: f64,
    /// Robust sign changes of `G` over one period.
    pub sign_changes: usize,
    /// True when `|c₀|, |c₁|` are below the pinned bound and the sign
    /// changes number at least four.
    pub pass: bool,
}

/// Evaluate the graph `p = F(α)` on a uniform grid of `m` angles starting at
/// the first node, using 4-point cubic interpolation over the node angles.
fn graph_values(state: &FlowState, m: usize) -> Vec<f64> {
    let n = state.len();
    let a0 = state.alpha[0];
    let mut out = Vec::with_capacity(m);
    let mut seg = 0usize;
    for j in 0..m {
        let a = a0 + TAU * j as f64 / m as f64;
        while seg + 1 < n && state.node(seg as isize + 1).0 <= a {
            seg += 1;
        }
        // Cubic Lagrange through the four nodes bracketing the target angle.
        let xs = [
            state.node(seg as isize - 1),
            state.node(seg as isize),
            state.node(seg as isize + 1),
            state.node(seg as isize + 2),
        ];
        let mut value = 0.0;
        for (i, &(xi, yi)) in xs.iter().enumerate() {
            let mut w = 1.0;
            for (k, &(xk, _)) in xs.iter().enumerate() {
                if k != i {
                    w *= (a - xk) / (xi - xk);
                }
            }
            value += w * yi;
        }
        out.push(value);
    }
    out
}

/// Spectral check of a flattened graph: on a uniform power-of-two grid,
/// `G = F″ + F` (second derivative in the angle) must carry no constant term
/// and no first harmonic, and must change sign at least four times — the
/// grid-level trace of the fact that `d²/dα² + 1` kills the first-order
/// terms while zeros of a periodic function are at least as numerous as
/// those of its lowest surviving harmonic.
pub fn sturm_hurwitz_check(state: &FlowState) -> Result<SturmHurwitzReport> {
    if !state.is_graph() {
        return Err(Error::NotAGraph);
    }
    let m = tolerances::FOURIER_GRID;
    let f = graph_values(state, m);
    let h = TAU / m as f64;
    let g: Vec<f64> = (0..m)
        .map(|j| {
            let fp = f[(j + 1) % m];
            let fm = f[(j + m - 1) % m];
            (fp - 2.0 * f[j] + fm) / (h * h) + f[j]
        })
        .collect();
    let c0 = g.iter().sum::<f64>() / m as f64;
    let (re, im) = numerics::dft_coefficient(&g, 1);
    let c1 = re.hypot(im);
    let (changes, _) = numerics::robust_sign_changes(&g, SignChangeOptions::default());
    let sign_changes = changes.len();
    let pass = c0.abs() < tolerances::FOURIER_TOL
        && c1 < tolerances::FOURIER_TOL
        && sign_changes >= 4;
    Ok(SturmHurwitzReport { grid: m, c0, c1, sign_changes, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{BeamSource, RaySystem};
    use crate::billiard::ReflectionLaw;
    use crate::geom::Vec2;
    use crate::oval::{Oval, OvalFamily};

    fn graph_state(n: usize, f: impl Fn(f64) -> f64) -> FlowState {
        let alpha: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let p: Vec<f64> = alpha.iter().map(|&a| f(a)).collect();
        FlowState { alpha, p, time: 0.0, steps: 0 }
    }

    #[test]
    fn horizontal_geodesics_are_fixed_points() {
        let state = graph_state(256, |_| 0.7);
        let dt = {
            let spacing = spacing_of(&state);
            tolerances::FLOW_SAFETY * spacing.min * spacing.min
        };
        let next = csf_step(&state, dt).unwrap();
        for i in 0..state.len() {
            assert!((next.alpha[i] - state.alpha[i]).abs() <= 1e-14);
            assert!((next.p[i] - state.p[i]).abs() <= 1e-14);
        }
    }

    #[test]
    fn small_graphs_decay_at_the_heat_rate() {
        let eps = 1e-3;
        let curve = CylinderCurve::from_graph(512, |a| eps * a.sin());
        let run = csf_run(&curve, StopRule::Time(0.5), 512).unwrap();
        let expected = eps * (-0.5_f64).exp();
        let got = run.final_state.max_abs_p();
        assert!(
            (got / expected - 1.0).abs() < 1e-3,
            "amplitude {got:.6e} vs heat decay {expected:.6e}"
        );
        assert_eq!(run.stop, StopReason::Time);
        assert!((run.final_state.time - 0.5).abs() < 1e-9);
    }

    #[test]
    fn one_step_conserves_the_signed_area() {
        let state = graph_state(1024, |a| 0.3 * (2.0 * a).sin() + 0.1 * (3.0 * a).cos());
        let scale = TAU * state.max_abs_p();
        let before = state.signed_area();
        let dt = {
            let spacing = spacing_of(&state);
            tolerances::FLOW_SAFETY * spacing.min * spacing.min
        };
        let next = csf_step(&state, dt).unwrap();
        let drift = (next.signed_area() - before).abs();
        assert!(drift < 1e-8 * scale, "area drift {drift:.3e} over scale {scale:.3e}");
    }

    #[test]
    fn oversized_steps_are_rejected() {
        let state = graph_state(128, |a| 0.2 * a.sin());
        let spacing = spacing_of(&state);
        let limit = tolerances::FLOW_SAFETY * spacing.min * spacing.min;
        match csf_step(&state, 10.0 * limit) {
            Err(Error::StabilityViolation { .. }) => {}
            other => panic!("expected a stability error, got {other:?}"),
        }
    }

    #[test]
    fn resampling_restores_the_spacing_band_and_the_area() {
        // Strongly graded nodes: spacing ratio ~ (1/n)^{1/2} ≪ the band floor.
        let n = 128;
        let alpha: Vec<f64> = (0..n)
            .map(|i| TAU * (i as f64 / n as f64).powf(1.5))
            .collect();
        let p: Vec<f64> = alpha.iter().map(|&a| 0.3 * a.sin()).collect();
        let mut state = FlowState { alpha, p, time: 0.0, steps: 0 };
        let area = state.signed_area();
        let spacing = spacing_of(&state);
        assert!(spacing.min < tolerances::FLOW_SPACING_LO * spacing.mean);
        resample_in_place(&mut state, n);
        let after = spacing_of(&state);
        assert!(after.min >= tolerances::FLOW_SPACING_LO * after.mean);
        assert!(after.max <= tolerances::FLOW_SPACING_HI * after.mean);
        assert!((state.signed_area() - area).abs() < 1e-12);
    }

    #[test]
    fn flows_converge_under_refinement() {
        let curve = CylinderCurve::from_graph(2048, |a| 0.3 * (2.0 * a).sin());
        let coarse = csf_run(&curve, StopRule::Time(0.1), 256).unwrap();
        let fine = csf_run(&curve, StopRule::Time(0.1), 512).unwrap();
        let fc = graph_values(&coarse.final_state, 256);
        let ff = graph_values(&fine.final_state, 256);
        // Both runs start at α = 0, so the uniform grids line up.
        let sup = fc
            .iter()
            .zip(&ff)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(sup < 1e-4, "terminal sup difference {sup:.3e}");
    }

    #[test]
    fn third_caustic_of_an_ellipse_flows_flat() {
        let oval = Oval::build(
            OvalFamily::Ellipse { a: (5.0_f64).sqrt() / 2.0, b: 1.0 },
            Vec2::new(0.6, 0.2),
        )
        .unwrap();
        let sys = RaySystem::new(&oval, ReflectionLaw::Standard, &BeamSource::Point).unwrap();
        let beam = sys.beam(3, tolerances::BEAM_INITIAL_SAMPLES).unwrap();
        let run = csf_run(&beam.curve, StopRule::Flat(1e-3), 512).unwrap();
        assert_eq!(run.stop, StopReason::Flat);
        assert!(run.final_state.max_abs_p() < 1e-3);

        // The conserved signed area: drift stays small against the natural
        // area scale of the initial curve.
        let scale = TAU * run.snapshots[0].max_abs_p();
        let a0 = run.monitors[0].area;
        let drift = run
            .monitors
            .iter()
            .fold(0.0_f64, |m, r| m.max((r.area - a0).abs()));
        assert!(drift < 1e-5 * scale, "area drift {drift:.3e} of scale {scale:.3e}");

        // Every recorded count is even, and once the remesher has resolved
        // the sharp initial arcs (t ≥ 0.2 is generous at 512 nodes) the
        // count never increases.  The first few rows may over-count: a
        // curvature spike that is still under-resolved can flicker extra
        // indicator sign changes in and out — a discretization artifact,
        // not a property of the flow, so only the settled tail is gated.
        for r in &run.monitors {
            assert_eq!(r.inflections % 2, 0, "odd count at t = {:.4}", r.time);
        }
        for w in run.monitors.windows(2) {
            if w[0].time >= 0.2 {
                assert!(
                    w[1].inflections <= w[0].inflections,
                    "inflections rose from {} to {} at t = {:.4}",
                    w[0].inflections,
                    w[1].inflections,
                    w[1].time
                );
            }
        }

        // Embedded at every snapshot; a graph stage was reached en route.
        for snap in &run.snapshots {
            let curve = snap.to_cylinder_curve().unwrap();
            assert!(curve.is_simple(), "snapshot at t = {:.4} self-intersects", snap.time);
        }
        let graph = run.graph_state.as_ref().expect("graph stage reached");
        assert!(graph.is_graph());
        let report = sturm_hurwitz_check(graph).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.sign_changes >= 4);
    }

    #[test]
    fn flat_operator_kills_first_harmonics() {
        // F = a sin α + b cos α + ε cos 3α → G = −8ε cos 3α.
        let state = graph_state(512, |a| 0.3 * a.sin() + 0.2 * a.cos() + 0.05 * (3.0 * a).cos());
        let report = sturm_hurwitz_check(&state).unwrap();
        assert!(report.c0.abs() < 1e-5, "c0 = {:.3e}", report.c0);
        assert!(report.c1 < 1e-5, "c1 = {:.3e}", report.c1);
        assert_eq!(report.sign_changes, 6);
        assert!(report.pass);

        // F = 0.2 cos 2α + 0.05 sin 5α → G = −0.6 cos 2α − 1.2 sin 5α.
        let state = graph_state(512, |a| 0.2 * (2.0 * a).cos() + 0.05 * (5.0 * a).sin());
        let report = sturm_hurwitz_check(&state).unwrap();
        assert!(report.c0.abs() < 1e-5);
        assert!(report.c1 < 1e-5);
        assert!(report.sign_changes >= 4);
        assert!(report.pass);
    }

    #[test]
    fn non_graphs_are_rejected_by_the_spectral_check() {
        let state = FlowState {
            alpha: vec![0.0, 1.0, 0.9, 2.0, 3.0, 4.0, 5.0, 6.0],
            p: vec![0.0; 8],
            time: 0.0,
            steps: 0,
        };
        match sturm_hurwitz_check(&state) {
            Err(Error::NotAGraph) => {}
            other => panic!("expected a graph-domain error, got {other:?}"),
        }
    }

    #[test]
    fn nonuniform_graphs_interpolate_cleanly() {
        // Mildly graded node angles exercise the 4-point interpolation.
        let n = 512;
        let alpha: Vec<f64> = (0..n)
            .map(|i| {
                let u = TAU * i as f64 / n as f64;
                u + 0.3 * (TAU / n as f64) * (7.0 * u).sin()
            })
            .collect();
        let p: Vec<f64> = alpha.iter().map(|&a| 0.1 * (3.0 * a).cos()).collect();
        let state = FlowState { alpha, p, time: 0.0, steps: 0 };
        let report = sturm_hurwitz_check(&state).unwrap();
        assert!(report.c0.abs() < 1e-5);
        assert!(report.c1 < 1e-5);
        assert_eq!(report.sign_changes, 6);
    }
}
