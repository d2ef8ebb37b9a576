//! Pinned numeric tolerances and default budgets.
//!
//! Every threshold the engine branches on lives here, with its rationale, so
//! behaviour is reproducible and auditable in one place.  Scale-relative
//! tolerances say so explicitly; the rest are absolute.

/// Rays closer than this (in radians of tangent–chord angle) to a tangency are
/// rejected as reflections: the chord root pair merges and derivative data
/// degrades.
pub const TANGENCY_PHI: f64 = 1e-7;

/// Tangential chords are also declared when the two boundary crossings land
/// within this parameter distance of each other.
pub const TANGENCY_ROOT_SEP: f64 = 1e-7;

/// Convexity floor for oval validation.  Curvature below `−floor` anywhere
/// (a dent), or below `+floor` on a run of three consecutive grid nodes (a
/// straight segment), rejects the mirror.  An isolated sub-floor node is
/// tolerated: families like the quartic have exact curvature zeros at
/// symmetry points, and a grid node can land arbitrarily close to one.
pub const CONVEXITY_MIN_KAPPA: f64 = 1e-9;

/// Grid used for construction-time validation (convexity, star-shapedness,
/// simplicity) and for chord root bracketing.
pub const OVAL_GRID: usize = 4096;

/// Default beam sample count before refinement.
pub const BEAM_INITIAL_SAMPLES: usize = 1024;

/// Hard ceiling on refined beam samples (2^18).
pub const BEAM_SAMPLE_BUDGET: usize = 262_144;

/// Refinement gap thresholds: direction gap (radians), offset gap (relative to
/// the table's circumradius), polyline turning angle (degrees).
pub const REFINE_MAX_DALPHA: f64 = 0.02;
pub const REFINE_MAX_DP_REL: f64 = 0.02;
pub const REFINE_MAX_TURN_DEG: f64 = 5.0;

/// Beam invariant: |∮p dα| on refined samples must stay below this times the
/// table perimeter squared.
pub const BEAM_AREA_REL: f64 = 1e-6;

/// Robust sign-change counting: flanking runs must hold at least this many
/// samples above the floor, and the floor is this fraction of max|indicator|.
pub const SIGN_RUN: usize = 3;
pub const SIGN_FLOOR_REL: f64 = 1e-7;

/// Cusp parameters are bisected until the bracket is below this (in the
/// source-angle chart).
pub const CUSP_BISECT_TOL: f64 = 1e-9;

/// Stencil half-width for locally re-propagated derivative evaluations.
/// Large enough that fp noise in the reflected line (≈1e−15) stays ~1e−9
/// after the /h² of a second difference, small enough for ~1e−6 truncation.
pub const LOCAL_STENCIL_H: f64 = 1e-3;

/// Point-caustic detection: max point-to-line residual, relative to the
/// table's circumradius.
pub const DEGENERATE_REL: f64 = 1e-7;

/// Arc split for envelopes: |α′| below this times the median |α′| marks a
/// point at infinity.
pub const AT_INFINITY_REL: f64 = 1e-6;

/// Curvature plateaus narrower than this count as a single extremum in vertex
/// censuses.
pub const PLATEAU_TOL: f64 = 1e-9;

/// A front whose cooriented-curvature spread stays below this, relative to
/// its magnitude, is reported as constant-curvature (vertex counting is then
/// meaningless).  Sits above the finite-difference noise floor of the
/// curvature estimator (up to ≈5e-4 at 2048 samples for strongly non-uniform
/// parametrizations, shrinking as O(h²)) and far below the O(1) relative
/// variation of generic fronts.
pub const CONST_CURVATURE_REL: f64 = 1e-3;

/// Fronts refuse to close over a beam whose accurate |∮p dα| exceeds this
/// times circumradius².
pub const FRONT_CLOSURE_AREA_REL: f64 = 1e-6;

/// Flow defaults: explicit Euler safety factor in dt = safety·(min Δs)²,
/// curvature cap, spacing band (× mean) enforced by resampling (the spacing
/// check is fused into every step), pinch floor (× mean), monitor cadence,
/// step ceiling.
pub const FLOW_SAFETY: f64 = 0.45;
pub const FLOW_KAPPA_MAX: f64 = 1e3;
/// Extra accuracy limiter: per-step node displacement stays below this
/// fraction of the smallest spacing, so curvature spikes are resolved in
/// time instead of being jumped over (they dominate the area drift).
pub const FLOW_ADVECT: f64 = 0.05;
pub const FLOW_SPACING_LO: f64 = 0.25;
pub const FLOW_SPACING_HI: f64 = 4.0;
/// Working band that actually triggers a remesh: tighter than the hard
/// invariant band above so dt = safety·(min Δs)² never degrades far below
/// its uniform-spacing value.
pub const FLOW_RESAMPLE_LO: f64 = 0.85;
pub const FLOW_RESAMPLE_HI: f64 = 2.0;
pub const FLOW_PINCH_REL: f64 = 1e-6;
pub const FLOW_MONITOR_STRIDE: usize = 500;
pub const FLOW_MAX_STEPS: u64 = 50_000_000;

/// Graph detection margin: consecutive Δα must exceed this.
pub const GRAPH_MARGIN: f64 = 1e-6;

/// Default Fourier grid (power of two) for flattened-graph reports, and the
/// pass bound on the |c₀|, |c₁| coefficients of G = F″ + F there.
pub const FOURIER_GRID: usize = 2048;
pub const FOURIER_TOL: f64 = 1e-4;

/// Check-command tolerances (also the acceptance defaults).
pub const CHECK_JACOBIAN: f64 = 1e-6;
pub const CHECK_GENERATING: f64 = 1e-6;
pub const CHECK_CROFTON_REL: f64 = 1e-8;
pub const CHECK_SHEAR_DEFECT: f64 = 1e-9;
pub const CHECK_AREA: f64 = 1e-6;
