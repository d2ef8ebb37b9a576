//! Scenario configuration and the four reporting pipelines.
//!
//! A scenario is one JSON document: the mirror, the source, the reflection
//! law, the generations to analyse, and per-pipeline settings.  The four
//! runners (`caustic`, `check`, `flow`, `front`) consume a resolved scenario
//! and emit files into an output directory — curves as CSV, reports as JSON,
//! figures as SVG — with the resolved scenario echoed into every file so a
//! figure can always be traced back to the exact run that produced it.
//! Floating-point output is pinned to 17 significant digits, so identical
//! scenarios produce byte-identical files.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::beam::{Beam, BeamSource, RaySystem};
use crate::billiard::{self, ReflectionLaw, TransverseField};
use crate::caustic::{self, vertex_census, Front, PlanarCurveWithCusps};
use crate::error::{Error, Result};
use crate::flow::{self, FlowState, MonitorRow, StopRule, SturmHurwitzReport};
use crate::geom::{Vec2, TAU};
use crate::lines::CylinderCurve;
use crate::oval::{Oval, OvalFamily, Poly2};
use crate::svg::{self, Figure, Filmstrip, Window};
use crate::tolerances;

/// One run: mirror, source, law, beam, generations, pipeline settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub oval: OvalFamily,
    pub source: [f64; 2],
    #[serde(default)]
    pub law: LawConfig,
    #[serde(default)]
    pub beam: BeamConfig,
    pub n_list: Vec<usize>,
    /// Initial samples per beam (refinement may add more).
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// How many rays the figures overlay (0 disables the overlay).
    #[serde(default = "default_rays")]
    pub rays: usize,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub front: FrontConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_samples() -> usize {
    tolerances::BEAM_INITIAL_SAMPLES
}

fn default_rays() -> usize {
    24
}

/// Reflection law selector.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawConfig {
    #[default]
    Standard,
    /// Standard reflection followed by `p ↦ p + 1`: a deliberately broken
    /// map the exactness check must catch.
    ShearControl,
    Projective {
        field: FieldConfig,
    },
}

/// Transverse field selector for the projective law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldConfig {
    Normal,
    /// Gradient of the polynomial Σ c·x^i·y^j given as `[i, j, c]` terms.
    Gradient(Vec<(u32, u32, f64)>),
}

impl LawConfig {
    pub fn to_law(&self) -> ReflectionLaw {
        match self {
            LawConfig::Standard => ReflectionLaw::Standard,
            LawConfig::ShearControl => ReflectionLaw::ShearControl,
            LawConfig::Projective { field } => ReflectionLaw::Projective(match field {
                FieldConfig::Normal => TransverseField::Normal,
                FieldConfig::Gradient(terms) => {
                    TransverseField::Gradient(Poly2::new(terms.clone()))
                }
            }),
        }
    }
}

/// Generation-zero family selector.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamConfig {
    /// The pencil of rays through the source point.
    #[default]
    Point,
    /// Outward normals of an inner oval (anchored at the world origin).
    InnerOval(OvalFamily),
}

impl BeamConfig {
    pub fn to_source(&self) -> BeamSource {
        match self {
            BeamConfig::Point => BeamSource::Point,
            BeamConfig::InnerOval(family) => BeamSource::InnerOval(family.clone()),
        }
    }
}

/// Flow pipeline settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowConfig {
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_stop")]
    pub stop: StopRule,
    #[serde(default)]
    pub input: FlowInput,
}

fn default_nodes() -> usize {
    512
}

fn default_stop() -> StopRule {
    StopRule::Flat(1e-3)
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { nodes: default_nodes(), stop: default_stop(), input: FlowInput::default() }
    }
}

/// What the flow starts from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowInput {
    /// The generation-`n` beam, for each `n` in `n_list`.
    #[default]
    Beam,
    /// An explicit graph p(α) = Σ a·cos(kα) + b·sin(kα), given as
    /// `[k, a, b]` harmonics.  Runs once, ignoring `n_list`.
    Graph(Vec<(u32, f64, f64)>),
}

/// Front pipeline settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrontConfig {
    #[serde(default = "default_z0")]
    pub z0_list: Vec<f64>,
}

fn default_z0() -> Vec<f64> {
    vec![0.5]
}

impl Default for FrontConfig {
    fn default() -> Self {
        FrontConfig { z0_list: default_z0() }
    }
}

/// Report-level tolerances, overridable per scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// |∮ p dα| bound for the exactness rows.
    #[serde(default = "d_exactness")]
    pub exactness: f64,
    /// |det J − 1| bound for the phase-area rows.
    #[serde(default = "d_jacobian")]
    pub jacobian: f64,
    /// Chord-length generating-identity residual bound.
    #[serde(default = "d_generating")]
    pub generating: f64,
    /// Relative defect bound for the line-measure perimeter identity.
    #[serde(default = "d_crofton")]
    pub crofton_rel: f64,
    /// |∮ p dα − 2π| bound for the broken-law control.
    #[serde(default = "d_shear")]
    pub shear_defect: f64,
    /// |cross-ratio + 1| bound for the projective-law quadruple.
    #[serde(default = "d_harmonic")]
    pub harmonic: f64,
    /// |c₀|, |c₁| bound in the flattened-graph spectral report.
    #[serde(default = "d_fourier")]
    pub fourier: f64,
    /// Front-equidistance defect bound.
    #[serde(default = "d_equidistance")]
    pub equidistance: f64,
}

fn d_exactness() -> f64 {
    tolerances::CHECK_AREA
}
fn d_jacobian() -> f64 {
    tolerances::CHECK_JACOBIAN
}
fn d_generating() -> f64 {
    tolerances::CHECK_GENERATING
}
fn d_crofton() -> f64 {
    tolerances::CHECK_CROFTON_REL
}
fn d_shear() -> f64 {
    tolerances::CHECK_SHEAR_DEFECT
}
fn d_harmonic() -> f64 {
    1e-9
}
fn d_fourier() -> f64 {
    tolerances::FOURIER_TOL
}
fn d_equidistance() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exactness: d_exactness(),
            jacobian: d_jacobian(),
            generating: d_generating(),
            crofton_rel: d_crofton(),
            shear_defect: d_shear(),
            harmonic: d_harmonic(),
            fourier: d_fourier(),
            equidistance: d_equidistance(),
        }
    }
}

impl Scenario {
    /// Load a scenario from a JSON file, apply `key=value` overrides
    /// (dot-separated paths, values parsed as JSON and falling back to
    /// strings), and validate.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut value: serde_json::Value = serde_json::from_str(&text)?;
        for entry in overrides {
            apply_override(&mut value, entry)?;
        }
        let scenario: Scenario = serde_json::from_value(value)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::ConfigInvalid("n_list must not be empty".into()));
        }
        if self.samples < 16 {
            return Err(Error::ConfigInvalid("samples must be at least 16".into()));
        }
        if self.flow.nodes < 16 {
            return Err(Error::ConfigInvalid("flow.nodes must be at least 16".into()));
        }
        if self.front.z0_list.is_empty() {
            return Err(Error::ConfigInvalid("front.z0_list must not be empty".into()));
        }
        for &z in &self.front.z0_list {
            if !z.is_finite() {
                return Err(Error::ConfigInvalid("front.z0_list entries must be finite".into()));
            }
        }
        if !self.source.iter().all(|c| c.is_finite()) {
            return Err(Error::ConfigInvalid("source must be finite".into()));
        }
        Ok(())
    }

    pub fn source_point(&self) -> Vec2 {
        Vec2::new(self.source[0], self.source[1])
    }

    /// The resolved scenario as one compact JSON line (the provenance echo).
    pub fn provenance(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }
}

/// Set `path.to.key=value` inside a JSON document, creating intermediate
/// objects; numeric segments index into arrays.
fn apply_override(doc: &mut serde_json::Value, entry: &str) -> Result<()> {
    let (path, raw) = entry
        .split_once('=')
        .ok_or_else(|| Error::ConfigInvalid(format!("override '{entry}' is not key=value")))?;
    if path.is_empty() {
        return Err(Error::ConfigInvalid("override has an empty key".into()));
    }
    let value: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cursor = doc;
    let segments: Vec<&str> = path.split('.').collect();
    for (k, seg) in segments.iter().enumerate() {
        let last = k + 1 == segments.len();
        if let Ok(index) = seg.parse::<usize>() {
            let arr = cursor.as_array_mut().ok_or_else(|| {
                Error::ConfigInvalid(format!("override '{path}': '{seg}' indexes a non-array"))
            })?;
            if index >= arr.len() {
                return Err(Error::ConfigInvalid(format!(
                    "override '{path}': index {index} out of bounds ({})",
                    arr.len()
                )));
            }
            if last {
                arr[index] = value;
                return Ok(());
            }
            cursor = &mut arr[index];
        } else {
            if !cursor.is_object() {
                return Err(Error::ConfigInvalid(format!(
                    "override '{path}': '{seg}' traverses a non-object"
                )));
            }
            let map = cursor.as_object_mut().expect("checked");
            if last {
                map.insert((*seg).to_string(), value);
                return Ok(());
            }
            cursor = map
                .entry((*seg).to_string())
                .or_insert_with(|| serde_json::Value::Object(Default::default()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

/// A validated scenario bound to an output directory, with the mirror built.
pub struct Runner {
    pub scenario: Scenario,
    out: PathBuf,
    oval: Oval,
    law: ReflectionLaw,
    provenance: String,
}

impl Runner {
    pub fn new(scenario: Scenario, out: &Path) -> Result<Runner> {
        scenario.validate()?;
        let oval = Oval::build(scenario.oval.clone(), scenario.source_point())?;
        std::fs::create_dir_all(out).map_err(|e| Error::File {
            path: out.display().to_string(),
            source: e,
        })?;
        let provenance = scenario.provenance();
        let law = scenario.law.to_law();
        Ok(Runner { scenario, out: out.to_path_buf(), oval, law, provenance })
    }

    pub fn oval(&self) -> &Oval {
        &self.oval
    }

    fn system(&self) -> Result<RaySystem<'_>> {
        RaySystem::new(&self.oval, self.law.clone(), &self.scenario.beam.to_source())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn headers(&self) -> Vec<String> {
        vec![format!("caustic-forge scenario: {}", self.provenance)]
    }

    fn write_json<T: Serialize>(&self, name: &str, payload: &T) -> Result<()> {
        let path = self.path(name);
        let text = format!("{}\n", serde_json::to_string_pretty(payload)?);
        std::fs::write(&path, text).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })
    }

    // -- caustic ------------------------------------------------------------

    /// Beams, envelopes, cusp reports and the overlay figure, one set per
    /// generation in `n_list`.
    pub fn run_caustic(&self) -> Result<Vec<CuspReport>> {
        let sys = self.system()?;
        let mut reports = Vec::new();
        let mut drawn: Vec<(usize, PlanarCurveWithCusps)> = Vec::new();
        for &n in &self.scenario.n_list {
            let beam = sys.beam(n, self.scenario.samples)?;
            beam.curve
                .write_csv(&self.path(&format!("beam_n{n}.csv")), &self.headers())?;
            let env = caustic::envelope(&sys, &beam)?;
            self.write_planar_csv(&format!("caustic_n{n}.csv"), &env)?;
            let (signed_area, _) = sys.accurate_signed_area(n, self.scenario.samples.max(1024))?;
            let report = CuspReport::new(&self.scenario, n, &beam, &env, signed_area);
            self.write_json(&format!("cusp_report_n{n}.json"), &report)?;
            reports.push(report);
            drawn.push((n, env));
        }
        self.caustic_figure(&sys, &drawn)?;
        Ok(reports)
    }

    fn write_planar_csv(&self, name: &str, curve: &PlanarCurveWithCusps) -> Result<()> {
        let path = self.path(name);
        let file = std::fs::File::create(&path).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut f = std::io::BufWriter::new(file);
        let write = |f: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
            for h in self.headers() {
                writeln!(f, "# {h}")?;
            }
            writeln!(f, "s,x,y,arc_id,is_cusp")?;
            let mut marks = vec![false; curve.s.len()];
            for cusp in &curve.cusps {
                if let Some(i) = nearest_index(&curve.s, cusp.s) {
                    marks[i] = true;
                }
            }
            for i in 0..curve.s.len() {
                writeln!(
                    f,
                    "{:.16e},{:.16e},{:.16e},{},{}",
                    curve.s[i],
                    curve.points[i].x,
                    curve.points[i].y,
                    curve.arc_id[i],
                    u8::from(marks[i]),
                )?;
            }
            Ok(())
        };
        write(&mut f).map_err(|e| Error::File { path: path.display().to_string(), source: e })
    }

    fn caustic_figure(&self, sys: &RaySystem, drawn: &[(usize, PlanarCurveWithCusps)]) -> Result<()> {
        let mut window = Window::empty();
        window.include_all(self.oval.grid_points().iter().copied());
        let mirror_span = (window.max - window.min).norm();
        for (_, env) in drawn {
            window.include_all(
                env.points
                    .iter()
                    .filter(|p| (**p - self.oval.source()).norm() < 1.5 * mirror_span)
                    .copied(),
            );
        }
        let mut fig = Figure::new(window.padded(0.06), 640.0);
        fig.comment(&format!("caustic-forge scenario: {}", self.provenance));
        if self.scenario.rays > 0 {
            if let Some(&(n_max, _)) = drawn.iter().map(|d| d).max_by_key(|(n, _)| *n) {
                for k in 0..self.scenario.rays {
                    let s = TAU * k as f64 / self.scenario.rays as f64;
                    if let Ok(path) = sys.trajectory(s, n_max) {
                        fig.polyline(&path, svg::RAY_COLOR, 0.6);
                    }
                }
            }
        }
        fig.polygon(self.oval.grid_points(), svg::MIRROR_COLOR, 1.6);
        for (n, env) in drawn {
            let color = svg::generation_color(*n);
            for arc in env.arcs() {
                fig.polyline(&env.points[arc], color, 1.2);
            }
            for cusp in &env.cusps {
                if let Some([x, y]) = cusp.point {
                    fig.disk(Vec2::new(x, y), 3.0, svg::CUSP_COLOR);
                }
            }
            if let Some(point) = env.degenerate {
                fig.disk(point, 3.0, color);
            }
        }
        fig.disk(self.oval.source(), 3.5, svg::SOURCE_COLOR);
        fig.write(&self.path("caustics.svg"))
    }

    // -- check --------------------------------------------------------------

    /// The invariant checks: exactness per generation, phase-area Jacobian,
    /// generating identity, the line-measure perimeter identity, plus the
    /// law-specific rows (harmonic quadruple, broken-law defect).
    pub fn run_check(&self) -> Result<CheckReport> {
        use rand::{Rng, SeedableRng};
        let sys = self.system()?;
        let mut rows = Vec::new();

        // Exactness: ∮ p dα per generation (the broken law instead measures
        // its 2π defect against its own row below).
        let shear = matches!(self.law, ReflectionLaw::ShearControl);
        for &n in &self.scenario.n_list {
            let (area, estimate) = sys.accurate_signed_area(n, self.scenario.samples.max(1024))?;
            if shear {
                if n == 1 {
                    let defect = (area - TAU).abs();
                    rows.push(CheckRow::new(
                        format!("shear_defect_n{n}"),
                        defect,
                        self.scenario.tolerances.shear_defect,
                    ));
                }
            } else {
                rows.push(
                    CheckRow::new(
                        format!("exactness_n{n}"),
                        area.abs(),
                        self.scenario.tolerances.exactness,
                    )
                    .with_detail(format!("estimate {estimate:.3e}")),
                );
            }
        }

        // Jacobian of one reflection at seeded random phase points.  The
        // gradient-field projective law preserves a different area form, so
        // its raw values are reported without a pass verdict.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0CA5_71C5);
        let gradient_law = matches!(
            self.law,
            ReflectionLaw::Projective(TransverseField::Gradient(_))
        );
        let mut worst = 0.0_f64;
        let mut attempts = 0;
        let mut kept = 0;
        while kept < 32 && attempts < 512 {
            attempts += 1;
            let alpha = rng.gen::<f64>() * TAU;
            let p = (rng.gen::<f64>() - 0.5) * self.oval.perimeter() / TAU;
            match billiard::jacobian_determinant(&self.oval, &self.law, alpha, p, 1e-5) {
                Ok(det) => {
                    worst = worst.max((det - 1.0).abs());
                    kept += 1;
                }
                Err(_) => continue,
            }
        }
        if kept > 0 && !gradient_law && !shear {
            rows.push(
                CheckRow::new("jacobian".into(), worst, self.scenario.tolerances.jacobian)
                    .with_detail(format!("{kept} phase points")),
            );
        } else if kept > 0 {
            rows.push(
                CheckRow::informational("jacobian_raw".into(), worst)
                    .with_detail(format!("{kept} phase points; law preserves a different form")),
            );
        }

        // Chord-length generating identity (standard reflection only).
        if matches!(self.law, ReflectionLaw::Standard) {
            let mut worst = 0.0_f64;
            for k in 0..32 {
                let t = TAU * k as f64 / 32.0;
                let phi = 0.3 + 2.5 * rng.gen::<f64>() * 0.9;
                let r = billiard::generating_residual(&self.oval, t, phi, 1e-5)?;
                worst = worst.max(r);
            }
            rows.push(CheckRow::new(
                "generating".into(),
                worst,
                self.scenario.tolerances.generating,
            ));
        }

        // Line-measure perimeter identity for the mirror.
        let per = self.oval.perimeter();
        let rel = (self.oval.crofton_integral() - per).abs() / per;
        rows.push(CheckRow::new(
            "crofton_rel".into(),
            rel,
            self.scenario.tolerances.crofton_rel,
        ));

        // Harmonic quadruple of the projective law.
        if let ReflectionLaw::Projective(field) = &self.law {
            let mut worst = 0.0_f64;
            for k in 0..64 {
                let t = TAU * k as f64 / 64.0;
                let tau_dir = self.oval.tangent(t).normalized();
                let v = field.direction(&self.oval, t).normalized();
                let phi = 0.2 + 0.04 * k as f64;
                let u = (phi.cos() * tau_dir + phi.sin() * Vec2::new(-tau_dir.y, tau_dir.x))
                    .normalized();
                let w = billiard::bounce_direction(&self.oval, &self.law, t, u)?;
                let cr = crate::numerics::line_pencil_cross_ratio(tau_dir, v, u, w);
                worst = worst.max((cr + 1.0).abs());
            }
            rows.push(CheckRow::new(
                "harmonic_quadruple".into(),
                worst,
                self.scenario.tolerances.harmonic,
            ));
        }

        let pass = rows.iter().all(|r| r.pass.unwrap_or(true));
        let report = CheckReport {
            scenario: self.scenario.clone(),
            checks: rows,
            pass,
        };
        self.write_json("checks.json", &report)?;
        Ok(report)
    }

    // -- flow ---------------------------------------------------------------

    /// Shorten each requested curve to a geodesic: monitors, snapshot dumps,
    /// the spectral report at the graph stage, and a filmstrip per run.
    pub fn run_flow(&self) -> Result<Vec<FlowReport>> {
        let mut reports = Vec::new();
        match &self.scenario.flow.input {
            FlowInput::Graph(harmonics) => {
                let terms = harmonics.clone();
                let m = self.scenario.flow.nodes.max(256);
                let curve = CylinderCurve::from_graph(m, |a| {
                    terms
                        .iter()
                        .map(|&(k, ca, sa)| {
                            ca * (k as f64 * a).cos() + sa * (k as f64 * a).sin()
                        })
                        .sum()
                });
                reports.push(self.flow_one("graph", &curve)?);
            }
            FlowInput::Beam => {
                let sys = self.system()?;
                for &n in &self.scenario.n_list {
                    let beam = sys.beam(n, self.scenario.samples)?;
                    reports.push(self.flow_one(&format!("n{n}"), &beam.curve)?);
                }
            }
        }
        Ok(reports)
    }

    fn flow_one(&self, tag: &str, curve: &CylinderCurve) -> Result<FlowReport> {
        let run = flow::csf_run(curve, self.scenario.flow.stop, self.scenario.flow.nodes)?;
        self.write_monitor_csv(&format!("monitors_{tag}.csv"), &run.monitors)?;
        for (k, snap) in run.snapshots.iter().enumerate() {
            self.write_snapshot_csv(&format!("flow_{tag}_snap{k:03}.csv"), snap)?;
        }
        let sturm = match run.graph_state.as_ref() {
            Some(state) => {
                let mut report = flow::sturm_hurwitz_check(state)?;
                report.pass = report.c0.abs() < self.scenario.tolerances.fourier
                    && report.c1 < self.scenario.tolerances.fourier
                    && report.sign_changes >= 4;
                Some(report)
            }
            None => None,
        };
        let a0 = run.monitors.first().map(|r| r.area).unwrap_or(0.0);
        let drift = run
            .monitors
            .iter()
            .fold(0.0_f64, |m, r| m.max((r.area - a0).abs()));
        let scale = TAU * run.snapshots.first().map(|s| s.max_abs_p()).unwrap_or(0.0);
        let monotone = run
            .monitors
            .windows(2)
            .all(|w| w[1].inflections <= w[0].inflections);
        self.flow_figure(tag, &run)?;
        let report = FlowReport {
            tag: tag.to_string(),
            stop: run.stop,
            steps: run.final_state.steps,
            time: run.final_state.time,
            monitor_rows: run.monitors.len(),
            snapshots: run.snapshots.len(),
            area_drift: drift,
            area_drift_relative: if scale > 0.0 { drift / scale } else { 0.0 },
            inflections_monotone: monotone,
            terminal_max_p: run.final_state.max_abs_p(),
            sturm_hurwitz: sturm,
        };
        self.write_json(&format!("flow_report_{tag}.json"), &FlowReportFile {
            scenario: self.scenario.clone(),
            report: report.clone(),
        })?;
        Ok(report)
    }

    fn write_monitor_csv(&self, name: &str, rows: &[MonitorRow]) -> Result<()> {
        let path = self.path(name);
        let file = std::fs::File::create(&path).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut f = std::io::BufWriter::new(file);
        let write = |f: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
            for h in self.headers() {
                writeln!(f, "# {h}")?;
            }
            writeln!(f, "time,area,inflections,max_p,max_curvature")?;
            for r in rows {
                writeln!(
                    f,
                    "{:.16e},{:.16e},{},{:.16e},{:.16e}",
                    r.time, r.area, r.inflections, r.max_p, r.max_curvature
                )?;
            }
            Ok(())
        };
        write(&mut f).map_err(|e| Error::File { path: path.display().to_string(), source: e })
    }

    fn write_snapshot_csv(&self, name: &str, state: &FlowState) -> Result<()> {
        let path = self.path(name);
        let file = std::fs::File::create(&path).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut f = std::io::BufWriter::new(file);
        let write = |f: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
            for h in self.headers() {
                writeln!(f, "# {h}")?;
            }
            writeln!(f, "# time: {:.16e}", state.time)?;
            writeln!(f, "node,alpha,p")?;
            for i in 0..state.len() {
                writeln!(f, "{},{:.16e},{:.16e}", i, state.alpha[i], state.p[i])?;
            }
            Ok(())
        };
        write(&mut f).map_err(|e| Error::File { path: path.display().to_string(), source: e })
    }

    fn flow_figure(&self, tag: &str, run: &flow::FlowRun) -> Result<()> {
        let mut window = Window::empty();
        for snap in &run.snapshots {
            for i in 0..snap.len() {
                window.include(Vec2::new(snap.alpha[i], snap.p[i]));
            }
        }
        let mut strip = Filmstrip::new(window.padded(0.05), 180.0, 4);
        for snap in &run.snapshots {
            let mut pts: Vec<Vec2> = (0..snap.len())
                .map(|i| Vec2::new(snap.alpha[i], snap.p[i]))
                .collect();
            let (a0, p0) = snap.node(snap.len() as isize);
            pts.push(Vec2::new(a0, p0));
            strip.panel(
                &pts,
                svg::PALETTE[1],
                &format!("t = {:.3}, inflections = {}", snap.time, snap.inflection_count()),
            );
        }
        strip.write(&self.path(&format!("flow_{tag}.svg")))
    }

    // -- front --------------------------------------------------------------

    /// Wave fronts at the requested offsets, their vertex censuses, the
    /// cusp/vertex cross-check, and the layout figure.
    pub fn run_front(&self) -> Result<FrontReport> {
        let sys = self.system()?;
        let mut entries = Vec::new();
        let mut drawn_fronts: Vec<(usize, Front)> = Vec::new();
        let mut drawn_envs: Vec<(usize, PlanarCurveWithCusps)> = Vec::new();
        for &n in &self.scenario.n_list {
            let beam = sys.beam(n, self.scenario.samples)?;
            let env = caustic::envelope(&sys, &beam)?;
            let cusps = env.cusp_count();
            let degenerate = env.degenerate.map(|p| [p.x, p.y]);
            let m = self.scenario.samples.max(1024);
            let mut fronts = Vec::new();
            let mut states: Vec<Front> = Vec::new();
            for (i, &z0) in self.scenario.front.z0_list.iter().enumerate() {
                let front = caustic::normal_front(&sys, n, z0, m)?;
                self.write_front_csv(&format!("front_n{n}_z{i}.csv"), &front)?;
                let census = vertex_census(&front);
                fronts.push(FrontEntry {
                    z0,
                    vertices: census.count,
                    constant_curvature: census.constant_curvature,
                    closure_gap: front.closure_gap,
                    matches_cusps: if env.degenerate.is_some() || census.constant_curvature {
                        None
                    } else {
                        Some(census.count == cusps)
                    },
                });
                states.push(front);
            }
            // Equidistance between front pairs: along each normal the
            // offsets differ by exactly z0_j − z0_i.
            let mut equidistance = Vec::new();
            for i in 0..states.len() {
                for j in i + 1..states.len() {
                    let gap = (self.scenario.front.z0_list[j]
                        - self.scenario.front.z0_list[i])
                        .abs();
                    let defect = states[i]
                        .points
                        .iter()
                        .zip(&states[j].points)
                        .fold(0.0_f64, |m, (a, b)| m.max(((*b - *a).norm() - gap).abs()));
                    equidistance.push(EquidistanceRow {
                        z0_pair: [
                            self.scenario.front.z0_list[i],
                            self.scenario.front.z0_list[j],
                        ],
                        defect,
                        pass: defect < self.scenario.tolerances.equidistance,
                    });
                }
            }
            entries.push(FrontGenerationReport {
                n,
                cusps,
                degenerate,
                fronts,
                equidistance,
            });
            for front in states {
                drawn_fronts.push((n, front));
            }
            drawn_envs.push((n, env));
        }
        let report = FrontReport {
            scenario: self.scenario.clone(),
            generations: entries,
        };
        self.write_json("front_report.json", &report)?;
        self.front_figure(&sys, &drawn_fronts, &drawn_envs)?;
        Ok(report)
    }

    fn write_front_csv(&self, name: &str, front: &Front) -> Result<()> {
        let path = self.path(name);
        let file = std::fs::File::create(&path).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut f = std::io::BufWriter::new(file);
        let write = |f: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
            for h in self.headers() {
                writeln!(f, "# {h}")?;
            }
            writeln!(f, "# closure_gap: {:.16e}", front.closure_gap)?;
            writeln!(f, "s,x,y,alpha,p,z")?;
            for i in 0..front.s.len() {
                writeln!(
                    f,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    front.s[i],
                    front.points[i].x,
                    front.points[i].y,
                    front.alpha[i],
                    front.p[i],
                    front.z[i],
                )?;
            }
            Ok(())
        };
        write(&mut f).map_err(|e| Error::File { path: path.display().to_string(), source: e })
    }

    fn front_figure(
        &self,
        sys: &RaySystem,
        fronts: &[(usize, Front)],
        envs: &[(usize, PlanarCurveWithCusps)],
    ) -> Result<()> {
        let mut window = Window::empty();
        window.include_all(self.oval.grid_points().iter().copied());
        let mirror_span = (window.max - window.min).norm();
        for (_, front) in fronts {
            window.include_all(front.points.iter().copied());
        }
        for (_, env) in envs {
            window.include_all(
                env.points
                    .iter()
                    .filter(|p| (**p - self.oval.source()).norm() < 1.5 * mirror_span)
                    .copied(),
            );
        }
        let mut fig = Figure::new(window.padded(0.06), 640.0);
        fig.comment(&format!("caustic-forge scenario: {}", self.provenance));
        if self.scenario.rays > 0 {
            if let Some(&(n_max, _)) = envs.iter().map(|d| d).max_by_key(|(n, _)| *n) {
                for k in 0..self.scenario.rays {
                    let s = TAU * k as f64 / self.scenario.rays as f64;
                    if let Ok(path) = sys.trajectory(s, n_max) {
                        fig.polyline(&path, svg::RAY_COLOR, 0.6);
                    }
                }
            }
        }
        fig.polygon(self.oval.grid_points(), svg::MIRROR_COLOR, 1.6);
        for (n, env) in envs {
            let color = svg::generation_color(*n);
            for arc in env.arcs() {
                fig.polyline(&env.points[arc], color, 1.2);
            }
            for cusp in &env.cusps {
                if let Some([x, y]) = cusp.point {
                    fig.disk(Vec2::new(x, y), 3.0, svg::CUSP_COLOR);
                }
            }
            if let Some(point) = env.degenerate {
                fig.disk(point, 3.0, color);
            }
        }
        for (_, front) in fronts {
            fig.polygon(&front.points, "#9467bd", 1.0);
            for &mark in &front.cusp_marks {
                fig.disk(front.points[mark], 2.5, svg::CUSP_COLOR);
            }
        }
        fig.disk(self.oval.source(), 3.5, svg::SOURCE_COLOR);
        fig.write(&self.path("fronts.svg"))
    }
}

fn nearest_index(sorted: &[f64], target: f64) -> Option<usize> {
    if sorted.is_empty() {
        return None;
    }
    let pos = sorted.partition_point(|&s| s < target);
    let mut best = pos.min(sorted.len() - 1);
    if pos > 0 && (sorted[pos - 1] - target).abs() < (sorted[best] - target).abs() {
        best = pos - 1;
    }
    Some(best)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Cusp census of one generation.
#[derive(Clone, Debug, Serialize)]
pub struct CuspReport {
    pub n: usize,
    pub cusps: usize,
    pub degenerate: Option<[f64; 2]>,
    pub signed_area: f64,
    pub at_infinity: bool,
    pub arcs: usize,
    pub cusp_parameters: Vec<f64>,
    pub cusp_points: Vec<Option<[f64; 2]>>,
    /// Set when a non-circular mirror shows the conjectured minimal count.
    pub conjecture_evidence: bool,
    pub beam_samples: usize,
    pub beam_simple: bool,
    pub scenario: Scenario,
}

impl CuspReport {
    fn new(
        scenario: &Scenario,
        n: usize,
        beam: &Beam,
        env: &PlanarCurveWithCusps,
        signed_area: f64,
    ) -> CuspReport {
        let circular = match &scenario.oval {
            OvalFamily::Ellipse { a, b } => (a - b).abs() < 1e-12,
            _ => false,
        };
        CuspReport {
            n,
            cusps: env.cusp_count(),
            degenerate: env.degenerate.map(|p| [p.x, p.y]),
            signed_area,
            at_infinity: env.passes_infinity,
            arcs: env.arcs().len(),
            cusp_parameters: env.cusps.iter().map(|c| c.s).collect(),
            cusp_points: env.cusps.iter().map(|c| c.point).collect(),
            conjecture_evidence: !circular
                && matches!(scenario.law, LawConfig::Standard)
                && env.cusp_count() == 4,
            beam_samples: beam.curve.len(),
            beam_simple: beam.diagnostics.simple,
            scenario: scenario.clone(),
        }
    }
}

/// One named residual with its bound.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRow {
    fn new(name: String, value: f64, tolerance: f64) -> CheckRow {
        CheckRow {
            name,
            value,
            tolerance: Some(tolerance),
            pass: Some(value < tolerance),
            detail: None,
        }
    }

    fn informational(name: String, value: f64) -> CheckRow {
        CheckRow { name, value, tolerance: None, pass: None, detail: None }
    }

    fn with_detail(mut self, detail: String) -> CheckRow {
        self.detail = Some(detail);
        self
    }
}

/// The full `checks.json` payload.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub scenario: Scenario,
    pub checks: Vec<CheckRow>,
    pub pass: bool,
}

/// Summary of one flow run (also embedded in `flow_report_*.json`).
#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub tag: String,
    pub stop: flow::StopReason,
    pub steps: u64,
    pub time: f64,
    pub monitor_rows: usize,
    pub snapshots: usize,
    pub area_drift: f64,
    pub area_drift_relative: f64,
    pub inflections_monotone: bool,
    pub terminal_max_p: f64,
    pub sturm_hurwitz: Option<SturmHurwitzReport>,
}

#[derive(Clone, Debug, Serialize)]
struct FlowReportFile {
    scenario: Scenario,
    #[serde(flatten)]
    report: FlowReport,
}

/// One front's census.
#[derive(Clone, Debug, Serialize)]
pub struct FrontEntry {
    pub z0: f64,
    pub vertices: usize,
    pub constant_curvature: bool,
    pub closure_gap: f64,
    /// `None` when the caustic is degenerate or the front has constant
    /// curvature (no isolated vertices to count).
    pub matches_cusps: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistanceRow {
    pub z0_pair: [f64; 2],
    pub defect: f64,
    pub pass: bool,
}

/// Census and cross-checks for one generation.
#[derive(Clone, Debug, Serialize)]
pub struct FrontGenerationReport {
    pub n: usize,
    pub cusps: usize,
    pub degenerate: Option<[f64; 2]>,
    pub fronts: Vec<FrontEntry>,
    pub equidistance: Vec<EquidistanceRow>,
}

/// The full `front_report.json` payload.
#[derive(Clone, Debug, Serialize)]
pub struct FrontReport {
    pub scenario: Scenario,
    pub generations: Vec<FrontGenerationReport>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch_dir(stem: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "caustic-forge-test-{}-{stem}",
            std::process::id()
        ));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn circle_scenario() -> Scenario {
        serde_json::from_value(serde_json::json!({
            "oval": {"family": "ellipse", "a": 1.0, "b": 1.0},
            "source": [0.5, 0.0],
            "n_list": [1],
            "samples": 256,
            "rays": 8,
        }))
        .unwrap()
    }

    #[test]
    fn the_default_law_and_beam_fill_in() {
        let s = circle_scenario();
        assert_eq!(s.law, LawConfig::Standard);
        assert_eq!(s.beam, BeamConfig::Point);
        assert_eq!(s.flow.nodes, 512);
        assert_eq!(s.flow.stop, StopRule::Flat(1e-3));
        assert_eq!(s.tolerances.crofton_rel, tolerances::CHECK_CROFTON_REL);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let result: std::result::Result<Scenario, _> =
            serde_json::from_value(serde_json::json!({
                "oval": {"family": "ellipse", "a": 1.0, "b": 1.0},
                "source": [0.5, 0.0],
                "n_list": [1],
                "typo_field": true,
            }));
        assert!(result.is_err());
    }

    #[test]
    fn overrides_reach_nested_fields_and_arrays() {
        let mut doc = serde_json::json!({
            "oval": {"family": "ellipse", "a": 1.0, "b": 1.0},
            "source": [0.5, 0.0],
            "n_list": [1, 2],
            "flow": {"nodes": 512},
        });
        apply_override(&mut doc, "flow.nodes=2048").unwrap();
        apply_override(&mut doc, "source.1=0.25").unwrap();
        apply_override(&mut doc, "flow.stop={\"time\":2.0}").unwrap();
        apply_override(&mut doc, "n_list=[3]").unwrap();
        let s: Scenario = serde_json::from_value(doc).unwrap();
        assert_eq!(s.flow.nodes, 2048);
        assert_eq!(s.source[1], 0.25);
        assert_eq!(s.flow.stop, StopRule::Time(2.0));
        assert_eq!(s.n_list, vec![3]);

        let mut doc = serde_json::json!({"n_list": [1]});
        assert!(apply_override(&mut doc, "n_list.7=2").is_err());
        assert!(apply_override(&mut doc, "no_equals_sign").is_err());
    }

    #[test]
    fn law_and_beam_configs_round_trip_their_json_shapes() {
        let law: LawConfig = serde_json::from_str("\"shear_control\"").unwrap();
        assert_eq!(law, LawConfig::ShearControl);
        let law: LawConfig =
            serde_json::from_str(r#"{"projective": {"field": "normal"}}"#).unwrap();
        assert_eq!(law, LawConfig::Projective { field: FieldConfig::Normal });
        let law: LawConfig =
            serde_json::from_str(r#"{"projective": {"field": {"gradient": [[4,0,1.0],[0,4,1.0]]}}}"#)
                .unwrap();
        match law.to_law() {
            ReflectionLaw::Projective(TransverseField::Gradient(poly)) => {
                assert_eq!(poly.terms.len(), 2);
            }
            other => panic!("wrong law: {other:?}"),
        }
        let beam: BeamConfig = serde_json::from_str(
            r#"{"inner_oval": {"family": "ellipse", "a": 0.3, "b": 0.2}}"#,
        )
        .unwrap();
        assert!(matches!(beam, BeamConfig::InnerOval(OvalFamily::Ellipse { .. })));
    }

    #[test]
    fn caustic_pipeline_emits_the_promised_files() {
        let dir = scratch_dir("caustic");
        let runner = Runner::new(circle_scenario(), &dir).unwrap();
        let reports = runner.run_caustic().unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].cusps, 4);
        assert!(reports[0].signed_area.abs() < 1e-8);
        assert!(!reports[0].conjecture_evidence, "circles are the classical case");
        for name in ["beam_n1.csv", "caustic_n1.csv", "cusp_report_n1.json", "caustics.svg"] {
            let path = dir.join(name);
            assert!(path.exists(), "{name} missing");
            let text = std::fs::read_to_string(&path).unwrap();
            let echoed = if name.ends_with(".json") {
                text.contains("\"scenario\"")
            } else {
                text.contains("caustic-forge scenario:")
            };
            assert!(echoed, "{name} lacks the provenance echo");
        }
        let csv = std::fs::read_to_string(dir.join("caustic_n1.csv")).unwrap();
        let cusp_rows = csv.lines().filter(|l| l.ends_with(",1")).count();
        assert_eq!(cusp_rows, 4, "cusp markers in the CSV");
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn check_pipeline_passes_the_circle_and_flags_the_broken_law() {
        let dir = scratch_dir("check");
        let runner = Runner::new(circle_scenario(), &dir).unwrap();
        let report = runner.run_check().unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.checks.iter().any(|r| r.name == "exactness_n1"));
        assert!(report.checks.iter().any(|r| r.name == "crofton_rel"));
        assert!(dir.join("checks.json").exists());

        let mut shear = circle_scenario();
        shear.law = LawConfig::ShearControl;
        let runner = Runner::new(shear, &dir).unwrap();
        let report = runner.run_check().unwrap();
        let row = report
            .checks
            .iter()
            .find(|r| r.name == "shear_defect_n1")
            .expect("shear row");
        assert!(row.value < 1e-8, "defect from exactly 2π: {}", row.value);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn flow_pipeline_handles_beams_and_graphs() {
        let dir = scratch_dir("flow");
        let mut scenario = circle_scenario();
        scenario.flow.nodes = 128;
        scenario.flow.input = FlowInput::Graph(vec![(2, 0.2, 0.0)]);
        let runner = Runner::new(scenario, &dir).unwrap();
        let reports = runner.run_flow().unwrap();
        assert_eq!(reports.len(), 1);
        let sturm = reports[0].sturm_hurwitz.as_ref().expect("graph stage");
        assert_eq!(sturm.sign_changes, 4);
        assert!(sturm.pass);
        assert!(dir.join("monitors_graph.csv").exists());
        assert!(dir.join("flow_graph.svg").exists());
        assert!(dir.join("flow_report_graph.json").exists());
        assert!(dir.join("flow_graph_snap000.csv").exists());

        // C_0 of a point source is the geodesic p = 0: stationary, stops at
        // once.
        let mut scenario = circle_scenario();
        scenario.n_list = vec![0];
        scenario.flow.nodes = 128;
        let runner = Runner::new(scenario, &dir).unwrap();
        let reports = runner.run_flow().unwrap();
        assert_eq!(reports[0].steps, 0);
        assert_eq!(reports[0].time, 0.0);
        assert!(reports[0].terminal_max_p < 1e-12);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn front_pipeline_cross_checks_cusps_against_vertices() {
        let dir = scratch_dir("front");
        let mut scenario = circle_scenario();
        scenario.front.z0_list = vec![0.3, 0.5];
        let runner = Runner::new(scenario, &dir).unwrap();
        let report = runner.run_front().unwrap();
        let gen = &report.generations[0];
        assert_eq!(gen.cusps, 4);
        for entry in &gen.fronts {
            assert_eq!(entry.matches_cusps, Some(true), "{entry:?}");
            assert!(entry.closure_gap < 1e-8);
        }
        assert_eq!(gen.equidistance.len(), 1);
        assert!(gen.equidistance[0].pass, "{:?}", gen.equidistance[0]);
        assert!(dir.join("front_n1_z0.csv").exists());
        assert!(dir.join("front_n1_z1.csv").exists());
        assert!(dir.join("front_report.json").exists());
        assert!(dir.join("fronts.svg").exists());
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn runner_rejects_invalid_scenarios() {
        let dir = scratch_dir("invalid");
        let mut scenario = circle_scenario();
        scenario.n_list.clear();
        assert!(matches!(
            Runner::new(scenario, &dir),
            Err(Error::ConfigInvalid(_))
        ));
        let mut scenario = circle_scenario();
        scenario.source = [2.0, 0.0];
        assert!(Runner::new(scenario, &dir).is_err(), "source outside the mirror");
        let _ = std::fs::remove_dir_all(&dir);
    }
}
