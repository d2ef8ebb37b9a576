//! Minimal SVG emission for the figures.
//!
//! Hand-built tags — the figures are polylines, disks and captions, nothing a
//! plotting crate would earn its weight for.  All figures share one fixed
//! style so regressions diff cleanly: mirror black, source a small dark disk,
//! caustics colored by generation, cusps gray disks.  Coordinates are mapped
//! from the world frame with the y-axis flipped (SVG y grows downward) and
//! the aspect ratio preserved.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Stroke colors by generation: `n = 1` red, `n = 2` blue, `n = 3` green,
/// cycling for higher generations.  Generation 0 (the initial pencil) is
/// drawn in the ray color, not from this palette.
pub const PALETTE: [&str; 3] = ["#d62728", "#1f77b4", "#2ca02c"];

/// Fixed figure styles.
pub const MIRROR_COLOR: &str = "#000000";
pub const RAY_COLOR: &str = "#b0b0b0";
pub const SOURCE_COLOR: &str = "#202020";
pub const CUSP_COLOR: &str = "#808080";

/// The stroke color for the generation-`n` curve.
pub fn generation_color(n: usize) -> &'static str {
    PALETTE[(n + PALETTE.len() - 1) % PALETTE.len()]
}

/// Axis-aligned world window a figure displays.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub min: Vec2,
    pub max: Vec2,
}

impl Window {
    /// The empty window; grow it with [`Window::include`].
    pub fn empty() -> Self {
        Window {
            min: Vec2::new(f64::INFINITY, f64::INFINITY),
            max: Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn include(&mut self, p: Vec2) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn include_all<I: IntoIterator<Item = Vec2>>(&mut self, pts: I) {
        for p in pts {
            self.include(p);
        }
    }

    /// Grow every side by `frac` of the larger extent (also rescues
    /// degenerate zero-extent windows).
    pub fn padded(self, frac: f64) -> Self {
        let w = (self.max.x - self.min.x).max(self.max.y - self.min.y);
        let pad = (frac * w).max(1e-3);
        Window {
            min: self.min - Vec2::new(pad, pad),
            max: self.max + Vec2::new(pad, pad),
        }
    }

    fn is_valid(&self) -> bool {
        self.min.x.is_finite()
            && self.min.y.is_finite()
            && self.max.x > self.min.x
            && self.max.y > self.min.y
    }
}

/// One figure: a world window mapped onto a pixel canvas.
pub struct Figure {
    buf: String,
    scale: f64,
    min: Vec2,
    max_y: f64,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    /// A canvas `width_px` wide showing `window`; the height follows from
    /// the aspect ratio.
    pub fn new(window: Window, width_px: f64) -> Figure {
        let window = if window.is_valid() {
            window
        } else {
            Window { min: Vec2::new(-1.0, -1.0), max: Vec2::new(1.0, 1.0) }
        };
        let scale = width_px / (window.max.x - window.min.x);
        let height = ((window.max.y - window.min.y) * scale).ceil();
        let mut buf = String::new();
        let _ = writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
             viewBox=\"0 0 {w:.0} {h:.0}\">",
            w = width_px.ceil(),
            h = height,
        );
        let _ = writeln!(
            buf,
            "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>"
        );
        Figure { buf, scale, min: window.min, max_y: window.max.y }
    }

    /// Embed provenance (the resolved scenario, say) as an XML comment.
    pub fn comment(&mut self, text: &str) {
        let safe = text.replace("--", "\u{2010}\u{2010}");
        let _ = writeln!(self.buf, "<!-- {safe} -->");
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (
            (p.x - self.min.x) * self.scale,
            (self.max_y - p.y) * self.scale,
        )
    }

    /// An open polyline in world points.
    pub fn polyline(&mut self, pts: &[Vec2], stroke: &str, width_px: f64) {
        self.path(pts, stroke, width_px, false);
    }

    /// A closed polyline in world points.
    pub fn polygon(&mut self, pts: &[Vec2], stroke: &str, width_px: f64) {
        self.path(pts, stroke, width_px, true);
    }

    fn path(&mut self, pts: &[Vec2], stroke: &str, width_px: f64, closed: bool) {
        if pts.len() < 2 {
            return;
        }
        let _ = write!(self.buf, "<path fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width_px}\" d=\"");
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = self.map(p);
            let _ = write!(self.buf, "{}{x:.2} {y:.2}", if i == 0 { "M" } else { " L" });
        }
        let _ = writeln!(self.buf, "{}\"/>", if closed { " Z" } else { "" });
    }

    /// A filled disk with a pixel radius (markers keep their size regardless
    /// of the window).
    pub fn disk(&mut self, center: Vec2, radius_px: f64, fill: &str) {
        let (x, y) = self.map(center);
        let _ = writeln!(
            self.buf,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{radius_px}\" fill=\"{fill}\"/>"
        );
    }

    /// A small caption anchored at a world point.
    pub fn label(&mut self, anchor: Vec2, text: &str) {
        let (x, y) = self.map(anchor);
        let _ = writeln!(
            self.buf,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"#404040\">{}</text>",
            escape(text)
        );
    }

    /// A caption in canvas coordinates (pixels from the top-left corner).
    pub fn caption(&mut self, x_px: f64, y_px: f64, text: &str) {
        let _ = writeln!(
            self.buf,
            "<text x=\"{x_px:.2}\" y=\"{y_px:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"#404040\">{}</text>",
            escape(text)
        );
    }

    /// The finished document.
    pub fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }

    pub fn write(self, path: &Path) -> Result<()> {
        let text = self.finish();
        std::fs::write(path, text).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })
    }
}

/// A grid of equally-sized panels sharing one window — the flow filmstrip.
pub struct Filmstrip {
    buf: String,
    window: Window,
    panel_px: f64,
    cols: usize,
    count: usize,
    width: f64,
}

impl Filmstrip {
    const GAP: f64 = 10.0;
    const CAPTION: f64 = 18.0;

    /// Panels `panel_px` wide, `cols` per row, all showing `window` (in the
    /// chart the caller plots — the flow uses the (α, p) chart).
    pub fn new(window: Window, panel_px: f64, cols: usize) -> Filmstrip {
        let cols = cols.max(1);
        let window = if window.is_valid() {
            window
        } else {
            Window { min: Vec2::new(-1.0, -1.0), max: Vec2::new(1.0, 1.0) }
        };
        let width = cols as f64 * (panel_px + Self::GAP) + Self::GAP;
        Filmstrip { buf: String::new(), window, panel_px, cols, count: 0, width }
    }

    fn panel_height(&self) -> f64 {
        let aspect = (self.window.max.y - self.window.min.y)
            / (self.window.max.x - self.window.min.x);
        (self.panel_px * aspect).ceil() + Self::CAPTION
    }

    /// Append one panel: a polyline plus a caption under it.
    pub fn panel(&mut self, pts: &[Vec2], stroke: &str, caption: &str) {
        let row = self.count / self.cols;
        let col = self.count % self.cols;
        self.count += 1;
        let ph = self.panel_height();
        let x0 = Self::GAP + col as f64 * (self.panel_px + Self::GAP);
        let y0 = Self::GAP + row as f64 * (ph + Self::GAP);
        let _ = writeln!(self.buf, "<g transform=\"translate({x0:.2} {y0:.2})\">");
        let _ = writeln!(
            self.buf,
            "<rect width=\"{w:.2}\" height=\"{h:.2}\" fill=\"#ffffff\" stroke=\"#d0d0d0\"/>",
            w = self.panel_px,
            h = ph - Self::CAPTION,
        );
        let scale = self.panel_px / (self.window.max.x - self.window.min.x);
        if pts.len() >= 2 {
            let _ = write!(
                self.buf,
                "<path fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1\" d=\""
            );
            for (i, &p) in pts.iter().enumerate() {
                let x = (p.x - self.window.min.x) * scale;
                let y = (self.window.max.y - p.y) * scale;
                let _ = write!(self.buf, "{}{x:.2} {y:.2}", if i == 0 { "M" } else { " L" });
            }
            let _ = writeln!(self.buf, "\"/>");
        }
        let _ = writeln!(
            self.buf,
            "<text x=\"2\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"#404040\">{}</text>",
            escape(caption),
            y = ph - 5.0,
        );
        let _ = writeln!(self.buf, "</g>");
    }

    /// The finished document.
    pub fn finish(self) -> String {
        let rows = self.count.div_ceil(self.cols).max(1);
        let height = Self::GAP + rows as f64 * (self.panel_height() + Self::GAP);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
             viewBox=\"0 0 {w:.0} {h:.0}\">",
            w = self.width,
            h = height,
        );
        let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>");
        out.push_str(&self.buf);
        out.push_str("</svg>\n");
        out
    }

    pub fn write(self, path: &Path) -> Result<()> {
        let text = self.finish();
        std::fs::write(path, text).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_vertical_axis_is_flipped() {
        let mut w = Window::empty();
        w.include_all([Vec2::new(0.0, 0.0), Vec2::new(2.0, 1.0)]);
        let fig = Figure::new(w, 200.0);
        let (x_lo, y_lo) = fig.map(Vec2::new(0.0, 0.0));
        let (x_hi, y_hi) = fig.map(Vec2::new(2.0, 1.0));
        assert_eq!((x_lo, y_lo), (0.0, 100.0));
        assert_eq!((x_hi, y_hi), (200.0, 0.0));
    }

    #[test]
    fn palette_cycles_from_red() {
        assert_eq!(generation_color(1), "#d62728");
        assert_eq!(generation_color(2), "#1f77b4");
        assert_eq!(generation_color(3), "#2ca02c");
        assert_eq!(generation_color(4), "#d62728");
    }

    #[test]
    fn documents_are_well_formed_enough() {
        let mut w = Window::empty();
        w.include_all([Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0)]);
        let mut fig = Figure::new(w, 300.0);
        fig.comment("run -- config");
        fig.polyline(&[Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)], "#000000", 1.5);
        fig.disk(Vec2::new(0.0, 0.0), 3.0, "#808080");
        fig.label(Vec2::new(0.5, 0.5), "n < 2 & more");
        let text = fig.finish();
        assert!(text.starts_with("<svg "));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.contains("<path"));
        assert!(text.contains("<circle"));
        assert!(text.contains("n &lt; 2 &amp; more"));
        assert!(!text.contains("run -- config"), "comment must not embed --");
        assert_eq!(text.matches("<svg").count(), 1);
    }

    #[test]
    fn filmstrips_tile_panels_left_to_right() {
        let mut w = Window::empty();
        w.include_all([Vec2::new(0.0, -1.0), Vec2::new(6.28, 1.0)]);
        let mut strip = Filmstrip::new(w, 120.0, 3);
        for k in 0..5 {
            strip.panel(
                &[Vec2::new(0.0, 0.0), Vec2::new(6.28, 0.5)],
                "#1f77b4",
                &format!("t = {k}"),
            );
        }
        let text = strip.finish();
        assert_eq!(text.matches("<g transform").count(), 5);
        assert!(text.contains("t = 4"));
        assert_eq!(text.matches("<svg").count(), 1);
    }
}
