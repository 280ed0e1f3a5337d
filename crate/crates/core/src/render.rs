//! Deterministic SVG rendering of an orchard and an optional plan.

use std::fmt::Write as _;

use thiserror::Error;

use crate::evaluation::DesignPlan;
use crate::geometry::Point2D;
use crate::instance::OrchardInstance;

const LEGEND_PX: f64 = 48.0;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid render spec: {0}")]
    InvalidSpec(String),
    #[error("heater {index} at {point} lies outside the orchard")]
    HeaterOutside { index: usize, point: Point2D },
    #[error("pipe edge ({0}, {1}) references a missing heater")]
    BadEdge(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers {
    pub trees: bool,
    pub candidate_sites: bool,
    pub check_points: bool,
    pub heaters: bool,
    pub pipes: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Self { trees: true, candidate_sites: true, check_points: true, heaters: true, pipes: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub canvas_px: (u32, u32),
    pub margin_px: u32,
    pub layers: Layers,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self { canvas_px: (900, 700), margin_px: 30, layers: Layers::default() }
    }
}

/// Uniform meters-to-pixels mapping with the y axis pointing up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub px_per_m: f64,
    pub origin_x: f64,
    pub origin_y: f64,
}

impl Scale {
    pub fn map(&self, p: Point2D) -> (f64, f64) {
        (self.origin_x + p.x * self.px_per_m, self.origin_y - p.y * self.px_per_m)
    }
}

impl RenderSpec {
    pub fn scale(&self, length_m: f64, width_m: f64) -> Result<Scale, RenderError> {
        let (w, h) = (self.canvas_px.0 as f64, self.canvas_px.1 as f64);
        let m = self.margin_px as f64;
        let avail_w = w - 2.0 * m;
        let avail_h = h - 2.0 * m - LEGEND_PX;
        if avail_w <= 0.0 || avail_h <= 0.0 {
            return Err(RenderError::InvalidSpec(format!("canvas {w}x{h} too small for margin {m}")));
        }
        if !(length_m > 0.0 && width_m > 0.0) {
            return Err(RenderError::InvalidSpec("orchard must have positive size".into()));
        }
        let px_per_m = (avail_w / length_m).min(avail_h / width_m);
        Ok(Scale { px_per_m, origin_x: m, origin_y: m + width_m * px_per_m })
    }
}

/// Round scale-bar length (1, 2 or 5 times a power of ten) near a fifth of
/// the orchard length.
fn bar_length(length_m: f64) -> f64 {
    let target = length_m / 5.0;
    let mag = 10f64.powf(target.log10().floor());
    [5.0, 2.0, 1.0].into_iter().map(|f| f * mag).find(|&v| v <= target).unwrap_or(mag)
}

pub fn render_svg(inst: &OrchardInstance, plan: Option<&DesignPlan>, spec: &RenderSpec) -> Result<String, RenderError> {
    let sc = spec.scale(inst.length_m, inst.width_m)?;
    if let Some(plan) = plan {
        for (index, p) in plan.heaters.iter().enumerate() {
            if !inst.contains(p) {
                return Err(RenderError::HeaterOutside { index, point: *p });
            }
        }
        for &(a, b) in &plan.pipe_edges {
            if a >= plan.heaters.len() || b >= plan.heaters.len() {
                return Err(RenderError::BadEdge(a, b));
            }
        }
    }
    let (w, h) = spec.canvas_px;
    let r = (sc.px_per_m * 0.6).clamp(1.5, 6.0);
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(s, r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##).unwrap();
    let (x0, y1) = sc.map(Point2D::new(0.0, 0.0));
    let (x1, y0) = sc.map(Point2D::new(inst.length_m, inst.width_m));
    writeln!(
        s,
        r##"<rect id="orchard" x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="#f4f9ee" stroke="#333333" stroke-width="1"/>"##,
        x1 - x0,
        y1 - y0
    )
    .unwrap();

    if spec.layers.trees {
        s.push_str(r##"<g id="trees" fill="#2e7d32">"##);
        s.push('\n');
        for t in &inst.trees {
            let (x, y) = sc.map(*t);
            writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}"/>"#).unwrap();
        }
        s.push_str("</g>\n");
    }
    if spec.layers.candidate_sites {
        s.push_str(r##"<g id="candidate-sites" fill="#9e9e9e">"##);
        s.push('\n');
        let q = r * 0.4;
        for p in &inst.candidate_sites {
            let (x, y) = sc.map(*p);
            writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#, x - q, y - q, 2.0 * q, 2.0 * q)
                .unwrap();
        }
        s.push_str("</g>\n");
    }
    if spec.layers.check_points {
        s.push_str(r##"<g id="check-points" stroke="#1565c0" stroke-width="1">"##);
        s.push('\n');
        let q = r * 0.5;
        for p in &inst.check_points {
            let (x, y) = sc.map(*p);
            writeln!(
                s,
                r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}"/>"#,
                x - q,
                y - q,
                x + q,
                y + q,
                x - q,
                y + q,
                x + q,
                y - q
            )
            .unwrap();
        }
        s.push_str("</g>\n");
    }
    if let Some(plan) = plan {
        if spec.layers.pipes {
            s.push_str(r##"<g id="pipes" stroke="#e65100" stroke-width="2">"##);
            s.push('\n');
            for &(a, b) in &plan.pipe_edges {
                let (xa, ya) = sc.map(plan.heaters[a]);
                let (xb, yb) = sc.map(plan.heaters[b]);
                writeln!(s, r#"<line x1="{xa:.2}" y1="{ya:.2}" x2="{xb:.2}" y2="{yb:.2}"/>"#).unwrap();
            }
            s.push_str("</g>\n");
        }
        if spec.layers.heaters {
            s.push_str(r##"<g id="heaters" fill="#c62828" stroke="#000000" stroke-width="0.5">"##);
            s.push('\n');
            for p in &plan.heaters {
                let (x, y) = sc.map(*p);
                writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}"/>"#, r * 1.4).unwrap();
            }
            s.push_str("</g>\n");
        }
    }

    // legend and scale bar in the band below the orchard
    let ly = y1 + 24.0;
    let bar = bar_length(inst.length_m);
    let bar_px = bar * sc.px_per_m;
    s.push_str(r##"<g id="scale-bar" stroke="#000000" stroke-width="2">"##);
    s.push('\n');
    writeln!(s, r#"<line x1="{x0:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}"/>"#, x0 + bar_px).unwrap();
    s.push_str("</g>\n");
    writeln!(
        s,
        r#"<text x="{x0:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{bar} m</text>"#,
        ly + 14.0
    )
    .unwrap();
    s.push_str(r#"<g id="legend" font-family="sans-serif" font-size="11">"#);
    s.push('\n');
    let entries = [
        ("#2e7d32", "tree"),
        ("#9e9e9e", "candidate site"),
        ("#1565c0", "check point"),
        ("#c62828", "heater"),
        ("#e65100", "pipe"),
    ];
    let mut lx = x0 + bar_px + 40.0;
    for (color, label) in entries {
        writeln!(s, r#"<rect x="{lx:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#, ly - 5.0).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}">{label}</text>"#, lx + 14.0, ly + 4.0).unwrap();
        lx += 24.0 + 7.0 * label.len() as f64;
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
