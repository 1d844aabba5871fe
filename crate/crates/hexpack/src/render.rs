//! SVG figures of layouts.
//!
//! The plane's y axis points up; SVG's points down, so every `cy` is
//! negated. Color maps run through a fixed five-stop palette (the viridis
//! anchors) linearly over the data range:
//!
//! | t    | color     |
//! |------|-----------|
//! | 0    | `#440154` |
//! | 0.25 | `#3b528b` |
//! | 0.5  | `#21918c` |
//! | 0.75 | `#5ec962` |
//! | 1    | `#fde725` |
//!
//! Circles without a value (for instance where the harmonic residual is
//! undefined) are filled `#bfbfbf`.

use std::fmt::Write;

use hexpack_core::harmonic::WeightCache;
use hexpack_core::layout::Circle;
use hexpack_core::{Layout, Quadrature, ScalarField};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorMap {
    #[default]
    Uniform,
    ByLogRadius,
    ByD1u,
    ByResidual,
}

#[derive(Debug, Error, PartialEq)]
pub enum StyleError {
    #[error("stroke width must be positive, got {0}")]
    StrokeWidth(f64),
    #[error("padding must be non-negative, got {0}")]
    Padding(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderStyle {
    stroke_width: f64,
    color_map: ColorMap,
    padding: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            stroke_width: 0.02,
            color_map: ColorMap::Uniform,
            padding: 0.05,
        }
    }
}

impl RenderStyle {
    pub fn new(stroke_width: f64, color_map: ColorMap, padding: f64) -> Result<Self, StyleError> {
        if !(stroke_width.is_finite() && stroke_width > 0.0) {
            return Err(StyleError::StrokeWidth(stroke_width));
        }
        if !(padding.is_finite() && padding >= 0.0) {
            return Err(StyleError::Padding(padding));
        }
        Ok(Self {
            stroke_width,
            color_map,
            padding,
        })
    }

    pub fn stroke_width(&self) -> f64 {
        self.stroke_width
    }

    pub fn color_map(&self) -> ColorMap {
        self.color_map
    }

    pub fn padding(&self) -> f64 {
        self.padding
    }
}

const PALETTE: [(f64, [u8; 3]); 5] = [
    (0.0, [0x44, 0x01, 0x54]),
    (0.25, [0x3b, 0x52, 0x8b]),
    (0.5, [0x21, 0x91, 0x8c]),
    (0.75, [0x5e, 0xc9, 0x62]),
    (1.0, [0xfd, 0xe7, 0x25]),
];

const MISSING: &str = "#bfbfbf";

/// Palette color at `t ∈ [0, 1]` (clamped).
pub fn palette(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let k = PALETTE.windows(2).position(|p| t <= p[1].0).unwrap_or(PALETTE.len() - 2);
    let (t0, a) = PALETTE[k];
    let (t1, b) = PALETTE[k + 1];
    let s = (t - t0) / (t1 - t0);
    let c: Vec<u8> = (0..3)
        .map(|i| (a[i] as f64 + s * (b[i] as f64 - a[i] as f64)).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Per-circle values for a color map, in layout storage order.
fn color_values(layout: &Layout, map: ColorMap) -> Option<Vec<Option<f64>>> {
    let u = layout.log_radii();
    let w = *u.window();
    match map {
        ColorMap::Uniform => None,
        ColorMap::ByLogRadius => Some(u.values().iter().map(|&x| Some(x)).collect()),
        ColorMap::ByD1u => Some(w.vertices().map(|v| d1_at(&u, v)).collect()),
        ColorMap::ByResidual => {
            let q = Quadrature::default();
            let cache = WeightCache::new(&u, &q);
            Some(w.vertices().map(|v| cache.residual(v).ok().map(f64::abs)).collect())
        }
    }
}

/// Forward difference in `m`, or the backward one on the last column.
fn d1_at(u: &ScalarField, v: hexpack_core::VertexId) -> Option<f64> {
    let here = u.get(v)?;
    if let Some(next) = u.get(v.offset(1, 0)) {
        Some(next - here)
    } else {
        u.get(v.offset(-1, 0)).map(|prev| here - prev)
    }
}

pub fn render_svg(layout: &Layout, style: &RenderStyle) -> String {
    let values = color_values(layout, style.color_map);
    render_circles(layout.circles(), values.as_deref(), style)
}

/// SVG for bare circles; `values` (one per circle) selects fill colors.
pub fn render_circles(circles: &[Circle], values: Option<&[Option<f64>]>, style: &RenderStyle) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let (x0, y0, w, h) = view_box(circles, style.padding);
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{x0} {y0} {w} {h}\">"
    )
    .unwrap();
    let fill_default = if values.is_some() { MISSING } else { "none" };
    writeln!(
        out,
        "<g stroke=\"#000000\" stroke-width=\"{}\" fill=\"{fill_default}\">",
        style.stroke_width
    )
    .unwrap();
    let range = values.and_then(|vals| {
        let mut it = vals.iter().flatten().copied().filter(|x| x.is_finite());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    });
    for (i, c) in circles.iter().enumerate() {
        let (cx, cy) = (c.center.0, -c.center.1);
        write!(out, "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{}\"", c.radius).unwrap();
        if let (Some(vals), Some((lo, hi))) = (values, range) {
            if let Some(x) = vals.get(i).copied().flatten().filter(|x| x.is_finite()) {
                let t = if hi > lo { (x - lo) / (hi - lo) } else { 0.5 };
                write!(out, " fill=\"{}\"", palette(t)).unwrap();
            }
        }
        out.push_str("/>\n");
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Bounding box of the circles in SVG coordinates, grown on every side by
/// `padding` times its width and height.
fn view_box(circles: &[Circle], padding: f64) -> (f64, f64, f64, f64) {
    if circles.is_empty() {
        return (0.0, 0.0, 1.0, 1.0);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for c in circles {
        let (cx, cy) = (c.center.0, -c.center.1);
        x0 = x0.min(cx - c.radius);
        x1 = x1.max(cx + c.radius);
        y0 = y0.min(cy - c.radius);
        y1 = y1.max(cy + c.radius);
    }
    let (w, h) = (x1 - x0, y1 - y0);
    (x0 - padding * w, y0 - padding * h, w * (1.0 + 2.0 * padding), h * (1.0 + 2.0 * padding))
}
