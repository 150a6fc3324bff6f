//! SVG rendering of developed layouts.
//!
//! Output is a standalone SVG 1.1 document and is byte-deterministic for
//! identical inputs: coordinates are written with a fixed formatter and all
//! element order follows the layout's face order.

use std::fmt::Write;

use crate::geometry::BackgroundGeometry;
use crate::layout::{ChartPoint, DevelopedLayout, SideKind};

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Pixels per chart unit.
    pub scale: f64,
    pub stroke_width: f64,
    /// Padding around the drawing, in pixels.
    pub margin: f64,
    pub draw_circles: bool,
    /// Draw the corner→interstice spokes of each sub-triangle.
    pub draw_interstices: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            scale: 200.0,
            stroke_width: 1.0,
            margin: 16.0,
            draw_circles: true,
            draw_interstices: true,
        }
    }
}

struct Mapper {
    scale: f64,
    min_x: f64,
    max_y: f64,
    margin: f64,
}

impl Mapper {
    fn map(&self, p: ChartPoint) -> (f64, f64) {
        (
            (p.x - self.min_x) * self.scale + self.margin,
            (self.max_y - p.y) * self.scale + self.margin,
        )
    }
}

fn fmt(v: f64) -> String {
    // Fixed six decimals keeps the output deterministic and diff-friendly.
    format!("{v:.6}")
}

/// Render a developed layout. Circles are drawn as true circles (Euclidean)
/// or as the Euclidean images of hyperbolic circles in the disk model; edges
/// are geodesics (straight lines, or circular arcs orthogonal to the unit
/// circle); seam edges are dashed. Vertex centers are drawn as small squares
/// so that the `<circle>` element count equals the developed vertex instance
/// count.
pub fn to_svg(layout: &DevelopedLayout, options: &SvgOptions) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");

    if layout.faces.is_empty() {
        out.push_str(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
             width=\"100\" height=\"100\" viewBox=\"0 0 100 100\"></svg>\n",
        );
        return out;
    }

    let circles = layout.instance_circles();

    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut include = |x: f64, y: f64| {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    };
    for pf in &layout.faces {
        for p in pf.corners.iter().chain([&pf.interstice]) {
            include(p.x, p.y);
        }
    }
    if options.draw_circles {
        for (c, r) in &circles {
            include(c.x - r, c.y - r);
            include(c.x + r, c.y + r);
        }
    }
    if layout.geometry == BackgroundGeometry::Hyperbolic {
        include(-1.0, -1.0);
        include(1.0, 1.0);
    }

    let mapper = Mapper {
        scale: options.scale,
        min_x,
        max_y,
        margin: options.margin,
    };
    let width = (max_x - min_x) * options.scale + 2.0 * options.margin;
    let height = (max_y - min_y) * options.scale + 2.0 * options.margin;

    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = fmt(width),
        h = fmt(height)
    );

    if layout.geometry == BackgroundGeometry::Hyperbolic {
        // Unit circle boundary as a two-arc path (not a <circle>, so circle
        // elements stay one per vertex instance).
        let (x0, y0) = mapper.map(ChartPoint { x: -1.0, y: 0.0 });
        let (x1, y1) = mapper.map(ChartPoint { x: 1.0, y: 0.0 });
        let r = fmt(options.scale);
        let _ = writeln!(
            out,
            "  <path d=\"M {} {} A {r} {r} 0 0 1 {} {} A {r} {r} 0 0 1 {} {} Z\" \
             fill=\"none\" stroke=\"#aaaaaa\" stroke-width=\"{sw}\"/>",
            fmt(x0),
            fmt(y0),
            fmt(x1),
            fmt(y1),
            fmt(x0),
            fmt(y0),
            sw = fmt(options.stroke_width)
        );
    }

    if options.draw_interstices {
        out.push_str("  <g stroke=\"#cccccc\" fill=\"none\">\n");
        for pf in &layout.faces {
            for c in 0..3 {
                let _ = writeln!(
                    out,
                    "    {}",
                    geodesic_element(
                        layout.geometry,
                        &mapper,
                        pf.corners[c],
                        pf.interstice,
                        0.5 * options.stroke_width,
                        false,
                    )
                );
            }
        }
        out.push_str("  </g>\n");
    }

    out.push_str("  <g stroke=\"#333333\" fill=\"none\">\n");
    for pf in &layout.faces {
        for s in 0..3 {
            let dashed = pf.side_kinds[s] == SideKind::Seam;
            let _ = writeln!(
                out,
                "    {}",
                geodesic_element(
                    layout.geometry,
                    &mapper,
                    pf.corners[s],
                    pf.corners[(s + 1) % 3],
                    options.stroke_width,
                    dashed,
                )
            );
        }
    }
    out.push_str("  </g>\n");

    if options.draw_circles {
        out.push_str("  <g stroke=\"#1f6fb4\" fill=\"none\">\n");
        for (c, r) in &circles {
            let (cx, cy) = mapper.map(*c);
            let _ = writeln!(
                out,
                "    <circle cx=\"{}\" cy=\"{}\" r=\"{}\" stroke-width=\"{}\"/>",
                fmt(cx),
                fmt(cy),
                fmt(r * options.scale),
                fmt(options.stroke_width)
            );
        }
        out.push_str("  </g>\n");
    }

    out.push_str("  <g fill=\"#c23b22\">\n");
    for pf in &layout.faces {
        for p in &pf.corners {
            let (x, y) = mapper.map(*p);
            let half = 1.5 * options.stroke_width;
            let _ = writeln!(
                out,
                "    <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                fmt(x - half),
                fmt(y - half),
                fmt(2.0 * half),
                fmt(2.0 * half)
            );
        }
    }
    out.push_str("  </g>\n");

    out.push_str("</svg>\n");
    out
}

/// A geodesic segment as an SVG element: a straight line in the plane, a
/// circular arc orthogonal to the unit circle in the disk model (falling
/// back to a line through near-diametral pairs).
fn geodesic_element(
    geometry: BackgroundGeometry,
    mapper: &Mapper,
    a: ChartPoint,
    b: ChartPoint,
    stroke_width: f64,
    dashed: bool,
) -> String {
    let dash = if dashed {
        " stroke-dasharray=\"6 4\""
    } else {
        ""
    };
    let line = |a: ChartPoint, b: ChartPoint| {
        let (x1, y1) = mapper.map(a);
        let (x2, y2) = mapper.map(b);
        format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke-width=\"{}\"{dash}/>",
            fmt(x1),
            fmt(y1),
            fmt(x2),
            fmt(y2),
            fmt(stroke_width)
        )
    };
    if geometry == BackgroundGeometry::Euclidean {
        return line(a, b);
    }
    // Solve for the circle through a, b orthogonal to the unit circle:
    // 2 m·p = |p|^2 + 1 for both endpoints.
    let (ka, kb) = (a.x * a.x + a.y * a.y + 1.0, b.x * b.x + b.y * b.y + 1.0);
    let det = 4.0 * (a.x * b.y - a.y * b.x);
    if det.abs() < 1e-9 {
        // Geodesic through (numerically) the origin: a diameter.
        return line(a, b);
    }
    let mx = (ka * 2.0 * b.y - kb * 2.0 * a.y) / det;
    let my = (kb * 2.0 * a.x - ka * 2.0 * b.x) / det;
    let radius = (mx * mx + my * my - 1.0).max(0.0).sqrt();
    // Short arc; the sweep flag accounts for the y-flip of the mapping.
    let cross = (a.x - mx) * (b.y - my) - (a.y - my) * (b.x - mx);
    let sweep = if cross > 0.0 { 0 } else { 1 };
    let (x1, y1) = mapper.map(a);
    let (x2, y2) = mapper.map(b);
    let r = fmt(radius * mapper.scale);
    format!(
        "<path d=\"M {} {} A {r} {r} 0 0 {sweep} {} {}\" stroke-width=\"{}\"{dash}/>",
        fmt(x1),
        fmt(y1),
        fmt(x2),
        fmt(y2),
        fmt(stroke_width)
    )
}
