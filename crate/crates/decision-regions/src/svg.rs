//! Deterministic flat SVG renderings of planar region pieces, paths, and
//! points. Byte-for-byte stable for fixed inputs: coordinates are printed
//! with four decimals and nothing depends on iteration order of hash maps.

use crate::geometry::Polyhedron;
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("rendering needs a planar input space, got dimension {0}")]
    NotPlanar(usize),
}

/// Fill palette, indexed modulo its length.
pub const PALETTE: [&str; 6] = [
    "#4c72b0", "#c44e52", "#55a868", "#8172b2", "#ccb974", "#64b5cd",
];

/// Vertices of a bounded planar polyhedron in drawing order, or `None` when
/// it has no 2d extent. Pairwise row intersections filtered by containment,
/// then ordered around the centroid.
pub fn polygon_vertices(p: &Polyhedron, tol: f64) -> Option<Vec<(f64, f64)>> {
    if p.dim() != 2 {
        return None;
    }
    let mut verts: Vec<(f64, f64)> = Vec::new();
    for i in 0..p.n_rows() {
        for j in (i + 1)..p.n_rows() {
            let (a, c1) = p.row(i);
            let (b, c2) = p.row(j);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() <= 1e-12 {
                continue;
            }
            let x = (c1 * b[1] - c2 * a[1]) / det;
            let y = (a[0] * c2 - b[0] * c1) / det;
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            if p.contains(&[x, y], tol)
                && !verts
                    .iter()
                    .any(|(vx, vy)| (vx - x).abs() <= tol && (vy - y).abs() <= tol)
            {
                verts.push((x, y));
            }
        }
    }
    if verts.len() < 3 {
        return None;
    }
    let cx = verts.iter().map(|v| v.0).sum::<f64>() / verts.len() as f64;
    let cy = verts.iter().map(|v| v.1).sum::<f64>() / verts.len() as f64;
    verts.sort_by(|p1, p2| {
        let a1 = (p1.1 - cy).atan2(p1.0 - cx);
        let a2 = (p2.1 - cy).atan2(p2.0 - cx);
        a1.partial_cmp(&a2).unwrap()
    });
    Some(verts)
}

struct Layer {
    pieces: Vec<Polyhedron>,
    color: usize,
    label: String,
}

/// Declarative scene: region layers, overlay polylines, and point markers
/// in world coordinates, clipped visually to the analysis box.
pub struct SvgScene {
    box_half: f64,
    side_px: f64,
    layers: Vec<Layer>,
    polylines: Vec<(Vec<Vec<f64>>, usize)>,
    points: Vec<(Vec<f64>, usize)>,
}

impl SvgScene {
    pub fn new(box_half: f64) -> Self {
        SvgScene {
            box_half,
            side_px: 640.0,
            layers: Vec::new(),
            polylines: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn add_region_layer(
        &mut self,
        pieces: Vec<Polyhedron>,
        color: usize,
        label: impl Into<String>,
    ) -> &mut Self {
        self.layers.push(Layer {
            pieces,
            color,
            label: label.into(),
        });
        self
    }

    pub fn add_polyline(&mut self, points: Vec<Vec<f64>>, color: usize) -> &mut Self {
        self.polylines.push((points, color));
        self
    }

    pub fn add_point(&mut self, point: Vec<f64>, color: usize) -> &mut Self {
        self.points.push((point, color));
        self
    }

    fn to_px(&self, x: f64, y: f64) -> (f64, f64) {
        let pad = 20.0;
        let scale = (self.side_px - 2.0 * pad) / (2.0 * self.box_half);
        (
            pad + (x + self.box_half) * scale,
            pad + (self.box_half - y) * scale,
        )
    }

    pub fn render(&self) -> Result<String, SvgError> {
        for l in &self.layers {
            if let Some(p) = l.pieces.iter().find(|p| p.dim() != 2) {
                return Err(SvgError::NotPlanar(p.dim()));
            }
        }
        let side = self.side_px;
        let mut out = String::new();
        writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side:.0}\" height=\"{side:.0}\" viewBox=\"0 0 {side:.0} {side:.0}\">"
        )
        .unwrap();
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");

        // analysis box frame
        let (x0, y0) = self.to_px(-self.box_half, self.box_half);
        let (x1, y1) = self.to_px(self.box_half, -self.box_half);
        writeln!(
            out,
            "<rect x=\"{x0:.4}\" y=\"{y0:.4}\" width=\"{:.4}\" height=\"{:.4}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>",
            x1 - x0,
            y1 - y0
        )
        .unwrap();

        // axes through the origin
        let (ax0, ay) = self.to_px(-self.box_half, 0.0);
        let (ax1, _) = self.to_px(self.box_half, 0.0);
        writeln!(
            out,
            "<line x1=\"{ax0:.4}\" y1=\"{ay:.4}\" x2=\"{ax1:.4}\" y2=\"{ay:.4}\" stroke=\"#cccccc\" stroke-width=\"1\"/>"
        )
        .unwrap();
        let (bx, by0) = self.to_px(0.0, self.box_half);
        let (_, by1) = self.to_px(0.0, -self.box_half);
        writeln!(
            out,
            "<line x1=\"{bx:.4}\" y1=\"{by0:.4}\" x2=\"{bx:.4}\" y2=\"{by1:.4}\" stroke=\"#cccccc\" stroke-width=\"1\"/>"
        )
        .unwrap();

        for layer in &self.layers {
            let color = PALETTE[layer.color % PALETTE.len()];
            writeln!(out, "<g data-label=\"{}\">", xml_escape(&layer.label)).unwrap();
            for piece in &layer.pieces {
                let Some(verts) = polygon_vertices(piece, 1e-7) else {
                    continue;
                };
                out.push_str("<polygon points=\"");
                for (i, (x, y)) in verts.iter().enumerate() {
                    let (px, py) = self.to_px(*x, *y);
                    if i > 0 {
                        out.push(' ');
                    }
                    write!(out, "{px:.4},{py:.4}").unwrap();
                }
                writeln!(
                    out,
                    "\" fill=\"{color}\" fill-opacity=\"0.55\" stroke=\"{color}\" stroke-width=\"1\"/>"
                )
                .unwrap();
            }
            out.push_str("</g>\n");
        }

        for (line, color_idx) in &self.polylines {
            let color = PALETTE[color_idx % PALETTE.len()];
            out.push_str("<polyline points=\"");
            for (i, p) in line.iter().enumerate() {
                let (px, py) = self.to_px(p[0], p[1]);
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{px:.4},{py:.4}").unwrap();
            }
            writeln!(
                out,
                "\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2.5\" stroke-linejoin=\"round\"/>"
            )
            .unwrap();
        }

        for (p, color_idx) in &self.points {
            let color = PALETTE[color_idx % PALETTE.len()];
            let (px, py) = self.to_px(p[0], p[1]);
            writeln!(
                out,
                "<circle cx=\"{px:.4}\" cy=\"{py:.4}\" r=\"4\" fill=\"{color}\" stroke=\"#222222\" stroke-width=\"1\"/>"
            )
            .unwrap();
        }

        out.push_str("</svg>\n");
        Ok(out)
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
