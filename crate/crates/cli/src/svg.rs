//! Minimal SVG plots of planar curves.

use std::fmt::Write as _;

use sr_elastica::se2::Point2;

pub enum Stroke {
    Solid,
    Dashed,
}

pub struct Polyline {
    pub points: Vec<Point2>,
    pub color: &'static str,
    pub stroke: Stroke,
}

/// A plot fitted to the bounding box of its content plus a 10% margin.
/// The y axis points up.
#[derive(Default)]
pub struct Plot {
    lines: Vec<Polyline>,
    dots: Vec<(Point2, &'static str)>,
}

impl Plot {
    pub fn line(&mut self, points: Vec<Point2>, color: &'static str, stroke: Stroke) -> &mut Self {
        self.lines.push(Polyline { points, color, stroke });
        self
    }

    /// A filled marker, e.g. a cusp.
    pub fn dot(&mut self, at: Point2, color: &'static str) -> &mut Self {
        self.dots.push((at, color));
        self
    }

    pub fn render(&self) -> String {
        let all = self.lines.iter().flat_map(|l| l.points.iter()).chain(self.dots.iter().map(|(p, _)| p));
        let (mut lo, mut hi) = (Point2::repeat(f64::INFINITY), Point2::repeat(f64::NEG_INFINITY));
        for p in all {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        if !lo.x.is_finite() {
            lo = Point2::zeros();
            hi = Point2::repeat(1.0);
        }
        let span = (hi - lo).max().max(1e-12);
        let margin = 0.1 * span;
        let (x0, y0) = (lo.x - margin, lo.y - margin);
        let (w, h) = (hi.x - lo.x + 2.0 * margin, hi.y - lo.y + 2.0 * margin);
        let stroke = 0.004 * w.max(h);
        // Flip y so the plot reads like the plane.
        let map = |p: &Point2| (p.x, y0 + y0 + h - p.y);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0} {y0} {w} {h}" width="600" height="{}">"#,
            (600.0 * h / w).round()
        );
        let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="white"/>"#);
        for l in &self.lines {
            let pts: Vec<String> = l
                .points
                .iter()
                .map(|p| {
                    let (x, y) = map(p);
                    format!("{x},{y}")
                })
                .collect();
            let dash = match l.stroke {
                Stroke::Solid => String::new(),
                Stroke::Dashed => format!(r#" stroke-dasharray="{} {}""#, 4.0 * stroke, 3.0 * stroke),
            };
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="{stroke}"{dash} points="{}"/>"#,
                l.color,
                pts.join(" ")
            );
        }
        for (p, color) in &self.dots {
            let (x, y) = map(p);
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{}" fill="{color}"/>"#, 2.5 * stroke);
        }
        s.push_str("</svg>\n");
        s
    }
}
