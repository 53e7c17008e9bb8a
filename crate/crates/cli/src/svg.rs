//! Minimal static SVG plots.

use std::fmt::Write;

use num_complex::Complex64 as C64;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 32.0;

/// Affine map from a rectangle of the plane to SVG pixel coordinates.
struct Frame {
    re_min: f64,
    im_max: f64,
    scale: f64,
}

impl Frame {
    fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        let span = (re_max - re_min).max(im_max - im_min);
        Self {
            re_min,
            im_max,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn x(&self, re: f64) -> f64 {
        MARGIN + (re - self.re_min) * self.scale
    }

    fn y(&self, im: f64) -> f64 {
        MARGIN + (self.im_max - im) * self.scale
    }

    fn point(&self, z: C64) -> (f64, f64) {
        (self.x(z.re), self.y(z.im))
    }
}

struct Doc {
    body: String,
}

impl Doc {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(body, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            body,
            r#"<text x="{MARGIN}" y="20" font-family="sans-serif" font-size="13">{}</text>"#,
            escape(title)
        );
        Self { body }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), style: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
            a.0, a.1, b.0, b.1
        );
    }

    fn circle(&mut self, c: (f64, f64), r: f64, style: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" {style}/>"#,
            c.0, c.1, r
        );
    }

    fn cross(&mut self, c: (f64, f64), r: f64, style: &str) {
        self.line((c.0 - r, c.1 - r), (c.0 + r, c.1 + r), style);
        self.line((c.0 - r, c.1 + r), (c.0 + r, c.1 - r), style);
    }

    fn polyline(&mut self, pts: &[(f64, f64)], style: &str) {
        let mut d = String::new();
        for p in pts {
            let _ = write!(d, "{:.2},{:.2} ", p.0, p.1);
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" {style}/>"#,
            d.trim_end()
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Input for [`spectrum`].
pub struct SpectrumPlot<'a> {
    pub title: &'a str,
    pub bounds: [f64; 4],
    pub excluded: &'a [[f64; 4]],
    /// Φ on the unit circle.
    pub curve: &'a [C64],
    pub eigenvalues: &'a [C64],
}

/// Eigenvalues as points, excluded cells shaded, and the curve Φ(𝕋).
pub fn spectrum(plot: &SpectrumPlot) -> String {
    let [re_min, re_max, im_min, im_max] = plot.bounds;
    let f = Frame::new(re_min, re_max, im_min, im_max);
    let mut doc = Doc::new(plot.title);
    let _ = writeln!(
        doc.body,
        r#"<clipPath id="plot"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
        f.x(re_min),
        f.y(im_max),
        f.x(re_max) - f.x(re_min),
        f.y(im_min) - f.y(im_max)
    );
    doc.body.push_str("<g clip-path=\"url(#plot)\">\n");
    for cell in plot.excluded {
        let [a, b, c, d] = *cell;
        let _ = writeln!(
            doc.body,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#bbbbbb" fill-opacity="0.6"/>"##,
            f.x(a),
            f.y(d),
            f.x(b) - f.x(a),
            f.y(c) - f.y(d)
        );
    }
    let axis = r##"stroke="#888888" stroke-width="0.5""##;
    doc.line(f.point(C64::new(re_min, 0.0)), f.point(C64::new(re_max, 0.0)), axis);
    doc.line(f.point(C64::new(0.0, im_min)), f.point(C64::new(0.0, im_max)), axis);
    if !plot.curve.is_empty() {
        let pts: Vec<_> = plot.curve.iter().map(|&z| f.point(z)).collect();
        doc.polyline(&pts, r##"stroke="#1f5fbf" stroke-width="1""##);
    }
    for &l in plot.eigenvalues {
        doc.circle(f.point(l), 4.0, r##"fill="#d62728""##);
    }
    doc.body.push_str("</g>\n");
    let frame = r##"fill="none" stroke="black" stroke-width="1""##;
    let _ = writeln!(
        doc.body,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" {frame}/>"#,
        f.x(re_min),
        f.y(im_max),
        f.x(re_max) - f.x(re_min),
        f.y(im_min) - f.y(im_max)
    );
    doc.finish()
}

/// Input for [`annulus`].
pub struct AnnulusPlot<'a> {
    pub title: &'a str,
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub zeros: &'a [C64],
    pub trivial: &'a [C64],
    pub confirmed: &'a [C64],
}

/// The counting annulus with the zeros of F, trivial points and confirmed roots.
pub fn annulus(plot: &AnnulusPlot) -> String {
    let f = Frame::new(-1.1, 1.1, -1.1, 1.1);
    let mut doc = Doc::new(plot.title);
    let o = f.point(C64::new(0.0, 0.0));
    let _ = writeln!(
        doc.body,
        r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#e8f0fb"/>"##,
        o.0,
        o.1,
        plot.outer_radius * f.scale
    );
    doc.circle(
        o,
        plot.inner_radius * f.scale,
        r##"fill="white" stroke="#1f5fbf" stroke-dasharray="4 3""##,
    );
    doc.circle(o, f.scale, r##"fill="none" stroke="black""##);
    for &z in plot.zeros {
        doc.circle(f.point(z), 3.0, r##"fill="#1f5fbf""##);
    }
    for &z in plot.confirmed {
        doc.circle(f.point(z), 6.0, r##"fill="none" stroke="#2ca02c" stroke-width="2""##);
    }
    for &z in plot.trivial {
        doc.cross(f.point(z), 5.0, r##"stroke="#d62728" stroke-width="2""##);
    }
    doc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_plot_is_well_formed() {
        let s = spectrum(&SpectrumPlot {
            title: "a < b",
            bounds: [-1.0, 1.0, -1.0, 1.0],
            excluded: &[[0.0, 0.5, 0.0, 0.5]],
            curve: &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
            eigenvalues: &[C64::new(0.2, 0.1)],
        });
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        assert_eq!(s.matches("<circle").count(), 1);
    }

    #[test]
    fn annulus_marks_every_point() {
        let s = annulus(&AnnulusPlot {
            title: "t",
            outer_radius: 1.0,
            inner_radius: 0.25,
            zeros: &[C64::new(0.5, 0.0), C64::new(-0.5, 0.0)],
            trivial: &[C64::new(0.5, 0.0)],
            confirmed: &[C64::new(-0.5, 0.0)],
        });
        // three circles for the contours, two zeros, one confirmed ring
        assert_eq!(s.matches("<circle").count(), 6);
        assert_eq!(s.matches("<line").count(), 2);
    }
}
