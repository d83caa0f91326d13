//! Minimal SVG emission: polyline and scatter plots with auto-scaled axes.
//! The plots are qualitative companions to the CSV outputs.

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN: f64 = 64.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_points(points: &[(f64, f64)]) -> Option<Frame> {
        let finite: Vec<&(f64, f64)> = points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if finite.is_empty() {
            return None;
        }
        let mut f = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for (x, y) in finite {
            f.x_min = f.x_min.min(*x);
            f.x_max = f.x_max.max(*x);
            f.y_min = f.y_min.min(*y);
            f.y_max = f.y_max.max(*y);
        }
        if f.x_max - f.x_min < 1e-12 {
            f.x_min -= 0.5;
            f.x_max += 0.5;
        }
        if f.y_max - f.y_min < 1e-12 {
            f.y_min -= 0.5;
            f.y_max += 0.5;
        }
        Some(f)
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" "#,
            r#"viewBox="0 0 {w} {h}">"#,
            "\n",
            r#"<rect width="{w}" height="{h}" fill="white"/>"#,
            "\n",
            r#"<text x="{tx}" y="28" font-family="monospace" font-size="16" text-anchor="middle">{title}</text>"#,
            "\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = WIDTH / 2.0,
        title = title,
    )
}

fn axes(f: &Frame, x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        MARGIN,
        MARGIN,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));
    out.push('\n');
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let x = f.x_min + t * (f.x_max - f.x_min);
        let y = f.y_min + t * (f.y_max - f.y_min);
        out.push_str(&format!(
            r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="11" text-anchor="middle">{:.4}</text>"#,
            f.sx(x),
            HEIGHT - MARGIN + 18.0,
            x
        ));
        out.push('\n');
        out.push_str(&format!(
            r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="11" text-anchor="end">{:.4}</text>"#,
            MARGIN - 6.0,
            f.sy(y) + 4.0,
            y
        ));
        out.push('\n');
    }
    out.push_str(&format!(
        r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="13" text-anchor="middle">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"<text x="16" y="{:.1}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));
    out.push('\n');
    out
}

const COLORS: &[&str] = &["steelblue", "crimson", "seagreen", "darkorange"];

/// Polyline plot; non-finite points break the line into segments.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    multi_line_plot(title, x_label, y_label, &[("", points)])
}

/// Several labeled polylines sharing one frame.
pub fn multi_line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(&str, &[(f64, f64)])],
) -> String {
    let mut out = header(title);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, pts)| pts.iter().copied()).collect();
    let Some(frame) = Frame::from_points(&all) else {
        out.push_str("</svg>\n");
        return out;
    };
    out.push_str(&axes(&frame, x_label, y_label));
    for (k, (label, points)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, out: &mut String| {
            if seg.len() >= 2 {
                out.push_str(&format!(
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    seg.join(" ")
                ));
                out.push('\n');
            }
            seg.clear();
        };
        for (x, y) in points.iter() {
            if x.is_finite() && y.is_finite() {
                segment.push(format!("{:.2},{:.2}", frame.sx(*x), frame.sy(*y)));
            } else {
                flush(&mut segment, &mut out);
            }
        }
        flush(&mut segment, &mut out);
        if !label.is_empty() {
            out.push_str(&format!(
                r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="12" fill="{color}" text-anchor="end">{label}</text>"#,
                WIDTH - MARGIN - 8.0,
                MARGIN + 18.0 + 16.0 * k as f64
            ));
            out.push('\n');
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Scatter plot with small dots (bifurcation-style output).
pub fn scatter_plot(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let mut out = header(title);
    let Some(frame) = Frame::from_points(points) else {
        out.push_str("</svg>\n");
        return out;
    };
    out.push_str(&axes(&frame, x_label, y_label));
    for (x, y) in points {
        if x.is_finite() && y.is_finite() {
            out.push_str(&format!(
                r#"<circle cx="{:.2}" cy="{:.2}" r="0.7" fill="black"/>"#,
                frame.sx(*x),
                frame.sy(*y)
            ));
            out.push('\n');
        }
    }
    out.push_str("</svg>\n");
    out
}
