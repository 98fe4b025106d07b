//! Template-based SVG emission: static, deterministic, no plotting
//! dependencies. All coordinates are formatted at fixed precision so the
//! same report always produces byte-identical artifacts.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;

fn c(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_owned()
    } else if v.abs() >= 10_000.0 || v.abs() < 0.01 {
        format!("{v:.2e}")
    } else if v.fract() == 0.0 && v.abs() < 10_000.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    x_log: bool,
    y_log: bool,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let (v, lo, hi) = if self.x_log {
            (v.log10(), self.x_min.log10(), self.x_max.log10())
        } else {
            (v, self.x_min, self.x_max)
        };
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        MARGIN_LEFT + t * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let (v, lo, hi) = if self.y_log {
            (v.log10(), self.y_min.log10(), self.y_max.log10())
        } else {
            (v, self.y_min, self.y_max)
        };
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        HEIGHT - MARGIN_BOTTOM - t * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn x_ticks(&self) -> Vec<f64> {
        ticks(self.x_min, self.x_max, self.x_log)
    }

    fn y_ticks(&self) -> Vec<f64> {
        ticks(self.y_min, self.y_max, self.y_log)
    }
}

fn ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    let n = 5;
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            if log {
                10f64.powf(lo.log10() + t * (hi.log10() - lo.log10()))
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect()
}

fn open_svg(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" font-family="monospace" font-size="13" text-anchor="middle">{}</text>"#,
        c(WIDTH / 2.0),
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_axes(s: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        c(x0), c(y0), c(x1), c(y0)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        c(x0), c(y0), c(x0), c(y1)
    );
    for t in frame.x_ticks() {
        let x = frame.x(t);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            c(x), c(y0), c(x), c(y0 + 5.0)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="10" text-anchor="middle">{}</text>"#,
            c(x), c(y0 + 18.0), tick_label(t)
        );
    }
    for t in frame.y_ticks() {
        let y = frame.y(t);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            c(x0 - 5.0), c(y), c(x0), c(y)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="10" text-anchor="end">{}</text>"#,
            c(x0 - 8.0), c(y + 3.0), tick_label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="11" text-anchor="middle">{}</text>"#,
        c((x0 + x1) / 2.0), c(HEIGHT - 12.0), escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-family="monospace" font-size="11" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        c((y0 + y1) / 2.0), c((y0 + y1) / 2.0), escape(y_label)
    );
}

/// Scatter of (N, dtv) with the fitted expectation sampled at the same N
/// values.
pub fn dtv_vs_n(points: &[(f64, f64)], curve: &[(f64, f64)], title: &str) -> String {
    let x_min = points.iter().map(|p| p.0).fold(f64::MAX, f64::min).max(1.0);
    let x_max = points.iter().map(|p| p.0).fold(1.0, f64::max) * 1.05;
    let y_max = points
        .iter()
        .map(|p| p.1)
        .chain(curve.iter().map(|p| p.1))
        .fold(1.0, f64::max)
        * 1.05;
    let frame = Frame {
        x_min,
        x_max,
        y_min: 0.0,
        y_max,
        x_log: true,
        y_log: false,
    };
    let mut s = open_svg(title);
    draw_axes(&mut s, &frame, "N (log scale)", "DTV");
    if !curve.is_empty() {
        let pts: Vec<String> = curve
            .iter()
            .map(|&(x, y)| format!("{},{}", c(frame.x(x)), c(frame.y(y))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    for &(x, y) in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="2.5" fill="#d62728" fill-opacity="0.7"/>"#,
            c(frame.x(x)),
            c(frame.y(y))
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Bars over terminal digits 0-9; one or two series (e.g. before/after).
pub fn digit_profile(series: &[(String, [u64; 10])], title: &str) -> String {
    let y_max = series
        .iter()
        .flat_map(|(_, counts)| counts.iter())
        .copied()
        .max()
        .unwrap_or(0)
        .max(1) as f64
        * 1.05;
    let frame = Frame {
        x_min: 0.0,
        x_max: 10.0,
        y_min: 0.0,
        y_max,
        x_log: false,
        y_log: false,
    };
    let mut s = open_svg(title);
    let y0 = HEIGHT - MARGIN_BOTTOM;
    // x axis with one tick per digit
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        c(MARGIN_LEFT), c(y0), c(WIDTH - MARGIN_RIGHT), c(y0)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        c(MARGIN_LEFT), c(y0), c(MARGIN_LEFT), c(MARGIN_TOP)
    );
    for t in frame.y_ticks() {
        let y = frame.y(t);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="10" text-anchor="end">{}</text>"#,
            c(MARGIN_LEFT - 8.0), c(y + 3.0), tick_label(t)
        );
    }
    let colors = ["#1f77b4", "#d62728"];
    let slot = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 10.0;
    let bar = slot * 0.8 / series.len().max(1) as f64;
    for digit in 0..10 {
        let x_base = MARGIN_LEFT + digit as f64 * slot + slot * 0.1;
        for (si, (_, counts)) in series.iter().enumerate() {
            let h = y0 - frame.y(counts[digit] as f64);
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                c(x_base + si as f64 * bar),
                c(y0 - h),
                c(bar),
                c(h),
                colors[si % colors.len()]
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="10" text-anchor="middle">{digit}</text>"#,
            c(x_base + slot * 0.4), c(y0 + 18.0)
        );
    }
    for (si, (name, _)) in series.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}" font-family="monospace" font-size="10">{}</text>"#,
            c(WIDTH - 180.0),
            c(MARGIN_TOP + 14.0 * si as f64),
            colors[si % colors.len()],
            c(WIDTH - 166.0),
            c(MARGIN_TOP + 9.0 + 14.0 * si as f64),
            escape(name)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="11" text-anchor="middle">last digit</text>"#,
        c((MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0), c(HEIGHT - 12.0)
    );
    s.push_str("</svg>\n");
    s
}

/// Log-log convergence curve of mean |dtv/N - ||D||_V| against N.
pub fn gc_curve(points: &[(f64, f64)], title: &str) -> String {
    let floor = 1e-12;
    let ys: Vec<f64> = points.iter().map(|p| p.1.max(floor)).collect();
    let x_min = points.iter().map(|p| p.0).fold(f64::MAX, f64::min).max(1.0);
    let x_max = points.iter().map(|p| p.0).fold(1.0, f64::max) * 1.1;
    let y_min = ys.iter().copied().fold(f64::MAX, f64::min) / 1.5;
    let y_max = ys.iter().copied().fold(floor, f64::max) * 1.5;
    let frame = Frame {
        x_min,
        x_max,
        y_min,
        y_max,
        x_log: true,
        y_log: true,
    };
    let mut s = open_svg(title);
    draw_axes(&mut s, &frame, "N (log scale)", "mean |dtv/N - theory| (log scale)");
    let pts: Vec<String> = points
        .iter()
        .zip(&ys)
        .map(|(&(x, _), &y)| format!("{},{}", c(frame.x(x)), c(frame.y(y))))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"#,
        pts.join(" ")
    );
    for (&(x, _), &y) in points.iter().zip(&ys) {
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="3" fill="#1f77b4"/>"#,
            c(frame.x(x)),
            c(frame.y(y))
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_is_deterministic() {
        let points = [(100.0, 40.0), (1000.0, 160.0), (10_000.0, 700.0)];
        let curve = [(100.0, 42.0), (1000.0, 150.0), (10_000.0, 690.0)];
        let a = dtv_vs_n(&points, &curve, "t");
        let b = dtv_vs_n(&points, &curve, "t");
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
    }

    #[test]
    fn digit_profile_draws_all_bars() {
        let series = vec![
            ("before".to_owned(), [5u64, 1, 8, 1, 1, 6, 1, 1, 1, 1]),
            ("after".to_owned(), [7u64, 1, 9, 1, 1, 4, 1, 1, 1, 1]),
        ];
        let svg = digit_profile(&series, "digits");
        assert_eq!(svg.matches("<rect").count(), 1 + 20 + 2); // bg + bars + legend
    }

    #[test]
    fn labels_are_escaped() {
        let svg = digit_profile(&[("a<b&c".to_owned(), [0; 10])], "t<&>t");
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(svg.contains("t&lt;&amp;&gt;t"));
    }
}
