//! Minimal SVG rendering for learning curves and memory-choice strips.

use std::fmt::Write as _;

use crate::replay::MemoryKind;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub const EC_COLOR: &str = "#f28e2b";
pub const RL_COLOR: &str = "#8c8c8c";
const PALETTE: [&str; 8] = [
    "#4e79a7", "#e15759", "#59a14f", "#b07aa1", "#76b7b2", "#edc948", "#9c755f", "#ff9da7",
];

/// Colour for a run label: the single-memory baselines use the memory colours.
pub fn color_for(label: &str, index: usize) -> &'static str {
    match label {
        "pure_ec" => EC_COLOR,
        "pure_rl" => RL_COLOR,
        _ => PALETTE[index % PALETTE.len()],
    }
}

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    /// (x, mean, standard deviation)
    pub points: Vec<(f64, f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = (self.x1 - self.x0).max(f64::EPSILON);
        LEFT + (x - self.x0) / span * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.y1 - self.y0).max(f64::EPSILON);
        HEIGHT - BOTTOM - (y - self.y0) / span * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Mean curves with a shaded band of one standard deviation.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, m, sd) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(m - sd);
        y1 = y1.max(m + sd);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if y1 - y0 < 1e-9 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let (y0, y1, _) = nice_range(y0, y1);
    let frame = Frame { x0, x1, y0, y1 };

    let mut out = String::new();
    header(&mut out, HEIGHT, title);
    axes(&mut out, &frame, x_label, y_label);
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let upper = s
            .points
            .iter()
            .map(|&(x, m, sd)| (frame.px(x), frame.py(m + sd)));
        let lower = s
            .points
            .iter()
            .rev()
            .map(|&(x, m, sd)| (frame.px(x), frame.py(m - sd)));
        let band: Vec<String> = upper
            .chain(lower)
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" "),
            s.color
        );
        let line: Vec<String> = s
            .points
            .iter()
            .map(|&(x, m, _)| format!("{:.2},{:.2}", frame.px(x), frame.py(m)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            line.join(" "),
            s.color
        );
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            s.color,
            lx + 26.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (bx, by) = (LEFT, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r#"<path d="M{bx},{TOP} L{bx},{by} L{},{by}" fill="none" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    let (_, _, x_step) = nice_range(frame.x0, frame.x1);
    for x in ticks(frame.x0, frame.x1, x_step) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            frame.px(x),
            by + 18.0,
            tick_label(x, x_step)
        );
    }
    let (_, _, y_step) = nice_range(frame.y0, frame.y1);
    for y in ticks(frame.y0, frame.y1, y_step) {
        let py = frame.py(y);
        let _ = writeln!(
            out,
            r##"<line x1="{bx}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#e6e6e6"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            WIDTH - RIGHT,
            bx - 6.0,
            py + 4.0,
            tick_label(y, y_step)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(y_label)
    );
}

/// Widens `[lo, hi]` to multiples of a 1-2-5 step giving about five ticks.
fn nice_range(lo: f64, hi: f64) -> (f64, f64, f64) {
    let raw = ((hi - lo) / 5.0).max(f64::MIN_POSITIVE);
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * magnitude);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

fn ticks(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(move |i| i as f64 * step)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = |s: f64| (-(s.log10().floor())).max(0.0) as usize;
    if step >= 1000.0 {
        format!("{:.*}k", decimals(step / 1000.0), v / 1000.0)
    } else {
        format!("{:.*}", decimals(step), v)
    }
}

/// One horizontal strip per run, coloured by the evaluation memory at each
/// checkpoint.
pub fn memory_bands(title: &str, runs: &[(String, Vec<(u64, Option<MemoryKind>)>)]) -> String {
    let row_h = 18.0;
    let height = TOP + BOTTOM + row_h * runs.len().max(1) as f64;
    let mut out = String::new();
    header(&mut out, height, title);
    let plot_w = WIDTH - LEFT - RIGHT;
    for (i, (name, marks)) in runs.iter().enumerate() {
        let y = TOP + row_h * i as f64;
        let n = marks.len().max(1) as f64;
        for (j, (_, memory)) in marks.iter().enumerate() {
            let color = match memory {
                Some(MemoryKind::Ec) => EC_COLOR,
                Some(MemoryKind::Rl) => RL_COLOR,
                None => "white",
            };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{y}" width="{:.2}" height="{}" fill="{color}"/>"#,
                LEFT + plot_w * j as f64 / n,
                plot_w / n + 0.1,
                row_h - 2.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            WIDTH - RIGHT + 8.0,
            y + row_h - 6.0,
            escape(name)
        );
    }
    if let Some((_, marks)) = runs.first() {
        if let (Some(first), Some(last)) = (marks.first(), marks.last()) {
            let by = height - BOTTOM + 18.0;
            let _ = writeln!(out, r#"<text x="{LEFT}" y="{by}">{}</text>"#, first.0);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{by}" text-anchor="end">{}</text>"#,
                WIDTH - RIGHT,
                last.0
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{LEFT}" y="{}"><tspan fill="{EC_COLOR}">&#9632; EC</tspan> <tspan fill="{RL_COLOR}">&#9632; RL</tspan></text>"#,
        height - 10.0
    );
    out.push_str("</svg>\n");
    out
}
