//! Minimal native SVG line plots: stacked panels, linear axes with rounded
//! tick steps, polyline series, and a legend. No external renderer; the
//! output is plain text and deterministic.

use std::fmt::Write as _;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

pub const PALETTE: [&str; 8] = [
    "#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

const PANEL_W: f64 = 760.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 52.0;

fn data_range(series: &[Series], pick_x: bool) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            let v = if pick_x { x } else { y };
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

/// Round a raw step to the nearest 1/2/5 decade multiple.
fn nice_step(range: f64, target_ticks: usize) -> f64 {
    let raw = range / target_ticks.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let factor = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 5);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn render_panel(svg: &mut String, panel: &Panel, y_off: f64) {
    let (x_lo, x_hi) = data_range(&panel.series, true);
    let (mut y_lo, mut y_hi) = data_range(&panel.series, false);
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| y_off + MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let _ = writeln!(
        svg,
        r##"<rect x="{:.1}" y="{:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#333" stroke-width="1"/>"##,
        MARGIN_L,
        y_off + MARGIN_T
    );
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-size="15" font-family="sans-serif" font-weight="bold">{}</text>"##,
        MARGIN_L,
        y_off + MARGIN_T - 12.0,
        panel.title
    );

    for t in ticks(x_lo, x_hi) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#999" stroke-width="0.5"/>"##,
            y_off + MARGIN_T,
            y_off + MARGIN_T + plot_h
        );
        let _ = writeln!(
            svg,
            r##"<text x="{x:.1}" y="{:.1}" font-size="11" font-family="sans-serif" text-anchor="middle">{}</text>"##,
            y_off + MARGIN_T + plot_h + 16.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y_lo, y_hi) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#999" stroke-width="0.5"/>"##,
            MARGIN_L,
            MARGIN_L + plot_w
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-size="11" font-family="sans-serif" text-anchor="end">{}</text>"##,
            MARGIN_L - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }

    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-size="13" font-family="sans-serif" text-anchor="middle">{}</text>"##,
        MARGIN_L + plot_w / 2.0,
        y_off + PANEL_H - 12.0,
        panel.x_label
    );
    let _ = writeln!(
        svg,
        r##"<text x="18" y="{:.1}" font-size="13" font-family="sans-serif" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"##,
        y_off + MARGIN_T + plot_h / 2.0,
        y_off + MARGIN_T + plot_h / 2.0,
        panel.y_label
    );

    for (k, s) in panel.series.iter().enumerate() {
        let mut path = String::new();
        for &(x, y) in &s.points {
            let _ = write!(path, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.6"/>"##,
            path.trim_end(),
            s.color
        );
        let ly = y_off + MARGIN_T + 16.0 + 18.0 * k as f64;
        let lx = MARGIN_L + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="2"/>"##,
            ly - 4.0,
            lx + 22.0,
            ly - 4.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{ly:.1}" font-size="12" font-family="sans-serif">{}</text>"##,
            lx + 28.0,
            s.label
        );
    }
}

/// Render stacked panels into one standalone SVG document.
pub fn render(panels: &[Panel]) -> String {
    let total_h = PANEL_H * panels.len() as f64;
    let mut svg = format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W:.0}" height="{total_h:.0}" viewBox="0 0 {PANEL_W:.0} {total_h:.0}">
<rect width="100%" height="100%" fill="white"/>
"##
    );
    for (k, panel) in panels.iter().enumerate() {
        render_panel(&mut svg, panel, PANEL_H * k as f64);
    }
    svg.push_str("</svg>\n");
    svg
}
