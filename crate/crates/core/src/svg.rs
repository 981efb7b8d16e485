//! Hand-rolled SVG emission: polyline figures with axes, deterministic
//! formatting, no dependencies.

use std::fmt::Write;

#[derive(Clone, Debug)]
pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub width: f64,
}

impl Series {
    pub fn new(points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Series {
            points,
            color,
            width: 1.2,
        }
    }
}

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Renders polyline series into a fixed-size SVG document with data-fitted
/// bounds, light axes through the origin, and a title.
pub fn polyline_figure(title: &str, series: &[Series]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 600.0;
    const MARGIN: f64 = 50.0;
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() || xmax <= xmin {
        xmin = -1.0;
        xmax = 1.0;
    }
    if !ymin.is_finite() || ymax <= ymin {
        ymin = -1.0;
        ymax = 1.0;
    }
    let pad_x = 0.05 * (xmax - xmin);
    let pad_y = 0.05 * (ymax - ymin);
    xmin -= pad_x;
    xmax += pad_x;
    ymin -= pad_y;
    ymax += pad_y;
    let sx = (W - 2.0 * MARGIN) / (xmax - xmin);
    let sy = (H - 2.0 * MARGIN) / (ymax - ymin);
    let map = |x: f64, y: f64| -> (f64, f64) {
        (MARGIN + (x - xmin) * sx, H - MARGIN - (y - ymin) * sy)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{W}" height="{H}" fill="white" stroke="none"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        W / 2.0,
        title
    );
    // axes through zero when visible
    if xmin < 0.0 && xmax > 0.0 {
        let (x0, _) = map(0.0, 0.0);
        let _ = writeln!(
            out,
            r##"<line x1="{x0:.2}" y1="{MARGIN:.2}" x2="{x0:.2}" y2="{:.2}" stroke="#bbbbbb" stroke-width="0.8"/>"##,
            H - MARGIN
        );
    }
    if ymin < 0.0 && ymax > 0.0 {
        let (_, y0) = map(0.0, 0.0);
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="#bbbbbb" stroke-width="0.8"/>"##,
            W - MARGIN
        );
    }
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="#888888" stroke-width="1"/>"##,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for s in series {
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (k, &(x, y)) in s.points.iter().enumerate() {
            let (px, py) = map(x, y);
            let _ = write!(d, "{}{px:.3} {py:.3}", if k == 0 { "M" } else { " L" });
        }
        let _ = writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="{:.2}"/>"#,
            s.color, s.width
        );
    }
    let _ = writeln!(
        out,
        r##"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="#555555">[{xmin:.3}, {xmax:.3}] x [{ymin:.3}, {ymax:.3}]</text>"##,
        MARGIN,
        H - MARGIN / 2.5
    );
    out.push_str("</svg>\n");
    out
}
