//! Self-contained SVG heatmap of a fidelity grid: one rect per cell, colored
//! by a linear ramp on -log10(1 - F*), with axis ticks and a legend bar.

use iongate_core::FidelityGrid;
use std::fmt::Write;

/// Infidelity decades covered by the color ramp: full color at 1 - F = 1e-6.
const RAMP_DECADES: f64 = 6.0;

const STOPS: [(f64, [u8; 3]); 5] = [
    (0.00, [0x31, 0x12, 0x3b]),
    (0.25, [0x25, 0x6f, 0xb8]),
    (0.50, [0x1f, 0xb5, 0x85]),
    (0.75, [0xeb, 0xc0, 0x33]),
    (1.00, [0xc6, 0x32, 0x01]),
];

fn ramp(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    for pair in STOPS.windows(2) {
        let (t0, c0) = pair[0];
        let (t1, c1) = pair[1];
        if t <= t1 {
            let f = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            let mut out = [0u8; 3];
            for k in 0..3 {
                out[k] = (c0[k] as f64 + f * (c1[k] as f64 - c0[k] as f64)).round() as u8;
            }
            return out;
        }
    }
    STOPS[STOPS.len() - 1].1
}

fn color_of(fidelity: f64) -> String {
    let infidelity = (1.0 - fidelity).max(10f64.powf(-RAMP_DECADES));
    let t = -infidelity.log10() / RAMP_DECADES;
    let [r, g, b] = ramp(t);
    format!("#{r:02x}{g:02x}{b:02x}")
}

pub fn render_heatmap(grid: &FidelityGrid, title: &str) -> String {
    let plot_w = 640.0;
    let plot_h = 480.0;
    let margin_left = 70.0;
    let margin_top = 40.0;
    let margin_bottom = 50.0;
    let legend_w = 18.0;
    let legend_gap = 30.0;
    let legend_label_w = 80.0;
    let width = margin_left + plot_w + legend_gap + legend_w + legend_label_w;
    let height = margin_top + plot_h + margin_bottom;

    let ne = grid.etas.len();
    let na = grid.area_scales.len();
    let cell_w = plot_w / ne as f64;
    let cell_h = plot_h / na as f64;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = write!(
        svg,
        r#"<rect width="{width:.0}" height="{height:.0}" fill="white"/>"#
    );
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15">{}</text>"#,
        margin_left,
        xml_escape(title)
    );

    // Cells: x axis is eta (ascending), y axis is area_scale (ascending, up).
    for i in 0..ne {
        for j in 0..na {
            let f = grid.value(i, j);
            let x = margin_left + i as f64 * cell_w;
            let y = margin_top + plot_h - (j + 1) as f64 * cell_h;
            let _ = write!(
                svg,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                cell_w + 0.5,
                cell_h + 0.5,
                color_of(f)
            );
        }
    }

    // Best-cell marker.
    let (bi, bj, bf) = grid.max_cell();
    let bx = margin_left + (bi as f64 + 0.5) * cell_w;
    let by = margin_top + plot_h - (bj as f64 + 0.5) * cell_h;
    let _ = write!(
        svg,
        r#"<circle cx="{bx:.2}" cy="{by:.2}" r="5" fill="none" stroke="white" stroke-width="2"/>"#
    );

    // Frame and axis ticks.
    let _ = write!(
        svg,
        r#"<rect x="{margin_left:.1}" y="{margin_top:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#
    );
    let ticks = 5usize;
    for k in 0..=ticks {
        let f = k as f64 / ticks as f64;
        let eta = grid.etas[0] + f * (grid.etas[ne - 1] - grid.etas[0]);
        let x = margin_left + f * plot_w;
        let _ = write!(
            svg,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            margin_top + plot_h,
            margin_top + plot_h + 5.0
        );
        let _ = write!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{eta:.3}</text>"#,
            margin_top + plot_h + 18.0
        );
        let a = grid.area_scales[0] + f * (grid.area_scales[na - 1] - grid.area_scales[0]);
        let y = margin_top + plot_h - f * plot_h;
        let _ = write!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{margin_left:.1}" y2="{y:.1}" stroke="black"/>"#,
            margin_left - 5.0
        );
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{a:.3}</text>"#,
            margin_left - 8.0,
            y + 4.0
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">Lamb-Dicke parameter</text>"#,
        margin_left + plot_w / 2.0,
        margin_top + plot_h + 38.0
    );
    let _ = write!(
        svg,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">area scale A / A_min</text>"#,
        margin_top + plot_h / 2.0,
        margin_top + plot_h / 2.0
    );

    // Legend: vertical ramp with -log10(1 - F) labels.
    let lx = margin_left + plot_w + legend_gap;
    let steps = 60;
    for k in 0..steps {
        let t = k as f64 / (steps - 1) as f64;
        let [r, g, b] = ramp(t);
        let y = margin_top + plot_h - (k + 1) as f64 * plot_h / steps as f64;
        let _ = write!(
            svg,
            r##"<rect x="{lx:.1}" y="{y:.2}" width="{legend_w:.1}" height="{:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
            plot_h / steps as f64 + 0.5
        );
    }
    let _ = write!(
        svg,
        r#"<rect x="{lx:.1}" y="{margin_top:.1}" width="{legend_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#
    );
    for k in 0..=RAMP_DECADES as usize {
        let t = k as f64 / RAMP_DECADES;
        let y = margin_top + plot_h - t * plot_h;
        let label = if k == 0 {
            "F \u{2264} 0.9".to_string()
        } else {
            format!("1-F = 1e-{k}")
        };
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{label}</text>"#,
            lx + legend_w + 6.0,
            y + 4.0
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{lx:.1}" y="{:.1}" font-family="sans-serif" font-size="12">max F* = {bf:.6}</text>"#,
        margin_top + plot_h + 38.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
