//! Minimal SVG line charts for run inspection. CSV remains the contract;
//! these are hand-rolled polylines with axes and a legend, no dependencies.

use anyhow::{Context, Result};
use std::fs;
use std::path::Path;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

fn bounds(series: &[(String, Vec<(f64, f64)>)]) -> ((f64, f64), (f64, f64)) {
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, pts) in series {
        for &(px, py) in pts {
            if px.is_finite() {
                x.0 = x.0.min(px);
                x.1 = x.1.max(px);
            }
            if py.is_finite() {
                y.0 = y.0.min(py);
                y.1 = y.1.max(py);
            }
        }
    }
    if !x.0.is_finite() || x.0 == x.1 {
        x = (x.0.min(0.0), x.0.min(0.0) + 1.0);
    }
    if !y.0.is_finite() || y.0 == y.1 {
        let c = if y.0.is_finite() { y.0 } else { 0.0 };
        y = (c - 0.5, c + 0.5);
    }
    (x, y)
}

impl Chart<'_> {
    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = bounds(&self.series);
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * plot_h;
        let mut svg = String::new();
        svg.push_str(&format!(
            concat!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" ",
                "font-family=\"sans-serif\" font-size=\"13\">\n",
                "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            ),
            w = WIDTH,
            h = HEIGHT
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
            WIDTH / 2.0,
            self.title
        ));
        // frame and axis extents
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
            MARGIN_L, MARGIN_T, plot_w, plot_h
        ));
        for (frac, value) in [(0.0, x0), (0.5, 0.5 * (x0 + x1)), (1.0, x1)] {
            let px = MARGIN_L + frac * plot_w;
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.3}</text>\n",
                px,
                HEIGHT - MARGIN_B + 20.0,
                value
            ));
        }
        for (frac, value) in [(0.0, y1), (0.5, 0.5 * (y0 + y1)), (1.0, y0)] {
            let py = MARGIN_T + frac * plot_h;
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3}</text>\n",
                MARGIN_L - 8.0,
                py + 4.0,
                value
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 10.0,
            self.x_label
        ));
        svg.push_str(&format!(
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            self.y_label
        ));
        for (idx, (label, pts)) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let path: Vec<String> = pts
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            if path.len() >= 2 {
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                    path.join(" "),
                    color
                ));
            }
            let ly = MARGIN_T + 16.0 + 18.0 * idx as f64;
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"3\" fill=\"{}\"/>\n",
                MARGIN_L + plot_w - 150.0,
                ly - 4.0,
                color
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                MARGIN_L + plot_w - 130.0,
                ly,
                label
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())
            .with_context(|| format!("cannot write plot {}", path.display()))
    }
}
