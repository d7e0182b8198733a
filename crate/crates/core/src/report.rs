//! CSV tables and SVG line plots for sweep and posterior output.

use std::fmt::Write as _;

use crate::bayes::PosteriorGrid;
use crate::ensemble::{asymptotic_relative_bound, SweepResult};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "alpha,eta,n_steps,nu,phi_true,mu_phi_mp,sigma_phi_mp,mu_l_ci,sigma_l_ci,baseline_ratio";

/// Formats `value` rounded to 12 significant digits in plain decimal notation.
pub fn fmt_sig12(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return if value == 0.0 { "0".into() } else { value.to_string() };
    }
    let rounded: f64 = format!("{value:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

/// One CSV line: per-angle metrics, or the angle-averaged `mean` row of an
/// (alpha, ν) pair when `phi_true` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub alpha: f64,
    pub eta: f64,
    pub n_steps: u32,
    pub nu: u64,
    pub phi_true: Option<f64>,
    pub mu_phi_mp: Option<f64>,
    pub sigma_phi_mp: Option<f64>,
    pub mu_l_ci: f64,
    pub sigma_l_ci: Option<f64>,
    pub baseline_ratio: Option<f64>,
}

impl ResultRow {
    pub fn is_mean(&self) -> bool {
        self.phi_true.is_none()
    }
}

/// Flattens a sweep into rows: each (alpha, ν) contributes its per-angle
/// rows followed by one `mean` row carrying the baseline ratio.
pub fn result_rows(sweep: &SweepResult) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for r in &sweep.rows {
        for cell in &r.per_phi {
            rows.push(ResultRow {
                alpha: r.alpha,
                eta: r.eta,
                n_steps: r.n_steps,
                nu: r.nu,
                phi_true: Some(cell.phi_true),
                mu_phi_mp: Some(cell.metrics.mu_phi_mp),
                sigma_phi_mp: Some(cell.metrics.sigma_phi_mp),
                mu_l_ci: cell.metrics.mu_l_ci,
                sigma_l_ci: Some(cell.metrics.sigma_l_ci),
                baseline_ratio: None,
            });
        }
        rows.push(ResultRow {
            alpha: r.alpha,
            eta: r.eta,
            n_steps: r.n_steps,
            nu: r.nu,
            phi_true: None,
            mu_phi_mp: None,
            sigma_phi_mp: None,
            mu_l_ci: r.mean_mu_l_ci,
            sigma_l_ci: None,
            baseline_ratio: r.baseline_ratio,
        });
    }
    rows
}

fn opt(value: Option<f64>) -> String {
    value.map(fmt_sig12).unwrap_or_default()
}

pub fn write_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let phi = r.phi_true.map_or_else(|| "mean".to_string(), fmt_sig12);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_sig12(r.alpha),
            fmt_sig12(r.eta),
            r.n_steps,
            r.nu,
            phi,
            opt(r.mu_phi_mp),
            opt(r.sigma_phi_mp),
            fmt_sig12(r.mu_l_ci),
            opt(r.sigma_l_ci),
            opt(r.baseline_ratio),
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == CSV_HEADER => {}
        _ => return Err(Error::Argument("CSV header does not match the result schema".into())),
    }
    let bad = |line: usize, what: &str| Error::Argument(format!("CSV line {}: bad {what}", line + 1));
    let mut rows = Vec::new();
    for (line, content) in lines {
        if content.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 10 {
            return Err(bad(line, "field count"));
        }
        let real = |i: usize, what: &str| fields[i].parse::<f64>().map_err(|_| bad(line, what));
        let maybe = |i: usize, what: &str| -> Result<Option<f64>> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                real(i, what).map(Some)
            }
        };
        rows.push(ResultRow {
            alpha: real(0, "alpha")?,
            eta: real(1, "eta")?,
            n_steps: fields[2].parse().map_err(|_| bad(line, "n_steps"))?,
            nu: fields[3].parse().map_err(|_| bad(line, "nu"))?,
            phi_true: if fields[4] == "mean" { None } else { Some(real(4, "phi_true")?) },
            mu_phi_mp: maybe(5, "mu_phi_mp")?,
            sigma_phi_mp: maybe(6, "sigma_phi_mp")?,
            mu_l_ci: real(7, "mu_l_ci")?,
            sigma_l_ci: maybe(8, "sigma_l_ci")?,
            baseline_ratio: maybe(9, "baseline_ratio")?,
        });
    }
    Ok(rows)
}

/// Two-column `phi,density` table of a posterior.
pub fn posterior_csv(grid: &PosteriorGrid) -> String {
    let mut out = String::from("phi,density\n");
    for (phi, d) in grid.nodes().iter().zip(grid.density()) {
        let _ = writeln!(out, "{},{}", fmt_sig12(*phi), fmt_sig12(*d));
    }
    out
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Minimal line chart: axes with ticks, one polyline per series, optional
/// dashed horizontal reference lines, and a legend.
#[derive(Debug, Clone, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub references: Vec<(String, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

impl LinePlot {
    pub fn to_svg(&self) -> String {
        let (x0, x1) = bounds(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
        let (y0, y1) = bounds(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| p.1))
                .chain(self.references.iter().map(|r| r.1)),
        );
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

        let mut svg = String::new();
        let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );

        for i in 0..=5 {
            let fx = x0 + (x1 - x0) * i as f64 / 5.0;
            let fy = y0 + (y1 - y0) * i as f64 / 5.0;
            let (px, py) = (sx(fx), sy(fy));
            let _ = writeln!(
                svg,
                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + plot_h,
                TOP + plot_h + 5.0,
                TOP + plot_h + 18.0,
                tick_label(fx)
            );
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                py + 4.0,
                tick_label(fy)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        let mut legend_y = TOP + 10.0;
        let legend_x = LEFT + plot_w + 15.0;
        for (label, y) in &self.references {
            let py = sy(*y);
            let _ = writeln!(
                svg,
                r#"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
                LEFT + plot_w
            );
            let _ = writeln!(
                svg,
                r#"<line x1="{legend_x:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="gray" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                legend_x + 20.0,
                legend_x + 26.0,
                legend_y + 4.0,
                escape(label)
            );
            legend_y += 18.0;
        }
        for (i, s) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let points: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
            if s.points.len() <= 40 {
                for &(x, y) in &s.points {
                    let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#, sx(x), sy(y));
                }
            }
            let _ = writeln!(
                svg,
                r#"<line x1="{legend_x:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                legend_x + 20.0,
                legend_x + 26.0,
                legend_y + 4.0,
                escape(&s.label)
            );
            legend_y += 18.0;
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn alpha_label(alpha: f64) -> String {
    format!("alpha = {}", tick_label(alpha))
}

/// mean(μ(L(CI))) against ν, one curve per alpha.
pub fn absolute_plot(sweep: &SweepResult) -> LinePlot {
    let eta = sweep.rows.first().map_or(1.0, |r| r.eta);
    LinePlot {
        title: format!("Uncertainty vs number of measurements (eta = {})", tick_label(eta)),
        x_label: "number of measurements nu".into(),
        y_label: "mean mu(L(CI))".into(),
        series: sweep
            .alphas()
            .into_iter()
            .map(|alpha| Series {
                label: alpha_label(alpha),
                points: sweep
                    .rows
                    .iter()
                    .filter(|r| r.alpha == alpha)
                    .map(|r| (r.nu as f64, r.mean_mu_l_ci))
                    .collect(),
            })
            .collect(),
        references: Vec::new(),
    }
}

/// Baseline ratio against ν for every alpha other than the baseline, with
/// the 1/√2 asymptote as a reference line.
pub fn relative_plot(sweep: &SweepResult, baseline_alpha: f64) -> LinePlot {
    let eta = sweep.rows.first().map_or(1.0, |r| r.eta);
    let bound = asymptotic_relative_bound(2).expect("two qubits");
    LinePlot {
        title: format!("Relative uncertainty vs separable probe (eta = {})", tick_label(eta)),
        x_label: "number of measurements nu".into(),
        y_label: "relative uncertainty".into(),
        series: sweep
            .alphas()
            .into_iter()
            .filter(|&a| (a - baseline_alpha).abs() > 1e-12)
            .map(|alpha| Series {
                label: alpha_label(alpha),
                points: sweep
                    .rows
                    .iter()
                    .filter(|r| r.alpha == alpha)
                    .filter_map(|r| r.baseline_ratio.map(|b| (r.nu as f64, b)))
                    .collect(),
            })
            .collect(),
        references: vec![("1/sqrt(2)".into(), bound), ("1".into(), 1.0)],
    }
}

pub fn posterior_plot(grid: &PosteriorGrid, title: &str) -> LinePlot {
    LinePlot {
        title: title.into(),
        x_label: "phi (rad)".into(),
        y_label: "posterior density".into(),
        series: vec![Series {
            label: "posterior".into(),
            points: grid.nodes().iter().copied().zip(grid.density().iter().copied()).collect(),
        }],
        references: Vec::new(),
    }
}
