//! Self-contained SVG line plots rendered from the CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::CliResult;
use crate::report::{from_csv, CurveRow, RobustnessRow, SweepRow};

const WIDTH: f64 = 720.0;
const PLOT_HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

struct Axis {
    log: bool,
    min: f64,
    max: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Axis {
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            min = min.min(v);
            max = max.max(v);
        }
        if !min.is_finite() {
            (min, max) = if log { (0.1, 1.0) } else { (0.0, 1.0) };
        }
        if log {
            min = 10f64.powf(min.log10().floor());
            max = 10f64.powf(max.log10().ceil());
            if min == max {
                max = min * 10.0;
            }
        } else if min == max {
            min -= 0.5;
            max += 0.5;
        }
        Axis { log, min, max }
    }

    fn fraction(&self, v: f64) -> f64 {
        if self.log {
            (v.log10() - self.min.log10()) / (self.max.log10() - self.min.log10())
        } else {
            (v - self.min) / (self.max - self.min)
        }
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (lo, hi) = (self.min.log10().round() as i32, self.max.log10().round() as i32);
            let stride = ((hi - lo) as f64 / 8.0).ceil().max(1.0) as i32;
            (lo..=hi)
                .step_by(stride as usize)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect()
        } else {
            let span = self.max - self.min;
            let step = (span / 10.0).ceil().max(1.0);
            let mut out = Vec::new();
            let mut v = self.min.ceil();
            while v <= self.max + 1e-9 {
                out.push((v, format!("{v}")));
                v += step;
            }
            out
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Figure<'a> {
    title: &'a str,
    x_label: &'a str,
    y_label: &'a str,
    log_x: bool,
    series: Vec<Series>,
    table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Figure<'_> {
    fn render(&self) -> String {
        let x = Axis::new(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), self.log_x);
        let y = Axis::new(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), true);
        let table_rows = self.table.as_ref().map_or(0, |(_, rows)| rows.len() + 1);
        let height = PLOT_HEIGHT + if table_rows > 0 { 20.0 * table_rows as f64 + 30.0 } else { 0.0 };
        let (pw, ph) = (WIDTH - LEFT - RIGHT, PLOT_HEIGHT - TOP - BOTTOM);
        let px = |v: f64| LEFT + x.fraction(v) * pw;
        let py = |v: f64| TOP + (1.0 - y.fraction(v)) * ph;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="25" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(self.title)
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for (v, label) in x.ticks() {
            let cx = px(v);
            let _ = writeln!(
                svg,
                r##"<line x1="{cx:.1}" y1="{TOP}" x2="{cx:.1}" y2="{:.1}" stroke="#dddddd"/><text x="{cx:.1}" y="{:.1}" text-anchor="middle">{label}</text>"##,
                TOP + ph,
                TOP + ph + 18.0
            );
        }
        for (v, label) in y.ticks() {
            let cy = py(v);
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{cy:.1}" x2="{:.1}" y2="{cy:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                cy + 4.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            PLOT_HEIGHT - 15.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let visible: Vec<(f64, f64)> = s
                .points
                .iter()
                .copied()
                .filter(|&(a, b)| a.is_finite() && b.is_finite() && b > 0.0 && (!self.log_x || a > 0.0))
                .collect();
            let path: Vec<String> = visible.iter().map(|&(a, b)| format!("{:.1},{:.1}", px(a), py(b))).collect();
            if path.len() > 1 {
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    path.join(" ")
                );
            }
            for &(a, b) in &visible {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                    px(a),
                    py(b)
                );
            }
            let ly = TOP + 10.0 + 20.0 * i as f64;
            let lx = LEFT + pw + 15.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(&s.name)
            );
        }

        if let Some((header, rows)) = &self.table {
            let col = (WIDTH - 2.0 * LEFT) / header.len().max(1) as f64;
            for (r, cells) in std::iter::once(header).chain(rows.iter()).enumerate() {
                let ty = PLOT_HEIGHT + 20.0 + 20.0 * r as f64;
                let weight = if r == 0 { "bold" } else { "normal" };
                for (c, cell) in cells.iter().enumerate() {
                    let _ = writeln!(
                        svg,
                        r#"<text x="{:.1}" y="{ty:.1}" font-weight="{weight}">{}</text>"#,
                        LEFT + col * c as f64,
                        escape(cell)
                    );
                }
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Mean infidelity against basis count, one line per estimator.
pub fn noisy_svg(csv: &str) -> CliResult<String> {
    let rows: Vec<CurveRow> = from_csv(csv)?;
    let mut by_estimator: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        by_estimator
            .entry(r.estimator)
            .or_default()
            .push((r.n_bases as f64, r.mean_infidelity));
    }
    Ok(Figure {
        title: "Mean infidelity to the target state",
        x_label: "number of measured bases",
        y_label: "mean infidelity",
        log_x: false,
        series: by_estimator
            .into_iter()
            .map(|(name, points)| Series { name, points })
            .collect(),
        table: None,
    }
    .render())
}

/// Worst reconstruction error per cell against basis count, plus the onset
/// table (first basis count without failures).
pub fn sweep_svg(csv: &str) -> CliResult<String> {
    let rows: Vec<SweepRow> = from_csv(csv)?;
    let mut cells: BTreeMap<(usize, usize), Vec<&SweepRow>> = BTreeMap::new();
    for r in &rows {
        cells.entry((r.dim, r.rank)).or_default().push(r);
    }
    let series = cells
        .iter()
        .map(|(&(d, r), rs)| Series {
            name: format!("d={d} r={r}"),
            points: rs.iter().map(|x| (x.n_bases as f64, x.worst_error)).collect(),
        })
        .collect();
    let table_rows = cells
        .iter()
        .map(|(&(d, r), rs)| {
            let onset = rs
                .iter()
                .find(|x| x.failures == 0)
                .map_or_else(|| "not reached".to_string(), |x| x.n_bases.to_string());
            let states = rs.first().map_or(0, |x| x.states);
            vec![d.to_string(), r.to_string(), states.to_string(), onset]
        })
        .collect();
    Ok(Figure {
        title: "Worst reconstruction error over tested states",
        x_label: "number of measured bases",
        y_label: "worst error (infidelity for rank 1, Frobenius otherwise)",
        log_x: false,
        series,
        table: Some((
            vec!["dim".into(), "rank".into(), "states".into(), "onset".into()],
            table_rows,
        )),
    }
    .render())
}

/// Estimation error against injected noise norm on log-log axes.
pub fn robustness_svg(csv: &str) -> CliResult<String> {
    let rows: Vec<RobustnessRow> = from_csv(csv)?;
    let series = vec![
        Series {
            name: "mean error".into(),
            points: rows.iter().map(|r| (r.epsilon, r.mean_error)).collect(),
        },
        Series {
            name: "max error".into(),
            points: rows.iter().map(|r| (r.epsilon, r.max_error)).collect(),
        },
    ];
    Ok(Figure {
        title: "Estimation error against noise norm",
        x_label: "noise norm ε",
        y_label: "‖X̂ − ρ₀‖_F",
        log_x: true,
        series,
        table: None,
    }
    .render())
}
