//! Minimal deterministic SVG line charts for the benchmark sweeps.
//!
//! No plotting dependency: the charts are simple enough (one series per
//! mechanism, log-scaled ε on x, mean error on y) that hand-rolled SVG keeps
//! the output byte-stable across runs, which the reproducibility contract
//! requires.

use crate::metrics::SummaryRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

#[derive(Debug, Clone)]
pub struct ChartSeries {
    pub name: String,
    /// (x position, y value); y must be positive (log scale).
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Tick positions (same coordinate space as the series x) and labels.
    pub x_ticks: Vec<(f64, String)>,
    pub series: Vec<ChartSeries>,
    /// Embedded provenance (resolved config echo), placed in `<desc>`.
    pub desc: String,
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render the chart. Y axis is log10 with decade ticks.
pub fn render(spec: &ChartSpec) -> String {
    let xs: Vec<f64> = spec
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    let ys: Vec<f64> = spec
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|y| *y > 0.0)
        .collect();
    let (x_min, x_max) = bounds(&xs, 0.0, 1.0);
    let (y_min, y_max) = bounds(&ys.iter().map(|y| y.log10()).collect::<Vec<_>>(), -1.0, 1.0);
    let (y_min, y_max) = (y_min.floor(), y_max.ceil());

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min).max(1e-12) * plot_w;
    let sy = |y: f64| {
        let ly = y.max(1e-300).log10();
        MARGIN_TOP + (y_max - ly) / (y_max - y_min).max(1e-12) * plot_h
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!("<desc>{}</desc>\n", escape(&spec.desc)));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        escape(&spec.title)
    ));

    // frame
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(plot_w),
        fmt(plot_h)
    ));

    // x ticks
    for (pos, label) in &spec.x_ticks {
        let x = sx(*pos);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333\"/>\n",
            fmt(x),
            fmt(MARGIN_TOP + plot_h),
            fmt(MARGIN_TOP + plot_h + 5.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            fmt(x),
            fmt(MARGIN_TOP + plot_h + 18.0),
            escape(label)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(HEIGHT - 12.0),
        escape(&spec.x_label)
    ));

    // y decade ticks and gridlines
    let mut p = y_min as i64;
    while p <= y_max as i64 {
        let y = sy(10f64.powi(p as i32));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#ddd\"/>\n",
            fmt(MARGIN_LEFT),
            fmt(y),
            fmt(MARGIN_LEFT + plot_w)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{p}</text>\n",
            fmt(MARGIN_LEFT - 6.0),
            fmt(y + 4.0)
        ));
        p += 1;
    }
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
        fmt(MARGIN_TOP + plot_h / 2.0),
        escape(&spec.y_label)
    ));

    // series
    for (i, series) in spec.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(sx(x)), fmt(sy(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &series.points {
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                fmt(sx(x)),
                fmt(sy(y))
            ));
        }
        // legend
        let ly = MARGIN_TOP + 14.0 + i as f64 * 18.0;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            fmt(lx),
            fmt(ly),
            fmt(lx + 18.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            fmt(lx + 24.0),
            fmt(ly + 4.0),
            escape(&series.name)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64], fallback_lo: f64, fallback_hi: f64) -> (f64, f64) {
    if values.is_empty() {
        return (fallback_lo, fallback_hi);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo).abs() < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Build one chart per (workload, metric) from summary rows.
///
/// When the rows sweep several ε values, x is log10(ε); when ε is fixed and
/// several dimension settings are present, x walks the settings instead.
/// Returns `(file stem, svg)` pairs in deterministic order.
pub fn charts_from_summary(summary: &[SummaryRow], desc: &str) -> Vec<(String, String)> {
    let mut keys: Vec<(String, String, String)> = summary
        .iter()
        .map(|r| (r.experiment.clone(), r.workload.clone(), r.metric.clone()))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    keys.sort();

    let mut out = Vec::new();
    for (experiment, workload, metric) in keys {
        let rows: Vec<&SummaryRow> = summary
            .iter()
            .filter(|r| r.experiment == experiment && r.workload == workload && r.metric == metric)
            .collect();
        let eps: std::collections::BTreeSet<String> =
            rows.iter().map(|r| r.epsilon.to_string()).collect();
        let domains: Vec<String> = {
            let mut seen = Vec::new();
            for r in &rows {
                if !seen.contains(&r.domain) {
                    seen.push(r.domain.clone());
                }
            }
            seen
        };
        let mechanisms: std::collections::BTreeSet<String> =
            rows.iter().map(|r| r.mechanism.clone()).collect();

        type XAxis = (Box<dyn Fn(&SummaryRow) -> f64>, Vec<(f64, String)>, String);
        let (x_of, x_ticks, x_label): XAxis = if eps.len() > 1 {
            let ticks = eps
                .iter()
                .map(|e| (e.parse::<f64>().expect("eps from f64").log10(), e.clone()))
                .collect();
            (
                Box::new(|r: &SummaryRow| r.epsilon.log10()),
                ticks,
                "epsilon (log scale)".into(),
            )
        } else {
            let ticks = domains
                .iter()
                .enumerate()
                .map(|(i, d)| (i as f64, d.clone()))
                .collect();
            let domains_for_x = domains.clone();
            (
                Box::new(move |r: &SummaryRow| {
                    domains_for_x
                        .iter()
                        .position(|d| *d == r.domain)
                        .unwrap_or(0) as f64
                }),
                ticks,
                "dimension setting".into(),
            )
        };

        let series: Vec<ChartSeries> = mechanisms
            .iter()
            .map(|m| {
                let mut points: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| r.mechanism == *m)
                    .map(|r| (x_of(r), r.mean.max(1e-12)))
                    .collect();
                points.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
                ChartSeries {
                    name: m.clone(),
                    points,
                }
            })
            .collect();

        let metric_label = match metric.as_str() {
            "abs_error" => "mean absolute error",
            "rel_error" => "mean relative error",
            other => other,
        };
        let spec = ChartSpec {
            title: format!("{experiment}: {metric_label}, {workload}"),
            x_label,
            y_label: metric_label.to_string(),
            x_ticks,
            series,
            desc: desc.to_string(),
        };
        out.push((format!("{experiment}_{metric}_{workload}"), render(&spec)));
    }
    out
}
