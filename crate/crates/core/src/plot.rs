//! Static SVG charts rendered from run artifacts: one line chart per metric
//! series and a heatmap triptych of the true map, team belief, and team
//! empirical distribution.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// One named line of `(x, y)` points.
pub struct Series<'a> {
    /// Legend label.
    pub label: &'a str,
    /// Points in x order.
    pub points: &'a [(f64, f64)],
}

/// Renders a line chart as an SVG document.
pub fn line_chart_svg(title: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let (width, height) = (800.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let (pw, ph) = (width - ml - mr, height - mt - mb);

    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max - x_min).abs() < 1e-12 {
        x_max = x_min + 1.0;
    }
    y_min = y_min.min(0.0);
    if (y_max - y_min).abs() < 1e-12 {
        y_max = y_min + 1.0;
    }
    y_max += 0.05 * (y_max - y_min);

    let fx = |x: f64| ml + (x - x_min) / (x_max - x_min) * pw;
    let fy = |y: f64| mt + ph - (y - y_min) / (y_max - y_min) * ph;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        width / 2.0,
        title
    ));
    // Axes and ticks.
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        mt + ph,
        ml + pw,
        mt + ph
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        mt + ph
    ));
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = x_min + t * (x_max - x_min);
        let yv = y_min + t * (y_max - y_min);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            fx(xv),
            mt + ph,
            mt + ph + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            fx(xv),
            mt + ph + 18.0,
            format_tick(xv)
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{1}\" x2=\"{ml}\" y2=\"{1}\" stroke=\"black\"/>\n",
            ml - 5.0,
            fy(yv)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            ml - 8.0,
            fy(yv) + 4.0,
            format_tick(yv)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">k</text>\n",
        ml + pw / 2.0,
        height - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{}</text>\n",
        mt + ph / 2.0,
        y_label
    ));

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        for (j, &(x, y)) in s.points.iter().enumerate() {
            d.push_str(if j == 0 { "M" } else { "L" });
            d.push_str(&format!("{:.2},{:.2}", fx(x), fy(y)));
        }
        svg.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
        ));
        let ly = mt + 14.0 + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            ml + pw - 150.0,
            ml + pw - 125.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            ml + pw - 118.0,
            ly + 4.0,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

/// Normalizes a distribution to display intensities in `[0, 1]` by dividing
/// by the maximum entry (all zeros stay zero).
pub fn heatmap_intensity(dist: &[f64]) -> Vec<f64> {
    let max = dist.iter().cloned().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return vec![0.0; dist.len()];
    }
    dist.iter().map(|v| (v / max).clamp(0.0, 1.0)).collect()
}

/// Mean absolute difference between two intensity grids; a crude image-space
/// distance used to check that a converged belief heatmap matches the truth.
pub fn intensity_l1(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

fn intensity_color(t: f64) -> String {
    // Dark violet through teal to yellow, a compact three-stop ramp.
    let stops = [
        (68.0, 1.0, 84.0),
        (33.0, 145.0, 140.0),
        (253.0, 231.0, 37.0),
    ];
    let (a, b, u) = if t < 0.5 {
        (stops[0], stops[1], t * 2.0)
    } else {
        (stops[1], stops[2], (t - 0.5) * 2.0)
    };
    let mix = |x: f64, y: f64| (x + (y - x) * u).round() as u8;
    format!("rgb({},{},{})", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Renders side-by-side heatmap panels of per-region distributions.
pub fn heatmap_triptych_svg(
    grid_width: usize,
    grid_height: usize,
    panels: &[(&str, &[f64])],
    nofly: &[usize],
) -> String {
    let cell = 28.0f64
        .min(240.0 / grid_width.max(grid_height) as f64)
        .max(8.0);
    let panel_w = grid_width as f64 * cell;
    let panel_h = grid_height as f64 * cell;
    let gap = 30.0;
    let width = panels.len() as f64 * (panel_w + gap) + gap;
    let height = panel_h + 70.0;
    let nofly_mask: std::collections::HashSet<usize> = nofly.iter().copied().collect();

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (pi, (title, dist)) in panels.iter().enumerate() {
        let x0 = gap + pi as f64 * (panel_w + gap);
        let y0 = 40.0;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            x0 + panel_w / 2.0,
            title
        ));
        let intensity = heatmap_intensity(dist);
        for (r, &level) in intensity.iter().enumerate() {
            let (cx, cy) = (r % grid_width, r / grid_width);
            let x = x0 + cx as f64 * cell;
            let y = y0 + cy as f64 * cell;
            let fill = if nofly_mask.contains(&r) {
                "rgb(30,30,30)".to_string()
            } else {
                intensity_color(level)
            };
            svg.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" fill=\"{fill}\" stroke=\"white\" stroke-width=\"0.5\"/>\n"
            ));
            if nofly_mask.contains(&r) {
                svg.push_str(&format!(
                    "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"{:.0}\" fill=\"white\" text-anchor=\"middle\">x</text>\n",
                    x + cell / 2.0,
                    y + cell * 0.7,
                    cell * 0.6
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[derive(Deserialize)]
struct SummaryRead {
    width: usize,
    height: usize,
    nofly: Vec<usize>,
    final_true_target: Vec<f64>,
    final_team_belief: Vec<f64>,
    final_team_empirical: Vec<f64>,
}

struct MetricsRead {
    k: Vec<f64>,
    regret: Vec<f64>,
    empirical: Vec<f64>,
    belief: Vec<f64>,
    kl: Vec<f64>,
}

fn read_metrics(path: &Path) -> Result<MetricsRead> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = MetricsRead {
        k: Vec::new(),
        regret: Vec::new(),
        empirical: Vec::new(),
        belief: Vec::new(),
        kl: Vec::new(),
    };
    for row in rdr.records() {
        let row = row?;
        let get = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::ConfigParse(format!("bad metrics.csv row: {row:?}")))
        };
        out.k.push(get(0)?);
        out.regret.push(get(1)?);
        out.empirical.push(get(2)?);
        out.belief.push(get(3)?);
        out.kl.push(get(4)?);
    }
    Ok(out)
}

/// `plot <run-dir>`: renders the metric line charts and the heatmap triptych
/// for one run directory. All inputs are read and rendered before any file is
/// written, so a bad directory produces no partial output.
pub fn cmd_plot(dir: &Path) -> Result<Vec<PathBuf>> {
    let metrics = read_metrics(&dir.join("metrics.csv"))?;
    let summary: SummaryRead =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json"))?)?;

    let pair = |ys: &[f64]| -> Vec<(f64, f64)> {
        metrics.k.iter().copied().zip(ys.iter().copied()).collect()
    };
    type Chart<'a> = (&'a str, &'a str, Vec<(f64, f64)>);
    let charts: Vec<Chart<'_>> = vec![
        ("regret.svg", "time-averaged regret", pair(&metrics.regret)),
        (
            "empirical_error.svg",
            "empirical L1 error",
            pair(&metrics.empirical),
        ),
        ("belief_error.svg", "belief L1 error", pair(&metrics.belief)),
        (
            "kl_alignment.svg",
            "mean KL to team belief",
            pair(&metrics.kl),
        ),
    ];
    let mut rendered: Vec<(PathBuf, String)> = charts
        .iter()
        .map(|(file, label, points)| {
            let svg = line_chart_svg(label, label, &[Series { label, points }]);
            (dir.join(file), svg)
        })
        .collect();
    let triptych = heatmap_triptych_svg(
        summary.width,
        summary.height,
        &[
            ("true target", summary.final_true_target.as_slice()),
            ("team belief", summary.final_team_belief.as_slice()),
            ("team empirical", summary.final_team_empirical.as_slice()),
        ],
        &summary.nofly,
    );
    rendered.push((dir.join("heatmaps.svg"), triptych));

    let mut written = Vec::new();
    for (path, svg) in rendered {
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_contains_series_path() {
        let points = vec![(0.0, 0.1), (1.0, 0.4), (2.0, 0.2)];
        let svg = line_chart_svg(
            "demo",
            "value",
            &[Series {
                label: "demo",
                points: &points,
            }],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<path"));
        assert!(svg.contains("demo"));
    }

    #[test]
    fn intensity_normalizes_to_unit_peak() {
        let i = heatmap_intensity(&[0.0, 0.2, 0.4]);
        assert_eq!(i, vec![0.0, 0.5, 1.0]);
        assert_eq!(heatmap_intensity(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn triptych_marks_nofly_cells() {
        let dist = vec![0.25; 4];
        let svg = heatmap_triptych_svg(2, 2, &[("d", dist.as_slice())], &[3]);
        assert!(svg.contains("rgb(30,30,30)"));
    }

    #[test]
    fn plot_missing_dir_errors_without_output() {
        let tmp = tempfile::tempdir().unwrap();
        let empty = tmp.path().join("empty");
        std::fs::create_dir(&empty).unwrap();
        assert!(cmd_plot(&empty).is_err());
        assert_eq!(std::fs::read_dir(&empty).unwrap().count(), 0);
    }
}
