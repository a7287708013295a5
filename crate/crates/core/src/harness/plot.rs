//! Log-log SVG plots of median infidelity with interquartile bands.

use std::path::Path;

use plotters::prelude::*;

use super::ensemble::EnsembleStats;
use super::fit::PowerLawFit;
use crate::error::{Error, Result};

/// One labelled curve.
#[derive(Clone, Debug)]
pub struct PlotSeries<'a> {
    pub label: String,
    pub stats: &'a EnsembleStats,
    pub fit: Option<PowerLawFit>,
}

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(255, 127, 14),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

fn positive_bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values
        .filter(|v| *v > 0.0 && v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

fn widen(lo: f64, hi: f64) -> (f64, f64) {
    if hi / lo < 1.5 {
        (lo / 2.0, hi * 2.0)
    } else {
        (lo / 1.2, hi * 1.2)
    }
}

/// Renders every series on shared log-log axes to an SVG file.
///
/// Fits are overlaid as dashed lines over their window; series with a single
/// recorded point are drawn as markers without a fit.
pub fn emit_plot(series: &[PlotSeries<'_>], path: &Path) -> Result<()> {
    let plot_err = |e: &dyn std::fmt::Display| Error::Plot {
        path: path.into(),
        msg: e.to_string(),
    };
    if series.is_empty() || series.iter().all(|s| s.stats.is_empty()) {
        return Err(plot_err(&"nothing to plot"));
    }
    let x = positive_bounds(
        series
            .iter()
            .flat_map(|s| s.stats.rows.iter().map(|r| r.iteration as f64)),
    )
    .ok_or_else(|| plot_err(&"no positive iterations"))?;
    let y = positive_bounds(
        series
            .iter()
            .flat_map(|s| s.stats.rows.iter().flat_map(|r| [r.q25, r.median, r.q75])),
    )
    .ok_or_else(|| plot_err(&"no positive infidelities"))?;
    let (x0, x1) = widen(x.0, x.1);
    let (y0, y1) = widen(y.0, y.1);
    let floor = y0;

    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .margin(20)
        .x_label_area_size(45)
        .y_label_area_size(70)
        .build_cartesian_2d((x0..x1).log_scale(), (y0..y1).log_scale())
        .map_err(|e| plot_err(&e))?;
    chart
        .configure_mesh()
        .x_desc("iteration k")
        .y_desc("infidelity")
        .y_label_formatter(&|v| format!("{v:.0e}"))
        .x_label_formatter(&|v| format!("{v:.0e}"))
        .draw()
        .map_err(|e| plot_err(&e))?;

    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let rows = &s.stats.rows;
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.iteration as f64, r.median.max(floor))).collect();
        if rows.len() == 1 {
            chart
                .draw_series(pts.iter().map(|&p| Circle::new(p, 5, color.filled())))
                .map_err(|e| plot_err(&e))?
                .label(s.label.clone())
                .legend(move |(x, y)| Circle::new((x + 10, y), 4, color.filled()));
            continue;
        }
        let mut band: Vec<(f64, f64)> = rows.iter().map(|r| (r.iteration as f64, r.q75.max(floor))).collect();
        band.extend(rows.iter().rev().map(|r| (r.iteration as f64, r.q25.max(floor))));
        chart
            .draw_series(std::iter::once(Polygon::new(band, color.mix(0.2).filled())))
            .map_err(|e| plot_err(&e))?;
        chart
            .draw_series(LineSeries::new(pts, color.stroke_width(2)))
            .map_err(|e| plot_err(&e))?
            .label(s.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        if let Some(fit) = s.fit {
            let (a, b) = (fit.window.k_min.max(1) as f64, fit.window.k_max as f64);
            let line: Vec<(f64, f64)> = (0..=40)
                .map(|i| {
                    let k = a * (b / a).powf(i as f64 / 40.0);
                    (k, fit.eval(k).max(floor))
                })
                .collect();
            chart
                .draw_series(DashedLineSeries::new(line, 8, 5, BLACK.stroke_width(1)))
                .map_err(|e| plot_err(&e))?
                .label(format!("{}: fit c k^b, b = {:.3}", s.label, fit.beta))
                .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLACK));
        }
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .position(SeriesLabelPosition::UpperRight)
        .draw()
        .map_err(|e| plot_err(&e))?;
    root.present().map_err(|e| plot_err(&e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ensemble::StatsRow;
    use crate::harness::fit::{fit_power_law, FitWindow};

    fn synthetic(scale: f64, n: u64) -> EnsembleStats {
        EnsembleStats {
            rows: (1..=n)
                .map(|k| {
                    let m = scale / k as f64;
                    StatsRow {
                        iteration: k,
                        median: m,
                        q25: 0.5 * m,
                        q75: 2.0 * m,
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn renders_svg_with_fit() {
        let stats = synthetic(0.5, 200);
        let fit = fit_power_law(&stats, FitWindow::new(10, 200)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("plot.svg");
        emit_plot(
            &[PlotSeries {
                label: "ideal".into(),
                stats: &stats,
                fit: Some(fit),
            }],
            &p,
        )
        .unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.contains("ideal"));
        assert!(text.contains("fit"));
    }

    #[test]
    fn single_point_without_fit() {
        let stats = synthetic(0.1, 1);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("single.svg");
        emit_plot(
            &[PlotSeries {
                label: "qpt".into(),
                stats: &stats,
                fit: None,
            }],
            &p,
        )
        .unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("<circle"));
        assert!(!text.contains("fit c k^b"));
    }

    #[test]
    fn three_labelled_curves() {
        let a = synthetic(0.1, 50);
        let b = synthetic(0.2, 50);
        let c = synthetic(0.4, 50);
        let series: Vec<_> = [("eps = 1", &a), ("eps = 6", &b), ("eps = 12", &c)]
            .into_iter()
            .map(|(l, s)| PlotSeries {
                label: l.into(),
                stats: s,
                fit: None,
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("three.svg");
        emit_plot(&series, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        for l in ["eps = 1", "eps = 6", "eps = 12"] {
            assert!(text.contains(l), "missing {l}");
        }
    }

    #[test]
    fn empty_input_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_plot(&[], &dir.path().join("x.svg")).is_err());
    }
}
