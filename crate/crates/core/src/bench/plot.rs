use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::aggregate::SummaryRow;
use super::record::TrialRecord;
use crate::ice::Scenario;
use crate::navigator::NavigatorKind;
use crate::sim::TrajectorySample;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("writing plot {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

const COLORS: [&str; 3] = ["#1b9e77", "#d95f02", "#7570b3"];

fn color(kind: NavigatorKind) -> &'static str {
    COLORS[NavigatorKind::ALL.iter().position(|&k| k == kind).unwrap_or(0)]
}

/// Silverman's rule of thumb, `0.9 min(σ, IQR / 1.34) n^(-1/5)`. Falls back
/// to σ, then to 1, when the spread statistics vanish.
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 1.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (n - 1) as f64;
        let (lo, frac) = (h.floor() as usize, h - h.floor());
        s[lo] + frac * (s[(lo + 1).min(n - 1)] - s[lo])
    };
    let iqr = q(0.75) - q(0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if spread > 0.0 {
        0.9 * spread * (n as f64).powf(-0.2)
    } else {
        1.0
    }
}

/// Gaussian kernel density estimate of `samples` at each point of `at`.
pub fn kde(samples: &[f64], bandwidth: f64, at: &[f64]) -> Vec<f64> {
    let norm = 1.0 / (samples.len().max(1) as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    at.iter()
        .map(|&x| {
            samples
                .iter()
                .map(|&xi| (-0.5 * ((x - xi) / bandwidth).powi(2)).exp())
                .sum::<f64>()
                * norm
        })
        .collect()
}

struct Svg {
    body: String,
    width: f64,
    height: f64,
}

impl Svg {
    fn new(width: f64, height: f64) -> Self {
        Self {
            body: String::new(),
            width,
            height,
        }
    }

    fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" text-anchor="{anchor}" font-family="sans-serif">{s}</text>"#
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, w: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{w}"/>"#
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, fill: &str, w: f64) {
        let mut p = String::new();
        for (x, y) in pts {
            let _ = write!(p, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" stroke="{stroke}" fill="{fill}" stroke-width="{w}"/>"#,
            p.trim_end()
        );
    }

    fn polygon(&mut self, pts: &[(f64, f64)], stroke: &str, fill: &str) {
        let mut p = String::new();
        for (x, y) in pts {
            let _ = write!(p, "{x:.3},{y:.3} ");
        }
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" stroke="{stroke}" fill="{fill}" stroke-width="0.02"/>"#,
            p.trim_end()
        );
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Frame with a y axis from `lo` to `hi`, ticks every `step`. Returns the
/// value-to-pixel map.
#[derive(Clone, Copy)]
struct Frame {
    left: f64,
    top: f64,
    w: f64,
    h: f64,
}

fn axes(svg: &mut Svg, frame: Frame, lo: f64, hi: f64, label: &str) -> impl Fn(f64) -> f64 {
    let Frame { left, top, w, h } = frame;
    svg.line(left, top, left, top + h, "black", 1.0);
    svg.line(left, top + h, left + w, top + h, "black", 1.0);
    let map = move |v: f64| top + h - (v - lo) / (hi - lo) * h;
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let y = map(v);
        svg.line(left - 4.0, y, left, y, "black", 1.0);
        svg.text(left - 6.0, y + 4.0, 10.0, "end", &format!("{v:.2}"));
    }
    svg.text(left - 40.0, top + h / 2.0, 11.0, "middle", label);
    map
}

/// Violin plot of normalized energy loss per navigator, one panel per
/// concentration.
fn energy_violin(rows: &[SummaryRow], records: &[TrialRecord]) -> String {
    let mut concentrations: Vec<f64> = rows.iter().map(|r| r.concentration).collect();
    concentrations.dedup();
    let panel_w = 260.0;
    let (left, top, h) = (70.0, 40.0, 300.0);
    let width = left + panel_w * concentrations.len().max(1) as f64 + 20.0;
    let mut svg = Svg::new(width, top + h + 70.0);
    svg.text(
        width / 2.0,
        20.0,
        14.0,
        "middle",
        "Ship kinetic energy loss (normalized by straight)",
    );
    let values: Vec<f64> = records.iter().filter_map(|r| r.normalized_energy_loss).collect();
    if values.is_empty() {
        let _ = axes(
            &mut svg,
            Frame {
                left,
                top,
                w: panel_w,
                h,
            },
            0.0,
            1.0,
            "normalized loss",
        );
        svg.text(left + panel_w / 2.0, top + h / 2.0, 16.0, "middle", "no data");
        return svg.finish();
    }
    let hi = values.iter().copied().fold(1.0, f64::max) * 1.1;
    for (ci, &c) in concentrations.iter().enumerate() {
        let x0 = left + ci as f64 * panel_w;
        let map = axes(
            &mut svg,
            Frame {
                left: x0,
                top,
                w: panel_w - 20.0,
                h,
            },
            0.0,
            hi,
            if ci == 0 { "normalized loss" } else { "" },
        );
        svg.text(
            x0 + (panel_w - 20.0) / 2.0,
            top + h + 45.0,
            12.0,
            "middle",
            &format!("concentration {c}"),
        );
        let navs: Vec<NavigatorKind> = NavigatorKind::ALL
            .into_iter()
            .filter(|k| rows.iter().any(|r| r.concentration == c && r.navigator == *k))
            .collect();
        let slot = (panel_w - 20.0) / navs.len().max(1) as f64;
        for (ni, &k) in navs.iter().enumerate() {
            let cx = x0 + slot * (ni as f64 + 0.5);
            svg.text(cx, top + h + 18.0, 10.0, "middle", k.name());
            let mut v: Vec<f64> = records
                .iter()
                .filter(|r| r.concentration == c && r.navigator == k)
                .filter_map(|r| r.normalized_energy_loss)
                .collect();
            if v.is_empty() {
                svg.text(cx, top + h / 2.0, 10.0, "middle", "no data");
                continue;
            }
            v.sort_by(f64::total_cmp);
            let bw = silverman_bandwidth(&v).max(1e-3 * hi);
            let (lo_v, hi_v) = (v[0], v[v.len() - 1]);
            let ys: Vec<f64> = (0..=60).map(|i| lo_v + (hi_v - lo_v) * i as f64 / 60.0).collect();
            let dens = kde(&v, bw, &ys);
            let peak = dens.iter().copied().fold(f64::MIN_POSITIVE, f64::max);
            let half = 0.4 * slot;
            let mut outline: Vec<(f64, f64)> = ys
                .iter()
                .zip(&dens)
                .map(|(&y, &d)| (cx + d / peak * half, map(y)))
                .collect();
            outline.extend(
                ys.iter()
                    .zip(&dens)
                    .rev()
                    .map(|(&y, &d)| (cx - d / peak * half, map(y))),
            );
            svg.polyline(&outline, color(k), color(k), 1.0);
            let med = v[v.len() / 2];
            let med = if v.len().is_multiple_of(2) {
                0.5 * (v[v.len() / 2 - 1] + med)
            } else {
                med
            };
            svg.line(cx - half, map(med), cx + half, map(med), "black", 1.5);
        }
        if navs.is_empty() {
            svg.text(x0 + panel_w / 2.0, top + h / 2.0, 14.0, "middle", "no data");
        }
    }
    svg.finish()
}

/// Density of collided-floe mass over the batch mean floe mass, one curve per navigator.
fn mass_density(records: &[TrialRecord]) -> String {
    let (left, top, w, h) = (70.0, 40.0, 500.0, 300.0);
    let mut svg = Svg::new(left + w + 160.0, top + h + 60.0);
    svg.text(
        left + w / 2.0,
        20.0,
        14.0,
        "middle",
        "Collided ice mass (dimensionless)",
    );
    let scale = {
        let m: Vec<f64> = records
            .iter()
            .map(|r| r.scenario_mean_floe_mass)
            .filter(|m| *m > 0.0)
            .collect();
        if m.is_empty() {
            1.0
        } else {
            m.iter().sum::<f64>() / m.len() as f64
        }
    };
    let by_nav: Vec<(NavigatorKind, Vec<f64>)> = NavigatorKind::ALL
        .into_iter()
        .filter(|k| records.iter().any(|r| r.navigator == *k))
        .map(|k| {
            let v: Vec<f64> = records
                .iter()
                .filter(|r| r.navigator == k)
                .flat_map(|r| r.collision_masses.iter().map(|m| m / scale))
                .collect();
            (k, v)
        })
        .collect();
    let all: Vec<f64> = by_nav.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    if all.is_empty() {
        let _ = axes(&mut svg, Frame { left, top, w, h }, 0.0, 1.0, "density");
        svg.text(left + w / 2.0, top + h / 2.0, 16.0, "middle", "no data");
        return svg.finish();
    }
    let x_hi = all.iter().copied().fold(0.0, f64::max) * 1.1 + 1e-9;
    let xs: Vec<f64> = (0..=200).map(|i| x_hi * i as f64 / 200.0).collect();
    let curves: Vec<(NavigatorKind, Vec<f64>)> = by_nav
        .iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(k, v)| (*k, kde(v, silverman_bandwidth(v), &xs)))
        .collect();
    let y_hi = curves.iter().flat_map(|(_, d)| d.iter().copied()).fold(0.0, f64::max) * 1.1 + 1e-12;
    let map_y = axes(&mut svg, Frame { left, top, w, h }, 0.0, y_hi, "density");
    let map_x = |x: f64| left + x / x_hi * w;
    for k in 0..=4 {
        let x = x_hi * k as f64 / 4.0;
        svg.text(map_x(x), top + h + 16.0, 10.0, "middle", &format!("{x:.2}"));
    }
    svg.text(left + w / 2.0, top + h + 40.0, 11.0, "middle", "mass / mean floe mass");
    for (i, (k, d)) in curves.iter().enumerate() {
        let pts: Vec<(f64, f64)> = xs.iter().zip(d).map(|(&x, &y)| (map_x(x), map_y(y))).collect();
        svg.polyline(&pts, color(*k), "none", 2.0);
        let ly = top + 20.0 + 18.0 * i as f64;
        svg.line(left + w + 20.0, ly, left + w + 45.0, ly, color(*k), 2.0);
        svg.text(left + w + 50.0, ly + 4.0, 11.0, "start", k.name());
    }
    svg.finish()
}

/// Channel, floes at their initial positions, and the executed ship tracks.
pub fn trajectory_svg(scenario: &Scenario, tracks: &[(NavigatorKind, Vec<TrajectorySample>)]) -> String {
    let ch = scenario.channel;
    let px = 10.0;
    let margin = 20.0;
    let (w, h) = (ch.width * px + 2.0 * margin + 120.0, ch.length * px + 2.0 * margin);
    let mut svg = Svg::new(w, h);
    let map = |x: f64, y: f64| (margin + x * px, margin + (ch.length - y) * px);
    let (x0, y0) = map(0.0, 0.0);
    let (x1, y1) = map(ch.width, ch.length);
    svg.polyline(
        &[(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)],
        "black",
        "#eef5fb",
        1.0,
    );
    let (gx0, gy) = map(0.0, ch.goal_y);
    let (gx1, _) = map(ch.width, ch.goal_y);
    svg.line(gx0, gy, gx1, gy, "#c00", 1.0);
    for f in &scenario.floes {
        let pts: Vec<(f64, f64)> = f.shape.vertices().iter().map(|v| map(v.x, v.y)).collect();
        svg.polygon(&pts, "#8aa", "#cfdde6");
    }
    for (i, (k, samples)) in tracks.iter().enumerate() {
        let stride = (samples.len() / 2000).max(1);
        let pts: Vec<(f64, f64)> = samples.iter().step_by(stride).map(|s| map(s.x, s.y)).collect();
        svg.polyline(&pts, color(*k), "none", 1.5);
        let ly = margin + 20.0 + 18.0 * i as f64;
        svg.line(x1 + 10.0, ly, x1 + 30.0, ly, color(*k), 2.0);
        svg.text(x1 + 35.0, ly + 4.0, 11.0, "start", k.name());
    }
    if tracks.is_empty() {
        svg.text((x0 + x1) / 2.0, (y0 + y1) / 2.0, 14.0, "middle", "no data");
    }
    svg.finish()
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, PlotError> {
    std::fs::write(&path, text).map_err(|source| PlotError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// A named scenario with the tracks to draw over it.
pub type Overlay = (String, Scenario, Vec<(NavigatorKind, Vec<TrajectorySample>)>);

/// Writes `energy_violin.svg`, `collision_mass_density.svg` and one
/// `trajectories_<name>.svg` per overlay into `out_dir`.
pub fn emit_plots(
    rows: &[SummaryRow],
    records: &[TrialRecord],
    overlays: &[Overlay],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, PlotError> {
    std::fs::create_dir_all(out_dir).map_err(|source| PlotError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut files = vec![
        write(out_dir.join("energy_violin.svg"), &energy_violin(rows, records))?,
        write(out_dir.join("collision_mass_density.svg"), &mass_density(records))?,
    ];
    for (name, scenario, tracks) in overlays {
        files.push(write(
            out_dir.join(format!("trajectories_{name}.svg")),
            &trajectory_svg(scenario, tracks),
        )?);
    }
    Ok(files)
}
