//! Minimal SVG plots of the emitted tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::csv_out::{scenario_hash, Record};
use crate::experiments::{PreviewTable, ScenarioKind, ScenarioSpec, SweepRecord};
use crate::propagator::TraceRecord;
use crate::pulses::mhz_from_angular;
use crate::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Canvas {
    body: String,
    x: (f64, f64),
    y: (f64, f64),
    legend: usize,
}

impl Canvas {
    fn new(title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) -> Self {
        let x = widen(x);
        let y = widen(y);
        let mut c = Canvas {
            body: String::new(),
            x,
            y,
            legend: 0,
        };
        let (x0, y0, x1, y1) = (LEFT, TOP, WIDTH - RIGHT, HEIGHT - BOTTOM);
        let _ = writeln!(
            c.body,
            r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y1 - y0
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = x.0 + f * (x.1 - x.0);
            let yv = y.0 + f * (y.1 - y.0);
            let (px, py) = (c.px(xv), c.py(yv));
            let _ = writeln!(
                c.body,
                r#"<line x1="{px:.2}" y1="{y1}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle" font-size="11">{}</text>"#,
                y1 + 5.0,
                y1 + 18.0,
                tick(xv)
            );
            let _ = writeln!(
                c.body,
                r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            c.body,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            (x0 + x1) / 2.0,
            escape(title)
        );
        let _ = writeln!(
            c.body,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 15.0,
            escape(x_label)
        );
        let _ = writeln!(
            c.body,
            r#"<text x="18" y="{0}" text-anchor="middle" font-size="12" transform="rotate(-90 18 {0})">{1}</text>"#,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
        c
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let y = y.clamp(self.y.0, self.y.1);
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    fn polyline(&mut self, xs: &[f64], ys: &[f64], label: &str) {
        let color = COLORS[self.legend % COLORS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 15.0 + 18.0 * self.legend as f64;
        let lx = WIDTH - RIGHT + 10.0;
        let _ = writeln!(
            self.body,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-size="11">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(label)
        );
        self.legend += 1;
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn widen((lo, hi): (f64, f64)) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

pub fn trace_svg(rec: &TraceRecord) -> String {
    let mut c = Canvas::new(
        "Level populations",
        "t (μs)",
        "population",
        range(rec.times.iter().copied()),
        (0.0, 1.0),
    );
    for (level, label) in ["|0⟩", "|−1⟩", "|+1⟩"].iter().enumerate() {
        let ys: Vec<f64> = rec.populations.iter().map(|p| p[level]).collect();
        c.polyline(&rec.times, &ys, label);
    }
    c.finish()
}

pub fn sweep_svg(rec: &SweepRecord) -> String {
    let ts = &rec.axes[0].values;
    let mut c = Canvas::new(
        "Transfer efficiency",
        "T (μs)",
        "efficiency",
        range(ts.iter().copied()),
        (0.0, 1.0),
    );
    for s in &rec.series {
        c.polyline(ts, &s.efficiency, s.protocol.name());
    }
    c.finish()
}

/// Heat map of one protocol over the (σ, δt) grid, both axes in μs.
pub fn grid_svg(rec: &SweepRecord, series: usize) -> String {
    let s = &rec.series[series];
    let sigmas = &rec.axes[0].values;
    let ratios = &rec.axes[1].values;
    let half = |v: &[f64], i: usize| -> (f64, f64) {
        let step = if v.len() > 1 { v[1] - v[0] } else { 0.1 };
        (v[i] - step / 2.0, v[i] + step / 2.0)
    };
    let r_lo = half(ratios, 0).0;
    let r_hi = half(ratios, ratios.len() - 1).1;
    let s_lo = half(sigmas, 0).0;
    let s_hi = half(sigmas, sigmas.len() - 1).1;
    let mut c = Canvas::new(
        &format!("Efficiency, {}", s.protocol.name()),
        "σ (μs)",
        "δt (μs)",
        (s_lo, s_hi),
        (r_lo.min(0.0) * s_hi, r_hi * s_hi),
    );
    for (i, &sigma) in sigmas.iter().enumerate() {
        let (x0, x1) = half(sigmas, i);
        for j in 0..ratios.len() {
            let (r0, r1) = half(ratios, j);
            let eff = s.efficiency[i * ratios.len() + j];
            let (px0, px1) = (c.px(x0), c.px(x1));
            let (py0, py1) = (c.py(r1 * sigma), c.py(r0 * sigma));
            let _ = writeln!(
                c.body,
                r#"<rect x="{px0:.2}" y="{py0:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>σ={} δt={} eff={}</title></rect>"#,
                px1 - px0,
                py1 - py0,
                heat(eff),
                tick(sigma),
                tick(ratios[j] * sigma),
                tick(eff)
            );
        }
    }
    // colour key
    let _ = writeln!(
        c.body,
        r#"<text x="{}" y="{}" font-size="11">efficiency: 0 → 1</text>"#,
        WIDTH - RIGHT + 10.0,
        TOP + 10.0
    );
    for k in 0..=10 {
        let v = k as f64 / 10.0;
        let _ = writeln!(
            c.body,
            r#"<line x1="{0}" y1="{1:.1}" x2="{2}" y2="{1:.1}" stroke="{3}" stroke-width="12"/>"#,
            WIDTH - RIGHT + 10.0,
            TOP + 30.0 + 12.0 * (10 - k) as f64,
            WIDTH - RIGHT + 30.0,
            heat(v)
        );
    }
    c.finish()
}

/// Blue (0) to yellow (1), clamped.
fn heat(v: f64) -> String {
    let v = if v.is_finite() {
        v.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let lerp = |a: f64, b: f64| (a + (b - a) * v).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(40.0, 250.0),
        lerp(30.0, 230.0),
        lerp(120.0, 40.0)
    )
}

pub fn preview_svg(rec: &PreviewTable) -> String {
    let mhz = |v: &[f64]| -> Vec<f64> { v.iter().map(|&w| mhz_from_angular(w)).collect() };
    let omega_s = mhz(&rec.omega_s);
    let omega_p = mhz(&rec.omega_p);
    let omega_a = rec.abs_omega_a.as_deref().map(mhz);
    let top = range(
        omega_s
            .iter()
            .chain(&omega_p)
            .chain(omega_a.iter().flatten())
            .copied(),
    )
    .1;
    let mut c = Canvas::new(
        "Pulse envelopes",
        "t (μs)",
        "Ω/2π (MHz)",
        range(rec.times.iter().copied()),
        (0.0, top.max(1e-12)),
    );
    c.polyline(&rec.times, &omega_s, "Ω_S");
    c.polyline(&rec.times, &omega_p, "Ω_P");
    if let Some(a) = &omega_a {
        c.polyline(&rec.times, a, "|Ω_a|");
    }
    c.finish()
}

/// Renders `record` next to its CSV; grids give one file per protocol.
pub fn emit_plot(dir: &Path, record: Record<'_>, spec: &ScenarioSpec) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let slug = record.slug();
    let stem = format!("{slug}-{}", scenario_hash(slug, spec));
    let files: Vec<(String, String)> = match record {
        Record::Trace(r) => vec![(format!("{stem}.svg"), trace_svg(r))],
        Record::Preview(r) => vec![(format!("{stem}.svg"), preview_svg(r))],
        Record::Sweep(r) if r.kind == ScenarioKind::RobustnessGrid => (0..r.series.len())
            .map(|i| {
                (
                    format!("{stem}-{}.svg", r.series[i].protocol.name()),
                    grid_svg(r, i),
                )
            })
            .collect(),
        Record::Sweep(r) => vec![(format!("{stem}.svg"), sweep_svg(r))],
    };
    files
        .into_iter()
        .map(|(name, svg)| {
            let path = dir.join(name);
            fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
