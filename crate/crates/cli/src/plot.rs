//! Self-contained SVG charts rendered from saved run files.

use std::fmt::Write as _;

use clap::ValueEnum;
use mgrestore::coordinator::{AlphaSummary, RestorationRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Frequency after each stage's load step, one panel per microgrid.
    FrequencyTrace,
    /// Load picked up per stage, stacked by microgrid.
    RestoredLoadBars,
    /// Cumulative restored load and worst nadir per stage for each gain.
    AlphaComparison,
}

const W: f64 = 760.0;
const H: f64 = 420.0;
const PAD_L: f64 = 70.0;
const PAD_R: f64 = 150.0;
const PAD_T: f64 = 40.0;
const PAD_B: f64 = 55.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Rounded tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() * step;
    (0..)
        .map(|k| first + k as f64 * step)
        .take_while(|v| *v <= hi + step * 1e-9)
        .collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Plot area with linear axes.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    svg: String,
}

impl Frame {
    fn new(title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| if hi - lo < 1e-9 { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        let mut f = Frame { x: pad(x), y: pad(y), svg: String::new() };
        let _ = write!(
            f.svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>
"#,
            (PAD_L + W - PAD_R) / 2.0,
            esc(title)
        );
        f.axes(x_label, y_label);
        f
    }

    fn px(&self, v: f64) -> f64 {
        PAD_L + (v - self.x.0) / (self.x.1 - self.x.0) * (W - PAD_L - PAD_R)
    }

    fn py(&self, v: f64) -> f64 {
        H - PAD_B - (v - self.y.0) / (self.y.1 - self.y.0) * (H - PAD_T - PAD_B)
    }

    fn axes(&mut self, x_label: &str, y_label: &str) {
        let (x0, x1, y0, y1) = (PAD_L, W - PAD_R, PAD_T, H - PAD_B);
        let _ = writeln!(
            self.svg,
            r##"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
            x1 - x0,
            y1 - y0
        );
        for t in ticks(self.x.0, self.x.1, 8) {
            let x = self.px(t);
            let _ = writeln!(
                self.svg,
                r##"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{y0}" stroke="#ddd"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##,
                y1 + 16.0,
                fmt_tick(t)
            );
        }
        for t in ticks(self.y.0, self.y.1, 6) {
            let y = self.py(t);
            let _ = writeln!(
                self.svg,
                r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
                x0 - 6.0,
                y + 4.0,
                fmt_tick(t)
            );
        }
        let _ = writeln!(
            self.svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text><text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            H - 14.0,
            esc(x_label),
            (y0 + y1) / 2.0,
            esc(y_label)
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: &str, dashed: bool) {
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            self.svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>"#,
            coords.join(" ")
        );
    }

    fn marker(&mut self, x: f64, y: f64, color: &str) {
        let _ = writeln!(
            self.svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
            self.px(x),
            self.py(y)
        );
    }

    fn legend(&mut self, entries: &[(String, &str)]) {
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = PAD_T + 10.0 + 18.0 * i as f64;
            let x = W - PAD_R + 12.0;
            let _ = writeln!(
                self.svg,
                r#"<rect x="{x}" y="{}" width="14" height="4" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
                y - 4.0,
                x + 20.0,
                y + 1.0,
                esc(label)
            );
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn bounds<'a>(vals: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Frequency traces of every stage, all microgrids on shared axes.
pub fn frequency_trace_svg(run: &RestorationRun, f_min: Option<f64>) -> String {
    let traces: Vec<_> = run
        .stages
        .iter()
        .flat_map(|s| s.microgrids.iter().map(move |m| (s.stage, m.restoration.microgrid, &m.trace)))
        .collect();
    let t_max = traces.iter().filter_map(|(_, _, t)| t.t.last()).fold(0.0f64, |a, &b| a.max(b));
    let (mut lo, mut hi) = bounds(traces.iter().flat_map(|(_, _, t)| t.f.iter()));
    if let Some(f) = f_min {
        lo = lo.min(f);
    }
    if !lo.is_finite() {
        (lo, hi) = (59.0, 60.0);
    }
    let margin = 0.05 * (hi - lo).max(0.01);
    let mut fr = Frame::new(
        "Frequency response per stage",
        "time after load step (s)",
        "frequency (Hz)",
        (0.0, t_max.max(1e-3)),
        (lo - margin, hi + margin),
    );
    let mut legend = Vec::new();
    for (i, (stage, mg, tr)) in traces.iter().enumerate() {
        let pts: Vec<(f64, f64)> = tr.t.iter().copied().zip(tr.f.iter().copied()).collect();
        let c = color(i);
        fr.polyline(&pts, c, *mg % 2 == 1);
        fr.marker(tr.t_nadir, tr.f_nadir, c);
        legend.push((format!("stage {stage}, MG {mg}"), c));
    }
    if let Some(f) = f_min {
        fr.polyline(&[(0.0, f), (t_max.max(1e-3), f)], "#555", true);
        legend.push((format!("f_min {}", fmt_tick(f)), "#555"));
    }
    fr.legend(&legend);
    fr.finish()
}

/// Stacked bars of load picked up per stage, one colour per microgrid.
pub fn restored_load_bars_svg(run: &RestorationRun) -> String {
    let n_mg = run.stages.iter().map(|s| s.microgrids.len()).max().unwrap_or(0);
    let n = run.stages.len().max(1);
    let top = run
        .stages
        .iter()
        .map(|s| s.microgrids.iter().map(|m| m.restored_delta_kw.max(0.0)).sum::<f64>())
        .fold(0.0f64, f64::max);
    let mut fr = Frame::new(
        "Load restored per stage",
        "stage",
        "restored load (kW)",
        (0.5, n as f64 + 0.5),
        (0.0, (top * 1.1).max(1.0)),
    );
    let half = 0.35;
    for s in &run.stages {
        let mut base = 0.0;
        for m in &s.microgrids {
            let v = m.restored_delta_kw.max(0.0);
            let (x0, x1) = (fr.px(s.stage as f64 - half), fr.px(s.stage as f64 + half));
            let (y0, y1) = (fr.py(base + v), fr.py(base));
            let _ = writeln!(
                fr.svg,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>stage {} MG {}: {:.1} kW</title></rect>"#,
                x1 - x0,
                y1 - y0,
                color(m.restoration.microgrid),
                s.stage,
                m.restoration.microgrid,
                v
            );
            base += v;
        }
    }
    let legend: Vec<_> = (0..n_mg).map(|i| (format!("MG {i}"), color(i))).collect();
    fr.legend(&legend);
    fr.finish()
}

/// Two panels for an alpha sweep: cumulative load and worst nadir per stage.
pub fn alpha_comparison_svg(sweep: &[AlphaSummary]) -> String {
    let n = sweep.iter().map(|s| s.cumulative_kw.len()).max().unwrap_or(1).max(1);
    let kw_top = sweep.iter().flat_map(|s| s.cumulative_kw.iter()).fold(0.0f64, |a, &b| a.max(b));
    let worst: Vec<Vec<f64>> = sweep
        .iter()
        .map(|s| s.nadirs.iter().map(|st| st.iter().copied().fold(f64::INFINITY, f64::min)).collect())
        .collect();
    let (lo, hi) = bounds(worst.iter().flatten().filter(|v| v.is_finite()));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (59.0, 60.0) };
    let legend: Vec<_> = sweep.iter().enumerate().map(|(i, s)| (format!("alpha {}", s.alpha), color(i))).collect();

    let mut top = Frame::new(
        "Cumulative restored load",
        "stage",
        "restored load (kW)",
        (1.0, n as f64),
        (0.0, (kw_top * 1.1).max(1.0)),
    );
    for (i, s) in sweep.iter().enumerate() {
        let pts: Vec<_> = s.cumulative_kw.iter().enumerate().map(|(k, &v)| ((k + 1) as f64, v)).collect();
        top.polyline(&pts, color(i), false);
        for &(x, y) in &pts {
            top.marker(x, y, color(i));
        }
    }
    top.legend(&legend);

    let margin = 0.05 * (hi - lo).max(0.01);
    let mut bottom = Frame::new(
        "Worst frequency nadir",
        "stage",
        "nadir (Hz)",
        (1.0, n as f64),
        (lo - margin, hi + margin),
    );
    for (i, w) in worst.iter().enumerate() {
        let pts: Vec<_> = w.iter().enumerate().map(|(k, &v)| ((k + 1) as f64, v)).collect();
        bottom.polyline(&pts, color(i), false);
        for &(x, y) in &pts {
            bottom.marker(x, y, color(i));
        }
    }
    bottom.legend(&legend);

    // Stack the two single-panel documents into one.
    let inner = |svg: String| {
        let body_start = svg.find('\n').map_or(0, |i| i + 1);
        svg[body_start..].trim_end().trim_end_matches("</svg>").to_string()
    };
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{}" viewBox="0 0 {W} {}" font-family="sans-serif" font-size="12">
{}
<g transform="translate(0 {H})">
{}
</g>
</svg>
"#,
        2.0 * H,
        2.0 * H,
        inner(top.finish()),
        inner(bottom.finish())
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_and_inside() {
        let t = ticks(59.43, 60.02, 6);
        assert!(t.iter().all(|v| (59.43..=60.02 + 1e-9).contains(v)));
        assert!(t.len() >= 3 && t.len() <= 7, "{t:?}");
        assert_eq!(fmt_tick(t[0]), "59.5");
    }

    #[test]
    fn empty_sweep_still_renders() {
        let svg = alpha_comparison_svg(&[]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<svg").count(), 1);
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(esc("a<b & c>"), "a&lt;b &amp; c&gt;");
    }
}
