//! SVG figures, each written next to a CSV with the plotted numbers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::analyze::{MetaModelReport, RankingReport, SobolReport};
use super::{fmt_f64, io_err, read_json_file, write_atomic, CampaignError};
use crate::analysis::{OatRanking, SobolResult};
use crate::sampling::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Sobol,
    Oat,
    Ranking,
    Surface,
}

impl std::str::FromStr for PlotKind {
    type Err = CampaignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sobol" => Ok(PlotKind::Sobol),
            "oat" => Ok(PlotKind::Oat),
            "ranking" => Ok(PlotKind::Ranking),
            "surface" => Ok(PlotKind::Surface),
            _ => Err(CampaignError::Invalid(format!("unknown plot kind {s:?}"))),
        }
    }
}

/// Reads the report at `input` and writes the figures of `kind` into `out_dir`.
///
/// `sobol` reads `analysis.json`, `oat` and `ranking` read `ranking.json`,
/// `surface` reads `metamodel.json`. Returns the files written.
pub fn emit_plots(kind: PlotKind, input: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    if !input.exists() {
        return Err(CampaignError::Invalid(format!("{} does not exist", input.display())));
    }
    match kind {
        PlotKind::Sobol => plot_sobol(&read_json_file::<SobolReport>(input)?.results, out_dir),
        PlotKind::Oat => plot_oat(&read_json_file::<RankingReport>(input)?.ranking, out_dir),
        PlotKind::Ranking => plot_ranking(&read_json_file::<RankingReport>(input)?.ranking, out_dir),
        PlotKind::Surface => plot_surface(&read_json_file::<MetaModelReport>(input)?, out_dir),
    }
}

// ---------------------------------------------------------------- svg bits

const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Svg {
    w: f64,
    h: f64,
    body: String,
}

impl Svg {
    fn new(w: f64, h: f64) -> Self {
        Self { w, h, body: String::new() }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#);
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        let p: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            p.join(" ")
        );
    }

    fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r}" fill="{fill}"/>"#);
    }

    fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            esc(s)
        );
    }

    fn vtext(&mut self, x: f64, y: f64, s: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text transform="translate({x:.2},{y:.2}) rotate(-90)" font-family="sans-serif" font-size="{size}" text-anchor="middle">{}</text>"#,
            esc(s)
        );
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.w,
            h = self.h
        )
    }
}

#[derive(Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn new(d0: f64, d1: f64, r0: f64, r1: f64) -> Self {
        let (d0, d1) = if d1 > d0 { (d0, d1) } else { (d0 - 0.5, d0 + 0.5) };
        Self { d0, d1, r0, r1 }
    }

    fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() * step;
    (0..)
        .map(|i| first + i as f64 * step)
        .take_while(|t| *t <= hi + step * 1e-9)
        .map(|t| if t.abs() < step * 1e-9 { 0.0 } else { t })
        .collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Plot frame with axes, ticks and labels; returns the x and y scales.
struct Frame {
    x: Scale,
    y: Scale,
}

const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn frame(svg: &mut Svg, title: &str, xr: (f64, f64), yr: (f64, f64), xlabel: &str, ylabel: &str, xticks: bool) -> Frame {
    let (x0, x1) = (LEFT, svg.w - RIGHT);
    let (y0, y1) = (svg.h - BOTTOM, TOP);
    let x = Scale::new(xr.0, xr.1, x0, x1);
    let y = Scale::new(yr.0, yr.1, y0, y1);
    svg.text(svg.w / 2.0, 22.0, title, "middle", 15.0);
    svg.line(x0, y0, x1, y0, "black", 1.0);
    svg.line(x0, y0, x0, y1, "black", 1.0);
    for t in ticks(y.d0, y.d1) {
        let py = y.map(t);
        svg.line(x0 - 4.0, py, x0, py, "black", 1.0);
        svg.line(x0, py, x1, py, "#e0e0e0", 0.5);
        svg.text(x0 - 6.0, py + 4.0, &tick_label(t), "end", 11.0);
    }
    if xticks {
        for t in ticks(x.d0, x.d1) {
            let px = x.map(t);
            svg.line(px, y0, px, y0 + 4.0, "black", 1.0);
            svg.text(px, y0 + 16.0, &tick_label(t), "middle", 11.0);
        }
    }
    svg.text((x0 + x1) / 2.0, svg.h - 15.0, xlabel, "middle", 12.0);
    svg.vtext(18.0, (y0 + y1) / 2.0, ylabel, 12.0);
    Frame { x, y }
}

fn legend(svg: &mut Svg, entries: &[(&str, &str)]) {
    let x = svg.w - RIGHT + 12.0;
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        svg.rect(x, y - 9.0, 12.0, 10.0, color);
        svg.text(x + 17.0, y, label, "start", 11.0);
    }
}

/// Five-stop viridis approximation on `t ∈ [0, 1]`.
fn ramp(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] =
        [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let pos = t * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let c = |u: f64, v: f64| (u + (v - u) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(a.0, b.0), c(a.1, b.1), c(a.2, b.2))
}

fn write_pair(dir: &Path, stem: &str, svg: Svg, csv: String, out: &mut Vec<PathBuf>) -> Result<(), CampaignError> {
    let s = dir.join(format!("{stem}.svg"));
    let c = dir.join(format!("{stem}.csv"));
    write_atomic(&s, svg.finish().as_bytes())?;
    write_atomic(&c, csv.as_bytes())?;
    out.push(s);
    out.push(c);
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), CampaignError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

// ---------------------------------------------------------------- figures

/// Paired S1/ST bars with confidence whiskers, one figure per metric.
pub fn plot_sobol(results: &[SobolResult], dir: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    if results.is_empty() {
        return Err(CampaignError::Invalid("no Sobol results to plot".into()));
    }
    ensure_dir(dir)?;
    let mut out = Vec::new();
    for r in results {
        let mut csv = String::from("factor,s1,s1_conf,st,st_conf\n");
        for f in &r.factors {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                f.factor,
                fmt_f64(f.s1),
                fmt_f64(f.s1_conf),
                fmt_f64(f.st),
                fmt_f64(f.st_conf)
            );
        }
        let hi = r
            .factors
            .iter()
            .map(|f| (f.s1 + f.s1_conf).max(f.st + f.st_conf))
            .fold(1.0f64, f64::max);
        let lo = r.factors.iter().map(|f| (f.s1 - f.s1_conf).min(f.st - f.st_conf)).fold(0.0f64, f64::min);
        let k = r.factors.len().max(1);
        let mut svg = Svg::new(140.0 + RIGHT + 90.0 * k as f64, 380.0);
        let fr = frame(&mut svg, &format!("Sobol indices: {}", r.metric), (0.0, k as f64), (lo, hi), "factor", "index", false);
        let slot = fr.x.map(1.0) - fr.x.map(0.0);
        let bw = slot * 0.3;
        for (i, f) in r.factors.iter().enumerate() {
            let cx = fr.x.map(i as f64 + 0.5);
            for (j, (v, c, color)) in [(f.s1, f.s1_conf, PALETTE[0]), (f.st, f.st_conf, PALETTE[1])].into_iter().enumerate() {
                let x = cx - bw + j as f64 * bw;
                let (ya, yb) = (fr.y.map(v.max(0.0)), fr.y.map(v.min(0.0)));
                svg.rect(x, ya, bw * 0.95, (yb - ya).max(0.0), color);
                let mx = x + bw * 0.475;
                let (w0, w1) = (fr.y.map(v - c), fr.y.map(v + c));
                svg.line(mx, w0, mx, w1, "black", 1.0);
                svg.line(mx - 4.0, w0, mx + 4.0, w0, "black", 1.0);
                svg.line(mx - 4.0, w1, mx + 4.0, w1, "black", 1.0);
            }
            svg.text(cx, fr.y.r0 + 16.0, &f.factor, "middle", 10.0);
        }
        legend(&mut svg, &[("S1", PALETTE[0]), ("ST", PALETTE[1])]);
        write_pair(dir, &format!("sobol_{}", r.metric), svg, csv, &mut out)?;
    }
    Ok(out)
}

/// Metric value at each factor's min, base and max level, one line per factor.
pub fn plot_oat(ranking: &OatRanking, dir: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    if ranking.metrics.is_empty() {
        return Err(CampaignError::Invalid("no OAT rankings to plot".into()));
    }
    ensure_dir(dir)?;
    let mut out = Vec::new();
    for m in &ranking.metrics {
        let mut csv = String::from("factor,level,value\n");
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &m.ranking {
            for (level, v) in [("min", s.min_value), ("base", s.base_value), ("max", s.max_value)] {
                let _ = writeln!(csv, "{},{level},{}", s.factor, fmt_f64(v));
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        let pad = ((hi - lo) * 0.05).max(1e-9);
        let mut svg = Svg::new(620.0, 380.0);
        let fr = frame(&mut svg, &format!("OAT: {}", m.metric), (-1.0, 1.0), (lo - pad, hi + pad), "factor level (min, base, max)", &m.metric, false);
        for (lbl, x) in [("min", -1.0), ("base", 0.0), ("max", 1.0)] {
            svg.text(fr.x.map(x), fr.y.r0 + 16.0, lbl, "middle", 11.0);
        }
        let mut entries = Vec::new();
        for (i, s) in m.ranking.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = [(-1.0, s.min_value), (0.0, s.base_value), (1.0, s.max_value)]
                .iter()
                .map(|&(x, y)| (fr.x.map(x), fr.y.map(y)))
                .collect();
            svg.polyline(&pts, color, 1.5);
            for (x, y) in &pts {
                svg.circle(*x, *y, 3.0, color);
            }
            entries.push((s.factor.as_str(), color));
        }
        legend(&mut svg, &entries);
        write_pair(dir, &format!("oat_{}", m.metric), svg, csv, &mut out)?;
    }
    Ok(out)
}

/// Heatmap of ranks, factors (by aggregate rank) against metrics.
pub fn plot_ranking(ranking: &OatRanking, dir: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    if ranking.metrics.is_empty() {
        return Err(CampaignError::Invalid("no OAT rankings to plot".into()));
    }
    ensure_dir(dir)?;
    let factors: Vec<&str> = ranking.aggregate.iter().map(|a| a.factor.as_str()).collect();
    let mut csv = String::from("factor");
    for m in &ranking.metrics {
        csv.push(',');
        csv.push_str(&m.metric);
    }
    csv.push_str(",mean_rank\n");
    for a in &ranking.aggregate {
        csv.push_str(&a.factor);
        for m in &ranking.metrics {
            csv.push(',');
            if let Some(r) = ranking.rank_of(&m.metric, &a.factor) {
                csv.push_str(&r.to_string());
            }
        }
        let _ = writeln!(csv, ",{}", fmt_f64(a.mean_rank));
    }

    let (cw, ch) = (90.0, 28.0);
    let (x0, y0) = (170.0, 110.0);
    let cols = ranking.metrics.len() + 1;
    let mut svg = Svg::new(x0 + cw * cols as f64 + 30.0, y0 + ch * factors.len() as f64 + 30.0);
    svg.text(svg.w / 2.0, 22.0, "OAT ranking (1 = most influential)", "middle", 15.0);
    let max_rank = factors.len().max(2) as f64;
    for (j, m) in ranking.metrics.iter().map(|m| m.metric.as_str()).chain(["mean"]).enumerate() {
        let cx = x0 + cw * (j as f64 + 0.5);
        svg.text(cx, y0 - 10.0, m, "middle", 11.0);
    }
    for (i, f) in factors.iter().enumerate() {
        let y = y0 + ch * i as f64;
        svg.text(x0 - 8.0, y + ch * 0.65, f, "end", 11.0);
        let ranks = ranking
            .metrics
            .iter()
            .map(|m| ranking.rank_of(&m.metric, f).map(|r| r as f64))
            .chain([Some(ranking.aggregate[i].mean_rank)]);
        for (j, r) in ranks.enumerate() {
            let x = x0 + cw * j as f64;
            match r {
                Some(r) => {
                    svg.rect(x, y, cw - 1.0, ch - 1.0, &ramp(1.0 - (r - 1.0) / (max_rank - 1.0)));
                    svg.text(x + cw / 2.0, y + ch * 0.65, &tick_label((r * 100.0).round() / 100.0), "middle", 11.0);
                }
                None => svg.rect(x, y, cw - 1.0, ch - 1.0, "#dddddd"),
            }
        }
    }
    let mut out = Vec::new();
    write_pair(dir, "ranking", svg, csv, &mut out)?;
    Ok(out)
}

/// Meta-model curve (one axis) or heatmap with iso-lines (two axes). The CSV
/// holds the model evaluated on the campaign grid, row-major.
pub fn plot_surface(report: &MetaModelReport, dir: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    let model = &report.model;
    if report.grid.len() != model.axes.len() || report.grid.iter().any(Vec::is_empty) {
        return Err(CampaignError::Invalid("meta-model report has no grid".into()));
    }
    ensure_dir(dir)?;
    let stem = format!("surface_{}", report.metric);
    let mut out = Vec::new();
    let mut grid = report.grid.clone();
    for g in &mut grid {
        g.sort_by(f64::total_cmp);
    }
    let rows = model.surface(&grid);
    let names: Vec<&str> = model.axes.iter().map(|a| a.name.as_str()).collect();

    match grid.len() {
        1 => {
            let mut csv = format!("{},{}_hat,{}_observed\n", names[0], report.metric, report.metric);
            for r in &rows {
                let obs: Vec<f64> =
                    report.observations.iter().filter(|o| o.x[0] == r[0]).map(|o| o.y).collect();
                let obs = if obs.is_empty() { String::new() } else { fmt_f64(obs.iter().sum::<f64>() / obs.len() as f64) };
                let _ = writeln!(csv, "{},{},{obs}", fmt_f64(r[0]), fmt_f64(r[1]));
            }
            let axis = &model.axes[0];
            let dense: Vec<(f64, f64)> =
                linspace(axis.min, axis.max, 200).into_iter().map(|x| (x, model.predict(&[x]))).collect();
            let ys = dense.iter().map(|p| p.1).chain(report.observations.iter().map(|o| o.y));
            let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
            let pad = ((hi - lo) * 0.05).max(1e-9);
            let mut svg = Svg::new(620.0, 380.0);
            let fr = frame(
                &mut svg,
                &format!("{} vs {} (degree {})", report.metric, names[0], model.degree),
                (axis.min, axis.max),
                (lo - pad, hi + pad),
                names[0],
                &report.metric,
                true,
            );
            let pts: Vec<(f64, f64)> = dense.iter().map(|&(x, y)| (fr.x.map(x), fr.y.map(y))).collect();
            svg.polyline(&pts, PALETTE[0], 2.0);
            for o in &report.observations {
                svg.circle(fr.x.map(o.x[0]), fr.y.map(o.y), 3.5, PALETTE[1]);
            }
            legend(&mut svg, &[("meta-model", PALETTE[0]), ("simulated", PALETTE[1])]);
            write_pair(dir, &stem, svg, csv, &mut out)?;
        }
        2 => {
            let mut csv = format!("{},{},{}_hat\n", names[0], names[1], report.metric);
            for r in &rows {
                let _ = writeln!(csv, "{},{},{}", fmt_f64(r[0]), fmt_f64(r[1]), fmt_f64(r[2]));
            }
            let (ax, ay) = (&model.axes[0], &model.axes[1]);
            let res = 48;
            let gx = linspace(ax.min, ax.max, res + 1);
            let gy = linspace(ay.min, ay.max, res + 1);
            let z: Vec<Vec<f64>> = gx.iter().map(|&x| gy.iter().map(|&y| model.predict(&[x, y])).collect()).collect();
            let (lo, hi) = z.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let mut svg = Svg::new(620.0, 460.0);
            let fr = frame(
                &mut svg,
                &format!("{} over {} and {} (degree {})", report.metric, names[0], names[1], model.degree),
                (ax.min, ax.max),
                (ay.min, ay.max),
                names[0],
                names[1],
                true,
            );
            let span = if hi > lo { hi - lo } else { 1.0 };
            let cell_w = (fr.x.map(gx[1]) - fr.x.map(gx[0])).abs();
            let cell_h = (fr.y.map(gy[1]) - fr.y.map(gy[0])).abs();
            for i in 0..res {
                for j in 0..res {
                    let v = (z[i][j] + z[i + 1][j] + z[i][j + 1] + z[i + 1][j + 1]) / 4.0;
                    svg.rect(fr.x.map(gx[i]), fr.y.map(gy[j + 1]), cell_w + 0.3, cell_h + 0.3, &ramp((v - lo) / span));
                }
            }
            if hi > lo {
                for level in linspace(lo, hi, 10).into_iter().skip(1).take(8) {
                    for (a, b) in iso_segments(&gx, &gy, &z, level) {
                        svg.line(fr.x.map(a.0), fr.y.map(a.1), fr.x.map(b.0), fr.y.map(b.1), "white", 0.8);
                    }
                }
            }
            for o in &report.observations {
                svg.circle(fr.x.map(o.x[0]), fr.y.map(o.x[1]), 2.0, "black");
            }
            // colour bar
            let bx = svg.w - RIGHT + 20.0;
            let (top, bottom) = (fr.y.r1, fr.y.r0);
            let steps = 40;
            for s in 0..steps {
                let t = s as f64 / steps as f64;
                let y = bottom - (bottom - top) * (t + 1.0 / steps as f64);
                svg.rect(bx, y, 16.0, (bottom - top) / steps as f64 + 0.5, &ramp(t));
            }
            svg.text(bx + 20.0, top + 4.0, &tick_label(hi), "start", 10.0);
            svg.text(bx + 20.0, bottom, &tick_label(lo), "start", 10.0);
            svg.text(bx, top - 8.0, &report.metric, "start", 10.0);
            write_pair(dir, &stem, svg, csv, &mut out)?;
        }
        n => return Err(CampaignError::Invalid(format!("cannot draw a {n}-axis surface"))),
    }
    Ok(out)
}

type Pt = (f64, f64);

/// Marching-squares segments of the `level` iso-line of `z[i][j] = f(xs[i], ys[j])`.
fn iso_segments(xs: &[f64], ys: &[f64], z: &[Vec<f64>], level: f64) -> Vec<(Pt, Pt)> {
    let mut segs = Vec::new();
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            let corners = [
                (xs[i], ys[j], z[i][j]),
                (xs[i + 1], ys[j], z[i + 1][j]),
                (xs[i + 1], ys[j + 1], z[i + 1][j + 1]),
                (xs[i], ys[j + 1], z[i][j + 1]),
            ];
            let mut hits = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (corners[e], corners[(e + 1) % 4]);
                let (da, db) = (a.2 - level, b.2 - level);
                if (da < 0.0) != (db < 0.0) {
                    let t = da / (da - db);
                    hits.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
                }
            }
            for pair in hits.chunks_exact(2) {
                segs.push((pair[0], pair[1]));
            }
        }
    }
    segs
}
