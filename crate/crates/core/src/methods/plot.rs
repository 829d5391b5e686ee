use std::fmt::Write as _;

use serde::Serialize;

use super::{stats, Matrix, MethodError};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    Scatter,
    Line,
    Boxplot,
    Heatmap,
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::Scatter => "scatter",
            PlotKind::Line => "line",
            PlotKind::Boxplot => "boxplot",
            PlotKind::Heatmap => "heatmap",
        }
    }
}

/// Grid of plot slots, filled left to right, top to bottom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanvasState {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub next: usize,
}

impl CanvasState {
    pub fn new(name: impl Into<String>, rows: i64, cols: i64) -> Result<Self, MethodError> {
        if rows < 1 || cols < 1 {
            return Err(MethodError::BadLayout { rows, cols });
        }
        Ok(CanvasState {
            name: name.into(),
            rows: rows as usize,
            cols: cols as usize,
            next: 0,
        })
    }

    /// Claims the next free (row, col).
    pub fn allocate(&mut self) -> Result<(usize, usize), MethodError> {
        if self.next >= self.rows * self.cols {
            return Err(MethodError::CanvasOverflow {
                name: self.name.clone(),
                rows: self.rows,
                cols: self.cols,
            });
        }
        let slot = (self.next / self.cols, self.next % self.cols);
        self.next += 1;
        Ok(slot)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotArtifact {
    pub svg: String,
    pub kind: PlotKind,
    pub slot: (usize, usize),
    pub title: String,
}

/// Data for one plot.
#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    Xy(&'a [f64], &'a [f64]),
    Single(&'a [f64]),
    Grid(&'a Matrix),
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// Linear map from data space to pixel space.
struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(v: &[f64], from: f64, to: f64) -> Self {
        let (lo, hi) = bounds(v);
        Scale { lo, hi, from, to }
    }

    fn at(&self, x: f64) -> f64 {
        self.from + (x - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn header(out: &mut String, title: &str, kind: PlotKind) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-kind="{}">"#,
        kind.as_str()
    );
    let _ = write!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = write!(out, r#"<line x1="{l:.3}" y1="{b:.3}" x2="{r:.3}" y2="{b:.3}" stroke="black"/>"#);
    let _ = write!(out, r#"<line x1="{l:.3}" y1="{t:.3}" x2="{l:.3}" y2="{b:.3}" stroke="black"/>"#);
}

fn arity(kind: PlotKind, detail: &str) -> MethodError {
    MethodError::ArityMismatch(format!("{} plot {detail}", kind.as_str()))
}

/// Renders into the canvas's next free slot. Output depends only on the
/// arguments.
pub fn render_plot(kind: PlotKind, data: PlotData<'_>, title: &str, canvas: &mut CanvasState) -> Result<PlotArtifact, MethodError> {
    let mut svg = String::new();
    header(&mut svg, title, kind);
    match (kind, data) {
        (PlotKind::Scatter | PlotKind::Line, PlotData::Xy(x, y)) => {
            if x.len() != y.len() {
                return Err(arity(kind, &format!("needs equal-length vectors, got {} and {}", x.len(), y.len())));
            }
            if x.is_empty() {
                return Err(MethodError::EmptyVector);
            }
            axes(&mut svg);
            let sx = Scale::new(x, MARGIN, WIDTH - MARGIN);
            let sy = Scale::new(y, HEIGHT - MARGIN, MARGIN);
            if kind == PlotKind::Scatter {
                for (a, b) in x.iter().zip(y) {
                    let _ = write!(svg, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="steelblue"/>"#, sx.at(*a), sy.at(*b));
                }
            } else {
                let pts: Vec<String> = x.iter().zip(y).map(|(a, b)| format!("{:.3},{:.3}", sx.at(*a), sy.at(*b))).collect();
                let _ = write!(svg, r#"<polyline points="{}" fill="none" stroke="steelblue"/>"#, pts.join(" "));
            }
        }
        (PlotKind::Boxplot, PlotData::Single(v)) => {
            let q = [0.0, 25.0, 50.0, 75.0, 100.0]
                .iter()
                .map(|&p| stats::percentile(v, p))
                .collect::<Result<Vec<_>, _>>()?;
            axes(&mut svg);
            let s = Scale::new(&q, HEIGHT - MARGIN, MARGIN);
            let (cx, half) = (WIDTH / 2.0, 60.0);
            let (y_min, y_q1, y_med, y_q3, y_max) = (s.at(q[0]), s.at(q[1]), s.at(q[2]), s.at(q[3]), s.at(q[4]));
            let _ = write!(svg, r#"<line x1="{cx:.3}" y1="{y_min:.3}" x2="{cx:.3}" y2="{y_q1:.3}" stroke="black"/>"#);
            let _ = write!(svg, r#"<line x1="{cx:.3}" y1="{y_q3:.3}" x2="{cx:.3}" y2="{y_max:.3}" stroke="black"/>"#);
            let _ = write!(
                svg,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="lightsteelblue" stroke="black"/>"#,
                cx - half,
                y_q3,
                2.0 * half,
                y_q1 - y_q3
            );
            for y in [y_min, y_med, y_max] {
                let _ = write!(svg, r#"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="black"/>"#, cx - half, cx + half);
            }
        }
        (PlotKind::Heatmap, PlotData::Grid(m)) => {
            if m.rows() == 0 || m.cols() == 0 {
                return Err(MethodError::EmptyVector);
            }
            let lo = m.data().iter().copied().fold(f64::INFINITY, f64::min);
            let hi = m.data().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w = (WIDTH - 2.0 * MARGIN) / m.cols() as f64;
            let h = (HEIGHT - 2.0 * MARGIN) / m.rows() as f64;
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let g = gray(m.get(i, j), lo, hi);
                    let _ = write!(
                        svg,
                        r#"<rect x="{:.3}" y="{:.3}" width="{w:.3}" height="{h:.3}" fill="rgb({g},{g},{g})"/>"#,
                        MARGIN + w * j as f64,
                        MARGIN + h * i as f64
                    );
                }
            }
        }
        (_, PlotData::Xy(..)) => return Err(arity(kind, "does not take two vectors")),
        (_, PlotData::Single(_)) => return Err(arity(kind, "does not take a single vector")),
        (_, PlotData::Grid(_)) => return Err(arity(kind, "does not take a matrix")),
    }
    svg.push_str("</svg>\n");
    let slot = canvas.allocate()?;
    Ok(PlotArtifact {
        svg,
        kind,
        slot,
        title: title.to_owned(),
    })
}

/// Grayscale level for `v` on a linear ramp from `lo` (black) to `hi`
/// (white); 128 when the range is degenerate.
pub fn gray(v: f64, lo: f64, hi: f64) -> u8 {
    if hi > lo {
        (255.0 * (v - lo) / (hi - lo)).round() as u8
    } else {
        128
    }
}
