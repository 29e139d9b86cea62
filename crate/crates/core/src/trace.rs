//! Tracing planar loci as polylines, and writing them out as SVG or CSV.
//!
//! The residual `r(x) = g(x) - c` is sampled on a regular grid and its zero
//! set is extracted by marching squares. Crossings are placed by linear
//! interpolation along cell edges. A cell whose corners alternate in sign
//! is split according to the sign of `r` at the cell centre.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locus::LocusSpec;
use crate::space::GramSpace;

pub const DEFAULT_RESOLUTION: usize = 512;

/// Grid samples that are exactly zero are nudged to this value so every
/// corner has a definite sign.
const ZERO_NUDGE: f64 = 1e-300;

/// Rectangle in coordinate space plus the number of grid cells along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let all_finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !all_finite || !(x_min < x_max) || !(y_min < y_max) {
            return Err(Error::InvalidWindow(format!(
                "need finite bounds with x_min < x_max and y_min < y_max, got [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidWindow(format!("resolution must be at least 2x2, got {nx}x{ny}")));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    fn x(&self, i: usize) -> f64 {
        if i == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    fn y(&self, j: usize) -> f64 {
        if j == self.ny {
            self.y_max
        } else {
            self.y_min + j as f64 * self.dy()
        }
    }

    /// Longest distance between two points of one cell, measured in the
    /// space's own norm.
    pub fn cell_diagonal(&self, space: &GramSpace) -> f64 {
        let (dx, dy) = (self.dx(), self.dy());
        let q = |a: f64, b: f64| {
            (space.entry(0, 0) * a * a + 2.0 * space.entry(0, 1) * a * b + space.entry(1, 1) * b * b).max(0.0).sqrt()
        };
        [q(dx, 0.0), q(0.0, dy), q(dx, dy), q(dx, -dy)].into_iter().fold(0.0, f64::max)
    }
}

/// Ordered vertices of one traced curve piece.
///
/// Closed polylines do not repeat their first vertex at the end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl Polyline {
    /// Euclidean length in coordinates, including the closing edge if closed.
    pub fn length(&self) -> f64 {
        let dist = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
        let open: f64 = self.points.windows(2).map(|w| dist(&w[0], &w[1])).sum();
        match (self.closed, self.points.first(), self.points.last()) {
            (true, Some(first), Some(last)) => open + dist(last, first),
            _ => open,
        }
    }
}

/// Residual of the 2-D locus, specialised to avoid allocation per sample.
struct Field<'a> {
    g: [f64; 3],
    foci: Vec<[f64; 2]>,
    alphas: &'a [f64],
    c: f64,
}

impl Field<'_> {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let mut total = 0.0;
        for (f, a) in self.foci.iter().zip(self.alphas) {
            let (u, v) = (x - f[0], y - f[1]);
            total += a * (self.g[0] * u * u + 2.0 * self.g[1] * u * v + self.g[2] * v * v).max(0.0).sqrt();
        }
        total - self.c
    }
}

/// Traces the zero set of `g - c` inside `window`.
///
/// Every vertex lies on a grid edge whose endpoints straddle the zero set,
/// so its residual is at most `(Σ|αᵢ|)` times [`Window::cell_diagonal`].
pub fn trace_locus(space: &GramSpace, spec: &LocusSpec, window: &Window) -> Result<Vec<Polyline>> {
    if space.dim() != 2 {
        return Err(Error::DimensionNot2D(space.dim()));
    }
    spec.check(space)?;
    let field = Field {
        g: [space.entry(0, 0), space.entry(0, 1), space.entry(1, 1)],
        foci: spec.foci().iter().map(|f| [f.coords()[0], f.coords()[1]]).collect(),
        alphas: spec.alphas(),
        c: spec.c(),
    };

    let (nx, ny) = (window.nx, window.ny);
    let stride = nx + 1;
    let grid: Vec<f64> = (0..=ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let y = window.y(j);
            let field = &field;
            (0..=nx).map(move |i| {
                let r = field.eval(window.x(i), y);
                if r == 0.0 {
                    ZERO_NUDGE
                } else {
                    r
                }
            })
        })
        .collect();
    let at = |i: usize, j: usize| grid[j * stride + i];

    // Edge ids: horizontal edge from (i, j) to (i+1, j) is 2k, vertical edge
    // from (i, j) to (i, j+1) is 2k+1, with k = j * stride + i.
    let h_edge = |i: usize, j: usize| 2 * (j * stride + i);
    let v_edge = |i: usize, j: usize| 2 * (j * stride + i) + 1;
    let crossing = |edge: usize| -> [f64; 2] {
        let k = edge / 2;
        let (i, j) = (k % stride, k / stride);
        let (i2, j2) = if edge.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (at(i, j), at(i2, j2));
        let t = a / (a - b);
        let (x0, y0, x1, y1) = (window.x(i), window.y(j), window.x(i2), window.y(j2));
        [x0 + t * (x1 - x0), y0 + t * (y1 - y0)]
    };

    let mut segments: Vec<[usize; 2]> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let corners = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let pos: [bool; 4] = corners.map(|v| v > 0.0);
            // edges in corner order: bottom (0-1), right (1-2), top (2-3), left (3-0)
            let edges = [h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)];
            let cut: Vec<usize> = (0..4).filter(|&e| pos[e] != pos[(e + 1) % 4]).collect();
            match cut.len() {
                0 => {}
                2 => segments.push([edges[cut[0]], edges[cut[1]]]),
                _ => {
                    let cx = 0.5 * (window.x(i) + window.x(i + 1));
                    let cy = 0.5 * (window.y(j) + window.y(j + 1));
                    let centre = field.eval(cx, cy);
                    let centre_pos = if centre == 0.0 { true } else { centre > 0.0 };
                    if centre_pos == pos[0] {
                        // corners 0 and 2 connect through the centre; isolate 1 and 3
                        segments.push([edges[0], edges[1]]);
                        segments.push([edges[2], edges[3]]);
                    } else {
                        segments.push([edges[3], edges[0]]);
                        segments.push([edges[1], edges[2]]);
                    }
                }
            }
        }
    }

    Ok(stitch(&segments)
        .into_iter()
        .filter_map(|(edges, closed)| {
            let mut points: Vec<[f64; 2]> = Vec::with_capacity(edges.len());
            for e in edges {
                let p = crossing(e);
                if points.last() != Some(&p) {
                    points.push(p);
                }
            }
            if closed && points.len() > 1 && points.first() == points.last() {
                points.pop();
            }
            (points.len() >= 2).then_some(Polyline { points, closed })
        })
        .collect())
}

/// Joins segments sharing an edge into chains of edge ids.
///
/// Open chains (ending on the window boundary) come first, then loops;
/// both in order of their first segment, so the result is deterministic.
fn stitch(segments: &[[usize; 2]]) -> Vec<(Vec<usize>, bool)> {
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for &e in seg {
            incident.entry(e).or_default().push(s);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();

    let walk = |start_seg: usize, start_edge: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut chain = vec![start_edge];
        let (mut seg, mut edge) = (start_seg, start_edge);
        loop {
            used[seg] = true;
            let [a, b] = segments[seg];
            edge = if a == edge { b } else { a };
            if edge == start_edge {
                return (chain, true);
            }
            chain.push(edge);
            match incident[&edge].iter().find(|&&s| !used[s]) {
                Some(&next) => seg = next,
                None => return (chain, false),
            }
        }
    };

    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        if let Some(&end) = segments[s].iter().find(|e| incident[e].len() == 1) {
            chains.push(walk(s, end, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            chains.push(walk(s, segments[s][0], &mut used));
        }
    }
    chains
}

/// SVG document for `polylines`, one `<path>` each, in a `viewBox` of
/// `nx × ny` user units (one unit per grid cell, `y` pointing up).
pub fn render_svg(polylines: &[Polyline], window: &Window) -> String {
    let (w, h) = (window.nx as f64, window.ny as f64);
    let sx = w / (window.x_max - window.x_min);
    let sy = h / (window.y_max - window.y_min);
    let map = |p: &[f64; 2]| ((p[0] - window.x_min) * sx, (window.y_max - p[1]) * sy);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        window.nx, window.ny, window.nx, window.ny
    );
    if polylines.is_empty() {
        out.push_str("<g fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n");
    } else {
        out.push_str("<g fill=\"none\" stroke=\"black\" stroke-width=\"1\">\n");
        for line in polylines {
            out.push_str("<path d=\"");
            for (k, p) in line.points.iter().enumerate() {
                let (x, y) = map(p);
                let _ = write!(out, "{}{:.3} {:.3}", if k == 0 { "M" } else { " L" }, x, y);
            }
            if line.closed {
                out.push_str(" Z");
            }
            out.push_str("\"/>\n");
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_svg(polylines: &[Polyline], window: &Window, path: &Path) -> Result<()> {
    crate::io::write_file(path, render_svg(polylines, window).as_bytes())
}

/// CSV with header `polyline_id,x,y` and 17 significant digits per value.
pub fn render_csv(polylines: &[Polyline]) -> String {
    let mut out = String::from("polyline_id,x,y\n");
    for (id, line) in polylines.iter().enumerate() {
        for p in &line.points {
            let _ = writeln!(out, "{id},{:.16e},{:.16e}", p[0], p[1]);
        }
    }
    out
}

pub fn emit_csv(polylines: &[Polyline], path: &Path) -> Result<()> {
    crate::io::write_file(path, render_csv(polylines).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locus::eval_g;
    use crate::space::Vector;

    fn circle() -> LocusSpec {
        LocusSpec::new(vec![Vector::zeros(2)], vec![1.0], 1.0).unwrap()
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(0.0, 1.0, 0.0, 1.0, 2, 2).is_ok());
        assert!(matches!(Window::new(1.0, 1.0, 0.0, 1.0, 4, 4), Err(Error::InvalidWindow(_))));
        assert!(matches!(Window::new(0.0, 1.0, 0.0, 1.0, 1, 4), Err(Error::InvalidWindow(_))));
        assert!(matches!(Window::new(0.0, f64::NAN, 0.0, 1.0, 4, 4), Err(Error::InvalidWindow(_))));
    }

    #[test]
    fn unit_circle_length() {
        let w = Window::new(-2.0, 2.0, -2.0, 2.0, 256, 256).unwrap();
        let lines = trace_locus(&GramSpace::euclidean(2), &circle(), &w).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        assert!((lines[0].length() - std::f64::consts::TAU).abs() < 0.01);
    }

    #[test]
    fn vertices_respect_lipschitz_bound() {
        let space = GramSpace::new(vec![vec![1.0, 0.5], vec![0.5, 1.0 / 3.0]]).unwrap();
        let spec =
            LocusSpec::new(vec![Vector::from([0.0, 2.0]), Vector::from([0.0, -2.0])], vec![1.0, 1.0], 10.0).unwrap();
        let w = Window::new(-30.0, 30.0, -30.0, 30.0, 200, 200).unwrap();
        let bound = spec.alpha_abs_sum() * w.cell_diagonal(&space);
        let lines = trace_locus(&space, &spec, &w).unwrap();
        assert!(!lines.is_empty());
        for p in lines.iter().flat_map(|l| &l.points) {
            let r = eval_g(&space, &spec, &Vector::from(p.to_vec())).unwrap() - 10.0;
            assert!(r.abs() <= bound, "residual {r} above {bound}");
        }
    }

    #[test]
    fn not_planar() {
        let spec = LocusSpec::new(vec![Vector::zeros(3)], vec![1.0], 1.0).unwrap();
        let w = Window::new(-1.0, 1.0, -1.0, 1.0, 4, 4).unwrap();
        assert!(matches!(trace_locus(&GramSpace::euclidean(3), &spec, &w), Err(Error::DimensionNot2D(3))));
    }

    #[test]
    fn unreachable_level_gives_nothing() {
        let spec =
            LocusSpec::new(vec![Vector::from([4.0, 0.0]), Vector::from([-4.0, 0.0])], vec![1.0, 1.0], 6.0).unwrap();
        let w = Window::new(-8.0, 8.0, -6.0, 6.0, 64, 64).unwrap();
        let lines = trace_locus(&GramSpace::euclidean(2), &spec, &w).unwrap();
        assert!(lines.is_empty());
        assert!(render_svg(&lines, &w).contains("<g fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>"));
        assert_eq!(render_csv(&lines), "polyline_id,x,y\n");
    }

    #[test]
    fn saddle_cell_is_split() {
        // two unit circles touching the centre cell from opposite corners
        let spec = LocusSpec::new(vec![Vector::zeros(2)], vec![1.0], 1.0).unwrap();
        let w = Window::new(-1.5, 1.5, -1.5, 1.5, 3, 3).unwrap();
        let lines = trace_locus(&GramSpace::euclidean(2), &spec, &w).unwrap();
        assert!(lines.iter().all(|l| l.points.len() >= 2));
    }

    #[test]
    fn csv_rows_and_precision() {
        let line = Polyline { points: vec![[0.1, 0.2], [1.0 / 3.0, -2.5], [5.0, 6.0]], closed: false };
        let csv = render_csv(std::slice::from_ref(&line));
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 3);
        for (row, p) in rows.iter().zip(&line.points) {
            let parts: Vec<f64> = row.split(',').skip(1).map(|s| s.parse().unwrap()).collect();
            assert_eq!(parts, p.to_vec());
        }
    }

    #[test]
    fn svg_is_deterministic() {
        let w = Window::new(-2.0, 2.0, -2.0, 2.0, 64, 64).unwrap();
        let a = render_svg(&trace_locus(&GramSpace::euclidean(2), &circle(), &w).unwrap(), &w);
        let b = render_svg(&trace_locus(&GramSpace::euclidean(2), &circle(), &w).unwrap(), &w);
        assert_eq!(a, b);
        assert_eq!(a.matches("<path").count(), 1);
        assert!(a.contains(" Z\""));
    }
}
