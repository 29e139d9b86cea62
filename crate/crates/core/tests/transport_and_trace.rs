use std::fs;

use loci::locus::eval_g;
use loci::trace::{render_csv, render_svg};
use loci::transport::{eval_g_in_v, gram_from_basis, poly_coords, transport_locus, BasisOracle};
use loci::{emit_csv, emit_svg, trace_locus, GramSpace, LocusSpec, Polyline, Vector, Window};

fn ellipse() -> LocusSpec {
    LocusSpec::new(vec![Vector::from([4.0, 0.0]), Vector::from([-4.0, 0.0])], vec![1.0, 1.0], 10.0).unwrap()
}

fn unit_interval() -> BasisOracle {
    BasisOracle::poly_integral(0.0, 1.0, 1.0, 2)
}

#[test]
fn transported_ellipse_equation() {
    let foci = vec![poly_coords(&[0.0, 2.0], 2).unwrap(), poly_coords(&[0.0, -2.0], 2).unwrap()];
    let (space, spec) = transport_locus(&unit_interval(), foci.clone(), vec![1.0, 1.0], 10.0).unwrap();
    assert_eq!(spec.foci(), &[Vector::from([0.0, 2.0]), Vector::from([0.0, -2.0])]);
    for &(x, y) in &[(0.3, -1.0), (2.0, 7.5), (-4.0, 0.0)] {
        let closed = |d: f64| ((6.0 * x * x + 6.0 * x * d + 2.0 * d * d) / 6.0).sqrt();
        let expected = closed(y - 2.0) + closed(y + 2.0);
        let got = eval_g(&space, &spec, &Vector::from([x, y])).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected);
    }

    // the same foci under the trace product give the ordinary ellipse
    let (plane, plain) = transport_locus(&BasisOracle::matrix_trace(2, 1), foci, vec![1.0, 1.0], 10.0).unwrap();
    assert_eq!(plane, GramSpace::euclidean(2));
    let p = Vector::from([0.0, 5.0]);
    assert_eq!(eval_g(&plane, &plain, &p).unwrap(), 10.0);
}

#[test]
fn identity_table_is_a_no_op() {
    let oracle = BasisOracle::table(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    let foci = vec![Vector::from([1.0, 2.0, 3.0])];
    let (space, spec) = transport_locus(&oracle, foci.clone(), vec![2.0], 4.0).unwrap();
    assert_eq!(space, GramSpace::euclidean(3));
    assert_eq!(spec, LocusSpec::new(foci, vec![2.0], 4.0).unwrap());
}

#[test]
fn quadrature_matches_closed_form_integrals() {
    let (a, b, s) = (-0.7, 2.2, 0.4);
    let space = gram_from_basis(&BasisOracle::poly_integral(a, b, s, 7)).unwrap();
    for i in 0..7 {
        for j in 0..7 {
            let k = (i + j + 1) as i32;
            let exact = s * (b.powi(k) - a.powi(k)) / k as f64;
            assert!((space.entry(i, j) - exact).abs() <= 1e-12 * exact.abs().max(1.0));
        }
    }
}

#[test]
fn membership_survives_transport() {
    let oracle = unit_interval();
    let foci = vec![Vector::from([0.0, 2.0]), Vector::from([0.0, -2.0])];
    let (space, spec) = transport_locus(&oracle, foci, vec![1.0, 1.0], 10.0).unwrap();
    let window = Window::new(-12.0, 12.0, -20.0, 20.0, 128, 128).unwrap();
    for p in trace_locus(&space, &spec, &window).unwrap().iter().flat_map(|l| &l.points) {
        let coord = eval_g(&space, &spec, &Vector::from(p.to_vec())).unwrap();
        let abstract_side = eval_g_in_v(&oracle, &spec, p).unwrap();
        assert!((coord - abstract_side).abs() <= 1e-12 * coord);
    }
}

#[test]
fn ellipse_trace_through_vertices() {
    let plane = GramSpace::euclidean(2);
    let window = Window::new(-8.0, 8.0, -6.0, 6.0, 512, 512).unwrap();
    let lines = trace_locus(&plane, &ellipse(), &window).unwrap();
    assert_eq!(lines.len(), 1);
    let line = &lines[0];
    assert!(line.closed);
    let diag = window.cell_diagonal(&plane);
    let (first, last) = (line.points[0], line.points[line.points.len() - 1]);
    assert!((first[0] - last[0]).hypot(first[1] - last[1]) <= diag);
    for target in [[5.0, 0.0], [-5.0, 0.0], [0.0, 3.0], [0.0, -3.0]] {
        let d = line.points.iter().map(|p| (p[0] - target[0]).hypot(p[1] - target[1])).fold(f64::INFINITY, f64::min);
        assert!(d <= diag);
    }
    for w in line.points.windows(2) {
        assert_ne!(w[0], w[1]);
    }
}

#[test]
fn transported_ellipse_trace_residuals() {
    let space = gram_from_basis(&unit_interval()).unwrap();
    let spec = LocusSpec::new(vec![Vector::from([0.0, 2.0]), Vector::from([0.0, -2.0])], vec![1.0, 1.0], 10.0).unwrap();
    let window = Window::new(-12.0, 12.0, -20.0, 20.0, 512, 512).unwrap();
    let lines = trace_locus(&space, &spec, &window).unwrap();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].closed);
    for p in &lines[0].points {
        let r = eval_g(&space, &spec, &Vector::from(p.to_vec())).unwrap() - 10.0;
        assert!(r.abs() <= 0.01, "residual {r} at {p:?}");
    }
}

fn max_residual(res: usize) -> f64 {
    let plane = GramSpace::euclidean(2);
    let window = Window::new(-8.0, 8.0, -6.0, 6.0, res, res).unwrap();
    trace_locus(&plane, &ellipse(), &window)
        .unwrap()
        .iter()
        .flat_map(|l| &l.points)
        .map(|p| (eval_g(&plane, &ellipse(), &Vector::from(p.to_vec())).unwrap() - 10.0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn refining_the_grid_shrinks_residuals() {
    let coarse = max_residual(64);
    let fine = max_residual(128);
    assert!(fine <= 0.5 * coarse, "{coarse} -> {fine}");
}

#[test]
fn hyperbola_branches() {
    let plane = GramSpace::euclidean(2);
    let upper =
        LocusSpec::new(vec![Vector::from([0.0, 2.0]), Vector::from([0.0, -2.0])], vec![1.0, -1.0], 1.0).unwrap();
    let lower = upper.with_level(-1.0).unwrap();
    let window = Window::new(-6.0, 6.0, -6.0, 6.0, 256, 256).unwrap();
    let a = trace_locus(&plane, &upper, &window).unwrap();
    let b = trace_locus(&plane, &lower, &window).unwrap();
    assert_eq!((a.len(), b.len()), (1, 1));
    assert!(!a[0].closed && !b[0].closed);
    // g = 1 is the branch nearer the focus with negative weight
    assert!(a[0].points.iter().all(|p| p[1] < 0.0));
    assert!(b[0].points.iter().all(|p| p[1] > 0.0));
    let both: Vec<Polyline> = a.into_iter().chain(b).collect();
    let svg = render_svg(&both, &window);
    assert_eq!(svg.matches("<path").count(), 2);
    assert!(!svg.contains(" Z\""));
}

#[test]
fn svg_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let plane = GramSpace::euclidean(2);
    let circle = LocusSpec::new(vec![Vector::zeros(2)], vec![1.0], 1.0).unwrap();
    let window = Window::new(-2.0, 2.0, -2.0, 2.0, 256, 256).unwrap();
    let lines = trace_locus(&plane, &circle, &window).unwrap();

    let svg = dir.path().join("circle.svg");
    emit_svg(&lines, &window, &svg).unwrap();
    let first = fs::read(&svg).unwrap();
    emit_svg(&trace_locus(&plane, &circle, &window).unwrap(), &window, &svg).unwrap();
    assert_eq!(first, fs::read(&svg).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains("viewBox=\"0 0 256 256\""));
    assert!(text.contains("stroke-width=\"1\""));
    assert!(text.contains("fill=\"none\""));

    let csv = dir.path().join("circle.csv");
    emit_csv(&lines, &csv).unwrap();
    let text = fs::read_to_string(&csv).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("polyline_id,x,y"));
    let parsed: Vec<[f64; 2]> = rows
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            assert_eq!(f[0], "0");
            [f[1].parse().unwrap(), f[2].parse().unwrap()]
        })
        .collect();
    assert_eq!(parsed, lines[0].points);
    assert_eq!(render_csv(&[]), "polyline_id,x,y\n");

    let bad = dir.path().join("missing-dir").join("x.svg");
    assert!(matches!(emit_svg(&lines, &window, &bad), Err(loci::Error::Io { .. })));
}
