use proptest::prelude::*;

use loci::certify::{certify_linear_combo, certify_multi_combo, combo_bracket, combo_norm_sq_expansion};
use loci::locus::{eval_g, is_member};
use loci::sample::{instance_rng, random_instance, MEMBER_TOL};
use loci::transport::{eval_g_in_v, gram_from_basis, inner_in_v, BasisOracle};
use loci::triangle::{cosine_law_norm_sq, sine_law_ratios, sum_length_bounds, sum_length_sq};
use loci::{delta_estimates, Error, GramSpace, LocusSpec, Vector};

const DIM: usize = 3;

/// `AᵀA + 0.1·I` from a flat list of entries.
fn spd(entries: &[f64]) -> GramSpace {
    let n = DIM;
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = (0..n).map(|k| entries[k * n + i] * entries[k * n + j]).sum();
        }
        g[i][i] += 0.1;
    }
    GramSpace::new(g).unwrap()
}

fn gram() -> impl Strategy<Value = GramSpace> {
    prop::collection::vec(-2.0..2.0f64, DIM * DIM).prop_map(|e| spd(&e))
}

fn vector() -> impl Strategy<Value = Vector> {
    prop::collection::vec(-10.0..10.0f64, DIM).prop_map(Vector::from)
}

fn nonzero_vector() -> impl Strategy<Value = Vector> {
    vector().prop_filter("nonzero", |v| v.max_abs() > 1e-3)
}

fn scale(vs: &[f64]) -> f64 {
    vs.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

proptest! {
    #[test]
    fn cauchy_schwarz(s in gram(), u in vector(), v in vector()) {
        let lhs = s.inner(&u, &v).unwrap().abs();
        let rhs = s.norm(&u).unwrap() * s.norm(&v).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * scale(&[lhs, rhs]));
    }

    #[test]
    fn triangle_inequality(s in gram(), u in vector(), v in vector()) {
        let lhs = s.norm(&(&u + &v)).unwrap();
        let rhs = s.norm(&u).unwrap() + s.norm(&v).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * scale(&[rhs]));
    }

    #[test]
    fn bilinear_and_symmetric(s in gram(), u in vector(), w in vector(), v in vector(), a in -5.0..5.0f64, b in -5.0..5.0f64) {
        let combo = &u.scale(a) + &w.scale(b);
        let lhs = s.inner(&combo, &v).unwrap();
        let rhs = a * s.inner(&u, &v).unwrap() + b * s.inner(&w, &v).unwrap();
        let mag = (a.abs() * s.norm(&u).unwrap() + b.abs() * s.norm(&w).unwrap()) * s.norm(&v).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * mag.max(1.0));
        prop_assert_eq!(s.inner(&u, &v).unwrap(), s.inner(&v, &u).unwrap());
    }

    #[test]
    fn positivity(s in gram(), u in nonzero_vector()) {
        prop_assert!(s.norm(&u).unwrap() > 0.0);
    }

    #[test]
    fn cosine_law_and_length_of_sum(s in gram(), x in nonzero_vector(), y in nonzero_vector()) {
        let direct = s.norm_sq(&(&x + &y)).unwrap();
        let mag = (s.norm(&x).unwrap() + s.norm(&y).unwrap()).powi(2);
        prop_assert!((cosine_law_norm_sq(&s, &x, &y).unwrap() - direct).abs() <= 1e-9 * mag);
        prop_assert!((sum_length_sq(&s, &x, &y).unwrap() - direct).abs() <= 1e-9 * mag);
    }

    #[test]
    fn bracket_contains_length(s in gram(), x in nonzero_vector(), y in vector()) {
        let (lo, hi) = sum_length_bounds(&s, &x, &y).unwrap();
        let n = s.norm(&(&x + &y)).unwrap();
        let slack = 1e-9 * n.max(1.0);
        prop_assert!(lo <= hi + slack);
        prop_assert!(lo <= n + slack && n <= hi + slack);
    }

    #[test]
    fn sine_law_ratios_agree(s in gram(), x in nonzero_vector(), y in nonzero_vector()) {
        match sine_law_ratios(&s, &x, &y) {
            Ok((a, b, c)) => {
                let m = a.max(b).max(c);
                prop_assert!((a - b).abs() <= 1e-9 * m);
                prop_assert!((b - c).abs() <= 1e-9 * m);
            }
            Err(Error::DegenerateTriangle) | Err(Error::ZeroVector) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn estimate_sandwich(s in gram(), z in vector(), y in vector(), f in vector()) {
        let spec = LocusSpec::new(vec![f.clone()], vec![1.0], 1.0).unwrap();
        if let Ok(est) = delta_estimates(&s, &spec, &z, &y) {
            let e = est.per_focus[0];
            let actual = s.norm(&(&(&z + &y) - &f)).unwrap();
            let slack = 1e-9 * actual.max(1.0);
            prop_assert!(0.0 <= e.proj && e.proj <= e.hyp + slack);
            prop_assert!(e.proj <= actual + slack && actual <= e.hyp + slack);
        }
    }

    #[test]
    fn lipschitz_in_the_point(s in gram(), f1 in vector(), f2 in vector(), a1 in 0.2..3.0f64, a2 in -3.0..-0.2f64, x in vector(), d in vector()) {
        let spec = LocusSpec::new(vec![f1, f2], vec![a1, a2], 0.0).unwrap();
        let gx = eval_g(&s, &spec, &x).unwrap();
        let gy = eval_g(&s, &spec, &(&x + &d)).unwrap();
        let bound = spec.alpha_abs_sum() * s.norm(&d).unwrap();
        prop_assert!((gx - gy).abs() <= bound + 1e-9 * gx.abs().max(gy.abs()).max(1.0));
    }

    #[test]
    fn translation_covariance(s in gram(), f1 in vector(), f2 in vector(), x in vector(), t in vector()) {
        let spec = LocusSpec::new(vec![f1.clone(), f2.clone()], vec![1.0, -1.5], 2.0).unwrap();
        let moved = LocusSpec::new(vec![&f1 + &t, &f2 + &t], vec![1.0, -1.5], 2.0).unwrap();
        let a = eval_g(&s, &spec, &x).unwrap();
        let b = eval_g(&s, &moved, &(&x + &t)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0) * 10.0);
    }

    #[test]
    fn translated_foci_shift_the_argument(s in gram(), f1 in vector(), f2 in vector(), z in vector(), y in vector()) {
        let spec = LocusSpec::new(vec![f1, f2], vec![1.0, -1.0], 0.0).unwrap();
        let c = eval_g(&s, &spec, &z).unwrap();
        let spec = spec.with_level(c).unwrap();
        let moved = spec.translate_foci(&z).unwrap();
        prop_assert!(is_member(&s, &moved, &Vector::zeros(DIM), 1e-9).unwrap());
        let lhs = eval_g(&s, &moved, &y).unwrap();
        let rhs = eval_g(&s, &spec, &(&z + &y)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0) * 10.0);
    }

    #[test]
    fn combo_expansion_and_bracket(s in gram(), vs in prop::collection::vec(vector(), 1..5), x in vector(), seed in any::<u64>()) {
        let betas: Vec<f64> = (0..vs.len()).map(|k| 0.1 + ((seed >> (8 * k)) & 0xff) as f64 / 64.0).collect();
        let total: f64 = betas.iter().sum();
        let combo = vs.iter().zip(&betas).fold(Vector::zeros(DIM), |acc, (v, &b)| &acc + &v.scale(b));
        let direct = s.norm_sq(&(&combo - &x.scale(total))).unwrap();
        let expanded = combo_norm_sq_expansion(&s, &vs, &betas, &x).unwrap();
        prop_assert!((expanded - direct).abs() <= 1e-9 * direct.max(1.0) * 100.0);
        if let Ok((lo, hi)) = combo_bracket(&s, &vs, &betas, &x) {
            let n = direct.sqrt();
            prop_assert!(lo <= n + 1e-9 * n.max(1.0) && n <= hi + 1e-9 * n.max(1.0));
        }
    }

    #[test]
    fn transported_inner_products_agree(entries in prop::collection::vec(-2.0..2.0f64, DIM * DIM), a in vector(), b in vector()) {
        let table = spd(&entries).rows();
        let oracle = BasisOracle::table(table);
        let s = gram_from_basis(&oracle).unwrap();
        let via_gram = s.inner(&a, &b).unwrap();
        let via_v = inner_in_v(&oracle, a.coords(), b.coords()).unwrap();
        let mag = s.norm(&a).unwrap() * s.norm(&b).unwrap();
        prop_assert!((via_gram - via_v).abs() <= 1e-12 * mag.max(1.0));
    }

    #[test]
    fn polynomial_transport_agrees(lo in -2.0..1.0f64, width in 0.5..3.0f64, a in prop::collection::vec(-3.0..3.0f64, 3), f in prop::collection::vec(-3.0..3.0f64, 3)) {
        let oracle = BasisOracle::poly_integral(lo, lo + width, 1.0, 3);
        let s = gram_from_basis(&oracle).unwrap();
        let spec = LocusSpec::new(vec![Vector::from(f)], vec![1.0], 1.0).unwrap();
        let x = Vector::from(a);
        let coordinate = eval_g(&s, &spec, &x).unwrap();
        let abstract_side = eval_g_in_v(&oracle, &spec, x.coords()).unwrap();
        prop_assert!((coordinate - abstract_side).abs() <= 1e-10 * coordinate.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multi_with_two_vectors_matches_linear_combo(seed in any::<u64>(), b1 in 0.05..3.0f64, b2 in 0.05..3.0f64) {
        let mut rng = instance_rng(seed, 0);
        let Some(inst) = random_instance(&mut rng, 2) else { return Ok(()) };
        let (s, spec, m) = (&inst.space, &inst.spec, &inst.members);
        let lin = certify_linear_combo(s, spec, &m[0], &m[1], b1, b2, MEMBER_TOL);
        let multi = certify_multi_combo(s, spec, m, &[b1, b2], MEMBER_TOL);
        if let (Ok(lin), Ok(multi)) = (lin, multi) {
            for k in 0..2 {
                let (a, b) = (lin[k].condition_value, multi[k].condition_value);
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
            }
        }
    }
}
