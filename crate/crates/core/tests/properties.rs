use std::collections::BTreeMap;

use flatpoly::flatness::{flatness_report, gram_matrix, gram_sum_routes};
use flatpoly::{Complex64, Grid, TrigPoly};
use proptest::prelude::*;

fn sparse_poly() -> impl Strategy<Value = TrigPoly> {
    prop::collection::btree_map(-40i64..40, (-1.0f64..1.0, -1.0f64..1.0), 1..12)
        .prop_filter_map("all coefficients vanished", |m| {
            let p = TrigPoly::from_terms(m.into_iter().map(|(e, (re, im))| (e, Complex64::new(re, im))))
                .ok()?;
            (p.l2_norm() > 1e-3).then_some(p)
        })
}

fn unit_poly() -> impl Strategy<Value = TrigPoly> {
    sparse_poly().prop_map(|p| p.normalize_l2().unwrap())
}

/// Brute-force `Σ_e c_{e+k} conj(c_e)`.
fn autocorrelation(p: &TrigPoly) -> BTreeMap<i64, Complex64> {
    let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (ei, ci) in p.terms() {
        for (ej, cj) in p.terms() {
            *out.entry(ei - ej).or_default() += ci * cj.conj();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parseval(p in sparse_poly()) {
        // |P|² has span 2·span(P), so any M above that is alias-free
        let grid = Grid::new(256).unwrap();
        let mean = grid.mean(grid.sample(&p).iter().map(|v| v.norm_sqr()));
        let exact = p.l2_norm().powi(2);
        prop_assert!((mean - exact).abs() <= 1e-12 * exact.max(1.0));
    }

    #[test]
    fn spectrum_matches_autocorrelation(p in sparse_poly()) {
        let spec = p.squared_modulus();
        let brute = autocorrelation(&p);
        prop_assert!((spec.center() - brute[&0].re).abs() < 1e-12);
        for (k, b) in &brute {
            if *k == 0 {
                continue;
            }
            let got = spec.coeff(*k);
            if b.norm() >= 1e-12 {
                prop_assert!((got - b).norm() < 1e-12, "k={} got={} want={}", k, got, b);
            } else {
                prop_assert!(got.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_is_hermitian(p in sparse_poly()) {
        let spec = p.squared_modulus();
        for (n, b) in spec.positive() {
            prop_assert_eq!(spec.coeff(-n), b.conj());
        }
        prop_assert_eq!(spec.offcenter().len(), 2 * spec.n());
    }

    #[test]
    fn spectrum_samples_agree_with_modulus(p in sparse_poly()) {
        let grid = Grid::new(256).unwrap();
        let direct = grid.sample(&p);
        for (s, v) in p.squared_modulus().sample(&grid).iter().zip(&direct) {
            prop_assert!((s - v.norm_sqr()).abs() < 1e-11);
        }
    }

    #[test]
    fn unit_norm_has_center_one(p in unit_poly()) {
        prop_assert!((p.squared_modulus().center() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn n_is_at_most_pair_count(p in sparse_poly()) {
        let m = p.len();
        prop_assert!(p.squared_modulus().n() <= m * (m - 1) / 2);
    }

    #[test]
    fn gram_routes_agree_and_matrix_is_psd(p in unit_poly()) {
        prop_assume!(p.squared_modulus().n() > 0);
        let routes = gram_sum_routes(&p).unwrap();
        let scale = routes.entrywise.abs().max(1.0);
        prop_assert!((routes.entrywise - routes.identity).abs() <= 1e-9 * scale);
        let g = gram_matrix(&p).unwrap();
        prop_assert!(g.hermitian_defect() < 1e-12);
        prop_assert!(g.min_eigenvalue() >= -1e-9);
    }

    #[test]
    fn dilation_leaves_n_l_r_unchanged(p in unit_poly(), s in 2u64..8) {
        let q = p.dilate(s);
        let (a, b) = (p.squared_modulus(), q.squared_modulus());
        prop_assert_eq!(a.n(), b.n());
        prop_assert_eq!(a.l_sum().to_bits(), b.l_sum().to_bits());
        if a.n() > 0 {
            let ra = gram_sum_routes(&p).unwrap().entrywise;
            let rb = gram_sum_routes(&q).unwrap().entrywise;
            prop_assert_eq!(ra.to_bits(), rb.to_bits());
        }
    }

    #[test]
    fn sandwich_holds(p in unit_poly()) {
        let grid = Grid::default_for(&p);
        let rep = flatness_report(&p, &grid, 0.5).unwrap();
        prop_assert_ne!(rep.bounds_ok, Some(false));
    }
}
