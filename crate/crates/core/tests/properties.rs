use arrvol::bounds::{clement_bader, is_progression_free, kobon_recursive_bound, r_k_exact, tamura, DEFAULT_RK_BUDGET};
use arrvol::cells::count_simplicial_cells;
use arrvol::combinatorics::binomial;
use arrvol::constructions::{random_general_position, shift_map, ShiftParams};
use arrvol::geometry::{simplex_of_subset, Arrangement, Hyperplane, Point};
use arrvol::io::{arrangement_to_json, typed_arrangement_from_json};
use arrvol::spectrum::{
    distinct_subset_exact, distinct_subset_greedy, verify_distinct_certificate, volume_spectrum, GreedyOrder,
    SpectrumConfig, DEFAULT_NODE_BUDGET,
};
use arrvol::{apply_affine_map, dual_transform, AffineMap, Dual, Rational, Scalar, DEFAULT_EPS_VOL};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arrangement(d: usize, n: usize, seed: u64) -> Arrangement<Rational> {
    random_general_position(d, n, 5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// Possibly degenerate: parallel and concurrent planes are allowed.
fn raw_arrangement() -> impl Strategy<Value = Option<Arrangement<Rational>>> {
    (2usize..=3).prop_flat_map(|d| {
        prop::collection::vec((prop::collection::vec(-2i64..=2, d), -2i64..=2), d + 1..=7).prop_map(move |rows| {
            let hs: Option<Vec<_>> = rows.iter().map(|(a, b)| Hyperplane::from_ints(a, *b).ok()).collect();
            Arrangement::new(d, hs?).ok()
        })
    })
}

fn volumes(a: &Arrangement<Rational>) -> Vec<(Rational, u64)> {
    volume_spectrum(a, &SpectrumConfig::default())
        .entries
        .into_iter()
        .map(|e| (e.volume, e.multiplicity))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subsets_are_conserved(a in raw_arrangement()) {
        let Some(a) = a else { return Ok(()) };
        let sp = volume_spectrum(&a, &SpectrumConfig::default());
        let total = binomial(a.len() as u64, a.dim() as u64 + 1);
        prop_assert_eq!(sp.simplex_count() + sp.degenerate_count, total);
        prop_assert_eq!(sp.total_subsets, total);
    }

    #[test]
    fn witnesses_reproduce_their_volume(a in raw_arrangement()) {
        let Some(a) = a else { return Ok(()) };
        let cfg = SpectrumConfig { witness_cap: None, ..Default::default() };
        for e in volume_spectrum(&a, &cfg).entries {
            prop_assert_eq!(e.witnesses.len() as u64, e.multiplicity);
            for w in &e.witnesses {
                prop_assert_eq!(&simplex_of_subset(&a, w).unwrap().volume, &e.volume);
            }
        }
    }

    #[test]
    fn rescaling_multiplies_volumes(seed: u64, num in 1i64..6, den in 1i64..4, d in 2usize..=3) {
        let a = arrangement(d, d + 3, seed);
        let lambda = Rational::from_ratio(num, den);
        let factor = (0..d).fold(Rational::from_i64(1), |acc, _| acc * lambda.clone());
        let scaled: Vec<_> = volumes(&a).into_iter().map(|(v, m)| (v * factor.clone(), m)).collect();
        prop_assert_eq!(volumes(&a.scaled(lambda).unwrap()), scaled);
    }

    #[test]
    fn affine_images_scale_by_determinant(seed: u64, m in prop::collection::vec(-3i64..=3, 4), t in prop::collection::vec(-3i64..=3, 2)) {
        let a = arrangement(2, 5, seed);
        let q = |x: i64| Rational::from_i64(x);
        let linear = vec![vec![q(m[0]), q(m[1])], vec![q(m[2]), q(m[3])]];
        let det = (m[0] * m[3] - m[1] * m[2]).abs();
        prop_assume!(det != 0);
        let map = AffineMap::new(linear, t.iter().map(|&x| q(x)).collect()).unwrap();
        let image = apply_affine_map(&map, &a).unwrap();
        let expected: Vec<_> = volumes(&a).into_iter().map(|(v, k)| (v * q(det), k)).collect();
        prop_assert_eq!(volumes(&image), expected);
    }

    #[test]
    fn storage_order_is_irrelevant(seed: u64, shuffle: u64) {
        let a = arrangement(3, 6, seed);
        let mut order: Vec<usize> = (0..a.len()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let b = a.permuted(&order).unwrap();
        let cfg = SpectrumConfig::default();
        prop_assert_eq!(volume_spectrum(&a, &cfg).to_csv(), volume_spectrum(&b, &cfg).to_csv());
        prop_assert_eq!(count_simplicial_cells(&a), count_simplicial_cells(&b));
    }

    #[test]
    fn relabeling_keeps_volumes(seed: u64, offset in 1u32..50) {
        let a = arrangement(2, 6, seed);
        let hs: Vec<_> = a.hyperplanes().iter().map(|h| Hyperplane::new(h.normal().to_vec(), h.offset().clone()).unwrap()).collect();
        let b = Arrangement::with_labels_from(2, hs, offset).unwrap();
        prop_assert_eq!(volumes(&a), volumes(&b));
    }

    #[test]
    fn float_spectrum_tracks_rational(seed: u64) {
        let a = arrangement(3, 6, seed);
        let exact = volume_spectrum(&a, &SpectrumConfig::default());
        let float = volume_spectrum(&a.to_float().unwrap(), &SpectrumConfig::default());
        prop_assert_eq!(exact.simplex_count(), float.simplex_count());
        let lo = exact.min_volume().unwrap().to_f64();
        prop_assert!((lo - float.min_volume().unwrap()).abs() <= 1e-9 * lo.max(1.0));
    }

    #[test]
    fn json_round_trip(seed: u64) {
        let a = arrangement(3, 5, seed);
        let b = typed_arrangement_from_json::<Rational>(&arrangement_to_json(&a, None)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn duality_is_an_involution(c in prop::collection::vec(-20i64..=20, 3)) {
        let p = Point::<Rational>::from_ints(&c);
        let back = dual_transform(&dual_transform(&Dual::Point(p.clone())).unwrap()).unwrap();
        prop_assert_eq!(back, Dual::Point(p));
    }

    #[test]
    fn cells_survive_deleting_other_planes(seed: u64, drop in 0usize..6) {
        let a = arrangement(2, 6, seed);
        let removed = a.label_at(drop);
        let kept: Vec<u32> = a.labels().into_iter().filter(|&l| l != removed).collect();
        let sub = count_simplicial_cells(&a.restrict(&kept).unwrap());
        for cell in count_simplicial_cells(&a).cells {
            if !cell.contains(&removed) {
                prop_assert!(sub.cells.contains(&cell));
            }
        }
    }

    #[test]
    fn planar_cells_respect_bounds(seed: u64, n in 3usize..=7) {
        let c = count_simplicial_cells(&arrangement(2, n, seed)).count as u64;
        prop_assert!(c <= clement_bader(n as u64));
        prop_assert!(c <= tamura(n as u64));
    }

    #[test]
    fn distinct_certificates_verify(seed: u64) {
        let a = arrangement(2, 6, seed);
        let exact = distinct_subset_exact(&a, DEFAULT_EPS_VOL, DEFAULT_NODE_BUDGET);
        let greedy = distinct_subset_greedy(&a, GreedyOrder::Random(seed), DEFAULT_EPS_VOL);
        prop_assert!(exact.exact);
        prop_assert!(greedy.size <= exact.size);
        prop_assert!(verify_distinct_certificate(&a, &exact.subset, DEFAULT_EPS_VOL).unwrap());
        prop_assert!(verify_distinct_certificate(&a, &greedy.subset, DEFAULT_EPS_VOL).unwrap());
    }

    #[test]
    fn shift_steps_compose(a in -5i64..=5, b in -5i64..=5, d in 2usize..=5) {
        let thetas: Vec<f64> = (0..d / 2).map(|j| 0.1 + 0.07 * j as f64).collect();
        let p = ShiftParams::new(d, thetas, 1).unwrap();
        let composed = shift_map(&p.with_step(a)).unwrap().compose(&shift_map(&p.with_step(b)).unwrap()).unwrap();
        let direct = shift_map(&p.with_step(a + b)).unwrap();
        for (r, s) in composed.linear().iter().zip(direct.linear()) {
            for (x, y) in r.iter().zip(s) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
        for (x, y) in composed.translation().iter().zip(direct.translation()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rk_grows_by_at_most_one(n in 1usize..=24, k in 3usize..=5) {
        let r = r_k_exact(n, k, DEFAULT_RK_BUDGET).unwrap();
        let next = r_k_exact(n + 1, k, DEFAULT_RK_BUDGET).unwrap();
        let longer = r_k_exact(n, k + 1, DEFAULT_RK_BUDGET).unwrap();
        prop_assert!(r.size <= next.size && next.size <= r.size + 1);
        prop_assert!(r.size <= longer.size);
        prop_assert!(is_progression_free(&r.witness, k));
        prop_assert!(r.witness.iter().all(|&x| (1..=n as u32).contains(&x)));
    }

    #[test]
    fn recursive_bound_grows_with_n(d in 2usize..=5, n in 6usize..=80) {
        prop_assert!(kobon_recursive_bound(d, n).unwrap() <= kobon_recursive_bound(d, n + 1).unwrap());
    }
}
