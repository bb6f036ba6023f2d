use pbq::blocks::{build_be_one_body, schedules_for, BuildOptions};
use pbq::circuit::quantize_angle;
use pbq::encoding::{encode_majorana, MajoranaIndex, Ordering};
use pbq::factorize::{decompose_blocks, givens_schedule, FactorMode, SpinSeed};
use pbq::linalg::max_abs_diff;
use pbq::pbham::{assemble, build_dense_normal_ordered, cas_dimension, parse_integrals, synthetic, write_integrals, IntegralSet};
use pbq::qrom::{build_select_oracle, build_selectswap, cost_model, optimal_lambda, DataTable, Variant};
use pbq::simulate::encoded_operator;
use pbq::C64;
use proptest::prelude::*;

fn ordering() -> impl Strategy<Value = Ordering> {
    prop_oneof![Just(Ordering::Om), Just(Ordering::Sm)]
}

fn majorana(n: usize) -> impl Strategy<Value = MajoranaIndex> {
    (0..n, 0..2usize, 0..2usize).prop_map(|(p, s, x)| MajoranaIndex::new(p, s, x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn majoranas_square_to_one_and_anticommute(n in 1..6usize, ord in ordering(), seed in any::<u64>()) {
        let mut rng = synthetic::rng(seed);
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
            use rand::Rng;
            MajoranaIndex::new(rng.gen_range(0..n), rng.gen_range(0..2), rng.gen_range(0..2))
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let pa = encode_majorana(a, ord, n).unwrap();
        let pb = encode_majorana(b, ord, n).unwrap();
        prop_assert!(pa.is_hermitian());
        prop_assert_eq!(pa.commutes_with(&pb), a == b);
    }

    #[test]
    fn majorana_weight_is_chain_length(n in 1..8usize, ord in ordering(), m in majorana(8)) {
        prop_assume!(m.p < n);
        let s = encode_majorana(m, ord, n).unwrap();
        prop_assert_eq!(s.weight(), ord.qubit(m.p, m.sigma, n) + 1);
    }

    #[test]
    fn quantized_angles_are_close(theta in -10.0f64..10.0, bits in 1u32..30) {
        let q = quantize_angle(theta, bits);
        // rotation angles live on a 4 pi circle
        let period = 4.0 * std::f64::consts::PI;
        let step = period / (1u64 << bits) as f64;
        let d = (q - theta).rem_euclid(period);
        prop_assert!(d.min(period - d) <= step / 2.0 + 1e-12);
    }

    #[test]
    fn optimal_lambda_beats_every_power_of_two(n in 1u64..5000, beta in 1u64..40) {
        let best = optimal_lambda(n, beta).unwrap();
        let t = cost_model(Variant::SelectSwap, n, beta, best).unwrap().t_count;
        let mut lambda = 1;
        while lambda <= n.next_power_of_two() {
            prop_assert!(t <= cost_model(Variant::SelectSwap, n, beta, lambda).unwrap().t_count);
            lambda *= 2;
        }
    }

    #[test]
    fn lookups_return_table_words(entries in prop::collection::vec(0u64..32, 1..20), k in 0u32..5) {
        let d = DataTable::new(entries.clone(), 5).unwrap();
        let lambda = (1usize << k).min(d.padded_len());
        for c in [build_select_oracle(&d).unwrap(), build_selectswap(&d, lambda).unwrap()] {
            let index = c.register("index").unwrap().start;
            let value = c.register("value").unwrap().start;
            for (j, &w) in entries.iter().enumerate() {
                let out = c.simulate_basis((j as u128) << index).unwrap();
                prop_assert_eq!((out >> value) as u64 & 31, w);
            }
        }
    }

    #[test]
    fn cas_dimensions_sum_to_binomial(n in 0u32..12, eta_frac in 0.0f64..=1.0) {
        let eta = (eta_frac * 2.0 * n as f64).round() as u32;
        let total: u128 = (0..=eta).map(|s| (s as u128 + 1) * cas_dimension(n, eta, s)).sum();
        let binom = (0..eta as u128).fold(1u128, |acc, i| acc * (2 * n as u128 - i) / (i + 1));
        prop_assert_eq!(total, binom);
    }

    #[test]
    fn givens_schedule_fixes_first_angle_norm(seed in any::<u64>(), n in 2..7usize) {
        use rand::Rng;
        let mut rng = synthetic::rng(seed);
        let v: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.iter().map(|z| z / nrm).collect();
        let g = givens_schedule(&v, Ordering::Sm, SpinSeed::Alpha).unwrap();
        prop_assert_eq!(g.thetas.len(), n - 1);
        // cos of the first angle is the weight left on the seed orbital
        prop_assert!((g.thetas[0].cos().abs() - v[0].norm()).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integral_files_round_trip(seed in any::<u64>(), n in 1..4usize) {
        let mut rng = synthetic::rng(seed);
        let set = synthetic::integrals(n, &[0, 1, 2, 3], &[0, 3], 1, &mut rng);
        let back = parse_integrals(&write_integrals(&set)).unwrap();
        prop_assert_eq!(back.n_orbitals, n);
        for mu in 0..4 {
            prop_assert!(max_abs_diff(&back.one_body[mu], &set.one_body[mu]) < 1e-12);
        }
        prop_assert!(back.two_body.sub(&set.two_body).max_abs() < 1e-12);
    }

    #[test]
    fn one_body_encodings_reproduce_dense(seed in any::<u64>(), ord in ordering(), comps in prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..=4)) {
        let mut rng = synthetic::rng(seed);
        let mut set = IntegralSet::zeros(2);
        set.one_body = synthetic::one_body(2, &comps, 1.0, &mut rng);
        let h = assemble(&set).unwrap();
        let f = decompose_blocks(&h.one_body_total, FactorMode::PerComponent, 2).unwrap();
        let be = build_be_one_body(&f, &schedules_for(&f).unwrap(), &BuildOptions { layout: ord, ..Default::default() }).unwrap();
        let dense = build_dense_normal_ordered(&set, ord).unwrap();
        prop_assert!(max_abs_diff(&encoded_operator(&be).unwrap().matrix, &dense.matrix) < 1e-9);
        prop_assert!(be.zeta + 1e-12 >= pbq::linalg::spectral_norm(&dense.matrix) - be.offset.abs());
    }
}
