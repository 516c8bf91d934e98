use lpo_codes::bounds::{gs_lower, johnson_upper, lower_bound};
use lpo_codes::codes::{exact_l, verify_light, LightCode};
use lpo_codes::cwords::{binomial, enumerate_words, unrank, Word};
use lpo_codes::grid::CriticalGrid;
use lpo_codes::johnson::{build_induced, eulerian_orientation, min_max_outdegree, orientation_feasible, JohnsonGraph};
use lpo_codes::lpocv::{exact_null_distribution, lpo_kernel, Dataset, Learner, LearnerSpec};
use lpo_codes::wilcoxon::{big_binomial, wmw_distribution};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn learner() -> impl Strategy<Value = LearnerSpec> {
    prop_oneof![
        (0usize..2).prop_map(|f| LearnerSpec::parse("constant", &format!("feature={f}")).unwrap()),
        (0usize..2).prop_map(|f| LearnerSpec::parse("order-direction", &format!("feature={f}")).unwrap()),
        any::<u64>().prop_map(|s| LearnerSpec::parse("random-orientation", &format!("seed={s}")).unwrap()),
        (1u32..40).prop_map(|l| LearnerSpec::parse("ridge", &format!("lambda={}", l as f64 / 8.0)).unwrap()),
        (1usize..6).prop_map(|k| LearnerSpec::parse("knn", &format!("k={k}")).unwrap()),
    ]
}

/// Two feature columns on a coarse grid so ties actually occur.
fn dataset(n: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec(-4i32..=4, 2 * n)
        .prop_map(move |v| Dataset::new(n, 2, v.into_iter().map(|x| x as f64 / 2.0).collect()).unwrap())
}

fn instance() -> impl Strategy<Value = (LearnerSpec, Dataset, usize)> {
    (2usize..=6, learner()).prop_flat_map(|(n, l)| (Just(l), dataset(n), 1..n))
}

fn parity_instance() -> impl Strategy<Value = (Dataset, usize)> {
    (2usize..=6).prop_flat_map(|n| {
        let rows = prop::collection::vec((any::<bool>(), any::<bool>()), n).prop_map(move |bits| {
            let v = bits
                .iter()
                .flat_map(|&(a, b)| [f64::from(u8::from(a)), f64::from(u8::from(b))])
                .collect();
            Dataset::new(n, 2, v).unwrap()
        });
        (rows, 1..n)
    })
}

fn small_code() -> impl Strategy<Value = (usize, usize, Vec<Word>)> {
    (3usize..=7).prop_flat_map(|n| (Just(n), 1..n)).prop_flat_map(|(n, w)| {
        let words = enumerate_words(n, w).unwrap();
        let len = words.len();
        (Just(n), Just(w), subsequence(words, 1..=len.min(20)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_complement_identity((spec, data, w) in instance()) {
        let bound = spec.bind(&data).unwrap();
        for b in enumerate_words(data.n(), w).unwrap() {
            for i in b.ones() {
                for j in b.zeros() {
                    let swapped = b.transpose(i, j).unwrap();
                    prop_assert_ne!(
                        lpo_kernel(bound.as_ref(), &b, i, j).unwrap(),
                        lpo_kernel(bound.as_ref(), &swapped, j, i).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn mean_u_over_labelings_is_one_half((spec, data, w) in instance()) {
        let n = data.n();
        let hist = exact_null_distribution(spec.bind(&data).unwrap().as_ref(), w).unwrap();
        let sum: u64 = hist.counts().iter().enumerate().map(|(k, c)| k as u64 * c).sum();
        prop_assert_eq!(2 * sum, binomial(n, w) * (w * (n - w)) as u64);
        prop_assert_eq!(hist.total(), binomial(n, w));
    }

    #[test]
    fn parity_learner_keeps_the_identities((data, w) in parity_instance()) {
        let n = data.n();
        let spec = LearnerSpec::parse("parity", "").unwrap();
        let hist = exact_null_distribution(spec.bind(&data).unwrap().as_ref(), w).unwrap();
        let sum: u64 = hist.counts().iter().enumerate().map(|(k, c)| k as u64 * c).sum();
        prop_assert_eq!(2 * sum, binomial(n, w) * (w * (n - w)) as u64);
    }

    #[test]
    fn eulerian_and_flow_orientations((n, w, words) in small_code()) {
        let g = build_induced(&JohnsonGraph::new(n, w).unwrap(), &words).unwrap();
        let degrees = g.degrees();
        let euler = eulerian_orientation(&g);
        for (v, &d) in degrees.iter().enumerate() {
            prop_assert!(euler.outdegrees()[v] <= d.div_ceil(2));
        }
        let best = min_max_outdegree(&g);
        let o = orientation_feasible(&g, best).unwrap();
        prop_assert!(o.audit(best));
        prop_assert!(best == 0 || orientation_feasible(&g, best - 1).is_none());
        // every edge contributes one to exactly one outdegree
        prop_assert_eq!(o.outdegrees().iter().sum::<usize>(), g.edges().len());
    }

    #[test]
    fn lightness_is_monotone_and_complement_invariant((n, w, words) in small_code(), lightness in 0usize..4) {
        let code = LightCode::new(n, w, lightness, words).unwrap();
        let light = verify_light(&code).is_some();
        prop_assert_eq!(light, verify_light(&code.complement()).is_some());
        if light {
            let looser = LightCode::new(n, w, lightness + 1, code.words().to_vec()).unwrap();
            prop_assert!(verify_light(&looser).is_some());
        }
    }

    #[test]
    fn bound_sandwich(n in 2usize..=40, w_seed: usize, lightness in 0usize..8) {
        let w = 1 + w_seed % (n - 1);
        let lower = lower_bound(n, w, lightness).unwrap();
        let upper = johnson_upper(n, w, lightness).unwrap();
        prop_assert!(lower <= upper);
        prop_assert!(upper <= binomial(n, w));
        if let Some(g) = gs_lower(n, w, lightness) {
            prop_assert!(g <= upper);
        }
        if binomial(n, w) <= 24 {
            let exact = exact_l(n, w, lightness).unwrap().len() as u64;
            prop_assert!(lower <= exact && exact <= upper);
        }
    }

    #[test]
    fn wilcoxon_distribution_is_symmetric(n in 2usize..=48, w_seed: usize) {
        let w = 1 + w_seed % (n - 1);
        let d = wmw_distribution(n, w).unwrap();
        let c = d.counts();
        prop_assert_eq!(d.total(), big_binomial(n, w));
        for k in 0..c.len() {
            prop_assert_eq!(&c[k], &c[c.len() - 1 - k]);
        }
        prop_assert_eq!(&wmw_distribution(n, n - w).unwrap().counts().to_vec(), &c.to_vec());
    }

    #[test]
    fn unrank_inverts_rank(n in 2usize..=64, w_seed: usize, r_seed: u64) {
        let w = 1 + w_seed % (n - 1);
        let total = binomial(n, w);
        let word = unrank(n, w, r_seed % total).unwrap();
        prop_assert_eq!(word.rank(), r_seed % total);
        prop_assert_eq!(word.weight(), w);
    }

    #[test]
    fn grid_csv_round_trip(max in 1usize..8, cells in prop::collection::vec(prop::option::of(0usize..50), 64)) {
        let grid = CriticalGrid::from_fn(max, |o, z| cells[(o - 1) * 8 + z - 1]);
        prop_assert_eq!(CriticalGrid::parse_csv(&grid.to_csv()).unwrap(), grid.clone());
        let merged = grid.merge_min(&CriticalGrid::new(max)).unwrap();
        prop_assert_eq!(merged, CriticalGrid::new(max));
    }
}
