use num_rational::BigRational;
use num_traits::Zero;
use planted_core::combin::{factorial_u128, for_each_combination};
use planted_core::hypertrees::build_class_table;
use planted_core::models::{sample_pds, Hypergraph, MultiHypergraph, PdsParams, SubsetTensor};
use planted_core::recovery::{
    colorful_aggregate, full_tree_polynomial, pattern_count_estimator, select_top, Coloring,
};
use planted_core::rng::{stream, Substream};
use proptest::prelude::*;

fn random_tensor(n: usize, r: usize, seed: u64) -> SubsetTensor<f64> {
    let mut s = Substream::new(seed, stream::MONTE_CARLO);
    let mut idx = 0u64;
    SubsetTensor::from_fn(n, r, |_| {
        idx += 1;
        s.item(idx).normal()
    })
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut s = Substream::new(seed, 42);
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = s.item(i as u64).below(i as u64 + 1) as usize;
        p.swap(i, j);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scores_are_permutation_equivariant(seed in any::<u64>(), r in 2usize..4) {
        let (n, ell) = (9, if r == 2 { 1 } else { 0 });
        let y = random_tensor(n, r, seed);
        let sigma = permutation(n, seed);
        let table = build_class_table(ell, r).unwrap();
        let ys = y.permuted(&sigma);
        let mut z = vec![0.0; n];
        let mut zs = vec![0.0; n];
        for trial in 0..4 {
            let c = Coloring::random(n, table.k(), seed, trial);
            for (a, b) in z.iter_mut().zip(colorful_aggregate(&y, &c, &table).unwrap()) {
                *a += b;
            }
            let cs = c.permuted(&sigma);
            for (a, b) in zs.iter_mut().zip(colorful_aggregate(&ys, &cs, &table).unwrap()) {
                *a += b;
            }
        }
        for i in 0..n {
            prop_assert!((z[i] - zs[sigma[i]]).abs() <= 1e-9 * z[i].abs().max(1.0));
        }
        let mut sorted = z.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 1e-6));
        let top = select_top(&z, 3);
        let mut mapped: Vec<usize> = top.iter().map(|&i| sigma[i]).collect();
        mapped.sort_unstable();
        prop_assert_eq!(select_top(&zs, 3), mapped);
    }
}

#[test]
fn coloring_average_is_unbiased_at_ell_one() {
    let (n, r, ell) = (5, 2, 1);
    let mut v = 0i64;
    let y: SubsetTensor<BigRational> = SubsetTensor::from_fn(n, r, |_| {
        v += 1;
        BigRational::new(((v * 5) % 9 - 4).into(), 2.into())
    });
    let table = build_class_table(ell, r).unwrap();
    let k = table.k();
    let total = (k as u128).pow(n as u32);
    let mut sum = vec![BigRational::zero(); n];
    for idx in 0..total {
        let c = Coloring::from_index(n, k, idx);
        for (s, z) in sum.iter_mut().zip(colorful_aggregate(&y, &c, &table).unwrap()) {
            *s += z;
        }
    }
    let q = BigRational::new(factorial_u128(k).into(), (k as u128).pow(k as u32).into());
    for (i, s) in sum.iter().enumerate() {
        let avg = s / BigRational::from_integer(total.into()) / &q;
        assert_eq!(avg, full_tree_polynomial(&y, ell, i).unwrap());
    }
}

#[test]
fn adding_planted_edges_does_not_lower_scores() {
    let (n, q0, q1) = (12, 0.2, 0.5);
    let support = [1usize, 4, 6, 9];
    let table = build_class_table(1, 2).unwrap();
    let trials = 400u64;
    let mut diffs = vec![Vec::new(); n];
    for t in 0..trials {
        let mut s = Substream::new(t, stream::EDGES);
        let mut h = Hypergraph::empty(n, 2);
        for rank in 0..h.num_slots() {
            let e = h.index().unrank(rank);
            let p = if e.iter().all(|v| support.contains(v)) { q1 } else { q0 };
            h.set_rank(rank, s.item(rank as u64).bernoulli(p));
        }
        let mut denser = h.clone();
        for (a, &u) in support.iter().enumerate() {
            for &w in &support[a + 1..] {
                denser.set_edge(&[u, w], true);
            }
        }
        let c = Coloring::random(n, table.k(), 77, t);
        let a = colorful_aggregate(&SubsetTensor::standardized(&h, q0), &c, &table).unwrap();
        let b = colorful_aggregate(&SubsetTensor::standardized(&denser, q0), &c, &table).unwrap();
        for i in 0..n {
            diffs[i].push(b[i] - a[i]);
        }
    }
    for (i, xs) in diffs.iter().enumerate() {
        let m = xs.iter().sum::<f64>() / trials as f64;
        let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (trials as f64 - 1.0);
        assert!(m >= -3.0 * (var / trials as f64).sqrt(), "vertex {i}: {m}");
    }
}

#[test]
fn pattern_counts_match_subset_enumeration() {
    let p = PdsParams::new(8, 2, 0.5, 0.4, 0.9).unwrap();
    let (_, h) = sample_pds(&p, 3).unwrap();
    let triangle = MultiHypergraph::simple(&[vec![0, 1], vec![1, 2], vec![0, 2]]);
    let est = pattern_count_estimator(&h, &triangle).unwrap();
    let mut brute = vec![0.0; 8];
    for_each_combination(8, 3, |s| {
        if h.has_edge(&[s[0], s[1]]) && h.has_edge(&[s[1], s[2]]) && h.has_edge(&[s[0], s[2]]) {
            for &v in s {
                brute[v] += 1.0;
            }
        }
    });
    assert_eq!(est, brute);
    let empty = Hypergraph::empty(6, 2);
    let edge = MultiHypergraph::simple(&[vec![0, 1]]);
    assert!(pattern_count_estimator(&empty, &edge).unwrap().iter().all(|&x| x == 0.0));
}
