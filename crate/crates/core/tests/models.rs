use planted_core::models::{
    sample_general_tpca, sample_pds, sample_raw_gaussian, sample_sparse_tpca, symmetrize, NoiseMode, PdsParams,
    PriorSpec, SymTensor, TpcaParams,
};
use planted_core::rng::Substream;
use proptest::prelude::*;

fn expand(t: &SymTensor) -> Vec<f64> {
    let (n, r) = (t.n(), t.r());
    (0..n.pow(r as u32))
        .map(|flat| {
            let mut idx = vec![0; r];
            let mut x = flat;
            for slot in idx.iter_mut().rev() {
                *slot = x % n;
                x /= n;
            }
            t.get(&idx)
        })
        .collect()
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pds_sampler_is_deterministic(seed in any::<u64>(), n in 3usize..12, r in 2usize..4) {
        prop_assume!(n >= r);
        let p = PdsParams::new(n, r, 0.4, 0.3, 0.8).unwrap();
        let (s1, h1) = sample_pds(&p, seed).unwrap();
        let (s2, h2) = sample_pds(&p, seed).unwrap();
        prop_assert_eq!(s1, s2);
        prop_assert_eq!(h1, h2);
    }

    #[test]
    fn tpca_sampler_is_deterministic(seed in any::<u64>(), sym in any::<bool>()) {
        let mode = if sym { NoiseMode::Symmetrized } else { NoiseMode::NoiseReduced };
        let p = TpcaParams::new(7, 3, 1.5, PriorSpec::bernoulli(0.3), mode).unwrap();
        let (s1, t1) = sample_sparse_tpca(&p, seed).unwrap();
        let (s2, t2) = sample_sparse_tpca(&p, seed).unwrap();
        prop_assert_eq!(s1.theta, s2.theta);
        prop_assert!(t1.values.iter().zip(&t2.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), n in 2usize..5, r in 2usize..4) {
        let raw = sample_raw_gaussian(n, r, seed, 11);
        let scale = (1..=r).product::<usize>() as f64;
        let once = symmetrize(n, r, &raw).unwrap();
        let p1: Vec<f64> = expand(&once).iter().map(|v| v / scale.sqrt()).collect();
        let twice = symmetrize(n, r, &p1).unwrap();
        let p2: Vec<f64> = expand(&twice).iter().map(|v| v / scale.sqrt()).collect();
        for (a, b) in p1.iter().zip(&p2) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn pds_edges_independent_given_theta() {
    let p = PdsParams::new(6, 2, 0.5, 0.3, 0.7).unwrap();
    let prob = |theta: &[f64], e: [usize; 2]| if theta[e[0]] == 1.0 && theta[e[1]] == 1.0 { p.q1 } else { p.q0 };
    let pairs = [([0, 1], [0, 2]), ([0, 1], [2, 3]), ([1, 4], [4, 5])];
    for (a, b) in pairs {
        let xs: Vec<f64> = (0..40_000u64)
            .map(|seed| {
                let (s, h) = sample_pds(&p, seed).unwrap();
                let ya = h.has_edge(&a) as u8 as f64 - prob(&s.theta, a);
                let yb = h.has_edge(&b) as u8 as f64 - prob(&s.theta, b);
                ya * yb
            })
            .collect();
        let (m, sd) = mean_sd(&xs);
        assert!(m.abs() < 4.0 * sd, "{a:?} {b:?}: {m} +- {sd}");
    }
}

#[test]
fn noise_models_correspond_on_distinct_entries() {
    let (n, r, lambda) = (4, 3, 0.8);
    let rf = 6.0f64;
    let prior = PriorSpec::bernoulli(0.5);
    let reduced = TpcaParams::new(n, r, lambda, prior.clone(), NoiseMode::NoiseReduced).unwrap();
    let sym = TpcaParams::new(n, r, rf.sqrt() * lambda, prior, NoiseMode::Symmetrized).unwrap();
    let fs: [fn(&dyn Fn(&[usize]) -> f64) -> f64; 3] = [
        |y| y(&[0, 1, 2]) + y(&[0, 1, 3]),
        |y| y(&[0, 1, 2]) * y(&[0, 1, 3]),
        |y| y(&[0, 1, 2]) * y(&[0, 1, 2]) - y(&[1, 2, 3]),
    ];
    let trials = 30_000u64;
    for f in fs {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for seed in 0..trials {
            let (_, y) = sample_general_tpca(&reduced, seed).unwrap();
            a.push(f(&|e| y.get(e)));
            let (_, ys) = sample_general_tpca(&sym, seed + trials).unwrap();
            let mut g = Substream::new(seed, 99);
            let mut fresh = |e: &[usize]| {
                let rank = ys.index().rank(e) as u64;
                ys.get(e) / rf.sqrt() + (1.0 - 1.0 / rf).sqrt() * g.item(rank).normal()
            };
            let vals: Vec<(Vec<usize>, f64)> = [[0, 1, 2], [0, 1, 3], [1, 2, 3]]
                .iter()
                .map(|e| (e.to_vec(), fresh(e)))
                .collect();
            b.push(f(&|e| vals.iter().find(|(k, _)| k == e).map(|(_, v)| *v).unwrap()));
        }
        for pow in [1, 2] {
            let pa: Vec<f64> = a.iter().map(|x| x.powi(pow)).collect();
            let pb: Vec<f64> = b.iter().map(|x| x.powi(pow)).collect();
            let ((ma, sa), (mb, sb)) = (mean_sd(&pa), mean_sd(&pb));
            let sd = (sa * sa + sb * sb).sqrt();
            assert!((ma - mb).abs() < 3.0 * sd, "moment {pow}: {ma} vs {mb} (sd {sd})");
        }
    }
}
