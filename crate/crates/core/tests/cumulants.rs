use num_traits::{Signed, Zero};
use planted_core::cumulants::{
    bar_degrees, cumulant_corr_bound, excess_delta, excess_edges, exact_corr_enumerated,
    for_each_graph, good_count_check, is_good_general, monte_carlo_corr, CumulantTable,
    MomentEnvelope, Prior,
};
use planted_core::exact::{q, qi, qpow, q_to_f64, Q};
use planted_core::lowdeg::Graph;
use proptest::prelude::*;

fn skewed() -> Prior {
    Prior::Discrete(vec![(q(-1, 2), q(4, 5)), (qi(2), q(1, 5))])
}

fn priors() -> Vec<Prior> {
    vec![Prior::Rademacher, Prior::Gaussian, skewed()]
}

fn graphs(t: &CumulantTable, d: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for_each_graph(&t.universe, d, |g| out.push(g));
    out
}

#[test]
fn skewed_prior_is_standardized() {
    assert!(skewed().is_standardized());
    assert_eq!(skewed().moment(3), q(3, 2));
    assert!(Prior::Gaussian.is_standardized());
    assert_eq!(Prior::Gaussian.moment(6), qi(15));
}

#[test]
fn non_good_cumulants_vanish() {
    for prior in priors() {
        for (n, r, m) in [(6, 2, 2), (5, 2, 3), (5, 3, 3), (6, 3, 2)] {
            let mut t = CumulantTable::new(n, r, m, prior.clone(), q(2, 3)).unwrap();
            let mut good = 0;
            let mut bad = 0;
            for g in graphs(&t, 3) {
                let k = t.kappa(&g);
                if t.is_good(&g) {
                    good += 1;
                } else {
                    assert!(k.is_zero(), "{} n={n} r={r} m={m} {g:?}: {k}", prior.name());
                    bad += 1;
                }
            }
            assert!(good > 1 && bad > 0);
        }
    }
}

#[test]
fn disjoint_blocks_vanish() {
    let mut t = CumulantTable::new(6, 2, 2, skewed(), q(1, 2)).unwrap();
    let u = t.universe.clone();
    // alpha bar = doubled [2] edge plus a separate double edge on {3, 4}.
    let e01 = u.slot(&[0, 1]).unwrap();
    let e34 = u.slot(&[3, 4]).unwrap();
    let mut g = Graph::from_slots(&[e01]);
    g.add(e34, 2);
    assert!(!is_good_general(&u, &g, 2));
    assert!(bar_degrees(&u, &g, 2).iter().all(|&d| d == 0 || d >= 2));
    assert!(t.kappa(&g).is_zero());
    let single = Graph::from_slots(&[e01]);
    assert_eq!(t.kappa(&single), q(1, 2));
}

#[test]
fn single_edge_and_estimand_moments() {
    for prior in priors() {
        let mut t = CumulantTable::new(4, 3, 3, prior.clone(), q(3, 7)).unwrap();
        let e = Graph::from_slots(&[t.universe.slot(&[0, 1, 2]).unwrap()]);
        assert!(t.is_good(&e));
        assert_eq!(t.kappa(&e), q(3, 7));
        assert!(t.kappa(&Graph::empty()).is_zero());
        let row = t.envelope_check(&e).unwrap();
        assert_eq!(row.bound, row.kappa.abs());
    }
}

#[test]
fn envelope_holds_on_good_graphs() {
    for prior in priors() {
        for (n, r, m) in [(5, 2, 2), (4, 3, 3), (5, 3, 2)] {
            let mut t = CumulantTable::new(n, r, m, prior.clone(), q(3, 5)).unwrap();
            let mut strict = 0;
            for g in graphs(&t, 3) {
                if g.is_empty() || !t.is_good(&g) {
                    continue;
                }
                let row = t.envelope_check(&g).unwrap();
                if row.kappa.abs() < row.bound {
                    strict += 1;
                }
            }
            assert!(strict > 0);
        }
    }
}

#[test]
fn doubled_edge_envelope_is_strict() {
    let mut t = CumulantTable::new(3, 2, 2, Prior::Gaussian, q(1, 2)).unwrap();
    let e = t.universe.slot(&[0, 1]).unwrap();
    let mut g = Graph::empty();
    g.add(e, 2);
    let row = t.envelope_check(&g).unwrap();
    assert!(row.kappa.abs() < row.bound, "{row:?}");
}

#[test]
fn complexity_recursion_matches_direct_and_bound() {
    for (n, r, m, d) in [(5, 2, 2, 4), (4, 3, 3, 3), (4, 2, 3, 4)] {
        let mut t = CumulantTable::new(n, r, m, Prior::Rademacher, q(1, 2)).unwrap();
        let u = t.universe.clone();
        let mut above_one = 0;
        for g in graphs(&t, d) {
            if g.is_empty() || !t.is_good(&g) {
                continue;
            }
            let h = t.complexity(&g).unwrap();
            assert_eq!(h, t.complexity_direct(&g).unwrap());
            let p = excess_edges(&u, &g, m);
            assert!(p >= 0);
            let bound = (2 * g.size() as u128).pow(p as u32);
            assert!(h <= bound, "H = {h} > {bound} for {g:?}");
            let delta = excess_delta(&bar_degrees(&u, &g, m));
            assert!(delta as i64 <= 3 * p);
            if h > 1 {
                above_one += 1;
            }
        }
        assert!(above_one > 0);
    }
}

#[test]
fn envelope_is_sub_multiplicative() {
    for prior in [Prior::Rademacher, skewed()] {
        let env = MomentEnvelope::new(&prior, 16);
        for s in 0..=8 {
            for t in 0..=8 {
                assert!(env.get(s).unwrap() * env.get(t).unwrap() <= *env.get(s + t).unwrap());
            }
        }
    }
    let g = Prior::Gaussian;
    let m = |t: usize| (0..=t).map(|s| g.abs_moment_f64(s)).fold(0.0f64, f64::max);
    for s in 0..=8 {
        for t in 0..=8 {
            assert!(m(s) * m(t) <= m(s + t) * (1.0 + 1e-12));
        }
    }
    assert!(q_to_f64(&g.abs_moment_lower(3)) <= g.abs_moment_f64(3));
}

#[test]
fn bound_special_cases() {
    let mut t = CumulantTable::new(5, 2, 2, Prior::Gaussian, Q::zero()).unwrap();
    assert!(cumulant_corr_bound(&mut t, 3).unwrap().value.is_zero());
    for prior in priors() {
        let lambda = q(2, 5);
        let mut t = CumulantTable::new(5, 3, 3, prior, lambda.clone()).unwrap();
        let b = cumulant_corr_bound(&mut t, 1).unwrap();
        assert_eq!(b.value, &lambda * &lambda);
        assert_eq!(b.contributing, 1);
    }
}

#[test]
fn good_graph_counts_within_bound() {
    let t = CumulantTable::new(6, 2, 2, Prior::Rademacher, q(1, 2)).unwrap();
    let rows = good_count_check(&t, 3).unwrap();
    assert!(!rows.is_empty());
}

#[test]
fn bound_dominates_correlation() {
    let mut t = CumulantTable::new(4, 2, 2, Prior::Rademacher, q(1, 2)).unwrap();
    let bound = cumulant_corr_bound(&mut t, 2).unwrap();
    let exact = exact_corr_enumerated(&t, 2).unwrap();
    assert!(exact <= bound.value, "{exact} > {}", bound.value);
    let mc = monte_carlo_corr(&t, 2, 60_000, 12, 5).unwrap();
    let ex = q_to_f64(&exact);
    assert!(bound.value_f64() >= mc.estimate - 3.0 * mc.sigma);
    assert!((mc.estimate - ex).abs() < 6.0 * mc.sigma + 0.01, "{mc:?} vs {ex}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn cumulants_scale_with_lambda(num in 1i64..20, den in 1i64..20, tn in -5i64..6) {
        let lam = q(num, den);
        let t = q(tn, 3);
        let mut a = CumulantTable::new(4, 2, 2, skewed(), lam.clone()).unwrap();
        let mut b = CumulantTable::new(4, 2, 2, skewed(), &lam * &t).unwrap();
        for g in graphs(&a, 2) {
            let ka = a.kappa(&g);
            let kb = b.kappa(&g);
            prop_assert_eq!(kb, ka * qpow(&t, g.size() as i64));
        }
    }
}
