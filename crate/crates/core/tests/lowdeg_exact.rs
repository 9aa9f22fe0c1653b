use num_traits::{One, Zero};
use planted_core::exact::{q, qi, Q, Surd};
use planted_core::lowdeg::{
    bessel_sums, build_certificate, build_moment_system, compare_with_oracle, duality_gap,
    empty_graph_norm, exact_corr, mmse_curve, oracle_tables, reduction_check, LowDegModel,
    MomentSystem, Mode, OracleTables, PairFamily, PdsExact, SparsePcaExact,
};
use proptest::prelude::*;
use std::sync::OnceLock;

fn pds(n: usize, r: usize) -> LowDegModel {
    LowDegModel::Pds(PdsExact {
        n,
        r,
        rho: q(1, 3),
        q0: q(1, 4),
        q1: q(2, 3),
    })
}

fn spca(n: usize, r: usize, lambda: Q) -> LowDegModel {
    LowDegModel::SparsePca(SparsePcaExact {
        n,
        r,
        rho: q(1, 4),
        lambda,
    })
}

#[test]
fn pds_literal_oracle_agreement() {
    let sys = build_moment_system(&pds(4, 2), 2, Mode::Exact).unwrap();
    for family in [PairFamily::Restricted, PairFamily::Full] {
        let oracle = oracle_tables(&sys, family).unwrap();
        let cmp = compare_with_oracle(&sys, &oracle, family).unwrap();
        assert!(cmp.m_checked + cmp.c_checked >= 500, "{cmp:?}");
        assert!(cmp.m_nonzero > 0);
    }
}

#[test]
fn pds_factored_oracle_agreement_r3() {
    for d in 1..=2 {
        let sys = build_moment_system(&pds(5, 3), d, Mode::Exact).unwrap();
        let oracle = oracle_tables(&sys, PairFamily::Restricted).unwrap();
        compare_with_oracle(&sys, &oracle, PairFamily::Restricted).unwrap();
    }
}

#[test]
fn sparse_oracle_agreement() {
    for (n, r, d) in [(3, 2, 2), (4, 2, 2), (4, 3, 2), (5, 3, 2)] {
        let sys = build_moment_system(&spca(n, r, q(3, 2)), d, Mode::Exact).unwrap();
        let oracle = oracle_tables(&sys, PairFamily::Restricted).unwrap();
        let cmp = compare_with_oracle(&sys, &oracle, PairFamily::Restricted).unwrap();
        assert!(cmp.m_nonzero > 0);
    }
}

#[test]
fn certificates_have_zero_residual() {
    for (n, r, d) in [(4, 2, 3), (5, 2, 2), (5, 2, 3), (5, 3, 3)] {
        let sys = build_moment_system(&pds(n, r), d, Mode::Exact).unwrap();
        let cert = build_certificate(&sys).unwrap();
        assert!(cert.norm_sq > Q::zero());
    }
    for (n, r, d) in [(4, 2, 3), (5, 2, 3), (5, 3, 2)] {
        let sys = build_moment_system(&spca(n, r, q(1, 2)), d, Mode::Exact).unwrap();
        build_certificate(&sys).unwrap();
    }
}

#[test]
fn certificate_sign_pattern() {
    let sys = build_moment_system(&pds(4, 2), 2, Mode::Exact).unwrap();
    let cert = build_certificate(&sys).unwrap();
    assert_eq!(cert.u[&(0, 0)], Surd::from_rational(q(1, 3)));
    for (&(b, g), v) in &cert.u {
        let expect = if g.count_ones() % 2 == 0 { 1 } else { -1 };
        assert!(sys.c[b].signum() > 0);
        assert_eq!(v.signum(), expect, "pair ({b},{g})");
    }
}

#[test]
fn pds_corr_matches_literal_gram_and_duality() {
    let sys = build_moment_system(&pds(4, 2), 2, Mode::Exact).unwrap();
    let oracle = oracle_tables(&sys, PairFamily::Full).unwrap();
    let cert = build_certificate(&sys).unwrap();
    let full = duality_gap(&sys, &cert, &oracle.gram, PairFamily::Full).unwrap();
    let restricted = duality_gap(&sys, &cert, &oracle.gram, PairFamily::Restricted).unwrap();
    let rep = exact_corr(&sys, Mode::Exact).unwrap();
    assert_eq!(rep.corr_sq_exact.as_ref().unwrap(), &full.corr_sq);
    assert!(full.corr_sq <= full.bound_sq);
    assert!(restricted.corr_sq <= restricted.inf_bound_sq);
    assert!(rep.corr() > (1.0f64 / 3.0).sqrt());
    let float = exact_corr(&sys, Mode::Float).unwrap();
    assert!((float.corr_sq - rep.corr_sq).abs() < 1e-9);
}

#[test]
fn sparse_corr_duality_is_tight() {
    let sys = build_moment_system(&spca(4, 2, q(1, 2)), 2, Mode::Exact).unwrap();
    let oracle = oracle_tables(&sys, PairFamily::Full).unwrap();
    compare_with_oracle(&sys, &oracle, PairFamily::Full).unwrap();
    let cert = build_certificate(&sys).unwrap();
    let gap = duality_gap(&sys, &cert, &oracle.gram, PairFamily::Full).unwrap();
    assert!(gap.corr_sq <= gap.bound_sq);
    assert_eq!(gap.corr_sq, gap.inf_bound_sq);
}

#[test]
fn degree_zero_and_null_signal() {
    let rho = q(1, 3);
    let d0 = exact_corr(&build_moment_system(&pds(4, 2), 0, Mode::Exact).unwrap(), Mode::Exact).unwrap();
    assert_eq!(d0.corr_sq_exact.unwrap(), rho);
    assert_eq!(d0.mmse_exact.unwrap(), &rho * (Q::one() - &rho));
    let null = LowDegModel::Pds(PdsExact {
        n: 4,
        r: 2,
        rho: rho.clone(),
        q0: q(1, 4),
        q1: q(1, 4),
    });
    for d in 0..=2 {
        let rep = exact_corr(&build_moment_system(&null, d, Mode::Exact).unwrap(), Mode::Exact).unwrap();
        assert_eq!(rep.corr_sq_exact.unwrap(), rho);
    }
    let rho_s = q(1, 4);
    for d in 0..=2 {
        let sys = build_moment_system(&spca(4, 2, Q::zero()), d, Mode::Exact).unwrap();
        let rep = exact_corr(&sys, Mode::Exact).unwrap();
        assert_eq!(rep.corr_sq_exact.unwrap(), rho_s);
        let cert = build_certificate(&sys).unwrap();
        assert_eq!(cert.norm_sq, empty_graph_norm(&rho_s));
        let oracle = oracle_tables(&sys, PairFamily::Restricted).unwrap();
        duality_gap(&sys, &cert, &oracle.gram, PairFamily::Restricted).unwrap();
    }
}

#[test]
fn reduction_hypothesis() {
    for model in [pds(4, 2), pds(5, 3), spca(4, 2, q(2, 3))] {
        let sys = build_moment_system(&model, 2, Mode::Exact).unwrap();
        let rep = reduction_check(&sys).unwrap();
        assert!(rep.non_good > 0 && rep.entries_checked > 0);
    }
}

#[test]
fn mmse_non_increasing_in_q1() {
    let base = pds(4, 2);
    let grid = [q(3, 10), q(1, 2), q(3, 4)];
    let curve = mmse_curve(&base, 2, &grid).unwrap();
    assert!(curve[0] >= curve[1] && curve[1] >= curve[2], "{curve:?}");
    assert!(curve[0] > curve[2]);
}

#[test]
fn faulty_entry_breaks_certificate() {
    let mut sys = build_moment_system(&pds(4, 2), 2, Mode::Exact).unwrap();
    build_certificate(&sys).unwrap();
    sys.perturb(1, 0, 1, q(1, 1_000_000));
    assert!(build_certificate(&sys).is_err());
}

fn pds_fixture() -> &'static (MomentSystem, OracleTables) {
    static CELL: OnceLock<(MomentSystem, OracleTables)> = OnceLock::new();
    CELL.get_or_init(|| {
        let sys = build_moment_system(&pds(4, 2), 2, Mode::Exact).unwrap();
        let oracle = oracle_tables(&sys, PairFamily::Full).unwrap();
        (sys, oracle)
    })
}

fn bessel_inputs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((-20i64..=20, 1i64..=9), 22)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bessel_inequality(coeffs in bessel_inputs()) {
        let (sys, oracle) = pds_fixture();
        prop_assert_eq!(sys.len(), coeffs.len());
        let a: Vec<Q> = coeffs.iter().map(|&(x, y)| q(x, y)).collect();
        let (lhs, rhs) = bessel_sums(sys, PairFamily::Restricted, &a, &oracle.gram).unwrap();
        prop_assert!(lhs <= rhs);
        let (full, rhs2) = bessel_sums(sys, PairFamily::Full, &a, &oracle.gram).unwrap();
        prop_assert_eq!(full, rhs2);
    }

    #[test]
    fn sparse_bessel_equality(coeffs in proptest::collection::vec((-9i64..=9, 1i64..=5), 6)) {
        let sys = build_moment_system(&spca(3, 2, q(1, 2)), 1, Mode::Exact).unwrap();
        let oracle = oracle_tables(&sys, PairFamily::Restricted).unwrap();
        let mut a: Vec<Q> = coeffs.iter().map(|&(x, y)| q(x, y)).collect();
        a.resize(sys.len(), qi(0));
        let (lhs, rhs) = bessel_sums(&sys, PairFamily::Restricted, &a, &oracle.gram).unwrap();
        prop_assert!(lhs <= rhs);
        let (full, rhs2) = bessel_sums(&sys, PairFamily::Full, &a, &oracle.gram).unwrap();
        prop_assert_eq!(full, rhs2);
    }
}
