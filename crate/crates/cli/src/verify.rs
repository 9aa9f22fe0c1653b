//! One-shot runner over the exact oracle, bound and certificate suites.

use std::time::Instant;

use anyhow::{anyhow, ensure, Result};
use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use planted_core::cumulants::{for_each_graph, CumulantTable, Prior};
use planted_core::exact::{q, Q};
use planted_core::hypertrees::{
    brute_force_automorphisms, brute_force_forest_count, build_class_table, count_rooted_forests,
};
use planted_core::lowdeg::{
    build_certificate, build_conditional_system, build_moment_system, compare_with_oracle,
    conditional_bounds_report, duality_gap, oracle_tables, EventSpec, LowDegModel, Mode, PairFamily,
    PdsExact, SparsePcaExact,
};
use planted_core::models::SubsetTensor;
use planted_core::recovery::{color_coded_score, naive_colorful_score, Coloring};
use planted_core::rng::{stream, Substream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl std::str::FromStr for Level {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(anyhow!("level must be fast or full, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub fault_injected: bool,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn run(name: &str, out: &mut Vec<CheckResult>, f: impl FnOnce() -> Result<String>) {
    let clock = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(e) => (false, format!("{e:#}")),
    };
    out.push(CheckResult {
        name: name.into(),
        passed,
        detail,
        seconds: clock.elapsed().as_secs_f64(),
    });
}

fn pds(n: usize, r: usize) -> PdsExact {
    PdsExact { n, r, rho: q(1, 3), q0: q(1, 4), q1: q(2, 3) }
}

fn spca(n: usize, r: usize) -> LowDegModel {
    LowDegModel::SparsePca(SparsePcaExact { n, r, rho: q(1, 4), lambda: q(1, 2) })
}

fn forests(rs: &[usize], kmax: usize) -> Result<String> {
    let mut cases = 0;
    for &r in rs {
        for k in 1..=kmax {
            for t in (1..=k).filter(|t| (k - t) % (r - 1) == 0) {
                let formula = count_rooted_forests(k, t, r)?;
                let brute = brute_force_forest_count(k, t, r, 1 << 26)?;
                ensure!(formula == brute, "k={k} t={t} r={r}: {formula} != {brute}");
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (k, t, r) cases"))
}

fn class_aut(cases: &[(usize, usize)]) -> Result<String> {
    let mut checked = 0;
    for &(ell, r) in cases {
        for c in &build_class_table(ell, r)?.classes {
            ensure!(c.aut == BigUint::from(brute_force_automorphisms(&c.tree)), "ell={ell} r={r}");
            checked += 1;
        }
    }
    Ok(format!("{checked} classes"))
}

fn random_tensor(n: usize, r: usize, seed: u64) -> SubsetTensor<f64> {
    let mut s = Substream::new(seed, stream::MONTE_CARLO);
    let mut idx = 0u64;
    SubsetTensor::from_fn(n, r, |_| {
        idx += 1;
        s.item(idx).normal()
    })
}

fn dp_naive(cases: &[(usize, usize, usize)]) -> Result<String> {
    let mut compared = 0;
    for (j, &(n, r, ell)) in cases.iter().enumerate() {
        let y = random_tensor(n, r, j as u64);
        let table = build_class_table(ell, r)?;
        let c = Coloring::random(n, table.k(), j as u64, 0);
        for class in &table.classes {
            let dp = color_coded_score(&y, &c, &class.tree)?;
            for (i, v) in dp.iter().enumerate() {
                let naive = naive_colorful_score(&y, &c, &class.tree, i)?;
                ensure!((v - naive).abs() <= 1e-9 * naive.abs().max(1.0), "n={n} r={r} ell={ell} i={i}");
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} scores"))
}

fn oracle(model: &LowDegModel, d: usize) -> Result<String> {
    let sys = build_moment_system(model, d, Mode::Exact)?;
    let tables = oracle_tables(&sys, PairFamily::Restricted)?;
    let cmp = compare_with_oracle(&sys, &tables, PairFamily::Restricted)?;
    Ok(format!("{} c and {} M entries equal", cmp.c_checked, cmp.m_checked))
}

fn certificate(model: &LowDegModel, d: usize, fault: bool) -> Result<String> {
    let mut sys = build_moment_system(model, d, Mode::Exact)?;
    if fault {
        sys.perturb(1, 0, 1, q(1, 1_000_000));
    }
    let cert = build_certificate(&sys)?;
    Ok(format!("{} pairs, |u|^2 = {}", cert.u.len(), cert.norm_sq))
}

fn duality(model: &LowDegModel, d: usize) -> Result<String> {
    let sys = build_moment_system(model, d, Mode::Exact)?;
    let tables = oracle_tables(&sys, PairFamily::Full)?;
    let cert = build_certificate(&sys)?;
    let gap = duality_gap(&sys, &cert, &tables.gram, PairFamily::Full)?;
    Ok(format!("Corr^2 = {} <= {}", gap.corr_sq, gap.bound_sq))
}

fn conditional(n: usize, d: usize, taus: &[Q]) -> Result<String> {
    let p = PdsExact { n, r: 2, rho: q(1, 5), q0: q(1, 4), q1: q(1, 2) };
    let mut rows = 0;
    for tau in taus {
        let sys = build_conditional_system(&p, d, &EventSpec::with_tau(tau.clone())?)?;
        sys.key_identity()?;
        ensure!(sys.residual()?.iter().all(|v| v.is_zero()), "nonzero residual at tau={tau}");
        let (a, b) = sys.norm_sq()?;
        ensure!(a == b, "norm identity fails at tau={tau}");
        rows += conditional_bounds_report(&sys)?.len();
    }
    Ok(format!("{rows} bound rows"))
}

fn cumulants(cases: &[(usize, usize, usize)], d: usize) -> Result<String> {
    let mut zero = 0;
    for prior in [Prior::Rademacher, Prior::Gaussian] {
        for &(n, r, m) in cases {
            let mut t = CumulantTable::new(n, r, m, prior.clone(), q(2, 3))?;
            let mut graphs = Vec::new();
            for_each_graph(&t.universe, d, |g| graphs.push(g));
            for g in graphs {
                if t.is_good(&g) {
                    ensure!(t.envelope_check(&g)?.holds, "envelope fails on {g:?}");
                } else {
                    ensure!(t.kappa(&g).is_zero(), "nonzero cumulant on non-good {g:?}");
                    zero += 1;
                }
            }
        }
    }
    Ok(format!("{zero} non-good cumulants vanish"))
}

/// Runs the suites for `level`; with `inject_fault` one `M` entry of the
/// certificate system is perturbed by `1/10^6`.
pub fn verify_all(level: Level, inject_fault: bool) -> VerifyReport {
    let mut c = Vec::new();
    let full = level == Level::Full;
    let p42 = LowDegModel::Pds(pds(4, 2));
    run("forest counts", &mut c, || forests(if full { &[2, 3] } else { &[2] }, if full { 7 } else { 6 }));
    run("class automorphisms", &mut c, || {
        class_aut(if full { &[(0, 2), (1, 2), (2, 2), (0, 3), (1, 3)] } else { &[(0, 2), (1, 2)] })
    });
    run("dp vs naive", &mut c, || {
        if full {
            dp_naive(&[(8, 2, 0), (9, 2, 1), (10, 2, 2), (8, 3, 0), (10, 3, 1)])
        } else {
            dp_naive(&[(8, 2, 0), (9, 2, 1)])
        }
    });
    run("oracle agreement pds n=4 r=2 D=2", &mut c, || oracle(&p42, 2));
    run("oracle agreement sparse n=4 r=2 D=2", &mut c, || oracle(&spca(4, 2), 2));
    run("certificate pds n=4 r=2 D=2", &mut c, || certificate(&p42, 2, inject_fault));
    run("certificate sparse n=4 r=2 D=3", &mut c, || certificate(&spca(4, 2), 3, false));
    run("duality pds n=4 r=2 D=2", &mut c, || duality(&p42, 2));
    run("conditional n=4 D=2", &mut c, || conditional(4, 2, &[q(6, 5), q(4, 5)]));
    run("cumulants r=2", &mut c, || cumulants(&[(5, 2, 2)], 3));
    if full {
        run("oracle agreement pds n=5 r=3 D=2", &mut c, || oracle(&LowDegModel::Pds(pds(5, 3)), 2));
        run("oracle agreement sparse n=5 r=3 D=2", &mut c, || oracle(&spca(5, 3), 2));
        for (n, r, d) in [(5, 2, 3), (5, 3, 3)] {
            let name = format!("certificate pds n={n} r={r} D={d}");
            run(&name, &mut c, || certificate(&LowDegModel::Pds(pds(n, r)), d, false));
        }
        run("certificate sparse n=5 r=3 D=2", &mut c, || certificate(&spca(5, 3), 2, false));
        run("conditional n=5 D=3", &mut c, || conditional(5, 3, &[q(4, 5), q(3, 5)]));
        run("cumulants r=3", &mut c, || cumulants(&[(6, 2, 2), (5, 3, 3), (6, 3, 2)], 3));
    }
    VerifyReport {
        level,
        fault_injected: inject_fault,
        passed: c.iter().all(|r| r.passed),
        checks: c,
    }
}
