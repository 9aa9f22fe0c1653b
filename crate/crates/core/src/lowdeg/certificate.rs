//! Dual certificates `u` with `M^T u = c`, the exact and floating point
//! low-degree correlation, and the duality gap between them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use super::index::PairFamily;
use super::system::{LowDegModel, MomentSystem, Mode};
use crate::error::{Error, Result};
use crate::exact::{q_to_f64, qpow, solve_symmetric, Q, Surd};

/// Certificate supported on the good pairs.
#[derive(Clone, Debug)]
pub struct DualCertificate {
    pub u: BTreeMap<(usize, u32), Surd>,
    pub norm_sq: Q,
}

/// Builds the certificate and verifies `M^T u = c` on every basis graph.
pub fn build_certificate(sys: &MomentSystem) -> Result<DualCertificate> {
    let cert = certificate_values(sys)?;
    let residual = certificate_residual(sys, &cert)?;
    if let Some(a) = residual.iter().position(|r| !r.is_zero()) {
        return Err(Error::Consistency(format!(
            "M^T u - c is nonzero at graph {a}: {}",
            residual[a]
        )));
    }
    Ok(cert)
}

/// Certificate values without the verification step.
pub fn certificate_values(sys: &MomentSystem) -> Result<DualCertificate> {
    let rho = sys.model.rho();
    let one = Q::one();
    let odds = Surd::sqrt(&(rho / (&one - rho)))?;
    let sigma_inv = match &sys.model {
        LowDegModel::Pds(p) => Some(Surd::sqrt(&(&p.q0 * (&one - &p.q0)))?.recip_monomial()?),
        LowDegModel::SparsePca(_) => None,
    };
    let mut u = BTreeMap::new();
    let mut norm = Surd::zero();
    for (b, gamma) in sys.sets.good_pairs() {
        let k = gamma.count_ones() as usize;
        let mut v = &odds.pow(k) * &sys.c[b];
        if k % 2 == 1 {
            v = -v;
        }
        if let Some(s) = &sigma_inv {
            v = &v * &s.pow(sys.sets.graphs[b].size());
        }
        norm.add_product(&v, &v);
        u.insert((b, gamma), v);
    }
    let norm_sq = norm
        .to_rational()
        .ok_or_else(|| Error::Consistency("certificate norm is irrational".into()))?;
    Ok(DualCertificate { u, norm_sq })
}

/// `M^T u - c` for each basis graph.
pub fn certificate_residual(sys: &MomentSystem, cert: &DualCertificate) -> Result<Vec<Surd>> {
    let mut out = Vec::with_capacity(sys.len());
    for a in 0..sys.len() {
        let mut acc = -&sys.c[a];
        for (key, m) in sys.column(a, PairFamily::Restricted)? {
            if let Some(u) = cert.u.get(&key) {
                acc.add_product(&m, u);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Low-degree correlation and MMSE for `x = theta_1`.
#[derive(Clone, Debug)]
pub struct CorrReport {
    pub corr_sq: f64,
    pub mmse: f64,
    pub corr_sq_exact: Option<Q>,
    pub mmse_exact: Option<Q>,
    pub rank: usize,
}

impl CorrReport {
    pub fn corr(&self) -> f64 {
        libm::sqrt(self.corr_sq)
    }
}

/// `Corr^2 = c^T G^+ c / E[x^2]` from a rational Gram matrix.
pub fn corr_from_gram(gram: &[Vec<Q>], c: &[Q], second_moment: &Q) -> Result<CorrReport> {
    let sol = solve_symmetric(gram, c)?;
    let num: Q = c.iter().zip(&sol.x).map(|(a, b)| a * b).sum();
    let corr_sq = &num / second_moment;
    let mmse = (Q::one() - &corr_sq) * second_moment;
    Ok(CorrReport {
        corr_sq: q_to_f64(&corr_sq),
        mmse: q_to_f64(&mmse),
        corr_sq_exact: Some(corr_sq),
        mmse_exact: Some(mmse),
        rank: sol.rank,
    })
}

/// Same through an SVD pseudoinverse with cutoff `1e-10 sigma_max`.
pub fn corr_from_gram_f64(gram: &[Vec<f64>], c: &[f64], second_moment: f64) -> Result<CorrReport> {
    let n = c.len();
    let g = DMatrix::from_fn(n, n, |i, j| gram[i][j]);
    let eig = g.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if min < -1e-9 * max.max(1.0) {
        return Err(Error::Numerical(format!("Gram matrix not PSD: eigenvalue {min}")));
    }
    let svd = g.svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &v| m.max(v));
    let cut = 1e-10 * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    let pinv = svd
        .pseudo_inverse(cut)
        .map_err(|e| Error::Numerical(format!("pseudoinverse failed: {e}")))?;
    let cv = nalgebra::DVector::from_column_slice(c);
    let num = cv.dot(&(&pinv * &cv));
    if !num.is_finite() {
        return Err(Error::Numerical("non-finite correlation".into()));
    }
    let corr_sq = num / second_moment;
    Ok(CorrReport {
        corr_sq,
        mmse: (1.0 - corr_sq) * second_moment,
        corr_sq_exact: None,
        mmse_exact: None,
        rank,
    })
}

/// `Corr_{<=D}` and `MMSE_{<=D}` from the Gram matrix `M^T M` over the
/// full pair family.
pub fn exact_corr(sys: &MomentSystem, mode: Mode) -> Result<CorrReport> {
    let ex2 = sys.model.second_moment();
    let c = sys.scaled_c()?;
    match mode {
        Mode::Exact => corr_from_gram(&sys.gram(PairFamily::Full)?, &c, &ex2),
        Mode::Float => {
            let cf: Vec<f64> = c.iter().map(q_to_f64).collect();
            corr_from_gram_f64(&sys.gram_f64(PairFamily::Full)?, &cf, q_to_f64(&ex2))
        }
    }
}

/// Both sides of the duality bound `Corr <= ||u|| / sqrt(E[x^2])`.
#[derive(Clone, Debug)]
pub struct DualityGap {
    /// `||u||^2 / E[x^2]` for the explicit certificate.
    pub bound_sq: Q,
    /// `Corr^2` from the reference Gram matrix.
    pub corr_sq: Q,
    /// `inf ||u||^2 / E[x^2]` over certificates supported on `family`.
    pub inf_bound_sq: Q,
    pub family: PairFamily,
}

impl DualityGap {
    pub fn holds(&self) -> bool {
        self.corr_sq <= self.bound_sq && self.corr_sq <= self.inf_bound_sq
    }

    pub fn gap(&self) -> f64 {
        libm::sqrt(q_to_f64(&self.bound_sq)) - libm::sqrt(q_to_f64(&self.corr_sq))
    }
}

/// Compares a certificate with the true correlation computed from
/// `reference_gram`, an independently computed `E[phi phi^T]` in the
/// rescaled basis. With the full family the infimum must equal the truth.
pub fn duality_gap(
    sys: &MomentSystem,
    cert: &DualCertificate,
    reference_gram: &[Vec<Q>],
    family: PairFamily,
) -> Result<DualityGap> {
    let ex2 = sys.model.second_moment();
    let c = sys.scaled_c()?;
    let truth = corr_from_gram(reference_gram, &c, &ex2)?;
    let corr_sq = truth.corr_sq_exact.clone().unwrap_or_else(Q::zero);
    let inf = corr_from_gram(&sys.gram(family)?, &c, &ex2)?
        .corr_sq_exact
        .unwrap_or_else(Q::zero);
    let out = DualityGap {
        bound_sq: &cert.norm_sq / &ex2,
        corr_sq,
        inf_bound_sq: inf,
        family,
    };
    if !out.holds() {
        return Err(Error::Consistency(format!(
            "duality bound violated: Corr^2 = {} > {}",
            out.corr_sq, out.bound_sq
        )));
    }
    if family == PairFamily::Full && out.inf_bound_sq != out.corr_sq {
        return Err(Error::Consistency(
            "full family spans the basis but the infimum differs from Corr".into(),
        ));
    }
    Ok(out)
}

/// Bessel sums for coefficients `a` on the rescaled basis:
/// `(sum_{pairs} E[f psi]^2, E[f^2])`.
pub fn bessel_sums(
    sys: &MomentSystem,
    family: PairFamily,
    a: &[Q],
    reference_gram: &[Vec<Q>],
) -> Result<(Q, Q)> {
    let rows = sys.rows(family)?;
    let mut lhs = Surd::zero();
    for entries in rows.values() {
        let mut dot = Surd::zero();
        for (alpha, m) in entries {
            if !a[*alpha].is_zero() {
                dot.add_assign_ref(&m.scale(&a[*alpha]));
            }
        }
        lhs.add_product(&dot, &dot);
    }
    let lhs = lhs
        .to_rational()
        .ok_or_else(|| Error::Consistency("Bessel sum is irrational".into()))?;
    let mut rhs = Q::zero();
    for (i, row) in reference_gram.iter().enumerate() {
        if a[i].is_zero() {
            continue;
        }
        for (j, g) in row.iter().enumerate() {
            if !a[j].is_zero() {
                rhs += &a[i] * g * &a[j];
            }
        }
    }
    Ok((lhs, rhs))
}

/// Exact `MMSE_{<=D}` at a list of `q1` values for the planted model.
pub fn mmse_curve(base: &LowDegModel, d: usize, q1s: &[Q]) -> Result<Vec<Q>> {
    let LowDegModel::Pds(p) = base else {
        return Err(Error::Unsupported("q1 sweep needs the planted model".into()));
    };
    q1s.iter()
        .map(|q1| {
            let mut m = p.clone();
            m.q1 = q1.clone();
            let sys = super::system::build_moment_system(&LowDegModel::Pds(m), d, Mode::Exact)?;
            let rep = exact_corr(&sys, Mode::Exact)?;
            Ok(rep.mmse_exact.unwrap_or_else(Q::zero))
        })
        .collect()
}

/// Lower-order term of the certificate norm at `lambda = 0`:
/// `rho^2 / (1 - rho)`.
pub fn empty_graph_norm(rho: &Q) -> Q {
    qpow(rho, 2) / (Q::one() - rho)
}
