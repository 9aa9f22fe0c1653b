//! Exact desk-scale checks of the low-degree machinery: closed-form moment
//! systems, Gram matrices, dual certificates and the conditional system.

pub mod certificate;
pub mod conditional;
pub mod hermite;
pub mod index;
pub mod oracle;
pub mod system;

pub use certificate::{
    bessel_sums, build_certificate, certificate_residual, certificate_values, corr_from_gram,
    corr_from_gram_f64, duality_gap, empty_graph_norm, exact_corr, mmse_curve, CorrReport,
    DualCertificate, DualityGap,
};
pub use conditional::{
    build_conditional_system, conditional_bounds_report, event_check, event_probability_mc,
    BoundsRow, ConditionalSystem, EventEstimate, EventSpec,
};
pub use index::{EdgeUniverse, Graph, IndexSets, PairFamily};
pub use oracle::{compare_with_oracle, oracle_gram, oracle_tables, OracleComparison, OracleTables};
pub use system::{
    build_moment_system, reduction_check, LowDegModel, MomentSystem, Mode, PdsExact,
    ReductionReport, SparsePcaExact,
};
