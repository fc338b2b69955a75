//! Non-commutative Fourier analysis on finite-dimensional 2-box models.
//!
//! The crate builds Markov-trace algebras for group and Temperley-Lieb models,
//! applies the string Fourier transform, evaluates Schatten-type p-norms and
//! Rényi entropies, checks the norm bounds and entropic uncertainty
//! principles, classifies extremizers, and estimates transform norms by
//! optimization.

pub mod algebra;
pub mod error;
pub mod extremizers;
pub mod inequalities;
pub mod models;
pub mod records;
pub mod search;
pub mod transform;

pub use algebra::{make_algebra, BlockSpec, Element, ElementDoc, EntropyLimit, MarkovAlgebra, RandomKind, Spectrum, C64};
pub use error::{Error, Result};
pub use models::{abelian_model, cyclic_model, nonabelian_model, s3, s3_model, tl_model, IrrepTable, ModelKind, ModelSpec, PlanarModel, Sector, Side};
pub use transform::{conv, sft, sft_inverse, validate_model, Direction};
pub use extremizers::{classify, in_family, is_biprojection, is_bishift_via_ds, is_biunitary, is_extremal, is_projection, is_shift, is_trace_one_projection, is_unitary, table_row, Family, FamilyLabel, CLASSIFY_TOL};
pub use inequalities::{
    check_ds, check_hausdorff_young, check_hb, check_holder, check_norm1_comparison, check_entropy_monotone, check_norm_bounds, check_plancherel, check_unitary_line, check_up1, check_up2, check_young, k_value, CheckReport, Evaluated, Regime, Region, RegionPoint, UnitaryLine,
};
pub use records::{CheckRow, ClassifyRow, SweepRow, ValidityRow};
pub use search::{estimate_young_constant, gradient_check, maximize_ratio, structured_candidates, sweep_grid, up2_validity_map, SearchConfig, SearchResult};
