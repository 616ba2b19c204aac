//! Exact computations for free products of finite-dimensional algebras with
//! faithful states: expansion factors, modular invariant groups, a
//! factoriality test, and a truncated free-product Fock space.

pub mod algebra;
pub mod classify;
pub mod expansion;
pub mod figures;
pub mod fock;
pub mod gns;
pub mod groups;
pub mod input;
pub mod linalg;
pub mod modular;
pub mod primes;
pub mod random;
pub mod rational;
pub mod verify;

pub use algebra::{
    make_phi_lambda, make_psi_lambda, make_trace, make_uniform, AlgebraError, AlgebraKind,
    Dimension, Element, MatrixBlock, MatrixUnit, StateAlgebra,
};
pub use classify::{
    classify_pair, region_membership, ClassifyError, FactorReport, HypothesisCheck, Verdict,
};
pub use expansion::{
    ef_commutative_closed, ef_exact, ef_lower_bound_certificate, ef_matrix_closed, ExpansionError,
    ExpansionFactor,
};
pub use figures::{CsvCell, CsvSeries};
pub use fock::{build_fock, FockError, FockVector, FockWord, Letter, TruncatedFock};
pub use gns::{build_gns, equivariant_basis, EquivariantBasis, GnsSpace};
pub use groups::{
    intersect, modular_invariant_group, type_candidates, ClosedSubgroup, GroupError, TypeCandidates,
};
pub use input::{parse_algebras, parse_pair, InputError};
pub use modular::{build_modular, witness_check, ModularFlow, WitnessFailure};
pub use rational::{parse_rational, Rational};
pub use verify::{run_verify, VerifyConfig, VerifyReport};
