//! Exact symbolic engine for Capelli-type determinant identities.
//!
//! Everything here works in the polynomial Weyl algebra over the integers:
//! polynomial-coefficient differential operators in the entries of an n x n
//! matrix of indeterminates (or of a symmetric matrix, for the Turnbull
//! variant). Operators are kept in normal order (multiplication variables to
//! the left, derivatives to the right), which makes operator equality
//! decidable by comparing coefficient maps. On top of that sit:
//!
//! * [`polynomial`] — sparse multivariate polynomials with `BigInt`
//!   coefficients;
//! * [`weyl`] — normally ordered differential operators and the classical
//!   generators `D_ij`, `S_ij`, `d_ij`;
//! * [`configs`] — Capelli configurations `(sigma, phi)`, the classes `C^m`,
//!   and the straightening map `Lambda` with its fibers;
//! * [`polarized`] — polarized products `Delta_ij` / `Sigma_ij` and the
//!   operator attached to a configuration;
//! * [`detops`] — column determinants of matrices with operator entries;
//! * [`identities`] — the verifiers (Capelli, Cauchy–Binet, Turnbull, dual
//!   Capelli, Cayley) and convention pinning.

pub mod configs;
pub mod detops;
pub mod identities;
pub mod polarized;
pub mod polynomial;
pub mod weyl;

pub use configs::{enumerate_configs, fiber, involution_d, CapelliConfig, ConfigError, Permutation};
pub use detops::{ColumnOrder, OperatorMatrix};
pub use identities::{
    pin_convention, verify_capelli, verify_cauchy_binet, verify_cayley, verify_dual_capelli,
    verify_theorem1, verify_turnbull, verify_turnbull_lemma, Convention, Identity, PinError,
    VerificationReport, VerifyError,
};
pub use polarized::{config_operator, delta_factor, operatorize, BiPolynomial, OperatorizeMode, UnitValue};
pub use polynomial::{det, Exponents, Family, Grid, ParseError, Polynomial, VarId};
pub use weyl::{generator, GeneratorKind, WeylElement, WeylTerm};
