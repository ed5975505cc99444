//! Polarized bilinear products and the operator attached to a configuration.
//!
//! A *bipolynomial* mixes the `x` family with its polarization partner `y`.
//! The bilinear factors are
//!
//! ```text
//! Delta_ij = sum_k x[i,k] y[j,k]            (standard grid)
//! Sigma_ij = sum_k (1 + delta_jk) xs[i,k] ys[j,k]   (symmetric grid)
//! ```
//!
//! *Operatorizing* replaces each `y` by the derivative with respect to its
//! `x` partner, monomial by monomial. In [`OperatorizeMode::Normal`] the
//! derivatives go to the right (the result is already normally ordered); in
//! [`OperatorizeMode::Dual`] they go to the left and the product is then
//! re-normalized. Note `operatorize` is linear but not multiplicative — that
//! failure is exactly what the Capelli-type corrections measure.

use num_bigint::BigInt;
use num_traits::One;

use crate::configs::CapelliConfig;
use crate::polynomial::{Exponents, Family, Grid, Polynomial, VarId};
use crate::weyl::WeylElement;

/// A polynomial whose variables may range over both the `x` and `y` families.
pub type BiPolynomial = Polynomial;

/// Where the derivatives land when a bipolynomial becomes an operator.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OperatorizeMode {
    /// `x^a y^b -> x^a del^b`: derivatives to the right.
    Normal,
    /// `x^a y^b -> del^b x^a`, re-normalized: derivatives act first.
    Dual,
}

/// The scalar a suppressed factor contributes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnitValue {
    PlusOne,
    MinusOne,
}

impl UnitValue {
    pub fn as_int(self) -> i64 {
        match self {
            UnitValue::PlusOne => 1,
            UnitValue::MinusOne => -1,
        }
    }
}

/// The bilinear factor `Delta_ij` (standard grid) or `Sigma_ij` (symmetric
/// grid) on an `n`-column grid.
pub fn delta_factor(grid: Grid, n: usize, i: usize, j: usize) -> BiPolynomial {
    assert!(n >= 1, "delta factor needs n >= 1");
    assert!(
        (1..=n).contains(&i) && (1..=n).contains(&j),
        "delta factor index out of range: ({i},{j}) with n = {n}"
    );
    let mut out = Polynomial::zero();
    for k in 1..=n {
        let (xv, yv, weight) = match grid {
            Grid::Standard => (VarId::x(i, k), VarId::y(j, k), 1),
            Grid::Symmetric => (VarId::xs(i, k), VarId::ys(j, k), if j == k { 2 } else { 1 }),
        };
        out = &out + &Polynomial::monomial(Exponents::of([(xv, 1), (yv, 1)]), weight);
    }
    out
}

/// Turns a bipolynomial into a differential operator, monomial by monomial.
pub fn operatorize(f: &BiPolynomial, mode: OperatorizeMode) -> WeylElement {
    let mut out = WeylElement::zero();
    for (e, c) in f.terms() {
        let x_part = Exponents::of(e.iter().filter(|(v, _)| v.family() == Family::X));
        let d_part = Exponents::of(
            e.iter().filter(|(v, _)| v.family() == Family::Y).map(|(v, k)| (v.as_x(), k)),
        );
        let word = match mode {
            OperatorizeMode::Normal => WeylElement::term(x_part, d_part, c.clone()),
            OperatorizeMode::Dual => {
                &WeylElement::term(Exponents::new(), d_part, c.clone())
                    * &WeylElement::term(x_part, Exponents::new(), BigInt::one())
            }
        };
        out = &out + &word;
    }
    out
}

/// The operator a configuration contributes at cut point `m`.
///
/// Column `i` carries the factor `Delta_(sigma(i), i)` (or `Sigma` on the
/// symmetric grid), except that a fixed point whose marker is strictly below
/// it is *suppressed* to the scalar `unit`. Columns `m..=n` are operatorized
/// factor by factor; columns below `m` are bundled — multiplied out as one
/// commutative bipolynomial — and operatorized as a block. In `Normal` mode
/// the factors multiply with the column index decreasing and the bundle on
/// the right; `Dual` mode is the mirror image, bundle leftmost and factors
/// ascending, matching the reversed ordering of its operatorization.
pub fn config_operator(
    c: &CapelliConfig,
    m: usize,
    grid: Grid,
    mode: OperatorizeMode,
    unit: UnitValue,
) -> WeylElement {
    let n = c.n();
    assert!((1..=n + 1).contains(&m), "cut point m out of range");
    let factor = |i: usize| -> BiPolynomial {
        let suppressed = c.sigma().apply(i) == i && c.phi()[&i] != i;
        if suppressed {
            Polynomial::constant(unit.as_int())
        } else {
            delta_factor(grid, n, c.sigma().apply(i), i)
        }
    };
    let mut bundle = Polynomial::one();
    for i in 1..m {
        bundle = &bundle * &factor(i);
    }
    match mode {
        OperatorizeMode::Normal => {
            let mut out = WeylElement::one();
            for i in (m..=n).rev() {
                out = &out * &operatorize(&factor(i), mode);
            }
            &out * &operatorize(&bundle, mode)
        }
        OperatorizeMode::Dual => {
            let mut out = operatorize(&bundle, mode);
            for i in m..=n {
                out = &out * &operatorize(&factor(i), mode);
            }
            out
        }
    }
}
