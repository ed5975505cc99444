//! Normally ordered differential operators: the polynomial Weyl algebra.
//!
//! An element is a finite sum of words `c * x^a * del^b` with all
//! multiplication variables to the left of all derivatives. Keeping every
//! element in this normal form makes the representation canonical, so
//! operator equality is just map equality. The price is paid in `mul`, which
//! re-normalizes products with the single-variable exchange rule
//!
//! ```text
//! del_v^b x_v^c = sum_k  k! C(b,k) C(c,k)  x_v^(c-k) del_v^(b-k)
//! ```
//!
//! extended multiplicatively over variables (distinct variables commute).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};

use crate::polynomial::{parse_words, Exponents, Family, Grid, ParseError, Polynomial, VarId};

/// One normally ordered word: `coeff * x^x * del^d`.
///
/// Both exponent maps are keyed by the underlying `x`-family variable; the
/// `d` map is read as derivatives with respect to those variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylTerm {
    pub x: Exponents,
    pub d: Exponents,
    pub coeff: BigInt,
}

/// A differential operator in canonical normal form.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct WeylElement {
    terms: BTreeMap<(Exponents, Exponents), BigInt>,
}

fn check_exponents(e: &Exponents, what: &str) {
    for v in e.vars() {
        assert!(
            v.family() == Family::X,
            "{what} of an operator must use x-family variables (got {v})"
        );
    }
}

impl WeylElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(1)
    }

    pub fn scalar(c: impl Into<BigInt>) -> Self {
        let mut out = WeylElement::zero();
        out.add_term(Exponents::new(), Exponents::new(), c.into());
        out
    }

    /// The multiplication operator by the variable `v`.
    pub fn x_var(v: VarId) -> Self {
        Self::term(Exponents::var(v), Exponents::new(), 1)
    }

    /// The derivative with respect to `v`.
    pub fn d_var(v: VarId) -> Self {
        Self::term(Exponents::new(), Exponents::var(v), 1)
    }

    /// Single normally ordered term `c * x^x_exp * del^d_exp`.
    pub fn term(x_exp: Exponents, d_exp: Exponents, c: impl Into<BigInt>) -> Self {
        check_exponents(&x_exp, "the polynomial part");
        check_exponents(&d_exp, "the derivative part");
        let mut out = WeylElement::zero();
        out.add_term(x_exp, d_exp, c.into());
        out.assert_uniform_grid();
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = WeylTerm>) -> Self {
        let mut out = WeylElement::zero();
        for t in terms {
            check_exponents(&t.x, "the polynomial part");
            check_exponents(&t.d, "the derivative part");
            out.add_term(t.x, t.d, t.coeff);
        }
        out.assert_uniform_grid();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = WeylTerm> + '_ {
        self.terms
            .iter()
            .map(|((x, d), c)| WeylTerm { x: x.clone(), d: d.clone(), coeff: c.clone() })
    }

    /// Grid of the variables this operator touches, if any.
    pub fn grid(&self) -> Option<Grid> {
        self.terms.keys().find_map(|(x, d)| x.grid().or_else(|| d.grid()))
    }

    /// Largest total degree among derivative parts.
    pub fn max_d_degree(&self) -> u32 {
        self.terms.keys().map(|(_, d)| d.total_degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigInt) -> WeylElement {
        if c.is_zero() {
            return WeylElement::zero();
        }
        WeylElement { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    fn add_term(&mut self, x: Exponents, d: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let key = (x, d);
        let entry = self.terms.entry(key.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn assert_uniform_grid(&self) {
        let mut seen: Option<Grid> = None;
        for (x, d) in self.terms.keys() {
            for v in x.vars().chain(d.vars()) {
                match seen {
                    None => seen = Some(v.grid()),
                    Some(g) => assert!(
                        g == v.grid(),
                        "cannot mix standard-grid and symmetric-grid variables in one operator"
                    ),
                }
            }
        }
    }

    /// Applies the operator to a polynomial: per term, differentiate by the
    /// derivative part, then multiply by the monomial part.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        if let (Some(ga), Some(gb)) = (self.grid(), p.grid()) {
            assert!(ga == gb, "operator and polynomial live on different grids");
        }
        let mut out = Polynomial::zero();
        for ((xe, de), c) in &self.terms {
            let mut q = p.clone();
            for (v, k) in de.iter() {
                for _ in 0..k {
                    q = q.diff(v);
                }
                if q.is_zero() {
                    break;
                }
            }
            if q.is_zero() {
                continue;
            }
            out = &out + &(&q * &Polynomial::monomial(xe.clone(), c.clone()));
        }
        out
    }
}

// ── Normal-ordering product ────────────────────────────────────────────────

/// `b * (b-1) * ... * (b-k+1)`, which equals `k! C(b,k)`.
fn falling(b: u32, k: u32) -> BigInt {
    (0..k).map(|t| BigInt::from(b - t)).product()
}

fn binomial(c: u32, k: u32) -> BigInt {
    num_integer::binomial(BigInt::from(c), BigInt::from(k))
}

/// All contraction multi-indices `0 <= k_v <= cap_v`, with the combinatorial
/// weight `prod_v falling(b_v, k_v) * C(c_v, k_v)` attached to each.
fn contractions(d_left: &Exponents, x_right: &Exponents) -> Vec<(Exponents, BigInt)> {
    let overlap: Vec<(VarId, u32, u32)> = d_left
        .iter()
        .filter_map(|(v, b)| {
            let c = x_right.get(v);
            (c > 0).then_some((v, b, c))
        })
        .collect();
    let mut out = Vec::new();
    let mut counts = vec![0u32; overlap.len()];
    loop {
        let mut weight = BigInt::one();
        for (idx, &(_, b, c)) in overlap.iter().enumerate() {
            let k = counts[idx];
            weight *= falling(b, k) * binomial(c, k);
        }
        let k_exp = Exponents::of(overlap.iter().zip(&counts).map(|(&(v, _, _), &k)| (v, k)));
        out.push((k_exp, weight));
        // odometer increment over the box prod [0, min(b,c)]
        let mut pos = overlap.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            let cap = overlap[pos].1.min(overlap[pos].2);
            if counts[pos] < cap {
                counts[pos] += 1;
                for c in counts[pos + 1..].iter_mut() {
                    *c = 0;
                }
                break;
            }
        }
    }
}

impl Mul for &WeylElement {
    type Output = WeylElement;

    fn mul(self, rhs: &WeylElement) -> WeylElement {
        if let (Some(ga), Some(gb)) = (self.grid(), rhs.grid()) {
            assert!(
                ga == gb,
                "cannot mix standard-grid and symmetric-grid variables in one operator"
            );
        }
        let mut out = WeylElement::zero();
        for ((ax, ad), ac) in &self.terms {
            for ((bx, bd), bc) in &rhs.terms {
                let coeff = ac * bc;
                for (k, weight) in contractions(ad, bx) {
                    let x = ax.mul(bx).sub(&k);
                    let d = ad.mul(bd).sub(&k);
                    out.add_term(x, d, &coeff * weight);
                }
            }
        }
        out
    }
}

impl Add for &WeylElement {
    type Output = WeylElement;

    fn add(self, rhs: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for ((x, d), c) in &rhs.terms {
            out.add_term(x.clone(), d.clone(), c.clone());
        }
        out.assert_uniform_grid();
        out
    }
}

impl Sub for &WeylElement {
    type Output = WeylElement;

    fn sub(self, rhs: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for ((x, d), c) in &rhs.terms {
            out.add_term(x.clone(), d.clone(), -c.clone());
        }
        out.assert_uniform_grid();
        out
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;

    fn neg(self) -> WeylElement {
        WeylElement { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for WeylElement {
            type Output = WeylElement;
            fn $method(self, rhs: WeylElement) -> WeylElement {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&WeylElement> for WeylElement {
            type Output = WeylElement;
            fn $method(self, rhs: &WeylElement) -> WeylElement {
                $trait::$method(&self, rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

// ── Classical generators ───────────────────────────────────────────────────

/// The three generator matrices the identity verifiers are built from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeneratorKind {
    /// Polarization operator `D_ij = sum_k x[i,k] d[j,k]` on the standard grid.
    D,
    /// Symmetric-grid operator `S_ij = sum_k (1 + delta_jk) xs[i,k] ds[j,k]`.
    S,
    /// Reverse-ordered operator `d_ij = sum_k d[i,k] x[j,k] = D_ji + n delta_ij`.
    Dual,
}

/// `sum_{k=1..cols} x[i,k] d[j,k]`: the row-`i`-to-row-`j` polarization over a
/// grid with `cols` columns. Rows `i`, `j` are not bounded by `cols`, which is
/// what the rectangular Cauchy–Binet setting needs.
pub fn polarization_generator(cols: usize, i: usize, j: usize) -> WeylElement {
    assert!(cols >= 1 && i >= 1 && j >= 1, "generator index out of range");
    let mut out = WeylElement::zero();
    for k in 1..=cols {
        out.add_term(Exponents::var(VarId::x(i, k)), Exponents::var(VarId::x(j, k)), BigInt::one());
    }
    out
}

/// Square-grid generator `kind` of size `n` at position `(i, j)`.
pub fn generator(kind: GeneratorKind, n: usize, i: usize, j: usize) -> WeylElement {
    assert!(n >= 1, "generator needs n >= 1");
    assert!(
        (1..=n).contains(&i) && (1..=n).contains(&j),
        "generator index out of range: ({i},{j}) with n = {n}"
    );
    match kind {
        GeneratorKind::D => polarization_generator(n, i, j),
        GeneratorKind::S => {
            let mut out = WeylElement::zero();
            for k in 1..=n {
                let weight = if j == k { 2 } else { 1 };
                out.add_term(
                    Exponents::var(VarId::xs(i, k)),
                    Exponents::var(VarId::xs(j, k)),
                    BigInt::from(weight),
                );
            }
            out
        }
        GeneratorKind::Dual => {
            let mut out = generator(GeneratorKind::D, n, j, i);
            if i == j {
                out = &out + &WeylElement::scalar(n as i64);
            }
            out
        }
    }
}

// ── Bounded-degree faithfulness oracle ─────────────────────────────────────

/// Decides operator equality by action alone: two operators whose derivative
/// parts have total degree at most `d` are equal iff they act identically on
/// every monomial of total degree at most `d` in the variables they mention.
/// (If they differed, the action on a monomial matching a minimal-degree
/// derivative part would expose it.)
pub fn acts_equally(a: &WeylElement, b: &WeylElement) -> bool {
    let degree = a.max_d_degree().max(b.max_d_degree());
    let mut vars: BTreeSet<VarId> = BTreeSet::new();
    for op in [a, b] {
        for (x, d) in op.terms.keys() {
            vars.extend(x.vars());
            vars.extend(d.vars());
        }
    }
    let vars: Vec<VarId> = vars.into_iter().collect();
    for e in monomials_up_to(&vars, degree) {
        let m = Polynomial::monomial(e, 1);
        if a.apply(&m) != b.apply(&m) {
            return false;
        }
    }
    true
}

/// Every exponent map over `vars` with total degree at most `bound`.
pub fn monomials_up_to(vars: &[VarId], bound: u32) -> Vec<Exponents> {
    fn go(vars: &[VarId], budget: u32, acc: &mut Vec<(VarId, u32)>, out: &mut Vec<Exponents>) {
        match vars.split_first() {
            None => out.push(Exponents::of(acc.iter().copied())),
            Some((&v, rest)) => {
                for e in 0..=budget {
                    acc.push((v, e));
                    go(rest, budget - e, acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(vars, bound, &mut Vec::new(), &mut out);
    out
}

// ── Text form ──────────────────────────────────────────────────────────────

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((xe, de), c)) in self.terms.iter().enumerate() {
            let negative = c.sign() == Sign::Minus;
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            let mag = c.magnitude();
            let mut lead = true;
            if (xe.is_empty() && de.is_empty()) || !mag.is_one() {
                write!(f, "{}", mag)?;
                lead = false;
            }
            if !xe.is_empty() {
                if !lead {
                    write!(f, "*")?;
                }
                write!(f, "{}", xe)?;
                lead = false;
            }
            for (v, e) in de.iter() {
                if !lead {
                    write!(f, "*")?;
                }
                lead = false;
                let name = match v.grid() {
                    Grid::Standard => "d",
                    Grid::Symmetric => "ds",
                };
                write!(f, "{}[{},{}]", name, v.row(), v.col())?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for WeylElement {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut out = WeylElement::zero();
        for word in parse_words(s)? {
            let mut x_pairs = Vec::new();
            let mut d_pairs = Vec::new();
            for (name, i, j, exp) in word.factors {
                match name.as_str() {
                    "x" => x_pairs.push((VarId::x(i, j), exp)),
                    "xs" => x_pairs.push((VarId::xs(i, j), exp)),
                    "d" => d_pairs.push((VarId::x(i, j), exp)),
                    "ds" => d_pairs.push((VarId::xs(i, j), exp)),
                    other => {
                        return Err(ParseError {
                            pos: 0,
                            msg: format!("unknown operator factor family {other:?}"),
                        })
                    }
                }
            }
            out.add_term(Exponents::of(x_pairs), Exponents::of(d_pairs), word.coeff);
        }
        out.assert_uniform_grid();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> WeylElement {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_commutation() {
        let x = WeylElement::x_var(VarId::x(1, 1));
        let d = WeylElement::d_var(VarId::x(1, 1));
        assert_eq!(&d * &x, w("x[1,1]*d[1,1] + 1"));
        assert_eq!(&x * &d, w("x[1,1]*d[1,1]"));
        // distinct variables commute
        let d21 = WeylElement::d_var(VarId::x(2, 1));
        assert_eq!(&d21 * &x, &x * &d21);
    }

    #[test]
    fn second_order_exchange() {
        // del^2 x^2 = x^2 del^2 + 4 x del + 2, checked two ways: against the
        // normal form, and against direct multiply-then-differentiate on all
        // monomials of degree <= 4.
        let v = VarId::x(1, 1);
        let d2 = &WeylElement::d_var(v) * &WeylElement::d_var(v);
        let x2 = &WeylElement::x_var(v) * &WeylElement::x_var(v);
        let product = &d2 * &x2;
        assert_eq!(product, w("x[1,1]^2*d[1,1]^2 + 4*x[1,1]*d[1,1] + 2"));
        for k in 0..=4u32 {
            let m = Polynomial::var(v).pow(k);
            let direct = (&m * &Polynomial::var(v).pow(2)).diff(v).diff(v);
            assert_eq!(product.apply(&m), direct);
        }
    }

    #[test]
    fn euler_operator_counts_degree() {
        let v = VarId::x(1, 1);
        let euler = &WeylElement::x_var(v) * &WeylElement::d_var(v);
        for k in 0..=5u32 {
            let m = Polynomial::var(v).pow(k);
            assert_eq!(euler.apply(&m), m.scale(&BigInt::from(k)));
        }
        assert!(WeylElement::d_var(v).apply(&Polynomial::one()).is_zero());
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generator(GeneratorKind::D, 2, 1, 2), w("x[1,1]*d[2,1] + x[1,2]*d[2,2]"));
        assert_eq!(
            generator(GeneratorKind::S, 2, 1, 1),
            w("2*xs[1,1]*ds[1,1] + xs[1,2]*ds[1,2]")
        );
        // d_ij = D_ji + n on the diagonal, D_ji off it
        assert_eq!(
            generator(GeneratorKind::Dual, 2, 1, 1),
            &generator(GeneratorKind::D, 2, 1, 1) + &WeylElement::scalar(2)
        );
        assert_eq!(generator(GeneratorKind::Dual, 2, 1, 2), generator(GeneratorKind::D, 2, 2, 1));
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn generator_rejects_bad_index() {
        generator(GeneratorKind::D, 2, 3, 1);
    }

    #[test]
    fn commutators_on_the_full_grid() {
        for grid_sym in [false, true] {
            let var = |i, j| if grid_sym { VarId::xs(i, j) } else { VarId::x(i, j) };
            for i in 1..=2 {
                for j in 1..=2 {
                    for a in 1..=2 {
                        for b in 1..=2 {
                            let u = var(i, j);
                            let v = var(a, b);
                            let commutator = &(&WeylElement::d_var(u) * &WeylElement::x_var(v))
                                - &(&WeylElement::x_var(v) * &WeylElement::d_var(u));
                            let expected =
                                if u == v { WeylElement::one() } else { WeylElement::zero() };
                            assert_eq!(commutator, expected, "[d{u}, {v}]");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn polarization_fixes_determinant() {
        // D_11 rescales det(X) by the polarization weight 1 for n = 2.
        let d11 = generator(GeneratorKind::D, 2, 1, 1);
        let det_x = p("x[1,1]*x[2,2] - x[1,2]*x[2,1]");
        assert_eq!(d11.apply(&det_x), det_x);
    }

    #[test]
    #[should_panic(expected = "cannot mix")]
    fn mixed_grid_product_is_rejected() {
        let _ = &w("x[1,1]*d[1,1]") * &w("xs[1,1]");
    }

    #[test]
    fn display_round_trip() {
        for s in [
            "0",
            "1",
            "-3",
            "x[1,1]*d[2,1] + 1",
            "2*x[1,1]^2*d[1,1]^2 - d[2,2]",
            "xs[1,1]*ds[1,2]^2 + 5*xs[2,2]",
        ] {
            let a = w(s);
            assert_eq!(w(&a.to_string()), a, "round trip through {s:?}");
        }
        assert!("y[1,1]*d[1,1]".parse::<WeylElement>().is_err());
    }

    #[test]
    fn action_oracle_matches_normal_forms() {
        let xd = w("x[1,1]*d[1,1]");
        assert!(acts_equally(&xd, &xd));
        assert!(!acts_equally(&xd, &w("x[1,1]*d[1,1] + 1")));
        let product = &WeylElement::d_var(VarId::x(1, 1)) * &WeylElement::x_var(VarId::x(1, 1));
        assert!(acts_equally(&product, &w("x[1,1]*d[1,1] + 1")));
    }
}
