//! Sparse multivariate polynomials with exact `BigInt` coefficients.
//!
//! Variables live on a grid of matrix entries. There are two families, `x`
//! and `y` (the `y` family is the polarization partner that later turns into
//! derivatives), and two grid shapes: the standard grid indexes entries by
//! ordered pairs `(i, j)`, the symmetric grid by unordered pairs stored with
//! `i <= j`. A polynomial may mix families but never grid shapes.
//!
//! The representation is canonical — a `BTreeMap` from exponent maps to
//! nonzero coefficients — so structural equality *is* mathematical equality,
//! and `Display` output is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};

// ── Variables ──────────────────────────────────────────────────────────────

/// Variable family: `x` (multiplication side) or `y` (polarization side).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Family {
    X,
    Y,
}

/// Grid shape: entries of a generic matrix, or of a symmetric one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Grid {
    Standard,
    Symmetric,
}

/// A single grid variable such as `x[1,2]`, `y[3,3]` or `xs[1,2]`.
///
/// Symmetric-grid constructors canonicalize the index pair to `row <= col`,
/// so `xs(2,1)` and `xs(1,2)` denote the same variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    family: Family,
    grid: Grid,
    row: u16,
    col: u16,
}

impl VarId {
    fn new(family: Family, grid: Grid, i: usize, j: usize) -> Self {
        assert!(i >= 1 && j >= 1, "grid indices are 1-based");
        assert!(i <= u16::MAX as usize && j <= u16::MAX as usize, "grid index too large");
        let (row, col) = if grid == Grid::Symmetric && j < i { (j, i) } else { (i, j) };
        VarId { family, grid, row: row as u16, col: col as u16 }
    }

    /// Standard-grid variable `x[i,j]`.
    pub fn x(i: usize, j: usize) -> Self {
        Self::new(Family::X, Grid::Standard, i, j)
    }

    /// Standard-grid variable `y[i,j]`.
    pub fn y(i: usize, j: usize) -> Self {
        Self::new(Family::Y, Grid::Standard, i, j)
    }

    /// Symmetric-grid variable `xs[i,j]` (unordered pair).
    pub fn xs(i: usize, j: usize) -> Self {
        Self::new(Family::X, Grid::Symmetric, i, j)
    }

    /// Symmetric-grid variable `ys[i,j]` (unordered pair).
    pub fn ys(i: usize, j: usize) -> Self {
        Self::new(Family::Y, Grid::Symmetric, i, j)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn row(&self) -> usize {
        self.row as usize
    }

    pub fn col(&self) -> usize {
        self.col as usize
    }

    /// Same indices and grid, `x` family. Used when a `y` variable is
    /// reinterpreted as the derivative with respect to its `x` partner.
    pub fn as_x(&self) -> VarId {
        VarId { family: Family::X, ..*self }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match (self.family, self.grid) {
            (Family::X, Grid::Standard) => "x",
            (Family::X, Grid::Symmetric) => "xs",
            (Family::Y, Grid::Standard) => "y",
            (Family::Y, Grid::Symmetric) => "ys",
        };
        write!(f, "{}[{},{}]", name, self.row, self.col)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ── Exponent maps ──────────────────────────────────────────────────────────

/// A monomial's exponent map. Zero exponents are never stored, so the map is
/// canonical and the derived ordering is the lexicographic order on sorted
/// `(VarId, exponent)` lists.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exponents(BTreeMap<VarId, u32>);

impl Exponents {
    pub fn new() -> Self {
        Self::default()
    }

    /// The single variable `v` to the first power.
    pub fn var(v: VarId) -> Self {
        Exponents(BTreeMap::from([(v, 1)]))
    }

    /// Builds from `(variable, exponent)` pairs, summing duplicates and
    /// dropping zeros.
    pub fn of(pairs: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Exponents(map)
    }

    pub fn get(&self, v: VarId) -> u32 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.0.iter().map(|(v, e)| (*v, *e))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.keys().copied()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.values().sum()
    }

    /// Product of monomials: exponent-wise sum.
    pub fn mul(&self, other: &Exponents) -> Exponents {
        let mut out = self.0.clone();
        for (v, e) in other.iter() {
            *out.entry(v).or_insert(0) += e;
        }
        Exponents(out)
    }

    /// Exponent-wise difference. Panics if any exponent would go negative.
    pub fn sub(&self, other: &Exponents) -> Exponents {
        let mut out = self.0.clone();
        for (v, e) in other.iter() {
            let slot = out.get_mut(&v).expect("monomial division underflow");
            assert!(*slot >= e, "monomial division underflow");
            *slot -= e;
            if *slot == 0 {
                out.remove(&v);
            }
        }
        Exponents(out)
    }

    /// Grid of the variables appearing here, if any.
    pub fn grid(&self) -> Option<Grid> {
        self.0.keys().next().map(|v| v.grid())
    }
}

impl fmt::Display for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", v)?;
            if *e > 1 {
                write!(f, "^{}", e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ── Polynomials ────────────────────────────────────────────────────────────

/// Sparse polynomial: exponent map -> nonzero `BigInt` coefficient.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Exponents, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Exponents::new(), c);
        }
        Polynomial { terms }
    }

    pub fn var(v: VarId) -> Self {
        Polynomial { terms: BTreeMap::from([(Exponents::var(v), BigInt::one())]) }
    }

    /// Single term `c * e`. Drops to zero if `c == 0`.
    pub fn monomial(e: Exponents, c: impl Into<BigInt>) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(e, c.into());
        p.assert_uniform_grid();
        p
    }

    /// Accumulates `(exponents, coefficient)` pairs, combining duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, BigInt)>) -> Self {
        let mut p = Polynomial::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p.assert_uniform_grid();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponents) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Exponents::total_degree).max().unwrap_or(0)
    }

    /// Grid of the variables appearing in this polynomial, if any.
    pub fn grid(&self) -> Option<Grid> {
        self.terms.keys().find_map(Exponents::grid)
    }

    fn assert_uniform_grid(&self) {
        let mut seen: Option<Grid> = None;
        for e in self.terms.keys() {
            for v in e.vars() {
                match seen {
                    None => seen = Some(v.grid()),
                    Some(g) => assert!(
                        g == v.grid(),
                        "cannot mix standard-grid and symmetric-grid variables in one polynomial"
                    ),
                }
            }
        }
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            // remove the now-zero coefficient to restore canonicity
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    /// Partial derivative with respect to `v` (power rule per term).
    pub fn diff(&self, v: VarId) -> Polynomial {
        let mut out = Polynomial::zero();
        for (e, c) in &self.terms {
            let k = e.get(v);
            if k == 0 {
                continue;
            }
            let lowered = e.sub(&Exponents::var(v));
            out.add_term(lowered, c * BigInt::from(k));
        }
        out
    }

    /// `self * c` for a scalar `c`.
    pub fn scale(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

fn assert_compatible(a: &Polynomial, b: &Polynomial) {
    if let (Some(ga), Some(gb)) = (a.grid(), b.grid()) {
        assert!(
            ga == gb,
            "cannot mix standard-grid and symmetric-grid variables in one polynomial"
        );
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_compatible(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_compatible(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_compatible(self, rhs);
        let mut out = Polynomial::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.mul(eb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                $trait::$method(&self, rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.sign() == Sign::Minus;
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            let mag = c.magnitude();
            if e.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", e)?;
            } else {
                write!(f, "{}*{}", mag, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ── Determinant ────────────────────────────────────────────────────────────

/// Determinant of a square matrix of polynomials, as the signed sum over all
/// permutations. Panics on ragged or non-square input.
pub fn det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    for row in m {
        assert!(row.len() == n, "determinant requires a square matrix");
    }
    let mut out = Polynomial::zero();
    for (sigma, sign) in signed_permutations(n) {
        let mut prod = Polynomial::constant(sign);
        for (col, &row) in sigma.iter().enumerate() {
            prod = &prod * &m[row][col];
        }
        out = &out + &prod;
    }
    out
}

/// All permutations of `0..n` in lexicographic order, with their signs.
pub(crate) fn signed_permutations(n: usize) -> impl Iterator<Item = (Vec<usize>, i64)> {
    use itertools::Itertools;
    (0..n).permutations(n).map(|p| {
        let mut inversions = 0usize;
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                if p[a] > p[b] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        (p, sign)
    })
}

// ── Text form ──────────────────────────────────────────────────────────────

/// Error from parsing the text form of a polynomial or operator.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError { pos, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Name(String),
    LBracket,
    RBracket,
    Comma,
    Caret,
    Star,
    Plus,
    Minus,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '[' => {
                toks.push((i, Token::LBracket));
                i += 1;
            }
            ']' => {
                toks.push((i, Token::RBracket));
                i += 1;
            }
            ',' => {
                toks.push((i, Token::Comma));
                i += 1;
            }
            '^' => {
                toks.push((i, Token::Caret));
                i += 1;
            }
            '*' => {
                toks.push((i, Token::Star));
                i += 1;
            }
            '+' => {
                toks.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Token::Minus));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..i];
                let value = digits.parse::<BigInt>().map_err(|_| err(start, "bad integer"))?;
                toks.push((start, Token::Int(value)));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphabetic() {
                    i += 1;
                }
                toks.push((start, Token::Name(input[start..i].to_string())));
            }
            _ => return Err(err(i, format!("unexpected character {c:?}"))),
        }
    }
    Ok(toks)
}

/// One parsed additive term: a coefficient and variable references
/// `(name, i, j, exponent)`.
pub(crate) struct Word {
    pub coeff: BigInt,
    pub factors: Vec<(String, usize, usize, u32)>,
}

struct Parser {
    toks: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<(), ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(ref t) if t == want => Ok(()),
            _ => Err(err(pos, format!("expected {what}"))),
        }
    }

    fn small_int(&mut self, what: &str) -> Result<usize, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Token::Int(v)) => {
                use num_traits::ToPrimitive;
                v.to_usize().ok_or_else(|| err(pos, format!("{what} out of range")))
            }
            _ => Err(err(pos, format!("expected {what}"))),
        }
    }

    /// factor := INT | NAME '[' INT ',' INT ']' ('^' INT)?
    fn factor(&mut self, word: &mut Word) -> Result<(), ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Token::Int(v)) => {
                word.coeff *= v;
                Ok(())
            }
            Some(Token::Name(name)) => {
                self.expect(&Token::LBracket, "'['")?;
                let i = self.small_int("row index")?;
                self.expect(&Token::Comma, "','")?;
                let j = self.small_int("column index")?;
                self.expect(&Token::RBracket, "']'")?;
                if i == 0 || j == 0 {
                    return Err(err(pos, "grid indices are 1-based"));
                }
                let mut exp = 1u32;
                if self.peek() == Some(&Token::Caret) {
                    self.bump();
                    exp = self.small_int("exponent")? as u32;
                }
                word.factors.push((name, i, j, exp));
                Ok(())
            }
            _ => Err(err(pos, "expected a coefficient or a variable")),
        }
    }

    /// word := factor ('*' factor)*
    fn word(&mut self, sign: i64) -> Result<Word, ParseError> {
        let mut word = Word { coeff: BigInt::from(sign), factors: Vec::new() };
        self.factor(&mut word)?;
        while self.peek() == Some(&Token::Star) {
            self.bump();
            self.factor(&mut word)?;
        }
        Ok(word)
    }
}

/// Parses `term (('+'|'-') term)*` into coefficient/factor words. Shared by
/// the polynomial and operator parsers, which interpret the names.
pub(crate) fn parse_words(input: &str) -> Result<Vec<Word>, ParseError> {
    let toks = tokenize(input)?;
    let mut p = Parser { toks, pos: 0, len: input.len() };
    let mut words = Vec::new();
    let mut sign = 1i64;
    if p.peek() == Some(&Token::Minus) {
        p.bump();
        sign = -1;
    } else if p.peek() == Some(&Token::Plus) {
        p.bump();
    }
    loop {
        words.push(p.word(sign)?);
        match p.peek() {
            None => break,
            Some(Token::Plus) => {
                p.bump();
                sign = 1;
            }
            Some(Token::Minus) => {
                p.bump();
                sign = -1;
            }
            Some(_) => return Err(err(p.here(), "expected '+' or '-'")),
        }
    }
    Ok(words)
}

impl FromStr for Polynomial {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut out = Polynomial::zero();
        for word in parse_words(s)? {
            let mut pairs = Vec::new();
            for (name, i, j, exp) in word.factors {
                let v = match name.as_str() {
                    "x" => VarId::x(i, j),
                    "y" => VarId::y(i, j),
                    "xs" => VarId::xs(i, j),
                    "ys" => VarId::ys(i, j),
                    other => {
                        return Err(err(0, format!("unknown variable family {other:?}")));
                    }
                };
                pairs.push((v, exp));
            }
            out.add_term(Exponents::of(pairs), word.coeff);
        }
        out.assert_uniform_grid();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    /// 2x2 matrix of standard-grid x variables.
    fn x_matrix_2() -> Vec<Vec<Polynomial>> {
        (1..=2)
            .map(|i| (1..=2).map(|j| Polynomial::var(VarId::x(i, j))).collect())
            .collect()
    }

    #[test]
    fn symmetric_indices_canonicalize() {
        assert_eq!(VarId::xs(2, 1), VarId::xs(1, 2));
        assert_eq!(VarId::xs(2, 1).to_string(), "xs[1,2]");
        assert_ne!(VarId::x(2, 1), VarId::x(1, 2));
    }

    #[test]
    fn display_matches_grammar() {
        let q = p("2*x[1,1]^2*x[1,2] - 3*y[2,2]");
        assert_eq!(q.to_string(), "2*x[1,1]^2*x[1,2] - 3*y[2,2]");
        assert_eq!(p("xs[2,1]").to_string(), "xs[1,2]");
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("x[1,1] - x[1,1] + 7").to_string(), "7");
    }

    #[test]
    fn addition_cancels_to_zero() {
        let a = p("x[1,1] + 2*x[2,2]");
        let b = p("-x[1,1] - 2*x[2,2]");
        assert!((&a + &b).is_zero());
    }

    #[test]
    fn product_of_determinant_with_itself() {
        // Expected value computed by expanding (x11*x22 - x12*x21)^2 by hand.
        let d = det(&x_matrix_2());
        let square = &d * &d;
        let expected = p(
            "x[1,1]^2*x[2,2]^2 - 2*x[1,1]*x[1,2]*x[2,1]*x[2,2] + x[1,2]^2*x[2,1]^2",
        );
        assert_eq!(square, expected);
        assert_eq!(square.num_terms(), 3);
    }

    #[test]
    fn diff_power_rule() {
        let v = VarId::x(1, 1);
        let cube = Polynomial::var(v).pow(3);
        assert_eq!(cube.diff(v), p("3*x[1,1]^2"));
        assert!(p("x[2,2]").diff(v).is_zero());
        // d/dx11 of det(X) for n = 2 is the complementary entry x22.
        assert_eq!(det(&x_matrix_2()).diff(v), p("x[2,2]"));
    }

    #[test]
    fn det_small_cases() {
        let one_by_one = vec![vec![p("x[1,1]")]];
        assert_eq!(det(&one_by_one), p("x[1,1]"));
        assert_eq!(det(&x_matrix_2()), p("x[1,1]*x[2,2] - x[1,2]*x[2,1]"));
    }

    /// Recursive cofactor expansion along the first row; an independent
    /// oracle for the permanent-style expansion in `det`.
    fn cofactor_det(m: &[Vec<Polynomial>]) -> Polynomial {
        let n = m.len();
        if n == 0 {
            return Polynomial::one();
        }
        if n == 1 {
            return m[0][0].clone();
        }
        let mut out = Polynomial::zero();
        for j in 0..n {
            let minor: Vec<Vec<Polynomial>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            out = &out + &(&m[0][j].scale(&BigInt::from(sign)) * &cofactor_det(&minor));
        }
        out
    }

    #[test]
    fn det_3x3_matches_cofactor_oracle() {
        let m: Vec<Vec<Polynomial>> = (1..=3)
            .map(|i| (1..=3).map(|j| Polynomial::var(VarId::x(i, j))).collect())
            .collect();
        let d = det(&m);
        assert_eq!(d, cofactor_det(&m));
        assert_eq!(d.num_terms(), 6);
        assert_eq!(d.total_degree(), 3);
    }

    #[test]
    #[should_panic(expected = "square")]
    fn det_rejects_non_square() {
        let ragged = vec![vec![p("x[1,1]"), p("x[1,2]")]];
        det(&ragged);
    }

    #[test]
    #[should_panic(expected = "cannot mix")]
    fn grid_mixing_is_rejected() {
        let _ = &p("x[1,1]") + &p("xs[1,1]");
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "0",
            "-5",
            "x[1,1]",
            "2*x[1,1]^2*x[1,2] - 3*y[2,2]",
            "xs[1,1]*ys[1,2] + 4",
            "-x[2,1] + x[1,2] - 1",
        ] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q, "round trip through {s:?}");
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("x[0,1]".parse::<Polynomial>().is_err());
        assert!("x[1".parse::<Polynomial>().is_err());
        assert!("z[1,1]".parse::<Polynomial>().is_err());
        assert!("x[1,1] +".parse::<Polynomial>().is_err());
        assert!("d[1,1]".parse::<Polynomial>().is_err());
    }
}
