//! Capelli configurations and the straightening map `Lambda`.
//!
//! A configuration on `{1..n}` is a pair `(sigma, phi)`: a permutation
//! together with a choice `phi(i) in {1..i}` for every fixed point `i` of
//! `sigma`. A fixed point with `phi(i) < i` is *deficient*. The class `C^m`
//! collects the configurations whose deficient fixed points all sit at
//! positions `>= m`, so `C^1` is everything and `C^(n+1)` (written `C`) has
//! `phi = id` on the fixed points — exactly `n!` configurations.
//!
//! The map `Lambda^m` repairs a deficiency at position `m` by splicing `m`
//! into the cycle through `phi(m)`; the composite `Lambda = Lambda^n ∘ ... ∘
//! Lambda^1` lands in `C`. Fibers of a single step have size 1 or 2 and are
//! computed exactly by [`fiber`]. The sign-reversing pairing used for the
//! symmetric-grid cancellation argument is [`involution_d`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Errors from constructing or transforming configurations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("one-line image is not a bijection on 1..={0}")]
    NotBijection(usize),
    #[error("phi must be defined exactly on the fixed points of sigma")]
    PhiDomain,
    #[error("phi({i}) = {v} is out of range 1..={i}")]
    PhiRange { i: usize, v: usize },
    #[error("configuration is not in class C^{m}")]
    NotInClass { m: usize },
    #[error("the involution needs 2 <= m <= n (got m = {m})")]
    InvolutionRange { m: usize },
}

// ── Permutations ───────────────────────────────────────────────────────────

/// A permutation of `{1..n}` in one-line notation: `image[i-1] = sigma(i)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Validates that `image` is a bijection on `1..=image.len()`.
    pub fn from_one_line(image: Vec<usize>) -> Result<Self, ConfigError> {
        let n = image.len();
        let mut seen = vec![false; n];
        if n == 0 {
            return Err(ConfigError::NotBijection(0));
        }
        for &v in &image {
            if v < 1 || v > n || seen[v - 1] {
                return Err(ConfigError::NotBijection(n));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { image: (1..=n).collect() }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.image
    }

    /// `sigma(i)`, 1-based.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    /// `sigma^(-1)(v)`, 1-based.
    pub fn preimage(&self, v: usize) -> usize {
        self.image.iter().position(|&w| w == v).expect("value in range") + 1
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.apply(i) == i).collect()
    }

    /// `(-1)^(n - #cycles)`.
    pub fn sign(&self) -> i64 {
        let n = self.n();
        let mut visited = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if visited[start] {
                continue;
            }
            cycles += 1;
            let mut at = start;
            while !visited[at] {
                visited[at] = true;
                at = self.image[at] - 1;
            }
        }
        if (n - cycles).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All of `S_n` in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Permutation> {
        use itertools::Itertools;
        (1..=n).permutations(n).map(|image| Permutation { image }).collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.image)
    }
}

// ── Configurations ─────────────────────────────────────────────────────────

/// A Capelli configuration `(sigma, phi)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CapelliConfig {
    sigma: Permutation,
    phi: BTreeMap<usize, usize>,
}

impl CapelliConfig {
    /// Validates that `phi` is defined exactly on the fixed points of
    /// `sigma`, with `1 <= phi(i) <= i`.
    pub fn new(sigma: Permutation, phi: BTreeMap<usize, usize>) -> Result<Self, ConfigError> {
        let fixed = sigma.fixed_points();
        if phi.len() != fixed.len() || !fixed.iter().all(|i| phi.contains_key(i)) {
            return Err(ConfigError::PhiDomain);
        }
        for (&i, &v) in &phi {
            if v < 1 || v > i {
                return Err(ConfigError::PhiRange { i, v });
            }
        }
        Ok(CapelliConfig { sigma, phi })
    }

    pub fn n(&self) -> usize {
        self.sigma.n()
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn phi(&self) -> &BTreeMap<usize, usize> {
        &self.phi
    }

    pub fn sign(&self) -> i64 {
        self.sigma.sign()
    }

    /// Is the fixed point `i` deficient (`phi(i) < i`)?
    fn deficient(&self, i: usize) -> bool {
        self.phi.get(&i).is_some_and(|&v| v < i)
    }

    /// Membership in `C^m`: every deficient fixed point is at position `>= m`.
    pub fn is_in_class(&self, m: usize) -> bool {
        assert!((1..=self.n() + 1).contains(&m), "class index m out of range");
        self.phi.iter().all(|(&i, &v)| v == i || i >= m)
    }

    /// Membership in the star subclass of `C^m`: additionally `sigma` fixes
    /// every position `< m` and no deficient `phi` value lies below `m`.
    /// These are exactly the configurations whose partial straightening
    /// `Lambda^n ∘ ... ∘ Lambda^m` still fixes `1..m-1`.
    pub fn is_in_class_star(&self, m: usize) -> bool {
        self.is_in_class(m)
            && (1..m).all(|k| self.sigma.apply(k) == k)
            && self.phi.iter().all(|(&i, &v)| v == i || v >= m)
    }

    /// One straightening step. If position `m` is a deficient fixed point,
    /// splice `m` into the cycle through `v = phi(m)`: the new permutation
    /// sends `v` to `m` and `m` to the old image of `v`, and `phi` keeps only
    /// the entries at positions that remain fixed.
    pub fn lambda_step(&self, m: usize) -> Result<CapelliConfig, ConfigError> {
        assert!((1..=self.n()).contains(&m), "step index m out of range");
        if !self.is_in_class(m) {
            return Err(ConfigError::NotInClass { m });
        }
        if self.sigma.apply(m) != m || !self.deficient(m) {
            return Ok(self.clone());
        }
        let v = self.phi[&m];
        let mut image = self.sigma.image.clone();
        image[m - 1] = image[v - 1];
        image[v - 1] = m;
        let sigma = Permutation { image };
        let phi = sigma.fixed_points().iter().map(|&i| (i, self.phi[&i])).collect();
        let out = CapelliConfig { sigma, phi };
        debug_assert!(out.is_in_class(m + 1));
        Ok(out)
    }

    /// Applies `Lambda^start, ..., Lambda^n` in order. Requires membership in
    /// `C^start`.
    pub fn lambda_from(&self, start: usize) -> Result<CapelliConfig, ConfigError> {
        let mut c = self.clone();
        for m in start..=self.n() {
            c = c.lambda_step(m)?;
        }
        Ok(c)
    }

    /// The full straightening `Lambda = Lambda^n ∘ ... ∘ Lambda^1`, always
    /// defined and landing in `C = C^(n+1)`.
    pub fn lambda_full(&self) -> CapelliConfig {
        let out = self.lambda_from(1).expect("every configuration lies in C^1");
        debug_assert!(out.is_in_class(self.n() + 1));
        out
    }

    /// One-line ASCII picture: `sigma` arrows, then the `phi` markers.
    pub fn diagram(&self) -> String {
        use itertools::Itertools;
        let arrows = (1..=self.n()).map(|i| format!("{}->{}", i, self.sigma.apply(i))).join(" ");
        if self.phi.is_empty() {
            arrows
        } else {
            let markers = self.phi.iter().map(|(i, v)| format!("{i}=>{v}")).join(" ");
            format!("{arrows} | phi: {markers}")
        }
    }
}

impl fmt::Debug for CapelliConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, phi {:?})", self.sigma, self.phi)
    }
}

// ── Enumeration ────────────────────────────────────────────────────────────

/// Lists `C^m` for permutations in lexicographic one-line order; for each
/// permutation the `phi` tuples run in lexicographic order with the choice at
/// the last fixed point moving fastest.
pub fn enumerate_configs(n: usize, m: usize) -> Vec<CapelliConfig> {
    assert!(n >= 1, "enumeration needs n >= 1");
    assert!((1..=n + 1).contains(&m), "class index m out of range");
    let mut out = Vec::new();
    for sigma in Permutation::all(n) {
        let fixed = sigma.fixed_points();
        // phi(i) ranges over {1..i} at a free position (i >= m), else {i}
        let caps: Vec<usize> = fixed.iter().map(|&i| if i >= m { i } else { 1 }).collect();
        let mut choice: Vec<usize> = fixed.iter().map(|&i| if i >= m { 1 } else { i }).collect();
        loop {
            let phi: BTreeMap<usize, usize> = fixed.iter().copied().zip(choice.iter().copied()).collect();
            out.push(CapelliConfig { sigma: sigma.clone(), phi });
            let mut advanced = false;
            let mut pos = fixed.len();
            while pos > 0 {
                pos -= 1;
                if fixed[pos] >= m && choice[pos] < caps[pos] {
                    choice[pos] += 1;
                    for (slot, &i) in choice[pos + 1..].iter_mut().zip(&fixed[pos + 1..]) {
                        *slot = if i >= m { 1 } else { i };
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    out
}

/// The preimages of `target` under `Lambda^m`. The target (in `C^(m+1)`) is
/// always its own preimage; there is exactly one more — obtained by cutting
/// `m` back out of its cycle — precisely when `sigma^(-1)(m) < m`.
pub fn fiber(target: &CapelliConfig, m: usize) -> Result<Vec<CapelliConfig>, ConfigError> {
    assert!((1..=target.n()).contains(&m), "step index m out of range");
    if !target.is_in_class(m + 1) {
        return Err(ConfigError::NotInClass { m: m + 1 });
    }
    let mut out = vec![target.clone()];
    let i = target.sigma.preimage(m);
    if i < m {
        let mut image = target.sigma.image.clone();
        image[i - 1] = target.sigma.apply(m);
        image[m - 1] = m;
        let mut phi = target.phi.clone();
        phi.insert(m, i);
        if image[i - 1] == i {
            // cutting m out of a 2-cycle (i m) leaves i fixed as well
            phi.insert(i, i);
        }
        let sigma = Permutation { image };
        let extra = CapelliConfig::new(sigma, phi).expect("fiber preimage is a valid configuration");
        debug_assert!(extra.is_in_class(m));
        debug_assert_eq!(extra.lambda_step(m).unwrap(), *target);
        out.push(extra);
    }
    Ok(out)
}

/// The sign-reversing involution on `C^(m+1)` for `m >= 2`: swap the values
/// of `sigma` at positions `1` and `m`, give every fixed point at or below
/// `m` the trivial marker, and keep `phi` above `m`. It has no fixed
/// configurations and flips the permutation sign.
pub fn involution_d(c: &CapelliConfig, m: usize) -> Result<CapelliConfig, ConfigError> {
    if m < 2 || m > c.n() {
        return Err(ConfigError::InvolutionRange { m });
    }
    if !c.is_in_class(m + 1) {
        return Err(ConfigError::NotInClass { m: m + 1 });
    }
    let mut image = c.sigma.image.clone();
    image.swap(0, m - 1);
    let sigma = Permutation { image };
    let phi = sigma
        .fixed_points()
        .into_iter()
        .map(|i| (i, if i > m { c.phi[&i] } else { i }))
        .collect();
    let out = CapelliConfig::new(sigma, phi).expect("paired configuration is valid");
    debug_assert!(out.is_in_class(m + 1));
    Ok(out)
}

// ── JSON form ──────────────────────────────────────────────────────────────

#[derive(Serialize, Deserialize)]
struct ConfigRepr {
    n: usize,
    sigma: Vec<usize>,
    phi: BTreeMap<usize, usize>,
}

impl Serialize for CapelliConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ConfigRepr { n: self.n(), sigma: self.sigma.image.clone(), phi: self.phi.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CapelliConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ConfigRepr::deserialize(deserializer)?;
        if repr.sigma.len() != repr.n {
            return Err(D::Error::custom(format!(
                "sigma has {} entries but n = {}",
                repr.sigma.len(),
                repr.n
            )));
        }
        let sigma = Permutation::from_one_line(repr.sigma).map_err(D::Error::custom)?;
        CapelliConfig::new(sigma, repr.phi).map_err(D::Error::custom)
    }
}
