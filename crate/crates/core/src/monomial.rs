//! Exponent sets, sparse polynomials and homogenization.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::de::Deserializer;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialExponent(pub Vec<u32>);

impl MonomialExponent {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sorted list of variable indices with multiplicity, e.g. x0 x2^2 -> [0, 2, 2].
    pub fn multiset(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for (v, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                out.push(v as u32);
            }
        }
        out
    }
}

/// Componentwise sum `alpha + beta`, the key of the consistency block holding entry (alpha, beta).
pub fn block_key(alpha: &MonomialExponent, beta: &MonomialExponent) -> MonomialExponent {
    debug_assert_eq!(alpha.len(), beta.len());
    MonomialExponent(alpha.0.iter().zip(&beta.0).map(|(a, b)| a + b).collect())
}

/// Binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Largest basis we are willing to materialize.
pub const MAX_BASIS_SIZE: u64 = 1 << 20;

/// All exponents of a fixed degree in `n + 1` variables `(x0, ..., xn)`.
///
/// Ordering is graded lexicographic with `x0` most significant, so
/// `(tau, 0, ..., 0)` is always at position 0.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    n: usize,
    tau: u32,
    exponents: Vec<MonomialExponent>,
    position: HashMap<MonomialExponent, usize>,
}

impl MonomialBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[MonomialExponent] {
        &self.exponents
    }

    pub fn exponent(&self, i: usize) -> &MonomialExponent {
        &self.exponents[i]
    }

    pub fn position(&self, alpha: &MonomialExponent) -> Option<usize> {
        self.position.get(alpha).copied()
    }

    pub fn e1_index(&self) -> usize {
        0
    }

    /// Evaluate `u(x) = [x^alpha]` for all basis exponents.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n + 1);
        self.exponents
            .iter()
            .map(|a| {
                a.0.iter()
                    .zip(x)
                    .map(|(&e, &xi)| xi.powi(e as i32))
                    .product()
            })
            .collect()
    }
}

/// Enumerate the full degree-`tau` basis in `n + 1` variables.
pub fn enumerate_basis(n: usize, tau: u32) -> Result<MonomialBasis> {
    let size = binomial(n as u64 + tau as u64, tau as u64)
        .filter(|&s| s <= MAX_BASIS_SIZE)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "basis of degree {tau} in {} variables exceeds {MAX_BASIS_SIZE} elements",
                n + 1
            ))
        })?;
    let mut exponents = Vec::with_capacity(size as usize);
    let mut cur = vec![0u32; n + 1];
    fill(&mut cur, 0, tau, &mut exponents);
    debug_assert_eq!(exponents.len() as u64, size);
    let position = exponents
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();
    Ok(MonomialBasis {
        n,
        tau,
        exponents,
        position,
    })
}

fn fill(cur: &mut [u32], var: usize, left: u32, out: &mut Vec<MonomialExponent>) {
    if var + 1 == cur.len() {
        cur[var] = left;
        out.push(MonomialExponent(cur.to_vec()));
        cur[var] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[var] = e;
        fill(cur, var + 1, left - e, out);
    }
    cur[var] = 0;
}

/// All exponents in `n` variables of total degree at most `d`, ordered by degree then lex.
pub fn exponents_up_to(n: usize, d: u32) -> Vec<MonomialExponent> {
    // Degree-d exponents in n+1 variables, dropping the leading slot, enumerate
    // every lower-degree exponent exactly once; reverse to put low degree first.
    let mut out = Vec::new();
    let mut cur = vec![0u32; n + 1];
    fill(&mut cur, 0, d, &mut out);
    let mut v: Vec<MonomialExponent> = out
        .into_iter()
        .map(|a| MonomialExponent(a.0[1..].to_vec()))
        .collect();
    v.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| b.cmp(a)));
    v
}

/// Sparse real polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The monomial `c * w^alpha`.
    pub fn monomial(alpha: Vec<u32>, c: f64) -> Self {
        let mut p = Self::zero(alpha.len());
        p.add_term(alpha, c);
        p
    }

    /// The variable `w_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, 1.0)
    }

    /// Build from `(exponent, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!(
                    "exponent {e:?} has length {}, expected {nvars}",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, alpha: &[u32]) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    pub fn add_term(&mut self, alpha: Vec<u32>, c: f64) {
        debug_assert_eq!(alpha.len(), self.nvars);
        if c == 0.0 {
            return;
        }
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| (e.clone(), c * s))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiply by the monomial `w^kappa`.
    pub fn mul_monomial(&self, kappa: &[u32]) -> Self {
        assert_eq!(kappa.len(), self.nvars);
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| (e.iter().zip(kappa).map(|(a, b)| a + b).collect(), c))
                .collect(),
        }
    }

    /// Embed into `nvars + extra` variables; new variables are appended.
    pub fn extend_vars(&self, extra: usize) -> Self {
        Polynomial {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| {
                    let mut e = e.clone();
                    e.resize(self.nvars + extra, 0);
                    (e, c)
                })
                .collect(),
        }
    }

    pub fn evaluate(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, &c)| {
                c * e
                    .iter()
                    .zip(w)
                    .map(|(&k, &x)| x.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Drop terms whose magnitude is at most `eps`.
    pub fn prune(&self, eps: f64) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > eps)
                .map(|(e, &c)| (e.clone(), c))
                .collect(),
        }
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*w{}", v + 1)?,
                    _ => write!(f, "*w{}^{p}", v + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// `p̄(x) = x0^(2 tau) p(w / x0)`: a homogeneous polynomial of degree `2 tau` in `nvars + 1` variables.
pub fn homogenize(p: &Polynomial, tau: u32) -> Result<Polynomial> {
    let d = 2 * tau;
    if p.degree() > d {
        return Err(Error::Degree(format!(
            "polynomial of degree {} cannot be homogenized to degree {d} (tau = {tau})",
            p.degree()
        )));
    }
    let mut out = Polynomial::zero(p.nvars + 1);
    for (e, c) in p.terms() {
        let mut h = Vec::with_capacity(e.len() + 1);
        h.push(d - e.iter().sum::<u32>());
        h.extend_from_slice(e);
        out.add_term(h, c);
    }
    Ok(out)
}

/// Homogenize to an arbitrary target degree `d` (not necessarily even).
pub fn homogenize_to(p: &Polynomial, d: u32) -> Result<Polynomial> {
    if p.degree() > d {
        return Err(Error::Degree(format!(
            "polynomial of degree {} exceeds target degree {d}",
            p.degree()
        )));
    }
    let mut out = Polynomial::zero(p.nvars + 1);
    for (e, c) in p.terms() {
        let mut h = Vec::with_capacity(e.len() + 1);
        h.push(d - e.iter().sum::<u32>());
        h.extend_from_slice(e);
        out.add_term(h, c);
    }
    Ok(out)
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e, c))?;
        }
        seq.end()
    }
}

/// Term list as read from JSON before the variable count is known.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RawPolynomial(pub Vec<(Vec<u32>, f64)>);

impl RawPolynomial {
    pub fn into_polynomial(self, nvars: usize, location: &str) -> Result<Polynomial> {
        for (k, (e, _)) in self.0.iter().enumerate() {
            if e.len() != nvars {
                return Err(Error::Parse {
                    location: format!("{location}[{k}]"),
                    message: format!("exponent has length {}, expected {nvars}", e.len()),
                });
            }
        }
        Polynomial::from_terms(nvars, self.0)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPolynomial::deserialize(d)?;
        let nvars = raw.0.first().map(|(e, _)| e.len()).unwrap_or(0);
        raw.into_polynomial(nvars, "polynomial")
            .map_err(serde::de::Error::custom)
    }
}
