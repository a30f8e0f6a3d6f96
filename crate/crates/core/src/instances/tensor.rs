use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::monomial::Polynomial;
use crate::relax::{Domain, PolynomialProgram};
use crate::rng::uniform;
use crate::{Error, Result};

use super::simplex_equality;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CstKind {
    Random,
    Copositive,
}

/// Dense order-`t` tensor over `n` indices, stored with the first index slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    pub n: usize,
    pub t: u32,
    pub data: Vec<f64>,
}

impl SymTensor {
    pub fn zeros(n: usize, t: u32) -> Self {
        SymTensor {
            n,
            t,
            data: vec![0.0; n.pow(t)],
        }
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn index_of(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.t as usize];
        for slot in idx.iter_mut().rev() {
            *slot = k % self.n;
            k /= self.n;
        }
        idx
    }

    /// Average each entry over all permutations of its index tuple.
    pub fn symmetrize(&mut self) {
        use std::collections::HashMap;
        let mut acc: HashMap<Vec<usize>, (f64, usize)> = HashMap::new();
        for k in 0..self.data.len() {
            let mut key = self.index_of(k);
            key.sort_unstable();
            let e = acc.entry(key).or_insert((0.0, 0));
            e.0 += self.data[k];
            e.1 += 1;
        }
        for k in 0..self.data.len() {
            let mut key = self.index_of(k);
            key.sort_unstable();
            let (s, c) = acc[&key];
            self.data[k] = s / c as f64;
        }
    }

    /// `<B, x^{(t)}>` as a polynomial in `n` variables.
    pub fn form(&self) -> Polynomial {
        let mut p = Polynomial::zero(self.n);
        for k in 0..self.data.len() {
            let v = self.data[k];
            if v != 0.0 {
                let mut e = vec![0u32; self.n];
                for i in self.index_of(k) {
                    e[i] += 1;
                }
                p.add_term(e, v);
            }
        }
        p
    }
}

/// Random symmetric tensor (entries uniform on `[-1, 1]`, drawn in storage order, then
/// symmetrized); the copositive kind overwrites each diagonal entry with
/// `1e-6 - sum of the negative entries in its slice`.
pub fn cst_symmetric(n: usize, t: u32, kind: CstKind, seed: u64) -> SymTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = SymTensor::zeros(n, t);
    for v in b.data.iter_mut() {
        *v = uniform(&mut rng, -1.0, 1.0);
    }
    b.symmetrize();
    if kind == CstKind::Copositive {
        let slice = n.pow(t - 1);
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let d = b.offset(&vec![i; t as usize]);
            let neg: f64 = (i * slice..(i + 1) * slice)
                .filter(|&k| k != d && b.data[k] < 0.0)
                .map(|k| b.data[k])
                .sum();
            diag.push((d, 1e-6 - neg));
        }
        for (d, v) in diag {
            b.data[d] = v;
        }
    }
    b
}

/// `min { <B, x^{(t)}> : e^T x = 1, x >= 0 }`.
pub fn cst_tensor(n: usize, t: u32, kind: CstKind, seed: u64) -> Result<PolynomialProgram> {
    if t != 2 && t != 4 {
        return Err(Error::Parameter(format!(
            "tensor order must be 2 or 4, got {t}"
        )));
    }
    if n == 0 {
        return Err(Error::Parameter("tensor dimension must be positive".into()));
    }
    let b = cst_symmetric(n, t, kind, seed);
    Ok(PolynomialProgram::new(b.form(), Domain::Nonnegative).with_equality(simplex_equality(n)))
}

/// `B_{i_1..i_t} = sum_j (-1)^{j+1} j exp(-i_j)` with 1-based indices.
pub fn ntf_entry(idx: &[usize]) -> f64 {
    idx.iter()
        .enumerate()
        .map(|(j, &i)| {
            let j = j + 1;
            let s = if j % 2 == 1 { 1.0 } else { -1.0 };
            s * j as f64 * (-(i as f64)).exp()
        })
        .sum()
}

/// Symmetric entries of types 1-3 with 1-based indices.
pub fn nstf_entry(kind: u32, n: usize, idx: &[usize]) -> f64 {
    idx.iter()
        .map(|&i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            let fi = i as f64;
            match kind {
                1 => s / fi,
                2 => (s * fi / n as f64).atan(),
                _ => s * fi.ln(),
            }
        })
        .sum()
}

fn check_order(t: u32) -> Result<()> {
    if t != 3 && t != 4 {
        return Err(Error::Parameter(format!(
            "tensor order must be 3 or 4, got {t}"
        )));
    }
    Ok(())
}

/// `||x||^2 - 1` over variables `offset..offset + n` of `nvars`.
fn sphere(nvars: usize, offset: usize, n: usize) -> Polynomial {
    let mut p = Polynomial::constant(nvars, -1.0);
    for i in 0..n {
        p = p.add(&Polynomial::var(nvars, offset + i).pow(2));
    }
    p
}

fn for_each_index(n: usize, t: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; t];
    loop {
        f(&idx);
        let mut k = t;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Rank-one nonnegative approximation of the general tensor: `t` unit blocks `x^(j)` of size `n`,
/// variable `(j, i)` at position `j n + i`.
pub fn ntf_tensor(n: usize, t: u32) -> Result<PolynomialProgram> {
    check_order(t)?;
    let t = t as usize;
    let nv = n * t;
    let mut f = Polynomial::zero(nv);
    for_each_index(n, t, |idx| {
        let one_based: Vec<usize> = idx.iter().map(|i| i + 1).collect();
        let mut e = vec![0u32; nv];
        for (j, &i) in idx.iter().enumerate() {
            e[j * n + i] += 1;
        }
        f.add_term(e, -ntf_entry(&one_based));
    });
    let mut pop = PolynomialProgram::new(f, Domain::Nonnegative);
    for j in 0..t {
        pop = pop.with_equality(sphere(nv, j * n, n));
    }
    Ok(pop)
}

/// Rank-one nonnegative approximation of a symmetric tensor on the unit sphere.
pub fn nstf_tensor(n: usize, t: u32, kind: u32) -> Result<PolynomialProgram> {
    check_order(t)?;
    if !(1..=3).contains(&kind) {
        return Err(Error::Parameter(format!(
            "symmetric tensor type must be 1, 2 or 3, got {kind}"
        )));
    }
    let mut f = Polynomial::zero(n);
    for_each_index(n, t as usize, |idx| {
        let one_based: Vec<usize> = idx.iter().map(|i| i + 1).collect();
        let mut e = vec![0u32; n];
        for &i in idx {
            e[i] += 1;
        }
        f.add_term(e, -nstf_entry(kind, n, &one_based));
    });
    Ok(PolynomialProgram::new(f, Domain::Nonnegative).with_equality(sphere(n, 0, n)))
}
