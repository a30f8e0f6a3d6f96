//! Consistency blocks: index pairs of the moment matrix grouped by exponent sum.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::monomial::{block_key, MonomialBasis, MonomialExponent};

/// Partition of the ordered index pairs `(i, j)` of an `N x N` matrix by `alpha_i + alpha_j`.
///
/// Block ids are assigned in order of first appearance when scanning the upper
/// triangle row by row, so the normalization block `(2 tau, 0, ..., 0)` has id 0.
#[derive(Clone, Debug)]
pub struct ConsistencyBlocks {
    dim: usize,
    block_of: Vec<u32>,
    sizes: Vec<u32>,
    rep: Vec<(u32, u32)>,
}

impl ConsistencyBlocks {
    pub fn new(basis: &MonomialBasis) -> Result<Self> {
        let dim = basis.len();
        let tau = basis.tau() as usize;
        let nv = basis.n() + 1;
        let bits = usize::BITS - nv.leading_zeros();
        if 2 * tau * bits as usize > 128 {
            return Err(Error::Capacity(format!(
                "block keys for degree {} in {nv} variables do not fit in 128 bits",
                2 * tau
            )));
        }
        let ms: Vec<Vec<u32>> = basis.exponents().iter().map(|a| a.multiset()).collect();
        let mut ids: HashMap<u128, u32> = HashMap::new();
        let mut block_of = vec![0u32; dim * dim];
        let mut sizes: Vec<u32> = Vec::new();
        let mut rep = Vec::new();
        let mut merged = Vec::with_capacity(2 * tau);
        for i in 0..dim {
            for j in i..dim {
                merge_sorted(&ms[i], &ms[j], &mut merged);
                let key = merged
                    .iter()
                    .fold(0u128, |acc, &v| (acc << bits) | (v as u128 + 1));
                let next = sizes.len() as u32;
                let id = *ids.entry(key).or_insert(next);
                if id == next {
                    sizes.push(0);
                    rep.push((i as u32, j as u32));
                }
                block_of[i * dim + j] = id;
                block_of[j * dim + i] = id;
                sizes[id as usize] += if i == j { 1 } else { 2 };
            }
        }
        Ok(ConsistencyBlocks {
            dim,
            block_of,
            sizes,
            rep,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn gamma0(&self) -> usize {
        0
    }

    /// Block id of the entry `(i, j)`.
    #[inline]
    pub fn block(&self, i: usize, j: usize) -> usize {
        self.block_of[i * self.dim + j] as usize
    }

    /// Row-major block ids of all `N^2` entries.
    pub fn block_ids(&self) -> &[u32] {
        &self.block_of
    }

    /// Number of ordered pairs in block `b`.
    pub fn size(&self, b: usize) -> usize {
        self.sizes[b] as usize
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Exponent sum shared by every pair in block `b`.
    pub fn key(&self, b: usize, basis: &MonomialBasis) -> MonomialExponent {
        let (i, j) = self.rep[b];
        block_key(basis.exponent(i as usize), basis.exponent(j as usize))
    }

    /// Block id of the exponent `gamma` of degree `2 tau`, if any pair sums to it.
    pub fn find(&self, gamma: &MonomialExponent, basis: &MonomialBasis) -> Option<usize> {
        let (a, b) = split_exponent(gamma, basis.tau())?;
        Some(self.block(basis.position(&a)?, basis.position(&b)?))
    }

    /// All ordered pairs in block `b` (a full scan, meant for tests and diagnostics).
    pub fn pairs(&self, b: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.size(b));
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.block(i, j) == b {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn merge_sorted(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Split `gamma` of degree `2 tau` into two degree-`tau` exponents.
pub fn split_exponent(
    gamma: &MonomialExponent,
    tau: u32,
) -> Option<(MonomialExponent, MonomialExponent)> {
    if gamma.degree() != 2 * tau {
        return None;
    }
    let mut a = vec![0u32; gamma.len()];
    let mut left = tau;
    for (v, &g) in gamma.0.iter().enumerate() {
        let take = g.min(left);
        a[v] = take;
        left -= take;
    }
    let b = gamma.0.iter().zip(&a).map(|(g, x)| g - x).collect();
    Some((MonomialExponent(a), MonomialExponent(b)))
}

/// All ordered pairs `(i, j)` with `alpha_i + alpha_j = gamma`, by enumerating the sub-exponents of `gamma`.
pub fn pairs_summing_to(gamma: &MonomialExponent, basis: &MonomialBasis) -> Vec<(usize, usize)> {
    let tau = basis.tau();
    let mut out = Vec::new();
    if gamma.degree() != 2 * tau || gamma.len() != basis.n() + 1 {
        return out;
    }
    let mut cur = vec![0u32; gamma.len()];
    sub_exponents(&gamma.0, 0, tau, &mut cur, &mut |alpha| {
        let beta: Vec<u32> = gamma.0.iter().zip(alpha).map(|(g, a)| g - a).collect();
        let i = basis.position(&MonomialExponent(alpha.to_vec()));
        let j = basis.position(&MonomialExponent(beta));
        if let (Some(i), Some(j)) = (i, j) {
            out.push((i, j));
        }
    });
    out.sort_unstable();
    out
}

fn sub_exponents(gamma: &[u32], v: usize, left: u32, cur: &mut [u32], f: &mut impl FnMut(&[u32])) {
    if v == gamma.len() {
        if left == 0 {
            f(cur);
        }
        return;
    }
    let rest: u32 = gamma[v + 1..].iter().sum();
    let lo = left.saturating_sub(rest);
    for e in lo..=gamma[v].min(left) {
        cur[v] = e;
        sub_exponents(gamma, v + 1, left - e, cur, f);
    }
    cur[v] = 0;
}
