//! Moment-SOS relaxations and localizing operators.

use nalgebra::DMatrix;

use super::blocks::ConsistencyBlocks;
use super::builder::{
    generate_redundant_equalities, independent_rows, lift_common, linear_row, split_general,
    Lifted, LocalizerJson, RelaxationProblem,
};
use super::program::{Domain, PolynomialProgram};
use crate::error::{Error, Result};
use crate::monomial::{
    block_key, enumerate_basis, exponents_up_to, homogenize_to, MonomialBasis, MonomialExponent,
    Polynomial,
};

/// Linear map `X -> M_h(X)` from the degree-`tau` moment matrix to the degree-`tau - ceil(deg h / 2)` one.
///
/// Entry `(k, l)` of the output is `sum_mu h_mu * mean(X over block(kappa_k + lambda_l + mu))`.
#[derive(Clone, Debug)]
pub struct Localizer {
    pub h: Polynomial,
    pub out_basis: MonomialBasis,
    /// `(k, l, block, coef)` with `k <= l`, sorted by `(k, l)`.
    terms: Vec<(u32, u32, u32, f64)>,
}

impl Localizer {
    pub fn new(h: &Polynomial, basis: &MonomialBasis, blocks: &ConsistencyBlocks) -> Result<Self> {
        let tau = basis.tau();
        let half = h.degree().div_ceil(2);
        if half > tau {
            return Err(Error::Degree(format!(
                "localizer of degree {} needs order at least {half}",
                h.degree()
            )));
        }
        let hbar = homogenize_to(h, 2 * half)?;
        let out_basis = enumerate_basis(basis.n(), tau - half)?;
        let mut terms = Vec::new();
        let m = out_basis.len();
        for k in 0..m {
            for l in k..m {
                let kl = block_key(out_basis.exponent(k), out_basis.exponent(l));
                for (mu, c) in hbar.terms() {
                    let gamma = block_key(&kl, &MonomialExponent(mu.to_vec()));
                    let b = blocks.find(&gamma, basis).ok_or_else(|| Error::Coverage {
                        gamma: gamma.0.clone(),
                    })?;
                    terms.push((k as u32, l as u32, b as u32, c));
                }
            }
        }
        Ok(Localizer {
            h: h.clone(),
            out_basis,
            terms,
        })
    }

    pub fn out_dim(&self) -> usize {
        self.out_basis.len()
    }

    /// Output given precomputed block means of the input.
    pub fn apply_means(&self, means: &[f64]) -> DMatrix<f64> {
        let m = self.out_dim();
        let mut out = DMatrix::zeros(m, m);
        for &(k, l, b, c) in &self.terms {
            out[(k as usize, l as usize)] += c * means[b as usize];
        }
        for k in 0..m {
            for l in k + 1..m {
                out[(l, k)] = out[(k, l)];
            }
        }
        out
    }

    /// Add the block weights of `M^*(z)`: `weights[b] += sum over (k,l) of z_kl * coef`.
    pub fn accumulate_adjoint(&self, z: &DMatrix<f64>, weights: &mut [f64]) {
        for &(k, l, b, c) in &self.terms {
            let (k, l) = (k as usize, l as usize);
            let zkl = if k == l {
                z[(k, k)]
            } else {
                z[(k, l)] + z[(l, k)]
            };
            weights[b as usize] += c * zkl;
        }
    }

    pub fn to_json(&self, blocks: &ConsistencyBlocks) -> LocalizerJson {
        // Each block is named by its first pair in row-major order.
        let mut first = vec![None; blocks.num_blocks()];
        let dim = blocks.dim();
        for i in 0..dim {
            for j in 0..dim {
                let b = blocks.block(i, j);
                if first[b].is_none() {
                    first[b] = Some((i, j));
                }
            }
        }
        LocalizerJson {
            out_dim: self.out_dim(),
            entries: self
                .terms
                .iter()
                .map(|&(k, l, b, c)| {
                    let (i, j) = first[b as usize].unwrap();
                    (k as usize, l as usize, i, j, c)
                })
                .collect(),
        }
    }
}

/// Mean of `x` over every consistency block.
pub fn block_means(x: &DMatrix<f64>, blocks: &ConsistencyBlocks) -> Vec<f64> {
    let mut sums = vec![0.0; blocks.num_blocks()];
    let dim = blocks.dim();
    let ids = blocks.block_ids();
    // nalgebra is column-major: entry (i, j) sits at j * dim + i, and block ids are symmetric.
    for (v, &b) in x.as_slice().iter().zip(ids) {
        sums[b as usize] += v;
    }
    debug_assert_eq!(x.nrows(), dim);
    for (s, &n) in sums.iter_mut().zip(blocks.sizes()) {
        *s /= n as f64;
    }
    sums
}

/// Spread per-block weights back to a matrix: entry `(i, j)` gets `weights[b] / |b|`.
pub fn expand_block_weights(weights: &[f64], blocks: &ConsistencyBlocks, out: &mut DMatrix<f64>) {
    let sizes = blocks.sizes();
    for (v, &b) in out.as_mut_slice().iter_mut().zip(blocks.block_ids()) {
        *v += weights[b as usize] / sizes[b as usize] as f64;
    }
}

pub fn apply_localizer(
    m: &Localizer,
    x: &DMatrix<f64>,
    blocks: &ConsistencyBlocks,
) -> Result<DMatrix<f64>> {
    if x.nrows() != blocks.dim() || x.ncols() != blocks.dim() {
        return Err(Error::Dimension(format!(
            "localizer expects {0}x{0} input, got {1}x{2}",
            blocks.dim(),
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(m.apply_means(&block_means(x, blocks)))
}

pub fn adjoint_localizer(
    m: &Localizer,
    z: &DMatrix<f64>,
    blocks: &ConsistencyBlocks,
) -> Result<DMatrix<f64>> {
    if z.nrows() != m.out_dim() || z.ncols() != m.out_dim() {
        return Err(Error::Dimension(format!(
            "localizer adjoint expects {0}x{0} input, got {1}x{2}",
            m.out_dim(),
            z.nrows(),
            z.ncols()
        )));
    }
    let mut w = vec![0.0; blocks.num_blocks()];
    m.accumulate_adjoint(z, &mut w);
    let mut out = DMatrix::zeros(blocks.dim(), blocks.dim());
    expand_block_weights(&w, blocks, &mut out);
    Ok(out)
}

/// A relaxation with localizing constraints `M_{h_j}(X)` psd.
#[derive(Clone, Debug)]
pub struct MomentProblem {
    pub relax: RelaxationProblem,
    pub localizers: Vec<Localizer>,
}

/// Moment-SOS relaxation of order `tau`; `with_nonneg` adds entrywise nonnegativity of the moment matrix.
pub fn build_moment_sos(
    pop: &PolynomialProgram,
    tau: u32,
    with_nonneg: bool,
) -> Result<MomentProblem> {
    if with_nonneg && pop.domain != Domain::Nonnegative {
        return Err(Error::Precondition(
            "entrywise nonnegativity requires a nonnegative domain".into(),
        ));
    }
    let Lifted { basis, blocks, q0 } = lift_common(pop, tau)?;
    let mut rows = Vec::new();
    let mut general = Vec::new();
    for g in &pop.equalities {
        if g.is_zero() {
            continue;
        }
        let d = g.degree();
        if d <= tau {
            for k in exponents_up_to(pop.n, tau - d) {
                rows.push(linear_row(&g.mul_monomial(&k.0), &basis)?);
            }
        } else {
            general.extend(generate_redundant_equalities(g, tau)?);
        }
    }
    let mut qeq = Vec::new();
    split_general(general, &basis, &mut rows, &mut qeq)?;
    let a = independent_rows(rows, basis.len());

    let mut hs: Vec<Polynomial> = Vec::new();
    if pop.domain == Domain::Nonnegative {
        hs.extend((0..pop.n).map(|j| Polynomial::var(pop.n, j)));
    }
    hs.extend(pop.inequalities.iter().cloned());
    let localizers = hs
        .iter()
        .map(|h| Localizer::new(h, &basis, &blocks))
        .collect::<Result<Vec<_>>>()?;

    let b = vec![0.0; qeq.len()];
    Ok(MomentProblem {
        relax: RelaxationProblem {
            basis,
            q0,
            a,
            qeq,
            b,
            blocks,
            nonneg: with_nonneg,
            normalize: true,
        },
        localizers,
    })
}
