//! Lifting a polynomial program to the polyhedral-SDP relaxation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::blocks::{pairs_summing_to, ConsistencyBlocks};
use super::moment::Localizer;
use super::program::{Domain, PolynomialProgram};
use crate::error::{Error, Result};
use crate::monomial::{
    enumerate_basis, exponents_up_to, homogenize, homogenize_to, MonomialBasis, MonomialExponent,
    Polynomial,
};
use crate::sparse::SymSparse;

/// Relative threshold for dropping dependent facial rows.
pub const RANK_TOL: f64 = 1e-10;

/// `min <Q0, X> s.t. <H0, X> = 1, A X = 0, <Q_i, X> = b_i, X in L (and X >= 0), X psd`.
#[derive(Clone, Debug)]
pub struct RelaxationProblem {
    pub basis: MonomialBasis,
    pub q0: SymSparse,
    /// Facial rows, `m x N`, full row rank.
    pub a: DMatrix<f64>,
    pub qeq: Vec<SymSparse>,
    pub b: Vec<f64>,
    pub blocks: ConsistencyBlocks,
    pub nonneg: bool,
    /// Whether the normalization block is fixed to 1 by the polyhedral projection.
    pub normalize: bool,
}

impl RelaxationProblem {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn num_facial_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn h0(&self) -> SymSparse {
        let e = self.basis.e1_index();
        SymSparse::from_triplets(self.dim(), [(e, e, 1.0)])
    }

    /// Scalar constraint count: consistency + facial + normalization + general.
    pub fn constraint_count(&self) -> usize {
        let n = self.dim();
        n * (n + 1) / 2 - self.blocks.num_blocks() + self.a.nrows() * n + 1 + self.qeq.len()
    }

    /// `u(x) u(x)^T` at `x = (1, w)`.
    pub fn rank_one_point(&self, w: &[f64]) -> DMatrix<f64> {
        let mut x = vec![1.0];
        x.extend_from_slice(w);
        let u = DVector::from_vec(self.basis.evaluate(&x));
        &u * u.transpose()
    }

    /// `Q(X)`: the vector of `<Q_i, X>`.
    pub fn apply_q(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.qeq.len(), self.qeq.iter().map(|q| q.inner(x)))
    }
}

/// Gram matrix of a homogeneous polynomial of degree `2 tau`, each coefficient spread evenly over its block.
pub fn lift_polynomial(pbar: &Polynomial, basis: &MonomialBasis) -> Result<SymSparse> {
    if pbar.nvars() != basis.n() + 1 {
        return Err(Error::Dimension(format!(
            "polynomial has {} variables, basis has {}",
            pbar.nvars(),
            basis.n() + 1
        )));
    }
    let mut triplets = Vec::new();
    for (e, c) in pbar.terms() {
        let gamma = MonomialExponent(e.to_vec());
        let pairs = pairs_summing_to(&gamma, basis);
        if pairs.is_empty() {
            return Err(Error::Coverage { gamma: gamma.0 });
        }
        let v = c / pairs.len() as f64;
        triplets.extend(
            pairs
                .into_iter()
                .filter(|(i, j)| i <= j)
                .map(|(i, j)| (i, j, v)),
        );
    }
    Ok(SymSparse::from_triplets(basis.len(), triplets))
}

/// Coefficient row of a polynomial of degree at most `tau` on the degree-`tau` basis.
pub(crate) fn linear_row(q: &Polynomial, basis: &MonomialBasis) -> Result<DVector<f64>> {
    let tau = basis.tau();
    if q.degree() > tau {
        return Err(Error::Structure(format!(
            "degree {} equality is not linear in the degree-{tau} basis",
            q.degree()
        )));
    }
    let h = homogenize_to(q, tau)?;
    let mut row = DVector::zeros(basis.len());
    for (e, c) in h.terms() {
        let k = basis
            .position(&MonomialExponent(e.to_vec()))
            .ok_or_else(|| Error::Coverage { gamma: e.to_vec() })?;
        row[k] += c;
    }
    Ok(row)
}

/// Keep a maximal independent subset of `rows`, scanning in order.
pub fn independent_rows(rows: Vec<DVector<f64>>, dim: usize) -> DMatrix<f64> {
    let mut kept: Vec<DVector<f64>> = Vec::new();
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    for r in rows {
        let norm = r.norm();
        if norm == 0.0 {
            continue;
        }
        let mut q = &r / norm;
        for _ in 0..2 {
            for o in &ortho {
                let d = o.dot(&q);
                q.axpy(-d, o, 1.0);
            }
        }
        let res = q.norm();
        if res > RANK_TOL {
            ortho.push(q / res);
            kept.push(r);
        }
    }
    let mut a = DMatrix::zeros(kept.len(), dim);
    for (i, r) in kept.iter().enumerate() {
        a.set_row(i, &r.transpose());
    }
    a
}

/// Stack the coefficient rows of linear-in-basis equalities and drop dependent ones.
pub fn build_facial_rows(
    linear_equalities: &[Polynomial],
    basis: &MonomialBasis,
) -> Result<DMatrix<f64>> {
    let rows = linear_equalities
        .iter()
        .map(|q| linear_row(q, basis))
        .collect::<Result<Vec<_>>>()?;
    Ok(independent_rows(rows, basis.len()))
}

/// `{ g(w) w^kappa : |kappa| <= 2 tau - deg g }`.
pub fn generate_redundant_equalities(g: &Polynomial, tau: u32) -> Result<Vec<Polynomial>> {
    let d = g.degree();
    if d > 2 * tau {
        return Err(Error::Degree(format!(
            "equality of degree {d} exceeds 2 tau = {}",
            2 * tau
        )));
    }
    Ok(exponents_up_to(g.nvars(), 2 * tau - d)
        .iter()
        .map(|k| g.mul_monomial(&k.0))
        .collect())
}

/// Products `g(w) w^kappa` with `|kappa| <= tau - deg g`; every product is linear in the degree-`tau` basis.
fn rlt_products(g: &Polynomial, tau: u32) -> Vec<Polynomial> {
    exponents_up_to(g.nvars(), tau - g.degree())
        .iter()
        .map(|k| g.mul_monomial(&k.0))
        .collect()
}

/// If `q` is semidefinite, rows spanning its range, from a diagonally pivoted elimination
/// `±q = sum r r^T / d`. Each row is scaled to unit max-norm with its last nonzero positive, so
/// integer data such as `(l^T u)^2` gives back the coefficients of `l` exactly.
///
/// For `X` psd, `<q, X> = 0` with `q` semidefinite is equivalent to `F X = 0`.
fn semidefinite_rows(q: &SymSparse) -> Option<Vec<DVector<f64>>> {
    let dense = q.to_dense();
    let eig = dense.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax();
    if scale == 0.0 {
        return Some(Vec::new());
    }
    let tol = 1e-12 * scale;
    let sign = if eig.eigenvalues.min() >= -tol {
        1.0
    } else if eig.eigenvalues.max() <= tol {
        -1.0
    } else {
        return None;
    };
    let mut s = dense * sign;
    let mut rows = Vec::new();
    loop {
        let (k, d) = s
            .diagonal()
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, v)| if v > best.1 { (i, v) } else { best },
            );
        if d <= tol {
            break;
        }
        let r = s.row(k).transpose();
        s -= &r * r.transpose() / d;
        let mut v = &r / r.amax();
        if let Some(last) = v.iter().rev().find(|x| x.abs() > 1e-14).copied() {
            if last < 0.0 {
                v = -v;
            }
        }
        rows.push(v);
    }
    Some(rows)
}

fn check_order(pop: &PolynomialProgram, tau: u32) -> Result<()> {
    pop.validate()?;
    if tau == 0 || tau < pop.max_degree().div_ceil(2) {
        return Err(Error::Degree(format!(
            "order {tau} is below the minimum {} for polynomials of degree {}",
            pop.min_order(),
            pop.max_degree()
        )));
    }
    Ok(())
}

/// Lifted pieces shared by both relaxation families.
pub(crate) struct Lifted {
    pub basis: MonomialBasis,
    pub blocks: ConsistencyBlocks,
    pub q0: SymSparse,
}

pub(crate) fn lift_common(pop: &PolynomialProgram, tau: u32) -> Result<Lifted> {
    check_order(pop, tau)?;
    let basis = enumerate_basis(pop.n, tau)?;
    let blocks = ConsistencyBlocks::new(&basis)?;
    let q0 = lift_polynomial(&homogenize(&pop.objective, tau)?, &basis)?;
    Ok(Lifted { basis, blocks, q0 })
}

/// Sort general equalities into facial rows (when semidefinite) or general operators.
pub(crate) fn split_general(
    general: Vec<Polynomial>,
    basis: &MonomialBasis,
    rows: &mut Vec<DVector<f64>>,
    qeq: &mut Vec<SymSparse>,
) -> Result<()> {
    let tau = basis.tau();
    for g in general {
        if g.is_zero() {
            continue;
        }
        let q = lift_polynomial(&homogenize(&g, tau)?, basis)?;
        match semidefinite_rows(&q) {
            Some(r) => rows.extend(r),
            None => qeq.push(q),
        }
    }
    Ok(())
}

/// Polyhedral-SDP relaxation of order `tau`; with `use_rlt`, low-degree equalities become facial RLT rows.
pub fn build_polyhedral_sdp(
    pop: &PolynomialProgram,
    tau: u32,
    use_rlt: bool,
) -> Result<RelaxationProblem> {
    if !pop.inequalities.is_empty() {
        return Err(Error::Precondition(
            "eliminate inequalities with a slack reformulation first".into(),
        ));
    }
    let Lifted { basis, blocks, q0 } = lift_common(pop, tau)?;
    let mut rows = Vec::new();
    let mut general = Vec::new();
    for g in &pop.equalities {
        if use_rlt && g.degree() <= tau {
            for q in rlt_products(g, tau) {
                rows.push(linear_row(&q, &basis)?);
            }
        } else {
            general.push(g.clone());
        }
    }
    let mut qeq = Vec::new();
    split_general(general, &basis, &mut rows, &mut qeq)?;
    let a = independent_rows(rows, basis.len());
    let b = vec![0.0; qeq.len()];
    Ok(RelaxationProblem {
        basis,
        q0,
        a,
        qeq,
        b,
        blocks,
        nonneg: pop.domain == Domain::Nonnegative,
        normalize: true,
    })
}

/// COO form of a built problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemJson {
    pub n: usize,
    pub tau: u32,
    pub dim: usize,
    pub basis: Vec<Vec<u32>>,
    pub nonneg: bool,
    pub normalize: bool,
    pub q0: Vec<(usize, usize, f64)>,
    pub h0: Vec<(usize, usize, f64)>,
    pub a: Vec<(usize, usize, f64)>,
    pub a_rows: usize,
    pub qeq: Vec<Vec<(usize, usize, f64)>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub localizers: Vec<LocalizerJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalizerJson {
    pub out_dim: usize,
    /// `(k, l, i, j, coef)`: output `(k, l)` gains `coef` times the mean of the block containing `(i, j)`.
    pub entries: Vec<(usize, usize, usize, usize, f64)>,
}

pub fn problem_to_json(p: &RelaxationProblem, localizers: &[Localizer]) -> ProblemJson {
    let mut a = Vec::new();
    for i in 0..p.a.nrows() {
        for j in 0..p.a.ncols() {
            if p.a[(i, j)] != 0.0 {
                a.push((i, j, p.a[(i, j)]));
            }
        }
    }
    ProblemJson {
        n: p.basis.n(),
        tau: p.basis.tau(),
        dim: p.dim(),
        basis: p.basis.exponents().iter().map(|e| e.0.clone()).collect(),
        nonneg: p.nonneg,
        normalize: p.normalize,
        q0: p.q0.entries.clone(),
        h0: p.h0().entries,
        a,
        a_rows: p.a.nrows(),
        qeq: p.qeq.iter().map(|q| q.entries.clone()).collect(),
        b: p.b.clone(),
        localizers: localizers.iter().map(|l| l.to_json(&p.blocks)).collect(),
    }
}
