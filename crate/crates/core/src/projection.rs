//! Projections onto the polyhedral set, the psd cone and the face `{X psd : A X = 0}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::relax::ConsistencyBlocks;

/// Orthogonal decomposition `R^N = range(A^T) + ker(A)` for a full-row-rank `A`.
#[derive(Clone, Debug)]
pub struct FaceProjector {
    a: DMatrix<f64>,
    /// Orthonormal basis of `range(A^T)`, `N x m`, with `A^T = qa * ra`.
    qa: DMatrix<f64>,
    ra: DMatrix<f64>,
    kernel: DMatrix<f64>,
}

impl FaceProjector {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if m > n {
            return Err(Error::Precondition(format!(
                "facial matrix has {m} rows but only {n} columns"
            )));
        }
        if m == 0 {
            return Ok(FaceProjector {
                a: a.clone(),
                qa: DMatrix::zeros(n, 0),
                ra: DMatrix::zeros(0, 0),
                kernel: DMatrix::identity(n, n),
            });
        }
        let qr = a.transpose().qr();
        let qa = qr.q();
        let ra = qr.r();
        let diag = ra.diagonal().map(f64::abs);
        if diag.min() <= 1e-10 * diag.max() {
            return Err(Error::Precondition(format!(
                "facial matrix is rank deficient (|r_ii| ranges over [{:.3e}, {:.3e}])",
                diag.min(),
                diag.max()
            )));
        }
        let mut stacked = DMatrix::zeros(n, m + n);
        stacked.columns_mut(0, m).copy_from(&qa);
        stacked.columns_mut(m, n).fill_with_identity();
        let full = stacked.qr().q();
        let mut kernel = full.columns(m, n - m).into_owned();
        // one re-orthogonalization sweep against range(A^T)
        let overlap = qa.transpose() * &kernel;
        kernel -= &qa * overlap;
        for mut c in kernel.column_iter_mut() {
            let nrm = c.norm();
            c /= nrm;
        }
        Ok(FaceProjector {
            a: a.clone(),
            qa,
            ra,
            kernel,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn kernel_basis(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    /// `J M` for `J = I - A^T (A A^T)^{-1} A`, using whichever of the two thin forms is cheaper.
    pub fn apply(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let k = self.rows();
        if k == 0 {
            return m.clone();
        }
        if k <= self.dim() - k {
            let t = self.qa.transpose() * m;
            m - &self.qa * t
        } else {
            let t = self.kernel.transpose() * m;
            &self.kernel * t
        }
    }

    pub fn apply_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        if self.rows() == 0 {
            return v.clone();
        }
        v - &self.qa * (self.qa.transpose() * v)
    }

    /// `J G J`, symmetrized.
    pub fn apply_sym(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        if self.rows() == 0 {
            return g.clone();
        }
        let jg = self.apply(g);
        let mut out = self.apply(&jg.transpose());
        symmetrize(&mut out);
        out
    }

    /// `(A A^T)^{-1} A G (I - A^T (A A^T)^{-1} A / 2)`.
    pub fn dual_multiplier(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        if self.rows() == 0 {
            return DMatrix::zeros(0, n);
        }
        let qtg = self.qa.transpose() * g;
        let right = &qtg - (&qtg * &self.qa) * self.qa.transpose() * 0.5;
        self.ra
            .solve_upper_triangular(&right)
            .expect("triangular factor checked nonsingular at construction")
    }
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..j {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Projection onto `{X : X_p = X_q within each block} (∩ {X >= 0})`, with the normalization block fixed to 1.
pub fn project_consistency_nonneg(
    x: &DMatrix<f64>,
    blocks: &ConsistencyBlocks,
    nonneg: bool,
    normalize: bool,
) -> DMatrix<f64> {
    let mut out = x.clone();
    project_consistency_nonneg_in_place(&mut out, blocks, nonneg, normalize, &mut Vec::new());
    out
}

/// In-place variant; `scratch` is reused across calls to avoid reallocating block sums.
pub fn project_consistency_nonneg_in_place(
    x: &mut DMatrix<f64>,
    blocks: &ConsistencyBlocks,
    nonneg: bool,
    normalize: bool,
    scratch: &mut Vec<f64>,
) {
    assert_eq!(x.nrows(), blocks.dim());
    let ids = blocks.block_ids();
    scratch.clear();
    scratch.resize(blocks.num_blocks(), 0.0);
    // block ids are symmetric, so column-major storage order is harmless
    for (&v, &b) in x.as_slice().iter().zip(ids) {
        scratch[b as usize] += v;
    }
    for (s, &n) in scratch.iter_mut().zip(blocks.sizes()) {
        *s /= n as f64;
        if nonneg && *s < 0.0 {
            *s = 0.0;
        }
    }
    if normalize {
        scratch[blocks.gamma0()] = 1.0;
    }
    for (v, &b) in x.as_mut_slice().iter_mut().zip(ids) {
        *v = scratch[b as usize];
    }
}

/// Eigendecomposition with a failure report instead of a panic.
pub fn symmetric_eigen(g: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "non-finite entry in matrix passed to eigensolver".into(),
        ));
    }
    let n = g.nrows();
    match g
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 1000 * n.max(10))
    {
        Some(e) => Ok((e.eigenvalues, e.eigenvectors)),
        None => Err(Error::Numerical(format!(
            "symmetric eigensolver did not converge on a {n}x{n} matrix with norm {:.3e}",
            g.norm()
        ))),
    }
}

/// `V max(Λ, 0) V^T` together with the factor `V_+ sqrt(Λ_+)` over eigenvalues above `keep_rel * λ_max`.
pub struct PsdProjection {
    pub x: DMatrix<f64>,
    pub factor: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
}

pub fn project_psd_full(g: &DMatrix<f64>, keep_rel: f64) -> Result<PsdProjection> {
    let (vals, vecs) = symmetric_eigen(g)?;
    let n = g.nrows();
    let keep = keep_rel * vals.iter().copied().fold(0.0, f64::max);
    let pos: Vec<usize> = (0..n).filter(|&k| vals[k] > 0.0).collect();
    let mut full = DMatrix::zeros(n, pos.len());
    for (c, &k) in pos.iter().enumerate() {
        full.set_column(c, &(vecs.column(k) * vals[k].sqrt()));
    }
    let mut x = &full * full.transpose();
    symmetrize(&mut x);
    let kept: Vec<usize> = pos
        .iter()
        .enumerate()
        .filter(|&(_, &k)| vals[k] > keep)
        .map(|(c, _)| c)
        .collect();
    let factor = full.select_columns(&kept);
    Ok(PsdProjection {
        x,
        factor,
        eigenvalues: vals,
    })
}

/// Projection onto the psd cone; negative eigenvalues are clamped to exactly zero.
pub fn project_psd(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(project_psd_full(g, 0.0)?.x)
}

/// Projection onto `{X psd : A X = 0}`: `Π_psd(J G J)`.
pub fn project_face_psd(g: &DMatrix<f64>, fp: &FaceProjector) -> Result<DMatrix<f64>> {
    if g.nrows() != fp.dim() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{}, face projector expects {}",
            g.nrows(),
            g.ncols(),
            fp.dim()
        )));
    }
    project_psd(&fp.apply_sym(g))
}
