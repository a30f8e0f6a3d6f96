use nalgebra::{DMatrix, DVector};

use crate::projection::{project_consistency_nonneg_in_place, project_psd};
use crate::relax::moment::{block_means, expand_block_weights};
use crate::relax::{Localizer, MomentProblem, RelaxationProblem};
use crate::Result;

/// Problem data needed to evaluate the augmented Lagrangian.
pub struct PenaltyModel<'a> {
    pub problem: &'a RelaxationProblem,
    pub localizers: &'a [Localizer],
    pub c: DMatrix<f64>,
    b: DVector<f64>,
}

impl<'a> PenaltyModel<'a> {
    pub fn new(problem: &'a RelaxationProblem, localizers: &'a [Localizer]) -> Self {
        PenaltyModel {
            problem,
            localizers,
            c: problem.q0.to_dense(),
            b: DVector::from_column_slice(&problem.b),
        }
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn project_p(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        project_consistency_nonneg_in_place(
            &mut out,
            &self.problem.blocks,
            self.problem.nonneg,
            self.problem.normalize,
            &mut Vec::new(),
        );
        out
    }

    pub fn q_residual(&self, x: &DMatrix<f64>) -> DVector<f64> {
        self.problem.apply_q(x) - &self.b
    }

    /// `M_j(X)` for every localizer.
    pub fn localize(&self, x: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
        if self.localizers.is_empty() {
            return Vec::new();
        }
        let means = block_means(x, &self.problem.blocks);
        self.localizers
            .iter()
            .map(|l| l.apply_means(&means))
            .collect()
    }

    /// `sum_j M_j^*(Z_j)` added into `out` scaled by `s`.
    pub fn add_localizer_adjoint(&self, zs: &[DMatrix<f64>], s: f64, out: &mut DMatrix<f64>) {
        if self.localizers.is_empty() {
            return;
        }
        let mut w = vec![0.0; self.problem.blocks.num_blocks()];
        for (l, z) in self.localizers.iter().zip(zs) {
            l.accumulate_adjoint(z, &mut w);
        }
        for v in &mut w {
            *v *= s;
        }
        expand_block_weights(&w, &self.problem.blocks, out);
    }

    /// `Q^*(v)` added into `out` scaled by `s`.
    pub fn add_q_adjoint(&self, v: &DVector<f64>, s: f64, out: &mut DMatrix<f64>) {
        for (q, &vi) in self.problem.qeq.iter().zip(v.iter()) {
            q.add_to(out, s * vi);
        }
    }

    /// Value and gradient of the augmented Lagrangian with the polyhedral block minimized out.
    pub fn eval(&self, x: &DMatrix<f64>, m: &Multipliers, sigma: f64) -> Result<PhiEval> {
        let inv = 1.0 / sigma;
        let mut z = x - &m.w * inv;
        let mut proj = z.clone();
        project_consistency_nonneg_in_place(
            &mut proj,
            &self.problem.blocks,
            self.problem.nonneg,
            self.problem.normalize,
            &mut Vec::new(),
        );
        z -= &proj;
        let qres = self.q_residual(x);
        let e = &m.y * inv - &qres;
        let mut value = self.c.dot(x) + 0.5 * sigma * (e.norm_squared() + z.norm_squared());
        let mut grad = &self.c + &z * sigma;
        self.add_q_adjoint(&e, -sigma, &mut grad);
        let mx = self.localize(x);
        let mut pk = Vec::with_capacity(mx.len());
        for (mj, wj) in mx.iter().zip(&m.wloc) {
            let p = project_psd(&(wj * inv - mj))?;
            value += 0.5 * sigma * p.norm_squared();
            pk.push(p);
        }
        self.add_localizer_adjoint(&pk, -sigma, &mut grad);
        Ok(PhiEval {
            value,
            grad,
            y: proj,
            qres,
            mx,
        })
    }
}

/// Multipliers of `Q(X) = b`, `X = Y` and `M_j(X) = Y_j`.
#[derive(Clone, Debug)]
pub struct Multipliers {
    pub y: DVector<f64>,
    pub w: DMatrix<f64>,
    pub wloc: Vec<DMatrix<f64>>,
}

impl Multipliers {
    pub fn zeros(model: &PenaltyModel) -> Self {
        let n = model.dim();
        Multipliers {
            y: DVector::zeros(model.problem.qeq.len()),
            w: DMatrix::zeros(n, n),
            wloc: model
                .localizers
                .iter()
                .map(|l| DMatrix::zeros(l.out_dim(), l.out_dim()))
                .collect(),
        }
    }

    /// `(|y|^2 + |W|^2 + sum_j |W_j|^2) / (2 sigma)`, the gap between `phi` and the augmented Lagrangian.
    pub fn constant_term(&self, sigma: f64) -> f64 {
        let s = self.y.norm_squared()
            + self.w.norm_squared()
            + self.wloc.iter().map(|w| w.norm_squared()).sum::<f64>();
        0.5 * s / sigma
    }
}

pub struct PhiEval {
    pub value: f64,
    pub grad: DMatrix<f64>,
    /// `Π_P(X - W / sigma)`.
    pub y: DMatrix<f64>,
    /// `Q(X) - b`.
    pub qres: DVector<f64>,
    /// `M_j(X)`.
    pub mx: Vec<DMatrix<f64>>,
}

/// `phi(X)` and its gradient for a polyhedral-SDP relaxation.
pub fn eval_phi(
    x: &DMatrix<f64>,
    problem: &RelaxationProblem,
    y: &DVector<f64>,
    w: &DMatrix<f64>,
    sigma: f64,
) -> Result<(f64, DMatrix<f64>)> {
    let model = PenaltyModel::new(problem, &[]);
    let m = Multipliers {
        y: y.clone(),
        w: w.clone(),
        wloc: Vec::new(),
    };
    let e = model.eval(x, &m, sigma)?;
    Ok((e.value, e.grad))
}

/// `phi(X)` and its gradient including the localizer penalty terms.
pub fn eval_phi_moment(
    x: &DMatrix<f64>,
    problem: &MomentProblem,
    y: &DVector<f64>,
    w: &DMatrix<f64>,
    wblocks: &[DMatrix<f64>],
    sigma: f64,
) -> Result<(f64, DMatrix<f64>)> {
    let model = PenaltyModel::new(&problem.relax, &problem.localizers);
    let m = Multipliers {
        y: y.clone(),
        w: w.clone(),
        wloc: wblocks.to_vec(),
    };
    let e = model.eval(x, &m, sigma)?;
    Ok((e.value, e.grad))
}
