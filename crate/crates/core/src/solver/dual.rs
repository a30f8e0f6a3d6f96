use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::projection::{project_psd, FaceProjector};
use crate::relax::RelaxationProblem;
use crate::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub rp: f64,
    pub rd: f64,
    pub rc: f64,
    pub rmax: f64,
}

impl KktResiduals {
    pub fn new(rp: f64, rd: f64, rc: f64) -> Self {
        KktResiduals {
            rp,
            rd,
            rc,
            rmax: rp.max(rd).max(rc),
        }
    }
}

/// `S = J grad J` and `U = (A A^T)^{-1} A grad (I - A^T (A A^T)^{-1} A / 2)`, so that
/// `grad - A^T U - U^T A = S`.
pub fn dual_recovery(grad_phi: &DMatrix<f64>, fp: &FaceProjector) -> (DMatrix<f64>, DMatrix<f64>) {
    (fp.apply_sym(grad_phi), fp.dual_multiplier(grad_phi))
}

/// Relative primal, dual and complementarity residuals.
///
/// `localized` holds `(M_j(X), Y_j)` pairs; their mismatch counts towards the primal residual.
pub fn kkt_residuals(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    s: &DMatrix<f64>,
    problem: &RelaxationProblem,
    localized: &[(DMatrix<f64>, DMatrix<f64>)],
) -> Result<KktResiduals> {
    let b = nalgebra::DVector::from_column_slice(&problem.b);
    let qres = problem.apply_q(x) - &b;
    let xn = x.norm();
    let mut rp = (x - y).norm() / (1.0 + xn + y.norm());
    if !problem.qeq.is_empty() {
        rp = rp.max(qres.norm() / (1.0 + b.norm()));
    }
    for (mx, yj) in localized {
        rp = rp.max((mx - yj).norm() / (1.0 + mx.norm() + yj.norm()));
    }
    let sn = s.norm();
    let rd = project_psd(&(-s))?.norm() / (1.0 + sn);
    let rc = x.dot(s).abs() / (1.0 + xn + sn);
    Ok(KktResiduals::new(rp, rd, rc))
}
