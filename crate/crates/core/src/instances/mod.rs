//! Benchmark generators and brute-force oracles.
//!
//! Every generator is a pure function of its parameters and seed. Random draws come from
//! `ChaCha8Rng::seed_from_u64(seed)`; normals use Box-Muller (see [`crate::rng`]). Matrices are
//! filled over the upper triangle in row-major order and mirrored.

mod oracle;
mod tensor;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::monomial::Polynomial;
use crate::relax::{reformulate_slack, reformulate_squared_slack, Domain, PolynomialProgram};
use crate::rng::{standard_normal, uniform};
use crate::{Error, Result};

pub use oracle::{oracle_solve, OracleResult, DEFAULT_BUDGET};
pub use tensor::{cst_tensor, nstf_entry, nstf_tensor, ntf_entry, ntf_tensor, CstKind, SymTensor};

/// Benchmark family with its size parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Stqp { n: usize },
    Horn { n: usize },
    Biq { n: usize },
    Mbp { n: usize, p: f64 },
    Mqkp { n: usize, d: usize },
    Bqm { n: usize },
    Kmp { n: usize },
    Cst { n: usize, t: u32, kind: CstKind },
    Ntf { n: usize, t: u32 },
    Nstf { n: usize, t: u32, kind: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        InstanceSpec { family, seed }
    }

    pub fn generate(&self) -> Result<PolynomialProgram> {
        let seed = self.seed;
        match self.family {
            Family::Stqp { n } => gen_stqp_gaussian(n, seed),
            Family::Horn { n } => Ok(stqp_program(&horn_extended(n)?)),
            Family::Biq { n } => gen_biq(n, seed),
            Family::Mbp { n, p } => gen_mbp(n, p, seed),
            Family::Mqkp { n, d } => gen_mqkp(n, d, seed),
            Family::Bqm { n } => gen_bqm(n, seed),
            Family::Kmp { n } => gen_kmp(n, seed),
            Family::Cst { n, t, kind } => cst_tensor(n, t, kind, seed),
            Family::Ntf { n, t } => ntf_tensor(n, t),
            Family::Nstf { n, t, kind } => nstf_tensor(n, t, kind),
        }
    }

    /// Short tag used in reports.
    pub fn tag(&self) -> &'static str {
        match self.family {
            Family::Stqp { .. } => "stqp",
            Family::Horn { .. } => "horn",
            Family::Biq { .. } => "biq",
            Family::Mbp { .. } => "mbp",
            Family::Mqkp { .. } => "mqkp",
            Family::Bqm { .. } => "bqm",
            Family::Kmp { .. } => "kmp",
            Family::Cst { .. } => "cst",
            Family::Ntf { .. } => "ntf",
            Family::Nstf { .. } => "nstf",
        }
    }

    /// Size parameter `n` of the family.
    pub fn n(&self) -> usize {
        match self.family {
            Family::Stqp { n }
            | Family::Horn { n }
            | Family::Biq { n }
            | Family::Mbp { n, .. }
            | Family::Mqkp { n, .. }
            | Family::Bqm { n }
            | Family::Kmp { n }
            | Family::Cst { n, .. }
            | Family::Ntf { n, .. }
            | Family::Nstf { n, .. } => n,
        }
    }
}

/// `(v* - v) / max(1, |v*|)` in percent.
pub fn relative_gap(vstar: f64, v: f64) -> f64 {
    (vstar - v) / vstar.abs().max(1.0) * 100.0
}

/// Symmetric matrix with upper triangle drawn row-major from `draw` and mirrored.
pub(crate) fn symmetric_from<F: FnMut() -> f64>(n: usize, mut draw: F) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = draw();
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    q
}

/// `x^T Q x` (plus `c^T x`) as a polynomial.
pub fn quadratic_form(q: &DMatrix<f64>, c: Option<&[f64]>) -> Polynomial {
    let n = q.nrows();
    let mut p = Polynomial::zero(n);
    for i in 0..n {
        for j in i..n {
            let v = if i == j {
                q[(i, i)]
            } else {
                q[(i, j)] + q[(j, i)]
            };
            if v != 0.0 {
                let mut e = vec![0u32; n];
                e[i] += 1;
                e[j] += 1;
                p.add_term(e, v);
            }
        }
    }
    if let Some(c) = c {
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0.0 {
                let mut e = vec![0u32; n];
                e[i] = 1;
                p.add_term(e, ci);
            }
        }
    }
    p
}

/// `sum_i w_i - 1`.
pub fn simplex_equality(n: usize) -> Polynomial {
    let mut p = Polynomial::constant(n, -1.0);
    for i in 0..n {
        p = p.add(&Polynomial::var(n, i));
    }
    p
}

/// `w_i^2 - w_i`.
pub fn binary_equality(n: usize, i: usize) -> Polynomial {
    let w = Polynomial::var(n, i);
    w.pow(2).sub(&w)
}

/// Standard quadratic program `min { x^T Q x : e^T x = 1, x >= 0 }`.
pub fn stqp_program(q: &DMatrix<f64>) -> PolynomialProgram {
    let n = q.nrows();
    PolynomialProgram::new(quadratic_form(q, None), Domain::Nonnegative)
        .with_equality(simplex_equality(n))
}

pub fn gen_stqp_gaussian(n: usize, seed: u64) -> Result<PolynomialProgram> {
    if n < 2 {
        return Err(Error::Parameter("StQP needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(stqp_program(&symmetric_from(n, || {
        standard_normal(&mut rng)
    })))
}

/// The extended Horn matrix: `-1` on the cyclic off-diagonal, `1` elsewhere.
pub fn horn_extended(n: usize) -> Result<DMatrix<f64>> {
    if n < 5 || n % 2 == 0 {
        return Err(Error::Parameter(format!(
            "extended Horn matrix needs odd n >= 5, got {n}"
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let d = i.abs_diff(j);
        if d == 1 || d == n - 1 {
            -1.0
        } else {
            1.0
        }
    }))
}

pub fn gen_biq(n: usize, seed: u64) -> Result<PolynomialProgram> {
    if n == 0 {
        return Err(Error::Parameter("BIQ needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = symmetric_from(n, || standard_normal(&mut rng));
    let c: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
    Ok(biq_program(&q, &c))
}

/// `min { x^T Q x + c^T x : x_i^2 = x_i, x >= 0 }`.
pub fn biq_program(q: &DMatrix<f64>, c: &[f64]) -> PolynomialProgram {
    let n = q.nrows();
    let mut pop = PolynomialProgram::new(quadratic_form(q, Some(c)), Domain::Nonnegative);
    for i in 0..n {
        pop = pop.with_equality(binary_equality(n, i));
    }
    pop
}

/// Graph Laplacian of an Erdos-Renyi graph `G(n, p)`, edges drawn over `i < j` row-major.
pub fn er_laplacian(n: usize, p: f64, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                l[(i, j)] = -1.0;
                l[(j, i)] = -1.0;
                l[(i, i)] += 1.0;
                l[(j, j)] += 1.0;
            }
        }
    }
    l
}

pub fn gen_mbp(n: usize, p: f64, seed: u64) -> Result<PolynomialProgram> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::Parameter(format!(
            "bisection needs even n >= 2, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(
            "edge probability must lie in [0, 1]".into(),
        ));
    }
    let l = er_laplacian(n, p, seed);
    let mut half = Polynomial::constant(n, -(n as f64) / 2.0);
    for i in 0..n {
        half = half.add(&Polynomial::var(n, i));
    }
    let mut pop =
        PolynomialProgram::new(quadratic_form(&l, None), Domain::Nonnegative).with_equality(half);
    for i in 0..n {
        pop = pop.with_equality(binary_equality(n, i));
    }
    Ok(pop)
}

/// Raw multiple quadratic knapsack data: maximize `x^T Q x + c^T x` subject to `A x <= b`.
#[derive(Clone, Debug)]
pub struct MqkpData {
    pub q: DMatrix<f64>,
    pub c: Vec<f64>,
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
}

/// Draw order: `Q` pairs `i < j` row-major (presence, then value), then `c`, then `A` row-major.
pub fn mqkp_data(n: usize, d: usize, seed: u64) -> MqkpData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < 0.25 {
                let v = rng.random_range(1..=100) as f64;
                q[(i, j)] = v;
                q[(j, i)] = v;
            }
        }
    }
    let c: Vec<f64> = (0..n).map(|_| uniform(&mut rng, 1.0, 100.0)).collect();
    let a = DMatrix::from_row_iterator(
        d,
        n,
        (0..d * n)
            .map(|_| uniform(&mut rng, 1.0, 50.0))
            .collect::<Vec<_>>(),
    );
    let b = (0..d).map(|i| (0.1 * a.row(i).sum()).ceil()).collect();
    MqkpData { q, c, a, b }
}

/// Minimization form over `(x, s)`: `min -(x^T Q x + c^T x)` with `b - A x - s = 0`, binary `x`.
pub fn gen_mqkp(n: usize, d: usize, seed: u64) -> Result<PolynomialProgram> {
    if n == 0 || d == 0 {
        return Err(Error::Parameter("MQKP needs n >= 1 and d >= 1".into()));
    }
    let data = mqkp_data(n, d, seed);
    let mut pop = PolynomialProgram::new(
        quadratic_form(&data.q, Some(&data.c)).scale(-1.0),
        Domain::Nonnegative,
    );
    for i in 0..n {
        pop = pop.with_equality(binary_equality(n, i));
    }
    for k in 0..d {
        let mut h = Polynomial::constant(n, data.b[k]);
        for j in 0..n {
            h = h.sub(&Polynomial::var(n, j).scale(data.a[(k, j)]));
        }
        pop = pop.with_inequality(h);
    }
    reformulate_slack(&pop)
}

/// Exponents of degree `<= d` in `n` variables, by degree then descending lex.
fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    crate::monomial::exponents_up_to(n, d)
        .into_iter()
        .map(|e| e.0)
        .collect()
}

/// Ball-constrained quartic in `n - 1` variables, rewritten on the sphere with one squared slack.
pub fn gen_bqm(n: usize, seed: u64) -> Result<PolynomialProgram> {
    if n < 2 {
        return Err(Error::Parameter("BQM needs n >= 2".into()));
    }
    let m = n - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Polynomial::zero(m);
    for e in monomials_up_to(m, 4) {
        f.add_term(e, standard_normal(&mut rng));
    }
    let mut ball = Polynomial::constant(m, 1.0);
    for i in 0..m {
        ball = ball.sub(&Polynomial::var(m, i).pow(2));
    }
    reformulate_squared_slack(&PolynomialProgram::new(f, Domain::Free).with_inequality(ball))
}

/// Sample data behind the kurtosis portfolio model.
#[derive(Clone, Debug)]
pub struct KmpData {
    /// One row per sample.
    pub samples: DMatrix<f64>,
    pub mean: Vec<f64>,
    /// Empirical covariance with the `1/p` normalization.
    pub cov: DMatrix<f64>,
    pub mu0: f64,
    pub sigma0_sq: f64,
}

pub const KMP_SAMPLES: usize = 255;

pub fn kmp_data(n: usize, seed: u64) -> KmpData {
    let p = KMP_SAMPLES;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = DMatrix::from_row_iterator(
        p,
        n,
        (0..p * n)
            .map(|_| uniform(&mut rng, 0.0, 10.0))
            .collect::<Vec<_>>(),
    );
    let mean: Vec<f64> = (0..n).map(|j| samples.column(j).sum() / p as f64).collect();
    let mut centered = samples.clone();
    for j in 0..n {
        centered.column_mut(j).add_scalar_mut(-mean[j]);
    }
    let cov = centered.transpose() * &centered / p as f64;
    let w = 1.0 / n as f64;
    let mu0 = mean.iter().sum::<f64>() * w;
    let sigma0_sq = cov.sum() * w * w;
    KmpData {
        samples,
        mean,
        cov,
        mu0,
        sigma0_sq,
    }
}

/// `min (1/p) sum_k ((xi_k - mu)^T x)^4` with return, risk and budget equalities, `x >= 0`.
pub fn gen_kmp(n: usize, seed: u64) -> Result<PolynomialProgram> {
    if n == 0 {
        return Err(Error::Parameter("KMP needs n >= 1".into()));
    }
    let data = kmp_data(n, seed);
    let p = data.samples.nrows();
    let mut f = Polynomial::zero(n);
    for k in 0..p {
        let mut lin = Polynomial::zero(n);
        for j in 0..n {
            lin = lin.add(&Polynomial::var(n, j).scale(data.samples[(k, j)] - data.mean[j]));
        }
        f = f.add(&lin.pow(4));
    }
    let f = f.scale(1.0 / p as f64);
    let mut ret = Polynomial::constant(n, -data.mu0);
    for j in 0..n {
        ret = ret.add(&Polynomial::var(n, j).scale(data.mean[j]));
    }
    let risk = quadratic_form(&data.cov, None).sub(&Polynomial::constant(n, data.sigma0_sq));
    Ok(PolynomialProgram::new(f, Domain::Nonnegative)
        .with_equality(ret)
        .with_equality(risk)
        .with_equality(simplex_equality(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_formula() {
        assert!((relative_gap(0.0, -0.00562) - 0.562).abs() < 1e-12);
        assert_eq!(relative_gap(3.0, 3.0), 0.0);
        assert!((relative_gap(0.5, 0.4) - 10.0).abs() < 1e-12);
        assert!((relative_gap(-4.0, -5.0) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn stqp_reproducible_and_symmetric() {
        let a = gen_stqp_gaussian(5, 1).unwrap();
        let b = gen_stqp_gaussian(5, 1).unwrap();
        assert_eq!(a.objective, b.objective);
        assert_ne!(a.objective, gen_stqp_gaussian(5, 2).unwrap().objective);
        // objective at e_1 is Q_11
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q11 = standard_normal(&mut rng);
        let mut e1 = vec![0.0; 5];
        e1[0] = 1.0;
        assert!((a.objective.evaluate(&e1) - q11).abs() < 1e-15);
    }

    #[test]
    fn horn_pattern() {
        let q = horn_extended(5).unwrap();
        let expect = [
            [1., -1., 1., 1., -1.],
            [-1., 1., -1., 1., 1.],
            [1., -1., 1., -1., 1.],
            [1., 1., -1., 1., -1.],
            [-1., 1., 1., -1., 1.],
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(q[(i, j)], expect[i][j]);
            }
        }
        assert!(horn_extended(6).is_err());
        assert!(horn_extended(3).is_err());
        let q21 = horn_extended(21).unwrap();
        assert_eq!(q21, q21.transpose());
        assert!(q21.iter().all(|&v| v == 1.0 || v == -1.0));
        // value 0 at the midpoint of two cyclically adjacent vertices
        let pop = stqp_program(&q21);
        for (i, j) in [(0, 1), (5, 6), (0, 20)] {
            let mut x = vec![0.0; 21];
            x[i] = 0.5;
            x[j] = 0.5;
            assert!(pop.objective.evaluate(&x).abs() < 1e-15);
        }
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let l = er_laplacian(12, 0.5, 3);
        for i in 0..12 {
            assert_eq!(l.row(i).sum(), 0.0);
        }
        assert!(gen_mbp(7, 0.5, 0).is_err());
    }

    #[test]
    fn mqkp_structure() {
        let d = mqkp_data(10, 3, 5);
        for j in 0..10 {
            assert_eq!(d.q[(j, j)], 0.0);
        }
        assert!(d.b.iter().all(|&b| b >= 1.0));
        assert!(d.a.iter().all(|&a| (1.0..=50.0).contains(&a)));
        let pop = gen_mqkp(10, 3, 5).unwrap();
        assert_eq!(pop.n, 13);
        assert_eq!(pop.equalities.len(), 13);
        assert!(pop.inequalities.is_empty());
    }

    #[test]
    fn bqm_shape() {
        let pop = gen_bqm(4, 9).unwrap();
        assert_eq!(pop.n, 4);
        assert_eq!(pop.objective.degree(), 4);
        assert_eq!(pop.equalities.len(), 1);
        // the slack does not enter the objective
        assert!(pop.objective.terms().all(|(e, _)| e[3] == 0));
        assert_eq!(gen_bqm(4, 9).unwrap().objective, pop.objective);
    }

    #[test]
    fn kmp_targets() {
        let n = 4;
        let d = kmp_data(n, 2);
        let pop = gen_kmp(n, 2).unwrap();
        let x = vec![1.0 / n as f64; n];
        assert!(pop.is_feasible(&x, 1e-9));
        assert!(pop.objective.evaluate(&x) >= 0.0);
        let mu0: f64 = d.mean.iter().sum::<f64>() / n as f64;
        assert!((d.mu0 - mu0).abs() < 1e-12);
        // quartic matches the direct sample average
        let y = [0.1, 0.2, 0.3, 0.4];
        let direct: f64 = (0..KMP_SAMPLES)
            .map(|k| {
                (0..n)
                    .map(|j| (d.samples[(k, j)] - d.mean[j]) * y[j])
                    .sum::<f64>()
                    .powi(4)
            })
            .sum::<f64>()
            / KMP_SAMPLES as f64;
        assert!((pop.objective.evaluate(&y) - direct).abs() < 1e-9 * direct.max(1.0));
    }

    #[test]
    fn spec_roundtrip() {
        let s = InstanceSpec::new(
            Family::Cst {
                n: 4,
                t: 2,
                kind: CstKind::Copositive,
            },
            7,
        );
        let j = serde_json::to_string(&s).unwrap();
        let back: InstanceSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.tag(), "cst");
    }
}
