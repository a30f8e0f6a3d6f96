//! Reference solvers used only by the tests. None of them share code paths with the library
//! beyond reading problem data: affine sets are rebuilt from basis exponents and handled with
//! SVD-based pseudo-inverses, cones with plain eigendecompositions.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rpop::monomial::MonomialBasis;
use rpop::relax::RelaxationProblem;

/// Column-major index of `(i, j)` in an `n x n` matrix.
pub fn pos(n: usize, i: usize, j: usize) -> usize {
    j * n + i
}

/// Positions of the Gram matrix grouped by the sum of their row and column exponents.
pub fn exponent_groups(basis: &MonomialBasis) -> Vec<Vec<usize>> {
    let n = basis.len();
    let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let key: Vec<u32> = basis
                .exponent(i)
                .0
                .iter()
                .zip(&basis.exponent(j).0)
                .map(|(a, b)| a + b)
                .collect();
            groups.entry(key).or_default().push(pos(n, i, j));
        }
    }
    groups.into_values().collect()
}

/// Rows `x_{p0} - x_{pk} = 0` tying every position of a group to its first one.
pub fn consistency_rows(basis: &MonomialBasis) -> Vec<DVector<f64>> {
    let n = basis.len();
    let mut rows = Vec::new();
    for g in exponent_groups(basis) {
        for &p in &g[1..] {
            let mut r = DVector::zeros(n * n);
            r[g[0]] = 1.0;
            r[p] = -1.0;
            rows.push(r);
        }
    }
    rows
}

/// Orthonormal basis of the null space of `e` and the minimum-norm solution of `e x = d`.
pub struct AffineSet {
    pub x0: DVector<f64>,
    pub z: DMatrix<f64>,
}

impl AffineSet {
    pub fn new(e: &DMatrix<f64>, d: &DVector<f64>) -> Self {
        let m = e.ncols();
        if e.nrows() == 0 {
            return AffineSet {
                x0: DVector::zeros(m),
                z: DMatrix::identity(m, m),
            };
        }
        // null space from the eigenvectors of E^T E with zero eigenvalue
        let ete = e.transpose() * e;
        let eig = ete.symmetric_eigen();
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let null: Vec<usize> = (0..m)
            .filter(|&k| eig.eigenvalues[k] <= 1e-10 * top.max(1.0))
            .collect();
        let z = DMatrix::from_fn(m, null.len(), |i, k| eig.eigenvectors[(i, null[k])]);
        let pinv = e.clone().pseudo_inverse(1e-10).expect("pseudo-inverse");
        let x0 = pinv * d;
        AffineSet { x0, z }
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        let t = self.z.transpose() * (v - &self.x0);
        &self.x0 + &self.z * t
    }
}

fn stack(rows: &[DVector<f64>], m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m, |r, c| rows[r][c])
}

pub fn psd_part(x: &DMatrix<f64>) -> DMatrix<f64> {
    let s = (x + x.transpose()) * 0.5;
    let e = s.symmetric_eigen();
    let lam = e.eigenvalues.map(|v| v.max(0.0));
    &e.eigenvectors * DMatrix::from_diagonal(&lam) * e.eigenvectors.transpose()
}

/// Primal-dual interior-point solve of `min 1/2 |x - g|^2 s.t. E x = d (, x >= 0)`; `E` must have full row rank.
pub fn qp_project(
    g: &DVector<f64>,
    e: &DMatrix<f64>,
    d: &DVector<f64>,
    nonneg: bool,
) -> DVector<f64> {
    if !nonneg {
        return AffineSet::new(e, d).project(g);
    }
    let n = g.len();
    let m = e.nrows();
    let mut x = DVector::from_element(n, 1.0);
    let mut s = DVector::from_element(n, 1.0);
    let mut lam = DVector::zeros(m);
    for _ in 0..200 {
        let mu = x.dot(&s) / n as f64;
        let rd = &x - g - e.transpose() * &lam - &s;
        let rp = e * &x - d;
        if mu < 1e-15 && rd.amax() < 1e-13 && rp.amax() < 1e-13 {
            break;
        }
        let sigma = 0.1;
        let rc = x.component_mul(&s).add_scalar(-sigma * mu);
        let h = DVector::from_fn(n, |i, _| 1.0 + s[i] / x[i]);
        let r1 = -&rd - rc.component_div(&x);
        let hinv_r1 = r1.component_div(&h);
        let mut k = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                k[(a, b)] = (0..n).map(|i| e[(a, i)] * e[(b, i)] / h[i]).sum();
            }
        }
        let rhs = -&rp - e * &hinv_r1;
        let dlam = k.lu().solve(&rhs).expect("normal equations");
        let dx = (&r1 + e.transpose() * &dlam).component_div(&h);
        let ds = (-&rc - s.component_mul(&dx)).component_div(&x);
        let mut alpha: f64 = 1.0;
        for i in 0..n {
            if dx[i] < 0.0 {
                alpha = alpha.min(-0.99 * x[i] / dx[i]);
            }
            if ds[i] < 0.0 {
                alpha = alpha.min(-0.99 * s[i] / ds[i]);
            }
        }
        x += &dx * alpha;
        s += &ds * alpha;
        lam += &dlam * alpha;
    }
    x
}

/// Projection onto the consistent (and nonnegative) symmetric matrices with the normalization
/// entry fixed to 1, via the interior-point QP above.
pub fn project_polyhedral_oracle(
    g: &DMatrix<f64>,
    basis: &MonomialBasis,
    nonneg: bool,
    normalize: bool,
) -> DMatrix<f64> {
    let n = basis.len();
    let mut rows = consistency_rows(basis);
    let mut rhs = vec![0.0; rows.len()];
    if normalize {
        let e = basis.e1_index();
        let mut r = DVector::zeros(n * n);
        r[pos(n, e, e)] = 1.0;
        rows.push(r);
        rhs.push(1.0);
    }
    let e = stack(&rows, n * n);
    let x = qp_project(
        &DVector::from_column_slice(g.as_slice()),
        &e,
        &DVector::from_vec(rhs),
        nonneg,
    );
    DMatrix::from_column_slice(n, n, x.as_slice())
}

/// Projection onto `{X psd : A X = 0}` by Dykstra's alternating projections.
pub fn dykstra_face_psd(g: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let p = if a.nrows() == 0 {
        DMatrix::identity(n, n)
    } else {
        DMatrix::identity(n, n) - a.clone().pseudo_inverse(1e-12).unwrap() * a
    };
    let mut x = g.clone();
    let mut p1 = DMatrix::zeros(n, n);
    let mut p2 = DMatrix::zeros(n, n);
    for _ in 0..200_000 {
        let y = {
            let v = &x + &p1;
            let y = &p * &v * &p;
            p1 = v - &y;
            y
        };
        let v = &y + &p2;
        let xn = psd_part(&v);
        p2 = v - &xn;
        let change = (&xn - &x).norm();
        x = xn;
        if change < 1e-15 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

/// Reference solution of a small polyhedral-SDP relaxation by two-block ADMM on
/// `min <C, X> s.t. X in affine set, X = Z1 psd, X = Z2 >= 0`.
pub struct AdmmResult {
    pub value: f64,
    pub x: DMatrix<f64>,
    pub residual: f64,
    pub iterations: usize,
}

pub fn admm_sdp(problem: &RelaxationProblem, max_iter: usize, tol: f64) -> AdmmResult {
    let basis = &problem.basis;
    let n = basis.len();
    let mut rows = consistency_rows(basis);
    let mut rhs = vec![0.0; rows.len()];
    let e1 = basis.e1_index();
    if problem.normalize {
        let mut r = DVector::zeros(n * n);
        r[pos(n, e1, e1)] = 1.0;
        rows.push(r);
        rhs.push(1.0);
    }
    for k in 0..problem.a.nrows() {
        for j in 0..n {
            let mut r = DVector::zeros(n * n);
            for i in 0..n {
                r[pos(n, i, j)] = problem.a[(k, i)];
            }
            rows.push(r);
            rhs.push(0.0);
        }
    }
    for (q, &b) in problem.qeq.iter().zip(&problem.b) {
        let qd = q.to_dense();
        rows.push(DVector::from_column_slice(qd.as_slice()));
        rhs.push(b);
    }
    let aff = AffineSet::new(&stack(&rows, n * n), &DVector::from_vec(rhs));
    let c = DVector::from_column_slice(problem.q0.to_dense().as_slice());

    let mut rho = 1.0;
    let mut z1 = DVector::zeros(n * n);
    let mut z2 = DVector::zeros(n * n);
    let mut u1 = DVector::zeros(n * n);
    let mut u2 = DVector::zeros(n * n);
    let mut x: DVector<f64>;
    let mut residual = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let v = ((&z1 - &u1) + (&z2 - &u2)) * 0.5 - &c / (2.0 * rho);
        x = aff.project(&v);
        let z1_old = z1.clone();
        let z2_old = z2.clone();
        let m1 = DMatrix::from_column_slice(n, n, (&x + &u1).as_slice());
        z1 = DVector::from_column_slice(psd_part(&m1).as_slice());
        z2 = &x + &u2;
        if problem.nonneg {
            z2.apply(|v| *v = v.max(0.0));
        }
        u1 += &x - &z1;
        u2 += &x - &z2;
        let r = (&x - &z1).norm().max((&x - &z2).norm());
        let s = rho * ((&z1 - z1_old).norm() + (&z2 - z2_old).norm());
        residual = r.max(s) / (1.0 + x.norm());
        if residual < tol {
            break;
        }
        if it % 50 == 0 {
            if r > 10.0 * s {
                rho *= 2.0;
                u1 /= 2.0;
                u2 /= 2.0;
            } else if s > 10.0 * r {
                rho /= 2.0;
                u1 *= 2.0;
                u2 *= 2.0;
            }
        }
    }
    let xm = DMatrix::from_column_slice(n, n, z1.as_slice());
    AdmmResult {
        value: c.dot(&z1),
        x: xm,
        residual,
        iterations: it,
    }
}

/// Eigenvalues above `rel * λ_max`.
pub fn rank(x: &DMatrix<f64>, rel: f64) -> usize {
    let e = x.clone().symmetric_eigen();
    let top = e.eigenvalues.iter().copied().fold(0.0, f64::max);
    e.eigenvalues.iter().filter(|&&v| v > rel * top).count()
}

/// `min w1^2 + 4 w1 - w3^2` on `w >= 0` with `(w2 + w3 - 1)^2 = 0` and
/// `4 - 4 w1 - 3 w2 + w1^2 + 2 w1 w2 = 0`; optimum 5 at `w = (1, 1, 0)`.
pub fn worked_program() -> rpop::relax::PolynomialProgram {
    use rpop::monomial::Polynomial;
    use rpop::relax::{Domain, PolynomialProgram};
    let p = |t: Vec<(Vec<u32>, f64)>| Polynomial::from_terms(3, t).unwrap();
    let f0 = p(vec![
        (vec![2, 0, 0], 1.0),
        (vec![1, 0, 0], 4.0),
        (vec![0, 0, 2], -1.0),
    ]);
    let lin = p(vec![
        (vec![0, 1, 0], 1.0),
        (vec![0, 0, 1], 1.0),
        (vec![0, 0, 0], -1.0),
    ]);
    let f2 = p(vec![
        (vec![0, 0, 0], 4.0),
        (vec![1, 0, 0], -4.0),
        (vec![0, 1, 0], -3.0),
        (vec![2, 0, 0], 1.0),
        (vec![1, 1, 0], 2.0),
    ]);
    PolynomialProgram::new(f0, Domain::Nonnegative)
        .with_equality(lin.pow(2))
        .with_equality(f2)
}

/// Optimal value of the worked program and of its first-order relaxation; frozen from the ADMM
/// reference above and an external interior-point solve (4.9999977 before its facial
/// degeneracy stalled it).
pub const WORKED_VALUE: f64 = 5.0;

fn random_sym(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = rpop::rng::standard_normal_matrix(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// Largest entrywise gap between the library's block-mean projection and the QP oracle over
/// `cases` random symmetric matrices on the `n = 2, tau = 2` basis (6 x 6).
pub fn composite_projection_error(cases: usize, seed: u64) -> f64 {
    use rand::SeedableRng;
    let basis = rpop::monomial::enumerate_basis(2, 2).unwrap();
    let blocks = rpop::relax::ConsistencyBlocks::new(&basis).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for k in 0..cases {
        let g = random_sym(&mut rng, basis.len()) * 2.0;
        let (nonneg, normalize) = (k % 4 != 3, k % 2 == 0);
        let ours = rpop::projection::project_consistency_nonneg(&g, &blocks, nonneg, normalize);
        let oracle = project_polyhedral_oracle(&g, &basis, nonneg, normalize);
        worst = worst.max((ours - oracle).amax());
    }
    worst
}

/// Largest entrywise gap between `Π_psd(J G J)` and Dykstra's projection onto the face over
/// `cases` random 4 x 4 matrices with one or two random facial rows.
pub fn face_projection_error(cases: usize, seed: u64) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for k in 0..cases {
        let g = random_sym(&mut rng, 4);
        let a = rpop::rng::standard_normal_matrix(&mut rng, 1 + k % 2, 4);
        let fp = rpop::projection::FaceProjector::new(&a).unwrap();
        let ours = rpop::projection::project_face_psd(&g, &fp).unwrap();
        let oracle = dykstra_face_psd(&g, &a);
        worst = worst.max((ours - oracle).amax());
    }
    worst
}

/// One relaxation solve compared against the brute-force oracle.
pub struct EquivalenceCase {
    pub label: String,
    pub vstar: f64,
    pub value: f64,
    pub rank: usize,
    pub converged: bool,
}

impl EquivalenceCase {
    pub fn rel_diff(&self) -> f64 {
        (self.value - self.vstar).abs() / self.vstar.abs().max(1.0)
    }

    /// A numerically rank-one solution certifies that the relaxation is tight.
    pub fn tight(&self) -> bool {
        self.converged && self.rank == 1
    }

    /// The relaxation is a lower bound; tight cases must also match the oracle.
    pub fn ok(&self, tol: f64) -> bool {
        let bound = self.value <= self.vstar + tol * self.vstar.abs().max(1.0);
        bound && (!self.tight() || self.rel_diff() <= tol)
    }
}

pub fn equivalence_case(
    label: String,
    pop: &rpop::relax::PolynomialProgram,
    tau: u32,
) -> EquivalenceCase {
    use rpop::instances::{oracle_solve, DEFAULT_BUDGET};
    let oracle = oracle_solve(pop, DEFAULT_BUDGET).expect("oracle");
    assert!(oracle.exact, "{label}: oracle is not exact");
    let p = rpop::relax::build_polyhedral_sdp(pop, tau, true).unwrap();
    let res = rpop::solver::solve(&p, &rpop::solver::SolverConfig::default()).unwrap();
    EquivalenceCase {
        label,
        vstar: oracle.vstar,
        value: res.report.objective,
        rank: res.report.rank,
        converged: res.report.reason == rpop::solver::TerminationReason::Converged,
    }
}

/// Seeded StQP (first order) and BIQ (second order) cases.
pub fn oracle_equivalence(
    stqp: usize,
    stqp_n: usize,
    biq: usize,
    biq_n: usize,
) -> Vec<EquivalenceCase> {
    use rpop::instances::{gen_biq, gen_stqp_gaussian};
    let mut out = Vec::new();
    for seed in 0..stqp as u64 {
        let pop = gen_stqp_gaussian(stqp_n, seed).unwrap();
        out.push(equivalence_case(
            format!("stqp n={stqp_n} seed={seed}"),
            &pop,
            1,
        ));
    }
    for seed in 0..biq as u64 {
        let pop = gen_biq(biq_n, seed).unwrap();
        out.push(equivalence_case(
            format!("biq n={biq_n} seed={seed}"),
            &pop,
            2,
        ));
    }
    out
}

/// The Gaussian StQP matrix for `(n, seed)`, redrawn here from the documented sampling order.
pub fn stqp_matrix(n: usize, seed: u64) -> DMatrix<f64> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rpop::rng::standard_normal(&mut rng);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    q
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Every local minimizer of `x^T Q x` on the simplex with support of size at most `max_support`,
/// found from the stationarity system on each support. Returns `(value, x)` sorted by value.
pub fn stqp_small_support_minimizers(
    q: &DMatrix<f64>,
    max_support: usize,
) -> Vec<(f64, DVector<f64>)> {
    let n = q.nrows();
    let mut out = Vec::new();
    for k in 1..=max_support {
        for_each_subset(n, k, &mut |s| {
            let qs = DMatrix::from_fn(k, k, |a, b| q[(s[a], s[b])]);
            let Some(z) = qs.clone().lu().solve(&DVector::from_element(k, 1.0)) else {
                return;
            };
            let total = z.sum();
            if total.abs() < 1e-12 {
                return;
            }
            let xs = z / total;
            if xs.iter().any(|&v| v <= 1e-12) {
                return;
            }
            let mut x = DVector::zeros(n);
            for (a, &i) in s.iter().enumerate() {
                x[i] = xs[a];
            }
            let qx = q * &x;
            let v = x.dot(&qx);
            // first-order conditions off the support: 2 (Qx)_i >= 2 v
            if (0..n).all(|i| qx[i] >= v - 1e-10) {
                out.push((v, x));
            }
        });
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Reference rank of the first-order relaxation solution of a Gaussian StQP: the number of
/// distinct best small-support minimizers, valid when the relaxation value certifies them.
pub struct RankCase {
    pub seed: u64,
    pub value: f64,
    pub best: f64,
    pub rank: usize,
    pub reference: Option<usize>,
}

pub fn rank_case(n: usize, seed: u64) -> RankCase {
    use rpop::instances::gen_stqp_gaussian;
    let pop = gen_stqp_gaussian(n, seed).unwrap();
    let p = rpop::relax::build_polyhedral_sdp(&pop, 1, true).unwrap();
    let res = rpop::solver::solve(&p, &rpop::solver::SolverConfig::default()).unwrap();
    let mins = stqp_small_support_minimizers(&stqp_matrix(n, seed), 4);
    let best = mins.first().map(|m| m.0).unwrap_or(f64::INFINITY);
    let value = res.report.objective;
    // at the default tolerance the objective can sit ~1e-4 relative away from the true value
    let certified = (value - best).abs() <= 1e-3 * best.abs().max(1.0);
    let ties = mins
        .iter()
        .filter(|m| m.0 <= best + 1e-8 * best.abs().max(1.0))
        .count();
    RankCase {
        seed,
        value,
        best,
        rank: res.report.rank,
        reference: certified.then_some(ties),
    }
}

fn random_poly(n: usize, d: u32, rng: &mut rand_chacha::ChaCha8Rng) -> rpop::monomial::Polynomial {
    let mut p = rpop::monomial::Polynomial::zero(n);
    for e in rpop::monomial::exponents_up_to(n, d) {
        p.add_term(e.0, rpop::rng::standard_normal(rng));
    }
    p
}

/// Largest `|fd - <grad, D>| / max(1, |<grad, D>|)` over random symmetric directions with
/// central differences of step `1e-5`.
pub fn fd_error(
    f: impl Fn(&DMatrix<f64>) -> (f64, DMatrix<f64>),
    x: &DMatrix<f64>,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> f64 {
    let h = 1e-5;
    let (_, g) = f(x);
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let d = random_sym(rng, x.nrows());
        let fd = (f(&(x + &d * h)).0 - f(&(x - &d * h)).0) / (2.0 * h);
        let an = g.dot(&d);
        worst = worst.max((fd - an).abs() / an.abs().max(1.0));
    }
    worst
}

/// Gradient check of `phi` on random quartic programs with a linear and a cubic equality, and
/// of its moment extension on a ball-constrained quartic.
pub fn gradient_errors(seed: u64) -> (f64, f64) {
    use rand::SeedableRng;
    use rpop::monomial::Polynomial;
    use rpop::relax::{build_moment_sos, build_polyhedral_sdp, Domain, PolynomialProgram};
    use rpop::solver::{eval_phi, eval_phi_moment};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = 2;
    let lin = Polynomial::var(n, 0)
        .add(&Polynomial::var(n, 1))
        .sub(&Polynomial::constant(n, 1.0));
    let pop = PolynomialProgram::new(random_poly(n, 4, &mut rng), Domain::Nonnegative)
        .with_equality(lin)
        .with_equality(random_poly(n, 3, &mut rng));
    let mut plain: f64 = 0.0;
    for rlt in [true, false] {
        let p = build_polyhedral_sdp(&pop, 2, rlt).unwrap();
        let x = random_sym(&mut rng, p.dim());
        let y = DVector::from_fn(p.qeq.len(), |_, _| rpop::rng::standard_normal(&mut rng));
        let w = random_sym(&mut rng, p.dim());
        plain = plain.max(fd_error(
            |x| eval_phi(x, &p, &y, &w, 2.5).unwrap(),
            &x,
            &mut rng,
        ));
    }

    let m = 3;
    let mut ball = Polynomial::constant(m, 1.0);
    for i in 0..m {
        ball = ball.sub(&Polynomial::var(m, i).pow(2));
    }
    let pop =
        PolynomialProgram::new(random_poly(m, 4, &mut rng), Domain::Free).with_inequality(ball);
    let p = build_moment_sos(&pop, 2, false).unwrap();
    let x = random_sym(&mut rng, p.relax.dim());
    let y = DVector::from_fn(p.relax.qeq.len(), |_, _| {
        rpop::rng::standard_normal(&mut rng)
    });
    let w = random_sym(&mut rng, p.relax.dim());
    let wl: Vec<_> = p
        .localizers
        .iter()
        .map(|l| random_sym(&mut rng, l.out_dim()))
        .collect();
    let moment = fd_error(
        |x| eval_phi_moment(x, &p, &y, &w, &wl, 1.5).unwrap(),
        &x,
        &mut rng,
    );
    (plain, moment)
}

/// Worst-case trace diagnostics over a set of traced solves.
#[derive(Debug, Default)]
pub struct TraceSummary {
    pub runs: usize,
    pub max_ar: f64,
    pub lowrank_violations: usize,
    pub lift_violations: usize,
    pub max_dual_identity: f64,
}

impl TraceSummary {
    pub fn absorb(&mut self, t: &rpop::solver::Trace) {
        self.runs += 1;
        self.max_ar = self.max_ar.max(t.max_ar);
        self.lowrank_violations += t.lowrank_violations;
        self.lift_violations += t.lift_violations;
        self.max_dual_identity = t
            .dual_identity
            .iter()
            .copied()
            .fold(self.max_dual_identity, f64::max);
    }
}

/// Traced solves of seeded StQP, BIQ and ball-quartic moment relaxations.
pub fn traced_runs(seeds: std::ops::Range<u64>) -> TraceSummary {
    use rpop::instances::{gen_biq, gen_stqp_gaussian};
    use rpop::relax::{build_moment_sos, build_polyhedral_sdp};
    use rpop::solver::{solve, solve_moment, SolverConfig};
    let mut out = TraceSummary::default();
    for seed in seeds {
        let cfg = SolverConfig {
            seed,
            trace: true,
            time_limit: 30.0,
            ..SolverConfig::default()
        };
        let stqp = build_polyhedral_sdp(&gen_stqp_gaussian(6, seed).unwrap(), 1, true).unwrap();
        out.absorb(solve(&stqp, &cfg).unwrap().trace.as_ref().unwrap());
        let biq = build_polyhedral_sdp(&gen_biq(4, seed).unwrap(), 2, true).unwrap();
        out.absorb(solve(&biq, &cfg).unwrap().trace.as_ref().unwrap());
        let ball = build_moment_sos(&ball_quartic(2, seed), 2, false).unwrap();
        out.absorb(solve_moment(&ball, &cfg).unwrap().trace.as_ref().unwrap());
    }
    out
}

/// Random quartic on the unit ball `1 - |w|^2 >= 0`.
pub fn ball_quartic(n: usize, seed: u64) -> rpop::relax::PolynomialProgram {
    use rand::SeedableRng;
    use rpop::monomial::Polynomial;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ball = Polynomial::constant(n, 1.0);
    for i in 0..n {
        ball = ball.sub(&Polynomial::var(n, i).pow(2));
    }
    rpop::relax::PolynomialProgram::new(random_poly(n, 4, &mut rng), rpop::relax::Domain::Free)
        .with_inequality(ball)
}
