use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::monomial::Polynomial;
use crate::relax::{Domain, PolynomialProgram};
use crate::{Error, Result};

use super::simplex_equality;

/// Largest number of candidate points an oracle call may evaluate by default.
pub const DEFAULT_BUDGET: usize = 1 << 22;

const MAX_BINARY: usize = 20;
const MAX_SUPPORT: usize = 12;
const MAX_GRID_DIM: usize = 4;
const GRID_STEP: f64 = 0.05;
const FEAS_TOL: f64 = 1e-9;

/// Value returned by [`oracle_solve`].
///
/// Enumeration methods are exact (`lower == upper == vstar`); the grid search only certifies the
/// upper bound `vstar`.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub vstar: f64,
    #[serde(skip)]
    pub exact: bool,
    #[serde(skip)]
    pub lower: Option<f64>,
    #[serde(skip)]
    pub upper: f64,
    pub argmin: Vec<f64>,
    pub method: String,
}

impl OracleResult {
    fn exact(vstar: f64, argmin: Vec<f64>, method: &str) -> Self {
        OracleResult {
            vstar,
            exact: true,
            lower: Some(vstar),
            upper: vstar,
            argmin,
            method: method.into(),
        }
    }
}

/// Certify the optimal value of a desk-scale program by brute force.
///
/// Tries, in order: enumeration over binary variables (with the remaining variables solved from
/// equalities), support enumeration for standard quadratic programs, and a grid over products of
/// simplices and spheres. Fails with [`Error::OracleUnavailable`] when no method applies or the
/// applicable one would exceed `budget` evaluations.
pub fn oracle_solve(pop: &PolynomialProgram, budget: usize) -> Result<OracleResult> {
    pop.validate()?;
    if let Some(r) = binary_enumeration(pop, budget)? {
        return Ok(r);
    }
    if let Some(r) = support_enumeration(pop, budget)? {
        return Ok(r);
    }
    if let Some(r) = grid_search(pop, budget)? {
        return Ok(r);
    }
    Err(Error::OracleUnavailable(format!(
        "no brute-force method applies to this {}-variable program",
        pop.n
    )))
}

fn unit(n: usize, i: usize, k: u32) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = k;
    e
}

/// `Some(i)` when `g` is a nonzero multiple of `w_i^2 - w_i`.
fn binary_var(g: &Polynomial) -> Option<usize> {
    if g.num_terms() != 2 {
        return None;
    }
    let n = g.nvars();
    (0..n).find(|&i| {
        let a = g.coefficient(&unit(n, i, 2));
        a != 0.0 && g.coefficient(&unit(n, i, 1)) == -a
    })
}

fn violation_scale(g: &Polynomial) -> f64 {
    1.0 + g.max_abs_coefficient()
}

/// A non-binary variable recovered from `c w_v^k + rest(binaries) = 0`.
struct Solved {
    var: usize,
    power: u32,
    coef: f64,
    rest: Polynomial,
}

fn binary_enumeration(pop: &PolynomialProgram, budget: usize) -> Result<Option<OracleResult>> {
    let n = pop.n;
    let mut is_binary = vec![false; n];
    let mut used = vec![false; pop.equalities.len()];
    for (k, g) in pop.equalities.iter().enumerate() {
        if let Some(i) = binary_var(g) {
            is_binary[i] = true;
            used[k] = true;
        }
    }
    let binaries: Vec<usize> = (0..n).filter(|&i| is_binary[i]).collect();
    if binaries.is_empty() {
        return Ok(None);
    }
    let mut solved = Vec::new();
    for v in (0..n).filter(|&i| !is_binary[i]) {
        let found = pop.equalities.iter().enumerate().find_map(|(k, g)| {
            if used[k] {
                return None;
            }
            let mut hit = None;
            for (e, c) in g.terms() {
                if e[v] == 0 {
                    if e.iter().enumerate().any(|(j, &p)| p > 0 && !is_binary[j]) {
                        return None;
                    }
                } else {
                    let pure = e.iter().enumerate().all(|(j, &p)| j == v || p == 0);
                    if hit.is_some() || !pure || e[v] > 2 {
                        return None;
                    }
                    hit = Some((e[v], c));
                }
            }
            let (power, coef) = hit?;
            let rest = g.sub(&Polynomial::monomial(unit(n, v, power), coef));
            Some((
                k,
                Solved {
                    var: v,
                    power,
                    coef,
                    rest,
                },
            ))
        });
        let Some((k, s)) = found else {
            return Ok(None);
        };
        used[k] = true;
        solved.push(s);
    }
    if binaries.len() > MAX_BINARY {
        return Err(Error::OracleUnavailable(format!(
            "{} binary variables exceed the enumeration limit of {MAX_BINARY}",
            binaries.len()
        )));
    }
    // free squared variables are tried with both signs
    let signed: Vec<usize> = (0..solved.len())
        .filter(|&s| solved[s].power == 2 && pop.domain == Domain::Free)
        .collect();
    let count = (1usize << binaries.len()).saturating_mul(1usize << signed.len().min(40));
    if signed.len() > 20 || count > budget {
        return Err(Error::OracleUnavailable(format!(
            "binary enumeration needs {count} evaluations, budget {budget}"
        )));
    }
    let checks: Vec<&Polynomial> = pop
        .equalities
        .iter()
        .zip(&used)
        .filter(|(_, &u)| !u)
        .map(|(g, _)| g)
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut w = vec![0.0; n];
    for mask in 0..1usize << binaries.len() {
        for (b, &i) in binaries.iter().enumerate() {
            w[i] = ((mask >> b) & 1) as f64;
        }
        'signs: for signs in 0..1usize << signed.len() {
            for (k, s) in solved.iter().enumerate() {
                let val = -s.rest.evaluate(&w) / s.coef;
                w[s.var] = if s.power == 1 {
                    val
                } else {
                    if val < -FEAS_TOL * violation_scale(&s.rest) {
                        continue 'signs;
                    }
                    let root = val.max(0.0).sqrt();
                    match signed.iter().position(|&j| j == k) {
                        Some(bit) if (signs >> bit) & 1 == 1 => -root,
                        _ => root,
                    }
                };
            }
            if pop.domain == Domain::Nonnegative && w.iter().any(|&x| x < -FEAS_TOL) {
                continue;
            }
            if checks
                .iter()
                .any(|g| g.evaluate(&w).abs() > FEAS_TOL * violation_scale(g))
            {
                continue;
            }
            if pop
                .inequalities
                .iter()
                .any(|h| h.evaluate(&w) < -FEAS_TOL * violation_scale(h))
            {
                continue;
            }
            let f = pop.objective.evaluate(&w);
            if best.as_ref().is_none_or(|(v, _)| f < *v) {
                best = Some((f, w.clone()));
            }
        }
    }
    match best {
        Some((v, x)) => Ok(Some(OracleResult::exact(v, x, "binary-enumeration"))),
        None => Err(Error::OracleUnavailable(
            "binary enumeration found no feasible point".into(),
        )),
    }
}

/// `Q` with `f(x) = x^T Q x` when `pop` is a standard quadratic program.
fn stqp_matrix(pop: &PolynomialProgram) -> Option<DMatrix<f64>> {
    let n = pop.n;
    if pop.domain != Domain::Nonnegative
        || !pop.inequalities.is_empty()
        || pop.equalities.len() != 1
        || pop.equalities[0] != simplex_equality(n)
        || !pop.objective.is_homogeneous(2)
    {
        return None;
    }
    let mut q = DMatrix::zeros(n, n);
    for (e, c) in pop.objective.terms() {
        let idx: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        if idx.len() == 1 {
            q[(idx[0], idx[0])] = c;
        } else {
            q[(idx[0], idx[1])] = c / 2.0;
            q[(idx[1], idx[0])] = c / 2.0;
        }
    }
    Some(q)
}

fn support_enumeration(pop: &PolynomialProgram, budget: usize) -> Result<Option<OracleResult>> {
    let Some(q) = stqp_matrix(pop) else {
        return Ok(None);
    };
    let n = pop.n;
    if n > MAX_SUPPORT || (1usize << n) > budget {
        return Err(Error::OracleUnavailable(format!(
            "support enumeration over {n} variables exceeds the limit of {MAX_SUPPORT} or the budget"
        )));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1usize..1 << n {
        let s: Vec<usize> = (0..n).filter(|&i| (mask >> i) & 1 == 1).collect();
        let k = s.len();
        // stationarity of the face problem: 2 Q_SS x = lambda e, e^T x = 1
        let mut kkt = DMatrix::zeros(k + 1, k + 1);
        for (a, &i) in s.iter().enumerate() {
            for (b, &j) in s.iter().enumerate() {
                kkt[(a, b)] = 2.0 * q[(i, j)];
            }
            kkt[(a, k)] = -1.0;
            kkt[(k, a)] = 1.0;
        }
        let mut rhs = DVector::zeros(k + 1);
        rhs[k] = 1.0;
        let Some(sol) = kkt.clone().lu().solve(&rhs) else {
            continue;
        };
        if (&kkt * &sol - &rhs).norm() > 1e-9 || sol.iter().any(|v| !v.is_finite()) {
            continue;
        }
        if sol.rows(0, k).iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (a, &i) in s.iter().enumerate() {
            x[i] = sol[a].max(0.0);
        }
        let total: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= total);
        let xv = DVector::from_column_slice(&x);
        let f = xv.dot(&(&q * &xv));
        if best.as_ref().is_none_or(|(v, _)| f < *v) {
            best = Some((f, x));
        }
    }
    let (v, x) = best.expect("every vertex of the simplex is a nonsingular support");
    Ok(Some(OracleResult::exact(v, x, "support-enumeration")))
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape {
    Simplex,
    Sphere,
}

#[derive(Clone, Debug)]
struct Block {
    vars: Vec<usize>,
    shape: Shape,
}

fn block_of(g: &Polynomial) -> Option<Block> {
    let n = g.nvars();
    if g.coefficient(&vec![0; n]) != -1.0 {
        return None;
    }
    let mut vars = Vec::new();
    let mut power = None;
    for (e, c) in g.terms() {
        if e.iter().all(|&p| p == 0) {
            continue;
        }
        let nz: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        if nz.len() != 1 || c != 1.0 || e[nz[0]] > 2 || power.is_some_and(|p| p != e[nz[0]]) {
            return None;
        }
        power = Some(e[nz[0]]);
        vars.push(nz[0]);
    }
    let shape = match power? {
        1 => Shape::Simplex,
        _ => Shape::Sphere,
    };
    Some(Block { vars, shape })
}

/// Map chart coordinates to a point; `None` when the point leaves the feasible set.
fn chart(
    blocks: &[Block],
    n: usize,
    nonneg: bool,
    params: &[f64],
    signs: usize,
) -> Option<Vec<f64>> {
    let mut x = vec![0.0; n];
    let mut off = 0;
    let mut sign_bit = 0;
    for b in blocks {
        let k = b.vars.len();
        let head = &params[off..off + k - 1];
        off += k - 1;
        for (&v, &p) in b.vars.iter().zip(head) {
            x[v] = p;
        }
        let last = match b.shape {
            Shape::Simplex => {
                let r = 1.0 - head.iter().sum::<f64>();
                if r < -1e-12 || head.iter().any(|&p| p < 0.0) {
                    return None;
                }
                r.max(0.0)
            }
            Shape::Sphere => {
                let r = 1.0 - head.iter().map(|p| p * p).sum::<f64>();
                if r < -1e-12 || (nonneg && head.iter().any(|&p| p < 0.0)) {
                    return None;
                }
                let root = r.max(0.0).sqrt();
                if nonneg {
                    root
                } else {
                    let s = (signs >> sign_bit) & 1;
                    sign_bit += 1;
                    if s == 1 {
                        -root
                    } else {
                        root
                    }
                }
            }
        };
        x[b.vars[k - 1]] = last;
    }
    Some(x)
}

fn grid_search(pop: &PolynomialProgram, budget: usize) -> Result<Option<OracleResult>> {
    let n = pop.n;
    if !pop.inequalities.is_empty() || pop.equalities.is_empty() {
        return Ok(None);
    }
    let mut blocks = Vec::new();
    for g in &pop.equalities {
        match block_of(g) {
            Some(b) => blocks.push(b),
            None => return Ok(None),
        }
    }
    let nonneg = pop.domain == Domain::Nonnegative;
    let mut cover = vec![0usize; n];
    for b in &blocks {
        if b.shape == Shape::Simplex && !nonneg {
            return Ok(None);
        }
        for &v in &b.vars {
            cover[v] += 1;
        }
    }
    if cover.iter().any(|&c| c != 1) {
        return Ok(None);
    }
    let dim: usize = blocks.iter().map(|b| b.vars.len() - 1).sum();
    let sign_bits = if nonneg { 0 } else { blocks.len() };
    let ticks = (1.0 / GRID_STEP).round() as i64;
    let lo = if nonneg { 0 } else { -ticks };
    let per_axis = (ticks - lo + 1) as usize;
    let count = per_axis
        .checked_pow(dim as u32)
        .and_then(|c| c.checked_mul(1 << sign_bits));
    if dim > MAX_GRID_DIM || count.is_none_or(|c| c > budget) {
        return Err(Error::OracleUnavailable(format!(
            "grid over {dim} dimensions exceeds the limit of {MAX_GRID_DIM} or the budget"
        )));
    }

    let eval = |params: &[f64], signs: usize| -> Option<(f64, Vec<f64>)> {
        let x = chart(&blocks, n, nonneg, params, signs)?;
        Some((pop.objective.evaluate(&x), x))
    };
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut idx = vec![lo; dim];
    let mut params = vec![0.0; dim];
    loop {
        for (p, &i) in params.iter_mut().zip(&idx) {
            *p = i as f64 * GRID_STEP;
        }
        for signs in 0..1usize << sign_bits {
            if let Some((f, _)) = eval(&params, signs) {
                if best.as_ref().is_none_or(|(v, _, _)| f < *v) {
                    best = Some((f, params.clone(), signs));
                }
            }
        }
        let mut k = dim;
        let mut done = true;
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            if idx[k] <= ticks {
                done = false;
                break;
            }
            idx[k] = lo;
        }
        if done {
            break;
        }
    }
    let (mut fbest, mut pbest, signs) = best.expect("the grid contains a feasible point");

    // compass search from the best grid point; every accepted point stays feasible
    let mut step = GRID_STEP / 2.0;
    while step > 1e-10 {
        let mut improved = false;
        for k in 0..dim {
            for dir in [1.0, -1.0] {
                let mut trial = pbest.clone();
                trial[k] += dir * step;
                if let Some((f, _)) = eval(&trial, signs) {
                    if f < fbest {
                        fbest = f;
                        pbest = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let (vstar, x) = eval(&pbest, signs).expect("accepted points are feasible");
    debug_assert!(vstar <= fbest);
    Ok(Some(OracleResult {
        vstar,
        exact: false,
        lower: None,
        upper: vstar,
        argmin: x,
        method: "grid".into(),
    }))
}
