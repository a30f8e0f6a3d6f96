//! Polynomial programs, their JSON form, and inequality elimination.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::{Polynomial, RawPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Free,
    #[serde(alias = "nonnegative-orthant")]
    Nonnegative,
}

/// `min f0(w) s.t. g_i(w) = 0, h_j(w) >= 0, w in domain`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialProgram {
    pub n: usize,
    pub domain: Domain,
    pub objective: Polynomial,
    pub equalities: Vec<Polynomial>,
    pub inequalities: Vec<Polynomial>,
}

impl PolynomialProgram {
    pub fn new(objective: Polynomial, domain: Domain) -> Self {
        PolynomialProgram {
            n: objective.nvars(),
            domain,
            objective,
            equalities: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    pub fn with_equality(mut self, g: Polynomial) -> Self {
        self.equalities.push(g);
        self
    }

    pub fn with_inequality(mut self, h: Polynomial) -> Self {
        self.inequalities.push(h);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = std::iter::once(&self.objective)
            .chain(&self.equalities)
            .chain(&self.inequalities);
        for (k, p) in all.enumerate() {
            if p.nvars() != self.n {
                return Err(Error::Dimension(format!(
                    "polynomial {k} has {} variables, program has {}",
                    p.nvars(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Largest degree among objective and constraints.
    pub fn max_degree(&self) -> u32 {
        std::iter::once(&self.objective)
            .chain(&self.equalities)
            .chain(&self.inequalities)
            .map(Polynomial::degree)
            .max()
            .unwrap_or(0)
    }

    /// Smallest relaxation order able to represent every polynomial.
    pub fn min_order(&self) -> u32 {
        self.max_degree().div_ceil(2).max(1)
    }

    /// True if `w` satisfies all constraints to within `tol`.
    pub fn is_feasible(&self, w: &[f64], tol: f64) -> bool {
        if self.domain == Domain::Nonnegative && w.iter().any(|&v| v < -tol) {
            return false;
        }
        self.equalities.iter().all(|g| g.evaluate(w).abs() <= tol)
            && self.inequalities.iter().all(|h| h.evaluate(w) >= -tol)
    }

    pub fn to_instance(&self, tau: Option<u32>) -> InstanceFile {
        InstanceFile {
            n: self.n,
            tau,
            domain: self.domain,
            objective: raw(&self.objective),
            equalities: self.equalities.iter().map(raw).collect(),
            inequalities: self.inequalities.iter().map(raw).collect(),
        }
    }
}

fn raw(p: &Polynomial) -> RawPolynomial {
    RawPolynomial(p.terms().map(|(e, c)| (e.to_vec(), c)).collect())
}

/// On-disk instance format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<u32>,
    pub domain: Domain,
    pub objective: RawPolynomial,
    #[serde(default)]
    pub equalities: Vec<RawPolynomial>,
    #[serde(default)]
    pub inequalities: Vec<RawPolynomial>,
}

impl InstanceFile {
    pub fn into_program(self) -> Result<PolynomialProgram> {
        let n = self.n;
        let objective = self.objective.into_polynomial(n, "objective")?;
        let equalities = self
            .equalities
            .into_iter()
            .enumerate()
            .map(|(k, p)| p.into_polynomial(n, &format!("equalities[{k}]")))
            .collect::<Result<_>>()?;
        let inequalities = self
            .inequalities
            .into_iter()
            .enumerate()
            .map(|(k, p)| p.into_polynomial(n, &format!("inequalities[{k}]")))
            .collect::<Result<_>>()?;
        Ok(PolynomialProgram {
            n,
            domain: self.domain,
            objective,
            equalities,
            inequalities,
        })
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("{source}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Replace each `h_j(w) >= 0` by `h_j(w) - u_j = 0` with a new nonnegative variable `u_j`.
pub fn reformulate_slack(pop: &PolynomialProgram) -> Result<PolynomialProgram> {
    if pop.inequalities.is_empty() {
        return Ok(pop.clone());
    }
    if pop.domain != Domain::Nonnegative {
        return Err(Error::Precondition(
            "standard slack reformulation needs a nonnegative domain".into(),
        ));
    }
    let k = pop.inequalities.len();
    let n = pop.n + k;
    let mut equalities: Vec<Polynomial> = pop.equalities.iter().map(|g| g.extend_vars(k)).collect();
    for (j, h) in pop.inequalities.iter().enumerate() {
        equalities.push(h.extend_vars(k).sub(&Polynomial::var(n, pop.n + j)));
    }
    Ok(PolynomialProgram {
        n,
        domain: Domain::Nonnegative,
        objective: pop.objective.extend_vars(k),
        equalities,
        inequalities: Vec::new(),
    })
}

/// Replace each `h_j(w) >= 0` by `h_j(w) - v_j^2 = 0` with a new free variable `v_j`.
pub fn reformulate_squared_slack(pop: &PolynomialProgram) -> Result<PolynomialProgram> {
    if pop.inequalities.is_empty() {
        return Ok(pop.clone());
    }
    if pop.domain != Domain::Free {
        return Err(Error::Precondition(
            "squared slack reformulation needs a free domain".into(),
        ));
    }
    let k = pop.inequalities.len();
    let n = pop.n + k;
    let mut equalities: Vec<Polynomial> = pop.equalities.iter().map(|g| g.extend_vars(k)).collect();
    for (j, h) in pop.inequalities.iter().enumerate() {
        let mut e = vec![0; n];
        e[pop.n + j] = 2;
        equalities.push(h.extend_vars(k).sub(&Polynomial::monomial(e, 1.0)));
    }
    Ok(PolynomialProgram {
        n,
        domain: Domain::Free,
        objective: pop.objective.extend_vars(k),
        equalities,
        inequalities: Vec::new(),
    })
}

/// Eliminate inequalities with the slack form matching the domain.
pub fn eliminate_inequalities(pop: &PolynomialProgram) -> Result<PolynomialProgram> {
    match pop.domain {
        Domain::Nonnegative => reformulate_slack(pop),
        Domain::Free => reformulate_squared_slack(pop),
    }
}
