//! Modeling layer for the convex subproblems and its adapter to the Clarabel
//! interior-point conic solver.
//!
//! A [`ConvexProgram`] holds scalar variables with optional bounds, an affine
//! objective and a list of labelled constraints drawn from a fixed family
//! vocabulary ([`Constraint`]). [`solve`] lowers the program to the conic form
//! `min qᵀx  s.t.  b − Ax ∈ K`, runs the solver and re-evaluates every original
//! constraint on the returned point.
//!
//! # Debug dump format
//!
//! [`ConvexProgram::dump_conic`] writes the lowered program as plain text, one
//! record per line, whitespace separated:
//!
//! ```text
//! conic <n_vars> <n_rows>
//! var <j> <name>
//! q <j> <value>
//! offset <value>
//! cone <first_row> <kind> <dim> [<alpha>]      kind ∈ zero|nonneg|soc|exp|pow
//! A <row> <col> <value>
//! b <row> <value>
//! ```
//!
//! `soc` rows are ordered `(t, x…)` meaning `‖x‖ ≤ t`; `exp` rows `(x, y, z)`
//! mean `y·exp(x/y) ≤ z`; `pow` rows `(x, y, z)` mean `x^α·y^(1−α) ≥ |z|`.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::error::{Error, Result};
use crate::scenario::SimControls;

/// Handle to a scalar decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(pub usize);

/// `Σ coef·var + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Affine {
    pub terms: Vec<(Var, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn term(v: Var, coef: f64) -> Self {
        Self { terms: vec![(v, coef)], constant: 0.0 }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(v, c)| c * x[v.0]).sum::<f64>() + self.constant
    }

    /// Σ|coef·var| + |constant|, the scale used for relative residuals.
    fn magnitude(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(v, c)| (c * x[v.0]).abs()).sum::<f64>() + self.constant.abs()
    }
}

impl From<Var> for Affine {
    fn from(v: Var) -> Self {
        Affine::term(v, 1.0)
    }
}

impl From<f64> for Affine {
    fn from(c: f64) -> Self {
        Affine::constant(c)
    }
}

impl<T: Into<Affine>> Add<T> for Affine {
    type Output = Affine;
    fn add(mut self, rhs: T) -> Affine {
        let rhs = rhs.into();
        self.terms.extend(rhs.terms);
        self.constant += rhs.constant;
        self
    }
}

impl<T: Into<Affine>> Sub<T> for Affine {
    type Output = Affine;
    fn sub(self, rhs: T) -> Affine {
        self + (-rhs.into())
    }
}

impl Neg for Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        self * -1.0
    }
}

impl Mul<f64> for Affine {
    type Output = Affine;
    fn mul(mut self, k: f64) -> Affine {
        for t in &mut self.terms {
            t.1 *= k;
        }
        self.constant *= k;
        self
    }
}

impl Mul<f64> for Var {
    type Output = Affine;
    fn mul(self, k: f64) -> Affine {
        Affine::term(self, k)
    }
}

impl<T: Into<Affine>> Add<T> for Var {
    type Output = Affine;
    fn add(self, rhs: T) -> Affine {
        Affine::from(self) + rhs
    }
}

impl<T: Into<Affine>> Sub<T> for Var {
    type Output = Affine;
    fn sub(self, rhs: T) -> Affine {
        Affine::from(self) - rhs
    }
}

/// Constraint families understood by the backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `expr = 0`
    Eq(Affine),
    /// `expr ≤ 0`
    Le(Affine),
    /// `Σ eᵢ² ≤ rhs`
    SquaredNormLe { terms: Vec<Affine>, rhs: Affine },
    /// `‖e‖ ≤ rhs`
    NormLe { terms: Vec<Affine>, rhs: Affine },
    /// `c / x ≤ t` with `x > 0`, `c ≥ 0`.
    Reciprocal { c: f64, x: Affine, t: Affine },
    /// `|x|³ ≤ t`
    CubeLe { x: Affine, t: Affine },
    /// `t ≤ ln(1 + x)`
    LogGe { t: Affine, x: Affine },
}

impl Constraint {
    /// Relative violation of the constraint at `x` (0 when satisfied).
    pub fn residual(&self, x: &[f64]) -> f64 {
        let rel = |viol: f64, scale: f64| viol.max(0.0) / (1.0 + scale);
        match self {
            Constraint::Eq(e) => rel(e.eval(x).abs(), e.magnitude(x)),
            Constraint::Le(e) => rel(e.eval(x), e.magnitude(x)),
            Constraint::SquaredNormLe { terms, rhs } => {
                let lhs: f64 = terms.iter().map(|e| e.eval(x).powi(2)).sum();
                let r = rhs.eval(x);
                rel(lhs - r, lhs + rhs.magnitude(x))
            }
            Constraint::NormLe { terms, rhs } => {
                let lhs = terms.iter().map(|e| e.eval(x).powi(2)).sum::<f64>().sqrt();
                rel(lhs - rhs.eval(x), lhs + rhs.magnitude(x))
            }
            Constraint::Reciprocal { c, x: d, t } => {
                let (dv, tv) = (d.eval(x), t.eval(x));
                if dv <= 0.0 {
                    return rel(-dv + 1.0, d.magnitude(x)).max(f64::MIN_POSITIVE);
                }
                // c ≤ d·t, measured on the product to stay finite near d = 0.
                rel(c - dv * tv, c + (dv * tv).abs())
            }
            Constraint::CubeLe { x: e, t } => {
                let cube = e.eval(x).abs().powi(3);
                rel(cube - t.eval(x), cube + t.magnitude(x))
            }
            Constraint::LogGe { t, x: e } => {
                let arg = 1.0 + e.eval(x);
                if arg <= 0.0 {
                    return f64::INFINITY;
                }
                let l = arg.ln();
                rel(t.eval(x) - l, l.abs() + t.magnitude(x))
            }
        }
    }

    fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut push = |e: &Affine| out.extend(e.terms.iter().map(|t| t.0));
        match self {
            Constraint::Eq(e) | Constraint::Le(e) => push(e),
            Constraint::SquaredNormLe { terms, rhs } | Constraint::NormLe { terms, rhs } => {
                terms.iter().for_each(&mut push);
                push(rhs);
            }
            Constraint::Reciprocal { x, t, .. } | Constraint::CubeLe { x, t } => {
                push(x);
                push(t);
            }
            Constraint::LogGe { t, x } => {
                push(t);
                push(x);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Labelled {
    family: String,
    constraint: Constraint,
}

#[derive(Debug, Clone)]
struct VarInfo {
    name: String,
    lower: Option<f64>,
    upper: Option<f64>,
}

/// A convex program in the family vocabulary of [`Constraint`].
#[derive(Debug, Clone, Default)]
pub struct ConvexProgram {
    vars: Vec<VarInfo>,
    objective: Affine,
    constraints: Vec<Labelled>,
}

impl ConvexProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Option<f64>, upper: Option<f64>) -> Var {
        self.vars.push(VarInfo { name: name.into(), lower, upper });
        Var(self.vars.len() - 1)
    }

    pub fn free(&mut self, name: impl Into<String>) -> Var {
        self.add_var(name, None, None)
    }

    pub fn nonneg(&mut self, name: impl Into<String>) -> Var {
        self.add_var(name, Some(0.0), None)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_name(&self, v: Var) -> &str {
        &self.vars[v.0].name
    }

    /// Minimize `objective`.
    pub fn minimize(&mut self, objective: Affine) {
        self.objective = objective;
    }

    pub fn objective(&self) -> &Affine {
        &self.objective
    }

    pub fn constrain(&mut self, family: impl Into<String>, c: Constraint) {
        self.constraints.push(Labelled { family: family.into(), constraint: c });
    }

    pub fn eq(&mut self, family: &str, e: Affine) {
        self.constrain(family, Constraint::Eq(e));
    }

    /// `lhs ≤ rhs`
    pub fn le(&mut self, family: &str, lhs: impl Into<Affine>, rhs: impl Into<Affine>) {
        self.constrain(family, Constraint::Le(lhs.into() - rhs.into()));
    }

    /// Checks that every referenced variable exists and bounds are ordered.
    pub fn validate(&self) -> Result<()> {
        let n = self.vars.len();
        for v in &self.vars {
            if let (Some(l), Some(u)) = (v.lower, v.upper) {
                if l > u {
                    return Err(Error::Dimension(format!("variable {} has bounds {l} > {u}", v.name)));
                }
            }
        }
        let bad = |vs: Vec<Var>| vs.iter().any(|v| v.0 >= n);
        if bad(self.objective.terms.iter().map(|t| t.0).collect()) {
            return Err(Error::Dimension("objective references an undeclared variable".into()));
        }
        for c in &self.constraints {
            if bad(c.constraint.vars()) {
                return Err(Error::Dimension(format!(
                    "constraint `{}` references an undeclared variable",
                    c.family
                )));
            }
            if let Constraint::Reciprocal { c: k, .. } = c.constraint {
                if k < 0.0 {
                    return Err(Error::Dimension(format!("reciprocal `{}` has negative numerator", c.family)));
                }
            }
        }
        Ok(())
    }

    /// Largest relative violation over bounds and constraints, with the
    /// family it came from.
    pub fn max_residual(&self, x: &[f64]) -> (f64, Option<String>) {
        let mut worst = (0.0, None);
        for (j, v) in self.vars.iter().enumerate() {
            let r = v.lower.map_or(0.0, |l| (l - x[j]).max(0.0) / (1.0 + l.abs()))
                .max(v.upper.map_or(0.0, |u| (x[j] - u).max(0.0) / (1.0 + u.abs())));
            if r > worst.0 {
                worst = (r, Some(format!("bound:{}", v.name)));
            }
        }
        for c in &self.constraints {
            let r = c.constraint.residual(x);
            if !(r <= worst.0) {
                worst = (r, Some(c.family.clone()));
            }
        }
        worst
    }

    fn lower(&self) -> Conic {
        let mut k = Conic::new(self.vars.len());
        for (j, v) in self.vars.iter().enumerate() {
            if let Some(l) = v.lower {
                k.bound(&(Affine::from(Var(j)) - l));
            }
            if let Some(u) = v.upper {
                k.bound(&(Affine::constant(u) - Var(j)));
            }
        }
        for (owner, c) in self.constraints.iter().enumerate() {
            match &c.constraint {
                Constraint::Eq(e) => k.zero(e, owner),
                Constraint::Le(e) => k.nonneg_owned(&(-e.clone()), owner),
                Constraint::NormLe { terms, rhs } => {
                    let mut rows = vec![rhs.clone()];
                    rows.extend(terms.iter().cloned());
                    k.soc(&rows, owner);
                }
                Constraint::SquaredNormLe { terms, rhs } => {
                    // ‖(e, (r−1)/2)‖ ≤ (r+1)/2
                    let mut rows = vec![(rhs.clone() + 1.0) * 0.5];
                    rows.extend(terms.iter().cloned());
                    rows.push((rhs.clone() - 1.0) * 0.5);
                    k.soc(&rows, owner);
                }
                Constraint::Reciprocal { c, x, t } => {
                    // ‖(2√c, x − t)‖ ≤ x + t
                    let rows = [
                        x.clone() + t.clone(),
                        Affine::constant(2.0 * c.sqrt()),
                        x.clone() - t.clone(),
                    ];
                    k.soc(&rows, owner);
                }
                Constraint::CubeLe { x, t } => {
                    k.pow(&[t.clone(), Affine::constant(1.0), x.clone()], 1.0 / 3.0, owner);
                }
                Constraint::LogGe { t, x } => {
                    k.exp(&[t.clone(), Affine::constant(1.0), x.clone() + 1.0], owner);
                }
            }
        }
        k
    }

    /// Plain-text dump of the lowered conic program (format in module docs).
    pub fn dump_conic(&self) -> String {
        let k = self.lower();
        let mut out = String::new();
        let _ = writeln!(out, "conic {} {}", self.vars.len(), k.b.len());
        for (j, v) in self.vars.iter().enumerate() {
            let _ = writeln!(out, "var {j} {}", v.name);
        }
        let (q, offset) = self.objective_vector();
        for (j, qj) in q.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            let _ = writeln!(out, "q {j} {qj:e}");
        }
        let _ = writeln!(out, "offset {offset:e}");
        let mut row = 0;
        for c in &k.cones {
            let (name, dim, alpha) = match c {
                SupportedConeT::ZeroConeT(d) => ("zero", *d, None),
                SupportedConeT::NonnegativeConeT(d) => ("nonneg", *d, None),
                SupportedConeT::SecondOrderConeT(d) => ("soc", *d, None),
                SupportedConeT::ExponentialConeT() => ("exp", 3, None),
                SupportedConeT::PowerConeT(a) => ("pow", 3, Some(*a)),
                _ => ("other", 0, None),
            };
            match alpha {
                Some(a) => { let _ = writeln!(out, "cone {row} {name} {dim} {a:e}"); }
                None => { let _ = writeln!(out, "cone {row} {name} {dim}"); }
            }
            row += dim;
        }
        for ((i, j), v) in k.ai.iter().zip(&k.aj).zip(&k.av) {
            let _ = writeln!(out, "A {i} {j} {v:e}");
        }
        for (i, b) in k.b.iter().enumerate() {
            let _ = writeln!(out, "b {i} {b:e}");
        }
        out
    }

    fn objective_vector(&self) -> (Vec<f64>, f64) {
        let mut q = vec![0.0; self.vars.len()];
        for (v, c) in &self.objective.terms {
            q[v.0] += c;
        }
        (q, self.objective.constant)
    }
}

/// Row owner: a variable bound or the index of an original constraint.
#[derive(Debug, Clone, Copy)]
enum Owner {
    Bound,
    Constraint(usize),
}

struct Conic {
    n: usize,
    ai: Vec<usize>,
    aj: Vec<usize>,
    av: Vec<f64>,
    b: Vec<f64>,
    cones: Vec<SupportedConeT<f64>>,
    owners: Vec<Owner>,
}

impl Conic {
    fn new(n: usize) -> Self {
        Self { n, ai: vec![], aj: vec![], av: vec![], b: vec![], cones: vec![], owners: vec![] }
    }

    /// Appends the row `s = e(x)`, i.e. `A = −coef`, `b = constant`.
    fn row(&mut self, e: &Affine, owner: Owner) {
        let i = self.b.len();
        for (v, c) in &e.terms {
            if *c != 0.0 {
                self.ai.push(i);
                self.aj.push(v.0);
                self.av.push(-c);
            }
        }
        self.b.push(e.constant);
        self.owners.push(owner);
    }

    fn bound(&mut self, e: &Affine) {
        self.row(e, Owner::Bound);
        self.push_linear(true);
    }

    fn nonneg_owned(&mut self, e: &Affine, idx: usize) {
        self.row(e, Owner::Constraint(idx));
        self.push_linear(true);
    }

    fn zero(&mut self, e: &Affine, idx: usize) {
        self.row(e, Owner::Constraint(idx));
        self.push_linear(false);
    }

    /// Merges consecutive one-row linear cones.
    fn push_linear(&mut self, nonneg: bool) {
        match (self.cones.last_mut(), nonneg) {
            (Some(SupportedConeT::NonnegativeConeT(d)), true) => *d += 1,
            (Some(SupportedConeT::ZeroConeT(d)), false) => *d += 1,
            (_, true) => self.cones.push(SupportedConeT::NonnegativeConeT(1)),
            (_, false) => self.cones.push(SupportedConeT::ZeroConeT(1)),
        }
    }

    fn soc(&mut self, rows: &[Affine], idx: usize) {
        for r in rows {
            self.row(r, Owner::Constraint(idx));
        }
        self.cones.push(SupportedConeT::SecondOrderConeT(rows.len()));
    }

    fn exp(&mut self, rows: &[Affine; 3], idx: usize) {
        for r in rows {
            self.row(r, Owner::Constraint(idx));
        }
        self.cones.push(SupportedConeT::ExponentialConeT());
    }

    fn pow(&mut self, rows: &[Affine; 3], alpha: f64, idx: usize) {
        for r in rows {
            self.row(r, Owner::Constraint(idx));
        }
        self.cones.push(SupportedConeT::PowerConeT(alpha));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Largest relative violation found by re-evaluating the original program.
    pub max_residual: f64,
    /// Family holding the largest residual.
    pub worst_family: Option<String>,
    /// For infeasible programs: families carrying the infeasibility
    /// certificate, largest weight first.
    pub infeasible_families: Vec<String>,
    pub iterations: u32,
    /// The solver itself reported (near-)optimality, whatever the residual
    /// re-check concluded.
    pub solver_converged: bool,
    pub solver_status: String,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

impl SolveResult {
    pub fn value(&self, v: Var) -> f64 {
        self.values[v.0]
    }

    pub fn value_of(&self, e: &Affine) -> f64 {
        e.eval(&self.values)
    }

    pub fn diagnostics(&self) -> String {
        format!(
            "solver status {}, {} iterations, primal residual {:.3e}, dual residual {:.3e}, max constraint residual {:.3e}{}",
            self.solver_status,
            self.iterations,
            self.primal_residual,
            self.dual_residual,
            self.max_residual,
            self.worst_family.as_ref().map(|f| format!(" ({f})")).unwrap_or_default()
        )
    }
}

/// Solves `program` to `controls.solver_tol`.
pub fn solve(program: &ConvexProgram, controls: &SimControls) -> Result<SolveResult> {
    program.validate()?;
    let tol = controls.solver_tol;
    let k = program.lower();
    let n = k.n;
    let m = k.b.len();
    let a = CscMatrix::new_from_triplets(m, n, k.ai.clone(), k.aj.clone(), k.av.clone());
    let p = CscMatrix::<f64>::zeros((n, n));
    let (q, _) = program.objective_vector();
    let inner_tol = (tol * 1e-2).max(1e-10);
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(400)
        .tol_feas(inner_tol)
        .tol_gap_abs(inner_tol)
        .tol_gap_rel(inner_tol)
        .presolve_enable(false)
        .build()
        .map_err(|e| Error::Backend(format!("settings: {e:?}")))?;
    let mut solver = DefaultSolver::new(&p, &q, &a, &k.b, &k.cones, settings)
        .map_err(|e| Error::Backend(format!("{e:?}")))?;
    solver.solve();
    let sol = &solver.solution;
    let values = sol.x.clone();
    let (max_residual, worst_family) = program.max_residual(&values);

    let status = match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved if max_residual <= tol => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
        _ => SolveStatus::NumericalFailure,
    };

    let infeasible_families = if status == SolveStatus::Infeasible {
        certificate_families(program, &k, &sol.z)
    } else {
        Vec::new()
    };

    Ok(SolveResult {
        status,
        objective: program.objective.eval(&values),
        values,
        max_residual,
        worst_family,
        infeasible_families,
        iterations: sol.iterations,
        solver_converged: matches!(sol.status, SolverStatus::Solved | SolverStatus::AlmostSolved),
        solver_status: format!("{:?}", sol.status),
        primal_residual: sol.r_prim,
        dual_residual: sol.r_dual,
    })
}

/// Aggregates |z| of a primal-infeasibility certificate per constraint family.
fn certificate_families(program: &ConvexProgram, k: &Conic, z: &[f64]) -> Vec<String> {
    let mut weights: Vec<(String, f64)> = Vec::new();
    for (row, owner) in k.owners.iter().enumerate() {
        let fam = match owner {
            Owner::Bound => "bound".to_string(),
            Owner::Constraint(i) => program.constraints[*i].family.clone(),
        };
        let w = z.get(row).copied().unwrap_or(0.0).abs();
        match weights.iter_mut().find(|(f, _)| *f == fam) {
            Some(e) => e.1 += w,
            None => weights.push((fam, w)),
        }
    }
    let total: f64 = weights.iter().map(|w| w.1).sum();
    weights.retain(|w| w.1 > 1e-6 * total.max(f64::MIN_POSITIVE));
    weights.sort_by(|a, b| b.1.total_cmp(&a.1));
    weights.into_iter().map(|w| w.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn controls() -> SimControls {
        SimControls::default()
    }

    #[test]
    fn minimize_x_above_three() {
        let mut p = ConvexProgram::new();
        let x = p.free("x");
        p.le("floor", 3.0, x);
        p.minimize(x.into());
        let r = solve(&p, &controls()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.value(x) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn projection_onto_point() {
        let mut p = ConvexProgram::new();
        let z = p.free("z");
        let lam = p.free("lambda");
        p.constrain("dist", Constraint::SquaredNormLe { terms: vec![z - 7.5], rhs: lam.into() });
        p.minimize(lam.into());
        let r = solve(&p, &controls()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.value(lam).abs() < 1e-6);
        assert!((r.value(z) - 7.5).abs() < 1e-3);
    }

    #[test]
    fn reciprocal_cube_and_log_families() {
        // min 4/x + x³ over x ≥ 0.1  →  x = (4/3)^(1/4)
        let mut p = ConvexProgram::new();
        let x = p.add_var("x", Some(0.1), Some(10.0));
        let r = p.free("r");
        let c = p.free("c");
        p.constrain("recip", Constraint::Reciprocal { c: 4.0, x: x.into(), t: r.into() });
        p.constrain("cube", Constraint::CubeLe { x: x.into(), t: c.into() });
        p.minimize(r + c);
        let s = solve(&p, &controls()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.value(x) - (4.0f64 / 3.0).powf(0.25)).abs() < 1e-4);

        // max t s.t. t ≤ ln(1 + y), y ≤ e − 1  →  t = 1
        let mut p = ConvexProgram::new();
        let y = p.nonneg("y");
        let t = p.free("t");
        p.le("cap", y, std::f64::consts::E - 1.0);
        p.constrain("log", Constraint::LogGe { t: t.into(), x: y.into() });
        p.minimize(t * -1.0);
        let s = solve(&p, &controls()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.value(t) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn norm_and_equality() {
        // min ‖(x−1, y−2)‖ s.t. x + y = 0
        let mut p = ConvexProgram::new();
        let x = p.free("x");
        let y = p.free("y");
        let t = p.free("t");
        p.eq("line", x + y);
        p.constrain("norm", Constraint::NormLe { terms: vec![x - 1.0, y - 2.0], rhs: t.into() });
        p.minimize(t.into());
        let s = solve(&p, &controls()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.value(x) + 0.5).abs() < 1e-5);
        assert!((s.value(t) - 4.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn infeasible_names_family() {
        let mut p = ConvexProgram::new();
        let x = p.nonneg("x");
        p.le("demand", 5.0, x);
        p.le("capacity", x, 2.0);
        p.minimize(x.into());
        let s = solve(&p, &controls()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
        assert!(s.infeasible_families.iter().any(|f| f == "demand"));
        assert!(s.infeasible_families.iter().any(|f| f == "capacity"));
    }

    #[test]
    fn undeclared_variable_rejected() {
        let mut p = ConvexProgram::new();
        p.le("bad", Var(3), 1.0);
        assert!(matches!(solve(&p, &controls()), Err(Error::Dimension(_))));
    }

    #[test]
    fn dump_lists_every_row() {
        let mut p = ConvexProgram::new();
        let x = p.nonneg("x");
        let t = p.free("t");
        p.constrain("sq", Constraint::SquaredNormLe { terms: vec![x - 1.0], rhs: t.into() });
        p.minimize(t.into());
        let d = p.dump_conic();
        assert!(d.starts_with("conic 2 4\n"));
        assert!(d.contains("cone 0 nonneg 1"));
        assert!(d.contains("cone 1 soc 3"));
        assert_eq!(d.lines().filter(|l| l.starts_with("b ")).count(), 4);
    }
}
