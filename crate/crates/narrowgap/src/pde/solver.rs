use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par, Side};
use serde::{Deserialize, Serialize};

use super::field::Field;
use super::grid::{BoundaryClass, Grid};
use crate::geometry::Point;
use crate::par;
use crate::{Error, Result};

pub type TraceFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Dirichlet value on one boundary class.
#[derive(Clone)]
pub enum BoundaryValue {
    Const(f64),
    Trace(TraceFn),
}

impl BoundaryValue {
    pub fn at(&self, p: Point) -> f64 {
        match self {
            BoundaryValue::Const(c) => *c,
            BoundaryValue::Trace(f) => f(p),
        }
    }
}

impl std::fmt::Debug for BoundaryValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryValue::Const(c) => write!(f, "Const({c})"),
            BoundaryValue::Trace(_) => write!(f, "Trace(..)"),
        }
    }
}

/// Dirichlet data for every boundary class.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub omega: BoundaryValue,
    pub d1: BoundaryValue,
    pub d2: BoundaryValue,
}

impl BoundaryData {
    pub fn constants(omega: f64, d1: f64, d2: f64) -> BoundaryData {
        BoundaryData { omega: BoundaryValue::Const(omega), d1: BoundaryValue::Const(d1), d2: BoundaryValue::Const(d2) }
    }

    /// The same trace on every boundary.
    pub fn everywhere(f: TraceFn) -> BoundaryData {
        BoundaryData {
            omega: BoundaryValue::Trace(f.clone()),
            d1: BoundaryValue::Trace(f.clone()),
            d2: BoundaryValue::Trace(f),
        }
    }

    pub fn value(&self, class: BoundaryClass, p: Point) -> f64 {
        match class {
            BoundaryClass::Omega => self.omega.at(p),
            BoundaryClass::D1 => self.d1.at(p),
            BoundaryClass::D2 => self.d2.at(p),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreconditionerKind {
    Jacobi,
    Cholesky,
    /// Jacobi on small grids, Cholesky above [`AUTO_CHOLESKY_NODES`].
    #[default]
    Auto,
}

pub const AUTO_CHOLESKY_NODES: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    pub tol: f64,
    #[serde(default)]
    pub preconditioner: PreconditionerKind,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, preconditioner: PreconditionerKind::Auto }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

/// The symmetric positive definite cut-cell operator in compressed rows.
#[derive(Debug)]
pub struct Operator {
    pub diag: Vec<f64>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Operator {
    pub fn assemble(grid: &Grid) -> Operator {
        let n = grid.len();
        let mut diag = vec![0.0; n];
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(4 * n);
        let mut vals = Vec::with_capacity(4 * n);
        row_start.push(0);
        for (i, arms) in grid.arms.iter().enumerate() {
            for a in arms {
                diag[i] += a.weight;
                if !a.is_cut {
                    cols.push(a.target);
                    vals.push(-a.weight);
                }
            }
            row_start.push(cols.len());
        }
        Operator { diag, row_start, cols, vals }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        par::fill_indexed(y, |i| {
            let mut s = self.diag[i] * x[i];
            for k in self.row_start[i]..self.row_start[i + 1] {
                s += self.vals[k] * x[self.cols[k] as usize];
            }
            s
        });
    }

    fn lower_triplets(&self) -> Vec<Triplet<usize, usize, f64>> {
        let mut t = Vec::with_capacity(self.len() + self.cols.len() / 2);
        for i in 0..self.len() {
            t.push(Triplet::new(i, i, self.diag[i]));
            for k in self.row_start[i]..self.row_start[i + 1] {
                let j = self.cols[k] as usize;
                if j > i {
                    t.push(Triplet::new(j, i, self.vals[k]));
                }
            }
        }
        t
    }
}

pub trait Preconditioner: Send + Sync {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(op: &Operator) -> Jacobi {
        Jacobi { inv_diag: op.diag.iter().map(|d| 1.0 / d).collect() }
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        par::fill_indexed(z, |i| r[i] * self.inv_diag[i]);
    }
}

/// Sparse Cholesky factor of the operator itself; CG then converges in one
/// or two steps and the factor is reused for every right-hand side.
pub struct Cholesky {
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
}

impl Cholesky {
    pub fn new(op: &Operator) -> Result<Cholesky> {
        // Sequential kernels keep the factor bitwise independent of the pool.
        faer::set_global_parallelism(Par::Seq);
        let n = op.len();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &op.lower_triplets())
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let llt = a.sp_cholesky(Side::Lower).map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(Cholesky { llt })
    }
}

impl Preconditioner for Cholesky {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let mut m = Mat::<f64>::from_fn(r.len(), 1, |i, _| r[i]);
        self.llt.solve_in_place(&mut m);
        for (i, v) in z.iter_mut().enumerate() {
            *v = m[(i, 0)];
        }
    }
}

/// Dirichlet solver for one grid; the preconditioner is built once and
/// shared by all right-hand sides.
pub struct DirichletSolver<'g> {
    grid: &'g Grid,
    op: Operator,
    pre: Box<dyn Preconditioner>,
    opts: SolverOptions,
}

impl<'g> DirichletSolver<'g> {
    pub fn new(grid: &'g Grid, opts: SolverOptions) -> Result<Self> {
        if !(opts.tol > 0.0 && opts.tol <= 1e-6) {
            return Err(Error::InvalidInput(format!("solver tolerance {} outside (0, 1e-6]", opts.tol)));
        }
        let op = Operator::assemble(grid);
        let use_chol = match opts.preconditioner {
            PreconditionerKind::Jacobi => false,
            PreconditionerKind::Cholesky => true,
            PreconditionerKind::Auto => grid.len() > AUTO_CHOLESKY_NODES,
        };
        let pre: Box<dyn Preconditioner> =
            if use_chol { Box::new(Cholesky::new(&op)?) } else { Box::new(Jacobi::new(&op)) };
        Ok(DirichletSolver { grid, op, pre, opts })
    }

    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    /// Boundary values at every cut point.
    pub fn trace(&self, bdata: &BoundaryData) -> Vec<f64> {
        let cuts = &self.grid.cuts;
        par::map_indexed(cuts.len(), |c| bdata.value(cuts[c].class, cuts[c].point))
    }

    pub fn solve(&self, bdata: &BoundaryData) -> Result<(Field, SolveStats)> {
        let trace = self.trace(bdata);
        self.solve_trace(trace)
    }

    /// Solves with the boundary values given directly per cut.
    pub fn solve_trace(&self, trace: Vec<f64>) -> Result<(Field, SolveStats)> {
        let g = self.grid;
        let b: Vec<f64> = par::map_indexed(g.len(), |i| {
            g.arms[i].iter().filter(|a| a.is_cut).map(|a| a.weight * trace[a.target as usize]).sum()
        });
        let (values, stats) = self.cg(&b)?;
        Ok((Field::new(g, values, trace), stats))
    }

    fn cg(&self, b: &[f64]) -> Result<(Vec<f64>, SolveStats)> {
        let n = b.len();
        let mut x = vec![0.0; n];
        let bnorm = par::dot(b, b).sqrt();
        if bnorm == 0.0 {
            return Ok((x, SolveStats::default()));
        }
        let cap = (50.0 * (n as f64).sqrt()) as usize + 10_000;
        let tol = self.opts.tol;
        let mut r = b.to_vec();
        let mut z = vec![0.0; n];
        let mut q = vec![0.0; n];
        let mut it = 0;
        loop {
            // (Re)start from the true residual.
            self.op.apply(&x, &mut q);
            par::fill_indexed(&mut r, |i| b[i] - q[i]);
            let mut res = par::dot(&r, &r).sqrt() / bnorm;
            if res <= tol {
                return Ok((x, SolveStats { iterations: it, residual: res }));
            }
            if it >= cap {
                return Err(Error::NoConvergence { iterations: it, residual: res });
            }
            self.pre.apply(&r, &mut z);
            let mut p = z.clone();
            let mut rz = par::dot(&r, &z);
            while it < cap {
                it += 1;
                self.op.apply(&p, &mut q);
                let alpha = rz / par::dot(&p, &q);
                for i in 0..n {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * q[i];
                }
                res = par::dot(&r, &r).sqrt() / bnorm;
                if res <= tol {
                    break;
                }
                self.pre.apply(&r, &mut z);
                let rz_new = par::dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                for i in 0..n {
                    p[i] = z[i] + beta * p[i];
                }
            }
        }
    }
}

/// One-shot Dirichlet solve with default preconditioning.
pub fn solve_dirichlet(grid: &Grid, bdata: &BoundaryData, tol: f64) -> Result<Field> {
    let solver = DirichletSolver::new(grid, SolverOptions { tol, ..Default::default() })?;
    Ok(solver.solve(bdata)?.0)
}
