use crate::error::{Error, Result};
use crate::gridfn::{grid_fractional_integrate, GridOperator};
use crate::jordan::{ceil_alpha, ExactMatrix, GaussRat};
use crate::operators::{apply_block_n, check_vector, Block, BlockSpec, Flavor};
use crate::powerfn::{convolve, differentiate_n, dilate, evaluate_f64, fractional_integrate, jet, support_start, PowerFn};
use crate::rational::{qi, to_f64, Q, C64};
use crate::report::Check;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

pub const SRANK_CAP: usize = 4;
pub const RANK_TOL: f64 = 1e-8;

/// Candidate vectors `f_l = f_l1 + ... + f_ln` for the operator of `spec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSystem {
    pub spec: BlockSpec,
    pub vectors: Vec<Vec<PowerFn>>,
}

impl FunctionSystem {
    pub fn new(spec: BlockSpec, vectors: Vec<Vec<PowerFn>>) -> Result<Self> {
        for v in &vectors {
            check_vector(&spec, v)?;
        }
        Ok(FunctionSystem { spec, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSrank {
    pub members: Vec<usize>,
    pub srank: usize,
    /// Rows and columns of a witness minor satisfying the support condition.
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Witness {
    CountBound { have: usize, need: usize },
    Rank { rank: usize, need: usize, exact: bool, columns: Vec<usize> },
    Srank { classes: Vec<ClassSrank> },
    Mixed { jets: Box<CyclicityReport>, tail: Box<CyclicityReport> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclicityReport {
    pub verdict: bool,
    pub mu: usize,
    pub witness: Witness,
    pub checks: Vec<Check>,
}

/// `mu_A`: sum of `m_j` over W blocks, max class size for the rest, combined by max.
pub fn multiplicity(spec: &BlockSpec) -> usize {
    let c = ceil_alpha(spec.alpha());
    let w: usize = spec.blocks().iter().filter(|b| b.flavor == Flavor::W).map(|b| b.k.min(c)).sum();
    if spec.all_flavor(Flavor::W) {
        return w;
    }
    let classes = spec.classes().iter().map(|cl| cl.members.len()).max().unwrap_or(0);
    w.max(classes)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(vec![], true)];
    }
    let mut out = Vec::new();
    for (p, even) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // inserting at pos moves the new element past len - pos others
            let flips = p.len() - pos;
            out.push((q, even == (flips % 2 == 0)));
        }
    }
    out
}

/// Determinant with convolution as the product.
pub fn star_det(f: &[Vec<PowerFn>]) -> Result<PowerFn> {
    let n = f.len();
    if n > SRANK_CAP {
        return Err(Error::SizeCap(format!("*-determinant supports n <= {SRANK_CAP}, got {n}")));
    }
    if let Some(r) = f.iter().find(|r| r.len() != n) {
        return Err(Error::LengthMismatch { expected: n, got: r.len() });
    }
    if n == 0 {
        return Ok(PowerFn::constant(C64::one()));
    }
    let mut total = PowerFn::zero();
    for (perm, even) in permutations(n) {
        let mut prod = f[0][perm[0]].clone();
        for (i, &j) in perm.iter().enumerate().skip(1) {
            prod = convolve(&prod, &f[i][j]);
        }
        total = if even { total.add(&prod) } else { total.sub(&prod) };
    }
    Ok(total)
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    if n < r {
        return vec![];
    }
    let mut out = combinations(n - 1, r);
    for mut c in combinations(n - 1, r - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

fn epsilon_condition(f: &PowerFn) -> bool {
    !f.is_zero() && support_start(f).is_zero()
}

/// Largest order of a *-minor whose support starts at 0, with the witness rows and columns.
pub fn srank_with_witness(f: &[Vec<PowerFn>]) -> Result<(usize, Vec<usize>, Vec<usize>)> {
    let rows = f.len();
    let cols = f.first().map_or(0, |r| r.len());
    if let Some(r) = f.iter().find(|r| r.len() != cols) {
        return Err(Error::LengthMismatch { expected: cols, got: r.len() });
    }
    if rows.min(cols) > SRANK_CAP {
        return Err(Error::SizeCap(format!("srank supports min(N, n) <= {SRANK_CAP}")));
    }
    for r in (1..=rows.min(cols)).rev() {
        for rs in combinations(rows, r) {
            for cs in combinations(cols, r) {
                let minor: Vec<Vec<PowerFn>> = rs.iter().map(|&i| cs.iter().map(|&j| f[i][j].clone()).collect()).collect();
                if epsilon_condition(&star_det(&minor)?) {
                    return Ok((r, rs, cs));
                }
            }
        }
    }
    Ok((0, vec![], vec![]))
}

pub fn srank(f: &[Vec<PowerFn>]) -> Result<usize> {
    Ok(srank_with_witness(f)?.0)
}

/// `W_{p,0}^k -> L_p` by `k`-fold differentiation; `L_p` components pass through.
fn to_lp(f: &PowerFn, b: &Block) -> Result<PowerFn> {
    match b.flavor {
        Flavor::Lp => Ok(f.clone()),
        _ => differentiate_n(f, b.k),
    }
}

pub fn srank_test(sys: &FunctionSystem) -> Result<CyclicityReport> {
    let spec = &sys.spec;
    if spec.blocks().iter().any(|b| b.flavor == Flavor::W) {
        return Err(Error::Unsupported("srank_test takes Lp and W0 blocks only".into()));
    }
    let lp: Vec<Vec<PowerFn>> = sys
        .vectors
        .iter()
        .map(|v| v.iter().zip(spec.blocks()).map(|(f, b)| to_lp(f, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mu = multiplicity(spec);
    let mut checks = Vec::new();
    let mut classes = Vec::new();
    let mut verdict = true;
    for (c, cl) in spec.classes().iter().enumerate() {
        let size = cl.members.len();
        let count_ok = sys.len() >= size;
        checks.push(Check::new(format!("count[class {c}]"), count_ok, format!("N = {} against class size {size}", sys.len())));
        let f = lp
            .iter()
            .map(|v| cl.members.iter().map(|&i| dilate(spec.s(i)?, &v[i])).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let (r, rows, cols) = if count_ok || size <= SRANK_CAP { srank_with_witness(&f)? } else { (0, vec![], vec![]) };
        let ok = count_ok && r == size;
        checks.push(Check::new(format!("srank[class {c}]"), r == size, format!("srank {r}, class size {size}")));
        verdict &= ok;
        classes.push(ClassSrank { members: cl.members.clone(), srank: r, rows, cols: cols.iter().map(|&j| cl.members[j]).collect() });
    }
    Ok(CyclicityReport { verdict, mu, witness: Witness::Srank { classes }, checks })
}

fn exact_part(x: f64) -> Option<BigRational> {
    const SCALE: f64 = (1u64 << 24) as f64;
    let t = x * SCALE;
    (t.fract() == 0.0 && t.abs() < 2f64.powi(52)).then(|| BigRational::new(BigInt::from(t as i64), BigInt::from(1i64 << 24)))
}

/// Rank of a complex matrix: exact when every entry is a short dyadic, otherwise by singular values.
pub fn matrix_rank(rows: &[Vec<C64>]) -> (usize, bool, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let exact: Option<Vec<Vec<GaussRat>>> = rows
        .iter()
        .map(|r| r.iter().map(|z| Some(GaussRat::new(exact_part(z.re)?, exact_part(z.im)?))).collect::<Option<Vec<_>>>())
        .collect();
    if let Some(m) = exact {
        // greedy independent columns
        let mut cols: Vec<Vec<GaussRat>> = Vec::new();
        let mut picked = Vec::new();
        for j in 0..ncols {
            let mut trial = cols.clone();
            trial.push(m.iter().map(|r| r[j].clone()).collect());
            if ExactMatrix::from_rows(trial.clone()).map(|t| t.rank()).unwrap_or(0) == trial.len() {
                cols = trial;
                picked.push(j);
            }
        }
        return (picked.len(), true, picked);
    }
    let rank_of = |cols: &[usize]| -> usize {
        if cols.is_empty() || rows.is_empty() {
            return 0;
        }
        let mat = DMatrix::from_fn(rows.len(), cols.len(), |i, j| rows[i][cols[j]]);
        let sv = mat.singular_values();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&s| s > RANK_TOL * smax && s > 0.0).count()
    };
    let mut picked: Vec<usize> = Vec::new();
    for j in 0..ncols {
        let mut trial = picked.clone();
        trial.push(j);
        if rank_of(&trial) == trial.len() {
            picked = trial;
        }
    }
    (picked.len(), false, picked)
}

/// `W(0)`: rows `(j, i < m_j)`, columns the vectors, entries `f_lj^{(i)}(0)`.
pub fn w0_matrix(sys: &FunctionSystem) -> Result<Vec<Vec<C64>>> {
    let c = ceil_alpha(sys.spec.alpha());
    let mut rows = Vec::new();
    for (j, b) in sys.spec.blocks().iter().enumerate() {
        let m = b.k.min(c);
        let jets = sys.vectors.iter().map(|v| jet(&v[j], b.k)).collect::<Result<Vec<_>>>()?;
        for i in 0..m {
            rows.push(jets.iter().map(|jt| jt.values[i]).collect());
        }
    }
    Ok(rows)
}

pub fn w0_rank_test(sys: &FunctionSystem) -> Result<CyclicityReport> {
    if !sys.spec.all_flavor(Flavor::W) {
        return Err(Error::Unsupported("w0_rank_test takes W blocks only".into()));
    }
    let mu = multiplicity(&sys.spec);
    let count_ok = sys.len() >= mu;
    let mut checks = vec![Check::new("count_bound", count_ok, format!("N = {} against sum m_j = {mu}", sys.len()))];
    if !count_ok {
        return Ok(CyclicityReport { verdict: false, mu, witness: Witness::CountBound { have: sys.len(), need: mu }, checks });
    }
    let w = w0_matrix(sys)?;
    let (rank, exact, columns) = matrix_rank(&w);
    checks.push(Check::new("rank_w0", rank == mu, format!("rank {rank} ({}), need {mu}", if exact { "exact" } else { "tolerance" })));
    Ok(CyclicityReport { verdict: rank == mu, mu, witness: Witness::Rank { rank, need: mu, exact, columns }, checks })
}

fn sub_spec(spec: &BlockSpec, idx: &[usize], flavor: Option<Flavor>) -> Result<BlockSpec> {
    let blocks = idx
        .iter()
        .map(|&j| {
            let b = spec.block(j);
            match flavor {
                Some(Flavor::Lp) => Block::new(b.lambda, 0, Flavor::Lp),
                _ => b.clone(),
            }
        })
        .collect();
    BlockSpec::new(spec.alpha(), spec.p(), blocks)
}

/// W blocks by the jet rank; the rest after `A^M` and reduction to `L_p`, by srank.
pub fn mixed_test(sys: &FunctionSystem) -> Result<CyclicityReport> {
    let spec = &sys.spec;
    let w_idx: Vec<usize> = (0..spec.n()).filter(|&j| spec.block(j).flavor == Flavor::W).collect();
    if w_idx.is_empty() {
        return srank_test(sys);
    }
    if w_idx.len() == spec.n() {
        return w0_rank_test(sys);
    }
    let m = w_idx.iter().map(|&j| spec.block(j).k).max().unwrap_or(0);
    let w_sys = FunctionSystem::new(sub_spec(spec, &w_idx, None)?, sys.vectors.iter().map(|v| w_idx.iter().map(|&j| v[j].clone()).collect()).collect())?;
    let jets = w0_rank_test(&w_sys)?;
    let all: Vec<usize> = (0..spec.n()).collect();
    let lp_spec = sub_spec(spec, &all, Some(Flavor::Lp))?;
    let tail_vectors = sys
        .vectors
        .iter()
        .map(|v| {
            let g = apply_block_n(spec, v, m)?;
            g.iter().zip(spec.blocks()).map(|(f, b)| to_lp(f, b)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = srank_test(&FunctionSystem::new(lp_spec, tail_vectors)?)?;
    let mu = multiplicity(spec);
    let checks = vec![
        Check::new("w_part", jets.verdict, "projected W part is cyclic"),
        Check::new("tail_part", tail.verdict, format!("A^{m} images reduced to L_p are cyclic")),
    ];
    Ok(CyclicityReport {
        verdict: jets.verdict && tail.verdict,
        mu,
        witness: Witness::Mixed { jets: Box::new(jets), tail: Box::new(tail) },
        checks,
    })
}

/// Dispatches on the flavors present in the spec.
pub fn cyclicity(sys: &FunctionSystem) -> Result<CyclicityReport> {
    mixed_test(sys)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub grid: usize,
    pub depth: usize,
    pub span_dim: usize,
    pub residual: f64,
    pub worst_probe: String,
}

/// Grid state of one component: jet (W only) and samples of `f^{(k)}` (of `f` for `L_p`).
#[derive(Clone)]
struct Part {
    jet: Vec<C64>,
    g: Vec<C64>,
}

struct Grid {
    n: usize,
    h: f64,
    op: GridOperator,
    weights: Vec<f64>,
}

impl Grid {
    fn new(alpha: f64, n: usize) -> Result<Self> {
        let h = 1.0 / (n - 1) as f64;
        let weights = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).map(f64::sqrt).collect();
        Ok(Grid { n, h, op: grid_fractional_integrate(alpha, n)?, weights })
    }

    /// Cell averages over `[x_i - h/2, x_i + h/2]` clipped to `[0,1]`, exact through an antiderivative.
    fn average(&self, f: &PowerFn) -> Result<Vec<C64>> {
        let prim = fractional_integrate(qi(1), f)?;
        Ok((0..self.n)
            .map(|i| {
                let x = i as f64 * self.h;
                let (lo, hi) = ((x - 0.5 * self.h).max(0.0), (x + 0.5 * self.h).min(1.0));
                (evaluate_f64(&prim, hi) - evaluate_f64(&prim, lo)) / (hi - lo)
            })
            .collect())
    }

    fn apply(&self, g: &[C64]) -> Vec<C64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.op.data[i * self.n + j] * g[j]).sum()).collect()
    }
}

fn encode(spec: &BlockSpec, grid: &Grid, v: &[PowerFn]) -> Result<Vec<Part>> {
    v.iter()
        .zip(spec.blocks())
        .map(|(f, b)| {
            let (jet_v, g) = match b.flavor {
                Flavor::Lp => (vec![], f.clone()),
                Flavor::W0 => (vec![], differentiate_n(f, b.k)?),
                Flavor::W => (jet(f, b.k)?.values, differentiate_n(f, b.k)?),
            };
            Ok(Part { jet: jet_v, g: grid.average(&g)? })
        })
        .collect()
}

/// One step of `lambda J^alpha` on a W block: jet entries move up by `alpha` when it is an integer
/// and the powers that leave the jet become source terms of the `k`-th derivative.
fn step(spec: &BlockSpec, grid: &Grid, parts: &[Part]) -> Result<Vec<Part>> {
    let al = spec.alpha();
    let alf = to_f64(&al);
    parts
        .iter()
        .zip(spec.blocks())
        .map(|(p, b)| {
            let mut g = grid.apply(&p.g);
            let mut jet_v = vec![C64::zero(); p.jet.len()];
            if b.flavor == Flavor::W {
                let k = b.k as i64;
                let mut src = PowerFn::zero();
                for (m, c) in p.jet.iter().enumerate() {
                    if c.norm() == 0.0 {
                        continue;
                    }
                    // c x^m/m! -> c x^{m+alpha}/Gamma(m+alpha+1)
                    let e = Q::from_integer(m as i64) + al;
                    if e.is_integer() && e < Q::from_integer(k) {
                        jet_v[e.to_integer() as usize] += *c;
                    } else {
                        let d = e - Q::from_integer(k);
                        src = src.add(&PowerFn::monomial(*c / gamma(to_f64(&d) + 1.0), d));
                    }
                }
                if !src.is_zero() {
                    for (x, y) in g.iter_mut().zip(grid.average(&src)?) {
                        *x += y;
                    }
                }
            }
            let _ = alf;
            Ok(Part { jet: jet_v.iter().map(|x| x * b.lambda).collect(), g: g.iter().map(|x| x * b.lambda).collect() })
        })
        .collect()
}

fn flatten(grid: &Grid, parts: &[Part]) -> Vec<C64> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p.jet.iter().cloned());
        out.extend(p.g.iter().zip(&grid.weights).map(|(x, w)| x * *w));
    }
    out
}

fn unflatten(spec: &BlockSpec, grid: &Grid, v: &[C64]) -> Vec<Part> {
    let mut at = 0;
    spec.blocks()
        .iter()
        .map(|b| {
            let m = if b.flavor == Flavor::W { b.k } else { 0 };
            let jet_v = v[at..at + m].to_vec();
            at += m;
            let g = v[at..at + grid.n].iter().zip(&grid.weights).map(|(x, w)| x / *w).collect();
            at += grid.n;
            Part { jet: jet_v, g }
        })
        .collect()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(basis: &[Vec<C64>], v: &mut [C64]) {
    for _ in 0..2 {
        for b in basis {
            let d: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for (y, x) in v.iter_mut().zip(b) {
                *y -= d * x;
            }
        }
    }
}

/// Numerical evidence for cyclicity: how well the sampled Krylov span captures low-degree probes.
pub fn krylov_numeric_oracle(sys: &FunctionSystem, n: usize, depth: usize) -> Result<OracleReport> {
    let spec = &sys.spec;
    let grid = Grid::new(to_f64(&spec.alpha()), n)?;
    // Arnoldi: each chain steps the newest orthonormalized vector, which spans the same space as
    // the raw powers but stays well conditioned.
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in &sys.vectors {
        let mut x = flatten(&grid, &encode(spec, &grid, v)?);
        for d in 0..=depth {
            if d > 0 {
                let parts = unflatten(spec, &grid, &x);
                x = flatten(&grid, &step(spec, &grid, &parts)?);
            }
            let nx = norm(&x);
            if nx < 1e-300 {
                break;
            }
            x.iter_mut().for_each(|y| *y /= nx);
            project_out(&basis, &mut x);
            let r = norm(&x);
            if r < 1e-10 {
                break;
            }
            x.iter_mut().for_each(|y| *y /= r);
            basis.push(x.clone());
        }
    }
    let mut worst = (if sys.is_empty() { 1.0 } else { 0.0 }, String::from("none"));
    for (j, b) in spec.blocks().iter().enumerate() {
        let mut probes: Vec<(String, PowerFn)> = (0..=6)
            .map(|d| {
                let e = if b.flavor == Flavor::W0 { d + b.k as i64 } else { d };
                (format!("x^{e} in block {j}"), PowerFn::monomial(C64::one(), qi(e)))
            })
            .collect();
        if b.flavor == Flavor::W {
            for i in 0..b.k {
                let f = (1..=i).product::<usize>() as f64;
                probes.push((format!("jet {i} in block {j}"), PowerFn::monomial(C64::new(1.0 / f, 0.0), qi(i as i64))));
            }
        }
        for (name, pf) in probes {
            let mut v = vec![PowerFn::zero(); spec.n()];
            v[j] = pf;
            let mut x = flatten(&grid, &encode(spec, &grid, &v)?);
            let nx = norm(&x);
            x.iter_mut().for_each(|y| *y /= nx);
            project_out(&basis, &mut x);
            let r = norm(&x);
            if r > worst.0 {
                worst = (r, name);
            }
        }
    }
    Ok(OracleReport { grid: n, depth, span_dim: basis.len(), residual: worst.0.min(1.0), worst_probe: worst.1 })
}
