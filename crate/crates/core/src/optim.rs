//! Derivative-free minimizers: Nelder-Mead simplex and Powell's COBYLA
//! (unconstrained form).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NelderMead,
    #[default]
    Cobyla,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::NelderMead => "nelder_mead",
            Method::Cobyla => "cobyla",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nelder_mead" | "nelder-mead" => Ok(Method::NelderMead),
            "cobyla" => Ok(Method::Cobyla),
            other => Err(Error::InvalidParameter(format!("unknown optimizer `{other}` (expected nelder_mead or cobyla)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimOptions {
    pub max_evals: usize,
    /// Nelder-Mead: spread of simplex values.
    pub ftol: f64,
    /// Nelder-Mead: spread of simplex vertices.
    pub xtol: f64,
    /// Nelder-Mead initial edge length; `None` uses 5% of each coordinate
    /// (0.00025 for zero coordinates).
    pub initial_step: Option<f64>,
    /// COBYLA initial trust radius.
    pub rho_begin: f64,
    /// COBYLA final trust radius.
    pub rho_end: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions { max_evals: 5000, ftol: 1e-8, xtol: 1e-8, initial_step: None, rho_begin: 0.5, rho_end: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult<T> {
    pub x: Vec<T>,
    pub fx: T,
    pub n_evals: usize,
    /// False when the evaluation budget ran out before the stopping test.
    pub converged: bool,
    /// Objective value at each accepted new best point, in order.
    pub history: Vec<T>,
}

/// Counts evaluations, enforces the budget and remembers the best point.
struct Budget<'a, T, F> {
    f: &'a mut F,
    n: usize,
    max: usize,
    best_x: Vec<T>,
    best_f: T,
    history: Vec<T>,
}

impl<'a, T: Real, F: FnMut(&[T]) -> T> Budget<'a, T, F> {
    fn new(f: &'a mut F, max: usize, dim: usize) -> Self {
        Budget { f, n: 0, max, best_x: vec![T::zero(); dim], best_f: T::infinity(), history: Vec::new() }
    }

    /// `None` once the budget is spent. NaN values count as +∞.
    fn eval(&mut self, x: &[T]) -> Option<T> {
        if self.n >= self.max {
            return None;
        }
        self.n += 1;
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = T::infinity();
        }
        if v < self.best_f || self.history.is_empty() {
            self.best_f = v;
            self.best_x.copy_from_slice(x);
            self.history.push(v);
        }
        Some(v)
    }

    fn finish(self, converged: bool) -> OptimResult<T> {
        OptimResult { x: self.best_x, fx: self.best_f, n_evals: self.n, converged, history: self.history }
    }
}

fn check_start<T: Real>(x0: &[T], opts: &OptimOptions) -> Result<()> {
    if x0.is_empty() {
        return Err(Error::InvalidParameter("starting point must have at least one coordinate".into()));
    }
    if x0.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("starting point must be finite".into()));
    }
    if opts.max_evals < x0.len() + 1 {
        return Err(Error::BudgetTooSmall { budget: opts.max_evals, min: x0.len() + 1, dim: x0.len() });
    }
    Ok(())
}

pub fn minimize<T: Real, F: FnMut(&[T]) -> T>(method: Method, f: F, x0: &[T], opts: &OptimOptions) -> Result<OptimResult<T>> {
    match method {
        Method::NelderMead => nelder_mead(f, x0, opts),
        Method::Cobyla => cobyla(f, x0, opts),
    }
}

/// Nelder-Mead with reflection 1, expansion 2, contraction ½ and shrink ½.
/// Stops when both the value spread and the vertex spread of the simplex fall
/// below `ftol` and `xtol`.
pub fn nelder_mead<T: Real, F: FnMut(&[T]) -> T>(mut f: F, x0: &[T], opts: &OptimOptions) -> Result<OptimResult<T>> {
    check_start(x0, opts)?;
    let n = x0.len();
    let mut budget = Budget::new(&mut f, opts.max_evals, n);
    let (ftol, xtol) = (T::lit(opts.ftol), T::lit(opts.xtol));
    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));

    let mut sim: Vec<Vec<T>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        let step = match opts.initial_step {
            Some(s) => T::lit(s),
            None if v[i] != T::zero() => T::lit(0.05) * v[i],
            None => T::lit(0.00025),
        };
        v[i] += step;
        sim.push(v);
    }
    let mut fs = Vec::with_capacity(n + 1);
    for v in &sim {
        fs.push(budget.eval(v).expect("budget checked up front"));
    }

    let lerp = |a: &[T], b: &[T], t: T| -> Vec<T> { a.iter().zip(b).map(|(&a, &b)| a + t * (b - a)).collect() };

    let converged = loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fs[a].partial_cmp(&fs[b]).unwrap_or(std::cmp::Ordering::Equal));
        sim = order.iter().map(|&k| sim[k].clone()).collect();
        fs = order.iter().map(|&k| fs[k]).collect();

        let fspread = fs.iter().map(|&v| (v - fs[0]).abs()).fold(T::zero(), T::max);
        let xspread = sim[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&sim[0]).map(|(&a, &b)| (a - b).abs()))
            .fold(T::zero(), T::max);
        if fspread <= ftol && xspread <= xtol {
            break true;
        }

        let mut centroid = vec![T::zero(); n];
        for v in &sim[..n] {
            for (c, &x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        let nt = T::lit(n as f64);
        centroid.iter_mut().for_each(|c| *c /= nt);

        let worst = sim[n].clone();
        let xr = lerp(&centroid, &worst, -alpha);
        let Some(fr) = budget.eval(&xr) else { break false };

        if fr < fs[0] {
            let xe = lerp(&centroid, &worst, -alpha * gamma);
            let Some(fe) = budget.eval(&xe) else { break false };
            if fe < fr {
                sim[n] = xe;
                fs[n] = fe;
            } else {
                sim[n] = xr;
                fs[n] = fr;
            }
            continue;
        }
        if fr < fs[n - 1] {
            sim[n] = xr;
            fs[n] = fr;
            continue;
        }
        let shrink = if fr < fs[n] {
            let xc = lerp(&centroid, &worst, -alpha * rho);
            let Some(fc) = budget.eval(&xc) else { break false };
            if fc <= fr {
                sim[n] = xc;
                fs[n] = fc;
                false
            } else {
                true
            }
        } else {
            let xcc = lerp(&centroid, &worst, rho);
            let Some(fcc) = budget.eval(&xcc) else { break false };
            if fcc < fs[n] {
                sim[n] = xcc;
                fs[n] = fcc;
                false
            } else {
                true
            }
        };
        if shrink {
            let best = sim[0].clone();
            let mut out_of_budget = false;
            for k in 1..=n {
                sim[k] = lerp(&best, &sim[k], sigma);
                match budget.eval(&sim[k]) {
                    Some(v) => fs[k] = v,
                    None => {
                        out_of_budget = true;
                        break;
                    }
                }
            }
            if out_of_budget {
                break false;
            }
        }
    };
    Ok(budget.finish(converged))
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Inverse of the matrix whose rows are `rows`, returned as columns
/// (`cols[k]` satisfies rows[j]·cols[k] = δ_jk). `None` if singular.
fn invert_rows<T: Real>(rows: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = rows.len();
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut inv: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if a[piv][col] == T::zero() {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for k in 0..n {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..n {
            if r != col {
                let m = a[r][col];
                if m != T::zero() {
                    for k in 0..n {
                        let (ak, ik) = (a[col][k], inv[col][k]);
                        a[r][k] -= m * ak;
                        inv[r][k] -= m * ik;
                    }
                }
            }
        }
    }
    // inv is D⁻¹ in row-major; its columns are the dual vectors.
    Some((0..n).map(|k| (0..n).map(|i| inv[i][k]).collect()).collect())
}

/// Simplex of n+1 interpolation points stored as a base vertex plus
/// displacements, with the dual basis `w` (d_j · w_k = δ_jk) kept up to date.
struct Simplex<T> {
    base: Vec<T>,
    f_base: T,
    d: Vec<Vec<T>>,
    f: Vec<T>,
    w: Vec<Vec<T>>,
}

impl<T: Real> Simplex<T> {
    fn vertex_with(&self, dx: &[T]) -> Vec<T> {
        self.base.iter().zip(dx).map(|(&b, &d)| b + d).collect()
    }

    /// Moves the base to the lowest vertex.
    fn rebase(&mut self) {
        let Some(j) = (0..self.d.len()).filter(|&j| self.f[j] < self.f_base).min_by(|&a, &b| {
            self.f[a].partial_cmp(&self.f[b]).unwrap_or(std::cmp::Ordering::Equal)
        }) else {
            return;
        };
        let dj = self.d[j].clone();
        for (b, &x) in self.base.iter_mut().zip(&dj) {
            *b += x;
        }
        for k in 0..self.d.len() {
            if k != j {
                for (a, &x) in self.d[k].iter_mut().zip(&dj) {
                    *a -= x;
                }
            }
        }
        self.d[j].iter_mut().for_each(|x| *x = -*x);
        std::mem::swap(&mut self.f[j], &mut self.f_base);
        let n = self.w.len();
        let mut sum = vec![T::zero(); n];
        for col in &self.w {
            for (s, &x) in sum.iter_mut().zip(col) {
                *s -= x;
            }
        }
        self.w[j] = sum;
    }

    /// Replaces vertex j by base + dx with value fx (Sherman-Morrison on w).
    fn replace(&mut self, j: usize, dx: Vec<T>, fx: T) {
        let scale = dot(&dx, &self.w[j]);
        let wj: Vec<T> = self.w[j].iter().map(|&x| x / scale).collect();
        for k in 0..self.w.len() {
            if k != j {
                let c = dot(&dx, &self.w[k]);
                for (a, &b) in self.w[k].iter_mut().zip(&wj) {
                    *a -= c * b;
                }
            }
        }
        self.w[j] = wj;
        self.d[j] = dx;
        self.f[j] = fx;
    }

    fn gradient(&self) -> Vec<T> {
        let n = self.base.len();
        let mut g = vec![T::zero(); n];
        for (wk, &fk) in self.w.iter().zip(&self.f) {
            let df = fk - self.f_base;
            for (gi, &wi) in g.iter_mut().zip(wk) {
                *gi += df * wi;
            }
        }
        g
    }
}

/// COBYLA without constraints: a linear interpolation model on n+1 points,
/// trust-region steps of radius ρ, geometry-improving steps when the simplex
/// degenerates, and ρ halved from `rho_begin` until it reaches `rho_end`.
pub fn cobyla<T: Real, F: FnMut(&[T]) -> T>(mut f: F, x0: &[T], opts: &OptimOptions) -> Result<OptimResult<T>> {
    check_start(x0, opts)?;
    if !(opts.rho_begin > 0.0 && opts.rho_end > 0.0 && opts.rho_end <= opts.rho_begin) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < rho_end <= rho_begin (got {}, {})",
            opts.rho_end, opts.rho_begin
        )));
    }
    let n = x0.len();
    let mut budget = Budget::new(&mut f, opts.max_evals, n);
    let rho_end = T::lit(opts.rho_end);
    let mut rho = T::lit(opts.rho_begin);
    let (alpha, beta, gamma, delta) = (T::lit(0.25), T::lit(2.1), T::lit(0.5), T::lit(1.1));

    let f_base = budget.eval(x0).expect("budget checked up front");
    let mut s = Simplex { base: x0.to_vec(), f_base, d: Vec::with_capacity(n), f: Vec::with_capacity(n), w: Vec::with_capacity(n) };
    for j in 0..n {
        let mut dj = vec![T::zero(); n];
        dj[j] = rho;
        let mut wj = vec![T::zero(); n];
        wj[j] = T::one() / rho;
        let fj = budget.eval(&s.vertex_with(&dj)).expect("budget checked up front");
        s.d.push(dj);
        s.f.push(fj);
        s.w.push(wj);
    }

    // Powell's IBRNCH: after a trust step, skip the geometry test until a step fails.
    let mut trust_mode = false;
    let converged = 'outer: loop {
        s.rebase();
        let g = s.gradient();
        let vsig: Vec<T> = s.w.iter().map(|w| T::one() / norm(w)).collect();
        let veta: Vec<T> = s.d.iter().map(|d| norm(d)).collect();
        let (parsig, pareta) = (alpha * rho, beta * rho);
        let acceptable = vsig.iter().all(|&v| v >= parsig) && veta.iter().all(|&v| v <= pareta);

        if !acceptable && !trust_mode {
            let (jmax, emax) = veta.iter().enumerate().fold((0, T::zero()), |b, (j, &v)| if v > b.1 { (j, v) } else { b });
            let jdrop = if emax > pareta {
                jmax
            } else {
                vsig.iter().enumerate().fold((0, T::infinity()), |b, (j, &v)| if v < b.1 { (j, v) } else { b }).0
            };
            let mut dx: Vec<T> = s.w[jdrop].iter().map(|&x| gamma * rho * vsig[jdrop] * x).collect();
            if dot(&g, &dx) > T::zero() {
                dx.iter_mut().for_each(|x| *x = -*x);
            }
            let Some(fx) = budget.eval(&s.vertex_with(&dx)) else { break false };
            s.replace(jdrop, dx, fx);
            continue;
        }
        trust_mode = true;

        let gnorm = norm(&g);
        let mut reduce = true;
        if gnorm > T::zero() && gnorm.is_finite() {
            let dx: Vec<T> = g.iter().map(|&x| -rho * x / gnorm).collect();
            let prerem = rho * gnorm;
            let Some(fx) = budget.eval(&s.vertex_with(&dx)) else { break false };
            let trured = s.f_base - fx;

            let mut ratio = if trured <= T::zero() { T::one() } else { T::zero() };
            let mut jdrop = None;
            let mut sigbar = vec![T::zero(); n];
            for j in 0..n {
                let temp = dot(&dx, &s.w[j]).abs();
                if temp > ratio {
                    jdrop = Some(j);
                    ratio = temp;
                }
                sigbar[j] = temp * vsig[j];
            }
            let mut edgmax = delta * rho;
            let mut l = None;
            for j in 0..n {
                if sigbar[j] >= parsig || sigbar[j] >= vsig[j] {
                    let temp = if trured > T::zero() {
                        dx.iter().zip(&s.d[j]).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt()
                    } else {
                        veta[j]
                    };
                    if temp > edgmax {
                        l = Some(j);
                        edgmax = temp;
                    }
                }
            }
            if l.is_some() {
                jdrop = l;
            }
            if let Some(j) = jdrop {
                s.replace(j, dx, fx);
            }
            if trured >= T::lit(0.1) * prerem {
                reduce = false;
            } else if !acceptable {
                trust_mode = false;
                continue;
            }
        } else if !acceptable {
            trust_mode = false;
            continue;
        }

        if reduce {
            if rho <= rho_end {
                break 'outer true;
            }
            rho *= T::lit(0.5);
            if rho <= T::lit(1.5) * rho_end {
                rho = rho_end;
            }
            s.rebase();
            if let Some(w) = invert_rows(&s.d) {
                s.w = w;
            }
        }
    };
    Ok(budget.finish(converged))
}
