//! Dense bounded-variable dual simplex on a condensed tableau.
//!
//! Each row `i` of the LP gets a logical variable `r_i = a_i . x` whose bounds
//! carry the row sense and right-hand side, so the whole problem is
//! `min c.x  s.t.  r = A x,  lo <= (x, r) <= hi`. The tableau stores the basic
//! variables as linear functions of the nonbasic ones (`m x n`, plus two rows
//! of reduced costs). A fresh workspace starts from the all-logical basis.
//!
//! Nonbasic variables are placed at the bound that makes their reduced cost
//! dual feasible; a missing bound is replaced by an artificial box at
//! `+-BIG`, and a solution resting on one reports `Unbounded`. Costs of boxed
//! columns are perturbed during the dual phase and a primal phase on the true
//! costs finishes the solve. Branching only fixes bounds, which keeps the
//! current basis dual feasible, so re-solving a child after a bound change is
//! a short dual simplex run.

use std::time::Instant;

use crate::milp::{MilpModel, Sense};

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-7;
const DROP_TOL: f64 = 1e-14;
const BIG: f64 = 1e7;
const PERTURB: f64 = 1e-7;
const PERTURB_REL: f64 = 1e-6;
const DEGENERATE_SWITCH: u32 = 200;
const REFRESH_EVERY: u64 = 100;

/// Column-and-row data of an LP in the logical-variable form.
#[derive(Debug, Clone)]
pub struct LpData {
    pub n: usize,
    pub m: usize,
    /// Row-major `m x n` constraint matrix.
    pub a: Vec<f64>,
    pub cost: Vec<f64>,
    /// Bounds of structural columns followed by row activities.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl LpData {
    pub fn from_model(model: &MilpModel) -> Self {
        let n = model.num_vars();
        let m = model.num_constraints();
        let mut a = vec![0.0; m * n];
        let mut lo = Vec::with_capacity(n + m);
        let mut hi = Vec::with_capacity(n + m);
        for v in model.variables() {
            lo.push(v.lower);
            hi.push(v.upper);
        }
        for (i, c) in model.constraints().iter().enumerate() {
            for &(v, coef) in &c.terms {
                a[i * n + v.0] += coef;
            }
            let (l, h) = match c.sense {
                Sense::Le => (f64::NEG_INFINITY, c.rhs),
                Sense::Ge => (c.rhs, f64::INFINITY),
                Sense::Eq => (c.rhs, c.rhs),
            };
            lo.push(l);
            hi.push(h);
        }
        Self { n, m, a, cost: model.objective().to_vec(), lo, hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    Numeric,
    TimeLimit,
    /// The dual bound reached the cutoff before optimality.
    Cutoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    Row(usize),
    Col(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Nb {
    Lower,
    Upper,
    Free,
    ArtLower,
    ArtUpper,
    Fixed,
}

#[derive(Debug, Clone)]
pub struct Simplex<'a> {
    data: &'a LpData,
    n: usize,
    m: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// `m` constraint rows, then the working reduced costs (perturbed during
    /// the dual phase), then the true reduced costs.
    tab: Vec<f64>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    loc: Vec<Loc>,
    state: Vec<Nb>,
    x: Vec<f64>,
    prow: Vec<f64>,
    nz: Vec<usize>,
    weights: Vec<f64>,
    pub iterations: u64,
}

/// Deterministic value in `[0, 1)` for cost perturbation.
fn unit_hash(j: usize) -> f64 {
    let mut z = (j as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

impl<'a> Simplex<'a> {
    pub fn new(data: &'a LpData) -> Self {
        let (n, m) = (data.n, data.m);
        let mut s = Self {
            data,
            n,
            m,
            lo: data.lo.clone(),
            hi: data.hi.clone(),
            tab: vec![0.0; (m + 2) * n],
            basic: Vec::new(),
            nonbasic: Vec::new(),
            loc: Vec::new(),
            state: Vec::new(),
            x: vec![0.0; n + m],
            prow: vec![0.0; n],
            nz: Vec::with_capacity(n),
            weights: Vec::with_capacity(m),
            iterations: 0,
        };
        s.reset_basis();
        s
    }

    /// Back to the all-logical basis; bounds are left untouched.
    pub fn reset_basis(&mut self) {
        let (n, m) = (self.n, self.m);
        self.tab[..m * n].copy_from_slice(&self.data.a);
        self.tab[m * n..(m + 1) * n].copy_from_slice(&self.data.cost);
        self.tab[(m + 1) * n..].copy_from_slice(&self.data.cost);
        self.basic = (n..n + m).collect();
        self.nonbasic = (0..n).collect();
        self.loc = (0..n).map(Loc::Col).chain((0..m).map(Loc::Row)).collect();
        self.state = vec![Nb::Lower; n];
    }

    pub fn num_structural(&self) -> usize {
        self.n
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        debug_assert!(var < self.n);
        self.lo[var] = lo;
        self.hi[var] = hi;
    }

    pub fn set_structural_bounds(&mut self, lo: &[f64], hi: &[f64]) {
        self.lo[..self.n].copy_from_slice(lo);
        self.hi[..self.n].copy_from_slice(hi);
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lo[var], self.hi[var])
    }

    /// Structural variable values of the last solve.
    pub fn values(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub fn objective(&self) -> f64 {
        self.data.cost.iter().zip(&self.x[..self.n]).map(|(c, x)| c * x).sum()
    }

    /// Nonbasic structural columns resting on a bound, as
    /// `(column, reduced cost, at upper bound)`, after an optimal solve.
    pub fn bound_reduced_costs(&self) -> Vec<(usize, f64, bool)> {
        let (n, m) = (self.n, self.m);
        let d = &self.tab[(m + 1) * n..];
        (0..n)
            .filter_map(|k| {
                let v = self.nonbasic[k];
                match self.state[k] {
                    _ if v >= n => None,
                    Nb::Lower => Some((v, d[k], false)),
                    Nb::Upper => Some((v, d[k], true)),
                    _ => None,
                }
            })
            .collect()
    }

    /// Basic variable ids, row order.
    pub fn basis(&self) -> Vec<u32> {
        self.basic.iter().map(|&v| v as u32).collect()
    }

    /// Rebuilds the tableau for the given basis from the original matrix.
    /// Returns false (leaving the all-logical basis) if the basis is singular.
    pub fn load_basis(&mut self, basis: &[u32]) -> bool {
        self.reset_basis();
        if basis.len() != self.m {
            return false;
        }
        let n = self.n;
        let mut in_target = vec![false; n + self.m];
        for &v in basis {
            in_target[v as usize] = true;
        }
        for &v in basis {
            let v = v as usize;
            if v >= n {
                continue;
            }
            let Loc::Col(c) = self.loc[v] else { continue };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let bv = self.basic[i];
                if bv < n || in_target[bv] {
                    continue;
                }
                let t = self.tab[i * n + c].abs();
                if t > best.map_or(PIVOT_TOL, |b| b.1) {
                    best = Some((i, t));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => {
                    self.reset_basis();
                    return false;
                }
            }
        }
        true
    }

    fn nonbasic_value(&self, k: usize) -> f64 {
        let v = self.nonbasic[k];
        match self.state[k] {
            Nb::Lower | Nb::Fixed => self.lo[v],
            Nb::Upper => self.hi[v],
            Nb::Free => 0.0,
            Nb::ArtLower => -BIG,
            Nb::ArtUpper => BIG,
        }
    }

    /// Perturbs the costs of nonbasic boxed structural columns so that the
    /// dual phase is not stalled by zero reduced costs. Each shift has the
    /// sign of the column's reduced cost (or of the bound it rests on), so
    /// the current basis stays dual feasible.
    fn perturb(&mut self) {
        let (n, m) = (self.n, self.m);
        let (work, truth) = self.tab[m * n..].split_at_mut(n);
        work.copy_from_slice(truth);
        for k in 0..n {
            let j = self.nonbasic[k];
            if j >= n {
                continue;
            }
            let (lo, hi) = (self.lo[j], self.hi[j]);
            if !(lo.is_finite() && hi.is_finite()) || lo == hi {
                continue;
            }
            let mag = (PERTURB + PERTURB_REL * self.data.cost[j].abs()) * (1.0 + unit_hash(j));
            let d = work[k];
            let up = if d.abs() > DUAL_TOL { d < 0.0 } else { self.state[k] == Nb::Upper };
            work[k] += if up { -mag } else { mag };
        }
    }

    fn unperturb(&mut self) {
        let (n, m) = (self.n, self.m);
        self.tab.copy_within((m + 1) * n..(m + 2) * n, m * n);
    }

    /// Lower bound on the true objective over the current bounds, valid for
    /// any basis: `c.x` equals the true reduced costs times the nonbasics.
    fn dual_bound(&self) -> f64 {
        let (n, m) = (self.n, self.m);
        let d = &self.tab[(m + 1) * n..];
        let mut bound = 0.0;
        for k in 0..n {
            let dk = d[k];
            if dk == 0.0 {
                continue;
            }
            let v = self.nonbasic[k];
            bound += if dk > 0.0 { dk * self.lo[v] } else { dk * self.hi[v] };
        }
        if bound.is_nan() {
            f64::NEG_INFINITY
        } else {
            bound
        }
    }

    /// Places every nonbasic variable at its dual-feasible bound.
    fn prepare_nonbasics(&mut self) {
        let (n, m) = (self.n, self.m);
        for k in 0..n {
            let v = self.nonbasic[k];
            let d = self.tab[m * n + k];
            let (lo, hi) = (self.lo[v], self.hi[v]);
            let lo_ok = lo.is_finite();
            let hi_ok = hi.is_finite();
            self.state[k] = if lo == hi {
                Nb::Fixed
            } else if d > DUAL_TOL {
                if lo_ok {
                    Nb::Lower
                } else {
                    Nb::ArtLower
                }
            } else if d < -DUAL_TOL {
                if hi_ok {
                    Nb::Upper
                } else {
                    Nb::ArtUpper
                }
            } else {
                match self.state[k] {
                    Nb::Lower if lo_ok => Nb::Lower,
                    Nb::Upper if hi_ok => Nb::Upper,
                    _ if lo_ok => Nb::Lower,
                    _ if hi_ok => Nb::Upper,
                    _ => Nb::Free,
                }
            };
            self.x[v] = self.nonbasic_value(k);
        }
        self.refresh_basics();
    }

    fn refresh_basics(&mut self) {
        let n = self.n;
        self.nz.clear();
        for k in 0..n {
            if self.x[self.nonbasic[k]] != 0.0 {
                self.nz.push(k);
            }
        }
        for i in 0..self.m {
            let row = &self.tab[i * n..(i + 1) * n];
            let mut s = 0.0;
            for &k in &self.nz {
                s += row[k] * self.x[self.nonbasic[k]];
            }
            self.x[self.basic[i]] = s;
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let n = self.n;
        let p = self.tab[r * n + c];
        let inv = 1.0 / p;
        {
            let row = &mut self.tab[r * n..(r + 1) * n];
            for v in row.iter_mut() {
                *v = -*v * inv;
                if v.abs() < DROP_TOL {
                    *v = 0.0;
                }
            }
            row[c] = inv;
            self.prow.copy_from_slice(row);
        }
        self.nz.clear();
        for k in 0..n {
            if k != c && self.prow[k] != 0.0 {
                self.nz.push(k);
            }
        }
        let dense = self.nz.len() * 3 > n;
        for i in 0..self.m + 2 {
            if i == r {
                continue;
            }
            let row = &mut self.tab[i * n..(i + 1) * n];
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            if dense {
                for (t, p) in row.iter_mut().zip(&self.prow) {
                    *t += f * p;
                }
            } else {
                for &k in &self.nz {
                    row[k] += f * self.prow[k];
                }
            }
            row[c] = f * inv;
        }
        let leaving = self.basic[r];
        let entering = self.nonbasic[c];
        self.basic[r] = entering;
        self.nonbasic[c] = leaving;
        self.loc[entering] = Loc::Row(r);
        self.loc[leaving] = Loc::Col(c);
    }

    fn infeasibility(&self, v: usize) -> f64 {
        let x = self.x[v];
        if x < self.lo[v] - PRIMAL_TOL {
            self.lo[v] - x
        } else if x > self.hi[v] + PRIMAL_TOL {
            x - self.hi[v]
        } else {
            0.0
        }
    }

    /// Largest mismatch between logical variables and `A x`, and largest bound
    /// violation of any variable.
    fn residuals(&self) -> (f64, f64) {
        let n = self.n;
        let mut row_err: f64 = 0.0;
        for i in 0..self.m {
            let act: f64 = self.data.a[i * n..(i + 1) * n]
                .iter()
                .zip(&self.x[..n])
                .map(|(a, x)| a * x)
                .sum();
            row_err = row_err.max((act - self.x[n + i]).abs() / (1.0 + act.abs()));
        }
        let bound_err = (0..n + self.m).map(|v| self.infeasibility(v)).fold(0.0, f64::max);
        (row_err, bound_err)
    }

    /// Solves from the current basis: dual simplex on perturbed costs, then
    /// primal simplex on the true costs to remove what the perturbation left.
    ///
    /// With a `cutoff`, the run stops as soon as a valid lower bound on the
    /// optimum reaches `cutoff`.
    pub fn solve(&mut self, deadline: Option<Instant>, cutoff: Option<f64>) -> LpStatus {
        let limit = 50 * (self.n + self.m) as u64 + 1000;
        let mut reinverted = false;
        loop {
            self.perturb();
            let status = self.dual_loop(deadline, cutoff, limit);
            self.unperturb();
            let status = match status {
                LpStatus::Optimal => self.primal_loop(deadline, limit),
                other => other,
            };
            if status != LpStatus::Optimal {
                return status;
            }
            let (row_err, bound_err) = self.residuals();
            if row_err <= 1e-7 && bound_err <= 1e-7 {
                return LpStatus::Optimal;
            }
            if reinverted {
                log::warn!("simplex residuals {row_err:e}/{bound_err:e} after reinversion");
                return LpStatus::Numeric;
            }
            reinverted = true;
            let basis = self.basis();
            if !self.load_basis(&basis) {
                self.reset_basis();
            }
        }
    }

    fn dual_loop(&mut self, deadline: Option<Instant>, cutoff: Option<f64>, limit: u64) -> LpStatus {
        let (n, m) = (self.n, self.m);
        self.prepare_nonbasics();
        self.weights.clear();
        self.weights.resize(m, 1.0);
        let mut degenerate = 0u32;
        let mut bland = false;
        let mut local_iters = 0u64;
        let mut fresh = true;
        loop {
            if local_iters.is_multiple_of(32) {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        return LpStatus::TimeLimit;
                    }
                }
            }
            if local_iters > limit {
                return LpStatus::IterationLimit;
            }
            if local_iters > 0 && local_iters.is_multiple_of(REFRESH_EVERY) {
                self.refresh_basics();
                fresh = true;
            }
            if let Some(cut) = cutoff {
                if local_iters.is_multiple_of(8) && self.dual_bound() >= cut {
                    return LpStatus::Cutoff;
                }
            }

            // leaving row (dual devex pricing)
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let v = self.basic[i];
                let inf = self.infeasibility(v);
                if inf <= 0.0 {
                    continue;
                }
                let score = inf * inf / self.weights[i];
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        if bland {
                            v < self.basic[r]
                        } else {
                            score > best
                        }
                    }
                };
                if better {
                    leave = Some((i, score));
                }
            }
            let Some((r, _)) = leave else {
                // incremental updates drift, so confirm optimality on recomputed values
                if !fresh {
                    self.refresh_basics();
                    fresh = true;
                    continue;
                }
                if self.release_artificials() {
                    local_iters += 1;
                    continue;
                }
                if self.state.iter().any(|s| matches!(s, Nb::ArtLower | Nb::ArtUpper)) {
                    return LpStatus::Unbounded;
                }
                return LpStatus::Optimal;
            };
            let lv = self.basic[r];
            let up = self.x[lv] < self.lo[lv];
            let target = if up { self.lo[lv] } else { self.hi[lv] };
            let dir = if up { 1.0 } else { -1.0 };

            // dual ratio test (Harris two-pass, Bland when cycling)
            let row = &self.tab[r * n..(r + 1) * n];
            let dvec = &self.tab[m * n..(m + 1) * n];
            let allowed = |k: usize, t: f64| match self.state[k] {
                Nb::Fixed => false,
                Nb::Lower | Nb::ArtLower => dir * t > 0.0,
                Nb::Upper | Nb::ArtUpper => dir * t < 0.0,
                Nb::Free => true,
            };
            let mut enter: Option<usize> = None;
            if bland {
                let mut best = f64::INFINITY;
                for k in 0..n {
                    let t = row[k];
                    if t.abs() < PIVOT_TOL || !allowed(k, t) {
                        continue;
                    }
                    let ratio = dvec[k].abs() / t.abs();
                    let better = match enter {
                        None => true,
                        Some(e) => {
                            ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.nonbasic[k] < self.nonbasic[e])
                        }
                    };
                    if better {
                        best = ratio;
                        enter = Some(k);
                    }
                }
            } else {
                let mut theta_max = f64::INFINITY;
                for k in 0..n {
                    let t = row[k];
                    if t.abs() < PIVOT_TOL || !allowed(k, t) {
                        continue;
                    }
                    theta_max = theta_max.min((dvec[k].abs() + DUAL_TOL) / t.abs());
                }
                if theta_max.is_finite() {
                    let mut best_t = 0.0;
                    for k in 0..n {
                        let t = row[k];
                        if t.abs() < PIVOT_TOL || !allowed(k, t) {
                            continue;
                        }
                        if dvec[k].abs() / t.abs() <= theta_max && t.abs() > best_t {
                            best_t = t.abs();
                            enter = Some(k);
                        }
                    }
                }
            }
            let Some(c) = enter else {
                return LpStatus::Infeasible;
            };

            if dvec[c].abs() <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_SWITCH {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }

            // primal step: move entering so that the leaving variable hits its bound
            let t_rc = self.tab[r * n + c];
            let w_r = self.weights[r];
            for i in 0..m {
                let a = self.tab[i * n + c];
                if i != r && a != 0.0 {
                    let ratio = a / t_rc;
                    self.weights[i] = self.weights[i].max(ratio * ratio * w_r);
                }
            }
            self.weights[r] = (w_r / (t_rc * t_rc)).max(1.0);
            let delta = (target - self.x[lv]) / t_rc;
            self.step(c, delta);
            self.x[lv] = target;
            self.pivot(r, c);
            self.state[c] = if up { Nb::Lower } else { Nb::Upper };
            if self.lo[lv] == self.hi[lv] {
                self.state[c] = Nb::Fixed;
            }
            self.iterations += 1;
            local_iters += 1;
            fresh = false;
        }
    }

    /// Moves nonbasic column `c` by `delta` and updates the basics.
    fn step(&mut self, c: usize, delta: f64) {
        let n = self.n;
        let ev = self.nonbasic[c];
        self.x[ev] += delta;
        for i in 0..self.m {
            let t = self.tab[i * n + c];
            if t != 0.0 {
                let b = self.basic[i];
                self.x[b] += t * delta;
            }
        }
    }

    /// Bounded primal simplex from a primal feasible basis.
    fn primal_loop(&mut self, deadline: Option<Instant>, limit: u64) -> LpStatus {
        let (n, m) = (self.n, self.m);
        let mut degenerate = 0u32;
        let mut bland = false;
        let mut local_iters = 0u64;
        loop {
            if local_iters.is_multiple_of(32) {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        return LpStatus::TimeLimit;
                    }
                }
            }
            if local_iters > limit {
                return LpStatus::IterationLimit;
            }

            // entering column and its direction
            let dvec = &self.tab[m * n..(m + 1) * n];
            let mut enter: Option<(usize, f64, f64)> = None;
            for k in 0..n {
                let d = dvec[k];
                let dir = match self.state[k] {
                    Nb::Lower if d < -DUAL_TOL => 1.0,
                    Nb::Upper if d > DUAL_TOL => -1.0,
                    Nb::Free if d.abs() > DUAL_TOL => -d.signum(),
                    _ => continue,
                };
                let better = match enter {
                    None => true,
                    Some((e, _, best)) => {
                        if bland {
                            self.nonbasic[k] < self.nonbasic[e]
                        } else {
                            d.abs() > best
                        }
                    }
                };
                if better {
                    enter = Some((k, dir, d.abs()));
                }
            }
            let Some((c, dir, _)) = enter else {
                self.refresh_basics();
                return LpStatus::Optimal;
            };
            let ev = self.nonbasic[c];

            // primal ratio test (Harris two-pass)
            let rate = |i: usize| self.tab[i * n + c] * dir;
            let room = |i: usize, slack: f64| {
                let a = rate(i);
                let b = self.basic[i];
                if a > 0.0 {
                    (self.hi[b] + slack - self.x[b]) / a
                } else {
                    (self.x[b] - self.lo[b] + slack) / -a
                }
            };
            let mut theta_max = f64::INFINITY;
            for i in 0..m {
                if rate(i).abs() >= PIVOT_TOL {
                    theta_max = theta_max.min(room(i, PRIMAL_TOL));
                }
            }
            let mut leave: Option<usize> = None;
            if theta_max.is_finite() {
                let mut best = 0.0;
                let mut best_ratio = f64::INFINITY;
                for i in 0..m {
                    let a = rate(i).abs();
                    if a < PIVOT_TOL {
                        continue;
                    }
                    let ratio = room(i, 0.0);
                    if ratio > theta_max {
                        continue;
                    }
                    let better = if bland {
                        ratio < best_ratio - 1e-12
                            || (ratio <= best_ratio + 1e-12
                                && leave.is_some_and(|l| self.basic[i] < self.basic[l]))
                    } else {
                        a > best
                    };
                    if leave.is_none() || better {
                        best = a;
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let range = self.hi[ev] - self.lo[ev];
            let theta_leave = leave.map_or(f64::INFINITY, |i| room(i, 0.0).max(0.0));
            if range <= theta_leave {
                if !range.is_finite() {
                    return LpStatus::Unbounded;
                }
                // bound flip without a basis change
                self.step(c, dir * range);
                self.x[ev] = if dir > 0.0 { self.hi[ev] } else { self.lo[ev] };
                self.state[c] = if dir > 0.0 { Nb::Upper } else { Nb::Lower };
            } else {
                let r = leave.expect("finite ratio has a leaving row");
                let lv = self.basic[r];
                let to_upper = rate(r) > 0.0;
                self.step(c, dir * theta_leave);
                self.x[lv] = if to_upper { self.hi[lv] } else { self.lo[lv] };
                self.pivot(r, c);
                self.state[c] = if self.lo[lv] == self.hi[lv] {
                    Nb::Fixed
                } else if to_upper {
                    Nb::Upper
                } else {
                    Nb::Lower
                };
            }
            if theta_leave.min(range) <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_SWITCH {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.iterations += 1;
            local_iters += 1;
        }
    }

    /// Moves artificial-bound nonbasics with zero reduced cost back to a real
    /// bound (or zero when free). True if anything moved.
    fn release_artificials(&mut self) -> bool {
        let (n, m) = (self.n, self.m);
        let mut moved = false;
        for k in 0..n {
            if !matches!(self.state[k], Nb::ArtLower | Nb::ArtUpper) {
                continue;
            }
            if self.tab[m * n + k].abs() > DUAL_TOL {
                continue;
            }
            let v = self.nonbasic[k];
            self.state[k] = if self.lo[v].is_finite() {
                Nb::Lower
            } else if self.hi[v].is_finite() {
                Nb::Upper
            } else {
                Nb::Free
            };
            self.x[v] = self.nonbasic_value(k);
            moved = true;
        }
        if moved {
            self.refresh_basics();
        }
        moved
    }
}
