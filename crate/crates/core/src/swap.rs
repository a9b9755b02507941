//! Number of times a tagged type-2 job is passed under Nudge-M, and the
//! resulting mean response time.

use crate::asymptotics;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, RowVector, Vector};
use crate::phtype::JobMix;

/// Arrival-counting chains `W_0 .. W_M` and the per-pass transfer matrices.
///
/// Chain `W_k` lives on `{(i, j) : i + j <= k}` in lexicographic order (`i` major);
/// `i` counts type-1 and `j` type-2 arrivals, and states with `i + j = k` absorb.
#[derive(Debug, Clone)]
pub struct SwapChain {
    m: usize,
    lambda: f64,
    p: f64,
    w: Vec<Matrix>,
    /// `steps[l] = (U_{M-l} ⊗ alpha1)(-(W_{M-l-1} ⊕ S1))^{-1}(I ⊗ s1*)`.
    steps: Vec<Matrix>,
}

/// Number of states of `W_k`.
pub fn chain_size(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Position of `(i, j)` in the state list of `W_k`.
pub fn state_index(k: usize, i: usize, j: usize) -> usize {
    i * (k + 1) - i * i.saturating_sub(1) / 2 + j
}

impl SwapChain {
    /// Builds the chains for window `m >= 1`.
    ///
    /// All inverses are corners of one inverse of size `|W_{M-1}| n1`, so the
    /// cost is `O(M^6 n1^3)`.
    pub fn new(mix: &JobMix, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Input("swap chain needs a window of at least 1".into()));
        }
        let (lambda, p) = (mix.lambda(), mix.p());
        let w: Vec<Matrix> = (0..=m).map(|k| arrival_chain(k, lambda, p)).collect();
        let s1 = mix.ph1().generator();
        let n1 = s1.nrows();
        let alpha1 = linalg::row_matrix(mix.ph1().alpha());
        // W is upper triangular, so -(W ⊕ S1) is block upper triangular with n1 x n1 blocks and
        // every trailing principal block of its inverse is the inverse of the trailing block.
        let x = triangular_solve_exit(&w[m - 1], s1, mix.ph1().exit())?;
        let total = chain_size(m - 1);
        let mut steps = Vec::with_capacity(m);
        for l in 0..m {
            let k = m - l - 1;
            let size = chain_size(k);
            let off = total - size;
            let mut step = Matrix::zeros(chain_size(m - l), size);
            for c in 0..size {
                for col in 0..size {
                    let mut acc = 0.0;
                    for a in 0..n1 {
                        acc += alpha1[(0, a)] * x[((off + c) * n1 + a, off + col)];
                    }
                    step[(m - l + 1 + c, col)] = acc;
                }
            }
            steps.push(step);
        }
        Ok(Self { m, lambda, p, w, steps })
    }

    pub fn window(&self) -> usize {
        self.m
    }

    /// Rate matrix `W_k`.
    pub fn rates(&self, k: usize) -> &Matrix {
        &self.w[k]
    }

    /// Transfer matrix of the `l`-th pass.
    pub fn step(&self, l: usize) -> &Matrix {
        &self.steps[l]
    }

    /// Distribution `e_1 e^{W_M s}` of the arrival counts after time `s`, in closed form.
    pub fn state_at(&self, s: f64) -> RowVector {
        counts_at(self.m, self.lambda, self.p, s)
    }

    /// Vector whose contraction with `e_1 e^{W_M s}` gives `E[X_swap(s)]`.
    pub fn mean_vector(&self) -> Vector {
        let m = self.m;
        // Horner form of sum_k (prod_{l<k} step_l)(1 - F_{M-k}).
        let mut h = not_first(m - (m - 1));
        for k in (0..m - 1).rev() {
            h = not_first(m - k) + &self.steps[k] * h;
        }
        h
    }

    /// Vectors `c_k` with `P[X_swap(s) = k] = e_1 e^{W_M s} c_k` for `k < M`.
    pub fn pmf_vectors(&self) -> Vec<Vector> {
        let m = self.m;
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            let mut v = first(m - k);
            for l in (0..k).rev() {
                v = &self.steps[l] * v;
            }
            out.push(v);
        }
        out
    }
}

fn arrival_chain(k: usize, lambda: f64, p: f64) -> Matrix {
    let n = chain_size(k);
    let mut w = Matrix::zeros(n, n);
    for i in 0..=k {
        for j in 0..=(k - i) {
            if i + j == k {
                continue;
            }
            let r = state_index(k, i, j);
            w[(r, r)] = -lambda;
            w[(r, state_index(k, i + 1, j))] += lambda * p;
            w[(r, state_index(k, i, j + 1))] += lambda * (1.0 - p);
        }
    }
    w
}

/// `U_k = [0; I]`: drops the `k + 1` states without a type-1 arrival.
pub fn selector(k: usize) -> Matrix {
    let rows = chain_size(k);
    let cols = chain_size(k - 1);
    let mut u = Matrix::zeros(rows, cols);
    for c in 0..cols {
        u[(k + 1 + c, c)] = 1.0;
    }
    u
}

/// `F_k`: ones on the `k + 1` states without a type-1 arrival.
pub fn first(k: usize) -> Vector {
    Vector::from_fn(chain_size(k), |r, _| if r <= k { 1.0 } else { 0.0 })
}

fn not_first(k: usize) -> Vector {
    Vector::from_fn(chain_size(k), |r, _| if r <= k { 0.0 } else { 1.0 })
}

fn poisson_pmf(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut log = -x + n as f64 * x.ln();
    for j in 2..=n {
        log -= (j as f64).ln();
    }
    log.exp()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `e_1 e^{W_m s}`: Poisson count of arrivals split binomially by type, with
/// the mass of `m` or more arrivals on the absorbing layer.
pub fn counts_at(m: usize, lambda: f64, p: f64, s: f64) -> RowVector {
    let x = lambda * s;
    let mut out = RowVector::zeros(chain_size(m));
    let mut below = 0.0;
    for total in 0..m {
        let pn = poisson_pmf(total, x);
        below += pn;
        for i in 0..=total {
            out[state_index(m, i, total - i)] = pn * binomial(total, i) * p.powi(i as i32) * (1.0 - p).powi((total - i) as i32);
        }
    }
    let tail = (1.0 - below).max(0.0);
    for i in 0..=m {
        out[state_index(m, i, m - i)] = tail * binomial(m, i) * p.powi(i as i32) * (1.0 - p).powi((m - i) as i32);
    }
    out
}

/// Probabilities `P[X_swap(s) = k]`, `k = 0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapPmf {
    pub workload: f64,
    pub probs: Vec<f64>,
}

impl SwapPmf {
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }
}

/// Swap-count distribution of a type-2 job that finds workload `s`.
/// The product prefix is carried forward across `k`.
pub fn swap_pmf(chain: &SwapChain, s: f64) -> Result<SwapPmf> {
    if !(s >= 0.0) {
        return Err(Error::Input(format!("workload {s} must be nonnegative")));
    }
    let m = chain.m;
    let mut x = chain.state_at(s);
    let mut probs = Vec::with_capacity(m + 1);
    for k in 0..m {
        if k > 0 {
            x *= &chain.steps[k - 1];
        }
        probs.push((&x * first(m - k))[0]);
    }
    let rest = 1.0 - probs.iter().sum::<f64>();
    probs.push(rest.max(0.0));
    Ok(SwapPmf { workload: s, probs })
}

/// Pass-count pmf of a type-2 job whose workload on arrival lies in `[lo, hi]`,
/// averaged against the workload density `lambda beta e^{Ts} 1` on that band.
pub fn swap_pmf_in_band(mix: &JobMix, m: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    require_type2(mix)?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Input(format!("workload band [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    if m == 0 {
        return Ok(vec![1.0]);
    }
    let chain = SwapChain::new(mix, m)?;
    let t = mix.workload_generator().clone();
    let beta = mix.beta() * mix.lambda();
    let failure = std::cell::Cell::new(None);
    let density = |x: f64| -> f64 {
        match linalg::expm(&t, x) {
            Ok(e) => (&beta * e.value * linalg::ones(t.nrows()))[0],
            Err(err) => {
                failure.set(Some(err));
                0.0
            }
        }
    };
    let mass = quadrature::integrate(density, lo, hi, 1e-12).integral;
    let mut probs = Vec::with_capacity(m + 1);
    for c in chain.pmf_vectors() {
        let f = |x: f64| density(x) * (chain.state_at(x) * &c)[0];
        probs.push(quadrature::integrate(f, lo, hi, 1e-12).integral / mass);
    }
    if let Some(err) = failure.take() {
        return Err(err);
    }
    let rest = 1.0 - probs.iter().sum::<f64>();
    probs.push(rest.max(0.0));
    Ok(probs)
}

/// `E[X_swap(s)] = e_1 e^{W_M s} v_M`.
pub fn mean_swaps_at(chain: &SwapChain, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Input(format!("workload {s} must be nonnegative")));
    }
    Ok((chain.state_at(s) * chain.mean_vector())[0])
}

fn require_type2(mix: &JobMix) -> Result<()> {
    if mix.p() >= 1.0 {
        return Err(Error::Input("swap counts need type-2 jobs (p < 1)".into()));
    }
    Ok(())
}

/// Contracts `-lambda (beta ⊗ e_1)(T ⊕ W_M)^{-1}(1 ⊗ v)` for each column `v` of `rhs`.
fn workload_average(mix: &JobMix, chain: &SwapChain, rhs: &[Vector]) -> Result<Vec<f64>> {
    let w = chain.rates(chain.m);
    let t = mix.workload_generator();
    let n = t.nrows();
    let nw = w.nrows();
    let beta = mix.beta();
    let succ = successors(w);
    let mut out = Vec::with_capacity(rhs.len());
    // (T ⊕ W) x = 1 ⊗ v, solved state by state from the last one since W is upper triangular.
    let mut x = vec![Vector::zeros(n); nw];
    let mut cache: Vec<(f64, nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>)> = Vec::new();
    for v in rhs {
        for r in (0..nw).rev() {
            let mut b = Vector::from_element(n, v[r]);
            for &(r2, rate) in &succ[r] {
                b -= &x[r2] * rate;
            }
            let d = w[(r, r)];
            let lu = match cache.iter().position(|(k, _)| *k == d) {
                Some(i) => &cache[i].1,
                None => {
                    cache.push((d, (t + Matrix::identity(n, n) * d).lu()));
                    &cache.last().unwrap().1
                }
            };
            x[r] = lu.solve(&b).ok_or_else(|| Error::Numeric("singular block in workload average".into()))?;
        }
        out.push(-mix.lambda() * (&beta * &x[0])[0]);
    }
    Ok(out)
}

/// Nonzero off-diagonal entries of each row of an upper triangular matrix.
fn successors(w: &Matrix) -> Vec<Vec<(usize, f64)>> {
    (0..w.nrows())
        .map(|r| (r + 1..w.ncols()).filter(|&c| w[(r, c)] != 0.0).map(|c| (c, w[(r, c)])).collect())
        .collect()
}

/// `(-(W ⊕ S1))^{-1} (I ⊗ s1*)` for upper triangular `W`, by block back-substitution.
fn triangular_solve_exit(w: &Matrix, s1: &Matrix, exit1: &Vector) -> Result<Matrix> {
    let nw = w.nrows();
    let n1 = s1.nrows();
    let succ = successors(w);
    let mut x = Matrix::zeros(nw * n1, nw);
    let mut cache: Vec<(f64, Matrix)> = Vec::new();
    for r in (0..nw).rev() {
        // Block row r: -(W_rr I + S1) x_r - sum W_rr' x_r' = e_r ⊗ s1*.
        let mut b = Matrix::zeros(n1, nw);
        b.column_mut(r).copy_from(exit1);
        for &(r2, rate) in &succ[r] {
            b += x.rows(r2 * n1, n1) * rate;
        }
        let d = w[(r, r)];
        let inv = match cache.iter().position(|(k, _)| *k == d) {
            Some(i) => &cache[i].1,
            None => {
                cache.push((d, linalg::inverse(&(-(s1 + Matrix::identity(n1, n1) * d)))?));
                &cache.last().unwrap().1
            }
        };
        let xr = inv * b;
        x.rows_mut(r * n1, n1).copy_from(&xr);
    }
    Ok(x)
}

/// Mean number of times a type-2 job is passed under Nudge-M.
pub fn mean_swaps(mix: &JobMix, m: usize) -> Result<f64> {
    require_type2(mix)?;
    if m == 0 || mix.p() == 0.0 {
        return Ok(0.0);
    }
    let chain = SwapChain::new(mix, m)?;
    Ok(workload_average(mix, &chain, &[chain.mean_vector()])?[0])
}

/// Same quantity by integrating `E[X_swap(s)]` against the workload density
/// `lambda beta e^{Ts} 1` on `[0, 40/theta_z]`.
pub fn mean_swaps_quadrature(mix: &JobMix, m: usize) -> Result<f64> {
    require_type2(mix)?;
    if m == 0 || mix.p() == 0.0 {
        return Ok(0.0);
    }
    let chain = SwapChain::new(mix, m)?;
    let v = chain.mean_vector();
    let theta = asymptotics::decay_rate(mix)?.theta_z;
    let t = mix.workload_generator().clone();
    let beta = mix.beta();
    let lambda = mix.lambda();
    let failure = std::cell::Cell::new(None);
    let f = |s: f64| -> f64 {
        match linalg::expm(&t, s) {
            Ok(e) => lambda * (&beta * e.value * linalg::ones(t.nrows()))[0] * (chain.state_at(s) * &v)[0],
            Err(err) => {
                failure.set(Some(err));
                0.0
            }
        }
    };
    let upper = 40.0 / theta;
    // Split the range so each piece is resolved at the requested accuracy.
    let pieces = 8;
    let mut total = 0.0;
    for k in 0..pieces {
        let a = upper * k as f64 / pieces as f64;
        let b = upper * (k + 1) as f64 / pieces as f64;
        total += quadrature::integrate(f, a, b, 1e-12).integral;
    }
    if let Some(err) = failure.take() {
        return Err(err);
    }
    Ok(total)
}

/// Distribution of the number of passes of an arbitrary type-2 job (including the
/// jobs that find the system empty), `k = 0..M`.
pub fn overall_swap_pmf(mix: &JobMix, m: usize) -> Result<Vec<f64>> {
    require_type2(mix)?;
    if m == 0 {
        return Ok(vec![1.0]);
    }
    let chain = SwapChain::new(mix, m)?;
    let mut probs = workload_average(mix, &chain, &chain.pmf_vectors())?;
    probs[0] += 1.0 - mix.lambda();
    let rest = 1.0 - probs.iter().sum::<f64>();
    probs.push(rest.max(0.0));
    Ok(probs)
}

/// Mean response times of Nudge-M and FCFS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanResponse {
    pub nudge: f64,
    pub fcfs: f64,
}

impl MeanResponse {
    /// `1 - E[R_nudge] / E[R_fcfs]`.
    pub fn mtir(&self) -> f64 {
        mtir(self.nudge, self.fcfs)
    }
}

pub fn mtir(policy: f64, fcfs: f64) -> f64 {
    1.0 - policy / fcfs
}

/// FCFS mean response time `1 + lambda beta T^{-2} 1`.
pub fn fcfs_mean_response(mix: &JobMix) -> Result<f64> {
    let t = mix.workload_generator();
    let x = linalg::solve_vec(t, &linalg::ones(t.nrows()))?;
    let x = linalg::solve_vec(t, &x)?;
    Ok(1.0 + mix.lambda() * (mix.beta() * x)[0])
}

pub fn mean_response(mix: &JobMix, m: usize) -> Result<MeanResponse> {
    let fcfs = fcfs_mean_response(mix)?;
    if mix.p() >= 1.0 || mix.p() == 0.0 || m == 0 {
        return Ok(MeanResponse { nudge: fcfs, fcfs });
    }
    let swaps = mean_swaps(mix, m)?;
    let nudge = fcfs + (1.0 - mix.p()) * swaps * (mix.mean1() - mix.mean2());
    Ok(MeanResponse { nudge, fcfs })
}

/// Workload tail by both forms `lambda alpha e^{Tt}(-S)^{-1}1` and `lambda beta e^{Tt}(-T)^{-1}1`.
pub fn workload_ccdf_forms(mix: &JobMix, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::Input(format!("time {t} must be nonnegative")));
    }
    let gen = mix.workload_generator();
    let n = gen.nrows();
    let e = linalg::expm(gen, t)?.value;
    let one = linalg::ones(n);
    let via_s = linalg::solve_vec(&(-mix.generator().clone()), &one)?;
    let via_t = linalg::solve_vec(&(-gen.clone()), &one)?;
    let lambda = mix.lambda();
    let a = lambda * (mix.alpha() * &e * via_s)[0];
    let b = lambda * (mix.beta() * &e * via_t)[0];
    Ok((a, b))
}

/// `P[Z > t]`, the stationary workload tail of any work-conserving policy.
pub fn workload_ccdf(mix: &JobMix, t: f64) -> Result<f64> {
    let (a, b) = workload_ccdf_forms(mix, t)?;
    if (a - b).abs() > 1e-10 * a.abs().max(1e-300).max(1e-10) {
        return Err(Error::Numeric(format!("workload tail forms disagree: {a} vs {b}")));
    }
    Ok(b)
}

/// Non-preemptive priority with type-1 jobs served first: mean response time
/// from the mean residual work `lambda E[X^2] / 2`.
pub fn priority_mean_response(mix: &JobMix) -> Result<f64> {
    let lambda = mix.lambda();
    if !(lambda < 1.0) {
        return Err(Error::Instability { lambda });
    }
    let p = mix.p();
    let residual = lambda * mix.second_moment() / 2.0;
    let rho1 = lambda * p * mix.mean1();
    let w1 = residual / (1.0 - rho1);
    let w2 = residual / ((1.0 - rho1) * (1.0 - lambda));
    let mut r = 0.0;
    if p > 0.0 {
        r += p * (w1 + mix.mean1());
    }
    if p < 1.0 {
        r += (1.0 - p) * (w2 + mix.mean2());
    }
    Ok(r)
}
