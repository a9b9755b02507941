//! Waiting-time and response-time distributions of type-2 jobs under Nudge-M.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, RowVector, Vector};
use crate::phtype::JobMix;
use crate::swap::{self, chain_size, SwapChain};

/// Block offsets of the extra-wait generator: block `k` (1-based) tracks the
/// work of the `k`-th job that passes the tagged job, with counters in `W_{M-k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtraWaitLayout {
    pub m: usize,
    pub n1: usize,
    offsets: Vec<usize>,
}

impl ExtraWaitLayout {
    pub fn new(m: usize, n1: usize) -> Self {
        let mut offsets = Vec::with_capacity(m + 1);
        let mut acc = 0;
        for k in 1..=m {
            offsets.push(acc);
            acc += chain_size(m - k) * n1;
        }
        offsets.push(acc);
        Self { m, n1, offsets }
    }

    /// First index of block `k`, `1 <= k <= m`.
    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k - 1]
    }

    pub fn block_size(&self, k: usize) -> usize {
        chain_size(self.m - k) * self.n1
    }

    pub fn total(&self) -> usize {
        self.offsets[self.m]
    }
}

/// Phase-type representation `(gamma(s), Q)` of the extra wait caused by passing type-1 jobs.
#[derive(Debug, Clone)]
pub struct ExtraWaitModel {
    chain: SwapChain,
    layout: ExtraWaitLayout,
    q: Matrix,
    alpha1: RowVector,
}

impl ExtraWaitModel {
    pub fn new(mix: &JobMix, m: usize) -> Result<Self> {
        let chain = SwapChain::new(mix, m)?;
        let s1 = mix.ph1().generator();
        let n1 = s1.nrows();
        let layout = ExtraWaitLayout::new(m, n1);
        let mut q = Matrix::zeros(layout.total(), layout.total());
        let exit_alpha = linalg::col_matrix(mix.ph1().exit()) * linalg::row_matrix(mix.ph1().alpha());
        for k in 1..=m {
            let diag = linalg::kron_sum(chain.rates(m - k), s1)?;
            let o = layout.offset(k);
            q.view_mut((o, o), (diag.nrows(), diag.ncols())).copy_from(&diag);
            if k < m {
                let up = linalg::kron_prod(&swap::selector(m - k), &exit_alpha);
                let o2 = layout.offset(k + 1);
                q.view_mut((o, o2), (up.nrows(), up.ncols())).copy_from(&up);
            }
        }
        Ok(Self { chain, layout, q, alpha1: mix.ph1().alpha().clone() })
    }

    pub fn generator(&self) -> &Matrix {
        &self.q
    }

    pub fn layout(&self) -> &ExtraWaitLayout {
        &self.layout
    }

    /// `gamma(s) = ((e_1 e^{W_M s} U_M) ⊗ alpha_1, 0)`.
    pub fn initial(&self, s: f64) -> RowVector {
        let m = self.layout.m;
        let counts = self.chain.state_at(s);
        let shifted = counts.columns(m + 1, chain_size(m - 1)).into_owned();
        let head = linalg::kron_prod(&linalg::row_matrix(&shifted), &linalg::row_matrix(&self.alpha1));
        let mut g = RowVector::zeros(self.layout.total());
        g.columns_mut(0, head.ncols()).copy_from(&head.row(0));
        g
    }

    /// `P[W_extra(s) > t] = gamma(s) e^{Qt} 1`.
    pub fn ccdf(&self, s: f64, t: f64) -> Result<f64> {
        check_time(s)?;
        check_time(t)?;
        let e = linalg::expm(&self.q, t)?.value;
        Ok((self.initial(s) * e * linalg::ones(self.layout.total()))[0])
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Input(format!("time {t} must be finite and nonnegative")));
    }
    Ok(())
}

/// `P[W_extra(s) > t]` for Nudge-M with window `m`.
pub fn extra_wait_ccdf(mix: &JobMix, m: usize, s: f64, t: f64) -> Result<f64> {
    ExtraWaitModel::new(mix, m)?.ccdf(s, t)
}

/// Matrix representation of the type-2 waiting time.
#[derive(Debug, Clone)]
pub struct W2Model {
    t_m: Matrix,
    v2: Vector,
    init: RowVector,
    /// Workload block size `|W_M| n`.
    head: usize,
    lambda: f64,
    alpha2: RowVector,
    s2: Matrix,
}

impl W2Model {
    pub fn new(mix: &JobMix, m: usize) -> Result<Self> {
        let extra = ExtraWaitModel::new(mix, m)?;
        let t = mix.workload_generator();
        let n = t.nrows();
        let wm = extra.chain.rates(m);
        let nw = wm.nrows();
        let head = nw * n;
        let nq = extra.layout.total();
        let mut t_m = Matrix::zeros(head + nq, head + nq);
        t_m.view_mut((0, 0), (head, head)).copy_from(&linalg::kron_sum(wm, t)?);
        let ones_alpha1 = linalg::col_matrix(&linalg::ones(n)) * linalg::row_matrix(mix.ph1().alpha());
        let link = linalg::kron_prod(&swap::selector(m), &ones_alpha1);
        t_m.view_mut((0, head), (link.nrows(), link.ncols())).copy_from(&link);
        t_m.view_mut((head, head), (nq, nq)).copy_from(extra.generator());

        let tail = linalg::solve_vec(&(-t.clone()), &linalg::ones(n))?;
        let mut v2 = Vector::from_element(head + nq, 1.0);
        for w in 0..nw {
            v2.rows_mut(w * n, n).copy_from(&tail);
        }
        let mut init = RowVector::zeros(head + nq);
        init.columns_mut(0, n).copy_from(&(mix.beta() * mix.lambda()));
        Ok(Self {
            t_m,
            v2,
            init,
            head,
            lambda: mix.lambda(),
            alpha2: mix.ph2().alpha().clone(),
            s2: mix.ph2().generator().clone(),
        })
    }

    pub fn generator(&self) -> &Matrix {
        &self.t_m
    }

    pub fn terminal(&self) -> &Vector {
        &self.v2
    }

    pub fn initial(&self) -> &RowVector {
        &self.init
    }

    /// Workload part of the formula, `(e_1 ⊗ lambda beta) e^{(W_M ⊕ T)t}(1_W ⊗ (-T)^{-1} 1)`.
    pub fn workload_part(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let a = self.t_m.view((0, 0), (self.head, self.head)).into_owned();
        let e = linalg::expm(&a, t)?.value;
        let init = self.init.columns(0, self.head).into_owned();
        let v = self.v2.rows(0, self.head).into_owned();
        Ok((init * e * v)[0])
    }

    /// `P[W_2 > t]`.
    pub fn w2_ccdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let e = linalg::expm(&self.t_m, t)?.value;
        Ok((&self.init * e * &self.v2)[0])
    }

    /// `P[R_2 > t]`.
    pub fn r2_ccdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let nt = self.t_m.nrows();
        let n2 = self.s2.nrows();
        let mut b = Matrix::zeros(nt + n2, nt + n2);
        b.view_mut((0, 0), (nt, nt)).copy_from(&self.t_m);
        let link = linalg::col_matrix(&(&self.t_m * &self.v2)) * linalg::row_matrix(&self.alpha2);
        b.view_mut((0, nt), (nt, n2)).copy_from(&link);
        b.view_mut((nt, nt), (n2, n2)).copy_from(&self.s2);
        let e = linalg::expm(&b, t)?.value;
        let w2 = (&self.init * e.view((0, 0), (nt, nt)) * &self.v2)[0];
        let conv = (&self.init * e.view((0, nt), (nt, n2)) * linalg::ones(n2))[0];
        let e2 = linalg::expm(&self.s2, t)?.value;
        let service = (1.0 - self.lambda) * (&self.alpha2 * e2 * linalg::ones(n2))[0];
        Ok(w2 + service - conv)
    }
}

impl W2Model {
    /// `w2_ccdf` over a grid of times.
    pub fn w2_ccdf_many(&self, times: &[f64]) -> Result<Vec<f64>> {
        let rows = linalg::row_orbit(&self.init, &self.t_m, times)?;
        Ok(rows.iter().map(|r| (r * &self.v2)[0]).collect())
    }

    /// `r2_ccdf` over a grid of times.
    pub fn r2_ccdf_many(&self, times: &[f64]) -> Result<Vec<f64>> {
        let nt = self.t_m.nrows();
        let n2 = self.s2.nrows();
        let mut b = Matrix::zeros(nt + n2, nt + n2);
        b.view_mut((0, 0), (nt, nt)).copy_from(&self.t_m);
        let link = linalg::col_matrix(&(&self.t_m * &self.v2)) * linalg::row_matrix(&self.alpha2);
        b.view_mut((0, nt), (nt, n2)).copy_from(&link);
        b.view_mut((nt, nt), (n2, n2)).copy_from(&self.s2);
        let mut start = RowVector::zeros(nt + n2);
        start.columns_mut(0, nt).copy_from(&self.init);
        let joint = linalg::row_orbit(&start, &b, times)?;
        let own = linalg::row_orbit(&self.alpha2, &self.s2, times)?;
        Ok(joint
            .iter()
            .zip(&own)
            .map(|(r, o)| (r.columns(0, nt) * &self.v2)[0] + (1.0 - self.lambda) * o.sum() - r.columns(nt, n2).sum())
            .collect())
    }
}

/// `P[W_2 > t]` under Nudge-M; window 0 is FCFS.
pub fn w2_ccdf(mix: &JobMix, m: usize, t: f64) -> Result<f64> {
    if m == 0 {
        return swap::workload_ccdf(mix, t);
    }
    W2Model::new(mix, m)?.w2_ccdf(t)
}

/// `P[R_2 > t]` under Nudge-M; window 0 is FCFS.
pub fn r2_ccdf(mix: &JobMix, m: usize, t: f64) -> Result<f64> {
    if m == 0 {
        return fcfs_response_ccdf(mix, mix.ph2().alpha(), mix.ph2().generator(), t);
    }
    W2Model::new(mix, m)?.r2_ccdf(t)
}

/// FCFS response-time tail of a job with size `PH(alpha_i, S_i)`: the workload
/// found on arrival plus the job's own size.
pub fn fcfs_response_ccdf(mix: &JobMix, alpha_i: &RowVector, s_i: &Matrix, t: f64) -> Result<f64> {
    check_time(t)?;
    let tg = mix.workload_generator();
    let n = tg.nrows();
    let ni = s_i.nrows();
    // [[T, 1 alpha_i], [0, S_i]] convolves the workload density lambda beta e^{Ts} 1 with the size tail.
    let mut b = Matrix::zeros(n + ni, n + ni);
    b.view_mut((0, 0), (n, n)).copy_from(tg);
    b.view_mut((0, n), (n, ni)).copy_from(&(linalg::col_matrix(&linalg::ones(n)) * linalg::row_matrix(alpha_i)));
    b.view_mut((n, n), (ni, ni)).copy_from(s_i);
    let e = linalg::expm(&b, t)?.value;
    let lb = mix.beta() * mix.lambda();
    let tail = linalg::solve_vec(&(-tg.clone()), &linalg::ones(n))?;
    let z = (&lb * e.view((0, 0), (n, n)) * tail)[0];
    let conv = (&lb * e.view((0, n), (n, ni)) * linalg::ones(ni))[0];
    let own = (1.0 - mix.lambda()) * (alpha_i * linalg::expm(s_i, t)?.value * linalg::ones(ni))[0];
    Ok(z + own + conv)
}

/// `fcfs_response_ccdf` over a grid of times.
pub fn fcfs_response_ccdf_many(mix: &JobMix, alpha_i: &RowVector, s_i: &Matrix, times: &[f64]) -> Result<Vec<f64>> {
    let tg = mix.workload_generator();
    let n = tg.nrows();
    let ni = s_i.nrows();
    let mut b = Matrix::zeros(n + ni, n + ni);
    b.view_mut((0, 0), (n, n)).copy_from(tg);
    b.view_mut((0, n), (n, ni)).copy_from(&(linalg::col_matrix(&linalg::ones(n)) * linalg::row_matrix(alpha_i)));
    b.view_mut((n, n), (ni, ni)).copy_from(s_i);
    let tail = linalg::solve_vec(&(-tg.clone()), &linalg::ones(n))?;
    let mut start = RowVector::zeros(n + ni);
    start.columns_mut(0, n).copy_from(&(mix.beta() * mix.lambda()));
    let joint = linalg::row_orbit(&start, &b, times)?;
    let own = linalg::row_orbit(alpha_i, s_i, times)?;
    Ok(joint
        .iter()
        .zip(&own)
        .map(|(r, o)| (r.columns(0, n) * &tail)[0] + r.columns(n, ni).sum() + (1.0 - mix.lambda()) * o.sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phtype::SizeShape;
    use approx::assert_relative_eq;

    fn fig5a() -> JobMix {
        JobMix::from_ratio(2.0 / 3.0, 4.0, 0.7, SizeShape::Exp, SizeShape::Exp).unwrap()
    }

    #[test]
    fn layout_sizes() {
        let l = ExtraWaitLayout::new(3, 2);
        assert_eq!(l.total(), (6 + 3 + 1) * 2);
        assert_eq!(l.offset(2), 12);
        assert_eq!(l.block_size(3), 2);
    }

    #[test]
    fn extra_wait_edges() {
        let mix = fig5a();
        let model = ExtraWaitModel::new(&mix, 3).unwrap();
        assert!(linalg::is_subgenerator(model.generator()));
        assert_eq!(model.ccdf(0.0, 1.0).unwrap(), 0.0);
        let chain = SwapChain::new(&mix, 3).unwrap();
        for s in [0.5, 2.0, 7.0] {
            let p0 = swap::swap_pmf(&chain, s).unwrap().probs[0];
            assert_relative_eq!(model.ccdf(s, 0.0).unwrap(), 1.0 - p0, epsilon = 1e-12);
        }
    }

    #[test]
    fn w2_starts_at_load() {
        let mix = fig5a();
        for m in [1, 3] {
            let model = W2Model::new(&mix, m).unwrap();
            assert_relative_eq!(model.w2_ccdf(0.0).unwrap(), 0.7, epsilon = 1e-10);
            assert_relative_eq!(model.r2_ccdf(0.0).unwrap(), 1.0, epsilon = 1e-10);
            for t in [0.3, 2.0, 9.0] {
                assert_relative_eq!(
                    model.workload_part(t).unwrap(),
                    swap::workload_ccdf(&mix, t).unwrap(),
                    epsilon = 1e-10
                );
                assert!(model.r2_ccdf(t).unwrap() >= model.w2_ccdf(t).unwrap());
            }
        }
    }

    #[test]
    fn fcfs_response_starts_at_one() {
        let mix = fig5a();
        assert_relative_eq!(
            fcfs_response_ccdf(&mix, mix.ph1().alpha(), mix.ph1().generator(), 0.0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }
}
