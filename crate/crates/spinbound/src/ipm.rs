//! Dense interior-point solver for relaxations whose largest block
//! overwhelms the sparse conic path.
//!
//! The problem is the dual-standard-form semidefinite program
//!
//! ```text
//! minimize    q' y
//! subject to  M_b(y) = A0_b + sum_i y_i A_{i,b}   PSD for every block b,
//! ```
//!
//! solved by an infeasible-start primal-dual predictor-corrector method in
//! the HKM scaling. The multiplier `X_b` of block `b` doubles as the bound
//! certificate: whenever every `X_b` is PSD, the value
//! `-sum_b tr(A0_b X_b)` lower-bounds `q'y` over the feasible set up to
//! `sum_i |q_i - sum_b tr(A_{i,b} X_b)| |y_i|`, and that margin is deducted
//! from the reported certificate.
//!
//! The Schur complement is formed densely, which is viable because its side
//! length is the number of moment variables: symmetry reduction keeps that
//! small even when the block dimensions are large, exactly the regime where
//! the sparse path's per-cone dense Hessian becomes intractable.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::{
    cholesky_in_place, cholesky_in_place_scratch, LltRegularization,
};
use faer::linalg::matmul::matmul;
use faer::linalg::triangular_solve::{
    solve_lower_triangular_in_place, solve_upper_triangular_in_place,
};
use faer::prelude::ReborrowMut;
use faer::{Accum, MatMut, MatRef, Par};

use crate::error::{Error, Result};
use crate::moment::PsdBlock;

/// Convergence targets and iteration limits.
#[derive(Clone, Copy, Debug)]
pub struct IpmSettings {
    /// Maximum interior-point iterations.
    pub max_iter: u32,
    /// Relative complementarity-gap target.
    pub gap_tol: f64,
    /// Residual target for both the multiplier equations and `M(y) - S`.
    pub feas_tol: f64,
}

impl Default for IpmSettings {
    fn default() -> Self {
        IpmSettings {
            max_iter: 200,
            gap_tol: 1e-9,
            feas_tol: 1e-10,
        }
    }
}

/// Result of a dense solve. Objective values exclude any affine constant.
#[derive(Clone, Debug)]
pub struct IpmSolution {
    /// `q'y` at the final iterate.
    pub objective: f64,
    /// Margin-deducted dual objective `-sum_b tr(A0_b X_b)`: a valid lower
    /// bound on the optimum.
    pub certified: f64,
    /// Final variable vector (full length, zeros for untouched variables).
    pub y: Vec<f64>,
    /// Iterations taken.
    pub iterations: u32,
    /// Final `max_i |q_i - sum_b tr(A_{i,b} X_b)|`.
    pub primal_residual: f64,
    /// Final `max_b max-entry |M_b(y) - S_b|`.
    pub dual_residual: f64,
    /// Final complementarity gap per unit dimension.
    pub gap: f64,
    /// Whether every target tolerance was met (reduced accuracy otherwise).
    pub optimal: bool,
}

/// One placement of a variable inside a block, both orientations listed.
#[derive(Clone, Copy)]
struct Cell {
    p: u32,
    q: u32,
    c: f64,
}

/// A block compiled to dense constant part plus per-variable placements.
struct BlockData {
    dim: usize,
    /// Dense symmetric constant part, column-major.
    a0: Vec<f64>,
    /// Compact variable ids present in this block.
    vars: Vec<u32>,
    /// `cells[ptr[k]..ptr[k + 1]]` are the placements of `vars[k]`.
    ptr: Vec<usize>,
    cells: Vec<Cell>,
}

/// Square column-major buffer helpers.
fn zeros(n: usize) -> Vec<f64> {
    vec![0.0; n * n]
}

fn mat<'a>(v: &'a [f64], n: usize) -> MatRef<'a, f64> {
    MatRef::from_column_major_slice(v, n, n)
}

fn mat_mut<'a>(v: &'a mut [f64], n: usize) -> MatMut<'a, f64> {
    MatMut::from_column_major_slice_mut(v, n, n)
}

/// `dst = a * b` for square column-major buffers.
fn mul_into(dst: &mut [f64], a: &[f64], b: &[f64], n: usize) {
    matmul(
        mat_mut(dst, n),
        Accum::Replace,
        mat(a, n),
        mat(b, n),
        1.0,
        Par::Seq,
    );
}

/// In-place Cholesky attempt; `buf` holds the factor's lower triangle on
/// success and garbage on failure.
fn try_cholesky(buf: &mut [f64], n: usize) -> bool {
    let mut mem = MemBuffer::new(cholesky_in_place_scratch::<f64>(
        n,
        Par::Seq,
        Default::default(),
    ));
    cholesky_in_place(
        mat_mut(buf, n),
        LltRegularization::default(),
        Par::Seq,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .is_ok()
}

/// Solve `(L L') Z = B` in place given the Cholesky factor.
fn cholesky_solve_in_place(l: &[f64], n: usize, rhs: &mut [f64], k: usize) {
    let lm = mat(l, n);
    let mut r = MatMut::from_column_major_slice_mut(rhs, n, k);
    solve_lower_triangular_in_place(lm, r.rb_mut(), Par::Seq);
    solve_upper_triangular_in_place(lm.transpose(), r, Par::Seq);
}

impl BlockData {
    fn compile(block: &PsdBlock, compact: &[u32]) -> Self {
        let dim = block.dim();
        let mut a0 = zeros(dim);
        let mut per_var: std::collections::BTreeMap<u32, Vec<Cell>> = std::collections::BTreeMap::new();
        for (i, j, e) in block.upper_entries() {
            let c0 = e.constant_part();
            if c0 != 0.0 {
                a0[j * dim + i] = c0;
                a0[i * dim + j] = c0;
            }
            for (id, c) in e.terms() {
                let v = compact[id.index()];
                let list = per_var.entry(v).or_default();
                list.push(Cell {
                    p: i as u32,
                    q: j as u32,
                    c: *c,
                });
                if i != j {
                    list.push(Cell {
                        p: j as u32,
                        q: i as u32,
                        c: *c,
                    });
                }
            }
        }
        let mut vars = Vec::with_capacity(per_var.len());
        let mut ptr = Vec::with_capacity(per_var.len() + 1);
        let mut cells = Vec::new();
        ptr.push(0);
        for (v, list) in per_var {
            vars.push(v);
            cells.extend_from_slice(&list);
            ptr.push(cells.len());
        }
        BlockData {
            dim,
            a0,
            vars,
            ptr,
            cells,
        }
    }

    fn cells_of(&self, k: usize) -> &[Cell] {
        &self.cells[self.ptr[k]..self.ptr[k + 1]]
    }

    /// `out = A0 + sum_i y_i A_i` (dense symmetric).
    fn assemble(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.a0);
        let dim = self.dim;
        for (k, &v) in self.vars.iter().enumerate() {
            let yv = y[v as usize];
            if yv == 0.0 {
                continue;
            }
            for cell in self.cells_of(k) {
                out[cell.q as usize * dim + cell.p as usize] += yv * cell.c;
            }
        }
    }

    /// `sum A_i cells of local var k dotted against dense m` (column-major).
    fn dot(&self, k: usize, m: &[f64]) -> f64 {
        let dim = self.dim;
        let mut acc = 0.0;
        for cell in self.cells_of(k) {
            acc += cell.c * m[cell.q as usize * dim + cell.p as usize];
        }
        acc
    }

    /// `out += alpha * sum_k coeffs[vars[k]] A_k` (dense symmetric add).
    fn add_combination(&self, coeffs: &[f64], alpha: f64, out: &mut [f64]) {
        let dim = self.dim;
        for (k, &v) in self.vars.iter().enumerate() {
            let w = alpha * coeffs[v as usize];
            if w == 0.0 {
                continue;
            }
            for cell in self.cells_of(k) {
                out[cell.q as usize * dim + cell.p as usize] += w * cell.c;
            }
        }
    }
}

/// Per-block iterate storage.
struct BlockState {
    s: Vec<f64>,
    x: Vec<f64>,
    sinv: Vec<f64>,
    schol: Vec<f64>,
    rd: Vec<f64>,
    /// `sym(X Rd Sinv)` (g contribution), refreshed per iteration.
    xrs: Vec<f64>,
    ds_aff: Vec<f64>,
    dx_aff: Vec<f64>,
    ds: Vec<f64>,
    dx: Vec<f64>,
    scratch: Vec<f64>,
    scratch2: Vec<f64>,
}

impl BlockState {
    fn new(dim: usize) -> Self {
        BlockState {
            s: zeros(dim),
            x: zeros(dim),
            sinv: zeros(dim),
            schol: zeros(dim),
            rd: zeros(dim),
            xrs: zeros(dim),
            ds_aff: zeros(dim),
            dx_aff: zeros(dim),
            ds: zeros(dim),
            dx: zeros(dim),
            scratch: zeros(dim),
            scratch2: zeros(dim),
        }
    }
}

/// Largest step `alpha <= 1` keeping `m + alpha d` positive definite,
/// located by bisection on Cholesky success and scaled back by `tau`.
fn psd_step(m: &[f64], d: &[f64], n: usize, tau: f64, scratch: &mut [f64]) -> f64 {
    let trial = |alpha: f64, scratch: &mut [f64]| -> bool {
        for (dst, (a, b)) in scratch.iter_mut().zip(m.iter().zip(d.iter())) {
            *dst = a + alpha * b;
        }
        try_cholesky(scratch, n)
    };
    if trial(1.0, scratch) {
        return 1.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if trial(mid, scratch) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    tau * lo
}

/// Solve the block-diagonal SDP. `blocks` must all be satisfiable strictly
/// (no identically singular block); `nvars` is the full variable count and
/// `q` the objective vector over it.
pub fn solve_dense(blocks: &[PsdBlock], nvars: usize, q: &[f64], settings: &IpmSettings) -> Result<IpmSolution> {
    // Compact away variables that appear in no block. Such variables carry
    // no constraint, so a nonzero objective coefficient would make the
    // problem unbounded; the caller's coverage check prevents that.
    let mut compact = vec![u32::MAX; nvars];
    let mut nloc = 0u32;
    for b in blocks {
        for (_, _, e) in b.upper_entries() {
            for (id, _) in e.terms() {
                let slot = &mut compact[id.index()];
                if *slot == u32::MAX {
                    *slot = nloc;
                    nloc += 1;
                }
            }
        }
    }
    let n = nloc as usize;
    if n == 0 {
        return Err(Error::Solver("dense solve with no variables".into()));
    }
    for (i, &c) in compact.iter().enumerate() {
        if c == u32::MAX && q[i] != 0.0 {
            return Err(Error::Solver(format!(
                "objective variable {i} appears in no block; the problem is unbounded"
            )));
        }
    }
    let mut qc = vec![0.0; n];
    for (i, &c) in compact.iter().enumerate() {
        if c != u32::MAX {
            qc[c as usize] = q[i];
        }
    }
    let data: Vec<BlockData> = blocks.iter().map(|b| BlockData::compile(b, &compact)).collect();
    let ndim: usize = data.iter().map(|b| b.dim).sum();
    let q_scale = 1.0 + qc.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut state: Vec<BlockState> = data.iter().map(|b| BlockState::new(b.dim)).collect();
    let mut y = vec![0.0; n];
    // Infeasible start: X = I, S = rho I with rho sized to the constant
    // parts so the first iterations are not dominated by the S residual.
    for (bd, st) in data.iter().zip(state.iter_mut()) {
        let dim = bd.dim;
        let mut a0max = 0.0f64;
        for v in &bd.a0 {
            a0max = a0max.max(v.abs());
        }
        let rho = (1.0 + a0max).min(100.0);
        for i in 0..dim {
            st.x[i * dim + i] = 1.0;
            st.s[i * dim + i] = rho;
        }
    }

    let mut h = vec![0.0; n * n];
    let mut rp = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut sinv_dot = vec![0.0; n];
    let mut best: Option<IpmSolution> = None;
    let mut stall = 0u32;
    let mut last_score = f64::INFINITY;

    for iter in 0..settings.max_iter {
        // Residuals, inverses, and the complementarity gap.
        let mut mu_num = 0.0;
        let mut rd_norm = 0.0f64;
        for (bd, st) in data.iter().zip(state.iter_mut()) {
            let dim = bd.dim;
            bd.assemble(&y, &mut st.rd);
            for (r, s) in st.rd.iter_mut().zip(st.s.iter()) {
                *r -= s;
            }
            for v in &st.rd {
                rd_norm = rd_norm.max(v.abs());
            }
            st.schol.copy_from_slice(&st.s);
            if !try_cholesky(&mut st.schol, dim) {
                return Err(Error::Solver(
                    "interior-point iterate lost positive definiteness".into(),
                ));
            }
            // Sinv via the factor against the identity.
            st.sinv.fill(0.0);
            for i in 0..dim {
                st.sinv[i * dim + i] = 1.0;
            }
            cholesky_solve_in_place(&st.schol, dim, &mut st.sinv, dim);
            for (xv, sv) in st.x.iter().zip(st.s.iter()) {
                mu_num += xv * sv;
            }
        }
        let mu = mu_num / ndim as f64;

        // Multiplier residual r_p = q - <A, X> and certificate value.
        let mut rp_norm = 0.0f64;
        let mut dual_obj = 0.0;
        for v in rp.iter_mut() {
            *v = 0.0;
        }
        for (bd, st) in data.iter().zip(state.iter()) {
            for (k, &v) in bd.vars.iter().enumerate() {
                rp[v as usize] += bd.dot(k, &st.x);
            }
            for (a, x) in bd.a0.iter().zip(st.x.iter()) {
                dual_obj -= a * x;
            }
        }
        for (r, qv) in rp.iter_mut().zip(qc.iter()) {
            *r = qv - *r;
        }
        for v in &rp {
            rp_norm = rp_norm.max(v.abs());
        }
        let objective: f64 = qc.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let gap_rel =
            (objective - dual_obj).abs() / (1.0 + objective.abs() + dual_obj.abs());
        let margin: f64 = rp_norm * y.iter().fold(0.0, |acc, v| acc + v.abs());

        let snapshot = |optimal: bool| {
            let mut full = vec![0.0; nvars];
            for (i, &c) in compact.iter().enumerate() {
                if c != u32::MAX {
                    full[i] = y[c as usize];
                }
            }
            IpmSolution {
                objective,
                certified: dual_obj - margin,
                y: full,
                iterations: iter + 1,
                primal_residual: rp_norm,
                dual_residual: rd_norm,
                gap: gap_rel,
                optimal,
            }
        };
        let converged = gap_rel <= settings.gap_tol
            && rp_norm <= settings.feas_tol * q_scale
            && rd_norm <= settings.feas_tol.max(1e-9);
        if converged {
            return Ok(snapshot(true));
        }
        let score = gap_rel.max(rp_norm).max(rd_norm);
        if score < last_score * 0.999 {
            stall = 0;
        } else {
            stall += 1;
        }
        last_score = score;
        if best.as_ref().is_none_or(|b| score < b.gap.max(b.primal_residual).max(b.dual_residual)) {
            best = Some(snapshot(false));
        }
        if stall >= 8 {
            break;
        }

        // Schur matrix H_ij = sum_b tr(A_i X A_j Sinv) and the residual part
        // of the direction right-hand side.
        h.iter_mut().for_each(|v| *v = 0.0);
        for v in sinv_dot.iter_mut() {
            *v = 0.0;
        }
        for (bd, st) in data.iter().zip(state.iter_mut()) {
            let dim = bd.dim;
            // xrs = X Rd Sinv, entering g for the infeasible part.
            mul_into(&mut st.scratch, &st.rd, &st.sinv, dim);
            mul_into(&mut st.xrs, &st.x, &st.scratch, dim);
            for (k, &vi) in bd.vars.iter().enumerate() {
                sinv_dot[vi as usize] += bd.dot(k, &st.sinv);
            }
            let x = &st.x;
            let sinv = &st.sinv;
            for (ka, &va) in bd.vars.iter().enumerate() {
                let ca = bd.cells_of(ka);
                let ga = va as usize;
                for (kb, &vb) in bd.vars.iter().enumerate().take(ka + 1) {
                    let gb = vb as usize;
                    let cb = bd.cells_of(kb);
                    let mut acc = 0.0;
                    for a in ca {
                        let xrow = &x[a.p as usize * dim..a.p as usize * dim + dim];
                        let srow = &sinv[a.q as usize * dim..a.q as usize * dim + dim];
                        let cac = a.c;
                        for b in cb {
                            acc += cac * b.c * xrow[b.p as usize] * srow[b.q as usize];
                        }
                    }
                    let (hi, lo) = if ga >= gb { (ga, gb) } else { (gb, ga) };
                    h[lo * n + hi] += acc;
                }
            }
        }

        // Factor H once; both direction solves reuse it.
        let mut hl = h.clone();
        let mut ridge = 0.0;
        let hmax = (0..n).fold(0.0f64, |m, i| m.max(h[i * n + i].abs())).max(1.0);
        while !try_cholesky(&mut hl, n) {
            ridge = if ridge == 0.0 { 1e-14 * hmax } else { ridge * 100.0 };
            if ridge > 1e-4 * hmax {
                return Err(Error::Solver(
                    "Schur complement is numerically singular".into(),
                ));
            }
            hl.copy_from_slice(&h);
            for i in 0..n {
                hl[i * n + i] += ridge;
            }
        }

        // Predictor (affine scaling): target mu = 0.
        // g_i = -q_i - <A_i, sym(X Rd Sinv)>; the <A_i, X> term cancels
        // against the multiplier residual.
        for i in 0..n {
            g[i] = -qc[i];
        }
        for (bd, st) in data.iter().zip(state.iter()) {
            for (k, &v) in bd.vars.iter().enumerate() {
                g[v as usize] -= bd.dot(k, &st.xrs);
            }
        }
        cholesky_solve_in_place(&hl, n, &mut g, 1);
        let dy_aff = g.clone();
        let mut alpha_x_aff = 1.0f64;
        let mut alpha_s_aff = 1.0f64;
        for (bd, st) in data.iter().zip(state.iter_mut()) {
            let dim = bd.dim;
            st.ds_aff.copy_from_slice(&st.rd);
            bd.add_combination(&dy_aff, 1.0, &mut st.ds_aff);
            // dx = -X - sym(X dS Sinv)
            mul_into(&mut st.scratch, &st.ds_aff, &st.sinv, dim);
            mul_into(&mut st.scratch2, &st.x, &st.scratch, dim);
            for i in 0..dim {
                for j in 0..=i {
                    let lin = 0.5 * (st.scratch2[j * dim + i] + st.scratch2[i * dim + j]);
                    let w = -st.x[j * dim + i] - lin;
                    st.dx_aff[j * dim + i] = w;
                    st.dx_aff[i * dim + j] = w;
                }
            }
            alpha_s_aff = alpha_s_aff.min(psd_step(&st.s, &st.ds_aff, dim, 0.98, &mut st.scratch));
            alpha_x_aff = alpha_x_aff.min(psd_step(&st.x, &st.dx_aff, dim, 0.98, &mut st.scratch));
        }
        // Centering weight from the affine decrease.
        let mut mu_aff_num = 0.0;
        for st in state.iter() {
            for i in 0..st.s.len() {
                mu_aff_num +=
                    (st.x[i] + alpha_x_aff * st.dx_aff[i]) * (st.s[i] + alpha_s_aff * st.ds_aff[i]);
            }
        }
        let mu_aff = mu_aff_num / ndim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector: target sigma mu, second-order term from the affine step.
        for i in 0..n {
            g[i] = sigma * mu * sinv_dot[i] - qc[i];
        }
        for (bd, st) in data.iter().zip(state.iter_mut()) {
            let dim = bd.dim;
            // scratch2 = dX_aff dS_aff Sinv
            mul_into(&mut st.scratch, &st.ds_aff, &st.sinv, dim);
            mul_into(&mut st.scratch2, &st.dx_aff, &st.scratch, dim);
            for (k, &v) in bd.vars.iter().enumerate() {
                g[v as usize] -= bd.dot(k, &st.xrs) + bd.dot(k, &st.scratch2);
            }
        }
        cholesky_solve_in_place(&hl, n, &mut g, 1);
        let dy = &g;
        let mut alpha_x = 1.0f64;
        let mut alpha_s = 1.0f64;
        for (bd, st) in data.iter().zip(state.iter_mut()) {
            let dim = bd.dim;
            st.ds.copy_from_slice(&st.rd);
            bd.add_combination(dy, 1.0, &mut st.ds);
            // dX = sigma mu Sinv - X - sym(X dS Sinv) - sym(dXaff dSaff Sinv)
            // where scratch2 still holds dXaff dSaff Sinv.
            mul_into(&mut st.scratch, &st.ds, &st.sinv, dim);
            let mut xds = std::mem::take(&mut st.dx);
            mul_into(&mut xds, &st.x, &st.scratch, dim);
            for i in 0..dim {
                for j in 0..=i {
                    let second =
                        0.5 * (st.scratch2[j * dim + i] + st.scratch2[i * dim + j]);
                    let lin = 0.5 * (xds[j * dim + i] + xds[i * dim + j]);
                    let mut v = sigma * mu * st.sinv[j * dim + i] - st.x[j * dim + i] - lin - second;
                    if i != j {
                        // Average the two Sinv/X entries explicitly to keep
                        // the direction exactly symmetric.
                        let v2 = sigma * mu * st.sinv[i * dim + j]
                            - st.x[i * dim + j]
                            - lin
                            - second;
                        v = 0.5 * (v + v2);
                    }
                    xds[j * dim + i] = v;
                    xds[i * dim + j] = v;
                }
            }
            st.dx = xds;
            alpha_s = alpha_s.min(psd_step(&st.s, &st.ds, dim, 0.98, &mut st.scratch));
            alpha_x = alpha_x.min(psd_step(&st.x, &st.dx, dim, 0.98, &mut st.scratch));
        }

        // Update. S absorbs its share of the step so Rd contracts by
        // (1 - alpha_s) per iteration; X likewise for the multiplier side.
        for (yv, d) in y.iter_mut().zip(dy.iter()) {
            *yv += alpha_s * d;
        }
        for st in state.iter_mut() {
            for (s, d) in st.s.iter_mut().zip(st.ds.iter()) {
                *s += alpha_s * d;
            }
            for (x, d) in st.x.iter_mut().zip(st.dx.iter()) {
                *x += alpha_x * d;
            }
        }
        if alpha_s < 1e-5 && alpha_x < 1e-5 {
            break;
        }
    }

    let sol = best.ok_or_else(|| Error::Solver("interior-point method made no progress".into()))?;
    let loose = 1e4;
    if sol.gap <= settings.gap_tol * loose
        && sol.primal_residual <= settings.feas_tol * q_scale * loose
        && sol.dual_residual <= settings.feas_tol.max(1e-9) * loose
    {
        Ok(sol)
    } else {
        Err(Error::Solver(format!(
            "interior-point method stalled: gap {:.2e}, residuals {:.2e}/{:.2e} after {} iterations",
            sol.gap, sol.primal_residual, sol.dual_residual, sol.iterations
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{KeyId, LinExpr};
    use crate::moment::PsdBlock;

    fn expr(pairs: &[(KeyId, f64)], c: f64) -> LinExpr {
        let mut e = LinExpr::zero();
        for (id, v) in pairs {
            e.add_term(*id, *v);
        }
        e.add_constant(c);
        e
    }

    #[test]
    fn smallest_eigenvalue_bound_matches_closed_form() {
        // M(y) = [[1 + y, 1], [1, 1 + y]] is PSD iff y >= 0, so
        // min y = 0 with certificate X = [[a, -a], [-a, a]].
        let id = KeyId(0);
        let entries = vec![
            expr(&[(id, 1.0)], 1.0),
            expr(&[], 1.0),
            expr(&[(id, 1.0)], 1.0),
        ];
        let block = PsdBlock::from_upper("test".into(), 2, 1, entries);
        let sol = solve_dense(&[block], 1, &[1.0], &IpmSettings::default()).unwrap();
        assert!(sol.optimal);
        assert!((sol.objective - 0.0).abs() < 1e-7, "{}", sol.objective);
        assert!(sol.certified <= sol.objective + 1e-9);
        assert!(sol.certified > -1e-7, "{}", sol.certified);
    }

    #[test]
    fn two_block_problem_with_offset_constants() {
        // minimize y1 + y2 with blocks diag(y1 - 1, y2 - 2) and
        // [[y1 + y2 - 2, 0.5], [0.5, 1]]: optimum at the corner where
        // y1 = 1, y2 = 2 is feasible for the second block
        // (3 - 2 = 1 >= 0.25), so min = 3.
        let (id0, id1) = (KeyId(0), KeyId(1));
        let b1 = PsdBlock::from_upper(
            "diag".into(),
            2,
            1,
            vec![
                expr(&[(id0, 1.0)], -1.0),
                expr(&[], 0.0),
                expr(&[(id1, 1.0)], -2.0),
            ],
        );
        let b2 = PsdBlock::from_upper(
            "coupled".into(),
            2,
            1,
            vec![
                expr(&[(id0, 1.0), (id1, 1.0)], -2.0),
                expr(&[], 0.5),
                expr(&[], 1.0),
            ],
        );
        let sol = solve_dense(&[b1, b2], 2, &[1.0, 1.0], &IpmSettings::default()).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-6, "{}", sol.objective);
        assert!(sol.certified <= 3.0 + 1e-8);
        assert!(sol.certified > 3.0 - 1e-6, "{}", sol.certified);
    }

    #[test]
    fn infeasible_start_block_with_indefinite_constant() {
        // minimize y subject to [[y, 1], [1, y]] PSD: optimum y = 1. The
        // constant part [[0, 1], [1, 0]] is indefinite, so y = 0 is not
        // feasible and the solver must recover through the S residual.
        let id = KeyId(0);
        let entries = vec![
            expr(&[(id, 1.0)], 0.0),
            expr(&[], 1.0),
            expr(&[(id, 1.0)], 0.0),
        ];
        let block = PsdBlock::from_upper("test".into(), 2, 1, entries);
        let sol = solve_dense(&[block], 1, &[1.0], &IpmSettings::default()).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-6, "{}", sol.objective);
        assert!(sol.certified <= 1.0 + 1e-8);
        assert!(sol.certified > 1.0 - 1e-6, "{}", sol.certified);
    }
}
