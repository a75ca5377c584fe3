//! Exact-diagonalization oracle for desk-scale instances.
//!
//! Dense eigensolves handle up to 12 sites; a matrix-free Lanczos iteration
//! (full reorthogonalization) extends to 16, with an optional verified ground
//! vector for nondegenerate models. Ground-state expectations are projector
//! averages over the whole (possibly degenerate) ground space, which keeps
//! them invariant under every model symmetry and is exactly what
//! moment-vector feasibility checks need.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{KeyInterner, LinExpr};
use crate::model::ModelSpec;
use crate::pauli::PauliMonomial;

/// Largest site count diagonalized densely.
pub const DENSE_MAX_SITES: u32 = 12;
/// Largest site count for the Lanczos energy path.
pub const LANCZOS_MAX_SITES: u32 = 16;

/// Eigenvalues within `tol * max(1, |E0|)` of the minimum count as
/// ground-degenerate.
const DEGENERACY_TOL: f64 = 1e-9;
/// Acceptable eigenpair residual `||H v - E v||`.
const RESIDUAL_TOL: f64 = 1e-9;

/// Exact ground-state data: energy and an orthonormal basis of the ground
/// space.
pub struct GroundState {
    model: ModelSpec,
    n: u32,
    energy: f64,
    vectors: Vec<Vec<f64>>,
}

impl GroundState {
    /// The diagonalized model.
    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    /// Number of sites.
    pub fn site_count(&self) -> u32 {
        self.n
    }

    /// Ground-state energy (total).
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Ground-state energy per spin.
    pub fn energy_per_spin(&self) -> f64 {
        self.energy / self.n as f64
    }

    /// Ground-space dimension.
    pub fn degeneracy(&self) -> usize {
        self.vectors.len()
    }

    /// Projector-averaged ground-space expectation of a monomial.
    pub fn expectation(&self, m: &PauliMonomial) -> Result<Complex64> {
        for &(s, _) in m.letters() {
            if s.0 >= self.n {
                return Err(Error::SiteOutOfRange {
                    site: s.0,
                    lattice: m.lattice(),
                });
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for v in &self.vectors {
            for (col, &x) in v.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let (row, amp) = m.column_action(self.n, col);
                acc += amp.value() * (v[row] * x);
            }
        }
        Ok(acc / self.vectors.len() as f64)
    }

    /// Real expectation of a self-adjoint monomial; errors if an imaginary
    /// residue survives (the monomial was not self-adjoint).
    pub fn moment(&self, m: &PauliMonomial) -> Result<f64> {
        let e = self.expectation(m)?;
        if e.im.abs() > 1e-9 * e.re.abs().max(1.0) {
            return Err(Error::Oracle(format!(
                "expectation of {m} is not real ({} + {}i)",
                e.re, e.im
            )));
        }
        Ok(e.re)
    }

    /// Exact values of all interned moment variables, in id order.
    pub fn moment_values(&self, interner: &KeyInterner) -> Result<Vec<f64>> {
        interner
            .keys()
            .iter()
            .map(|k| self.moment(k.representative()))
            .collect()
    }

    /// Evaluate a canonicalized expression at the exact moments.
    pub fn eval(&self, expr: &LinExpr, interner: &KeyInterner) -> Result<f64> {
        let mut acc = expr.constant_part();
        for &(id, c) in expr.terms() {
            acc += c * self.moment(interner.key(id).representative())?;
        }
        Ok(acc)
    }
}

/// Dense Hamiltonian assembly from the model's weighted monomials, applied
/// column by column (the terms' amplitudes are exactly real).
fn dense_hamiltonian(model: &ModelSpec) -> Mat<f64> {
    let n = model.site_count();
    let dim = 1usize << n;
    let mut h = Mat::<f64>::zeros(dim, dim);
    for (w, m) in model.terms() {
        for col in 0..dim {
            let (row, amp) = m.column_action(n, col);
            let a = amp
                .real_value()
                .expect("two-site equal-axis couplings have real amplitudes");
            h[(row, col)] += w * a;
        }
    }
    h
}

/// Exact ground state by dense diagonalization (up to 12 sites).
pub fn diagonalize(model: &ModelSpec) -> Result<GroundState> {
    model.validate()?;
    let n = model.site_count();
    if n > DENSE_MAX_SITES {
        return Err(Error::Oracle(format!(
            "dense diagonalization capped at {DENSE_MAX_SITES} sites, model has {n}; use the Lanczos energy oracle"
        )));
    }
    let h = dense_hamiltonian(model);
    let dim = h.nrows();
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Oracle(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let energy = s[0];
    let cut = energy + DEGENERACY_TOL * energy.abs().max(1.0);
    let mut vectors = Vec::new();
    for i in 0..dim {
        if s[i] <= cut {
            vectors.push((0..dim).map(|r| u[(r, i)]).collect::<Vec<f64>>());
        } else {
            break;
        }
    }
    // Verify the eigenpairs instead of trusting the backend.
    for v in &vectors {
        let mut res = 0.0f64;
        for r in 0..dim {
            let mut hv = 0.0;
            for c in 0..dim {
                hv += h[(r, c)] * v[c];
            }
            res += (hv - energy * v[r]).powi(2);
        }
        if res.sqrt() > RESIDUAL_TOL * energy.abs().max(1.0) {
            return Err(Error::Oracle(format!(
                "ground eigenpair residual {} exceeds {RESIDUAL_TOL}",
                res.sqrt()
            )));
        }
    }
    Ok(GroundState {
        model: *model,
        n,
        energy,
        vectors,
    })
}

/// Shared Lanczos iteration: converged Ritz value plus, on request, the
/// assembled Ritz vector (the stored basis makes that a cheap recombination).
fn lanczos_run(model: &ModelSpec, want_vector: bool) -> Result<(f64, Option<Vec<f64>>)> {
    model.validate()?;
    let n = model.site_count();
    if n > LANCZOS_MAX_SITES {
        return Err(Error::Oracle(format!(
            "Lanczos oracle capped at {LANCZOS_MAX_SITES} sites, model has {n}"
        )));
    }
    let dim = 1usize << n;
    let terms = model.terms();
    let matvec = |x: &[f64], y: &mut [f64]| {
        y.fill(0.0);
        for (w, m) in &terms {
            for (col, &xc) in x.iter().enumerate() {
                let (row, amp) = m.column_action(n, col);
                let a = amp.real_value().expect("real Hamiltonian");
                y[row] += w * a * xc;
            }
        }
    };

    // Deterministic pseudo-random start vector with weight in every sector.
    let mut v: Vec<f64> = (0..dim)
        .map(|i| 1.0 + 0.3 * (1.37 * i as f64 + 0.71).sin())
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    const MAX_ITERS: usize = 180;
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0f64; dim];
    let mut prev_theta = f64::INFINITY;
    let mut stable = 0usize;

    for j in 0..MAX_ITERS {
        matvec(&basis[j], &mut w);
        let alpha: f64 = w.iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        // Full reorthogonalization against the whole basis, twice.
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = w.iter().zip(b).map(|(a, x)| a * x).sum();
                w.iter_mut().zip(b).for_each(|(a, x)| *a -= d * x);
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();

        // Ritz value and residual estimate from the tridiagonal section.
        let k = alphas.len();
        let mut t = Mat::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas.get(i).copied().unwrap_or(0.0);
                t[(i + 1, i)] = t[(i, i + 1)];
            }
        }
        let evd = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Oracle(format!("tridiagonal eigensolve failed: {e:?}")))?;
        let theta = evd.S().column_vector()[0];
        let tail = evd.U()[(k - 1, 0)].abs();
        let resid = beta * tail;

        if (theta - prev_theta).abs() <= 1e-13 * theta.abs().max(1.0) {
            stable += 1;
        } else {
            stable = 0;
        }
        prev_theta = theta;
        let invariant = beta <= 1e-13;
        if (resid <= 1e-9 * theta.abs().max(1.0) && stable >= 2) || invariant {
            // Invariant subspace makes the Ritz value exact regardless of
            // the stability counter.
            if !want_vector {
                return Ok((theta, None));
            }
            let mut psi = vec![0.0f64; dim];
            for (b, u) in basis.iter().zip((0..k).map(|i| evd.U()[(i, 0)])) {
                psi.iter_mut().zip(b).for_each(|(p, x)| *p += u * x);
            }
            let nrm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
            psi.iter_mut().for_each(|x| *x /= nrm);
            matvec(&psi, &mut w);
            let res = w
                .iter()
                .zip(&psi)
                .map(|(hv, p)| (hv - theta * p).powi(2))
                .sum::<f64>()
                .sqrt();
            if res > 1e-7 * theta.abs().max(1.0) {
                return Err(Error::Oracle(format!(
                    "Lanczos ground vector residual {res:.3e} too large"
                )));
            }
            return Ok((theta, Some(psi)));
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    Err(Error::Oracle(format!(
        "Lanczos did not converge within {MAX_ITERS} iterations"
    )))
}

/// Ground-state energy by matrix-free Lanczos with full reorthogonalization
/// (13..=16 sites; also valid below that, where it is checked against the
/// dense path in tests).
pub fn lanczos_energy(model: &ModelSpec) -> Result<f64> {
    lanczos_run(model, false).map(|(theta, _)| theta)
}

/// Ground state by matrix-free Lanczos (13..=16 sites). Returns a single
/// verified eigenvector, so expectations are projector averages only when
/// the ground state is nondegenerate; degenerate models below 13 sites
/// should use [`diagonalize`] instead.
pub fn lanczos_ground_state(model: &ModelSpec) -> Result<GroundState> {
    let (energy, psi) = lanczos_run(model, true)?;
    Ok(GroundState {
        model: *model,
        n: model.site_count(),
        energy,
        vectors: vec![psi.expect("vector requested")],
    })
}
