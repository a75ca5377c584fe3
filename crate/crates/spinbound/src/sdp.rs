//! Conic assembly and solution of a relaxation: blocks and equalities are
//! compiled to conic standard form, handed to an embedded interior-point
//! solver, and the returned point is re-validated independently.
//!
//! Every reported bound is the *dual* objective value: by weak duality it
//! bounds the true relaxation optimum from below even when the primal
//! iterate is slightly infeasible, so it is the side safe to certify.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use faer::Side;

use crate::basis::{build_1d, build_2d, partition};
use crate::config::{CommutatorSet, RelaxationConfig};
use crate::constraints::{commutator_equalities, optimality_blocks, rdm_blocks};
use crate::error::{Error, Result};
use crate::expr::{KeyInterner, LinExpr};
use crate::ipm::{solve_dense, IpmSettings};
use crate::model::{ModelSpec, Observable};
use crate::moment::{moment_blocks, unreduced_moment_block, PsdBlock};
use crate::pauli::Lattice;
use crate::symmetry::SymmetryGroup;

/// How the solver terminated, for solutions accepted as usable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Converged to the requested tolerances.
    Optimal,
    /// Converged at reduced accuracy.
    NearOptimal,
}

/// Result of one conic solve, including the independent validation numbers.
#[derive(Clone, Debug)]
pub struct Solution {
    /// Termination quality.
    pub status: SolveStatus,
    /// Primal objective value (including the affine constant).
    pub objective: f64,
    /// Dual objective value (including the affine constant); for a
    /// minimization this is the certified lower bound.
    pub certified: f64,
    /// Moment vector, indexed by [`crate::expr::KeyId`] order.
    pub values: Vec<f64>,
    /// Interior-point iterations.
    pub iterations: u32,
    /// Wall-clock solve time in seconds.
    pub solve_time: f64,
    /// Solver-reported primal residual.
    pub primal_residual: f64,
    /// Solver-reported dual residual.
    pub dual_residual: f64,
    /// Smallest eigenvalue over all constraint blocks evaluated at the
    /// returned point (recomputed independently of the solver).
    pub min_block_eig: f64,
    /// Largest equality-constraint residual at the returned point.
    pub max_equality_residual: f64,
}

/// Independent feasibility measurements of a moment vector.
#[derive(Clone, Copy, Debug)]
pub struct PointCheck {
    /// Smallest eigenvalue over all constraint blocks.
    pub min_block_eig: f64,
    /// Largest absolute equality residual.
    pub max_equality_residual: f64,
}

/// Two-sided observable bounds with the underlying solves.
#[derive(Clone, Debug)]
pub struct ObservableBounds {
    /// Certified lower bound on the observable.
    pub lower: f64,
    /// Certified upper bound on the observable.
    pub upper: f64,
    /// The minimization solve.
    pub min_solution: Solution,
    /// The maximization solve (of the negated objective).
    pub max_solution: Solution,
}

/// A fully assembled relaxation for one model instance: the moment variable
/// interner, the Hamiltonian objective, all positive-semidefinite blocks,
/// and all linear equalities.
pub struct Relaxation {
    model: ModelSpec,
    config: RelaxationConfig,
    group: SymmetryGroup,
    interner: KeyInterner,
    hamiltonian: LinExpr,
    blocks: Vec<PsdBlock>,
    equalities: Vec<LinExpr>,
    basis_size: usize,
    covered: Vec<bool>,
}

impl Relaxation {
    /// Assemble the relaxation for `model` under `config`.
    ///
    /// The moment basis, the symmetry group, and every constraint family are
    /// built in one fixed order so the variable numbering is deterministic.
    pub fn build(model: &ModelSpec, config: &RelaxationConfig) -> Result<Self> {
        config.validate(model)?;
        let lattice = model.lattice();
        let g = SymmetryGroup::new(lattice, config.symmetry_options());
        let mut interner = KeyInterner::new();
        let hamiltonian = model.hamiltonian(&g, &mut interner)?;
        let basis = match lattice {
            Lattice::Chain { l } => build_1d(l, config.degree, config.range)?,
            Lattice::Square { l } => build_2d(l, config.degree)?,
        };
        let basis_size = basis.len();
        let mut blocks = if config.translations {
            let pb = partition(&basis)?;
            moment_blocks(&pb, &g, &mut interner, config.realify)?
        } else {
            vec![unreduced_moment_block(&basis, &g, &mut interner)?]
        };
        if !config.rdm.is_empty() {
            blocks.extend(rdm_blocks(
                lattice,
                &config.rdm,
                &g,
                &mut interner,
                config.realify,
            )?);
        }
        if config.optimality {
            blocks.extend(optimality_blocks(
                model,
                config.optimality_set,
                &g,
                &mut interner,
                config.realify,
            )?);
        }
        let equalities = if config.commutators == CommutatorSet::None {
            Vec::new()
        } else {
            let pb = partition(&basis)?;
            commutator_equalities(model, config.commutators, &pb, &g, &mut interner)?
        };
        // Rows that are identically zero (every entry forced to zero by the
        // symmetry rules) carry no constraint but ruin strict feasibility,
        // so drop them; a block can vanish entirely.
        let blocks: Vec<PsdBlock> = blocks
            .into_iter()
            .filter_map(|b| match b.without_zero_rows() {
                Some(nb) => (nb.dim() > 0).then_some(nb),
                None => Some(b),
            })
            .collect();
        let mut covered = vec![false; interner.len()];
        for b in &blocks {
            for (_, _, e) in b.upper_entries() {
                for (id, _) in e.terms() {
                    covered[id.index()] = true;
                }
            }
        }
        for e in &equalities {
            for (id, _) in e.terms() {
                covered[id.index()] = true;
            }
        }
        let relax = Relaxation {
            model: model.clone(),
            config: config.clone(),
            group: g,
            interner,
            hamiltonian,
            blocks,
            equalities,
            basis_size,
            covered,
        };
        relax.require_covered(&relax.hamiltonian, "Hamiltonian")?;
        Ok(relax)
    }

    /// The model this relaxation was built for.
    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    /// The configuration this relaxation was built with.
    pub fn config(&self) -> &RelaxationConfig {
        &self.config
    }

    /// The symmetry group used for canonicalization.
    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    /// The moment-variable interner (variable order of all solves).
    pub fn interner(&self) -> &KeyInterner {
        &self.interner
    }

    /// Number of scalar moment variables.
    pub fn variables(&self) -> usize {
        self.interner.len()
    }

    /// Number of monomials in the underlying basis.
    pub fn basis_size(&self) -> usize {
        self.basis_size
    }

    /// The Hamiltonian moment expression (the energy objective).
    pub fn hamiltonian(&self) -> &LinExpr {
        &self.hamiltonian
    }

    /// All positive-semidefinite blocks.
    pub fn blocks(&self) -> &[PsdBlock] {
        &self.blocks
    }

    /// All linear equality constraints (each expression equals zero).
    pub fn equalities(&self) -> &[LinExpr] {
        &self.equalities
    }

    fn require_covered(&self, e: &LinExpr, what: &str) -> Result<()> {
        for (id, _) in e.terms() {
            if id.index() >= self.covered.len() || !self.covered[id.index()] {
                return Err(Error::Unsupported(format!(
                    "{what} involves the moment {} which no constraint of this \
                     relaxation touches; increase the basis degree or range",
                    self.interner.key(*id).representative()
                )));
            }
        }
        Ok(())
    }

    /// Canonicalized observable expression over this relaxation's variables.
    ///
    /// Fails if the observable involves moments the relaxation does not
    /// constrain (the bound would be vacuous). The probe runs on a scratch
    /// interner so a failed lookup never grows the variable set.
    pub fn observable_expr(&self, obs: Observable) -> Result<LinExpr> {
        let mut scratch = self.interner.clone();
        let expr = self.model.observable(obs, &self.group, &mut scratch)?;
        if scratch.len() > self.interner.len() {
            let fresh = scratch.keys()[self.interner.len()..]
                .iter()
                .map(|k| k.representative().to_string())
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::Unsupported(format!(
                "observable {obs} involves moments outside the relaxation \
                 ({fresh}); increase the basis degree or range"
            )));
        }
        self.require_covered(&expr, "the observable")?;
        Ok(expr)
    }

    /// Measure feasibility of a moment vector against all blocks and
    /// equalities (independent of any solver).
    pub fn check_point(&self, values: &[f64]) -> Result<PointCheck> {
        let mut min_eig = f64::INFINITY;
        for b in &self.blocks {
            let dense = b.eval_dense(values);
            let eigs = dense
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|e| Error::Solver(format!("validation eigensolve failed: {e:?}")))?;
            let lo = eigs.first().copied().unwrap_or(f64::INFINITY);
            min_eig = min_eig.min(lo);
        }
        let mut max_res = 0.0f64;
        for e in &self.equalities {
            max_res = max_res.max(e.eval(values).abs());
        }
        Ok(PointCheck {
            min_block_eig: min_eig,
            max_equality_residual: max_res,
        })
    }

    /// Certified lower bound on the ground-state energy.
    pub fn energy_lower_bound(&self) -> Result<Solution> {
        self.minimize(&self.hamiltonian, &[])
    }

    /// Two-sided bounds on an observable, optionally restricted to moment
    /// vectors whose energy lies in `window = (lo, hi)` (total energy).
    pub fn observable_bounds(
        &self,
        obs: Observable,
        window: Option<(f64, f64)>,
    ) -> Result<ObservableBounds> {
        let expr = self.observable_expr(obs)?;
        let mut extra = Vec::new();
        if let Some((lo, hi)) = window {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidConfig(format!(
                    "invalid energy window [{lo}, {hi}]"
                )));
            }
            let mut above = self.hamiltonian.clone();
            above.add_constant(-lo);
            let mut below = self.hamiltonian.scaled(-1.0);
            below.add_constant(hi);
            extra.push(above);
            extra.push(below);
        }
        let min_solution = self.minimize(&expr, &extra)?;
        let max_solution = self.minimize(&expr.scaled(-1.0), &extra)?;
        Ok(ObservableBounds {
            lower: min_solution.certified,
            upper: -max_solution.certified,
            min_solution,
            max_solution,
        })
    }

    /// Minimize a moment expression subject to this relaxation's blocks and
    /// equalities plus the extra inequality rows `ineqs` (each `>= 0`).
    ///
    /// Problems whose largest block exceeds the sparse solver's practical
    /// limit — and that carry no equality or inequality rows — are routed to
    /// the dense interior-point path; everything else goes through the
    /// embedded conic solver. Both paths feed the same independent
    /// validation of the returned point.
    pub fn minimize(&self, objective: &LinExpr, ineqs: &[LinExpr]) -> Result<Solution> {
        self.require_covered(objective, "the objective")?;
        for e in ineqs {
            self.require_covered(e, "an inequality")?;
        }
        let n = self.interner.len();
        let mut q = vec![0.0; n];
        for (id, c) in objective.terms() {
            q[id.index()] += c;
        }
        let constant = objective.constant_part();

        let max_dim = self.blocks.iter().map(PsdBlock::dim).max().unwrap_or(0);
        let raw = if self.equalities.is_empty() && ineqs.is_empty() && max_dim > DENSE_BLOCK_DIM {
            self.minimize_dense(&q)?
        } else {
            self.minimize_conic(&q, ineqs)?
        };

        let check = self.check_point(&raw.values)?;
        let tol = 10.0 * self.config.feas_tol;
        if check.min_block_eig < -tol {
            return Err(Error::Solver(format!(
                "returned point fails independent block validation: minimum \
                 eigenvalue {:.3e}",
                check.min_block_eig
            )));
        }
        if check.max_equality_residual > tol {
            return Err(Error::Solver(format!(
                "returned point fails independent equality validation: \
                 residual {:.3e}",
                check.max_equality_residual
            )));
        }
        for e in ineqs {
            if e.eval(&raw.values) < -tol {
                return Err(Error::Solver(format!(
                    "returned point fails an inequality row by {:.3e}",
                    -e.eval(&raw.values)
                )));
            }
        }
        Ok(Solution {
            status: raw.status,
            objective: raw.objective + constant,
            certified: raw.certified + constant,
            values: raw.values,
            iterations: raw.iterations,
            solve_time: raw.solve_time,
            primal_residual: raw.primal_residual,
            dual_residual: raw.dual_residual,
            min_block_eig: check.min_block_eig,
            max_equality_residual: check.max_equality_residual,
        })
    }

    /// Dense interior-point path for block-only problems.
    fn minimize_dense(&self, q: &[f64]) -> Result<RawSolution> {
        let settings = IpmSettings {
            max_iter: 200,
            gap_tol: self.config.gap_tol,
            feas_tol: (self.config.feas_tol * 1e-2).min(1e-9),
        };
        let start = std::time::Instant::now();
        let sol = solve_dense(&self.blocks, self.interner.len(), q, &settings)?;
        Ok(RawSolution {
            status: if sol.optimal {
                SolveStatus::Optimal
            } else {
                SolveStatus::NearOptimal
            },
            objective: sol.objective,
            certified: sol.certified,
            values: sol.y,
            iterations: sol.iterations,
            solve_time: start.elapsed().as_secs_f64(),
            primal_residual: sol.primal_residual,
            dual_residual: sol.dual_residual,
        })
    }

    /// Sparse conic path (handles equalities and inequality rows).
    fn minimize_conic(&self, q: &[f64], ineqs: &[LinExpr]) -> Result<RawSolution> {
        let n = self.interner.len();
        let mut ti: Vec<usize> = Vec::new();
        let mut tj: Vec<usize> = Vec::new();
        let mut tv: Vec<f64> = Vec::new();
        let mut b: Vec<f64> = Vec::new();
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        let mut row = 0usize;

        // Equalities: A x = b with s = 0.
        if !self.equalities.is_empty() {
            for e in &self.equalities {
                for (id, c) in e.terms() {
                    ti.push(row);
                    tj.push(id.index());
                    tv.push(*c);
                }
                b.push(-e.constant_part());
                row += 1;
            }
            cones.push(SupportedConeT::ZeroConeT(self.equalities.len()));
        }

        // Inequalities e(x) >= 0: s = b - A x = e(x).
        if !ineqs.is_empty() {
            for e in ineqs {
                for (id, c) in e.terms() {
                    ti.push(row);
                    tj.push(id.index());
                    tv.push(-c);
                }
                b.push(e.constant_part());
                row += 1;
            }
            cones.push(SupportedConeT::NonnegativeConeT(ineqs.len()));
        }

        // Blocks: s = svec(M(x)) with the upper triangle stacked
        // column-major and off-diagonal entries scaled by sqrt(2).
        for blk in &self.blocks {
            let d = blk.dim();
            for col in 0..d {
                for r in 0..=col {
                    let e = blk.entry(r, col);
                    let w = if r == col {
                        1.0
                    } else {
                        std::f64::consts::SQRT_2
                    };
                    for (id, c) in e.terms() {
                        ti.push(row);
                        tj.push(id.index());
                        tv.push(-w * c);
                    }
                    b.push(w * e.constant_part());
                    row += 1;
                }
            }
            cones.push(SupportedConeT::PSDTriangleConeT(d));
        }

        let a = CscMatrix::new_from_triplets(row, n, ti, tj, tv);
        let p = CscMatrix::zeros((n, n));
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .tol_gap_abs(self.config.gap_tol)
            .tol_gap_rel(self.config.gap_tol)
            .tol_feas(self.config.feas_tol)
            .max_iter(500)
            .build()
            .map_err(|e| Error::Solver(format!("invalid solver settings: {e}")))?;
        let mut solver = DefaultSolver::new(&p, q, &a, &b, &cones, settings)
            .map_err(|e| Error::Solver(format!("solver rejected the problem: {e:?}")))?;
        solver.solve();
        let sol = &solver.solution;
        let status = match sol.status {
            SolverStatus::Solved => SolveStatus::Optimal,
            SolverStatus::AlmostSolved => SolveStatus::NearOptimal,
            other => {
                return Err(Error::Solver(format!(
                    "solver terminated with status {other:?}"
                )))
            }
        };
        Ok(RawSolution {
            status,
            objective: sol.obj_val,
            certified: sol.obj_val_dual,
            values: sol.x.clone(),
            iterations: sol.iterations,
            solve_time: sol.solve_time,
            primal_residual: sol.r_prim,
            dual_residual: sol.r_dual,
        })
    }
}

/// Largest block dimension the sparse conic path handles gracefully; its
/// per-cone dense Hessian scales as the fourth power of the dimension.
const DENSE_BLOCK_DIM: usize = 80;

/// Moment-matrix size accounting across the reduction stages, from the raw
/// word hierarchy down to the emitted symmetry blocks.
#[derive(Clone, Debug)]
pub struct BlockLedger {
    /// Lattice sites.
    pub sites: u32,
    /// Relaxation degree.
    pub degree: u32,
    /// Pair interaction range (1D only; 1 on 2D lattices).
    pub range: u32,
    /// Dimension of the unrestricted word hierarchy at this degree: all
    /// words of length at most `degree` over the `3 * sites` letters.
    pub original_dim: u128,
    /// After the Pauli algebra collapses words: distinct monomials of
    /// weight at most `degree`.
    pub weight_bounded_dim: u128,
    /// After restricting to the structured basis actually used.
    pub basis_size: usize,
    /// Sizes of the four sign-partition parts (sums to `basis_size`).
    pub part_sizes: Vec<usize>,
    /// Emitted moment blocks after the full reduction.
    pub block_count: usize,
    /// Largest Hermitian block dimension among emitted blocks.
    pub max_block: usize,
    /// Sum of Hermitian dimension times multiplicity over emitted blocks;
    /// equals `basis_size` (every basis monomial lands in exactly one
    /// frequency component).
    pub dim_mult_total: usize,
    /// How many blocks are stored in doubled real form.
    pub realified_count: usize,
    /// Largest solver-side block dimension (doubling included).
    pub max_emitted: usize,
}

/// Compute the reduction ledger for a model and configuration without
/// assembling constraint entries beyond the moment blocks themselves.
pub fn block_ledger(model: &ModelSpec, config: &RelaxationConfig) -> Result<BlockLedger> {
    config.validate(model)?;
    let lattice = model.lattice();
    let n = lattice.site_count();
    let d = config.degree;
    let letters = 3u128 * n as u128;
    let mut original_dim = 0u128;
    let mut power = 1u128;
    for _ in 0..=d {
        original_dim = original_dim.saturating_add(power);
        power = power.saturating_mul(letters);
    }
    let mut weight_bounded_dim = 0u128;
    let mut binom = 1u128; // C(n, i), exact for i <= n
    let mut pow3 = 1u128;
    for i in 0..=d.min(n) {
        weight_bounded_dim = weight_bounded_dim.saturating_add(binom.saturating_mul(pow3));
        binom = binom
            .saturating_mul((n - i) as u128)
            .checked_div((i + 1) as u128)
            .unwrap_or(u128::MAX);
        pow3 = pow3.saturating_mul(3);
    }

    let g = SymmetryGroup::new(lattice, config.symmetry_options());
    let mut interner = KeyInterner::new();
    let basis = match lattice {
        Lattice::Chain { l } => build_1d(l, config.degree, config.range)?,
        Lattice::Square { l } => build_2d(l, config.degree)?,
    };
    let basis_size = basis.len();
    let (part_sizes, blocks) = if config.translations {
        let pb = partition(&basis)?;
        let sizes = pb.parts.iter().map(|p| p.size()).collect();
        (sizes, moment_blocks(&pb, &g, &mut interner, config.realify)?)
    } else {
        (
            vec![basis_size],
            vec![unreduced_moment_block(&basis, &g, &mut interner)?],
        )
    };
    let mut max_block = 0;
    let mut max_emitted = 0;
    let mut dim_mult_total = 0;
    let mut realified_count = 0;
    for b in &blocks {
        max_block = max_block.max(b.hermitian_dim());
        max_emitted = max_emitted.max(b.dim());
        dim_mult_total += b.hermitian_dim() * b.multiplicity();
        if b.dim() != b.hermitian_dim() {
            realified_count += 1;
        }
    }
    Ok(BlockLedger {
        sites: n,
        degree: d,
        range: config.range,
        original_dim,
        weight_bounded_dim,
        basis_size,
        part_sizes,
        block_count: blocks.len(),
        max_block,
        dim_mult_total,
        realified_count,
        max_emitted,
    })
}

/// Solver-path-independent solve output, before validation and constants.
struct RawSolution {
    status: SolveStatus,
    objective: f64,
    certified: f64,
    values: Vec<f64>,
    iterations: u32,
    solve_time: f64,
    primal_residual: f64,
    dual_residual: f64,
}
