//! Relaxation configuration: hierarchy parameters, symmetry toggles, and
//! optional constraint families, with model-aware defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelFamily, ModelSpec};
use crate::symmetry::SymmetryOptions;

/// Which monomials index the commutator equality family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommutatorSet {
    /// No commutator equalities.
    None,
    /// All basis monomials of degree at most 2.
    Deg2,
    /// Every basis monomial.
    Basis,
}

/// Which monomials border the optimality block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimalitySet {
    /// Identity, all single-site letters, and nearest-neighbour pairs.
    Minimal,
}

/// Full description of one relaxation instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RelaxationConfig {
    /// Maximum contiguous word length in the moment basis.
    pub degree: u32,
    /// Maximum pair separation for two-site basis words (one-dimensional
    /// lattices only; ignored on the square lattice).
    pub range: u32,
    /// Exploit lattice translations.
    pub translations: bool,
    /// Exploit the mirror (chains) or dihedral (square) point group.
    pub point_group: bool,
    /// Exploit the six simultaneous axis relabelings.
    pub axis_permutations: bool,
    /// Identify conjugate-related moments (must stay on; the real
    /// parametrization depends on it).
    pub conjugates: bool,
    /// Zero moments odd under the two-axis sign flips.
    pub xi_zero: bool,
    /// Zero moments odd under the single-axis sign flips.
    pub eta_zero: bool,
    /// Reduced-density-matrix window sizes to impose (each `k` adds the
    /// positivity of the `k`-site reduced state).
    pub rdm: Vec<u32>,
    /// Commutator equality family.
    pub commutators: CommutatorSet,
    /// Add the ground-state optimality block.
    pub optimality: bool,
    /// Border set for the optimality block.
    pub optimality_set: OptimalitySet,
    /// Realify Hermitian frequency blocks into symmetric doubles; when
    /// false the compiler errors on genuinely complex blocks.
    pub realify: bool,
    /// Interior-point feasibility tolerance (also used when validating
    /// returned solutions).
    pub feas_tol: f64,
    /// Relative duality-gap tolerance.
    pub gap_tol: f64,
}

impl Default for RelaxationConfig {
    fn default() -> Self {
        RelaxationConfig {
            degree: 2,
            range: 1,
            translations: true,
            point_group: true,
            axis_permutations: true,
            conjugates: true,
            xi_zero: true,
            eta_zero: true,
            rdm: Vec::new(),
            commutators: CommutatorSet::None,
            optimality: false,
            optimality_set: OptimalitySet::Minimal,
            realify: true,
            feas_tol: 1e-7,
            gap_tol: 1e-8,
        }
    }
}

impl RelaxationConfig {
    /// The default configuration tuned per model family: frustrated chains
    /// keep the optimality block off in the window where it can pin the
    /// relaxation to a non-global dimerized branch, and the frustrated
    /// square model also drops the commutator equalities.
    pub fn default_for(model: &ModelSpec) -> Self {
        let mut cfg = RelaxationConfig::default();
        match model.family {
            ModelFamily::Chain => {
                cfg.commutators = CommutatorSet::Deg2;
                cfg.optimality = true;
            }
            ModelFamily::ChainJ1J2 => {
                cfg.commutators = CommutatorSet::Deg2;
                cfg.optimality = !(0.1..=0.9).contains(&model.j2);
            }
            ModelFamily::Square => {
                cfg.commutators = CommutatorSet::Deg2;
                cfg.optimality = true;
            }
            ModelFamily::SquareJ1J2 => {
                cfg.commutators = CommutatorSet::None;
                cfg.optimality = false;
            }
        }
        cfg
    }

    /// Everything on: full symmetry reduction, the largest desk-scale basis
    /// (degree 4 with range-2 pairs on chains), RDM windows up to five sites
    /// (four on the square lattice), commutators on the whole basis, and the
    /// optimality block where `default_for` enables it.
    pub fn full(model: &ModelSpec) -> Self {
        let mut cfg = Self::default_for(model);
        match model.family {
            ModelFamily::Chain | ModelFamily::ChainJ1J2 => {
                cfg.degree = 4;
                cfg.range = 2;
                cfg.rdm = vec![2, 3, 4, 5];
            }
            ModelFamily::Square | ModelFamily::SquareJ1J2 => {
                cfg.rdm = vec![2, 3, 4];
            }
        }
        if cfg.commutators != CommutatorSet::None {
            cfg.commutators = CommutatorSet::Basis;
        }
        cfg
    }

    /// Symmetry options implied by the toggles.
    pub fn symmetry_options(&self) -> SymmetryOptions {
        SymmetryOptions {
            translations: self.translations,
            point_group: self.point_group,
            axis_permutations: self.axis_permutations,
            xi_zero: self.xi_zero,
            eta_zero: self.eta_zero,
        }
    }

    /// Validate internal consistency for a given model.
    pub fn validate(&self, model: &ModelSpec) -> Result<()> {
        model.validate()?;
        if self.degree == 0 {
            return Err(Error::InvalidConfig("degree must be at least 1".into()));
        }
        if !self.conjugates {
            return Err(Error::InvalidConfig(
                "conjugate identification cannot be disabled: the real \
                 parametrization of the moment matrix depends on it"
                    .into(),
            ));
        }
        if self.translations && (!self.xi_zero || !self.eta_zero) {
            return Err(Error::InvalidConfig(
                "the translation-reduced compiler requires both sign-symmetry \
                 zero rules; disable translations for a sign-free relaxation"
                    .into(),
            ));
        }
        if self.optimality && !self.translations {
            return Err(Error::InvalidConfig(
                "the optimality block compiler requires translation reduction".into(),
            ));
        }
        for &k in &self.rdm {
            if k == 0 {
                return Err(Error::InvalidConfig("rdm window size 0".into()));
            }
            let max = if model.family.is_two_dimensional() {
                4
            } else {
                8
            };
            if k > max {
                return Err(Error::InvalidConfig(format!(
                    "rdm window size {k} exceeds the supported maximum {max}"
                )));
            }
        }
        if !(self.feas_tol.is_finite() && self.feas_tol > 0.0) {
            return Err(Error::InvalidConfig("feas_tol must be positive".into()));
        }
        if !(self.gap_tol.is_finite() && self.gap_tol > 0.0) {
            return Err(Error::InvalidConfig("gap_tol must be positive".into()));
        }
        Ok(())
    }
}
