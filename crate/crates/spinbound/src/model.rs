//! Model families: Heisenberg chains and square-lattice antiferromagnets,
//! optionally frustrated by a next-nearest-neighbor coupling `J2`.
//!
//! Hamiltonians are sums of two-site couplings
//! `J/4 * sum_a sigma_i^a sigma_j^a` over bonds with periodic boundary
//! conditions and `J1 = 1`. [`ModelSpec::terms`] exposes the raw weighted
//! monomials; [`ModelSpec::hamiltonian`] and [`ModelSpec::observable`]
//! compile them to canonicalized linear expressions in moment variables.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::expr::{KeyInterner, LinExpr};
use crate::pauli::{Axis, Lattice, PauliMonomial, Phase, Site};
use crate::symmetry::SymmetryGroup;

/// The four supported model families.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    /// Nearest-neighbor chain.
    Chain,
    /// Chain with next-nearest-neighbor coupling `J2`.
    ChainJ1J2,
    /// Nearest-neighbor square lattice.
    Square,
    /// Square lattice with diagonal coupling `J2`.
    SquareJ1J2,
}

impl ModelFamily {
    /// Whether the family lives on the torus.
    pub fn is_two_dimensional(self) -> bool {
        matches!(self, ModelFamily::Square | ModelFamily::SquareJ1J2)
    }

    /// Whether the family has a `J2` coupling.
    pub fn has_j2(self) -> bool {
        matches!(self, ModelFamily::ChainJ1J2 | ModelFamily::SquareJ1J2)
    }

    /// Stable machine name.
    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Chain => "chain",
            ModelFamily::ChainJ1J2 => "chain-j1j2",
            ModelFamily::Square => "square",
            ModelFamily::SquareJ1J2 => "square-j1j2",
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(ModelFamily::Chain),
            "chain-j1j2" => Ok(ModelFamily::ChainJ1J2),
            "square" => Ok(ModelFamily::Square),
            "square-j1j2" => Ok(ModelFamily::SquareJ1J2),
            other => Err(Error::InvalidConfig(format!(
                "unknown model family {other:?} (expected chain, chain-j1j2, square, square-j1j2)"
            ))),
        }
    }
}

/// A concrete model instance: family, linear extent, and coupling.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct ModelSpec {
    /// Model family.
    pub family: ModelFamily,
    /// Ring length or torus side.
    pub l: u32,
    /// Next-nearest-neighbor coupling (0 for the plain families).
    pub j2: f64,
}

impl ModelSpec {
    /// Validated constructor. `j2` must be 0 for the families without a `J2`
    /// coupling.
    pub fn new(family: ModelFamily, l: u32, j2: f64) -> Result<Self> {
        let spec = ModelSpec { family, l, j2 };
        spec.validate()?;
        Ok(spec)
    }

    /// Check the instance parameters.
    pub fn validate(&self) -> Result<()> {
        if self.family.is_two_dimensional() {
            if self.l < 4 {
                return Err(Error::InvalidConfig(format!(
                    "torus side L={} < 4 for {}",
                    self.l, self.family
                )));
            }
        } else if self.l < 3 {
            return Err(Error::InvalidConfig(format!(
                "chain length L={} < 3 for {}",
                self.l, self.family
            )));
        }
        if !self.j2.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite J2 = {}", self.j2)));
        }
        if !self.family.has_j2() && self.j2 != 0.0 {
            return Err(Error::InvalidConfig(format!(
                "family {} takes no J2 coupling (got {})",
                self.family, self.j2
            )));
        }
        Ok(())
    }

    /// The lattice of this instance.
    pub fn lattice(&self) -> Lattice {
        if self.family.is_two_dimensional() {
            Lattice::Square { l: self.l }
        } else {
            Lattice::Chain { l: self.l }
        }
    }

    /// Number of spins.
    pub fn site_count(&self) -> u32 {
        self.lattice().site_count()
    }

    /// Number of raw two-site couplings (small lattices may enumerate the
    /// same site pair twice; periodic sums genuinely do).
    pub fn bond_count(&self) -> usize {
        let l = self.l as usize;
        match self.family {
            ModelFamily::Chain => l,
            ModelFamily::ChainJ1J2 => 2 * l,
            ModelFamily::Square => 2 * l * l,
            ModelFamily::SquareJ1J2 => 4 * l * l,
        }
    }

    /// Raw site-pair couplings as `(weight, site, site)` with `weight` the
    /// full coupling prefactor `J/4`.
    fn bonds(&self) -> Vec<(f64, Site, Site)> {
        let lattice = self.lattice();
        let mut bonds = Vec::with_capacity(self.bond_count());
        match self.family {
            ModelFamily::Chain | ModelFamily::ChainJ1J2 => {
                for i in 1..=self.l as i64 {
                    bonds.push((0.25, lattice.site_1d(i), lattice.site_1d(i + 1)));
                }
                if self.family == ModelFamily::ChainJ1J2 {
                    for i in 1..=self.l as i64 {
                        bonds.push((0.25 * self.j2, lattice.site_1d(i), lattice.site_1d(i + 2)));
                    }
                }
            }
            ModelFamily::Square | ModelFamily::SquareJ1J2 => {
                for r in 1..=self.l as i64 {
                    for c in 1..=self.l as i64 {
                        let p = lattice.site_2d(r, c);
                        bonds.push((0.25, p, lattice.site_2d(r, c + 1)));
                        bonds.push((0.25, p, lattice.site_2d(r + 1, c)));
                    }
                }
                if self.family == ModelFamily::SquareJ1J2 {
                    for r in 1..=self.l as i64 {
                        for c in 1..=self.l as i64 {
                            let p = lattice.site_2d(r, c);
                            bonds.push((0.25 * self.j2, p, lattice.site_2d(r + 1, c + 1)));
                            bonds.push((0.25 * self.j2, p, lattice.site_2d(r + 1, c - 1)));
                        }
                    }
                }
            }
        }
        bonds
    }

    /// Weighted Hamiltonian monomials: three axis terms per bond.
    pub fn terms(&self) -> Vec<(f64, PauliMonomial)> {
        let lattice = self.lattice();
        let mut out = Vec::with_capacity(3 * self.bond_count());
        for (w, p, q) in self.bonds() {
            for &a in &Axis::ALL {
                let m = PauliMonomial::from_letters(lattice, Phase::One, &[(p, a), (q, a)])
                    .expect("bond sites are distinct");
                out.push((w, m));
            }
        }
        out
    }

    /// Canonicalized Hamiltonian expression `l(H)`.
    pub fn hamiltonian(&self, g: &SymmetryGroup, interner: &mut KeyInterner) -> Result<LinExpr> {
        if g.lattice() != self.lattice() {
            return Err(Error::LatticeMismatch(g.lattice(), self.lattice()));
        }
        let mut expr = LinExpr::zero();
        for (w, m) in self.terms() {
            let key = g.canonical_key(&m);
            if key.is_zero() {
                return Err(Error::StructureFault(format!(
                    "Hamiltonian term {m} was zeroed by a sign rule; the models' terms all have even axis counts"
                )));
            }
            expr.add_scaled(&crate::expr::key_expr(&key, interner), w);
        }
        Ok(expr)
    }

    /// Canonicalized observable expression.
    pub fn observable(
        &self,
        obs: Observable,
        g: &SymmetryGroup,
        interner: &mut KeyInterner,
    ) -> Result<LinExpr> {
        if g.lattice() != self.lattice() {
            return Err(Error::LatticeMismatch(g.lattice(), self.lattice()));
        }
        let lattice = self.lattice();
        let two_site = |i: Site, j: Site, a: Axis| -> Result<PauliMonomial> {
            PauliMonomial::from_letters(lattice, Phase::One, &[(i, a), (j, a)])
        };
        match obs {
            Observable::C1 | Observable::C2 => {
                if self.family.is_two_dimensional() {
                    return Err(Error::InvalidConfig(format!(
                        "{} is defined for chain families only",
                        obs
                    )));
                }
                let dist = if obs == Observable::C1 { 1 } else { 2 };
                let m = two_site(lattice.site_1d(1), lattice.site_1d(1 + dist), Axis::X)?;
                let key = g.canonical_key(&m);
                Ok(crate::expr::key_expr(&key, interner).scaled(0.25))
            }
            Observable::CMax => {
                if !self.family.is_two_dimensional() {
                    return Err(Error::InvalidConfig(
                        "cmax is defined for square families only".into(),
                    ));
                }
                if !self.l.is_multiple_of(2) {
                    return Err(Error::InvalidConfig("cmax needs an even torus side".into()));
                }
                let half = (self.l / 2) as i64;
                let m = two_site(
                    lattice.site_2d(1, 1),
                    lattice.site_2d(1 + half, 1 + half),
                    Axis::X,
                )?;
                let key = g.canonical_key(&m);
                Ok(crate::expr::key_expr(&key, interner).scaled(0.25))
            }
            Observable::SPiPi => {
                if !self.l.is_multiple_of(2) {
                    return Err(Error::InvalidConfig(
                        "the staggered structure factor needs an even extent".into(),
                    ));
                }
                let n = self.site_count() as f64;
                let scale = 1.0 / (4.0 * n * n);
                let mut expr = LinExpr::zero();
                let sites: Vec<Site> = lattice.sites().collect();
                for &i in &sites {
                    let (ri, ci) = lattice.coords(i);
                    for &j in &sites {
                        let (rj, cj) = lattice.coords(j);
                        let sign = if (ri + ci + rj + cj) % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        if i == j {
                            expr.add_constant(3.0 * sign * scale);
                            continue;
                        }
                        for &a in &Axis::ALL {
                            let key = g.canonical_key(&two_site(i, j, a)?);
                            expr.add_scaled(&crate::expr::key_expr(&key, interner), sign * scale);
                        }
                    }
                }
                Ok(expr)
            }
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family.has_j2() {
            write!(f, "{} L={} J2={}", self.family, self.l, self.j2)
        } else {
            write!(f, "{} L={}", self.family, self.l)
        }
    }
}

/// Ground-state observables with certified two-sided bounds.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    /// Nearest-neighbor correlator `1/4 <sigma_1^x sigma_2^x>` (chains).
    C1,
    /// Next-nearest correlator `1/4 <sigma_1^x sigma_3^x>` (chains).
    C2,
    /// Maximal-distance correlator
    /// `1/4 <sigma_(1,1)^x sigma_(L/2+1,L/2+1)^x>` (torus, even L).
    CMax,
    /// Staggered structure factor
    /// `1/(4N^2) sum_{ij} e^{i pi (i - j)} sum_a <sigma_i^a sigma_j^a>`.
    SPiPi,
}

impl Observable {
    /// Stable machine name.
    pub fn name(self) -> &'static str {
        match self {
            Observable::C1 => "c1",
            Observable::C2 => "c2",
            Observable::CMax => "cmax",
            Observable::SPiPi => "spipi",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c1" => Ok(Observable::C1),
            "c2" => Ok(Observable::C2),
            "cmax" => Ok(Observable::CMax),
            "spipi" => Ok(Observable::SPiPi),
            other => Err(Error::InvalidConfig(format!(
                "unknown observable {other:?} (expected c1, c2, cmax, spipi)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::SymmetryOptions;

    fn chain(l: u32) -> ModelSpec {
        ModelSpec::new(ModelFamily::Chain, l, 0.0).unwrap()
    }

    #[test]
    fn bond_and_term_counts() {
        assert_eq!(chain(10).terms().len(), 30);
        let m = ModelSpec::new(ModelFamily::ChainJ1J2, 12, 0.5).unwrap();
        assert_eq!(m.terms().len(), 72);
        let s = ModelSpec::new(ModelFamily::Square, 4, 0.0).unwrap();
        assert_eq!(s.terms().len(), 96);
        let s2 = ModelSpec::new(ModelFamily::SquareJ1J2, 4, 0.3).unwrap();
        assert_eq!(s2.terms().len(), 192);
    }

    #[test]
    fn validation() {
        assert!(ModelSpec::new(ModelFamily::Chain, 2, 0.0).is_err());
        assert!(ModelSpec::new(ModelFamily::Chain, 3, 0.5).is_err());
        assert!(ModelSpec::new(ModelFamily::Square, 3, 0.0).is_err());
        assert!(ModelSpec::new(ModelFamily::ChainJ1J2, 8, f64::NAN).is_err());
        assert!(ModelSpec::new(ModelFamily::ChainJ1J2, 8, -0.5).is_ok());
    }

    #[test]
    fn chain_objective_collapses_to_single_key() {
        let m = chain(8);
        let g = SymmetryGroup::full(m.lattice());
        let mut it = KeyInterner::new();
        let h = m.hamiltonian(&g, &mut it).unwrap();
        // All 24 terms identify to l(X1 X2) with total weight 3L/4.
        assert_eq!(it.len(), 1);
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.constant_part(), 0.0);
        assert!((h.terms()[0].1 - 6.0).abs() < 1e-14);
    }

    #[test]
    fn j1j2_objective_has_two_keys() {
        let m = ModelSpec::new(ModelFamily::ChainJ1J2, 10, 0.4).unwrap();
        let g = SymmetryGroup::full(m.lattice());
        let mut it = KeyInterner::new();
        let h = m.hamiltonian(&g, &mut it).unwrap();
        assert_eq!(it.len(), 2);
        let coeffs: Vec<f64> = h.terms().iter().map(|&(_, c)| c).collect();
        assert!((coeffs[0] - 7.5).abs() < 1e-12); // 3L/4
        assert!((coeffs[1] - 3.0).abs() < 1e-12); // 3L/4 * J2
    }

    #[test]
    fn hamiltonian_is_group_invariant() {
        // The canonicalized expression must be identical when built from any
        // translated/reflected enumeration of the bonds; spot-check by
        // comparing against a second group with fewer identifications.
        let m = ModelSpec::new(ModelFamily::SquareJ1J2, 4, 0.7).unwrap();
        let g = SymmetryGroup::full(m.lattice());
        let mut it = KeyInterner::new();
        let h = m.hamiltonian(&g, &mut it).unwrap();
        // total weight is preserved: sum of coefficients = sum of raw weights
        // when every key collapses translation-equivalent terms.
        let raw: f64 = m.terms().iter().map(|&(w, _)| w).sum();
        let collapsed: f64 = h.terms().iter().map(|&(_, c)| c).sum();
        assert!((raw - collapsed).abs() < 1e-10);
    }

    #[test]
    fn observables_shapes() {
        let m = chain(10);
        let g = SymmetryGroup::full(m.lattice());
        let mut it = KeyInterner::new();
        let c1 = m.observable(Observable::C1, &g, &mut it).unwrap();
        assert_eq!(c1.terms().len(), 1);
        assert_eq!(c1.terms()[0].1, 0.25);
        let c2 = m.observable(Observable::C2, &g, &mut it).unwrap();
        assert_eq!(c2.terms().len(), 1);
        assert_ne!(c1.terms()[0].0, c2.terms()[0].0);

        let s = m.observable(Observable::SPiPi, &g, &mut it).unwrap();
        // Constant part: 3/(4N) since the diagonal has sign +1.
        assert!((s.constant_part() - 3.0 / 40.0).abs() < 1e-14);

        assert!(m.observable(Observable::CMax, &g, &mut it).is_err());
        let sq = ModelSpec::new(ModelFamily::Square, 4, 0.0).unwrap();
        let gs = SymmetryGroup::full(sq.lattice());
        let mut it2 = KeyInterner::new();
        let cm = sq.observable(Observable::CMax, &gs, &mut it2).unwrap();
        assert_eq!(cm.terms().len(), 1);
        assert!(sq.observable(Observable::C1, &gs, &mut it2).is_err());
    }

    #[test]
    fn spipi_even_extent_required() {
        let m = chain(9);
        let g = SymmetryGroup::full(m.lattice());
        let mut it = KeyInterner::new();
        assert!(m.observable(Observable::SPiPi, &g, &mut it).is_err());
    }

    #[test]
    fn names_round_trip() {
        for f in [
            ModelFamily::Chain,
            ModelFamily::ChainJ1J2,
            ModelFamily::Square,
            ModelFamily::SquareJ1J2,
        ] {
            assert_eq!(f.name().parse::<ModelFamily>().unwrap(), f);
        }
        for o in [
            Observable::C1,
            Observable::C2,
            Observable::CMax,
            Observable::SPiPi,
        ] {
            assert_eq!(o.name().parse::<Observable>().unwrap(), o);
        }
    }

    #[test]
    fn hamiltonian_without_sign_rules_matches() {
        // The collapsed objective evaluates identically whichever toggles are
        // active, because the identifications only merge equal moments; here
        // we just confirm translation-only identification gives the same
        // total weight split across more keys.
        let m = ModelSpec::new(ModelFamily::ChainJ1J2, 8, 0.3).unwrap();
        let g = SymmetryGroup::new(
            m.lattice(),
            SymmetryOptions {
                axis_permutations: false,
                ..SymmetryOptions::default()
            },
        );
        let mut it = KeyInterner::new();
        let h = m.hamiltonian(&g, &mut it).unwrap();
        assert_eq!(it.len(), 6); // xx, yy... no: x/y/z per distance = 2 distances x 3 axes
        let total: f64 = h.terms().iter().map(|&(_, c)| c).sum();
        assert!((total - (6.0 + 1.8)).abs() < 1e-12);
    }
}
