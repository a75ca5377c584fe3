//! Lattice symmetry groups and canonical moment keys.
//!
//! The moment relaxations identify `l(u)` across the orbit of `u` under a
//! group of lattice translations, point-group operations (a mirror on chains,
//! the dihedral group on the torus), and the six global axis permutations.
//! Words with a nontrivial sign-symmetry signature have forced-zero moments.
//! A [`MomentKey`] is the canonical representative of an orbit (its minimum
//! under the global monomial order) plus the forced-zero flag.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::pauli::{Axis, Lattice, PauliMonomial, Shift, Site};

/// Point-group operation on lattice sites (origin-fixing).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PointOp {
    /// Identity.
    Identity,
    /// Chain reflection `i -> -i` (0-based), fixing site 1.
    Mirror,
    /// Torus dihedral operation: optionally transpose `(r,c) -> (c,r)`, then
    /// rotate by `quarter_turns` quarter turns `(r,c) -> (-c,r)`.
    Dihedral { quarter_turns: u8, transpose: bool },
}

impl PointOp {
    /// Image of a site.
    pub fn apply(&self, lattice: Lattice, s: Site) -> Site {
        match *self {
            PointOp::Identity => s,
            PointOp::Mirror => {
                debug_assert!(!lattice.is_square());
                let l = lattice.length();
                Site((l - s.0 % l) % l)
            }
            PointOp::Dihedral {
                quarter_turns,
                transpose,
            } => {
                debug_assert!(lattice.is_square());
                let l = lattice.length();
                let (mut r, mut c) = lattice.coords(s);
                if transpose {
                    std::mem::swap(&mut r, &mut c);
                }
                for _ in 0..quarter_turns % 4 {
                    let (nr, nc) = ((l - c) % l, r);
                    r = nr;
                    c = nc;
                }
                Site(r * l + c)
            }
        }
    }

    /// The point group of a lattice: `{id, mirror}` for chains, the eight
    /// dihedral operations for the torus.
    pub fn group(lattice: Lattice) -> Vec<PointOp> {
        if lattice.is_square() {
            let mut ops = Vec::with_capacity(8);
            for &transpose in &[false, true] {
                for quarter_turns in 0..4 {
                    ops.push(PointOp::Dihedral {
                        quarter_turns,
                        transpose,
                    });
                }
            }
            ops
        } else {
            vec![PointOp::Identity, PointOp::Mirror]
        }
    }
}

/// One of the six global permutations of the Pauli axes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AxisPerm(u8);

const AXIS_PERMS: [[Axis; 3]; 6] = [
    [Axis::X, Axis::Y, Axis::Z],
    [Axis::X, Axis::Z, Axis::Y],
    [Axis::Y, Axis::X, Axis::Z],
    [Axis::Y, Axis::Z, Axis::X],
    [Axis::Z, Axis::X, Axis::Y],
    [Axis::Z, Axis::Y, Axis::X],
];

impl AxisPerm {
    /// The identity permutation.
    pub const IDENTITY: AxisPerm = AxisPerm(0);

    /// All six permutations, identity first.
    pub fn all() -> impl Iterator<Item = AxisPerm> {
        (0..6).map(AxisPerm)
    }

    /// Image of an axis.
    pub fn apply(self, a: Axis) -> Axis {
        let table = &AXIS_PERMS[self.0 as usize];
        match a {
            Axis::X => table[0],
            Axis::Y => table[1],
            Axis::Z => table[2],
        }
    }
}

/// A single symmetry operation: point op, then translation, with a global
/// axis permutation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    /// Lattice translation applied after the point operation.
    pub shift: Shift,
    /// Point-group operation applied first.
    pub point: PointOp,
    /// Global axis permutation.
    pub axes: AxisPerm,
}

impl GroupElement {
    /// Image of a monomial. Site maps are bijections and the phase is kept
    /// unchanged, so normal forms map to normal forms.
    pub fn apply(&self, m: &PauliMonomial) -> PauliMonomial {
        let lattice = m.lattice();
        let letters: Vec<(Site, Axis)> = m
            .letters()
            .iter()
            .map(|&(s, a)| {
                (
                    lattice.translate(self.point.apply(lattice, s), self.shift),
                    self.axes.apply(a),
                )
            })
            .collect();
        PauliMonomial::from_letters(lattice, m.phase(), &letters)
            .expect("bijective site relabeling preserves distinctness")
    }
}

/// Which identifications and forced-zero rules are active.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SymmetryOptions {
    /// Identify moments across lattice translations.
    pub translations: bool,
    /// Identify moments across the point group.
    pub point_group: bool,
    /// Identify moments across global axis permutations.
    pub axis_permutations: bool,
    /// Force `l(u) = 0` when `xi(u)` is nontrivial (model sign symmetry).
    pub xi_zero: bool,
    /// Force `l(u) = 0` when `eta(u)` is nontrivial (Hamiltonian sign
    /// symmetry); equivalently, when any axis count is odd.
    pub eta_zero: bool,
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        SymmetryOptions {
            translations: true,
            point_group: true,
            axis_permutations: true,
            xi_zero: true,
            eta_zero: true,
        }
    }
}

impl SymmetryOptions {
    /// Everything off: keys are the words themselves and nothing is zeroed.
    pub fn trivial() -> Self {
        SymmetryOptions {
            translations: false,
            point_group: false,
            axis_permutations: false,
            xi_zero: false,
            eta_zero: false,
        }
    }
}

/// Canonical representative of a moment orbit plus its forced-zero flag.
///
/// Keys compare and hash by the representative word, so they are usable as
/// map keys for moment variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct MomentKey {
    rep: Arc<PauliMonomial>,
    zero: bool,
}

impl MomentKey {
    /// The orbit-minimal phase-free word.
    pub fn representative(&self) -> &PauliMonomial {
        &self.rep
    }

    /// Whether the moment is forced to zero by a sign-symmetry rule.
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Whether this is the identity key (`l(1) = 1`).
    pub fn is_identity(&self) -> bool {
        self.rep.is_identity_word()
    }
}

impl fmt::Display for MomentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            write!(f, "0[{}]", self.rep)
        } else {
            write!(f, "{}", self.rep)
        }
    }
}

/// The symmetry group of a model on a lattice, with a memoized canonical-key
/// map. The memo table is behind a mutex and safe for concurrent use.
pub struct SymmetryGroup {
    lattice: Lattice,
    options: SymmetryOptions,
    elements: Vec<GroupElement>,
    cache: Mutex<HashMap<PauliMonomial, MomentKey>>,
}

impl SymmetryGroup {
    /// Build the group selected by `options` on `lattice`.
    pub fn new(lattice: Lattice, options: SymmetryOptions) -> Self {
        let shifts: Vec<Shift> = if options.translations {
            lattice.shifts()
        } else {
            vec![Shift(0, 0)]
        };
        let points: Vec<PointOp> = if options.point_group {
            PointOp::group(lattice)
        } else {
            vec![PointOp::Identity]
        };
        let axes: Vec<AxisPerm> = if options.axis_permutations {
            AxisPerm::all().collect()
        } else {
            vec![AxisPerm::IDENTITY]
        };
        let mut elements = Vec::with_capacity(shifts.len() * points.len() * axes.len());
        for &point in &points {
            for &shift in &shifts {
                for &ax in &axes {
                    elements.push(GroupElement {
                        shift,
                        point,
                        axes: ax,
                    });
                }
            }
        }
        SymmetryGroup {
            lattice,
            options,
            elements,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// The fully reduced group (all identifications and zero rules).
    pub fn full(lattice: Lattice) -> Self {
        SymmetryGroup::new(lattice, SymmetryOptions::default())
    }

    /// The trivial group (no identifications, no zero rules).
    pub fn trivial(lattice: Lattice) -> Self {
        SymmetryGroup::new(lattice, SymmetryOptions::trivial())
    }

    /// The lattice the group acts on.
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// Active options.
    pub fn options(&self) -> SymmetryOptions {
        self.options
    }

    /// All group elements.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Forced-zero test for a word under the active rules.
    pub fn forces_zero(&self, m: &PauliMonomial) -> bool {
        let sig = m.signature();
        (self.options.xi_zero && !sig.xi_trivial()) || (self.options.eta_zero && !sig.eta_trivial())
    }

    /// Canonical key of a monomial's phase-free word: the orbit minimum under
    /// the global monomial order, plus the forced-zero flag. Memoized for the
    /// whole orbit on first computation.
    pub fn canonical_key(&self, m: &PauliMonomial) -> MomentKey {
        let word = m.word();
        if let Some(k) = self.cache.lock().unwrap().get(&word) {
            return k.clone();
        }
        let mut orbit: Vec<PauliMonomial> = self.elements.iter().map(|g| g.apply(&word)).collect();
        orbit.sort();
        orbit.dedup();
        let rep = Arc::new(orbit[0].clone());
        let zero = self.forces_zero(&word);
        let key = MomentKey { rep, zero };
        let mut cache = self.cache.lock().unwrap();
        for member in orbit {
            cache.insert(member, key.clone());
        }
        key
    }

    /// Distinct orbit members of a word, sorted.
    pub fn orbit(&self, m: &PauliMonomial) -> Vec<PauliMonomial> {
        let word = m.word();
        let mut orbit: Vec<PauliMonomial> = self.elements.iter().map(|g| g.apply(&word)).collect();
        orbit.sort();
        orbit.dedup();
        orbit
    }

    /// Number of memoized words (for diagnostics).
    pub fn cache_len(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}
