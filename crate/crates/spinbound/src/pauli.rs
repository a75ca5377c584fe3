//! Pauli monomials on periodic lattices with exact phase arithmetic.
//!
//! A monomial is a phase in `{1, i, -1, -i}` times a word of single-site Pauli
//! letters with strictly increasing site indices (the normal form). Products
//! are computed by a sorted merge with the single-site multiplication table,
//! so phases stay exact group elements and are never represented as floats.

use std::cmp::Ordering;
use std::fmt;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest site count for which dense `2^n x 2^n` matrices may be built.
pub const MATRIX_REP_MAX_SITES: u32 = 14;

/// Periodic lattice geometry: a ring of `l` sites or an `l x l` torus.
///
/// Sites are addressed by a linearized 0-based index; the square lattice is
/// row-major. Human-facing coordinates (rendering, site constructors) are
/// 1-based.
#[derive(
    Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum Lattice {
    /// 1D ring with `l` sites.
    Chain { l: u32 },
    /// 2D torus with `l x l` sites.
    Square { l: u32 },
}

impl Lattice {
    /// Number of sites.
    pub fn site_count(&self) -> u32 {
        match *self {
            Lattice::Chain { l } => l,
            Lattice::Square { l } => l * l,
        }
    }

    /// Linear extent (ring length or torus side).
    pub fn length(&self) -> u32 {
        match *self {
            Lattice::Chain { l } | Lattice::Square { l } => l,
        }
    }

    /// Whether this is the 2D torus.
    pub fn is_square(&self) -> bool {
        matches!(self, Lattice::Square { .. })
    }

    /// Site from a 1-based ring coordinate, wrapped periodically.
    pub fn site_1d(&self, i: i64) -> Site {
        let l = self.length() as i64;
        Site((i - 1).rem_euclid(l) as u32)
    }

    /// Site from 1-based (row, column) torus coordinates, wrapped periodically.
    pub fn site_2d(&self, row: i64, col: i64) -> Site {
        let l = self.length() as i64;
        let r = (row - 1).rem_euclid(l);
        let c = (col - 1).rem_euclid(l);
        Site((r * l + c) as u32)
    }

    /// 0-based (row, column) of a site; chains report column 0.
    pub fn coords(&self, s: Site) -> (u32, u32) {
        match *self {
            Lattice::Chain { .. } => (s.0, 0),
            Lattice::Square { l } => (s.0 / l, s.0 % l),
        }
    }

    /// All sites in linear order.
    pub fn sites(&self) -> impl Iterator<Item = Site> {
        (0..self.site_count()).map(Site)
    }

    /// All translations of the lattice, identity first, row-major order.
    pub fn shifts(&self) -> Vec<Shift> {
        match *self {
            Lattice::Chain { l } => (0..l).map(|k| Shift(k, 0)).collect(),
            Lattice::Square { l } => {
                let mut out = Vec::with_capacity((l * l) as usize);
                for dr in 0..l {
                    for dc in 0..l {
                        out.push(Shift(dr, dc));
                    }
                }
                out
            }
        }
    }

    /// Translate a site by a shift, wrapping periodically.
    pub fn translate(&self, s: Site, shift: Shift) -> Site {
        match *self {
            Lattice::Chain { l } => Site((s.0 + shift.0) % l),
            Lattice::Square { l } => {
                let (r, c) = self.coords(s);
                Site(((r + shift.0) % l) * l + (c + shift.1) % l)
            }
        }
    }

    /// Compose two shifts (componentwise addition modulo the extent).
    pub fn compose_shifts(&self, a: Shift, b: Shift) -> Shift {
        let l = self.length();
        Shift((a.0 + b.0) % l, (a.1 + b.1) % l)
    }

    /// Inverse of a shift.
    pub fn negate_shift(&self, a: Shift) -> Shift {
        let l = self.length();
        Shift((l - a.0) % l, (l - a.1) % l)
    }

    /// 1-based display form of a site: `3` on chains, `(2,3)` on the torus.
    pub fn render_site(&self, s: Site) -> String {
        match *self {
            Lattice::Chain { .. } => format!("{}", s.0 + 1),
            Lattice::Square { l } => format!("({},{})", s.0 / l + 1, s.0 % l + 1),
        }
    }

    fn check_site(&self, s: Site) -> Result<()> {
        if s.0 < self.site_count() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange {
                site: s.0,
                lattice: *self,
            })
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Lattice::Chain { l } => write!(f, "chain(L={l})"),
            Lattice::Square { l } => write!(f, "square(L={l}x{l})"),
        }
    }
}

/// Linearized 0-based site index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Site(pub u32);

impl Site {
    /// The raw linear index.
    pub fn index(self) -> u32 {
        self.0
    }
}

/// Lattice translation: `(row shift, column shift)`; chains use the first
/// component only.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Shift(pub u32, pub u32);

/// Pauli axis. The ordering `X < Y < Z` is part of the global monomial order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// All axes in order.
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Single-letter label.
    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    fn idx(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Fourth root of unity: the exact phase group `{1, i, -1, -i}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Phase {
    /// `+1`
    One,
    /// `+i`
    I,
    /// `-1`
    MinusOne,
    /// `-i`
    MinusI,
}

impl Phase {
    fn exp(self) -> u8 {
        match self {
            Phase::One => 0,
            Phase::I => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    fn from_exp(k: u8) -> Phase {
        match k % 4 {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    /// Complex conjugate (group inverse).
    pub fn conj(self) -> Phase {
        Phase::from_exp(4 - self.exp())
    }

    /// Whether the phase is `+1` or `-1`.
    pub fn is_real(self) -> bool {
        matches!(self, Phase::One | Phase::MinusOne)
    }

    /// Exact value as a complex number (for numeric evaluation only).
    pub fn value(self) -> Complex64 {
        match self {
            Phase::One => Complex64::new(1.0, 0.0),
            Phase::I => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// Real value of a real phase; `None` for `+i`/`-i`.
    pub fn real_value(self) -> Option<f64> {
        match self {
            Phase::One => Some(1.0),
            Phase::MinusOne => Some(-1.0),
            _ => None,
        }
    }

    /// Display token: `+`, `-`, `+i`, `-i`.
    pub fn token(self) -> &'static str {
        match self {
            Phase::One => "+",
            Phase::MinusOne => "-",
            Phase::I => "+i",
            Phase::MinusI => "-i",
        }
    }
}

/// Single-site product `a * b` as (phase, remaining letter).
///
/// Equal axes square to the identity; unequal axes produce the third with
/// phase `+i` for cyclic order (X,Y,Z) and `-i` otherwise.
fn axis_product(a: Axis, b: Axis) -> (Phase, Option<Axis>) {
    use Axis::*;
    match (a, b) {
        (X, X) | (Y, Y) | (Z, Z) => (Phase::One, None),
        (X, Y) => (Phase::I, Some(Z)),
        (Y, X) => (Phase::MinusI, Some(Z)),
        (Y, Z) => (Phase::I, Some(X)),
        (Z, Y) => (Phase::MinusI, Some(X)),
        (Z, X) => (Phase::I, Some(Y)),
        (X, Z) => (Phase::MinusI, Some(Y)),
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    // The group is written multiplicatively but stored as exponents of `i`,
    // so the product adds exponents.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: Phase) -> Phase {
        Phase::from_exp(self.exp() + other.exp())
    }
}

/// Sign symmetry signature of a monomial word.
///
/// With `(n_x, n_y, n_z)` the per-axis letter counts, `xi` is
/// `((-1)^{n_x+n_y}, (-1)^{n_y+n_z}, (-1)^{n_z+n_x})` and `eta` is
/// `((-1)^{n_x}, (-1)^{n_y}, (-1)^{n_z})`. `xi` is multiplicative under the
/// monomial product; `eta` is multiplicative on disjoint supports.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Signature {
    /// Model sign symmetry character values, each `+1` or `-1`.
    pub xi: [i8; 3],
    /// Hamiltonian sign symmetry character values, each `+1` or `-1`.
    pub eta: [i8; 3],
}

impl Signature {
    /// Whether `xi == (1,1,1)`.
    pub fn xi_trivial(&self) -> bool {
        self.xi == [1, 1, 1]
    }

    /// Whether `eta == (1,1,1)` (equivalently: every axis count is even).
    pub fn eta_trivial(&self) -> bool {
        self.eta == [1, 1, 1]
    }

    /// Index 0..4 of the sign sub-basis this `xi` value selects:
    /// `(1,1,1)`, `(1,-1,-1)`, `(-1,1,-1)`, `(-1,-1,1)` in that order.
    pub fn xi_part(&self) -> usize {
        match self.xi {
            [1, 1, 1] => 0,
            [1, -1, -1] => 1,
            [-1, 1, -1] => 2,
            [-1, -1, 1] => 3,
            // The componentwise product of xi is always +1, so no other
            // combination can occur.
            other => unreachable!("impossible xi value {other:?}"),
        }
    }
}

/// A phase times a normal-form word of Pauli letters.
///
/// Letters are stored with strictly increasing site indices. Equality, hashing
/// and ordering are exact; the ordering is (lattice, degree, letters
/// lexicographic by `(site, axis)`, phase) which restricts to the documented
/// total order on phase-free words of one lattice.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PauliMonomial {
    lattice: Lattice,
    phase: Phase,
    letters: Vec<(Site, Axis)>,
}

impl PauliMonomial {
    /// The identity monomial `+1`.
    pub fn identity(lattice: Lattice) -> Self {
        PauliMonomial {
            lattice,
            phase: Phase::One,
            letters: Vec::new(),
        }
    }

    /// A single Pauli letter with phase `+1`.
    pub fn single(lattice: Lattice, site: Site, axis: Axis) -> Result<Self> {
        lattice.check_site(site)?;
        Ok(PauliMonomial {
            lattice,
            phase: Phase::One,
            letters: vec![(site, axis)],
        })
    }

    /// Normal-form monomial from a phase and letters on distinct sites
    /// (letters may be given in any order).
    pub fn from_letters(lattice: Lattice, phase: Phase, letters: &[(Site, Axis)]) -> Result<Self> {
        let mut ls = letters.to_vec();
        for &(s, _) in &ls {
            lattice.check_site(s)?;
        }
        ls.sort_by_key(|&(s, a)| (s, a));
        for w in ls.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateSite { site: w[0].0 .0 });
            }
        }
        Ok(PauliMonomial {
            lattice,
            phase,
            letters: ls,
        })
    }

    /// The lattice this monomial lives on.
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// The exact phase.
    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// The normal-form letters, strictly increasing in site.
    pub fn letters(&self) -> &[(Site, Axis)] {
        &self.letters
    }

    /// Number of letters.
    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    /// Whether the word part is empty.
    pub fn is_identity_word(&self) -> bool {
        self.letters.is_empty()
    }

    /// Same word with phase replaced.
    pub fn with_phase(&self, phase: Phase) -> Self {
        PauliMonomial {
            lattice: self.lattice,
            phase,
            letters: self.letters.clone(),
        }
    }

    /// The phase-free word part.
    pub fn word(&self) -> Self {
        self.with_phase(Phase::One)
    }

    /// Letter counts per axis `(n_x, n_y, n_z)`.
    pub fn axis_counts(&self) -> [usize; 3] {
        let mut c = [0usize; 3];
        for &(_, a) in &self.letters {
            c[a.idx()] += 1;
        }
        c
    }

    /// Product in normal form, with exact phase bookkeeping.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch(self.lattice, other.lattice));
        }
        let a = &self.letters;
        let b = &other.letters;
        let mut phase = self.phase * other.phase;
        let mut letters = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0usize, 0usize);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    letters.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    letters.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let (p, ax) = axis_product(a[i].1, b[j].1);
                    phase = phase * p;
                    if let Some(ax) = ax {
                        letters.push((a[i].0, ax));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        letters.extend_from_slice(&a[i..]);
        letters.extend_from_slice(&b[j..]);
        Ok(PauliMonomial {
            lattice: self.lattice,
            phase,
            letters,
        })
    }

    /// Hermitian adjoint: letters are self-adjoint, so only the phase
    /// conjugates.
    pub fn adjoint(&self) -> Self {
        self.with_phase(self.phase.conj())
    }

    /// Sign symmetry signature of the word part.
    pub fn signature(&self) -> Signature {
        let c = self.axis_counts();
        let sgn = |k: usize| if k.is_multiple_of(2) { 1i8 } else { -1i8 };
        Signature {
            xi: [sgn(c[0] + c[1]), sgn(c[1] + c[2]), sgn(c[2] + c[0])],
            eta: [sgn(c[0]), sgn(c[1]), sgn(c[2])],
        }
    }

    /// Order on phase-free words: degree first, then lexicographic on the
    /// letter list by `(site, axis)` with `X < Y < Z`.
    pub fn word_cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }

    /// Image of the basis state `|col>` (encoded as bits of `col`, site 1 is
    /// the most significant bit, bit value 0 means spin up): returns
    /// `(row, amp)` with `pi(self) |col> = amp |row>`. The amplitude is an
    /// exact phase.
    pub fn column_action(&self, n: u32, col: usize) -> (usize, Phase) {
        debug_assert!(self.letters.iter().all(|&(s, _)| s.0 < n));
        let mut row = col;
        let mut amp = self.phase;
        for &(site, axis) in &self.letters {
            let bit = n - 1 - site.0;
            let mask = 1usize << bit;
            let down = col & mask != 0;
            match axis {
                Axis::X => {
                    row ^= mask;
                }
                Axis::Y => {
                    // |0> -> i |1>, |1> -> -i |0>.
                    row ^= mask;
                    amp = amp * if down { Phase::MinusI } else { Phase::I };
                }
                Axis::Z => {
                    if down {
                        amp = amp * Phase::MinusOne;
                    }
                }
            }
        }
        (row, amp)
    }

    /// Dense `2^n x 2^n` matrix representation on `n` sites.
    ///
    /// Fails if `n > 14` or the monomial touches a site outside `[1, n]`.
    pub fn matrix_rep(&self, n: u32) -> Result<Mat<Complex64>> {
        if n > MATRIX_REP_MAX_SITES {
            return Err(Error::CapacityExceeded {
                n,
                max: MATRIX_REP_MAX_SITES,
            });
        }
        for &(s, _) in &self.letters {
            if s.0 >= n {
                return Err(Error::SiteOutOfRange {
                    site: s.0,
                    lattice: self.lattice,
                });
            }
        }
        let dim = 1usize << n;
        let mut m = Mat::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            let (row, amp) = self.column_action(n, col);
            m[(row, col)] = amp.value();
        }
        Ok(m)
    }
}

impl PartialOrd for PauliMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lattice
            .cmp(&other.lattice)
            .then_with(|| self.word_cmp(other))
            .then_with(|| self.phase.exp().cmp(&other.phase.exp()))
    }
}

impl fmt::Display for PauliMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "{}1", self.phase.token());
        }
        write!(f, "{}", self.phase.token())?;
        for &(s, a) in &self.letters {
            write!(f, " {}{}", a.letter(), self.lattice.render_site(s))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn chain(l: u32) -> Lattice {
        Lattice::Chain { l }
    }

    fn mono(l: Lattice, letters: &[(u32, Axis)]) -> PauliMonomial {
        let ls: Vec<(Site, Axis)> = letters.iter().map(|&(s, a)| (Site(s), a)).collect();
        PauliMonomial::from_letters(l, Phase::One, &ls).unwrap()
    }

    /// Uniform random monomial with degree at most `max_deg`.
    fn random_monomial(rng: &mut ChaCha8Rng, lattice: Lattice, max_deg: usize) -> PauliMonomial {
        let n = lattice.site_count();
        let deg = rng.random_range(0..=max_deg.min(n as usize));
        let mut sites: Vec<u32> = (0..n).collect();
        for i in 0..deg {
            let j = rng.random_range(i..sites.len());
            sites.swap(i, j);
        }
        let letters: Vec<(Site, Axis)> = sites[..deg]
            .iter()
            .map(|&s| (Site(s), Axis::ALL[rng.random_range(0..3)]))
            .collect();
        let phase = Phase::from_exp(rng.random_range(0..4u32) as u8);
        PauliMonomial::from_letters(lattice, phase, &letters).unwrap()
    }

    #[test]
    fn single_site_products() {
        let l = chain(3);
        let x1 = mono(l, &[(0, Axis::X)]);
        let y1 = mono(l, &[(0, Axis::Y)]);
        let z1 = mono(l, &[(0, Axis::Z)]);

        let xy = x1.multiply(&y1).unwrap();
        assert_eq!(xy.phase(), Phase::I);
        assert_eq!(xy.letters(), &[(Site(0), Axis::Z)]);

        let yx = y1.multiply(&x1).unwrap();
        assert_eq!(yx.phase(), Phase::MinusI);
        assert_eq!(yx.letters(), &[(Site(0), Axis::Z)]);

        let xx = x1.multiply(&x1).unwrap();
        assert_eq!(xx, PauliMonomial::identity(l));

        let zz = z1.multiply(&z1).unwrap();
        assert_eq!(zz, PauliMonomial::identity(l));
    }

    #[test]
    fn disjoint_sites_commute_and_sort() {
        let l = chain(4);
        let z2 = mono(l, &[(1, Axis::Z)]);
        let x1 = mono(l, &[(0, Axis::X)]);
        let p = z2.multiply(&x1).unwrap();
        assert_eq!(p.phase(), Phase::One);
        assert_eq!(p.letters(), &[(Site(0), Axis::X), (Site(1), Axis::Z)]);
        assert_eq!(p, x1.multiply(&z2).unwrap());
    }

    #[test]
    fn adjoint_conjugates_phase_only() {
        let l = chain(3);
        let m = mono(l, &[(0, Axis::Z)]).with_phase(Phase::I);
        let adj = m.adjoint();
        assert_eq!(adj.phase(), Phase::MinusI);
        assert_eq!(adj.letters(), m.letters());
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn signatures_match_axis_counts() {
        let l = chain(3);
        let x = mono(l, &[(0, Axis::X)]);
        assert_eq!(x.signature().xi, [-1, 1, -1]);
        assert_eq!(x.signature().eta, [-1, 1, 1]);
        assert_eq!(x.signature().xi_part(), 2);

        let z = mono(l, &[(0, Axis::Z)]);
        assert_eq!(z.signature().xi, [1, -1, -1]);
        assert_eq!(z.signature().xi_part(), 1);

        let y = mono(l, &[(0, Axis::Y)]);
        assert_eq!(y.signature().xi, [-1, -1, 1]);
        assert_eq!(y.signature().xi_part(), 3);

        let xx = mono(l, &[(0, Axis::X), (1, Axis::X)]);
        assert!(xx.signature().xi_trivial());
        assert!(xx.signature().eta_trivial());
        assert_eq!(xx.signature().xi_part(), 0);

        let xy = mono(l, &[(0, Axis::X), (1, Axis::Y)]);
        assert_eq!(xy.signature().xi, [1, -1, -1]);
        assert!(!xy.signature().eta_trivial());
    }

    #[test]
    fn xi_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = chain(6);
        for _ in 0..500 {
            let a = random_monomial(&mut rng, l, 4);
            let b = random_monomial(&mut rng, l, 4);
            let p = a.multiply(&b).unwrap();
            let (sa, sb, sp) = (a.signature(), b.signature(), p.signature());
            for c in 0..3 {
                assert_eq!(sp.xi[c], sa.xi[c] * sb.xi[c]);
            }
        }
    }

    #[test]
    fn eta_is_multiplicative_on_disjoint_supports() {
        // eta is not multiplicative when supports collide (x*y = i z flips
        // all three counts), so the law is only checked letter-disjointly.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let l = chain(8);
        for _ in 0..500 {
            let a = random_monomial(&mut rng, l, 3);
            let b = random_monomial(&mut rng, l, 3);
            let disjoint = a
                .letters()
                .iter()
                .all(|&(s, _)| b.letters().iter().all(|&(t, _)| s != t));
            if !disjoint {
                continue;
            }
            let p = a.multiply(&b).unwrap();
            let (sa, sb, sp) = (a.signature(), b.signature(), p.signature());
            for c in 0..3 {
                assert_eq!(sp.eta[c], sa.eta[c] * sb.eta[c]);
                assert_eq!(sp.xi[c], sa.xi[c] * sb.xi[c]);
            }
        }
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let l = chain(5);
        let e = PauliMonomial::identity(l);
        for _ in 0..100 {
            let a = random_monomial(&mut rng, l, 4);
            assert_eq!(a.multiply(&e).unwrap(), a);
            assert_eq!(e.multiply(&a).unwrap(), a);
        }
    }

    #[test]
    fn product_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let l = chain(6);
        for _ in 0..300 {
            let a = random_monomial(&mut rng, l, 3);
            let b = random_monomial(&mut rng, l, 3);
            let c = random_monomial(&mut rng, l, 3);
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
        }
    }

    #[test]
    fn adjoint_is_antimultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let l = chain(6);
        for _ in 0..300 {
            let a = random_monomial(&mut rng, l, 3);
            let b = random_monomial(&mut rng, l, 3);
            let lhs = a.multiply(&b).unwrap().adjoint();
            let rhs = b.adjoint().multiply(&a.adjoint()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn duplicate_site_rejected() {
        let l = chain(3);
        let letters = [(Site(1), Axis::X), (Site(1), Axis::Z)];
        assert!(matches!(
            PauliMonomial::from_letters(l, Phase::One, &letters),
            Err(Error::DuplicateSite { site: 1 })
        ));
    }

    #[test]
    fn lattice_mismatch_rejected() {
        let a = PauliMonomial::identity(chain(3));
        let b = PauliMonomial::identity(chain(4));
        assert!(matches!(a.multiply(&b), Err(Error::LatticeMismatch(_, _))));
    }

    #[test]
    fn matrix_rep_small_cases() {
        let l = chain(2);
        // sigma^z on site 1, one qubit: diag(1, -1).
        let z = mono(chain(1), &[(0, Axis::Z)]);
        let m = z.matrix_rep(1).unwrap();
        assert_eq!(m[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(m[(1, 1)], Complex64::new(-1.0, 0.0));
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 0.0));

        // sigma^y on one qubit: [[0, -i], [i, 0]].
        let y = mono(chain(1), &[(0, Axis::Y)]);
        let m = y.matrix_rep(1).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));

        // sigma^x_1 sigma^x_2 on two qubits: exact anti-diagonal of ones.
        let xx = mono(l, &[(0, Axis::X), (1, Axis::X)]);
        let m = xx.matrix_rep(2).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r + c == 3 { 1.0 } else { 0.0 };
                assert_eq!(m[(r, c)], Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn matrix_rep_guards() {
        let l = chain(20);
        let m = mono(l, &[(15, Axis::X)]);
        assert!(matches!(
            m.matrix_rep(20),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(matches!(
            m.matrix_rep(10),
            Err(Error::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn exhaustive_two_site_homomorphism() {
        // All 16 x 16 phase-free words on two sites: the matrix representation
        // must be a homomorphism with exact entries.
        let l = chain(2);
        let mut words = vec![PauliMonomial::identity(l)];
        for s1 in [None, Some(Axis::X), Some(Axis::Y), Some(Axis::Z)] {
            for s2 in [None, Some(Axis::X), Some(Axis::Y), Some(Axis::Z)] {
                let mut letters = Vec::new();
                if let Some(a) = s1 {
                    letters.push((Site(0), a));
                }
                if let Some(a) = s2 {
                    letters.push((Site(1), a));
                }
                if letters.is_empty() {
                    continue;
                }
                words.push(PauliMonomial::from_letters(l, Phase::One, &letters).unwrap());
            }
        }
        assert_eq!(words.len(), 16);
        for a in &words {
            for b in &words {
                let prod = a.multiply(b).unwrap();
                let lhs = prod.matrix_rep(2).unwrap();
                let ma = a.matrix_rep(2).unwrap();
                let mb = b.matrix_rep(2).unwrap();
                let rhs = &ma * &mb;
                for r in 0..4 {
                    for c in 0..4 {
                        assert_eq!(lhs[(r, c)], rhs[(r, c)], "{a} * {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn rendering_golden() {
        let c = chain(10);
        let m = PauliMonomial::from_letters(c, Phase::I, &[(Site(0), Axis::X), (Site(2), Axis::Z)])
            .unwrap();
        assert_eq!(m.to_string(), "+i X1 Z3");
        assert_eq!(m.with_phase(Phase::One).to_string(), "+ X1 Z3");
        assert_eq!(m.with_phase(Phase::MinusOne).to_string(), "- X1 Z3");
        assert_eq!(PauliMonomial::identity(c).to_string(), "+1");
        assert_eq!(
            PauliMonomial::identity(c)
                .with_phase(Phase::MinusI)
                .to_string(),
            "-i1"
        );

        let s = Lattice::Square { l: 4 };
        let m = PauliMonomial::from_letters(
            s,
            Phase::One,
            &[(s.site_2d(2, 3), Axis::X), (s.site_2d(3, 1), Axis::Y)],
        )
        .unwrap();
        assert_eq!(m.to_string(), "+ X(2,3) Y(3,1)");
    }

    #[test]
    fn word_order_is_degree_then_lex() {
        let l = chain(5);
        let a = mono(l, &[(0, Axis::Z)]);
        let b = mono(l, &[(0, Axis::X), (1, Axis::X)]);
        assert_eq!(a.word_cmp(&b), Ordering::Less); // lower degree wins
        let c = mono(l, &[(0, Axis::X), (1, Axis::Y)]);
        assert_eq!(b.word_cmp(&c), Ordering::Less); // X < Y at site 2
        let d = mono(l, &[(0, Axis::X), (2, Axis::X)]);
        assert_eq!(c.word_cmp(&d), Ordering::Less); // site 2 < site 3
    }

    #[test]
    fn translate_and_coords() {
        let s = Lattice::Square { l: 4 };
        let p = s.site_2d(4, 4);
        assert_eq!(p, Site(15));
        assert_eq!(s.translate(p, Shift(1, 1)), Site(0));
        assert_eq!(s.coords(Site(7)), (1, 3));
        let c = chain(6);
        assert_eq!(c.translate(Site(5), Shift(2, 0)), Site(1));
        assert_eq!(c.site_1d(7), Site(0));
        assert_eq!(c.site_1d(0), Site(5));
    }
}
