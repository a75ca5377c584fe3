//! Moment-matrix compilation.
//!
//! The moment matrix over a sign-partitioned, translation-grouped basis is
//! compiled into independent symmetric blocks in three steps:
//!
//! 1. **Entry algebra**: the entry for rows `u`, `v` is the moment of
//!    `u† v`, reduced to a canonical key. A fixed diagonal rotation by
//!    `i^{deg u - deg v}` turns every surviving entry into a real multiple
//!    of a key variable (degree parities and sign rules force each surviving
//!    product phase to be `±1` on equal parity and `±i` across parities); a
//!    violation is a structure fault, never silently dropped.
//! 2. **Translation Fourier transform**: within one sign part, orbits are
//!    coupled only through relative translations, so an orbit-aware discrete
//!    Fourier transform block-diagonalizes the part by frequency. An orbit
//!    with stabilizer `S` participates at frequency `k` exactly when `k`
//!    annihilates `S`, which handles short orbits and the identity border
//!    uniformly.
//! 3. **Realification**: self-conjugate frequencies come out real symmetric;
//!    interior frequencies are complex Hermitian and are embedded as real
//!    symmetric blocks of doubled dimension (covering the frequency and its
//!    conjugate in one block).

use std::f64::consts::PI;

use crate::basis::{translate_word, MonomialBasis, OrbitGroup, PartitionedBasis, SignPart};
use crate::error::{Error, Result};
use crate::expr::{key_expr, CLinExpr, KeyInterner, LinExpr};
use crate::pauli::{Lattice, PauliMonomial, Phase, Shift};
use crate::symmetry::SymmetryGroup;

/// Coefficients smaller than this are treated as exact cancellation residue
/// and dropped. Genuine coefficients are short trigonometric sums bounded
/// well away from this threshold.
pub const COEFF_SNAP: f64 = 1e-12;

/// Structural-zero tolerance: imaginary residue on diagonals and
/// self-conjugate blocks must stay below this before being discarded.
const IM_TOL: f64 = 1e-9;

/// The moment of a single monomial as a complex-linear expression in the
/// canonical key variables (constant for the identity, zero for sign-odd
/// words).
pub fn moment_of(m: &PauliMonomial, g: &SymmetryGroup, interner: &mut KeyInterner) -> CLinExpr {
    let key = g.canonical_key(m);
    let base = key_expr(&key, interner);
    let mut out = CLinExpr::zero();
    out.add_scaled(&base, m.phase().value());
    out
}

/// Rotate a complex expression by `i^delta` (`delta` taken modulo 4).
pub fn rotate_quarter(c: &CLinExpr, delta: u8) -> CLinExpr {
    let mut out = CLinExpr::zero();
    match delta % 4 {
        0 => out = c.clone(),
        1 => {
            out.re.add_scaled(&c.im, -1.0);
            out.im.add_scaled(&c.re, 1.0);
        }
        2 => {
            out.re.add_scaled(&c.re, -1.0);
            out.im.add_scaled(&c.im, -1.0);
        }
        _ => {
            out.re.add_scaled(&c.im, 1.0);
            out.im.add_scaled(&c.re, -1.0);
        }
    }
    out
}

/// Quarter-turn exponent for the realifying rotation between two rows.
pub fn parity_delta(row_degree: usize, col_degree: usize) -> u8 {
    (row_degree as i64 - col_degree as i64).rem_euclid(4) as u8
}

/// The realified moment-matrix entry for rows `u`, `v` (phase-free words):
/// `i^{deg u - deg v} * l(u† v)` as a real expression.
pub fn realified_entry(
    u: &PauliMonomial,
    v: &PauliMonomial,
    g: &SymmetryGroup,
    interner: &mut KeyInterner,
) -> Result<LinExpr> {
    let prod = u.adjoint().multiply(v)?;
    let key = g.canonical_key(&prod);
    if key.is_zero() {
        return Ok(LinExpr::zero());
    }
    let rot = match parity_delta(u.degree(), v.degree()) {
        0 => Phase::One,
        1 => Phase::I,
        2 => Phase::MinusOne,
        _ => Phase::MinusI,
    };
    let combined = prod.phase() * rot;
    match combined.real_value() {
        Some(rho) => Ok(key_expr(&key, interner).scaled(rho)),
        None => Err(Error::StructureFault(format!(
            "surviving entry {u} x {v} keeps a complex coefficient after the \
             parity rotation; the sign-symmetry structure is violated"
        ))),
    }
}

/// How a compiled block was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// Real symmetric as compiled.
    Real,
    /// Complex Hermitian of dimension `source_dim`, embedded as a symmetric
    /// block of dimension `2 * source_dim`.
    RealifiedHermitian {
        /// Dimension of the Hermitian source block.
        source_dim: usize,
    },
}

/// One real symmetric positive-semidefinite block with affine entries.
#[derive(Clone, Debug)]
pub struct PsdBlock {
    label: String,
    kind: BlockKind,
    dim: usize,
    multiplicity: usize,
    /// Upper triangle including the diagonal, row-major.
    entries: Vec<LinExpr>,
}

fn ut_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * (2 * n - i + 1) / 2 + (j - i)
}

fn su_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl PsdBlock {
    /// A real symmetric block from its upper triangle (row-major, diagonal
    /// included).
    pub fn from_upper(
        label: String,
        dim: usize,
        multiplicity: usize,
        entries: Vec<LinExpr>,
    ) -> Self {
        assert_eq!(entries.len(), dim * (dim + 1) / 2);
        PsdBlock {
            label,
            kind: BlockKind::Real,
            dim,
            multiplicity,
            entries,
        }
    }

    /// A block from a complex Hermitian matrix given as upper-triangle real
    /// parts (diagonal included) and strictly-upper imaginary parts. A
    /// matrix whose imaginary parts all vanish stays real of the same
    /// dimension; otherwise it is embedded as `[[A, -B], [B, A]]` of doubled
    /// dimension, or rejected when `realify` is off.
    pub fn from_hermitian(
        label: String,
        n: usize,
        multiplicity: usize,
        re: Vec<LinExpr>,
        im: Vec<LinExpr>,
        realify: bool,
    ) -> Result<Self> {
        assert_eq!(re.len(), n * (n + 1) / 2);
        assert_eq!(im.len(), n * (n - 1) / 2);
        if im.iter().all(LinExpr::is_zero) {
            return Ok(PsdBlock {
                label,
                kind: BlockKind::Real,
                dim: n,
                multiplicity,
                entries: re,
            });
        }
        if !realify {
            return Err(Error::Unsupported(format!(
                "block {label} is genuinely complex Hermitian; enable \
                 realification to compile it"
            )));
        }
        let dim = 2 * n;
        let mut entries = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                let e = if j < n {
                    re[ut_index(i, j, n)].clone()
                } else if i < n {
                    let c = j - n;
                    match i.cmp(&c) {
                        std::cmp::Ordering::Less => im[su_index(i, c, n)].scaled(-1.0),
                        std::cmp::Ordering::Equal => LinExpr::zero(),
                        std::cmp::Ordering::Greater => im[su_index(c, i, n)].clone(),
                    }
                } else {
                    re[ut_index(i - n, j - n, n)].clone()
                };
                entries.push(e);
            }
        }
        Ok(PsdBlock {
            label,
            kind: BlockKind::RealifiedHermitian { source_dim: n },
            dim,
            multiplicity,
            entries,
        })
    }

    /// Human-readable block label.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// How the block was produced.
    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    /// Side length of the compiled symmetric block.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of congruent copies this block represents in the unreduced
    /// matrix (2 for a frequency paired with its distinct conjugate).
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// Dimension of the underlying Hermitian block before realification.
    pub fn hermitian_dim(&self) -> usize {
        match self.kind {
            BlockKind::Real => self.dim,
            BlockKind::RealifiedHermitian { source_dim } => source_dim,
        }
    }

    /// Entry at `(i, j)` with `i <= j`.
    pub fn entry(&self, i: usize, j: usize) -> &LinExpr {
        &self.entries[ut_index(i, j, self.dim)]
    }

    /// Upper-triangle entries as `(i, j, expr)`, row-major.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, &LinExpr)> {
        let dim = self.dim;
        (0..dim)
            .flat_map(move |i| (i..dim).map(move |j| (i, j)))
            .zip(self.entries.iter())
            .map(|((i, j), e)| (i, j, e))
    }

    /// Dense evaluation at a variable assignment.
    pub fn eval_dense(&self, values: &[f64]) -> faer::Mat<f64> {
        let mut m = faer::Mat::<f64>::zeros(self.dim, self.dim);
        for (i, j, e) in self.upper_entries() {
            let v = e.eval(values);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// The block with identically-zero rows/columns removed. Such rows carry
    /// no constraint (a PSD matrix with a zero diagonal entry has a zero row),
    /// but they ruin strict feasibility, so pruning them keeps interior-point
    /// iterates well defined. Returns `None` when every row survives.
    pub fn without_zero_rows(&self) -> Option<Self> {
        let mut live = vec![false; self.dim];
        for (i, j, e) in self.upper_entries() {
            if !e.is_zero() {
                live[i] = true;
                live[j] = true;
            }
        }
        if live.iter().all(|&v| v) {
            return None;
        }
        let keep: Vec<usize> = (0..self.dim).filter(|&i| live[i]).collect();
        let dim = keep.len();
        let mut entries = Vec::with_capacity(dim * (dim + 1) / 2);
        for (a, &i) in keep.iter().enumerate() {
            for &j in &keep[a..] {
                entries.push(self.entries[ut_index(i, j, self.dim)].clone());
            }
        }
        Some(PsdBlock {
            label: self.label.clone(),
            // Realified pairing is broken by pruning; treat as plain real.
            kind: BlockKind::Real,
            dim,
            multiplicity: self.multiplicity,
            entries,
        })
    }
}

/// One translation frequency with its conjugacy data.
#[derive(Clone, Debug)]
pub struct FreqInfo {
    /// Frequency vector (second component 0 on chains).
    pub k: (u32, u32),
    /// Whether `-k` equals `k` modulo the lattice (block is real).
    pub self_conjugate: bool,
    /// 1 for self-conjugate frequencies, 2 for a conjugate pair.
    pub multiplicity: usize,
    /// Display label, e.g. `k=3` or `k=(1,2)`.
    pub label: String,
}

/// Emitted frequencies: one representative per conjugate pair `{k, -k}`.
pub fn frequencies(lattice: Lattice) -> Vec<FreqInfo> {
    let l = lattice.length();
    let mut out = Vec::new();
    match lattice {
        Lattice::Chain { .. } => {
            for k in 0..=(l / 2) {
                let sc = k == 0 || (l.is_multiple_of(2) && k == l / 2);
                out.push(FreqInfo {
                    k: (k, 0),
                    self_conjugate: sc,
                    multiplicity: if sc { 1 } else { 2 },
                    label: format!("k={k}"),
                });
            }
        }
        Lattice::Square { .. } => {
            for a in 0..l {
                for b in 0..l {
                    let neg = ((l - a) % l, (l - b) % l);
                    if (a, b) > neg {
                        continue;
                    }
                    let sc = (a, b) == neg;
                    out.push(FreqInfo {
                        k: (a, b),
                        self_conjugate: sc,
                        multiplicity: if sc { 1 } else { 2 },
                        label: format!("k=({a},{b})"),
                    });
                }
            }
        }
    }
    out
}

/// Whether an orbit with the given stabilizer participates at frequency `k`.
pub fn participates(stabilizer: &[Shift], k: (u32, u32), l: u32) -> bool {
    stabilizer.iter().all(|s| {
        (u64::from(k.0) * u64::from(s.0) + u64::from(k.1) * u64::from(s.1)) % u64::from(l) == 0
    })
}

fn residual(e: &LinExpr) -> f64 {
    e.constant_part().abs().max(e.max_abs())
}

/// Fourier-reduce one sign part into per-frequency blocks, given the
/// realified entry function for pattern pairs. Generic over the entry so the
/// same machinery compiles moment matrices and localizing blocks.
pub fn dft_part_blocks(
    label_prefix: &str,
    part_index: usize,
    part: &SignPart,
    lattice: Lattice,
    realify: bool,
    entry: &mut dyn FnMut(&PauliMonomial, &PauliMonomial) -> Result<LinExpr>,
) -> Result<Vec<PsdBlock>> {
    let groups: Vec<&OrbitGroup> = part.groups().collect();
    if groups.is_empty() {
        return Ok(Vec::new());
    }
    let shifts = lattice.shifts();
    let gsize = shifts.len();
    let l = lattice.length();
    let np = groups.len();

    // Entry tables E_pq(f) = entry(u_p, translate(u_q, f)), shared by every
    // frequency.
    let mut tables: Vec<Vec<LinExpr>> = Vec::with_capacity(np * (np + 1) / 2);
    for p in 0..np {
        for q in p..np {
            let mut row = Vec::with_capacity(gsize);
            for &f in &shifts {
                let vq = translate_word(lattice, &groups[q].pattern, f);
                row.push(entry(&groups[p].pattern, &vq)?);
            }
            tables.push(row);
        }
    }

    let mut blocks = Vec::new();
    for freq in frequencies(lattice) {
        let act: Vec<usize> = (0..np)
            .filter(|&p| participates(&groups[p].stabilizer, freq.k, l))
            .collect();
        if act.is_empty() {
            continue;
        }
        let d = act.len();
        let mut re_up = Vec::with_capacity(d * (d + 1) / 2);
        let mut im_strict = Vec::with_capacity(d * (d - 1) / 2);
        for a in 0..d {
            for b in a..d {
                let (p, q) = (act[a], act[b]);
                let scale = ((groups[p].len() * groups[q].len()) as f64).sqrt() / gsize as f64;
                let tab = &tables[ut_index(p, q, np)];
                let mut re = LinExpr::zero();
                let mut im = LinExpr::zero();
                for (fi, f) in shifts.iter().enumerate() {
                    let dot = (u64::from(freq.k.0) * u64::from(f.0)
                        + u64::from(freq.k.1) * u64::from(f.1))
                        % u64::from(l);
                    let theta = -2.0 * PI * dot as f64 / f64::from(l);
                    re.add_scaled(&tab[fi], scale * theta.cos());
                    im.add_scaled(&tab[fi], scale * theta.sin());
                }
                re.prune(COEFF_SNAP);
                im.prune(COEFF_SNAP);
                if freq.self_conjugate || a == b {
                    if residual(&im) > IM_TOL {
                        return Err(Error::StructureFault(format!(
                            "{label_prefix} part{part_index} {}: imaginary \
                             residue {} on a structurally real entry",
                            freq.label,
                            residual(&im)
                        )));
                    }
                    im = LinExpr::zero();
                }
                re_up.push(re);
                if b > a {
                    im_strict.push(im);
                }
            }
        }
        let label = format!("{label_prefix} part{part_index} {}", freq.label);
        blocks.push(PsdBlock::from_hermitian(
            label,
            d,
            freq.multiplicity,
            re_up,
            im_strict,
            realify,
        )?);
    }
    Ok(blocks)
}

/// Compile the symmetry-reduced moment matrix into PSD blocks. With axis
/// permutations on, parts 2 and 3 are congruent copies of part 1 and are
/// not emitted.
pub fn moment_blocks(
    pb: &PartitionedBasis,
    g: &SymmetryGroup,
    interner: &mut KeyInterner,
    realify: bool,
) -> Result<Vec<PsdBlock>> {
    if pb.lattice != g.lattice() {
        return Err(Error::LatticeMismatch(pb.lattice, g.lattice()));
    }
    let opts = g.options();
    if !(opts.xi_zero && opts.eta_zero) {
        return Err(Error::InvalidConfig(
            "the reduced moment compiler requires both sign-symmetry zero \
             rules; use the unreduced compiler otherwise"
                .into(),
        ));
    }
    let parts: &[usize] = if opts.axis_permutations {
        if pb.parts[2].size() != pb.parts[1].size() || pb.parts[3].size() != pb.parts[1].size() {
            return Err(Error::Unsupported(
                "axis-permutation reduction requires an axis-symmetric basis".into(),
            ));
        }
        &[0, 1]
    } else {
        &[0, 1, 2, 3]
    };
    let mut blocks = Vec::new();
    for &pi in parts {
        let mut entryf = |u: &PauliMonomial, v: &PauliMonomial| realified_entry(u, v, g, interner);
        blocks.extend(dft_part_blocks(
            "moment",
            pi,
            &pb.parts[pi],
            pb.lattice,
            realify,
            &mut entryf,
        )?);
    }
    Ok(blocks)
}

/// Compile the moment matrix without any symmetry reduction: one dense
/// Hermitian block over the whole basis, realified wholesale. The group
/// should be the trivial group (typically with the zero rules off) so keys
/// are plain words.
pub fn unreduced_moment_block(
    basis: &MonomialBasis,
    g: &SymmetryGroup,
    interner: &mut KeyInterner,
) -> Result<PsdBlock> {
    let n = basis.len();
    let entries = basis.entries();
    let mut re = Vec::with_capacity(n * (n + 1) / 2);
    let mut im = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i..n {
            let prod = entries[i].adjoint().multiply(&entries[j])?;
            let c = moment_of(&prod, g, interner);
            if i == j && !c.im.is_zero() {
                return Err(Error::StructureFault(format!(
                    "diagonal moment entry for {} is not real",
                    entries[i]
                )));
            }
            re.push(c.re);
            if j > i {
                im.push(c.im);
            }
        }
    }
    PsdBlock::from_hermitian("moment full".into(), n, 1, re, im, true)
}

/// Structural description of one frequency block.
#[derive(Clone, Debug)]
pub struct LedgerBlock {
    /// Sign-part index (0..4).
    pub part: usize,
    /// Frequency label.
    pub label: String,
    /// Hermitian dimension before realification.
    pub hermitian_dim: usize,
    /// Compiled dimension (doubled for a conjugate pair, assuming a
    /// genuinely complex interior block).
    pub emitted_dim: usize,
    /// Congruent copies represented (1 or 2).
    pub multiplicity: usize,
    /// Whether the frequency equals its own conjugate.
    pub self_conjugate: bool,
}

/// Block-structure accounting for a partitioned basis, computed without
/// materializing any entries.
#[derive(Clone, Debug)]
pub struct Ledger {
    /// Total basis size (sum of part sizes).
    pub basis_size: usize,
    /// Monomials per sign part.
    pub part_sizes: [usize; 4],
    /// Translation orbits per sign part.
    pub part_pattern_counts: [usize; 4],
    /// Per-part, per-frequency block dimensions.
    pub blocks: Vec<LedgerBlock>,
    /// Largest Hermitian block dimension across all frequencies.
    pub max_hermitian_dim: usize,
}

impl Ledger {
    /// Dimension accounting: within each part the frequency dimensions,
    /// counted with conjugate multiplicity, must add up to the part size.
    pub fn consistent(&self) -> bool {
        (0..4).all(|pi| {
            self.blocks
                .iter()
                .filter(|b| b.part == pi)
                .map(|b| b.multiplicity * b.hermitian_dim)
                .sum::<usize>()
                == self.part_sizes[pi]
        })
    }
}

/// Compute the block ledger for a partitioned basis.
pub fn block_ledger(pb: &PartitionedBasis) -> Ledger {
    let l = pb.lattice.length();
    let freqs = frequencies(pb.lattice);
    let mut blocks = Vec::new();
    let mut part_sizes = [0usize; 4];
    let mut part_pattern_counts = [0usize; 4];
    let mut max_dim = 0usize;
    for (pi, part) in pb.parts.iter().enumerate() {
        part_sizes[pi] = part.size();
        let groups: Vec<&OrbitGroup> = part.groups().collect();
        part_pattern_counts[pi] = groups.len();
        for freq in &freqs {
            let d = groups
                .iter()
                .filter(|g| participates(&g.stabilizer, freq.k, l))
                .count();
            if d == 0 {
                continue;
            }
            max_dim = max_dim.max(d);
            blocks.push(LedgerBlock {
                part: pi,
                label: freq.label.clone(),
                hermitian_dim: d,
                emitted_dim: if freq.self_conjugate { d } else { 2 * d },
                multiplicity: freq.multiplicity,
                self_conjugate: freq.self_conjugate,
            });
        }
    }
    Ledger {
        basis_size: part_sizes.iter().sum(),
        part_sizes,
        part_pattern_counts,
        blocks,
        max_hermitian_dim: max_dim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_1d, build_2d, partition};
    use crate::model::{ModelFamily, ModelSpec};
    use crate::oracle::diagonalize;
    use crate::pauli::{Axis, Site};
    use crate::symmetry::SymmetryOptions;
    use faer::Side;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn word(l: Lattice, letters: &[(u32, Axis)]) -> PauliMonomial {
        let ls: Vec<(Site, Axis)> = letters.iter().map(|&(s, a)| (Site(s), a)).collect();
        PauliMonomial::from_letters(l, Phase::One, &ls).unwrap()
    }

    fn sym_eigs(m: &faer::Mat<f64>) -> Vec<f64> {
        m.self_adjoint_eigenvalues(Side::Lower).unwrap()
    }

    #[test]
    fn realified_entries_have_expected_coefficients() {
        let l = Lattice::Chain { l: 6 };
        let g = SymmetryGroup::full(l);
        let mut it = KeyInterner::new();
        // Cross parity with collision: Z1 x (X1 Y2) = i Y1 Y2 -> +1 * y(XX d1).
        let e = realified_entry(
            &word(l, &[(0, Axis::Z)]),
            &word(l, &[(0, Axis::X), (1, Axis::Y)]),
            &g,
            &mut it,
        )
        .unwrap();
        let xx = realified_entry(
            &word(l, &[(0, Axis::X)]),
            &word(l, &[(1, Axis::X)]),
            &g,
            &mut it,
        )
        .unwrap();
        assert_eq!(e, xx);
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.terms()[0].1, 1.0);
        // Same parity, degree difference 2: rotation contributes -1.
        let e2 = realified_entry(
            &word(l, &[(0, Axis::X), (1, Axis::X)]),
            &PauliMonomial::identity(l),
            &g,
            &mut it,
        )
        .unwrap();
        assert_eq!(e2.terms().len(), 1);
        assert_eq!(e2.terms()[0].1, -1.0);
        assert_eq!(e2.terms()[0].0, e.terms()[0].0);
        // Diagonal: u† u = 1.
        let d = realified_entry(
            &word(l, &[(0, Axis::X), (1, Axis::Y)]),
            &word(l, &[(0, Axis::X), (1, Axis::Y)]),
            &g,
            &mut it,
        )
        .unwrap();
        assert!(d.terms().is_empty());
        assert_eq!(d.constant_part(), 1.0);
        // Sign-odd products vanish.
        let z = realified_entry(
            &word(l, &[(0, Axis::X)]),
            &PauliMonomial::identity(l),
            &g,
            &mut it,
        )
        .unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn single_orbit_blocks_are_circulant_eigenvalues() {
        let l = 10u32;
        let lat = Lattice::Chain { l };
        let basis = build_1d(l, 1, 0).unwrap();
        let pb = partition(&basis).unwrap();
        let g = SymmetryGroup::full(lat);
        let mut it = KeyInterner::new();
        let blocks = moment_blocks(&pb, &g, &mut it, true).unwrap();
        // part 0: identity at k=0 only; part 1: one orbit at every frequency.
        assert_eq!(blocks.len(), 1 + 6);
        assert!(blocks
            .iter()
            .all(|b| b.dim() == 1 && b.kind() == BlockKind::Real));
        let id = &blocks[0];
        assert!((id.entry(0, 0).constant_part() - 1.0).abs() < 1e-12);
        assert!(id.entry(0, 0).terms().is_empty());

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..it.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        // Distances 1..=5 in first-materialization order of the single-orbit
        // entry table: key for distance d(f) with f = 1..; recover ids.
        let key_of = |d: u32| {
            let w = word(lat, &[(0, Axis::X), (d, Axis::X)]);
            it.get(&g.canonical_key(&w)).unwrap()
        };
        for (bi, b) in blocks.iter().enumerate().skip(1) {
            let k = (bi - 1) as f64;
            let mut direct = 1.0;
            for f in 1..l {
                let d = f.min(l - f);
                let c = vals[key_of(d).index()];
                direct += (2.0 * PI * k * f as f64 / l as f64).cos() * c;
            }
            let got = b.entry(0, 0).eval(&vals);
            assert!((got - direct).abs() < 1e-10, "k={k}: {got} vs {direct}");
        }
    }

    #[test]
    fn short_orbits_participate_at_compatible_frequencies() {
        // L=4, d=2, r=2: part 0 holds the identity, three distance-1 and
        // three distance-2 equal-axis pair orbits; the distance-2 orbits
        // have stabilizer {0, 2} and participate only at even frequencies.
        let basis = build_1d(4, 2, 2).unwrap();
        let pb = partition(&basis).unwrap();
        let g = SymmetryGroup::full(Lattice::Chain { l: 4 });
        let mut it = KeyInterner::new();
        let blocks = moment_blocks(&pb, &g, &mut it, true).unwrap();
        let part0: Vec<_> = blocks
            .iter()
            .filter(|b| b.label().contains("part0"))
            .collect();
        assert_eq!(part0.len(), 3);
        assert_eq!(part0[0].hermitian_dim(), 7); // k=0: everything
        assert_eq!(part0[1].hermitian_dim(), 3); // k=1: distance-1 orbits only
        assert_eq!(part0[2].hermitian_dim(), 6); // k=2: identity drops out
        assert_eq!(part0[0].multiplicity(), 1);
        assert_eq!(part0[1].multiplicity(), 2);
        assert_eq!(part0[2].multiplicity(), 1);
        // Dimension accounting: 7 + 2*3 + 6 = 19 = |part 0|.
        assert_eq!(pb.parts[0].size(), 19);
    }

    /// Full unitary-equivalence check: the eigenvalues of the dense
    /// realified moment matrix must equal the union of the block
    /// eigenvalues with conjugate multiplicity.
    fn eigen_multiset_case(lat: Lattice, basis: MonomialBasis, opts: SymmetryOptions) {
        let pb = partition(&basis).unwrap();
        let g = SymmetryGroup::new(lat, opts);
        let mut it = KeyInterner::new();
        let blocks = moment_blocks(&pb, &g, &mut it, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vals: Vec<f64> = (0..it.len()).map(|_| rng.random_range(-0.8..0.8)).collect();

        let mut block_eigs = Vec::new();
        for b in &blocks {
            let reps = b.multiplicity() * b.hermitian_dim() / b.dim();
            let eigs = sym_eigs(&b.eval_dense(&vals));
            for _ in 0..reps {
                block_eigs.extend_from_slice(&eigs);
            }
        }

        let parts: &[usize] = if opts.axis_permutations {
            &[0, 1]
        } else {
            &[0, 1, 2, 3]
        };
        let mut rows = Vec::new();
        for &pi in parts {
            rows.extend(pb.parts[pi].entries().into_iter().cloned());
        }
        let n = rows.len();
        let mut dense = faer::Mat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let e = realified_entry(&rows[i], &rows[j], &g, &mut it).unwrap();
                let v = e.eval(&vals);
                dense[(i, j)] = v;
                dense[(j, i)] = v;
            }
        }
        let mut dense_eigs = sym_eigs(&dense);
        dense_eigs.sort_by(f64::total_cmp);
        block_eigs.sort_by(f64::total_cmp);
        assert_eq!(dense_eigs.len(), block_eigs.len());
        for (a, b) in dense_eigs.iter().zip(&block_eigs) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn block_eigenvalues_match_dense_matrix_chain() {
        let all = SymmetryOptions::default();
        let no_axes = SymmetryOptions {
            axis_permutations: false,
            ..all
        };
        eigen_multiset_case(Lattice::Chain { l: 4 }, build_1d(4, 2, 2).unwrap(), no_axes);
        eigen_multiset_case(Lattice::Chain { l: 4 }, build_1d(4, 2, 2).unwrap(), all);
        eigen_multiset_case(Lattice::Chain { l: 5 }, build_1d(5, 2, 2).unwrap(), no_axes);
        eigen_multiset_case(Lattice::Chain { l: 6 }, build_1d(6, 3, 1).unwrap(), no_axes);
    }

    #[test]
    fn block_eigenvalues_match_dense_matrix_square() {
        let no_axes = SymmetryOptions {
            axis_permutations: false,
            ..Default::default()
        };
        eigen_multiset_case(Lattice::Square { l: 4 }, build_2d(4, 1).unwrap(), no_axes);
    }

    #[test]
    fn zeroed_keys_vanish_on_exact_ground_states() {
        for (model, d, r) in [
            (ModelSpec::new(ModelFamily::Chain, 6, 0.0).unwrap(), 2, 3),
            (
                ModelSpec::new(ModelFamily::ChainJ1J2, 6, 0.5).unwrap(),
                2,
                2,
            ),
        ] {
            let gs = diagonalize(&model).unwrap();
            let basis = build_1d(model.l, d, r).unwrap();
            let g = SymmetryGroup::full(model.lattice());
            let mut nonzero_seen = 0usize;
            for (i, u) in basis.entries().iter().enumerate() {
                for v in &basis.entries()[i..] {
                    let prod = u.adjoint().multiply(v).unwrap();
                    let key = g.canonical_key(&prod);
                    let val = gs.expectation(&prod).unwrap().norm();
                    if key.is_zero() {
                        assert!(val < 1e-9, "{u} x {v} -> {val}");
                    } else if val > 1e-2 {
                        nonzero_seen += 1;
                    }
                }
            }
            assert!(nonzero_seen > 10);
        }
    }

    #[test]
    fn exact_moments_are_block_feasible() {
        let model = ModelSpec::new(ModelFamily::Chain, 6, 0.0).unwrap();
        let gs = diagonalize(&model).unwrap();
        let basis = build_1d(6, 2, 3).unwrap();
        let pb = partition(&basis).unwrap();
        let g = SymmetryGroup::full(model.lattice());
        let mut it = KeyInterner::new();
        let blocks = moment_blocks(&pb, &g, &mut it, true).unwrap();
        let vals = gs.moment_values(&it).unwrap();
        for b in &blocks {
            let eigs = sym_eigs(&b.eval_dense(&vals));
            assert!(eigs[0] > -1e-9, "{}: min eigenvalue {}", b.label(), eigs[0]);
        }
    }

    #[test]
    fn complex_blocks_require_realification() {
        // Degree-3 mixed-axis patterns are chirally asymmetric, so interior
        // frequencies are genuinely complex.
        let basis = build_1d(6, 3, 1).unwrap();
        let pb = partition(&basis).unwrap();
        let g = SymmetryGroup::full(Lattice::Chain { l: 6 });
        let mut it = KeyInterner::new();
        let err = moment_blocks(&pb, &g, &mut it, false);
        assert!(matches!(err, Err(Error::Unsupported(_))));
        let mut it = KeyInterner::new();
        let blocks = moment_blocks(&pb, &g, &mut it, true).unwrap();
        assert!(blocks
            .iter()
            .any(|b| matches!(b.kind(), BlockKind::RealifiedHermitian { .. })));
    }

    #[test]
    fn unreduced_block_is_feasible_at_exact_moments() {
        let model = ModelSpec::new(ModelFamily::Chain, 4, 0.0).unwrap();
        let gs = diagonalize(&model).unwrap();
        let basis = build_1d(4, 1, 0).unwrap();
        let g = SymmetryGroup::trivial(model.lattice());
        let mut it = KeyInterner::new();
        let block = unreduced_moment_block(&basis, &g, &mut it).unwrap();
        assert_eq!(block.dim(), 2 * basis.len());
        let vals = gs.moment_values(&it).unwrap();
        let eigs = sym_eigs(&block.eval_dense(&vals));
        assert!(eigs[0] > -1e-9, "min eigenvalue {}", eigs[0]);
    }

    #[test]
    fn ledger_accounts_for_every_basis_monomial() {
        let basis = build_1d(12, 3, 2).unwrap();
        let pb = partition(&basis).unwrap();
        let ledger = block_ledger(&pb);
        assert_eq!(ledger.basis_size, basis.len());
        assert!(ledger.consistent());
    }

    #[test]
    fn ledger_large_chain_counts() {
        let basis = build_1d(100, 4, 1).unwrap();
        assert_eq!(basis.len(), 12001);
        let pb = partition(&basis).unwrap();
        let ledger = block_ledger(&pb);
        assert_eq!(ledger.basis_size, 12001);
        assert_eq!(ledger.max_hermitian_dim, 31);
        assert!(ledger.consistent());
        assert_eq!(ledger.part_pattern_counts[0], 31);
    }
}
