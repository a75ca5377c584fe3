//! Monomial bases for the moment matrices and their symmetry partitions.
//!
//! 1D bases contain the identity, all contiguous words of length up to `d`
//! (every start site, every axis assignment), and site pairs at distances
//! `2..=r`. 2D bases are tiered by `d`: singles, then pairs within a
//! Chebyshev-distance-4 window, then six triple templates, then `2x2`
//! plaquettes. Bases are translation-closed by construction and deduplicated
//! by normal form.
//!
//! [`partition`] splits a basis by the four possible `xi` signatures and by
//! degree parity, and groups each piece into lattice-translation orbits; this
//! is the block structure the moment assembly relies on (and re-verifies).

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::pauli::{Axis, Lattice, PauliMonomial, Phase, Shift, Site};

/// An ordered, deduplicated list of phase-free monomials containing the
/// identity exactly once (first).
pub struct MonomialBasis {
    lattice: Lattice,
    entries: Vec<PauliMonomial>,
}

impl MonomialBasis {
    /// Build from raw entries: phases are stripped, duplicates dropped
    /// (keeping first occurrence), and the identity is moved to the front.
    pub fn from_entries(lattice: Lattice, raw: Vec<PauliMonomial>) -> Result<Self> {
        let mut entries = vec![PauliMonomial::identity(lattice)];
        let mut seen: HashSet<PauliMonomial> = entries.iter().cloned().collect();
        for m in raw {
            if m.lattice() != lattice {
                return Err(Error::LatticeMismatch(lattice, m.lattice()));
            }
            let w = m.word();
            if seen.insert(w.clone()) {
                entries.push(w);
            }
        }
        Ok(MonomialBasis { lattice, entries })
    }

    /// The lattice.
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// All entries; the identity is first.
    pub fn entries(&self) -> &[PauliMonomial] {
        &self.entries
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// A basis is never empty (it always contains the identity).
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// All `3^len` axis assignments in lexicographic order.
fn axis_tuples(len: usize) -> Vec<Vec<Axis>> {
    let mut out: Vec<Vec<Axis>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * 3);
        for t in &out {
            for &a in &Axis::ALL {
                let mut t2 = t.clone();
                t2.push(a);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// 1D basis: identity, contiguous words of length `1..=d` at every start, and
/// site pairs at distances `2..=r`.
pub fn build_1d(l: u32, d: u32, r: u32) -> Result<MonomialBasis> {
    let lattice = Lattice::Chain { l };
    if l < 3 {
        return Err(Error::InvalidConfig(format!("chain length {l} < 3")));
    }
    if d < 1 || d > l {
        return Err(Error::InvalidConfig(format!(
            "word length cap d={d} outside 1..={l}"
        )));
    }
    if r > l / 2 {
        return Err(Error::InvalidConfig(format!(
            "pair range r={r} exceeds L/2 = {}",
            l / 2
        )));
    }
    let mut raw = Vec::new();
    for len in 1..=d {
        let tuples = axis_tuples(len as usize);
        for start in 1..=l as i64 {
            for t in &tuples {
                let letters: Vec<(Site, Axis)> = t
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| (lattice.site_1d(start + k as i64), a))
                    .collect();
                raw.push(PauliMonomial::from_letters(lattice, Phase::One, &letters)?);
            }
        }
    }
    for dist in 2..=r as i64 {
        for start in 1..=l as i64 {
            for &a in &Axis::ALL {
                for &b in &Axis::ALL {
                    let letters = [
                        (lattice.site_1d(start), a),
                        (lattice.site_1d(start + dist), b),
                    ];
                    raw.push(PauliMonomial::from_letters(lattice, Phase::One, &letters)?);
                }
            }
        }
    }
    MonomialBasis::from_entries(lattice, raw)
}

/// Site-set templates for the 2D tiers, as offsets from a base site.
const TRIPLE_TEMPLATES: [[(i64, i64); 2]; 6] = [
    [(1, 0), (2, 0)],
    [(0, 1), (0, 2)],
    [(0, -1), (1, -1)],
    [(0, 1), (1, 1)],
    [(1, 0), (1, -1)],
    [(1, 0), (1, 1)],
];

/// 2D basis tiers: `d = 1` singles; `d = 2` adds pairs with offsets in the
/// punctured Chebyshev-4 window; `d = 3` adds six triple templates; `d = 4`
/// adds `2x2` plaquettes. Wrapped offsets that collide are skipped, so small
/// tori (down to `L = 4`) are supported.
pub fn build_2d(l: u32, d: u32) -> Result<MonomialBasis> {
    let lattice = Lattice::Square { l };
    if l < 4 {
        return Err(Error::InvalidConfig(format!("torus side {l} < 4")));
    }
    if !(1..=4).contains(&d) {
        return Err(Error::InvalidConfig(format!("2D tier d={d} outside 1..=4")));
    }
    let mut raw = Vec::new();
    for site in lattice.sites() {
        for &a in &Axis::ALL {
            raw.push(PauliMonomial::single(lattice, site, a)?);
        }
    }
    if d >= 2 {
        for site in lattice.sites() {
            let (r0, c0) = lattice.coords(site);
            for s in -4i64..=4 {
                for t in -4i64..=4 {
                    if s == 0 && t == 0 {
                        continue;
                    }
                    let other = lattice.site_2d(r0 as i64 + 1 + s, c0 as i64 + 1 + t);
                    if other == site {
                        continue; // wrapped offset collides on small tori
                    }
                    for &a in &Axis::ALL {
                        for &b in &Axis::ALL {
                            if let Ok(m) = PauliMonomial::from_letters(
                                lattice,
                                Phase::One,
                                &[(site, a), (other, b)],
                            ) {
                                raw.push(m);
                            }
                        }
                    }
                }
            }
        }
    }
    if d >= 3 {
        for site in lattice.sites() {
            let (r0, c0) = lattice.coords(site);
            for template in &TRIPLE_TEMPLATES {
                let sites: Vec<Site> = std::iter::once(site)
                    .chain(
                        template
                            .iter()
                            .map(|&(s, t)| lattice.site_2d(r0 as i64 + 1 + s, c0 as i64 + 1 + t)),
                    )
                    .collect();
                let mut distinct = sites.clone();
                distinct.sort();
                distinct.dedup();
                if distinct.len() != 3 {
                    continue; // wrapped template collides on small tori
                }
                for t in axis_tuples(3) {
                    let letters: Vec<(Site, Axis)> =
                        sites.iter().copied().zip(t.iter().copied()).collect();
                    raw.push(PauliMonomial::from_letters(lattice, Phase::One, &letters)?);
                }
            }
        }
    }
    if d >= 4 {
        for site in lattice.sites() {
            let (r0, c0) = lattice.coords(site);
            let sites = [
                site,
                lattice.site_2d(r0 as i64 + 1, c0 as i64 + 2),
                lattice.site_2d(r0 as i64 + 2, c0 as i64 + 1),
                lattice.site_2d(r0 as i64 + 2, c0 as i64 + 2),
            ];
            let mut distinct = sites.to_vec();
            distinct.sort();
            distinct.dedup();
            if distinct.len() != 4 {
                continue;
            }
            for t in axis_tuples(4) {
                let letters: Vec<(Site, Axis)> =
                    sites.iter().copied().zip(t.iter().copied()).collect();
                raw.push(PauliMonomial::from_letters(lattice, Phase::One, &letters)?);
            }
        }
    }
    MonomialBasis::from_entries(lattice, raw)
}

/// One lattice-translation orbit within a sign part.
pub struct OrbitGroup {
    /// Orbit-minimal word under the global monomial order.
    pub pattern: PauliMonomial,
    /// Distinct orbit members as `(word, shift)` with
    /// `word = translate(pattern, shift)`, ordered by shift rank; the first
    /// member is the pattern itself with shift `(0,0)`.
    pub members: Vec<(PauliMonomial, Shift)>,
    /// Translations fixing the pattern (always contains `(0,0)`); the orbit
    /// size times the stabilizer size equals the translation-group order.
    pub stabilizer: Vec<Shift>,
}

impl OrbitGroup {
    /// Orbit size.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Orbits are never empty.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// All basis entries with one `xi` signature, split by degree parity and
/// grouped into translation orbits. Group lists are sorted by pattern.
pub struct SignPart {
    /// The `xi` value of every entry in this part.
    pub xi: [i8; 3],
    /// Even-degree orbit groups (the identity's singleton orbit first when
    /// present).
    pub even: Vec<OrbitGroup>,
    /// Odd-degree orbit groups.
    pub odd: Vec<OrbitGroup>,
}

impl SignPart {
    /// Total number of monomials in the part.
    pub fn size(&self) -> usize {
        self.groups().map(|g| g.len()).sum()
    }

    /// Even groups then odd groups.
    pub fn groups(&self) -> impl Iterator<Item = &OrbitGroup> {
        self.even.iter().chain(self.odd.iter())
    }

    /// All entries in block order: even groups then odd groups, members in
    /// shift order.
    pub fn entries(&self) -> Vec<&PauliMonomial> {
        self.groups()
            .flat_map(|g| g.members.iter().map(|(m, _)| m))
            .collect()
    }
}

/// A basis split into the four sign parts.
pub struct PartitionedBasis {
    /// The lattice.
    pub lattice: Lattice,
    /// Parts in `xi` order `(1,1,1)`, `(1,-1,-1)`, `(-1,1,-1)`, `(-1,-1,1)`.
    pub parts: [SignPart; 4],
}

impl PartitionedBasis {
    /// Total size across parts (equals the basis size).
    pub fn total(&self) -> usize {
        self.parts.iter().map(|p| p.size()).sum()
    }
}

const XI_VALUES: [[i8; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

/// Translate every letter of a word by `shift` (phase preserved).
pub fn translate_word(lattice: Lattice, m: &PauliMonomial, shift: Shift) -> PauliMonomial {
    let letters: Vec<(Site, Axis)> = m
        .letters()
        .iter()
        .map(|&(s, a)| (lattice.translate(s, shift), a))
        .collect();
    PauliMonomial::from_letters(lattice, Phase::One, &letters)
        .expect("translation preserves site distinctness")
}

/// Group a set of words (one sign part, one parity) into translation orbits.
///
/// Fails with a structure fault if the set is not translation-closed.
fn orbit_groups(lattice: Lattice, words: &[PauliMonomial]) -> Result<Vec<OrbitGroup>> {
    let shifts = lattice.shifts();
    let pool: HashSet<&PauliMonomial> = words.iter().collect();
    let mut assigned: HashSet<PauliMonomial> = HashSet::new();
    let mut groups = Vec::new();
    for w in words {
        if assigned.contains(w) {
            continue;
        }
        // Full orbit with the shift that produces each member.
        let mut pattern = w.clone();
        for shift in &shifts {
            let img = translate_word(lattice, w, *shift);
            if img.word_cmp(&pattern).is_lt() {
                pattern = img;
            }
        }
        let mut members: Vec<(PauliMonomial, Shift)> = Vec::new();
        let mut stabilizer = Vec::new();
        let mut seen: HashSet<PauliMonomial> = HashSet::new();
        for shift in &shifts {
            let img = translate_word(lattice, &pattern, *shift);
            if img == pattern {
                stabilizer.push(*shift);
            }
            if seen.insert(img.clone()) {
                if !pool.contains(&img) {
                    return Err(Error::StructureFault(format!(
                        "basis part is not translation-closed: {img} missing from the part of {pattern}"
                    )));
                }
                members.push((img, *shift));
            }
        }
        if members.len() * stabilizer.len() != shifts.len() {
            return Err(Error::StructureFault(format!(
                "orbit/stabilizer size mismatch for pattern {pattern}"
            )));
        }
        for (m, _) in &members {
            assigned.insert(m.clone());
        }
        groups.push(OrbitGroup {
            pattern,
            members,
            stabilizer,
        });
    }
    groups.sort_by(|a, b| a.pattern.word_cmp(&b.pattern));
    Ok(groups)
}

/// Partition a basis by `xi` signature and degree parity, grouping each piece
/// into translation orbits. The partition is purely structural; the moment
/// assembly separately verifies the entry structure it implies.
pub fn partition(basis: &MonomialBasis) -> Result<PartitionedBasis> {
    let lattice = basis.lattice();
    let mut buckets: [[Vec<PauliMonomial>; 2]; 4] = Default::default();
    for m in basis.entries() {
        let part = m.signature().xi_part();
        buckets[part][m.degree() % 2].push(m.clone());
    }
    let mut parts = Vec::with_capacity(4);
    for (i, [even, odd]) in buckets.into_iter().enumerate() {
        parts.push(SignPart {
            xi: XI_VALUES[i],
            even: orbit_groups(lattice, &even)?,
            odd: orbit_groups(lattice, &odd)?,
        });
    }
    let parts: [SignPart; 4] = parts.try_into().ok().expect("exactly four parts");
    let total = parts.iter().map(|p| p.size()).sum::<usize>();
    if total != basis.len() {
        return Err(Error::StructureFault(format!(
            "partition size {total} does not match basis size {}",
            basis.len()
        )));
    }
    Ok(PartitionedBasis { lattice, parts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_1d() {
        // 1 + sum_{len<=d} 3^len * L + (r-1) * 9L, no collisions at L = 10.
        assert_eq!(build_1d(10, 1, 1).unwrap().len(), 31);
        assert_eq!(build_1d(10, 2, 1).unwrap().len(), 121);
        assert_eq!(build_1d(10, 2, 2).unwrap().len(), 211);
        assert_eq!(build_1d(10, 3, 1).unwrap().len(), 391);
        assert_eq!(build_1d(10, 4, 1).unwrap().len(), 1201);
        assert_eq!(build_1d(10, 4, 2).unwrap().len(), 1291);
        assert_eq!(build_1d(100, 4, 1).unwrap().len(), 12001);
    }

    #[test]
    fn counts_1d_with_wraparound() {
        // L = 4, r = 2: distance-2 pairs wrap (i, i+2) == (i+2, i+4), so only
        // 2 site pairs x 9 axes survive of the raw 4 x 9; plus xy vs yx on the
        // same unordered pair merging: {1,3}: (a at 1, b at 3) from start 1 and
        // (b' at 3, a' at 1) from start 3 — raw words coincide iff same letter
        // assignment, giving 2 * 9 = 18 distinct pair words.
        let b = build_1d(4, 1, 2).unwrap();
        assert_eq!(b.len(), 1 + 12 + 18);
    }

    #[test]
    fn basis_is_deduped_and_identity_first() {
        let b = build_1d(6, 2, 2).unwrap();
        assert!(b.entries()[0].is_identity_word());
        let mut seen = HashSet::new();
        for m in b.entries() {
            assert_eq!(m.phase(), Phase::One);
            assert!(seen.insert(m.clone()), "duplicate basis entry {m}");
        }
    }

    #[test]
    fn counts_2d() {
        // L = 10: singles 300; pairs: 80 offsets x 100 sites x 9 / 2 = 36000.
        let b = build_2d(10, 2).unwrap();
        assert_eq!(b.len(), 1 + 300 + 36000);

        // L = 4 pairs: every distinct site pair is within the window:
        // C(16,2) = 120 pairs x 9 = 1080.
        let b = build_2d(4, 2).unwrap();
        assert_eq!(b.len(), 1 + 48 + 1080);
    }

    #[test]
    fn counts_2d_triples_and_plaquettes() {
        // Independent set-based recount of tier sizes at L = 4 and L = 5.
        for l in [4u32, 5] {
            let lattice = Lattice::Square { l };
            let via_code = build_2d(l, 3).unwrap().len() - build_2d(l, 2).unwrap().len();
            let mut set = HashSet::new();
            for site in lattice.sites() {
                let (r0, c0) = lattice.coords(site);
                for template in &TRIPLE_TEMPLATES {
                    let sites: Vec<Site> =
                        std::iter::once(site)
                            .chain(template.iter().map(|&(s, t)| {
                                lattice.site_2d(r0 as i64 + 1 + s, c0 as i64 + 1 + t)
                            }))
                            .collect();
                    let mut d = sites.clone();
                    d.sort();
                    d.dedup();
                    if d.len() != 3 {
                        continue;
                    }
                    for t in axis_tuples(3) {
                        let letters: Vec<(Site, Axis)> =
                            sites.iter().copied().zip(t.iter().copied()).collect();
                        set.insert(
                            PauliMonomial::from_letters(lattice, Phase::One, &letters).unwrap(),
                        );
                    }
                }
            }
            assert_eq!(via_code, set.len(), "triple tier at L={l}");

            let plaq = build_2d(l, 4).unwrap().len() - build_2d(l, 3).unwrap().len();
            assert_eq!(plaq, (l * l * 81) as usize, "plaquette tier at L={l}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_1d(2, 1, 0).is_err());
        assert!(build_1d(10, 0, 0).is_err());
        assert!(build_1d(10, 11, 0).is_err());
        assert!(build_1d(10, 2, 6).is_err());
        assert!(build_2d(3, 1).is_err());
        assert!(build_2d(6, 5).is_err());
    }

    #[test]
    fn partition_sizes_and_order() {
        let b = build_1d(10, 1, 1).unwrap();
        let p = partition(&b).unwrap();
        assert_eq!(p.total(), 31);
        // Part 0: identity alone. Parts 1..4: ten singles each (z, x, y).
        assert_eq!(p.parts[0].size(), 1);
        for i in 1..4 {
            assert_eq!(p.parts[i].size(), 10);
            assert_eq!(p.parts[i].even.len(), 0);
            assert_eq!(p.parts[i].odd.len(), 1);
            assert_eq!(p.parts[i].odd[0].len(), 10);
            assert_eq!(p.parts[i].odd[0].stabilizer, vec![Shift(0, 0)]);
        }
        assert!(p.parts[0].even[0].pattern.is_identity_word());
        assert_eq!(p.parts[0].even[0].stabilizer.len(), 10);
    }

    #[test]
    fn partition_block_order_is_even_then_odd_sorted_patterns() {
        let b = build_1d(8, 2, 1).unwrap();
        let p = partition(&b).unwrap();
        for part in &p.parts {
            for groups in [&part.even, &part.odd] {
                for w in groups.windows(2) {
                    assert!(w[0].pattern.word_cmp(&w[1].pattern).is_lt());
                }
                for g in groups.iter() {
                    assert_eq!(g.members[0].0, g.pattern);
                    assert_eq!(g.members[0].1, Shift(0, 0));
                    for (m, shift) in &g.members {
                        assert_eq!(translate_word(b.lattice(), &g.pattern, *shift), *m);
                        assert_eq!(m.degree() % 2, g.pattern.degree() % 2);
                        assert_eq!(m.signature().xi, g.pattern.signature().xi);
                    }
                }
            }
        }
    }

    #[test]
    fn short_orbit_has_nontrivial_stabilizer() {
        // X1 X3 on L = 4 has orbit size 2 and stabilizer {0, 2}.
        let b = build_1d(4, 1, 2).unwrap();
        let p = partition(&b).unwrap();
        let part = &p.parts[2]; // xx pairs land with xi = (1,1,1)... no: xx is trivial.
        let _ = part;
        let g = p.parts[0]
            .even
            .iter()
            .find(|g| {
                g.pattern.degree() == 2
                    && g.pattern.letters().iter().all(|&(_, a)| a == Axis::X)
                    && g.pattern.letters()[1].0 .0 - g.pattern.letters()[0].0 .0 == 2
            })
            .expect("X1 X3 orbit");
        assert_eq!(g.len(), 2);
        assert_eq!(g.stabilizer, vec![Shift(0, 0), Shift(2, 0)]);
    }

    #[test]
    fn partition_2d_total() {
        let b = build_2d(4, 2).unwrap();
        let p = partition(&b).unwrap();
        assert_eq!(p.total(), b.len());
        // Every orbit size divides the translation-group order.
        for part in &p.parts {
            for g in part.groups() {
                assert_eq!(g.len() * g.stabilizer.len(), 16);
            }
        }
    }
}
