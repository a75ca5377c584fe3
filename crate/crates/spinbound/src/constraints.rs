//! Constraint families beyond the moment matrix: reduced-density-matrix
//! positivity, commutator equalities, and the ground-state optimality block.

use num_complex::Complex64;

use crate::basis::{partition, MonomialBasis, PartitionedBasis};
use crate::config::{CommutatorSet, OptimalitySet};
use crate::error::{Error, Result};
use crate::expr::{CLinExpr, KeyInterner, LinExpr};
use crate::model::ModelSpec;
use crate::moment::{
    dft_part_blocks, moment_of, parity_delta, rotate_quarter, PsdBlock, COEFF_SNAP,
};
use crate::pauli::{Axis, Lattice, PauliMonomial, Phase, Site};
use crate::symmetry::SymmetryGroup;

/// Imaginary residue allowed on structurally real data.
const IM_TOL: f64 = 1e-9;

fn residual(e: &LinExpr) -> f64 {
    e.constant_part().abs().max(e.max_abs())
}

/// The sites of the canonical `k`-site window: contiguous on chains, a row
/// segment on the square lattice for `k <= 3` and the 2x2 plaquette for
/// `k = 4` (all windows of one shape are translates, so one per shape
/// suffices).
pub fn window_sites(lattice: Lattice, k: u32) -> Result<Vec<Site>> {
    if k == 0 {
        return Err(Error::InvalidConfig("window size 0".into()));
    }
    match lattice {
        Lattice::Chain { l } => {
            if k > l {
                return Err(Error::InvalidConfig(format!(
                    "window size {k} exceeds chain length {l}"
                )));
            }
            Ok((0..k).map(Site).collect())
        }
        Lattice::Square { l } => match k {
            1..=3 if k <= l => Ok((0..k).map(|c| lattice.site_2d(1, (c + 1) as i64)).collect()),
            4 if l >= 2 => Ok(vec![
                lattice.site_2d(1, 1),
                lattice.site_2d(1, 2),
                lattice.site_2d(2, 1),
                lattice.site_2d(2, 2),
            ]),
            _ => Err(Error::InvalidConfig(format!(
                "unsupported window size {k} on {lattice}"
            ))),
        },
    }
}

/// Apply a window-local Pauli word (`axes[i]` acts on window position `i`,
/// most significant bit first) to computational basis column `col`.
fn window_action(axes: &[Option<Axis>], col: usize) -> (usize, Complex64) {
    let k = axes.len();
    let mut row = col;
    let mut phase = Phase::One;
    for (i, a) in axes.iter().enumerate() {
        let Some(a) = a else { continue };
        let bit = (col >> (k - 1 - i)) & 1;
        match a {
            Axis::X => row ^= 1 << (k - 1 - i),
            Axis::Y => {
                row ^= 1 << (k - 1 - i);
                phase = phase * if bit == 0 { Phase::I } else { Phase::MinusI };
            }
            Axis::Z => {
                if bit == 1 {
                    phase = phase * Phase::MinusOne;
                }
            }
        }
    }
    (row, phase.value())
}

/// Compile reduced-density-matrix positivity blocks for the given window
/// sizes. The reduced state on a `k`-site window is expressed in moments,
/// `rho = 2^{-k} sum_w l(w) w`; when the sign rules make every entry between
/// different-magnetization states vanish symbolically, the block splits into
/// magnetization sectors and only the `m >= 0` sectors are emitted (the
/// negative sectors are index-permuted copies).
#[allow(clippy::needless_range_loop)] // paired matrix indices
pub fn rdm_blocks(
    lattice: Lattice,
    windows: &[u32],
    g: &SymmetryGroup,
    interner: &mut KeyInterner,
    realify: bool,
) -> Result<Vec<PsdBlock>> {
    let mut sizes: Vec<u32> = windows.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut blocks = Vec::new();
    for &k in &sizes {
        let sites = window_sites(lattice, k)?;
        let k = k as usize;
        let dim = 1usize << k;
        let mut ents = vec![vec![CLinExpr::zero(); dim]; dim];
        let scale = 1.0 / dim as f64;
        for wcode in 0..4usize.pow(k as u32) {
            let mut axes: Vec<Option<Axis>> = Vec::with_capacity(k);
            let mut letters: Vec<(Site, Axis)> = Vec::new();
            for (i, &site) in sites.iter().enumerate() {
                let a = match (wcode >> (2 * i)) & 3 {
                    0 => None,
                    1 => Some(Axis::X),
                    2 => Some(Axis::Y),
                    _ => Some(Axis::Z),
                };
                axes.push(a);
                if let Some(a) = a {
                    letters.push((site, a));
                }
            }
            let mono = PauliMonomial::from_letters(lattice, Phase::One, &letters)?;
            let mexpr = moment_of(&mono, g, interner).scaled(scale);
            if mexpr.is_zero() {
                continue;
            }
            for col in 0..dim {
                let (row, amp) = window_action(&axes, col);
                ents[row][col].add_scaled_complex(&mexpr, amp);
            }
        }
        for row in &mut ents {
            for e in row.iter_mut() {
                e.prune(COEFF_SNAP);
            }
        }
        // Hermiticity check (the expansion is exact, so any violation is a
        // compiler fault).
        for r in 0..dim {
            if residual(&ents[r][r].im) > IM_TOL {
                return Err(Error::StructureFault(format!(
                    "rdm k={k}: complex diagonal at state {r}"
                )));
            }
            for c in r + 1..dim {
                let mut d_re = ents[r][c].re.clone();
                d_re.add_scaled(&ents[c][r].re, -1.0);
                let mut d_im = ents[r][c].im.clone();
                d_im.add_scaled(&ents[c][r].im, 1.0);
                if residual(&d_re) > IM_TOL || residual(&d_im) > IM_TOL {
                    return Err(Error::StructureFault(format!(
                        "rdm k={k}: non-Hermitian entry ({r},{c})"
                    )));
                }
            }
        }

        let sector_split =
            g.options().xi_zero && g.options().eta_zero && cross_sector_entries_vanish(&ents, k);
        if sector_split {
            for p in 0..=(k / 2) {
                let m2 = k as i64 - 2 * p as i64; // twice the magnetization
                if m2 < 0 {
                    break;
                }
                let states: Vec<usize> =
                    (0..dim).filter(|s| s.count_ones() as usize == p).collect();
                let d = states.len();
                let mut re = Vec::with_capacity(d * (d + 1) / 2);
                let mut im = Vec::with_capacity(d * (d - 1) / 2);
                for a in 0..d {
                    for b in a..d {
                        let e = &ents[states[a]][states[b]];
                        re.push(e.re.clone());
                        if b > a {
                            im.push(e.im.clone());
                        }
                    }
                }
                let multiplicity = if m2 == 0 { 1 } else { 2 };
                blocks.push(PsdBlock::from_hermitian(
                    format!(
                        "rdm k={k} m={}{}",
                        m2 / 2,
                        if m2 % 2 != 0 { "/2" } else { "" }
                    ),
                    d,
                    multiplicity,
                    re,
                    im,
                    realify,
                )?);
            }
        } else {
            let mut re = Vec::with_capacity(dim * (dim + 1) / 2);
            let mut im = Vec::with_capacity(dim * (dim - 1) / 2);
            for r in 0..dim {
                for c in r..dim {
                    re.push(ents[r][c].re.clone());
                    if c > r {
                        im.push(ents[r][c].im.clone());
                    }
                }
            }
            blocks.push(PsdBlock::from_hermitian(
                format!("rdm k={k}"),
                dim,
                1,
                re,
                im,
                realify,
            )?);
        }
    }
    Ok(blocks)
}

#[allow(clippy::needless_range_loop)] // paired matrix indices
fn cross_sector_entries_vanish(ents: &[Vec<CLinExpr>], k: usize) -> bool {
    let dim = 1usize << k;
    for r in 0..dim {
        for c in 0..dim {
            if r.count_ones() != c.count_ones() && !ents[r][c].is_zero() {
                return false;
            }
        }
    }
    true
}

/// Stationarity equalities `l([H, u]) = 0` for every pattern `u` in the
/// chosen set. The commutator is anti-self-adjoint, so its moment is purely
/// imaginary; the imaginary part is emitted as a real equality and the real
/// part must cancel symbolically. Equalities are normalized and deduplicated.
pub fn commutator_equalities(
    model: &ModelSpec,
    set: CommutatorSet,
    pb: &PartitionedBasis,
    g: &SymmetryGroup,
    interner: &mut KeyInterner,
) -> Result<Vec<LinExpr>> {
    let max_deg = match set {
        CommutatorSet::None => return Ok(Vec::new()),
        CommutatorSet::Deg2 => 2,
        CommutatorSet::Basis => usize::MAX,
    };
    let terms = model.terms();
    let mut out: Vec<LinExpr> = Vec::new();
    for part in &pb.parts {
        for group in part.groups() {
            let u = &group.pattern;
            if u.is_identity_word() || u.degree() > max_deg {
                continue;
            }
            let mut acc = CLinExpr::zero();
            for (w, h) in &terms {
                let hu = h.multiply(u)?;
                let uh = u.multiply(h)?;
                acc.add_scaled_complex(&moment_of(&hu, g, interner), Complex64::new(*w, 0.0));
                acc.add_scaled_complex(&moment_of(&uh, g, interner), Complex64::new(-*w, 0.0));
            }
            acc.prune(COEFF_SNAP);
            if residual(&acc.re) > IM_TOL {
                return Err(Error::StructureFault(format!(
                    "commutator with {u} has a real component {}",
                    residual(&acc.re)
                )));
            }
            let mut eq = acc.im;
            if eq.is_zero() {
                continue;
            }
            // Normalize: unit leading coefficient on the lowest variable id.
            let lead = eq.terms()[0].1;
            eq.scale(1.0 / lead);
            eq.prune(COEFF_SNAP);
            if !out.iter().any(|e| e.approx_eq(&eq, 1e-12)) {
                out.push(eq);
            }
        }
    }
    Ok(out)
}

/// The minimal localizing border: identity, all single-site letters, and all
/// nearest-neighbor two-letter words.
pub fn minimal_border(lattice: Lattice) -> Result<MonomialBasis> {
    match lattice {
        Lattice::Chain { l } => crate::basis::build_1d(l, 2, 1),
        Lattice::Square { l } => {
            let mut raw = vec![PauliMonomial::identity(lattice)];
            for s in lattice.sites() {
                for a in Axis::ALL {
                    raw.push(PauliMonomial::single(lattice, s, a)?);
                }
            }
            for r in 1..=i64::from(l) {
                for c in 1..=i64::from(l) {
                    for (dr, dc) in [(0, 1), (1, 0)] {
                        let s1 = lattice.site_2d(r, c);
                        let s2 = lattice.site_2d(r + dr, c + dc);
                        for a in Axis::ALL {
                            for b in Axis::ALL {
                                raw.push(PauliMonomial::from_letters(
                                    lattice,
                                    Phase::One,
                                    &[(s1, a), (s2, b)],
                                )?);
                            }
                        }
                    }
                }
            }
            MonomialBasis::from_entries(lattice, raw)
        }
    }
}

/// Compile the ground-state optimality block over the border set:
/// `O_{uv} = l(u† H v) - (l(H u† v) + l(u† v H)) / 2`, positive semidefinite
/// whenever the state is supported on the ground space. Uses the same
/// sign-part and Fourier reduction as the moment matrix.
pub fn optimality_blocks(
    model: &ModelSpec,
    set: OptimalitySet,
    g: &SymmetryGroup,
    interner: &mut KeyInterner,
    realify: bool,
) -> Result<Vec<PsdBlock>> {
    let OptimalitySet::Minimal = set;
    let border = minimal_border(model.lattice())?;
    let pb = partition(&border)?;
    let terms = model.terms();
    let opts = g.options();
    let parts: &[usize] = if opts.axis_permutations {
        &[0, 1]
    } else {
        &[0, 1, 2, 3]
    };
    let mut blocks = Vec::new();
    for &pi in parts {
        let mut entryf = |u: &PauliMonomial, v: &PauliMonomial| -> Result<LinExpr> {
            let ua = u.adjoint();
            let mut acc = CLinExpr::zero();
            for (w, h) in &terms {
                let uhv = ua.multiply(h)?.multiply(v)?;
                let huv = h.multiply(&ua)?.multiply(v)?;
                let uvh = ua.multiply(v)?.multiply(h)?;
                acc.add_scaled_complex(&moment_of(&uhv, g, interner), Complex64::new(*w, 0.0));
                acc.add_scaled_complex(
                    &moment_of(&huv, g, interner),
                    Complex64::new(-0.5 * w, 0.0),
                );
                acc.add_scaled_complex(
                    &moment_of(&uvh, g, interner),
                    Complex64::new(-0.5 * w, 0.0),
                );
            }
            let mut rot = rotate_quarter(&acc, parity_delta(u.degree(), v.degree()));
            rot.prune(COEFF_SNAP);
            if residual(&rot.im) > IM_TOL {
                return Err(Error::StructureFault(format!(
                    "optimality entry {u} x {v} keeps an imaginary part"
                )));
            }
            Ok(rot.re)
        };
        blocks.extend(dft_part_blocks(
            "optimality",
            pi,
            &pb.parts[pi],
            model.lattice(),
            realify,
            &mut entryf,
        )?);
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_1d;
    use crate::model::ModelFamily;
    use crate::oracle::diagonalize;
    use crate::symmetry::SymmetryOptions;
    use faer::Side;

    fn chain(l: u32) -> ModelSpec {
        ModelSpec::new(ModelFamily::Chain, l, 0.0).unwrap()
    }

    fn min_eig(b: &PsdBlock, vals: &[f64]) -> f64 {
        b.eval_dense(vals)
            .self_adjoint_eigenvalues(Side::Lower)
            .unwrap()[0]
    }

    #[test]
    fn single_site_rdm_is_maximally_mixed() {
        let lat = Lattice::Chain { l: 6 };
        let g = SymmetryGroup::full(lat);
        let mut it = KeyInterner::new();
        let blocks = rdm_blocks(lat, &[1], &g, &mut it, true).unwrap();
        // Sectors m=1/2 only (dim 1), entry 1/2.
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].dim(), 1);
        assert_eq!(blocks[0].multiplicity(), 2);
        let e = blocks[0].entry(0, 0);
        assert!(e.terms().is_empty());
        assert!((e.constant_part() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_site_rdm_splits_into_sectors_with_axis_perms() {
        let lat = Lattice::Chain { l: 6 };
        let g = SymmetryGroup::full(lat);
        let mut it = KeyInterner::new();
        let blocks = rdm_blocks(lat, &[2], &g, &mut it, true).unwrap();
        let dims: Vec<usize> = blocks.iter().map(|b| b.dim()).collect();
        assert_eq!(dims, vec![1, 2]);
        assert_eq!(blocks[0].multiplicity(), 2);
        assert_eq!(blocks[1].multiplicity(), 1);

        // Without axis permutations l(XX) != l(YY) symbolically, so the
        // cross-sector entries survive and the window stays one block.
        let g2 = SymmetryGroup::new(
            lat,
            SymmetryOptions {
                axis_permutations: false,
                ..Default::default()
            },
        );
        let mut it2 = KeyInterner::new();
        let blocks2 = rdm_blocks(lat, &[2], &g2, &mut it2, true).unwrap();
        assert_eq!(blocks2.len(), 1);
        assert_eq!(blocks2[0].dim(), 4);
    }

    #[test]
    fn rdm_trace_is_one() {
        let lat = Lattice::Chain { l: 8 };
        let g = SymmetryGroup::full(lat);
        let mut it = KeyInterner::new();
        let blocks = rdm_blocks(lat, &[3], &g, &mut it, true).unwrap();
        // Sum of diagonal entries weighted by sector multiplicity.
        let mut tr = LinExpr::zero();
        for b in &blocks {
            for i in 0..b.dim() {
                tr.add_scaled(b.entry(i, i), b.multiplicity() as f64);
            }
        }
        tr.prune(1e-12);
        assert!(tr.terms().is_empty(), "trace has variable content: {tr:?}");
        assert!((tr.constant_part() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rdm_blocks_feasible_at_exact_moments() {
        for model in [
            chain(6),
            ModelSpec::new(ModelFamily::ChainJ1J2, 6, 0.5).unwrap(),
        ] {
            let gs = diagonalize(&model).unwrap();
            let g = SymmetryGroup::full(model.lattice());
            let mut it = KeyInterner::new();
            let blocks = rdm_blocks(model.lattice(), &[1, 2, 3], &g, &mut it, true).unwrap();
            let vals = gs.moment_values(&it).unwrap();
            for b in &blocks {
                let e = min_eig(b, &vals);
                assert!(e > -1e-9, "{} {}: min eig {e}", model, b.label());
            }
        }
    }

    #[test]
    fn rdm_square_plaquette_window() {
        // The four-site window cannot be split into magnetization sectors by the
        // sign rules alone: the entry pairing the all-down and all-up states is a
        // combination of four-letter X/Y moments that the rules leave nonzero.
        // The builder must detect this and emit the full window as one block.
        let lat = Lattice::Square { l: 4 };
        let g = SymmetryGroup::full(lat);
        let mut it = KeyInterner::new();
        let blocks = rdm_blocks(lat, &[4], &g, &mut it, true).unwrap();
        let dims: Vec<usize> = blocks.iter().map(|b| b.hermitian_dim()).collect();
        assert_eq!(dims, vec![16]);
        assert_eq!(blocks[0].multiplicity(), 1);
    }

    #[test]
    fn commutator_equalities_vacuous_under_full_group() {
        // With reflections and axis permutations active, every stationarity
        // equality cancels identically: the reflected image of each word enters
        // with the opposite imaginary phase, so the reduction already implies
        // them all and the builder emits nothing.
        let model = chain(6);
        let basis = build_1d(6, 3, 2).unwrap();
        let pb = partition(&basis).unwrap();
        let g = SymmetryGroup::full(model.lattice());
        let mut it = KeyInterner::new();
        let eqs = commutator_equalities(&model, CommutatorSet::Basis, &pb, &g, &mut it).unwrap();
        assert!(eqs.is_empty());
    }

    #[test]
    fn commutator_equalities_hold_on_exact_ground_states() {
        // Under a translation-only group the chirality-odd degree-3 patterns
        // produce genuine equalities; exact ground-space moments must satisfy
        // them since the ground projector commutes with the Hamiltonian.
        let opts = SymmetryOptions {
            point_group: false,
            axis_permutations: false,
            ..Default::default()
        };
        for model in [
            chain(6),
            ModelSpec::new(ModelFamily::ChainJ1J2, 6, 0.5).unwrap(),
        ] {
            let gs = diagonalize(&model).unwrap();
            let basis = build_1d(model.l, 3, 2).unwrap();
            let pb = partition(&basis).unwrap();
            let g = SymmetryGroup::new(model.lattice(), opts);
            let mut it = KeyInterner::new();
            let eqs =
                commutator_equalities(&model, CommutatorSet::Basis, &pb, &g, &mut it).unwrap();
            assert!(!eqs.is_empty());
            let vals = gs.moment_values(&it).unwrap();
            for eq in &eqs {
                let r = eq.eval(&vals);
                assert!(r.abs() < 1e-10, "{model}: residual {r}");
            }
        }
    }

    #[test]
    fn commutator_set_none_is_empty() {
        let model = chain(6);
        let basis = build_1d(6, 2, 1).unwrap();
        let pb = partition(&basis).unwrap();
        let g = SymmetryGroup::full(model.lattice());
        let mut it = KeyInterner::new();
        let eqs = commutator_equalities(&model, CommutatorSet::None, &pb, &g, &mut it).unwrap();
        assert!(eqs.is_empty());
    }

    #[test]
    fn optimality_blocks_feasible_at_exact_moments() {
        for model in [
            chain(6),
            ModelSpec::new(ModelFamily::ChainJ1J2, 6, 0.5).unwrap(),
        ] {
            let gs = diagonalize(&model).unwrap();
            let g = SymmetryGroup::full(model.lattice());
            let mut it = KeyInterner::new();
            let blocks =
                optimality_blocks(&model, OptimalitySet::Minimal, &g, &mut it, true).unwrap();
            assert!(!blocks.is_empty());
            let vals = gs.moment_values(&it).unwrap();
            for b in &blocks {
                let e = min_eig(b, &vals);
                assert!(e > -1e-7, "{} {}: min eig {e}", model, b.label());
            }
        }
    }

    #[test]
    fn minimal_border_sizes() {
        let b1 = minimal_border(Lattice::Chain { l: 8 }).unwrap();
        assert_eq!(b1.len(), 1 + 24 + 72);
        let b2 = minimal_border(Lattice::Square { l: 4 }).unwrap();
        assert_eq!(b2.len(), 1 + 48 + 288);
    }

    #[test]
    fn window_sites_shapes() {
        assert_eq!(window_sites(Lattice::Chain { l: 6 }, 3).unwrap().len(), 3);
        let sq = window_sites(Lattice::Square { l: 4 }, 4).unwrap();
        assert_eq!(sq.len(), 4);
        assert!(window_sites(Lattice::Chain { l: 4 }, 5).is_err());
    }
}
