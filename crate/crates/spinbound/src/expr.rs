//! Interned moment variables and sparse linear expressions over them.
//!
//! Every surviving moment orbit gets one real scalar variable (conjugate
//! symmetry makes moments of self-adjoint words real). Variables are numbered
//! in first-materialization order under the fixed assembly traversal, which
//! makes the compiled problems and exports deterministic.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::symmetry::MomentKey;

/// Identifier of one interned moment variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct KeyId(pub u32);

impl KeyId {
    /// Variable index (column in compiled problems).
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bidirectional map between moment keys and variable ids.
///
/// The identity key is never interned (its moment is the constant 1), and
/// forced-zero keys are never interned (their moments are dropped).
#[derive(Clone, Default)]
pub struct KeyInterner {
    keys: Vec<MomentKey>,
    ids: HashMap<MomentKey, KeyId>,
}

impl KeyInterner {
    /// Empty interner.
    pub fn new() -> Self {
        Self::default()
    }

    /// Id for a key, interning it on first sight.
    ///
    /// Panics if the key is forced-zero or the identity; callers route those
    /// to constants before interning.
    pub fn intern(&mut self, key: &MomentKey) -> KeyId {
        assert!(!key.is_zero(), "forced-zero keys are not variables");
        assert!(!key.is_identity(), "the identity moment is the constant 1");
        if let Some(&id) = self.ids.get(key) {
            return id;
        }
        let id = KeyId(self.keys.len() as u32);
        self.keys.push(key.clone());
        self.ids.insert(key.clone(), id);
        id
    }

    /// Id of an already-interned key.
    pub fn get(&self, key: &MomentKey) -> Option<KeyId> {
        self.ids.get(key).copied()
    }

    /// Key for an id.
    pub fn key(&self, id: KeyId) -> &MomentKey {
        &self.keys[id.index()]
    }

    /// All keys in id order.
    pub fn keys(&self) -> &[MomentKey] {
        &self.keys
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    /// Whether no variable has been interned.
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Expression for a single moment `l(key)`: zero when the key is forced to
/// zero, the constant 1 for the identity, otherwise the interned variable.
pub fn key_expr(key: &MomentKey, interner: &mut KeyInterner) -> LinExpr {
    if key.is_zero() {
        LinExpr::zero()
    } else if key.is_identity() {
        LinExpr::constant(1.0)
    } else {
        LinExpr::term(interner.intern(key), 1.0)
    }
}

/// Sparse real-linear expression `constant + sum coeff * l(key)`.
///
/// Terms are kept sorted by variable id with no explicit zero coefficients.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct LinExpr {
    constant: f64,
    terms: Vec<(KeyId, f64)>,
}

impl LinExpr {
    /// The zero expression.
    pub fn zero() -> Self {
        Self::default()
    }

    /// A constant expression.
    pub fn constant(c: f64) -> Self {
        LinExpr {
            constant: c,
            terms: Vec::new(),
        }
    }

    /// A single-variable expression `c * l(key)`.
    pub fn term(id: KeyId, c: f64) -> Self {
        if c == 0.0 {
            Self::zero()
        } else {
            LinExpr {
                constant: 0.0,
                terms: vec![(id, c)],
            }
        }
    }

    /// The constant part.
    pub fn constant_part(&self) -> f64 {
        self.constant
    }

    /// The variable terms, sorted by id.
    pub fn terms(&self) -> &[(KeyId, f64)] {
        &self.terms
    }

    /// Add `c` to the constant part.
    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    /// Add `c * l(id)`, merging into the sorted term list.
    pub fn add_term(&mut self, id: KeyId, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.binary_search_by_key(&id, |&(k, _)| k) {
            Ok(pos) => {
                self.terms[pos].1 += c;
                if self.terms[pos].1 == 0.0 {
                    self.terms.remove(pos);
                }
            }
            Err(pos) => self.terms.insert(pos, (id, c)),
        }
    }

    /// Add `s * other`.
    pub fn add_scaled(&mut self, other: &LinExpr, s: f64) {
        if s == 0.0 {
            return;
        }
        self.constant += s * other.constant;
        for &(id, c) in &other.terms {
            self.add_term(id, s * c);
        }
    }

    /// Multiply by a scalar in place.
    pub fn scale(&mut self, s: f64) {
        if s == 0.0 {
            *self = Self::zero();
            return;
        }
        self.constant *= s;
        for t in &mut self.terms {
            t.1 *= s;
        }
    }

    /// Scaled copy.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.terms.is_empty()
    }

    /// Drop terms (and the constant) with magnitude at most `eps`.
    pub fn prune(&mut self, eps: f64) {
        if self.constant.abs() <= eps {
            self.constant = 0.0;
        }
        self.terms.retain(|&(_, c)| c.abs() > eps);
    }

    /// Largest coefficient magnitude (constant included).
    pub fn max_abs(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(_, c)| c.abs())
            .fold(self.constant.abs(), f64::max)
    }

    /// Evaluate at a full variable assignment.
    pub fn eval(&self, values: &[f64]) -> f64 {
        let mut acc = self.constant;
        for &(id, c) in &self.terms {
            acc += c * values[id.index()];
        }
        acc
    }

    /// Coefficientwise comparison within `tol` (matching sparsity patterns
    /// are not required; missing terms count as zero).
    pub fn approx_eq(&self, other: &LinExpr, tol: f64) -> bool {
        if (self.constant - other.constant).abs() > tol {
            return false;
        }
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.terms.len() || j < other.terms.len() {
            let a = self.terms.get(i);
            let b = other.terms.get(j);
            match (a, b) {
                (Some(&(ia, ca)), Some(&(ib, cb))) => {
                    if ia == ib {
                        if (ca - cb).abs() > tol {
                            return false;
                        }
                        i += 1;
                        j += 1;
                    } else if ia < ib {
                        if ca.abs() > tol {
                            return false;
                        }
                        i += 1;
                    } else {
                        if cb.abs() > tol {
                            return false;
                        }
                        j += 1;
                    }
                }
                (Some(&(_, ca)), None) => {
                    if ca.abs() > tol {
                        return false;
                    }
                    i += 1;
                }
                (None, Some(&(_, cb))) => {
                    if cb.abs() > tol {
                        return false;
                    }
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        true
    }
}

/// Complex-linear expression split into real and imaginary parts.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct CLinExpr {
    /// Real part.
    pub re: LinExpr,
    /// Imaginary part.
    pub im: LinExpr,
}

impl CLinExpr {
    /// The zero expression.
    pub fn zero() -> Self {
        Self::default()
    }

    /// A real expression.
    pub fn from_real(re: LinExpr) -> Self {
        CLinExpr {
            re,
            im: LinExpr::zero(),
        }
    }

    /// Add `c * e` for a complex scalar `c` and real expression `e`.
    pub fn add_scaled(&mut self, e: &LinExpr, c: Complex64) {
        self.re.add_scaled(e, c.re);
        self.im.add_scaled(e, c.im);
    }

    /// Add `c * e` for a complex scalar `c` and complex expression `e`.
    pub fn add_scaled_complex(&mut self, e: &CLinExpr, c: Complex64) {
        self.re.add_scaled(&e.re, c.re);
        self.re.add_scaled(&e.im, -c.im);
        self.im.add_scaled(&e.im, c.re);
        self.im.add_scaled(&e.re, c.im);
    }

    /// Both parts scaled by a real factor.
    pub fn scaled(&self, s: f64) -> Self {
        CLinExpr {
            re: self.re.scaled(s),
            im: self.im.scaled(s),
        }
    }

    /// Drop coefficients at or below `eps` in both parts.
    pub fn prune(&mut self, eps: f64) {
        self.re.prune(eps);
        self.im.prune(eps);
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Whether the imaginary part vanishes exactly.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Evaluate at a variable assignment.
    pub fn eval(&self, values: &[f64]) -> Complex64 {
        Complex64::new(self.re.eval(values), self.im.eval(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, Lattice, PauliMonomial, Site};
    use crate::symmetry::SymmetryGroup;

    fn keys3() -> (KeyInterner, KeyId, KeyId, KeyId) {
        let l = Lattice::Chain { l: 8 };
        let g = SymmetryGroup::full(l);
        let mut it = KeyInterner::new();
        let mk = |sites: &[(u32, Axis)]| {
            let ls: Vec<(Site, Axis)> = sites.iter().map(|&(s, a)| (Site(s), a)).collect();
            g.canonical_key(&PauliMonomial::from_letters(l, crate::pauli::Phase::One, &ls).unwrap())
        };
        let a = it.intern(&mk(&[(0, Axis::X), (1, Axis::X)]));
        let b = it.intern(&mk(&[(0, Axis::X), (2, Axis::X)]));
        let c = it.intern(&mk(&[(0, Axis::X), (3, Axis::X)]));
        (it, a, b, c)
    }

    #[test]
    fn interner_is_stable_and_deduping() {
        let (it, a, b, c) = keys3();
        assert_eq!((a.0, b.0, c.0), (0, 1, 2));
        assert_eq!(it.len(), 3);
        assert_eq!(it.get(it.key(b)), Some(b));
    }

    #[test]
    fn term_merge_and_cancel() {
        let (_, a, b, _) = keys3();
        let mut e = LinExpr::term(a, 1.5);
        e.add_term(b, 2.0);
        e.add_term(a, -1.5);
        assert_eq!(e.terms(), &[(b, 2.0)]);
        e.add_term(b, -2.0);
        assert!(e.is_zero());
    }

    #[test]
    fn add_scaled_and_eval() {
        let (_, a, b, c) = keys3();
        let mut e = LinExpr::constant(1.0);
        e.add_term(a, 0.5);
        let mut f = LinExpr::term(b, 2.0);
        f.add_term(c, -1.0);
        e.add_scaled(&f, 0.25);
        let vals = [2.0, 4.0, 8.0];
        // 1 + 0.5*2 + 0.5*4 - 0.25*8 = 2.0
        assert_eq!(e.eval(&vals), 2.0);
    }

    #[test]
    fn approx_eq_handles_sparsity() {
        let (_, a, b, _) = keys3();
        let mut e = LinExpr::term(a, 1.0);
        e.add_term(b, 1e-14);
        let f = LinExpr::term(a, 1.0);
        assert!(e.approx_eq(&f, 1e-12));
        assert!(!e.approx_eq(&f, 1e-16));
    }

    #[test]
    fn complex_accumulation() {
        let (_, a, _, _) = keys3();
        let mut e = CLinExpr::zero();
        e.add_scaled(&LinExpr::term(a, 2.0), Complex64::new(0.0, 1.5));
        assert!(e.re.is_zero());
        assert_eq!(e.im.terms(), &[(a, 3.0)]);
        assert!(!e.is_real());
    }
}
