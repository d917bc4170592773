use std::fmt;

use crate::rational::Rational;
use crate::symexpr::{Constraint, Relation};

/// Conjunction of equalities, weak and strict inequalities over `dim` variables.
///
/// Constraints without variables are folded on insertion: true ones are
/// dropped, a false one marks the polyhedron empty. Duplicates are dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polyhedron {
    dim: usize,
    eq: Vec<Constraint>,
    weak: Vec<Constraint>,
    strict: Vec<Constraint>,
    trivially_empty: bool,
}

impl Polyhedron {
    pub fn new(dim: usize) -> Self {
        Self { dim, ..Default::default() }
    }

    pub fn from_constraints<'a>(dim: usize, cs: impl IntoIterator<Item = &'a Constraint>) -> Self {
        let mut p = Self::new(dim);
        p.extend(cs);
        p
    }

    pub fn push(&mut self, c: Constraint) {
        assert!(
            c.support_dim() <= self.dim,
            "constraint {c} references a variable beyond dimension {}",
            self.dim
        );
        if c.is_constant() {
            if !c.holds_at(&[]) {
                self.trivially_empty = true;
            }
            return;
        }
        let list = match c.relation() {
            Relation::Eq => &mut self.eq,
            Relation::Le => &mut self.weak,
            Relation::Lt => &mut self.strict,
        };
        if !list.contains(&c) {
            list.push(c);
        }
    }

    pub fn extend<'a>(&mut self, cs: impl IntoIterator<Item = &'a Constraint>) {
        for c in cs {
            self.push(c.clone());
        }
    }

    pub fn with<'a>(&self, cs: impl IntoIterator<Item = &'a Constraint>) -> Self {
        let mut p = self.clone();
        p.extend(cs);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn equalities(&self) -> &[Constraint] {
        &self.eq
    }

    pub fn weak(&self) -> &[Constraint] {
        &self.weak
    }

    pub fn strict(&self) -> &[Constraint] {
        &self.strict
    }

    pub fn is_closed(&self) -> bool {
        self.strict.is_empty()
    }

    /// True when a variable-free constraint evaluated to false.
    pub fn is_trivially_empty(&self) -> bool {
        self.trivially_empty
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.eq.iter().chain(&self.weak).chain(&self.strict)
    }

    /// The closure: every strict inequality relaxed to a weak one.
    pub fn closure(&self) -> Self {
        let mut q = Self::new(self.dim);
        q.trivially_empty = self.trivially_empty;
        q.eq = self.eq.clone();
        q.weak = self.weak.clone();
        for c in &self.strict {
            q.push(c.weakened());
        }
        q
    }

    /// Every inequality made strict; equalities kept. Nonempty iff the
    /// polyhedron has nonempty interior relative to its equalities.
    pub fn strictified(&self) -> Self {
        let mut p = Self::new(self.dim);
        p.trivially_empty = self.trivially_empty;
        p.eq = self.eq.clone();
        p.strict = self.strict.clone();
        for c in &self.weak {
            p.push(c.strictified());
        }
        p
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        !self.trivially_empty && self.constraints().all(|c| c.holds_at(x))
    }

    pub fn closure_contains(&self, x: &[Rational]) -> bool {
        !self.trivially_empty && self.constraints().all(|c| c.weakened().holds_at(x))
    }
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trivially_empty {
            writeln!(f, "0 < 0")?;
        }
        for c in self.constraints() {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
