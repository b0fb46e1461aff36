//! Finite sup-lattices stored as an order bit-matrix with precomputed
//! join and meet tables.

mod enumerate;
pub(crate) mod map;

use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use crate::error::{Error, OrderViolation, Result};

pub use enumerate::{
    automorphisms, canonical_code, canonical_form, enumerate_lattices, find_isomorphism,
    is_isomorphic, CanonicalCode,
};
pub use map::{enumerate_sup_maps, is_sup_map, JoinFailure, SupLatticeInvolution, SupMap};

/// A finite complete lattice with indexed, named elements.
///
/// Elements are `0..len()`. The order is held both as up-sets and down-sets
/// (one bitset row per element); join and meet are full `n × n` tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSupLattice {
    names: Vec<String>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    join: Vec<usize>,
    meet: Vec<usize>,
    bottom: usize,
    top: usize,
    join_irreducibles: Vec<usize>,
}

impl FiniteSupLattice {
    /// Validate an order relation given as rows: `leq[i][j]` iff element `i ≤ j`.
    pub fn from_leq(names: Vec<String>, leq: &[Vec<bool>]) -> Result<Self> {
        let n = names.len();
        if leq.len() != n || leq.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "{} names but order matrix is not {n}×{n}",
                n
            )));
        }
        let rows = leq
            .iter()
            .map(|row| {
                let mut bits = FixedBitSet::with_capacity(n);
                for (j, &b) in row.iter().enumerate() {
                    bits.set(j, b);
                }
                bits
            })
            .collect();
        Self::from_up_sets(names, rows)
    }

    /// Build from covering pairs `(lower, upper)`; the order is their reflexive-transitive closure.
    pub fn from_covers(names: &[&str], covers: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut up: Vec<FixedBitSet> = (0..n)
            .map(|i| {
                let mut b = FixedBitSet::with_capacity(n);
                b.insert(i);
                b
            })
            .collect();
        for &(lo, hi) in covers {
            if lo >= n || hi >= n {
                return Err(Error::ShapeMismatch(format!(
                    "cover ({lo}, {hi}) out of range for {n} elements"
                )));
            }
            up[lo].insert(hi);
        }
        // Warshall on bit rows.
        for k in 0..n {
            for i in 0..n {
                if up[i].contains(k) {
                    let row = up[k].clone();
                    up[i].union_with(&row);
                }
            }
        }
        Self::from_up_sets(names.iter().map(|s| s.to_string()).collect(), up)
    }

    /// Validate an order given as up-set rows (`up[i]` holds every `j` with `i ≤ j`).
    pub fn from_up_sets(names: Vec<String>, up: Vec<FixedBitSet>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if up.len() != n || up.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "order relation must be {n}×{n}"
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::ShapeMismatch(format!("duplicate element name {name:?}")));
            }
        }
        let nm = |i: usize| names[i].clone();

        for i in 0..n {
            if !up[i].contains(i) {
                return Err(Error::NotAPartialOrder(OrderViolation::NotReflexive(nm(i))));
            }
        }
        for i in 0..n {
            for j in up[i].ones() {
                if j > i && up[j].contains(i) {
                    return Err(Error::NotAPartialOrder(OrderViolation::NotAntisymmetric(
                        nm(i),
                        nm(j),
                    )));
                }
            }
        }
        for i in 0..n {
            for j in up[i].ones() {
                if let Some(k) = up[j].difference(&up[i]).next() {
                    return Err(Error::NotAPartialOrder(OrderViolation::NotTransitive(
                        nm(i),
                        nm(j),
                        nm(k),
                    )));
                }
            }
        }

        let mut down: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        for i in 0..n {
            for j in up[i].ones() {
                down[j].insert(i);
            }
        }

        let bottom = (0..n)
            .find(|&i| up[i].count_ones(..) == n)
            .ok_or(Error::NoBottom)?;

        let down_count: Vec<usize> = down.iter().map(|d| d.count_ones(..)).collect();
        let mut join = vec![0usize; n * n];
        for a in 0..n {
            join[a * n + a] = a;
            for b in (a + 1)..n {
                let mut ub = up[a].clone();
                ub.intersect_with(&up[b]);
                let least = ub
                    .ones()
                    .min_by_key(|&u| down_count[u])
                    .filter(|&u| ub.is_subset(&up[u]))
                    .ok_or_else(|| Error::MissingJoin(nm(a), nm(b)))?;
                join[a * n + b] = least;
                join[b * n + a] = least;
            }
        }

        let top = (0..n)
            .find(|&i| down_count[i] == n)
            .ok_or(Error::NoTop)?;

        let mut meet = vec![0usize; n * n];
        for a in 0..n {
            meet[a * n + a] = a;
            for b in (a + 1)..n {
                let mut lb = down[a].clone();
                lb.intersect_with(&down[b]);
                let greatest = lb
                    .ones()
                    .max_by_key(|&u| down_count[u])
                    .filter(|&u| lb.is_subset(&down[u]))
                    .expect("a finite join-semilattice with bottom has all meets");
                meet[a * n + b] = greatest;
                meet[b * n + a] = greatest;
            }
        }

        Ok(Self::assemble(names, up, down, join, meet, bottom, top))
    }

    /// Assemble from tables already known to describe a lattice.
    pub(crate) fn from_tables(
        names: Vec<String>,
        up: Vec<FixedBitSet>,
        join: Vec<usize>,
        meet: Vec<usize>,
    ) -> Self {
        let n = names.len();
        let mut down: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        for i in 0..n {
            for j in up[i].ones() {
                down[j].insert(i);
            }
        }
        let bottom = (0..n).find(|&i| up[i].count_ones(..) == n).expect("bottom");
        let top = (0..n).find(|&i| down[i].count_ones(..) == n).expect("top");
        Self::assemble(names, up, down, join, meet, bottom, top)
    }

    fn assemble(
        names: Vec<String>,
        up: Vec<FixedBitSet>,
        down: Vec<FixedBitSet>,
        join: Vec<usize>,
        meet: Vec<usize>,
        bottom: usize,
        top: usize,
    ) -> Self {
        let n = names.len();
        // j is join-irreducible iff it has exactly one lower cover.
        let mut join_irreducibles: Vec<usize> = (0..n)
            .filter(|&j| j != bottom)
            .filter(|&j| {
                let below: Vec<usize> = down[j].ones().filter(|&x| x != j).collect();
                let covers = below
                    .iter()
                    .filter(|&&x| !below.iter().any(|&z| z != x && up[x].contains(z)))
                    .count();
                covers == 1
            })
            .collect();
        join_irreducibles.sort_by_key(|&j| (down[j].count_ones(..), j));
        FiniteSupLattice {
            names,
            up,
            down,
            join,
            meet,
            bottom,
            top,
            join_irreducibles,
        }
    }

    /// The chain `0 < a < b < … < 1` with `n` elements.
    pub fn chain(n: usize) -> Self {
        assert!(n >= 1, "a chain needs at least one element");
        let names = default_names(n);
        let leq: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        Self::from_leq(names, &leq).expect("chains are lattices")
    }

    /// The four-element Boolean lattice `0 < a, b < 1` (also called M2 or the diamond).
    pub fn diamond() -> Self {
        Self::from_covers(&["0", "a", "b", "1"], &[(0, 1), (0, 2), (1, 3), (2, 3)])
            .expect("diamond is a lattice")
    }

    /// The non-distributive lattice M3 with three incomparable atoms.
    pub fn m3() -> Self {
        Self::from_covers(
            &["0", "a", "b", "c", "1"],
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .expect("M3 is a lattice")
    }

    /// The pentagon N5: `0 < a < b < 1`, `0 < c < 1`.
    pub fn n5() -> Self {
        Self::from_covers(
            &["0", "a", "b", "c", "1"],
            &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
        )
        .expect("N5 is a lattice")
    }

    /// Cartesian product with componentwise order; names are `x.y`.
    pub fn product(a: &Self, b: &Self) -> Self {
        let n = a.len() * b.len();
        let names = (0..n)
            .map(|i| format!("{}.{}", a.name(i / b.len()), b.name(i % b.len())))
            .collect();
        let leq: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        a.leq(i / b.len(), j / b.len()) && b.leq(i % b.len(), j % b.len())
                    })
                    .collect()
            })
            .collect();
        Self::from_leq(names, &leq).expect("products of lattices are lattices")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b]
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Join of an arbitrary family; the empty join is bottom.
    pub fn join_of<I: IntoIterator<Item = usize>>(&self, elems: I) -> usize {
        elems
            .into_iter()
            .fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_of<I: IntoIterator<Item = usize>>(&self, elems: I) -> usize {
        elems.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Elements `b` with `a ≤ b`.
    pub fn up_set(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    /// Elements `b` with `b ≤ a`.
    pub fn down_set(&self, a: usize) -> &FixedBitSet {
        &self.down[a]
    }

    /// Join-irreducible elements, ordered so that smaller elements come first.
    pub fn join_irreducibles(&self) -> &[usize] {
        &self.join_irreducibles
    }

    pub fn is_join_irreducible(&self, a: usize) -> bool {
        self.join_irreducibles.contains(&a)
    }

    /// Elements strictly below `a` with nothing strictly in between.
    pub fn lower_covers(&self, a: usize) -> Vec<usize> {
        let below: Vec<usize> = self.down[a].ones().filter(|&x| x != a).collect();
        below
            .iter()
            .copied()
            .filter(|&x| !below.iter().any(|&z| z != x && self.leq(x, z)))
            .collect()
    }

    /// Join-closure of a subset (always contains bottom).
    pub fn join_closure(&self, subset: &FixedBitSet) -> FixedBitSet {
        let mut closed = FixedBitSet::with_capacity(self.len());
        closed.insert(self.bottom);
        let mut frontier: Vec<usize> = subset.ones().collect();
        for &x in &frontier {
            closed.insert(x);
        }
        while let Some(x) = frontier.pop() {
            let members: Vec<usize> = closed.ones().collect();
            for y in members {
                let j = self.join(x, y);
                if !closed.contains(j) {
                    closed.insert(j);
                    frontier.push(j);
                }
            }
        }
        closed
    }

    /// The order matrix rendered as `0`/`1` rows.
    pub fn leq_rows(&self) -> Vec<String> {
        self.elements()
            .map(|i| {
                self.elements()
                    .map(|j| if self.leq(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    /// Compact identifier of this labelled lattice: `n:row/row/…`.
    pub fn order_id(&self) -> String {
        format!("{}:{}", self.len(), self.leq_rows().join("/"))
    }

    /// The same lattice with every name starred; starring twice restores the names.
    pub fn conjugate(&self) -> Self {
        let mut out = self.clone();
        out.names = self.names.iter().map(|n| conjugate_name(n)).collect();
        out
    }

    /// Same order, new labels.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} names for {} elements",
                names.len(),
                self.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::ShapeMismatch(format!("duplicate element name {name:?}")));
            }
        }
        let mut out = self.clone();
        out.names = names;
        Ok(out)
    }

    /// Same lattice and labels as `other` up to names.
    pub fn same_order(&self, other: &Self) -> bool {
        self.up == other.up
    }

    pub fn is_distributive(&self) -> bool {
        self.elements().all(|a| {
            self.elements().all(|b| {
                self.elements().all(|c| {
                    self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c))
                })
            })
        })
    }
}

pub(crate) fn conjugate_name(name: &str) -> String {
    match name.strip_suffix('*') {
        Some(base) => base.to_string(),
        None => format!("{name}*"),
    }
}

/// `0`, `a`, `b`, …, `1` for `n ≥ 2`; just `0` for the one-element lattice.
pub fn default_names(n: usize) -> Vec<String> {
    match n {
        0 => Vec::new(),
        1 => vec!["0".to_string()],
        _ => {
            let mut names = vec!["0".to_string()];
            for i in 0..n - 2 {
                names.push(inner_name(i));
            }
            names.push("1".to_string());
            names
        }
    }
}

fn inner_name(i: usize) -> String {
    let letters = b"abcdefghijklmnopqrstuvwxyz";
    if i < letters.len() {
        (letters[i] as char).to_string()
    } else {
        format!("e{i}")
    }
}
