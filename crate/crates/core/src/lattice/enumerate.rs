//! Canonical forms, isomorphism search and enumeration of finite lattices.

use std::collections::BTreeMap;

use super::{default_names, FiniteSupLattice};
use crate::error::{Error, Result};
use crate::Limits;

/// Canonical code of a finite poset: the lexicographically greatest order
/// matrix (strict upper triangle, column by column) over all linear extensions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode {
    n: usize,
    bits: Vec<bool>,
}

impl CanonicalCode {
    pub fn size(&self) -> usize {
        self.n
    }
}

/// Best linear extension of the poset `0..n` ordered by `leq`.
fn best_extension(n: usize, leq: &dyn Fn(usize, usize) -> bool) -> (Vec<bool>, Vec<usize>) {
    struct Search<'a> {
        n: usize,
        leq: &'a dyn Fn(usize, usize) -> bool,
        strict_below: Vec<Vec<usize>>,
        placed: Vec<bool>,
        order: Vec<usize>,
        bits: Vec<bool>,
        best_bits: Option<Vec<bool>>,
        best_order: Vec<usize>,
    }

    impl Search<'_> {
        // `greater`: the current prefix already beats the best code.
        fn run(&mut self, greater: bool) {
            let pos = self.order.len();
            if pos == self.n {
                if greater || self.best_bits.is_none() {
                    self.best_bits = Some(self.bits.clone());
                    self.best_order = self.order.clone();
                }
                return;
            }
            for e in 0..self.n {
                if self.placed[e] || self.strict_below[e].iter().any(|&p| !self.placed[p]) {
                    continue;
                }
                let start = self.bits.len();
                let mut now_greater = greater;
                let mut pruned = false;
                for i in 0..pos {
                    let bit = (self.leq)(self.order[i], e);
                    self.bits.push(bit);
                    if !now_greater {
                        if let Some(best) = &self.best_bits {
                            let b = best[start + i];
                            if bit && !b {
                                now_greater = true;
                            } else if !bit && b {
                                pruned = true;
                                break;
                            }
                        }
                    }
                }
                if !pruned {
                    self.placed[e] = true;
                    self.order.push(e);
                    self.run(now_greater);
                    self.order.pop();
                    self.placed[e] = false;
                }
                self.bits.truncate(start);
            }
        }
    }

    let strict_below = (0..n)
        .map(|e| (0..n).filter(|&p| p != e && leq(p, e)).collect())
        .collect();
    let mut s = Search {
        n,
        leq,
        strict_below,
        placed: vec![false; n],
        order: Vec::with_capacity(n),
        bits: Vec::new(),
        best_bits: None,
        best_order: Vec::new(),
    };
    s.run(false);
    (s.best_bits.unwrap_or_default(), s.best_order)
}

pub fn canonical_code(lattice: &FiniteSupLattice) -> CanonicalCode {
    canonical_form(lattice).0
}

/// Canonical code plus the relabelling: `order[k]` is the original element
/// placed at canonical position `k`. Position 0 is bottom, the last is top.
pub fn canonical_form(lattice: &FiniteSupLattice) -> (CanonicalCode, Vec<usize>) {
    let (bits, order) = best_extension(lattice.len(), &|a, b| lattice.leq(a, b));
    (
        CanonicalCode {
            n: lattice.len(),
            bits,
        },
        order,
    )
}

/// Relabel `lattice` in canonical order with default names.
fn canonical_representative(lattice: &FiniteSupLattice) -> (CanonicalCode, FiniteSupLattice) {
    let (code, order) = canonical_form(lattice);
    let n = lattice.len();
    let leq: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| lattice.leq(order[i], order[j])).collect())
        .collect();
    let rep = FiniteSupLattice::from_leq(default_names(n), &leq)
        .expect("relabelling preserves the lattice property");
    (code, rep)
}

/// One lattice per isomorphism class of `n`-element lattices, in canonical
/// form (bottom first, top last, default names), sorted by descending code
/// so the chain comes first.
///
/// Lattices are grown from posets on the `n - 2` inner elements: every
/// poset of size `k + 1` is a poset of size `k` plus a maximal element, so
/// each level extends the previous one by one element above an arbitrary
/// down-set and keeps one canonical representative per class.
pub fn enumerate_lattices(n: usize, limits: &Limits) -> Result<Vec<FiniteSupLattice>> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > limits.max_lattice_size {
        return Err(Error::resource(
            format!("lattice enumeration at size {n}"),
            limits.max_lattice_size,
        ));
    }
    if n <= 2 {
        return Ok(vec![FiniteSupLattice::chain(n)]);
    }
    let inner = n - 2;
    let mut classes: BTreeMap<CanonicalCode, FiniteSupLattice> = BTreeMap::new();
    for poset in inner_posets(inner) {
        // 0 is bottom, 1..=inner are the poset elements, n-1 is top.
        let leq: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j || i == 0 || j == n - 1 {
                            true
                        } else if j == 0 || i == n - 1 {
                            false
                        } else {
                            poset[j - 1] & (1 << (i - 1)) != 0
                        }
                    })
                    .collect()
            })
            .collect();
        if let Ok(lattice) = FiniteSupLattice::from_leq(default_names(n), &leq) {
            let (code, rep) = canonical_representative(&lattice);
            classes.entry(code).or_insert(rep);
        }
    }
    Ok(classes.into_values().rev().collect())
}

/// Posets on `m` elements up to isomorphism, as strict-below bitmasks in a
/// labelling where every element's predecessors have smaller labels.
fn inner_posets(m: usize) -> Vec<Vec<u32>> {
    let mut level: Vec<Vec<u32>> = vec![Vec::new()];
    for k in 0..m {
        let mut next: BTreeMap<Vec<bool>, Vec<u32>> = BTreeMap::new();
        for poset in &level {
            for mask in 0u32..(1 << k) {
                let down_closed = (0..k)
                    .filter(|&i| mask & (1 << i) != 0)
                    .all(|i| poset[i] & !mask == 0);
                if !down_closed {
                    continue;
                }
                let mut grown = poset.clone();
                grown.push(mask);
                let leq = |a: usize, b: usize| a == b || grown[b] & (1 << a) != 0;
                let (bits, order) = best_extension(k + 1, &leq);
                next.entry(bits).or_insert_with(|| relabel_poset(&grown, &order));
            }
        }
        level = next.into_values().collect();
    }
    level
}

fn relabel_poset(poset: &[u32], order: &[usize]) -> Vec<u32> {
    let mut position = vec![0usize; order.len()];
    for (pos, &e) in order.iter().enumerate() {
        position[e] = pos;
    }
    order
        .iter()
        .map(|&e| {
            (0..poset.len())
                .filter(|&p| poset[e] & (1 << p) != 0)
                .fold(0u32, |acc, p| acc | (1 << position[p]))
        })
        .collect()
}

/// An order isomorphism `a → b` (as `map[x] = image`), if one exists.
pub fn find_isomorphism(a: &FiniteSupLattice, b: &FiniteSupLattice) -> Option<Vec<usize>> {
    let mut found = None;
    isomorphisms(a, b, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

pub fn is_isomorphic(a: &FiniteSupLattice, b: &FiniteSupLattice) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Every automorphism of `lattice`, identity first.
pub fn automorphisms(lattice: &FiniteSupLattice) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    isomorphisms(lattice, lattice, &mut |m| {
        all.push(m.to_vec());
        true
    });
    all.sort();
    let id: Vec<usize> = lattice.elements().collect();
    if let Some(pos) = all.iter().position(|m| *m == id) {
        all.swap(0, pos);
    }
    all
}

/// Backtracking over order isomorphisms; `visit` returns false to stop.
fn isomorphisms(
    a: &FiniteSupLattice,
    b: &FiniteSupLattice,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    if a.len() != b.len() {
        return;
    }
    let n = a.len();
    let signature = |l: &FiniteSupLattice, x: usize| {
        (
            l.down_set(x).count_ones(..),
            l.up_set(x).count_ones(..),
            l.lower_covers(x).len(),
        )
    };
    let sig_a: Vec<_> = a.elements().map(|x| signature(a, x)).collect();
    let sig_b: Vec<_> = b.elements().map(|x| signature(b, x)).collect();
    let mut sa = sig_a.clone();
    let mut sb = sig_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return;
    }
    let mut order: Vec<usize> = a.elements().collect();
    order.sort_by_key(|&x| (sig_a[x].0, x));

    fn go(
        depth: usize,
        order: &[usize],
        a: &FiniteSupLattice,
        b: &FiniteSupLattice,
        sig_a: &[(usize, usize, usize)],
        sig_b: &[(usize, usize, usize)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == order.len() {
            return visit(map);
        }
        let x = order[depth];
        for y in b.elements() {
            if used[y] || sig_a[x] != sig_b[y] {
                continue;
            }
            let consistent = order[..depth].iter().all(|&p| {
                a.leq(p, x) == b.leq(map[p], y) && a.leq(x, p) == b.leq(y, map[p])
            });
            if !consistent {
                continue;
            }
            map[x] = y;
            used[y] = true;
            let keep_going = go(depth + 1, order, a, b, sig_a, sig_b, map, used, visit);
            used[y] = false;
            if !keep_going {
                return false;
            }
        }
        true
    }

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    go(
        0, &order, a, b, &sig_a, &sig_b, &mut map, &mut used, visit,
    );
}
