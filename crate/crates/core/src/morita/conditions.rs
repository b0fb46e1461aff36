//! The surjectivity and six pair conditions on a witness `(p, q)`.
//!
//! Conditions 1 and 2 are identities between trimorphisms of five variables
//! and are checked on elements. Conditions 3 to 6 compare curried maps on a
//! partial tensor and are checked on elementary tensors, which join-generate
//! it. [`check_pair_conditions_full`] evaluates everything on arbitrary
//! tensor elements instead, as an independent cross-check.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::witness::MoritaPairWitness;
use crate::error::Result;
use crate::lattice::FiniteSupLattice;
use crate::limits::Limits;
use crate::report::ConditionReport;
use crate::tensor::{multi_ideal_closure, MultiTensorLattice};

/// One half of a witness: `f: O⊗I⊗O → O` given on generators.
#[derive(Clone, Copy)]
pub(crate) struct Half<'a> {
    pub outer: &'a FiniteSupLattice,
    pub inner: &'a FiniteSupLattice,
    pub gen: &'a [usize],
    pub name: &'a str,
}

impl<'a> Half<'a> {
    pub fn new(outer: &'a FiniteSupLattice, inner: &'a FiniteSupLattice, gen: &'a [usize], name: &'a str) -> Self {
        Half {
            outer,
            inner,
            gen,
            name,
        }
    }

    #[inline]
    pub fn at(&self, o1: usize, i: usize, o2: usize) -> usize {
        self.gen[(o1 * self.inner.len() + i) * self.outer.len() + o2]
    }

    /// Elements of `outer` outside the image of the lift, if any.
    pub fn missed_by_image(&self) -> Option<Vec<usize>> {
        let mut values = FixedBitSet::with_capacity(self.outer.len());
        for &v in self.gen {
            values.insert(v);
        }
        let image = self.outer.join_closure(&values);
        let missed: Vec<usize> = self.outer.elements().filter(|&e| !image.contains(e)).collect();
        (!missed.is_empty()).then_some(missed)
    }

    /// Two distinct `o₁, o₂` with `f(−⊗o₁) = f(−⊗o₂)` on generators.
    pub fn right_collision(&self) -> Option<(usize, usize)> {
        first_collision(self.outer.len(), |o| {
            let mut key = Vec::with_capacity(self.outer.len() * self.inner.len());
            for u in self.outer.elements() {
                for v in self.inner.elements() {
                    key.push(self.at(u, v, o));
                }
            }
            key
        })
    }

    /// Two distinct `o₁, o₂` with `f(o₁⊗−) = f(o₂⊗−)` on generators.
    pub fn left_collision(&self) -> Option<(usize, usize)> {
        first_collision(self.outer.len(), |o| {
            let mut key = Vec::with_capacity(self.outer.len() * self.inner.len());
            for v in self.inner.elements() {
                for u in self.outer.elements() {
                    key.push(self.at(o, v, u));
                }
            }
            key
        })
    }

    fn describe_image(&self, missed: &[usize]) -> String {
        let names: Vec<&str> = missed.iter().map(|&e| self.outer.name(e)).collect();
        format!("the image of {} misses {}", self.name, names.join(", "))
    }

    fn describe_collision(&self, (a, b): (usize, usize), left: bool) -> String {
        let (a, b) = (self.outer.name(a), self.outer.name(b));
        if left {
            format!("{f}({a}⊗−) = {f}({b}⊗−) but {a} ≠ {b}", f = self.name)
        } else {
            format!("{f}(−⊗{a}) = {f}(−⊗{b}) but {a} ≠ {b}", f = self.name)
        }
    }
}

fn first_collision(n: usize, key: impl Fn(usize) -> Vec<usize>) -> Option<(usize, usize)> {
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::with_capacity(n);
    for o in 0..n {
        if let Some(&first) = seen.get(&key(o)) {
            return Some((first, o));
        }
        seen.insert(key(o), o);
    }
    None
}

/// A five-variable instance where condition 1 (for `f`, `g` as `p`, `q`)
/// fails: `[o₁, i₁, o₂, i₂, o₃]` and the three values.
pub(crate) type LinkingFailure = ([usize; 5], [usize; 3]);

/// `f(f(o₁⊗i₁⊗o₂)⊗i₂⊗o₃) = f(o₁⊗g(i₁⊗o₂⊗i₂)⊗o₃) = f(o₁⊗i₁⊗f(o₂⊗i₂⊗o₃))`.
pub(crate) fn linking_failure(f: Half<'_>, g: Half<'_>) -> Option<LinkingFailure> {
    let (no, ni) = (f.outer.len(), f.inner.len());
    (0..no).into_par_iter().find_map_first(|o1| {
        for i1 in 0..ni {
            for o2 in 0..no {
                let head = f.at(o1, i1, o2);
                for i2 in 0..ni {
                    let mid = g.at(i1, o2, i2);
                    for o3 in 0..no {
                        let l = f.at(head, i2, o3);
                        let m = f.at(o1, mid, o3);
                        let r = f.at(o1, i1, f.at(o2, i2, o3));
                        if l != m || m != r {
                            return Some(([o1, i1, o2, i2, o3], [l, m, r]));
                        }
                    }
                }
            }
        }
        None
    })
}

pub(crate) fn describe_linking(f: Half<'_>, g: Half<'_>, (v, vals): LinkingFailure) -> String {
    let o = |e: usize| f.outer.name(e);
    let i = |e: usize| f.inner.name(e);
    let (fl, gl) = (f.name, g.name);
    format!(
        "at ({}, {}, {}, {}, {}): {fl}({fl}(o₁⊗i₁⊗o₂)⊗i₂⊗o₃) = {}, {fl}(o₁⊗{gl}(i₁⊗o₂⊗i₂)⊗o₃) = {}, {fl}(o₁⊗i₁⊗{fl}(o₂⊗i₂⊗o₃)) = {}",
        o(v[0]),
        i(v[1]),
        o(v[2]),
        i(v[3]),
        o(v[4]),
        o(vals[0]),
        o(vals[1]),
        o(vals[2])
    )
}

pub(crate) fn halves(w: &MoritaPairWitness) -> (Half<'_>, Half<'_>) {
    (
        Half::new(w.x(), w.y(), w.p_generators(), "p"),
        Half::new(w.y(), w.x(), w.q_generators(), "q"),
    )
}

/// Surjectivity of `p` and `q` and conditions 1–6, on generators.
///
/// Check ids: `surjective(p)`, `surjective(q)`, `1` … `6`.
pub fn check_pair_conditions(w: &MoritaPairWitness) -> ConditionReport {
    let (p, q) = halves(w);
    let mut r = ConditionReport::new();
    r.record("surjective(p)", p.missed_by_image().map(|m| p.describe_image(&m)));
    r.record("surjective(q)", q.missed_by_image().map(|m| q.describe_image(&m)));
    r.record("1", linking_failure(p, q).map(|f| describe_linking(p, q, f)));
    r.record("2", linking_failure(q, p).map(|f| describe_linking(q, p, f)));
    r.record("3", p.right_collision().map(|c| p.describe_collision(c, false)));
    r.record("4", p.left_collision().map(|c| p.describe_collision(c, true)));
    r.record("5", q.right_collision().map(|c| q.describe_collision(c, false)));
    r.record("6", q.left_collision().map(|c| q.describe_collision(c, true)));
    r
}

/// One half of a witness as a full sup-map on its tensor.
struct FullHalf<'a> {
    outer: &'a FiniteSupLattice,
    inner: &'a FiniteSupLattice,
    tensor: &'a MultiTensorLattice,
    values: &'a [usize],
    name: &'a str,
}

impl FullHalf<'_> {
    fn elem(&self, o1: usize, i: usize, o2: usize) -> usize {
        self.values[self.tensor.elem_tensor(&[o1, i, o2])]
    }

    /// `f(c⊗o)` for `c` an element of `O⊗I` (`right`) or `f(o⊗c)` for `c` in `I⊗O`.
    fn with_partial(&self, partial: &MultiTensorLattice, c: usize, o: usize, right: bool) -> usize {
        let space = self.tensor.space();
        let mut seed = FixedBitSet::with_capacity(space.len());
        for t in partial.ideal(c).ones() {
            let pc = partial.space().coords(t);
            for w in self.outer.down_set(o).ones() {
                let tuple = if right { [pc[0], pc[1], w] } else { [w, pc[0], pc[1]] };
                seed.insert(space.index(&tuple));
            }
        }
        let ideal = multi_ideal_closure(self.tensor.factors(), &seed);
        self.values[self.tensor.element_of(&ideal)]
    }

    fn separation(&self, partial: &MultiTensorLattice, right: bool) -> Option<String> {
        first_collision(self.outer.len(), |o| {
            (0..partial.len()).map(|c| self.with_partial(partial, c, o, right)).collect()
        })
        .map(|(a, b)| {
            let (a, b) = (self.outer.name(a), self.outer.name(b));
            if right {
                format!("{f}(c⊗{a}) = {f}(c⊗{b}) for every c but {a} ≠ {b}", f = self.name)
            } else {
                format!("{f}({a}⊗c) = {f}({b}⊗c) for every c but {a} ≠ {b}", f = self.name)
            }
        })
    }

    fn surjectivity(&self) -> Option<String> {
        let mut image = FixedBitSet::with_capacity(self.outer.len());
        for &v in self.values {
            image.insert(v);
        }
        let missed: Vec<&str> = self
            .outer
            .elements()
            .filter(|&e| !image.contains(e))
            .map(|e| self.outer.name(e))
            .collect();
        (!missed.is_empty()).then(|| format!("the image of {} misses {}", self.name, missed.join(", ")))
    }
}

/// Condition 1 (or 2) with one triple at a time replaced by an arbitrary
/// tensor element; the other terms are extended to it by the join over its
/// tuples.
fn linking_full(f: &FullHalf<'_>, g: &FullHalf<'_>) -> Option<String> {
    let (no, ni) = (f.outer.len(), f.inner.len());
    let join = |it: &mut dyn Iterator<Item = usize>| f.outer.join_of(it);
    let coords = |t: &MultiTensorLattice, i: usize| t.space().coords(i);
    let name = f.name;
    let mismatch = |where_: String, l: usize, m: usize, r: usize| {
        (l != m || m != r).then(|| {
            format!(
                "{where_}: the three sides evaluate to {}, {}, {}",
                f.outer.name(l),
                f.outer.name(m),
                f.outer.name(r)
            )
        })
    };

    // The head triple o₁⊗i₁⊗o₂ replaced by a ∈ O⊗I⊗O.
    for a in 0..f.tensor.len() {
        let tuples: Vec<Vec<usize>> = f.tensor.ideal(a).ones().map(|t| coords(f.tensor, t)).collect();
        for i2 in 0..ni {
            for o3 in 0..no {
                let l = f.elem(f.values[a], i2, o3);
                let m = join(&mut tuples.iter().map(|t| f.elem(t[0], g.elem(t[1], t[2], i2), o3)));
                let r = join(&mut tuples.iter().map(|t| f.elem(t[0], t[1], f.elem(t[2], i2, o3))));
                let cx = mismatch(
                    format!("{name}(a)⊗{}⊗{} with a = {}", f.inner.name(i2), f.outer.name(o3), f.tensor.lattice().name(a)),
                    l,
                    m,
                    r,
                );
                if cx.is_some() {
                    return cx;
                }
            }
        }
    }
    // The tail triple o₂⊗i₂⊗o₃ replaced by b ∈ O⊗I⊗O.
    for b in 0..f.tensor.len() {
        let tuples: Vec<Vec<usize>> = f.tensor.ideal(b).ones().map(|t| coords(f.tensor, t)).collect();
        for o1 in 0..no {
            for i1 in 0..ni {
                let l = join(&mut tuples.iter().map(|t| f.elem(f.elem(o1, i1, t[0]), t[1], t[2])));
                let m = join(&mut tuples.iter().map(|t| f.elem(o1, g.elem(i1, t[0], t[1]), t[2])));
                let r = f.elem(o1, i1, f.values[b]);
                let cx = mismatch(
                    format!("{}⊗{}⊗{name}(b) with b = {}", f.outer.name(o1), f.inner.name(i1), f.tensor.lattice().name(b)),
                    l,
                    m,
                    r,
                );
                if cx.is_some() {
                    return cx;
                }
            }
        }
    }
    // The middle triple i₁⊗o₂⊗i₂ replaced by c ∈ I⊗O⊗I.
    for c in 0..g.tensor.len() {
        let tuples: Vec<Vec<usize>> = g.tensor.ideal(c).ones().map(|t| coords(g.tensor, t)).collect();
        for o1 in 0..no {
            for o3 in 0..no {
                let l = join(&mut tuples.iter().map(|t| f.elem(f.elem(o1, t[0], t[1]), t[2], o3)));
                let m = f.elem(o1, g.values[c], o3);
                let r = join(&mut tuples.iter().map(|t| f.elem(o1, t[0], f.elem(t[1], t[2], o3))));
                let cx = mismatch(
                    format!("{}⊗{}(c)⊗{} with c = {}", f.outer.name(o1), g.name, f.outer.name(o3), g.tensor.lattice().name(c)),
                    l,
                    m,
                    r,
                );
                if cx.is_some() {
                    return cx;
                }
            }
        }
    }
    None
}

/// The same report as [`check_pair_conditions`], computed from the full
/// tables of `p` and `q` on arbitrary tensor elements. Conditions 3–6 are
/// compared over every element of the partial tensors `X⊗Y` and `Y⊗X`,
/// each `c⊗x` formed by multi-ideal closure.
pub fn check_pair_conditions_full(w: &MoritaPairWitness, limits: &Limits) -> Result<ConditionReport> {
    let t_xy = MultiTensorLattice::new(vec![w.x().clone(), w.y().clone()], limits)?;
    let t_yx = MultiTensorLattice::new(vec![w.y().clone(), w.x().clone()], limits)?;
    let p = FullHalf {
        outer: w.x(),
        inner: w.y(),
        tensor: w.t_xyx(),
        values: w.p().values(),
        name: "p",
    };
    let q = FullHalf {
        outer: w.y(),
        inner: w.x(),
        tensor: w.t_yxy(),
        values: w.q().values(),
        name: "q",
    };
    let mut r = ConditionReport::new();
    r.record("surjective(p)", p.surjectivity());
    r.record("surjective(q)", q.surjectivity());
    r.record("1", linking_full(&p, &q));
    r.record("2", linking_full(&q, &p));
    r.record("3", p.separation(&t_xy, true));
    r.record("4", p.separation(&t_yx, false));
    r.record("5", q.separation(&t_yx, true));
    r.record("6", q.separation(&t_xy, false));
    Ok(r)
}
