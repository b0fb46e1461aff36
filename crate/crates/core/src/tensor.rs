//! The sup-lattice tensor product `X₁ ⊗ … ⊗ Xₖ` of finite sup-lattices.
//!
//! Elements are multi-ideals of the product `X₁ × … × Xₖ`: down-sets whose
//! fiber in every slot (the other coordinates fixed) is closed under all
//! joins. Since a fiber is a down-set, closure under all joins means it is
//! the principal down-set of its own join; the empty join forces every tuple
//! with a bottom coordinate into every multi-ideal. The elementary tensor
//! `x₁ ⊗ … ⊗ xₖ` is the multi-ideal generated by the single tuple.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{FiniteSupLattice, SupMap};
use crate::{Limits, Verdict};

/// Mixed-radix indexing of `X₁ × … × Xₖ`; the first coordinate is most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl TupleSpace {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let len = dims.iter().product();
        TupleSpace { dims, strides, len }
    }

    pub fn of(factors: &[Arc<FiniteSupLattice>]) -> Self {
        Self::new(factors.iter().map(|f| f.len()).collect())
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.dims.len());
        coords
            .iter()
            .zip(&self.strides)
            .map(|(c, s)| c * s)
            .sum()
    }

    pub fn coords(&self, idx: usize) -> Vec<usize> {
        (0..self.arity()).map(|s| self.coord(idx, s)).collect()
    }

    #[inline]
    pub fn coord(&self, idx: usize, slot: usize) -> usize {
        (idx / self.strides[slot]) % self.dims[slot]
    }

    #[inline]
    pub fn with_coord(&self, idx: usize, slot: usize, value: usize) -> usize {
        idx - self.coord(idx, slot) * self.strides[slot] + value * self.strides[slot]
    }
}

/// Least multi-ideal of `factors` containing `seed` (a subset of the tuple space).
pub fn multi_ideal_closure(factors: &[Arc<FiniteSupLattice>], seed: &FixedBitSet) -> FixedBitSet {
    Closure::new(factors).close(seed)
}

/// Precomputed data for the closure fixpoint.
#[derive(Clone, Debug)]
struct Closure {
    factors: Vec<Arc<FiniteSupLattice>>,
    space: TupleSpace,
    lower_covers: Vec<Vec<Vec<usize>>>,
    /// Tuples with at least one bottom coordinate.
    floor: FixedBitSet,
    /// For each slot, the tuples whose coordinate in that slot is bottom.
    line_bases: Vec<Vec<usize>>,
}

impl Closure {
    fn new(factors: &[Arc<FiniteSupLattice>]) -> Self {
        let space = TupleSpace::of(factors);
        let lower_covers = factors
            .iter()
            .map(|f| f.elements().map(|x| f.lower_covers(x)).collect())
            .collect();
        let mut floor = FixedBitSet::with_capacity(space.len());
        for t in 0..space.len() {
            if (0..space.arity()).any(|s| space.coord(t, s) == factors[s].bottom()) {
                floor.insert(t);
            }
        }
        let line_bases = (0..space.arity())
            .map(|s| {
                (0..space.len())
                    .filter(|&t| space.coord(t, s) == factors[s].bottom())
                    .collect()
            })
            .collect();
        Closure {
            factors: factors.to_vec(),
            space,
            lower_covers,
            floor,
            line_bases,
        }
    }

    fn close(&self, seed: &FixedBitSet) -> FixedBitSet {
        let mut set = self.floor.clone();
        set.grow(self.space.len());
        set.union_with(seed);
        let mut work: Vec<usize> = set.ones().collect();
        loop {
            while let Some(t) = work.pop() {
                for slot in 0..self.space.arity() {
                    let x = self.space.coord(t, slot);
                    for &c in &self.lower_covers[slot][x] {
                        let u = self.space.with_coord(t, slot, c);
                        if !set.put(u) {
                            work.push(u);
                        }
                    }
                }
            }
            for slot in 0..self.space.arity() {
                let factor = &self.factors[slot];
                for &base in &self.line_bases[slot] {
                    let top = factor.join_of(
                        factor
                            .elements()
                            .filter(|&x| set.contains(self.space.with_coord(base, slot, x))),
                    );
                    let u = self.space.with_coord(base, slot, top);
                    if !set.put(u) {
                        work.push(u);
                    }
                }
            }
            if work.is_empty() {
                return set;
            }
        }
    }
}

/// The tensor product as a lattice of multi-ideals, with the elementary-tensor table.
#[derive(Clone)]
pub struct MultiTensorLattice {
    closure: Closure,
    ideals: Vec<FixedBitSet>,
    index: HashMap<FixedBitSet, usize>,
    lattice: Arc<FiniteSupLattice>,
    elem: Vec<usize>,
}

impl fmt::Debug for MultiTensorLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiTensorLattice")
            .field("factors", &self.factors().iter().map(|x| x.len()).collect::<Vec<_>>())
            .field("elements", &self.len())
            .finish()
    }
}

impl PartialEq for MultiTensorLattice {
    fn eq(&self, other: &Self) -> bool {
        self.closure.factors == other.closure.factors && self.ideals == other.ideals
    }
}

impl Eq for MultiTensorLattice {}

impl MultiTensorLattice {
    /// Enumerate every multi-ideal of `X₁ × … × Xₖ` and build the lattice.
    pub fn new(factors: Vec<Arc<FiniteSupLattice>>, limits: &Limits) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::ShapeMismatch(
                "a tensor product needs at least one factor".into(),
            ));
        }
        let closure = Closure::new(&factors);
        let space = closure.space.clone();
        let empty = FixedBitSet::with_capacity(space.len());
        let bottom = closure.close(&empty);

        // Every multi-ideal is a join of elementary tensors of join-irreducibles.
        let generators: Vec<usize> = (0..space.len())
            .filter(|&t| (0..space.arity()).all(|s| factors[s].is_join_irreducible(space.coord(t, s))))
            .collect();

        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        seen.insert(bottom.clone());
        let mut queue = VecDeque::from([bottom]);
        while let Some(ideal) = queue.pop_front() {
            for &g in &generators {
                if ideal.contains(g) {
                    continue;
                }
                let mut seed = ideal.clone();
                seed.insert(g);
                let next = closure.close(&seed);
                if !seen.contains(&next) {
                    if seen.len() >= limits.max_tensor {
                        return Err(Error::resource(
                            format!(
                                "tensor product of lattices with sizes {:?}",
                                space.dims()
                            ),
                            limits.max_tensor,
                        ));
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }

        let mut ideals: Vec<FixedBitSet> = seen.into_iter().collect();
        ideals.sort_by_cached_key(|d| (d.count_ones(..), d.ones().collect::<Vec<_>>()));
        let n = ideals.len();
        let index: HashMap<FixedBitSet, usize> = ideals
            .iter()
            .enumerate()
            .map(|(i, d)| (d.clone(), i))
            .collect();

        let up: Vec<FixedBitSet> = ideals
            .par_iter()
            .map(|a| {
                let mut row = FixedBitSet::with_capacity(n);
                for (j, b) in ideals.iter().enumerate() {
                    if a.is_subset(b) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();

        let rows: Vec<(Vec<usize>, Vec<usize>)> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut join_row = vec![0usize; n];
                let mut meet_row = vec![0usize; n];
                for b in 0..n {
                    join_row[b] = if up[a].contains(b) {
                        b
                    } else if up[b].contains(a) {
                        a
                    } else {
                        let mut u = ideals[a].clone();
                        u.union_with(&ideals[b]);
                        index[&closure.close(&u)]
                    };
                    let mut m = ideals[a].clone();
                    m.intersect_with(&ideals[b]);
                    meet_row[b] = index[&m];
                }
                (join_row, meet_row)
            })
            .collect();
        let mut join = Vec::with_capacity(n * n);
        let mut meet = Vec::with_capacity(n * n);
        for (j, m) in rows {
            join.extend(j);
            meet.extend(m);
        }

        let elem: Vec<usize> = (0..space.len())
            .map(|t| {
                let mut seed = FixedBitSet::with_capacity(space.len());
                seed.insert(t);
                index[&closure.close(&seed)]
            })
            .collect();

        let names = ideals
            .iter()
            .map(|d| ideal_name(&factors, &space, d))
            .collect();
        let lattice = Arc::new(FiniteSupLattice::from_tables(names, up, join, meet));
        Ok(MultiTensorLattice {
            closure,
            ideals,
            index,
            lattice,
            elem,
        })
    }

    pub fn factors(&self) -> &[Arc<FiniteSupLattice>] {
        &self.closure.factors
    }

    pub fn space(&self) -> &TupleSpace {
        &self.closure.space
    }

    pub fn lattice(&self) -> &Arc<FiniteSupLattice> {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    /// The multi-ideal (set of tuple indices) behind an element.
    pub fn ideal(&self, element: usize) -> &FixedBitSet {
        &self.ideals[element]
    }

    /// Element whose multi-ideal is the closure of `tuples`.
    pub fn element_of(&self, tuples: &FixedBitSet) -> usize {
        let mut seed = tuples.clone();
        seed.grow(self.space().len());
        self.index[&self.closure.close(&seed)]
    }

    /// `x₁ ⊗ … ⊗ xₖ` for coordinates `tuple`.
    pub fn elem_tensor(&self, tuple: &[usize]) -> usize {
        self.elem[self.space().index(tuple)]
    }

    /// Elementary tensor of the tuple with index `t` in the tuple space.
    #[inline]
    pub fn elem_at(&self, t: usize) -> usize {
        self.elem[t]
    }

    /// The elementary-tensor table, indexed by tuple.
    pub fn elem_table(&self) -> &[usize] {
        &self.elem
    }

    /// The elementary-tensor map as a multimorphism into the tensor.
    pub fn elementary(&self) -> Multimorphism {
        Multimorphism {
            factors: self.factors().to_vec(),
            target: self.lattice.clone(),
            space: self.space().clone(),
            values: self.elem.clone(),
        }
    }

    /// Lift a multimorphism out of the product: `g(D) = ⋁{f(t) : t ∈ D}`.
    pub fn lift(&self, f: &Multimorphism) -> Result<SupMap> {
        if f.factors != self.factors() {
            return Err(Error::ShapeMismatch(
                "multimorphism factors differ from the tensor factors".into(),
            ));
        }
        if let Verdict::Fails(failure) = is_multimorphism(&f.factors, &f.target, &f.values)? {
            return Err(Error::NotAMultimorphism(failure.describe(&f.factors)));
        }
        Ok(self.lift_unchecked(&f.target, &f.values))
    }

    /// Lift of a table already known to be a multimorphism.
    pub(crate) fn lift_unchecked(&self, target: &Arc<FiniteSupLattice>, values: &[usize]) -> SupMap {
        let lifted = self
            .ideals
            .iter()
            .map(|d| target.join_of(d.ones().map(|t| values[t])))
            .collect();
        SupMap::new_unchecked(self.lattice.clone(), target.clone(), lifted)
    }

    /// Values of a map out of the tensor on all elementary tensors.
    pub fn restrict_to_generators(&self, g: &SupMap) -> Vec<usize> {
        self.elem.iter().map(|&e| g.apply(e)).collect()
    }
}

/// Name a multi-ideal by the join of its maximal tuples without bottom coordinates.
fn ideal_name(factors: &[Arc<FiniteSupLattice>], space: &TupleSpace, ideal: &FixedBitSet) -> String {
    let inner: Vec<Vec<usize>> = ideal
        .ones()
        .map(|t| space.coords(t))
        .filter(|c| c.iter().zip(factors).all(|(&x, f)| x != f.bottom()))
        .collect();
    let maximal: Vec<&Vec<usize>> = inner
        .iter()
        .filter(|c| {
            !inner.iter().any(|d| {
                d != *c && c.iter().zip(d.iter()).zip(factors).all(|((&x, &y), f)| f.leq(x, y))
            })
        })
        .collect();
    if maximal.is_empty() {
        return "0".to_string();
    }
    maximal
        .iter()
        .map(|c| {
            c.iter()
                .zip(factors)
                .map(|(&x, f)| f.name(x).to_string())
                .collect::<Vec<_>>()
                .join("⊗")
        })
        .collect::<Vec<_>>()
        .join("∨")
}

/// Build the tensor product `X₁ ⊗ … ⊗ Xₖ`.
pub fn tensor_product(factors: &[Arc<FiniteSupLattice>], limits: &Limits) -> Result<MultiTensorLattice> {
    MultiTensorLattice::new(factors.to_vec(), limits)
}

/// Where a map out of a product fails to preserve joins in one slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotFailure {
    pub slot: usize,
    /// The full tuple; the coordinate at `slot` is irrelevant.
    pub fixed: Vec<usize>,
    /// The failing family: empty, or a pair whose join is not preserved.
    pub subset: Vec<usize>,
}

impl SlotFailure {
    pub fn describe(&self, factors: &[Arc<FiniteSupLattice>]) -> String {
        let fixed: Vec<String> = self
            .fixed
            .iter()
            .enumerate()
            .map(|(s, &x)| {
                if s == self.slot {
                    "·".to_string()
                } else {
                    factors[s].name(x).to_string()
                }
            })
            .collect();
        let subset = if self.subset.is_empty() {
            "∅".to_string()
        } else {
            let names: Vec<&str> = self
                .subset
                .iter()
                .map(|&x| factors[self.slot].name(x))
                .collect();
            format!("{{{}}}", names.join(", "))
        };
        format!(
            "slot {} with other coordinates ({}) does not preserve the join of {}",
            self.slot + 1,
            fixed.join(", "),
            subset
        )
    }
}

/// Slotwise join preservation (including the empty join) of a table over the product.
pub fn is_multimorphism(
    factors: &[Arc<FiniteSupLattice>],
    target: &FiniteSupLattice,
    values: &[usize],
) -> Result<Verdict<SlotFailure>> {
    let space = TupleSpace::of(factors);
    if values.len() != space.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} values for a product of {} tuples",
            values.len(),
            space.len()
        )));
    }
    if values.iter().any(|&v| v >= target.len()) {
        return Err(Error::ShapeMismatch("value outside the target lattice".into()));
    }
    Ok(slot_failure(factors, &space, target, values).into())
}

fn slot_failure(
    factors: &[Arc<FiniteSupLattice>],
    space: &TupleSpace,
    target: &FiniteSupLattice,
    values: &[usize],
) -> Option<SlotFailure> {
    for (slot, factor) in factors.iter().enumerate() {
        for base in 0..space.len() {
            if space.coord(base, slot) != factor.bottom() {
                continue;
            }
            let at = |x: usize| values[space.with_coord(base, slot, x)];
            if at(factor.bottom()) != target.bottom() {
                return Some(SlotFailure {
                    slot,
                    fixed: space.coords(base),
                    subset: Vec::new(),
                });
            }
            for a in factor.elements() {
                for b in (a + 1)..factor.len() {
                    if at(factor.join(a, b)) != target.join(at(a), at(b)) {
                        return Some(SlotFailure {
                            slot,
                            fixed: space.coords(base),
                            subset: vec![a, b],
                        });
                    }
                }
            }
        }
    }
    None
}

/// A map `X₁ × … × Xₖ → Z` preserving all joins in each slot separately.
#[derive(Clone, PartialEq, Eq)]
pub struct Multimorphism {
    factors: Vec<Arc<FiniteSupLattice>>,
    target: Arc<FiniteSupLattice>,
    space: TupleSpace,
    values: Vec<usize>,
}

impl fmt::Debug for Multimorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multimorphism")
            .field("values", &self.values)
            .finish()
    }
}

impl Multimorphism {
    pub fn new(
        factors: Vec<Arc<FiniteSupLattice>>,
        target: Arc<FiniteSupLattice>,
        values: Vec<usize>,
    ) -> Result<Self> {
        if let Verdict::Fails(failure) = is_multimorphism(&factors, &target, &values)? {
            return Err(Error::NotAMultimorphism(failure.describe(&factors)));
        }
        let space = TupleSpace::of(&factors);
        Ok(Multimorphism {
            factors,
            target,
            space,
            values,
        })
    }

    /// Tabulate `f` over the product and check it.
    pub fn from_fn(
        factors: Vec<Arc<FiniteSupLattice>>,
        target: Arc<FiniteSupLattice>,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let space = TupleSpace::of(&factors);
        let values = (0..space.len()).map(|t| f(&space.coords(t))).collect();
        Self::new(factors, target, values)
    }

    pub(crate) fn new_unchecked(
        factors: Vec<Arc<FiniteSupLattice>>,
        target: Arc<FiniteSupLattice>,
        values: Vec<usize>,
    ) -> Self {
        let space = TupleSpace::of(&factors);
        debug_assert!(slot_failure(&factors, &space, &target, &values).is_none());
        Multimorphism {
            factors,
            target,
            space,
            values,
        }
    }

    pub fn factors(&self) -> &[Arc<FiniteSupLattice>] {
        &self.factors
    }

    pub fn target(&self) -> &Arc<FiniteSupLattice> {
        &self.target
    }

    pub fn space(&self) -> &TupleSpace {
        &self.space
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, tuple: &[usize]) -> usize {
        self.values[self.space.index(tuple)]
    }

    #[inline]
    pub fn value_at(&self, t: usize) -> usize {
        self.values[t]
    }

    /// Whether the lift out of the tensor is onto: the join-closure of the values is everything.
    pub fn lift_is_surjective(&self) -> bool {
        lift_is_surjective(&self.target, &self.values)
    }
}

pub(crate) fn lift_is_surjective(target: &FiniteSupLattice, values: &[usize]) -> bool {
    let mut set = FixedBitSet::with_capacity(target.len());
    for &v in values {
        set.insert(v);
    }
    target.join_closure(&set).count_ones(..) == target.len()
}

/// Every multimorphism `X₁ × … × Xₖ → Z` exactly once, optionally only those
/// whose lift is surjective.
///
/// Values are assigned on tuples of join-irreducibles in a topological order,
/// each bounded below by the join of its already-assigned predecessors; the
/// extension `t ↦ ⋁{g(s) : s ≤ t}` is then verified slotwise, since it need
/// not be a multimorphism when some factor is not distributive.
pub fn enumerate_multimorphisms(
    factors: &[Arc<FiniteSupLattice>],
    target: &Arc<FiniteSupLattice>,
    surjective_only: bool,
    cap: usize,
) -> Result<Vec<Multimorphism>> {
    let space = TupleSpace::of(factors);
    let mut generators: Vec<Vec<usize>> = vec![Vec::new()];
    for f in factors {
        generators = generators
            .into_iter()
            .flat_map(|prefix| {
                f.join_irreducibles().iter().map(move |&j| {
                    let mut t = prefix.clone();
                    t.push(j);
                    t
                })
            })
            .collect();
    }
    let rank = |t: &Vec<usize>| -> usize {
        t.iter()
            .zip(factors)
            .map(|(&x, f)| f.down_set(x).count_ones(..))
            .sum()
    };
    generators.sort_by_key(|t| (rank(t), t.clone()));
    let below = |s: &[usize], t: &[usize]| s.iter().zip(t).zip(factors).all(|((&a, &b), f)| f.leq(a, b));
    let predecessors: Vec<Vec<usize>> = generators
        .iter()
        .enumerate()
        .map(|(k, t)| (0..k).filter(|&i| below(&generators[i], t)).collect())
        .collect();
    // For each tuple, the generators below it.
    let support: Vec<Vec<usize>> = (0..space.len())
        .map(|t| {
            let coords = space.coords(t);
            (0..generators.len())
                .filter(|&g| below(&generators[g], &coords))
                .collect()
        })
        .collect();

    struct Ctx<'a> {
        factors: &'a [Arc<FiniteSupLattice>],
        target: &'a Arc<FiniteSupLattice>,
        space: TupleSpace,
        predecessors: Vec<Vec<usize>>,
        support: Vec<Vec<usize>>,
        surjective_only: bool,
        cap: usize,
        out: Vec<Multimorphism>,
    }

    fn go(ctx: &mut Ctx<'_>, depth: usize, assignment: &mut Vec<usize>) -> Result<()> {
        if depth == assignment.len() {
            let values: Vec<usize> = ctx
                .support
                .iter()
                .map(|gs| ctx.target.join_of(gs.iter().map(|&g| assignment[g])))
                .collect();
            if slot_failure(ctx.factors, &ctx.space, ctx.target, &values).is_some() {
                return Ok(());
            }
            if ctx.surjective_only && !lift_is_surjective(ctx.target, &values) {
                return Ok(());
            }
            if ctx.out.len() >= ctx.cap {
                return Err(Error::resource("multimorphism enumeration", ctx.cap));
            }
            ctx.out.push(Multimorphism::new_unchecked(
                ctx.factors.to_vec(),
                ctx.target.clone(),
                values,
            ));
            return Ok(());
        }
        let lower = ctx
            .target
            .join_of(ctx.predecessors[depth].iter().map(|&i| assignment[i]));
        let choices: Vec<usize> = ctx.target.up_set(lower).ones().collect();
        for v in choices {
            assignment[depth] = v;
            go(ctx, depth + 1, assignment)?;
        }
        Ok(())
    }

    let mut ctx = Ctx {
        factors,
        target,
        space,
        predecessors,
        support,
        surjective_only,
        cap,
        out: Vec::new(),
    };
    let mut assignment = vec![0usize; generators.len()];
    go(&mut ctx, 0, &mut assignment)?;
    Ok(ctx.out)
}

/// Trimorphisms `X₁ × X₂ × X₃ → Z`: the candidates for `p` and `q`.
pub fn enumerate_trimorphisms(
    x1: &Arc<FiniteSupLattice>,
    x2: &Arc<FiniteSupLattice>,
    x3: &Arc<FiniteSupLattice>,
    target: &Arc<FiniteSupLattice>,
    surjective_only: bool,
    cap: usize,
) -> Result<Vec<Multimorphism>> {
    enumerate_multimorphisms(
        &[x1.clone(), x2.clone(), x3.clone()],
        target,
        surjective_only,
        cap,
    )
}
