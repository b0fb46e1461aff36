use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{FiniteSupLattice, SupMap};
use crate::limits::Limits;
use crate::tensor::{is_multimorphism, MultiTensorLattice};
use crate::Verdict;

/// Two lattices `X`, `Y` with sup-maps `p: X⊗Y⊗X → X` and `q: Y⊗X⊗Y → Y`.
///
/// Construction checks shapes only; the pair conditions are checked by
/// [`check_pair_conditions`](super::check_pair_conditions).
#[derive(Clone)]
pub struct MoritaPairWitness {
    x: Arc<FiniteSupLattice>,
    y: Arc<FiniteSupLattice>,
    t_xyx: Arc<MultiTensorLattice>,
    t_yxy: Arc<MultiTensorLattice>,
    p: SupMap,
    q: SupMap,
    p_gen: Vec<usize>,
    q_gen: Vec<usize>,
}

impl fmt::Debug for MoritaPairWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MoritaPairWitness")
            .field("x", &self.x.order_id())
            .field("y", &self.y.order_id())
            .field("p", &self.p_gen)
            .field("q", &self.q_gen)
            .finish()
    }
}

impl PartialEq for MoritaPairWitness {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x
            && self.y == other.y
            && self.p.values() == other.p.values()
            && self.q.values() == other.q.values()
    }
}

impl Eq for MoritaPairWitness {}

fn check_tensor(
    t: &MultiTensorLattice,
    outer: &Arc<FiniteSupLattice>,
    inner: &Arc<FiniteSupLattice>,
    name: &str,
) -> Result<()> {
    let f = t.factors();
    if f.len() != 3 || f[0] != *outer || f[1] != *inner || f[2] != *outer {
        return Err(Error::ShapeMismatch(format!(
            "the domain of {name} has the wrong factors"
        )));
    }
    Ok(())
}

fn check_map(m: &SupMap, t: &MultiTensorLattice, cod: &Arc<FiniteSupLattice>, name: &str) -> Result<()> {
    if m.dom() != t.lattice() || m.cod() != cod {
        return Err(Error::ShapeMismatch(format!(
            "{name} does not map its tensor to its codomain"
        )));
    }
    Ok(())
}

impl MoritaPairWitness {
    pub fn new(
        t_xyx: Arc<MultiTensorLattice>,
        t_yxy: Arc<MultiTensorLattice>,
        p: SupMap,
        q: SupMap,
    ) -> Result<Self> {
        let x = t_xyx
            .factors()
            .first()
            .cloned()
            .ok_or_else(|| Error::ShapeMismatch("empty tensor".into()))?;
        let y = t_yxy
            .factors()
            .first()
            .cloned()
            .ok_or_else(|| Error::ShapeMismatch("empty tensor".into()))?;
        check_tensor(&t_xyx, &x, &y, "p")?;
        check_tensor(&t_yxy, &y, &x, "q")?;
        check_map(&p, &t_xyx, &x, "p")?;
        check_map(&q, &t_yxy, &y, "q")?;
        let p_gen = t_xyx.restrict_to_generators(&p);
        let q_gen = t_yxy.restrict_to_generators(&q);
        Ok(MoritaPairWitness {
            x,
            y,
            t_xyx,
            t_yxy,
            p,
            q,
            p_gen,
            q_gen,
        })
    }

    /// Build from values on generator triples (`p_gen[(x₁·|Y| + y)·|X| + x₂]`
    /// is `p(x₁⊗y⊗x₂)`), computing both tensors.
    pub fn from_generators(
        x: Arc<FiniteSupLattice>,
        y: Arc<FiniteSupLattice>,
        p_gen: &[usize],
        q_gen: &[usize],
        limits: &Limits,
    ) -> Result<Self> {
        let t_xyx = Arc::new(MultiTensorLattice::new(vec![x.clone(), y.clone(), x.clone()], limits)?);
        let t_yxy = Arc::new(MultiTensorLattice::new(vec![y.clone(), x.clone(), y.clone()], limits)?);
        Self::from_generators_in(t_xyx, t_yxy, p_gen, q_gen)
    }

    /// As [`from_generators`](Self::from_generators) with prebuilt tensors.
    pub fn from_generators_in(
        t_xyx: Arc<MultiTensorLattice>,
        t_yxy: Arc<MultiTensorLattice>,
        p_gen: &[usize],
        q_gen: &[usize],
    ) -> Result<Self> {
        let p = lift_generators(&t_xyx, p_gen, "p")?;
        let q = lift_generators(&t_yxy, q_gen, "q")?;
        Self::new(t_xyx, t_yxy, p, q)
    }

    pub fn x(&self) -> &Arc<FiniteSupLattice> {
        &self.x
    }

    pub fn y(&self) -> &Arc<FiniteSupLattice> {
        &self.y
    }

    pub fn t_xyx(&self) -> &Arc<MultiTensorLattice> {
        &self.t_xyx
    }

    pub fn t_yxy(&self) -> &Arc<MultiTensorLattice> {
        &self.t_yxy
    }

    pub fn p(&self) -> &SupMap {
        &self.p
    }

    pub fn q(&self) -> &SupMap {
        &self.q
    }

    /// `p` on generator triples, indexed as in [`from_generators`](Self::from_generators).
    pub fn p_generators(&self) -> &[usize] {
        &self.p_gen
    }

    pub fn q_generators(&self) -> &[usize] {
        &self.q_gen
    }

    /// `p(x₁⊗y⊗x₂)`.
    #[inline]
    pub fn p_at(&self, x1: usize, y: usize, x2: usize) -> usize {
        self.p_gen[(x1 * self.y.len() + y) * self.x.len() + x2]
    }

    /// `q(y₁⊗x⊗y₂)`.
    #[inline]
    pub fn q_at(&self, y1: usize, x: usize, y2: usize) -> usize {
        self.q_gen[(y1 * self.x.len() + x) * self.y.len() + y2]
    }

    /// The same witness with the roles of `(X, p)` and `(Y, q)` exchanged.
    pub fn swapped(&self) -> Self {
        MoritaPairWitness {
            x: self.y.clone(),
            y: self.x.clone(),
            t_xyx: self.t_yxy.clone(),
            t_yxy: self.t_xyx.clone(),
            p: self.q.clone(),
            q: self.p.clone(),
            p_gen: self.q_gen.clone(),
            q_gen: self.p_gen.clone(),
        }
    }
}

/// Lift a generator table through the tensor, checking it is a trimorphism.
pub(crate) fn lift_generators(t: &MultiTensorLattice, gen: &[usize], name: &str) -> Result<SupMap> {
    let target = t.factors()[0].clone();
    match is_multimorphism(t.factors(), &target, gen)? {
        Verdict::Holds => Ok(t.lift_unchecked(&target, gen)),
        Verdict::Fails(f) => Err(Error::NotSupMap(format!(
            "{name} is not join-preserving in each slot: {}",
            f.describe(t.factors())
        ))),
    }
}
