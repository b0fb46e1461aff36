use std::fmt;
use std::sync::Arc;

use super::FiniteSupLattice;
use crate::error::{Error, Result};
use crate::Verdict;

/// Why a map fails to preserve joins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinFailure {
    /// `f(0) ≠ 0`: the empty join is not preserved.
    Bottom { image: usize },
    /// `f(a ∨ b) ≠ f(a) ∨ f(b)`.
    Pair { a: usize, b: usize },
}

impl JoinFailure {
    pub fn describe(&self, dom: &FiniteSupLattice, cod: &FiniteSupLattice, values: &[usize]) -> String {
        match *self {
            JoinFailure::Bottom { image } => format!(
                "f({}) = {} is not bottom",
                dom.name(dom.bottom()),
                cod.name(image)
            ),
            JoinFailure::Pair { a, b } => format!(
                "f({a} ∨ {b}) = {} but f({a}) ∨ f({b}) = {}",
                cod.name(values[dom.join(a, b)]),
                cod.name(cod.join(values[a], values[b])),
                a = dom.name(a),
                b = dom.name(b),
            ),
        }
    }
}

/// Checks `f(0) = 0` and `f(a ∨ b) = f(a) ∨ f(b)` for every pair; on a finite
/// lattice this is preservation of all joins.
pub fn is_sup_map(
    dom: &FiniteSupLattice,
    cod: &FiniteSupLattice,
    values: &[usize],
) -> Result<Verdict<JoinFailure>> {
    if values.len() != dom.len() {
        return Err(Error::DomainMismatch(format!(
            "map has {} values but the domain has {} elements",
            values.len(),
            dom.len()
        )));
    }
    if let Some(&v) = values.iter().find(|&&v| v >= cod.len()) {
        return Err(Error::DomainMismatch(format!(
            "value {v} outside a codomain of {} elements",
            cod.len()
        )));
    }
    Ok(join_failure(dom, cod, values).into())
}

pub(crate) fn join_failure(
    dom: &FiniteSupLattice,
    cod: &FiniteSupLattice,
    values: &[usize],
) -> Option<JoinFailure> {
    if values[dom.bottom()] != cod.bottom() {
        return Some(JoinFailure::Bottom {
            image: values[dom.bottom()],
        });
    }
    for a in dom.elements() {
        for b in (a + 1)..dom.len() {
            if values[dom.join(a, b)] != cod.join(values[a], values[b]) {
                return Some(JoinFailure::Pair { a, b });
            }
        }
    }
    None
}

/// A join-preserving map between finite sup-lattices.
#[derive(Clone, PartialEq, Eq)]
pub struct SupMap {
    dom: Arc<FiniteSupLattice>,
    cod: Arc<FiniteSupLattice>,
    values: Vec<usize>,
}

impl fmt::Debug for SupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupMap").field("values", &self.values).finish()
    }
}

impl SupMap {
    pub fn new(
        dom: Arc<FiniteSupLattice>,
        cod: Arc<FiniteSupLattice>,
        values: Vec<usize>,
    ) -> Result<Self> {
        if let Verdict::Fails(failure) = is_sup_map(&dom, &cod, &values)? {
            return Err(Error::NotSupMap(failure.describe(&dom, &cod, &values)));
        }
        Ok(SupMap { dom, cod, values })
    }

    pub(crate) fn new_unchecked(
        dom: Arc<FiniteSupLattice>,
        cod: Arc<FiniteSupLattice>,
        values: Vec<usize>,
    ) -> Self {
        debug_assert!(join_failure(&dom, &cod, &values).is_none());
        SupMap { dom, cod, values }
    }

    pub fn identity(lattice: Arc<FiniteSupLattice>) -> Self {
        let values = lattice.elements().collect();
        SupMap {
            dom: lattice.clone(),
            cod: lattice,
            values,
        }
    }

    pub fn constant_bottom(dom: Arc<FiniteSupLattice>, cod: Arc<FiniteSupLattice>) -> Self {
        let values = vec![cod.bottom(); dom.len()];
        SupMap { dom, cod, values }
    }

    pub fn dom(&self) -> &Arc<FiniteSupLattice> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FiniteSupLattice> {
        &self.cod
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.values[a]
    }

    /// `self ∘ first` (apply `first`, then `self`).
    pub fn after(&self, first: &SupMap) -> Result<SupMap> {
        if *first.cod != *self.dom {
            return Err(Error::DomainMismatch(
                "codomain of the first map is not the domain of the second".into(),
            ));
        }
        let values = first.values.iter().map(|&v| self.values[v]).collect();
        Ok(SupMap {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            values,
        })
    }

    /// Image as a set; it is join-closed because the map preserves joins.
    pub fn image(&self) -> fixedbitset::FixedBitSet {
        let mut img = fixedbitset::FixedBitSet::with_capacity(self.cod.len());
        for &v in &self.values {
            img.insert(v);
        }
        img
    }

    pub fn is_surjective(&self) -> bool {
        self.image().count_ones(..) == self.cod.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_surjective()
    }
}

/// An involution on a sup-lattice: `a** = a` and `*` preserves joins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupLatticeInvolution {
    lattice: Arc<FiniteSupLattice>,
    star: Vec<usize>,
}

impl SupLatticeInvolution {
    pub fn new(lattice: Arc<FiniteSupLattice>, star: Vec<usize>) -> Result<Self> {
        if star.len() != lattice.len() || star.iter().any(|&s| s >= lattice.len()) {
            return Err(Error::ShapeMismatch(
                "star must map every element into the lattice".into(),
            ));
        }
        if let Some(a) = lattice.elements().find(|&a| star[star[a]] != a) {
            return Err(Error::NotAnInvolution(format!(
                "{a}** = {} ≠ {a}",
                lattice.name(star[star[a]]),
                a = lattice.name(a)
            )));
        }
        if let Some(failure) = join_failure(&lattice, &lattice, &star) {
            return Err(Error::NotAnInvolution(
                failure.describe(&lattice, &lattice, &star),
            ));
        }
        Ok(SupLatticeInvolution { lattice, star })
    }

    pub fn lattice(&self) -> &Arc<FiniteSupLattice> {
        &self.lattice
    }

    pub fn star(&self, a: usize) -> usize {
        self.star[a]
    }

    pub fn table(&self) -> &[usize] {
        &self.star
    }

    /// `a ≤ b ⟺ a* ≤ b*` for all pairs and the map is a bijection.
    pub fn is_order_isomorphism(&self) -> bool {
        let l = &self.lattice;
        let mut seen = vec![false; l.len()];
        for &s in &self.star {
            seen[s] = true;
        }
        seen.iter().all(|&s| s)
            && l.elements().all(|a| {
                l.elements()
                    .all(|b| l.leq(a, b) == l.leq(self.star[a], self.star[b]))
            })
    }
}

/// Every sup-preserving map `X → Y`, each exactly once, in a deterministic order.
///
/// Values are chosen on join-irreducibles only (monotonically), extended by
/// `x ↦ ⋁{g(j) : j ≤ x}` and then checked, since the extension need not
/// preserve binary joins when `X` is not distributive.
pub fn enumerate_sup_maps(
    x: &Arc<FiniteSupLattice>,
    y: &Arc<FiniteSupLattice>,
    cap: usize,
) -> Result<Vec<SupMap>> {
    let irr = x.join_irreducibles().to_vec();
    // predecessors[k]: indices (into irr) of join-irreducibles strictly below irr[k].
    let predecessors: Vec<Vec<usize>> = irr
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            (0..k)
                .filter(|&i| irr[i] != j && x.leq(irr[i], j))
                .collect()
        })
        .collect();
    let mut assignment = vec![0usize; irr.len()];
    let mut out = Vec::new();
    search(
        x,
        y,
        &irr,
        &predecessors,
        0,
        &mut assignment,
        &mut out,
        cap,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    x: &Arc<FiniteSupLattice>,
    y: &Arc<FiniteSupLattice>,
    irr: &[usize],
    predecessors: &[Vec<usize>],
    depth: usize,
    assignment: &mut Vec<usize>,
    out: &mut Vec<SupMap>,
    cap: usize,
) -> Result<()> {
    if depth == irr.len() {
        let values: Vec<usize> = x
            .elements()
            .map(|e| {
                y.join_of(
                    irr.iter()
                        .enumerate()
                        .filter(|&(_, &j)| x.leq(j, e))
                        .map(|(k, _)| assignment[k]),
                )
            })
            .collect();
        if join_failure(x, y, &values).is_none() {
            if out.len() >= cap {
                return Err(Error::resource("sup-preserving maps", cap));
            }
            out.push(SupMap::new_unchecked(x.clone(), y.clone(), values));
        }
        return Ok(());
    }
    let lower = y.join_of(predecessors[depth].iter().map(|&i| assignment[i]));
    for v in y.up_set(lower).ones() {
        assignment[depth] = v;
        search(x, y, irr, predecessors, depth + 1, assignment, out, cap)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(l: FiniteSupLattice) -> Arc<FiniteSupLattice> {
        Arc::new(l)
    }

    /// Oracle: every function filtered by the join laws.
    fn brute_force(x: &FiniteSupLattice, y: &FiniteSupLattice) -> Vec<Vec<usize>> {
        let n = x.len();
        let total = y.len().pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut c = code;
            let values: Vec<usize> = (0..n)
                .map(|_| {
                    let v = c % y.len();
                    c /= y.len();
                    v
                })
                .collect();
            if join_failure(x, y, &values).is_none() {
                out.push(values);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn identity_and_constant_bottom_are_sup_maps() {
        let two = FiniteSupLattice::chain(2);
        assert!(is_sup_map(&two, &two, &[0, 1]).unwrap().holds());
        let m2 = FiniteSupLattice::diamond();
        assert!(is_sup_map(&m2, &two, &[0, 0, 0, 0]).unwrap().holds());
    }

    #[test]
    fn m2_collapse_fails_at_atoms() {
        let m2 = FiniteSupLattice::diamond();
        let two = FiniteSupLattice::chain(2);
        let v = is_sup_map(&m2, &two, &[0, 0, 0, 1]).unwrap();
        assert_eq!(v, Verdict::Fails(JoinFailure::Pair { a: 1, b: 2 }));
    }

    #[test]
    fn shape_errors() {
        let two = FiniteSupLattice::chain(2);
        assert!(matches!(
            is_sup_map(&two, &two, &[0]),
            Err(Error::DomainMismatch(_))
        ));
        assert!(matches!(
            is_sup_map(&two, &two, &[0, 5]),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn enumeration_counts() {
        let two = arc(FiniteSupLattice::chain(2));
        let three = arc(FiniteSupLattice::chain(3));
        let m2 = arc(FiniteSupLattice::diamond());
        assert_eq!(enumerate_sup_maps(&two, &two, 100).unwrap().len(), 2);
        assert_eq!(enumerate_sup_maps(&three, &three, 100).unwrap().len(), 6);
        assert_eq!(enumerate_sup_maps(&m2, &two, 100).unwrap().len(), 4);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let lattices = [
            FiniteSupLattice::chain(1),
            FiniteSupLattice::chain(2),
            FiniteSupLattice::chain(3),
            FiniteSupLattice::chain(4),
            FiniteSupLattice::diamond(),
        ];
        for x in &lattices {
            for y in &lattices {
                let (xa, ya) = (arc(x.clone()), arc(y.clone()));
                let mut got: Vec<Vec<usize>> = enumerate_sup_maps(&xa, &ya, 1 << 20)
                    .unwrap()
                    .into_iter()
                    .map(|m| m.values().to_vec())
                    .collect();
                let before = got.clone();
                got.sort();
                got.dedup();
                assert_eq!(before.len(), got.len(), "duplicates");
                assert_eq!(got, brute_force(x, y));
            }
        }
    }

    #[test]
    fn extension_needs_the_verification_pass_on_m3() {
        // On M3 many monotone assignments to the atoms do not extend to sup maps.
        let m3 = arc(FiniteSupLattice::m3());
        let maps = enumerate_sup_maps(&m3, &m3, 1 << 20).unwrap();
        let mut expect = brute_force(&m3, &m3);
        let mut got: Vec<Vec<usize>> = maps.iter().map(|m| m.values().to_vec()).collect();
        got.sort();
        expect.sort();
        assert_eq!(got, expect);
        assert!(got.len() < 5usize.pow(3));
    }

    #[test]
    fn resource_cap() {
        let three = arc(FiniteSupLattice::chain(3));
        assert!(matches!(
            enumerate_sup_maps(&three, &three, 3),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn composition_of_sup_maps_is_sup_map() {
        let m2 = arc(FiniteSupLattice::diamond());
        let maps = enumerate_sup_maps(&m2, &m2, 1000).unwrap();
        for f in &maps {
            for g in &maps {
                let h = g.after(f).unwrap();
                assert!(is_sup_map(&m2, &m2, h.values()).unwrap().holds());
            }
        }
        assert!(maps.contains(&SupMap::identity(m2.clone())));
    }

    #[test]
    fn involutions_are_order_isomorphisms() {
        let m2 = arc(FiniteSupLattice::diamond());
        let swap = SupLatticeInvolution::new(m2.clone(), vec![0, 2, 1, 3]).unwrap();
        assert!(swap.is_order_isomorphism());
        assert!(SupLatticeInvolution::new(m2.clone(), vec![0, 2, 2, 3]).is_err());
        let three = arc(FiniteSupLattice::chain(3));
        assert!(matches!(
            SupLatticeInvolution::new(three, vec![0, 2, 1]),
            Err(Error::NotAnInvolution(_))
        ));
    }
}
