//! Quantales as multiplication tables over a finite sup-lattice, the operator
//! quantale `Q(X)`, image subquantales and involutions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_sup_maps, is_sup_map, FiniteSupLattice, JoinFailure, SupMap};
use crate::{Limits, Verdict};

/// Which quantale law fails, with the offending elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuantaleFailure {
    /// `a·0 ≠ 0`.
    RightZero { a: usize },
    /// `0·a ≠ 0`.
    LeftZero { a: usize },
    /// `a·(b ∨ c) ≠ a·b ∨ a·c`.
    LeftDistributivity { a: usize, b: usize, c: usize },
    /// `(a ∨ b)·c ≠ a·c ∨ b·c`.
    RightDistributivity { a: usize, b: usize, c: usize },
    /// `(a·b)·c ≠ a·(b·c)`.
    Associativity { a: usize, b: usize, c: usize },
}

impl QuantaleFailure {
    pub fn describe(&self, l: &FiniteSupLattice) -> String {
        let n = |x: usize| l.name(x).to_string();
        match *self {
            QuantaleFailure::RightZero { a } => format!("{}·0 is not bottom", n(a)),
            QuantaleFailure::LeftZero { a } => format!("0·{} is not bottom", n(a)),
            QuantaleFailure::LeftDistributivity { a, b, c } => {
                format!("{a}·({b} ∨ {c}) ≠ {a}·{b} ∨ {a}·{c}", a = n(a), b = n(b), c = n(c))
            }
            QuantaleFailure::RightDistributivity { a, b, c } => {
                format!("({a} ∨ {b})·{c} ≠ {a}·{c} ∨ {b}·{c}", a = n(a), b = n(b), c = n(c))
            }
            QuantaleFailure::Associativity { a, b, c } => {
                format!("({a}·{b})·{c} ≠ {a}·({b}·{c})", a = n(a), b = n(b), c = n(c))
            }
        }
    }
}

/// Checks distributivity over the empty join, over binary joins in each
/// slot, and associativity, in that order.
pub fn check_quantale(
    carrier: &FiniteSupLattice,
    mult: &[usize],
) -> Result<Verdict<QuantaleFailure>> {
    let n = carrier.len();
    if mult.len() != n * n || mult.iter().any(|&v| v >= n) {
        return Err(Error::ShapeMismatch(format!(
            "multiplication table must be {n}×{n} with entries below {n}"
        )));
    }
    let mul = |a: usize, b: usize| mult[a * n + b];
    let zero = carrier.bottom();
    if let Some(a) = carrier.elements().find(|&a| mul(a, zero) != zero) {
        return Ok(Verdict::Fails(QuantaleFailure::RightZero { a }));
    }
    if let Some(a) = carrier.elements().find(|&a| mul(zero, a) != zero) {
        return Ok(Verdict::Fails(QuantaleFailure::LeftZero { a }));
    }
    let first = (0..n).into_par_iter().find_map_first(|a| {
        for b in 0..n {
            for c in (b + 1)..n {
                if mul(a, carrier.join(b, c)) != carrier.join(mul(a, b), mul(a, c)) {
                    return Some(QuantaleFailure::LeftDistributivity { a, b, c });
                }
                if mul(carrier.join(b, c), a) != carrier.join(mul(b, a), mul(c, a)) {
                    return Some(QuantaleFailure::RightDistributivity { a: b, b: c, c: a });
                }
            }
        }
        None
    });
    if let Some(f) = first {
        return Ok(Verdict::Fails(f));
    }
    let assoc = (0..n).into_par_iter().find_map_first(|a| {
        for b in 0..n {
            let ab = mul(a, b);
            for c in 0..n {
                if mul(ab, c) != mul(a, mul(b, c)) {
                    return Some(QuantaleFailure::Associativity { a, b, c });
                }
            }
        }
        None
    });
    Ok(assoc.into())
}

/// Why a self-map fails to be a quantale involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvolutionFailure {
    NotTotal,
    /// `a** ≠ a`.
    NotPeriodTwo { a: usize },
    NotJoinPreserving(JoinFailure),
    /// `(a·b)* ≠ b*·a*`.
    AntiHomomorphism { a: usize, b: usize },
}

impl InvolutionFailure {
    pub fn describe(&self, q: &Quantale, star: &[usize]) -> String {
        let l = q.carrier();
        match self {
            InvolutionFailure::NotTotal => "star is not defined on every element".into(),
            InvolutionFailure::NotPeriodTwo { a } => {
                format!("{a}** = {} ≠ {a}", l.name(star[star[*a]]), a = l.name(*a))
            }
            InvolutionFailure::NotJoinPreserving(f) => f.describe(l, l, star),
            InvolutionFailure::AntiHomomorphism { a, b } => format!(
                "({a}·{b})* = {} but {b}*·{a}* = {}",
                l.name(star[q.mul(*a, *b)]),
                l.name(q.mul(star[*b], star[*a])),
                a = l.name(*a),
                b = l.name(*b)
            ),
        }
    }
}

/// `star∘star = id`, `star` preserves joins, and `(a·b)* = b*·a*`.
pub fn is_involution(q: &Quantale, star: &[usize]) -> Verdict<InvolutionFailure> {
    let l = q.carrier();
    if star.len() != l.len() || star.iter().any(|&s| s >= l.len()) {
        return Verdict::Fails(InvolutionFailure::NotTotal);
    }
    if let Some(a) = l.elements().find(|&a| star[star[a]] != a) {
        return Verdict::Fails(InvolutionFailure::NotPeriodTwo { a });
    }
    if let Some(f) = crate::lattice::map::join_failure(l, l, star) {
        return Verdict::Fails(InvolutionFailure::NotJoinPreserving(f));
    }
    for a in l.elements() {
        for b in l.elements() {
            if star[q.mul(a, b)] != q.mul(star[b], star[a]) {
                return Verdict::Fails(InvolutionFailure::AntiHomomorphism { a, b });
            }
        }
    }
    Verdict::Holds
}

/// A sup-lattice with an associative multiplication distributing over all
/// joins in both slots, optionally carrying a verified involution.
#[derive(Clone, PartialEq, Eq)]
pub struct Quantale {
    carrier: Arc<FiniteSupLattice>,
    mult: Vec<usize>,
    star: Option<Vec<usize>>,
}

impl fmt::Debug for Quantale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Quantale")
            .field("size", &self.len())
            .field("mult", &self.mult)
            .field("star", &self.star)
            .finish()
    }
}

impl Quantale {
    pub fn new(carrier: Arc<FiniteSupLattice>, mult: Vec<usize>) -> Result<Self> {
        if let Verdict::Fails(f) = check_quantale(&carrier, &mult)? {
            return Err(Error::NotAQuantale(f.describe(&carrier)));
        }
        Ok(Quantale {
            carrier,
            mult,
            star: None,
        })
    }

    /// Multiplication given by the lattice meet; a quantale when the lattice is distributive.
    pub fn meet(carrier: Arc<FiniteSupLattice>) -> Result<Self> {
        let n = carrier.len();
        let mult = (0..n * n).map(|i| carrier.meet(i / n, i % n)).collect();
        Self::new(carrier, mult)
    }

    /// The zero multiplication `a·b = 0`.
    pub fn zero(carrier: Arc<FiniteSupLattice>) -> Self {
        let n = carrier.len();
        let mult = vec![carrier.bottom(); n * n];
        Quantale {
            carrier,
            mult,
            star: None,
        }
    }

    /// Attach an involution after checking it.
    pub fn with_involution(mut self, star: Vec<usize>) -> Result<Self> {
        if let Verdict::Fails(f) = is_involution(&self, &star) {
            return Err(Error::NotAnInvolution(f.describe(&self, &star)));
        }
        self.star = Some(star);
        Ok(self)
    }

    pub fn carrier(&self) -> &Arc<FiniteSupLattice> {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.len() + b]
    }

    pub fn table(&self) -> &[usize] {
        &self.mult
    }

    pub fn involution(&self) -> Option<&[usize]> {
        self.star.as_deref()
    }

    pub fn is_involutive(&self) -> bool {
        self.star.is_some()
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Unit element, if any.
    pub fn unit(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&e| (0..n).all(|a| self.mul(e, a) == a && self.mul(a, e) == a))
    }

    /// Table equality ignoring element names.
    pub fn same_structure(&self, other: &Quantale) -> bool {
        self.carrier.same_order(&other.carrier) && self.mult == other.mult && self.star == other.star
    }
}

/// Render an operator on `base` as a name such as `[0|a|1]`.
fn operator_name(base: &FiniteSupLattice, values: &[usize]) -> String {
    let parts: Vec<&str> = values.iter().map(|&v| base.name(v)).collect();
    format!("[{}]", parts.join("|"))
}

/// `Q(X)`: all sup-preserving endomaps of `X`, ordered pointwise, multiplied by composition.
#[derive(Clone, Debug)]
pub struct OperatorQuantale {
    base: Arc<FiniteSupLattice>,
    operators: Vec<SupMap>,
    quantale: Arc<Quantale>,
    identity: usize,
}

impl OperatorQuantale {
    pub fn base(&self) -> &Arc<FiniteSupLattice> {
        &self.base
    }

    pub fn operators(&self) -> &[SupMap] {
        &self.operators
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.quantale
    }

    /// Index of the identity operator (the unit; recorded, not used elsewhere).
    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }
}

/// Build `Q(X)`. The product `f·g` is `f ∘ g` (apply `g` first).
pub fn endo_quantale(x: &Arc<FiniteSupLattice>, limits: &Limits) -> Result<OperatorQuantale> {
    let operators = enumerate_sup_maps(x, x, limits.max_maps)?;
    let table: Vec<Vec<usize>> = operators.iter().map(|f| f.values().to_vec()).collect();
    let (quantale, lookup) = operator_quantale_on(x, &table, |i| operator_name(x, &table[i]))?;
    let id: Vec<usize> = x.elements().collect();
    let identity = lookup[&id];
    Ok(OperatorQuantale {
        base: x.clone(),
        operators,
        quantale: Arc::new(quantale),
        identity,
    })
}

/// Pointwise order and composition on a composition-closed set of operators.
fn operator_quantale_on(
    base: &FiniteSupLattice,
    ops: &[Vec<usize>],
    name: impl Fn(usize) -> String,
) -> Result<(Quantale, HashMap<Vec<usize>, usize>)> {
    let n = ops.len();
    let lookup: HashMap<Vec<usize>, usize> =
        ops.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    let leq: Vec<Vec<bool>> = ops
        .iter()
        .map(|f| {
            ops.iter()
                .map(|g| f.iter().zip(g).all(|(&a, &b)| base.leq(a, b)))
                .collect()
        })
        .collect();
    let carrier = Arc::new(FiniteSupLattice::from_leq((0..n).map(name).collect(), &leq)?);
    let mut mult = Vec::with_capacity(n * n);
    for f in ops {
        for g in ops {
            let fg: Vec<usize> = g.iter().map(|&v| f[v]).collect();
            match lookup.get(&fg) {
                Some(&k) => mult.push(k),
                None => {
                    return Err(Error::NotCompositionClosed(
                        carrier.name(lookup[f]).to_string(),
                        carrier.name(lookup[g]).to_string(),
                    ))
                }
            }
        }
    }
    Ok((Quantale::new(carrier, mult)?, lookup))
}

/// The image of a join-preserving family `T → Q(X)` as a quantale.
#[derive(Clone, Debug)]
pub struct ImageSubquantale {
    quantale: Arc<Quantale>,
    operators: Vec<Vec<usize>>,
    index: Vec<usize>,
}

impl ImageSubquantale {
    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.quantale
    }

    /// Operator (values on the base lattice) of each quantale element.
    pub fn operators(&self) -> &[Vec<usize>] {
        &self.operators
    }

    pub fn operator(&self, element: usize) -> &[usize] {
        &self.operators[element]
    }

    /// Quantale element of each domain element (surjective).
    pub fn index(&self) -> &[usize] {
        &self.index
    }

    pub fn element_of(&self, domain_element: usize) -> usize {
        self.index[domain_element]
    }

    pub fn element_for_operator(&self, op: &[usize]) -> Option<usize> {
        self.operators.iter().position(|o| o == op)
    }
}

/// Intern the operators `family[t]` (`t` ranging over the lattice `domain`),
/// check the family preserves joins and the image is closed under
/// composition, and return the image as a quantale. Elements are ordered by
/// first occurrence in `domain` and named `<prefix>(<domain name>)`.
pub fn image_subquantale(
    domain: &FiniteSupLattice,
    base: &FiniteSupLattice,
    family: &[Vec<usize>],
    prefix: &str,
) -> Result<ImageSubquantale> {
    if family.len() != domain.len() {
        return Err(Error::ShapeMismatch(format!(
            "family has {} operators for a domain of {} elements",
            family.len(),
            domain.len()
        )));
    }
    for (t, op) in family.iter().enumerate() {
        if let Verdict::Fails(f) = is_sup_map(base, base, op)? {
            return Err(Error::NotSupMap(format!(
                "{prefix}({}): {}",
                domain.name(t),
                f.describe(base, base, op)
            )));
        }
    }
    let pointwise_join = |f: &[usize], g: &[usize]| -> Vec<usize> {
        f.iter().zip(g).map(|(&a, &b)| base.join(a, b)).collect()
    };
    if family[domain.bottom()].iter().any(|&v| v != base.bottom()) {
        return Err(Error::NotSupMap(format!(
            "{prefix}({}) is not the zero operator",
            domain.name(domain.bottom())
        )));
    }
    for a in domain.elements() {
        for b in (a + 1)..domain.len() {
            if family[domain.join(a, b)] != pointwise_join(&family[a], &family[b]) {
                return Err(Error::NotSupMap(format!(
                    "{prefix}({a} ∨ {b}) ≠ {prefix}({a}) ∨ {prefix}({b})",
                    a = domain.name(a),
                    b = domain.name(b)
                )));
            }
        }
    }

    let mut operators: Vec<Vec<usize>> = Vec::new();
    let mut representative: Vec<usize> = Vec::new();
    let mut seen: HashMap<&[usize], usize> = HashMap::new();
    let mut index = Vec::with_capacity(domain.len());
    for (t, op) in family.iter().enumerate() {
        let k = *seen.entry(op.as_slice()).or_insert_with(|| {
            operators.push(op.clone());
            representative.push(t);
            operators.len() - 1
        });
        index.push(k);
    }
    let (quantale, _) = operator_quantale_on(base, &operators, |i| {
        format!("{prefix}({})", domain.name(representative[i]))
    })?;
    Ok(ImageSubquantale {
        quantale: Arc::new(quantale),
        operators,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(l: FiniteSupLattice) -> Arc<FiniteSupLattice> {
        Arc::new(l)
    }

    /// Oracle: scan every triple for the first associativity failure.
    fn first_assoc_failure(n: usize, mult: &[usize]) -> Option<(usize, usize, usize)> {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a * n + b] * n + c] != mult[a * n + mult[b * n + c]] {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    #[test]
    fn meet_on_two_is_a_quantale() {
        let q = Quantale::meet(arc(FiniteSupLattice::chain(2))).unwrap();
        assert!(check_quantale(q.carrier(), q.table()).unwrap().holds());
        assert!(q.is_commutative());
    }

    #[test]
    fn three_chain_tables_match_brute_force() {
        // Every table on the 3-chain with 0 absorbing; joins on a chain are
        // maxima, so distributivity is monotonicity in each argument.
        let c3 = arc(FiniteSupLattice::chain(3));
        for code in 0..81usize {
            let mut mult = vec![0usize; 9];
            let mut k = code;
            for a in 1..3 {
                for b in 1..3 {
                    mult[a * 3 + b] = k % 3;
                    k /= 3;
                }
            }
            let monotone = (0..3).all(|a| {
                (0..2).all(|b| mult[a * 3 + b] <= mult[a * 3 + b + 1] && mult[b * 3 + a] <= mult[(b + 1) * 3 + a])
            });
            let expected = monotone && first_assoc_failure(3, &mult).is_none();
            assert_eq!(check_quantale(&c3, &mult).unwrap().holds(), expected, "{mult:?}");
        }
    }

    #[test]
    fn empty_join_failure() {
        let two = arc(FiniteSupLattice::chain(2));
        // 1·0 = 1.
        let v = check_quantale(&two, &[0, 0, 1, 1]).unwrap();
        assert_eq!(v, Verdict::Fails(QuantaleFailure::RightZero { a: 1 }));
        assert!(matches!(
            check_quantale(&two, &[0, 0, 1]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn endo_quantale_sizes() {
        let limits = Limits::default();
        assert_eq!(endo_quantale(&arc(FiniteSupLattice::chain(1)), &limits).unwrap().len(), 1);
        let q2 = endo_quantale(&arc(FiniteSupLattice::chain(2)), &limits).unwrap();
        assert_eq!(q2.len(), 2);
        let meet = Quantale::meet(arc(FiniteSupLattice::chain(2))).unwrap();
        assert!(q2.quantale().same_structure(&meet));
        let q3 = endo_quantale(&arc(FiniteSupLattice::chain(3)), &limits).unwrap();
        assert_eq!(q3.len(), 6);
        assert!(!q3.quantale().is_commutative());
        assert_eq!(q3.quantale().unit(), Some(q3.identity()));
        let q4 = endo_quantale(&arc(FiniteSupLattice::diamond()), &limits).unwrap();
        assert_eq!(q4.len(), 16);
    }

    #[test]
    fn endo_quantales_satisfy_the_laws() {
        let limits = Limits::default();
        for n in 1..=4 {
            for x in crate::lattice::enumerate_lattices(n, &limits).unwrap() {
                let q = endo_quantale(&arc(x), &limits).unwrap();
                let qq = q.quantale();
                assert!(check_quantale(qq.carrier(), qq.table()).unwrap().holds());
                let zero = qq.carrier().bottom();
                for a in qq.carrier().elements() {
                    assert_eq!(qq.mul(a, zero), zero);
                    assert_eq!(qq.mul(zero, a), zero);
                }
            }
        }
    }

    #[test]
    fn involution_checks() {
        let two = Quantale::meet(arc(FiniteSupLattice::chain(2))).unwrap();
        assert!(is_involution(&two, &[0, 1]).holds());
        let q3 = endo_quantale(&arc(FiniteSupLattice::chain(3)), &Limits::default()).unwrap();
        let q = q3.quantale();
        let id: Vec<usize> = q.carrier().elements().collect();
        match is_involution(q, &id) {
            Verdict::Fails(InvolutionFailure::AntiHomomorphism { a, b }) => {
                assert_ne!(q.mul(a, b), q.mul(b, a));
            }
            other => panic!("expected anti-homomorphism failure, got {other:?}"),
        }
        let c3 = Quantale::meet(arc(FiniteSupLattice::chain(3))).unwrap();
        assert_eq!(
            is_involution(&c3, &[0, 2, 2]),
            Verdict::Fails(InvolutionFailure::NotPeriodTwo { a: 1 })
        );
    }

    #[test]
    fn image_of_constant_bottom_family_is_trivial() {
        let t = FiniteSupLattice::chain(3);
        let base = FiniteSupLattice::chain(2);
        let img = image_subquantale(&t, &base, &vec![vec![0, 0]; 3], "L").unwrap();
        assert_eq!(img.quantale().len(), 1);
        assert_eq!(img.index(), &[0, 0, 0]);
    }

    #[test]
    fn image_rejects_non_closed_family() {
        let base = FiniteSupLattice::chain(3);
        let t3 = FiniteSupLattice::chain(3);
        // s(1) = a, s(a) = 0: s∘s = zero, so {zero, s, id} is closed.
        let closed = vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 2]];
        assert_eq!(image_subquantale(&t3, &base, &closed, "L").unwrap().quantale().len(), 3);
        // f = (0,0,a), g = (0,1,1): f∘g = (0,a,a) is not in the image.
        let bad = vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 2, 2]];
        match image_subquantale(&t3, &base, &bad, "L") {
            Err(Error::NotCompositionClosed(f, g)) => {
                assert_eq!((f.as_str(), g.as_str()), ("L(a)", "L(1)"));
            }
            other => panic!("expected NotCompositionClosed, got {other:?}"),
        }
    }

    #[test]
    fn image_rejects_non_join_preserving_family() {
        let t = FiniteSupLattice::chain(2);
        let base = FiniteSupLattice::chain(2);
        assert!(matches!(
            image_subquantale(&t, &base, &[vec![0, 1], vec![0, 1]], "L"),
            Err(Error::NotSupMap(_))
        ));
    }
}
