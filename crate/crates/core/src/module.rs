//! Quantale module actions, bimodules, essential parts, separation,
//! m-regularity and conjugate bimodules.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::FiniteSupLattice;
use crate::quantale::Quantale;
use crate::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// The module laws: M1 associativity over the quantale product, M2 join
/// preservation in the module slot, M3 join preservation in the quantale slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleLaw {
    M1,
    M2,
    M3,
}

/// A violated module law. `module` and `quantale` hold the elements involved:
/// for M1 one module element and two quantale elements; for M2 a module pair
/// (empty for the empty join) and one quantale element; dually for M3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleFailure {
    pub law: ModuleLaw,
    pub module: Vec<usize>,
    pub quantale: Vec<usize>,
}

impl ModuleFailure {
    pub fn describe(&self, action: &ModuleAction) -> String {
        let m = |i: usize| action.carrier.name(self.module[i]).to_string();
        let a = |i: usize| action.quantale.carrier().name(self.quantale[i]).to_string();
        let dot = |x: &str, y: &str| match action.side {
            Side::Right => format!("{x}·{y}"),
            Side::Left => format!("{y}·{x}"),
        };
        match self.law {
            ModuleLaw::M1 => match action.side {
                Side::Right => format!("M1: {m}·({a}{b}) ≠ ({m}·{a})·{b}", m = m(0), a = a(0), b = a(1)),
                Side::Left => format!("M1: ({a}{b})·{m} ≠ {a}·({b}·{m})", m = m(0), a = a(0), b = a(1)),
            },
            ModuleLaw::M2 if self.module.is_empty() => {
                format!("M2: {} ≠ 0 (empty join)", dot("0", &a(0)))
            }
            ModuleLaw::M2 => format!(
                "M2: {} ≠ {} ∨ {}",
                dot(&format!("({} ∨ {})", m(0), m(1)), &a(0)),
                dot(&m(0), &a(0)),
                dot(&m(1), &a(0))
            ),
            ModuleLaw::M3 if self.quantale.is_empty() => {
                format!("M3: {} ≠ 0 (empty join)", dot(&m(0), "0"))
            }
            ModuleLaw::M3 => format!(
                "M3: {} ≠ {} ∨ {}",
                dot(&m(0), &format!("({} ∨ {})", a(0), a(1))),
                dot(&m(0), &a(0)),
                dot(&m(0), &a(1))
            ),
        }
    }
}

/// An action of a quantale on a sup-lattice, stored as a full table.
///
/// `table[m * |A| + a]` is `m·a` for a right action and `a·m` for a left one.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleAction {
    side: Side,
    quantale: Arc<Quantale>,
    carrier: Arc<FiniteSupLattice>,
    table: Vec<usize>,
}

impl fmt::Debug for ModuleAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleAction")
            .field("side", &self.side)
            .field("module", &self.carrier.len())
            .field("quantale", &self.quantale.len())
            .field("table", &self.table)
            .finish()
    }
}

impl ModuleAction {
    /// Shape checks only; the laws are checked by [`check_module`].
    pub fn new(
        side: Side,
        quantale: Arc<Quantale>,
        carrier: Arc<FiniteSupLattice>,
        table: Vec<usize>,
    ) -> Result<Self> {
        let (m, a) = (carrier.len(), quantale.len());
        if table.len() != m * a {
            return Err(Error::ShapeMismatch(format!(
                "action table has {} entries, expected {m}×{a}",
                table.len()
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= m) {
            return Err(Error::ShapeMismatch(format!(
                "action value {v} out of range for a module of {m} elements"
            )));
        }
        Ok(ModuleAction {
            side,
            quantale,
            carrier,
            table,
        })
    }

    /// Tabulate `f(m, a)`.
    pub fn from_fn(
        side: Side,
        quantale: Arc<Quantale>,
        carrier: Arc<FiniteSupLattice>,
        f: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let a = quantale.len();
        let table = (0..carrier.len() * a).map(|i| f(i / a, i % a)).collect();
        Self::new(side, quantale, carrier, table)
    }

    /// A quantale acting on itself by multiplication.
    pub fn regular(side: Side, quantale: Arc<Quantale>) -> Self {
        let carrier = quantale.carrier().clone();
        let n = quantale.len();
        let table = (0..n * n)
            .map(|i| {
                let (m, a) = (i / n, i % n);
                match side {
                    Side::Right => quantale.mul(m, a),
                    Side::Left => quantale.mul(a, m),
                }
            })
            .collect();
        ModuleAction {
            side,
            quantale,
            carrier,
            table,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.quantale
    }

    pub fn carrier(&self) -> &Arc<FiniteSupLattice> {
        &self.carrier
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// `m·a` (right) or `a·m` (left).
    #[inline]
    pub fn act(&self, m: usize, a: usize) -> usize {
        self.table[m * self.quantale.len() + a]
    }

    /// The curried map `m·(−)` (or `(−)·m`) as a row over the quantale.
    pub fn row(&self, m: usize) -> &[usize] {
        let a = self.quantale.len();
        &self.table[m * a..(m + 1) * a]
    }
}

/// Check M1–M3. Join laws are checked before associativity.
pub fn check_module(action: &ModuleAction) -> Verdict<ModuleFailure> {
    let m_lat = &*action.carrier;
    let q = &*action.quantale;
    let a_lat = q.carrier();
    let fail = |law, module: Vec<usize>, quantale: Vec<usize>| ModuleFailure {
        law,
        module,
        quantale,
    };

    for a in a_lat.elements() {
        if action.act(m_lat.bottom(), a) != m_lat.bottom() {
            return Verdict::Fails(fail(ModuleLaw::M2, vec![], vec![a]));
        }
    }
    let m2 = a_lat.elements().collect::<Vec<_>>().par_iter().find_map_first(|&a| {
        for m in m_lat.elements() {
            for n in (m + 1)..m_lat.len() {
                if action.act(m_lat.join(m, n), a) != m_lat.join(action.act(m, a), action.act(n, a)) {
                    return Some(fail(ModuleLaw::M2, vec![m, n], vec![a]));
                }
            }
        }
        None
    });
    if let Some(f) = m2 {
        return Verdict::Fails(f);
    }

    for m in m_lat.elements() {
        if action.act(m, a_lat.bottom()) != m_lat.bottom() {
            return Verdict::Fails(fail(ModuleLaw::M3, vec![m], vec![]));
        }
    }
    let m3 = m_lat.elements().collect::<Vec<_>>().par_iter().find_map_first(|&m| {
        for a in a_lat.elements() {
            for b in (a + 1)..a_lat.len() {
                if action.act(m, a_lat.join(a, b)) != m_lat.join(action.act(m, a), action.act(m, b)) {
                    return Some(fail(ModuleLaw::M3, vec![m], vec![a, b]));
                }
            }
        }
        None
    });
    if let Some(f) = m3 {
        return Verdict::Fails(f);
    }

    let m1 = m_lat.elements().collect::<Vec<_>>().par_iter().find_map_first(|&m| {
        for a in a_lat.elements() {
            for b in a_lat.elements() {
                let lhs = action.act(m, q.mul(a, b));
                let rhs = match action.side {
                    Side::Right => action.act(action.act(m, a), b),
                    Side::Left => action.act(action.act(m, b), a),
                };
                if lhs != rhs {
                    return Some(fail(ModuleLaw::M1, vec![m], vec![a, b]));
                }
            }
        }
        None
    });
    m1.into()
}

/// A sup-lattice with a left action of `A` and a right action of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    left: ModuleAction,
    right: ModuleAction,
}

impl Bimodule {
    pub fn new(left: ModuleAction, right: ModuleAction) -> Result<Self> {
        if left.side != Side::Left || right.side != Side::Right {
            return Err(Error::ShapeMismatch(
                "a bimodule needs a left action and a right action".into(),
            ));
        }
        if left.carrier != right.carrier {
            return Err(Error::ShapeMismatch(
                "left and right actions act on different lattices".into(),
            ));
        }
        Ok(Bimodule { left, right })
    }

    /// A quantale as a bimodule over itself.
    pub fn regular(quantale: Arc<Quantale>) -> Self {
        Bimodule {
            left: ModuleAction::regular(Side::Left, quantale.clone()),
            right: ModuleAction::regular(Side::Right, quantale),
        }
    }

    pub fn left(&self) -> &ModuleAction {
        &self.left
    }

    pub fn right(&self) -> &ModuleAction {
        &self.right
    }

    pub fn carrier(&self) -> &Arc<FiniteSupLattice> {
        &self.left.carrier
    }

    pub fn left_quantale(&self) -> &Arc<Quantale> {
        &self.left.quantale
    }

    pub fn right_quantale(&self) -> &Arc<Quantale> {
        &self.right.quantale
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BimoduleFailure {
    Left(ModuleFailure),
    Right(ModuleFailure),
    /// `(a·m)·b ≠ a·(m·b)`.
    NotCommuting { a: usize, m: usize, b: usize },
}

impl BimoduleFailure {
    pub fn describe(&self, x: &Bimodule) -> String {
        match self {
            BimoduleFailure::Left(f) => format!("left action {}", f.describe(&x.left)),
            BimoduleFailure::Right(f) => format!("right action {}", f.describe(&x.right)),
            BimoduleFailure::NotCommuting { a, m, b } => format!(
                "actions do not commute: ({a}·{m})·{b} ≠ {a}·({m}·{b})",
                a = x.left_quantale().carrier().name(*a),
                m = x.carrier().name(*m),
                b = x.right_quantale().carrier().name(*b)
            ),
        }
    }
}

pub fn check_bimodule(x: &Bimodule) -> Verdict<BimoduleFailure> {
    if let Verdict::Fails(f) = check_module(&x.left) {
        return Verdict::Fails(BimoduleFailure::Left(f));
    }
    if let Verdict::Fails(f) = check_module(&x.right) {
        return Verdict::Fails(BimoduleFailure::Right(f));
    }
    let (na, nb) = (x.left_quantale().len(), x.right_quantale().len());
    x.carrier()
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .find_map_first(|&m| {
            for a in 0..na {
                for b in 0..nb {
                    if x.right.act(x.left.act(m, a), b) != x.left.act(x.right.act(m, b), a) {
                        return Some(BimoduleFailure::NotCommuting { a, m, b });
                    }
                }
            }
            None
        })
        .into()
}

/// Join-closure of `{m·a : m ∈ subset, a ∈ A}`.
pub fn essential_part_of(action: &ModuleAction, subset: &FixedBitSet) -> FixedBitSet {
    let mut products = FixedBitSet::with_capacity(action.carrier.len());
    for m in subset.ones() {
        for &v in action.row(m) {
            products.insert(v);
        }
    }
    let ess = action.carrier.join_closure(&products);
    debug_assert!(
        ess.ones().all(|m| action.row(m).iter().all(|&v| ess.contains(v))),
        "essential part is not a submodule"
    );
    ess
}

/// `ess(M) = M·A`.
pub fn essential_part(action: &ModuleAction) -> FixedBitSet {
    let mut all = FixedBitSet::with_capacity(action.carrier.len());
    all.insert_range(..);
    essential_part_of(action, &all)
}

pub fn is_essential(action: &ModuleAction) -> bool {
    essential_part(action).count_ones(..) == action.carrier.len()
}

/// Distinct elements have distinct curried actions; on failure returns two
/// elements with identical rows.
pub fn is_separated(action: &ModuleAction) -> Verdict<(usize, usize)> {
    let mut seen: std::collections::HashMap<&[usize], usize> = std::collections::HashMap::new();
    for m in action.carrier.elements() {
        if let Some(&first) = seen.get(action.row(m)) {
            return Verdict::Fails((first, m));
        }
        seen.insert(action.row(m), m);
    }
    Verdict::Holds
}

/// Essentiality and separation of one action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideRegularity {
    pub side: Side,
    pub essential_part: FixedBitSet,
    pub essential: bool,
    pub separation: Verdict<(usize, usize)>,
}

impl SideRegularity {
    pub fn of(action: &ModuleAction) -> Self {
        let essential_part = essential_part(action);
        SideRegularity {
            side: action.side,
            essential: essential_part.count_ones(..) == action.carrier.len(),
            essential_part,
            separation: is_separated(action),
        }
    }

    pub fn separated(&self) -> bool {
        self.separation.holds()
    }

    pub fn m_regular(&self) -> bool {
        self.essential && self.separated()
    }

    pub fn describe(&self, carrier: &FiniteSupLattice) -> Option<String> {
        let mut problems = Vec::new();
        if !self.essential {
            let names: Vec<&str> = self.essential_part.ones().map(|m| carrier.name(m)).collect();
            problems.push(format!("{} essential part is {{{}}}", self.side, names.join(",")));
        }
        if let Some(&(m, n)) = self.separation.counterexample() {
            problems.push(format!(
                "{} action does not separate {} and {}",
                self.side,
                carrier.name(m),
                carrier.name(n)
            ));
        }
        (!problems.is_empty()).then(|| problems.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub sides: Vec<SideRegularity>,
    pub m_regular: bool,
    /// For a quantale: whether `1·1 = 1`.
    pub top_idempotent: Option<bool>,
}

impl RegularityReport {
    fn from_sides(sides: Vec<SideRegularity>) -> Self {
        let m_regular = sides.iter().all(SideRegularity::m_regular);
        RegularityReport {
            sides,
            m_regular,
            top_idempotent: None,
        }
    }

    pub fn side(&self, side: Side) -> Option<&SideRegularity> {
        self.sides.iter().find(|s| s.side == side)
    }

    pub fn describe(&self, carrier: &FiniteSupLattice) -> Option<String> {
        let problems: Vec<String> = self.sides.iter().filter_map(|s| s.describe(carrier)).collect();
        (!problems.is_empty()).then(|| problems.join("; "))
    }
}

pub enum RegularityTarget<'a> {
    Module(&'a ModuleAction),
    Bimodule(&'a Bimodule),
    Quantale(&'a Arc<Quantale>),
}

/// Essential and separated on every side. A quantale is taken as a bimodule
/// over itself: its left side separates columns, its right side rows.
pub fn is_m_regular(target: RegularityTarget<'_>) -> RegularityReport {
    match target {
        RegularityTarget::Module(m) => RegularityReport::from_sides(vec![SideRegularity::of(m)]),
        RegularityTarget::Bimodule(x) => RegularityReport::from_sides(vec![
            SideRegularity::of(&x.left),
            SideRegularity::of(&x.right),
        ]),
        RegularityTarget::Quantale(q) => {
            let x = Bimodule::regular(q.clone());
            let mut report = is_m_regular(RegularityTarget::Bimodule(&x));
            let top = q.carrier().top();
            report.top_idempotent = Some(q.mul(top, top) == top);
            report
        }
    }
}

/// `X*` as a `B,A`-bimodule: `b·x* = (x·b*)*` and `x*·a = (a*·x)*`.
pub fn conjugate_bimodule(x: &Bimodule) -> Result<Bimodule> {
    let a = x.left_quantale();
    let b = x.right_quantale();
    let star_a = a
        .involution()
        .ok_or_else(|| Error::MissingInvolution("the left quantale".into()))?;
    let star_b = b
        .involution()
        .ok_or_else(|| Error::MissingInvolution("the right quantale".into()))?;
    let carrier = Arc::new(x.carrier().conjugate());
    let left = ModuleAction::from_fn(Side::Left, b.clone(), carrier.clone(), |m, bb| {
        x.right.act(m, star_b[bb])
    })?;
    let right = ModuleAction::from_fn(Side::Right, a.clone(), carrier, |m, aa| {
        x.left.act(m, star_a[aa])
    })?;
    Bimodule::new(left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meet2() -> Arc<Quantale> {
        Arc::new(Quantale::meet(Arc::new(FiniteSupLattice::chain(2))).unwrap())
    }

    #[test]
    fn regular_meet_module_is_m_regular() {
        let q = meet2();
        let act = ModuleAction::regular(Side::Right, q.clone());
        assert!(check_module(&act).holds());
        assert_eq!(essential_part(&act).count_ones(..), 2);
        assert!(is_separated(&act).holds());
        let report = is_m_regular(RegularityTarget::Quantale(&q));
        assert!(report.m_regular);
        assert_eq!(report.top_idempotent, Some(true));
    }

    #[test]
    fn zero_action_fails_regularity() {
        let q = meet2();
        let zero = ModuleAction::from_fn(Side::Right, q.clone(), q.carrier().clone(), |_, _| 0).unwrap();
        assert!(check_module(&zero).holds());
        assert_eq!(essential_part(&zero).ones().collect::<Vec<_>>(), vec![0]);
        assert_eq!(is_separated(&zero), Verdict::Fails((0, 1)));
        let zq = Arc::new(Quantale::zero(Arc::new(FiniteSupLattice::chain(2))));
        assert!(!is_m_regular(RegularityTarget::Quantale(&zq)).m_regular);
    }

    #[test]
    fn one_element_quantale_is_m_regular() {
        let q = Arc::new(Quantale::zero(Arc::new(FiniteSupLattice::chain(1))));
        assert!(is_m_regular(RegularityTarget::Quantale(&q)).m_regular);
    }

    #[test]
    fn empty_join_failure_in_module_slot() {
        let q = meet2();
        // 0·1 = 1.
        let bad = ModuleAction::new(Side::Right, q.clone(), q.carrier().clone(), vec![0, 1, 0, 1]).unwrap();
        let f = check_module(&bad).into_counterexample().unwrap();
        assert_eq!(f.law, ModuleLaw::M2);
        assert!(f.module.is_empty());
        assert_eq!(f.quantale, vec![1]);
    }

    #[test]
    fn m1_failures_match_brute_force() {
        // Every table on the 3-chain over (3-chain, min) with 0 absorbing.
        let c3 = Arc::new(FiniteSupLattice::chain(3));
        let q = Arc::new(Quantale::meet(c3.clone()).unwrap());
        for code in 0..81usize {
            let mut table = vec![0usize; 9];
            let mut k = code;
            for m in 1..3 {
                for a in 1..3 {
                    table[m * 3 + a] = k % 3;
                    k /= 3;
                }
            }
            let act = ModuleAction::new(Side::Right, q.clone(), c3.clone(), table.clone()).unwrap();
            let monotone = (0..3).all(|x| {
                (0..2).all(|y| table[x * 3 + y] <= table[x * 3 + y + 1] && table[y * 3 + x] <= table[(y + 1) * 3 + x])
            });
            let assoc = (0..3).all(|m| {
                (0..3).all(|a| (0..3).all(|b| table[m * 3 + a.min(b)] == table[table[m * 3 + a] * 3 + b]))
            });
            let verdict = check_module(&act);
            assert_eq!(verdict.holds(), monotone && assoc, "{table:?}");
            if monotone && !assoc {
                let f = verdict.into_counterexample().unwrap();
                assert_eq!(f.law, ModuleLaw::M1);
                let (m, a, b) = (f.module[0], f.quantale[0], f.quantale[1]);
                assert_ne!(table[m * 3 + a.min(b)], table[table[m * 3 + a] * 3 + b]);
            }
        }
    }

    #[test]
    fn essential_part_is_idempotent() {
        let c3 = Arc::new(FiniteSupLattice::chain(3));
        let q = Arc::new(Quantale::meet(c3.clone()).unwrap());
        let act = ModuleAction::from_fn(Side::Right, q, c3, |m, a| m.min(a).min(1)).unwrap();
        assert!(check_module(&act).holds());
        let ess = essential_part(&act);
        assert_eq!(ess.ones().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(essential_part_of(&act, &ess), ess);
    }

    #[test]
    fn conjugate_of_commutative_with_identity_star() {
        let q = Arc::new(
            Quantale::meet(Arc::new(FiniteSupLattice::chain(3)))
                .unwrap()
                .with_involution(vec![0, 1, 2])
                .unwrap(),
        );
        let x = Bimodule::regular(q.clone());
        assert!(check_bimodule(&x).holds());
        let xs = conjugate_bimodule(&x).unwrap();
        assert!(check_bimodule(&xs).holds());
        assert_eq!(xs.left().table(), x.right().table());
        assert_eq!(xs.right().table(), x.left().table());
        assert_eq!(xs.carrier().names()[1], "a*");
        assert_eq!(conjugate_bimodule(&xs).unwrap(), x);
    }

    #[test]
    fn conjugate_needs_involutions() {
        let x = Bimodule::regular(meet2());
        assert!(matches!(conjugate_bimodule(&x), Err(Error::MissingInvolution(_))));
    }

    #[test]
    fn evaluation_is_a_left_action_only() {
        // Q(3-chain) acts on the 3-chain by evaluation from the left; read as
        // a right action it breaks M1 because Q(3-chain) is noncommutative.
        let c3 = Arc::new(FiniteSupLattice::chain(3));
        let endo = crate::quantale::endo_quantale(&c3, &crate::Limits::default()).unwrap();
        let q = endo.quantale().clone();
        let ops: Vec<Vec<usize>> = endo.operators().iter().map(|f| f.values().to_vec()).collect();
        let left = ModuleAction::from_fn(Side::Left, q.clone(), c3.clone(), |m, f| ops[f][m]).unwrap();
        let right = ModuleAction::from_fn(Side::Right, q, c3, |m, f| ops[f][m]).unwrap();
        assert!(check_module(&left).holds());
        let x = Bimodule::new(left, right).unwrap();
        assert!(matches!(
            check_bimodule(&x),
            Verdict::Fails(BimoduleFailure::Right(ModuleFailure { law: ModuleLaw::M1, .. }))
        ));
    }
}
