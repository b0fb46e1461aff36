//! Witnesses `p: X⊗X*⊗X → X` for imprimitivity bimodules between
//! involutive quantales.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::conditions::{linking_failure, Half, LinkingFailure};
use super::context::{build_parts, check_morita_context, MoritaContext};
use super::witness::{lift_generators, MoritaPairWitness};
use crate::error::{Error, Result};
use crate::lattice::{FiniteSupLattice, SupMap};
use crate::limits::Limits;
use crate::module::{check_bimodule, conjugate_bimodule, is_m_regular, Bimodule, RegularityTarget};
use crate::quantale::{is_involution, ImageSubquantale, Quantale};
use crate::report::ConditionReport;
use crate::tensor::{is_multimorphism, MultiTensorLattice};
use crate::Verdict;

/// A lattice `X` with `p: X⊗X*⊗X → X`.
#[derive(Clone)]
pub struct InvolutiveWitness {
    x: Arc<FiniteSupLattice>,
    x_star: Arc<FiniteSupLattice>,
    t_xxx: Arc<MultiTensorLattice>,
    p: SupMap,
    p_gen: Vec<usize>,
}

impl fmt::Debug for InvolutiveWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvolutiveWitness")
            .field("x", &self.x.order_id())
            .field("p", &self.p_gen)
            .finish()
    }
}

impl PartialEq for InvolutiveWitness {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.p.values() == other.p.values()
    }
}

impl Eq for InvolutiveWitness {}

impl InvolutiveWitness {
    /// `t_xxx` must be `X⊗X*⊗X` with `X*` the conjugate of `X`.
    pub fn new(t_xxx: Arc<MultiTensorLattice>, p: SupMap) -> Result<Self> {
        let f = t_xxx.factors();
        if f.len() != 3 || f[0] != f[2] || *f[1] != f[0].conjugate() {
            return Err(Error::ShapeMismatch(
                "the domain of p must be X⊗X*⊗X".into(),
            ));
        }
        let (x, x_star) = (f[0].clone(), f[1].clone());
        if p.dom() != t_xxx.lattice() || *p.cod() != x {
            return Err(Error::ShapeMismatch("p does not map X⊗X*⊗X to X".into()));
        }
        let p_gen = t_xxx.restrict_to_generators(&p);
        Ok(InvolutiveWitness {
            x,
            x_star,
            t_xxx,
            p,
            p_gen,
        })
    }

    /// `p_gen[(x₁·|X| + x₂)·|X| + x₃]` is `p(x₁⊗x₂*⊗x₃)`.
    pub fn from_generators(x: Arc<FiniteSupLattice>, p_gen: &[usize], limits: &Limits) -> Result<Self> {
        let x_star = Arc::new(x.conjugate());
        let t = Arc::new(MultiTensorLattice::new(vec![x.clone(), x_star, x], limits)?);
        Self::from_generators_in(t, p_gen)
    }

    pub fn from_generators_in(t_xxx: Arc<MultiTensorLattice>, p_gen: &[usize]) -> Result<Self> {
        let p = lift_generators(&t_xxx, p_gen, "p")?;
        Self::new(t_xxx, p)
    }

    pub fn x(&self) -> &Arc<FiniteSupLattice> {
        &self.x
    }

    pub fn x_star(&self) -> &Arc<FiniteSupLattice> {
        &self.x_star
    }

    pub fn t_xxx(&self) -> &Arc<MultiTensorLattice> {
        &self.t_xxx
    }

    pub fn p(&self) -> &SupMap {
        &self.p
    }

    pub fn p_generators(&self) -> &[usize] {
        &self.p_gen
    }

    fn half(&self) -> Half<'_> {
        Half::new(&self.x, &self.x_star, &self.p_gen, "p")
    }
}

/// `q(x*⊗y⊗z*) = p(z⊗y*⊗x)*` on generators. Since `*` is the identity on
/// indices this is a reversal of the triple.
pub(crate) fn derived_q_generators(n: usize, p_gen: &[usize]) -> Vec<usize> {
    let mut q = vec![0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                q[(i * n + j) * n + k] = p_gen[(k * n + j) * n + i];
            }
        }
    }
    q
}

/// `q: X*⊗X⊗X* → X*` given by `q(x*⊗y⊗z*) = p(z⊗y*⊗x)*`.
pub fn derive_q_from_p(w: &InvolutiveWitness, limits: &Limits) -> Result<SupMap> {
    let t = MultiTensorLattice::new(vec![w.x_star.clone(), w.x.clone(), w.x_star.clone()], limits)?;
    lift_generators(&t, &derived_q_generators(w.x.len(), &w.p_gen), "q")
}

/// The pair `(p, q)` with `Y = X*` and `q` derived from `p`.
pub fn involutive_pair_witness(w: &InvolutiveWitness, limits: &Limits) -> Result<MoritaPairWitness> {
    let t_yxy = Arc::new(MultiTensorLattice::new(
        vec![w.x_star.clone(), w.x.clone(), w.x_star.clone()],
        limits,
    )?);
    let q_gen = derived_q_generators(w.x.len(), &w.p_gen);
    MoritaPairWitness::from_generators_in(w.t_xxx.clone(), t_yxy, &w.p_gen, &q_gen)
}

fn describe_a(x: &FiniteSupLattice, (v, vals): LinkingFailure) -> String {
    let n = |e: usize| x.name(e);
    format!(
        "at x₁..x₅ = ({}, {}, {}, {}, {}): p(p(x₁⊗x₂*⊗x₃)⊗x₄*⊗x₅) = {}, p(x₁⊗p(x₄⊗x₃*⊗x₂)*⊗x₅) = {}, p(x₁⊗x₂*⊗p(x₃⊗x₄*⊗x₅)) = {}",
        n(v[0]),
        n(v[1]),
        n(v[2]),
        n(v[3]),
        n(v[4]),
        n(vals[0]),
        n(vals[1]),
        n(vals[2])
    )
}

/// Surjectivity of `p` and conditions a), b), c), on generators.
///
/// Check ids: `surjective(p)`, `a`, `b`, `c`.
pub fn check_involutive_conditions(w: &InvolutiveWitness) -> ConditionReport {
    let p = w.half();
    let q_gen = derived_q_generators(w.x.len(), &w.p_gen);
    let q = Half::new(&w.x_star, &w.x, &q_gen, "q");
    let name = |e: usize| w.x.name(e).to_string();
    let mut r = ConditionReport::new();
    r.record(
        "surjective(p)",
        p.missed_by_image().map(|m| {
            let names: Vec<String> = m.into_iter().map(name).collect();
            format!("the image of p misses {}", names.join(", "))
        }),
    );
    r.record("a", linking_failure(p, q).map(|f| describe_a(&w.x, f)));
    r.record(
        "b",
        p.right_collision()
            .map(|(a, b)| format!("p(−⊗{a}) = p(−⊗{b}) but {a} ≠ {b}", a = name(a), b = name(b))),
    );
    r.record(
        "c",
        p.left_collision()
            .map(|(a, b)| format!("p({a}⊗−) = p({b}⊗−) but {a} ≠ {b}", a = name(a), b = name(b))),
    );
    r
}

/// An `A,B`-bimodule with inner products valued in the left quantale
/// (`_A⟨x,y⟩`) and in the right quantale (`⟨x,y⟩_B`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprimitivityBimodule {
    x: Bimodule,
    left_inner: Vec<usize>,
    right_inner: Vec<usize>,
}

impl ImprimitivityBimodule {
    pub fn new(x: Bimodule, left_inner: Vec<usize>, right_inner: Vec<usize>) -> Result<Self> {
        let n = x.carrier().len();
        if left_inner.len() != n * n || right_inner.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "inner product tables must have {n}×{n} entries"
            )));
        }
        if left_inner.iter().any(|&v| v >= x.left_quantale().len())
            || right_inner.iter().any(|&v| v >= x.right_quantale().len())
        {
            return Err(Error::ShapeMismatch("inner product value outside its quantale".into()));
        }
        Ok(ImprimitivityBimodule {
            x,
            left_inner,
            right_inner,
        })
    }

    pub fn a(&self) -> &Arc<Quantale> {
        self.x.left_quantale()
    }

    pub fn b(&self) -> &Arc<Quantale> {
        self.x.right_quantale()
    }

    pub fn bimodule(&self) -> &Bimodule {
        &self.x
    }

    /// `_A⟨x, y⟩`.
    pub fn left_inner(&self, x: usize, y: usize) -> usize {
        self.left_inner[x * self.x.carrier().len() + y]
    }

    /// `⟨x, y⟩_B`.
    pub fn right_inner(&self, x: usize, y: usize) -> usize {
        self.right_inner[x * self.x.carrier().len() + y]
    }

    pub fn left_inner_table(&self) -> &[usize] {
        &self.left_inner
    }

    pub fn right_inner_table(&self) -> &[usize] {
        &self.right_inner
    }

    /// `X*` as a `B,A`-bimodule with `_B⟨x*,y*⟩ = ⟨y,x⟩_B*` and
    /// `⟨x*,y*⟩_A = _A⟨y,x⟩*`.
    pub fn conjugate(&self) -> Result<Self> {
        let xs = conjugate_bimodule(&self.x)?;
        let star_a = self.a().involution().expect("checked by conjugate_bimodule");
        let star_b = self.b().involution().expect("checked by conjugate_bimodule");
        let n = self.x.carrier().len();
        let mut left = Vec::with_capacity(n * n);
        let mut right = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                left.push(star_b[self.right_inner(v, u)]);
                right.push(star_a[self.left_inner(v, u)]);
            }
        }
        Self::new(xs, left, right)
    }
}

fn full(q: &Quantale, table: &[usize]) -> Option<String> {
    let l = q.carrier();
    let mut image = FixedBitSet::with_capacity(l.len());
    for &v in table {
        image.insert(v);
    }
    let closure = l.join_closure(&image);
    let missed: Vec<&str> = l.elements().filter(|&e| !closure.contains(e)).map(|e| l.name(e)).collect();
    (!missed.is_empty()).then(|| format!("the inner product misses {}", missed.join(", ")))
}

/// The stated properties of an imprimitivity bimodule: involutive quantales,
/// an m-regular bimodule, inner products that are multimorphisms and module
/// maps in their outer slot, fullness of both, and compatibility
/// `_A⟨x,y⟩·z = x·⟨y,z⟩_B`.
pub fn check_imprimitivity(ib: &ImprimitivityBimodule) -> ConditionReport {
    let mut r = ConditionReport::new();
    let x = ib.x.carrier();
    let (a, b) = (ib.a(), ib.b());
    for (id, q) in [("involution(A)", a), ("involution(B)", b)] {
        let cx = match q.involution() {
            None => Some("no involution".to_string()),
            Some(star) => is_involution(q, star).into_counterexample().map(|f| f.describe(q, star)),
        };
        r.record(id, cx);
    }
    r.record(
        "bimodule(X)",
        check_bimodule(&ib.x).into_counterexample().map(|f| f.describe(&ib.x)),
    );
    r.record("m-regular(X)", is_m_regular(RegularityTarget::Bimodule(&ib.x)).describe(x));

    let factors = vec![x.clone(), x.clone()];
    for (id, q, table) in [
        ("multimorphism(A)", a, &ib.left_inner),
        ("multimorphism(B)", b, &ib.right_inner),
    ] {
        let cx = match is_multimorphism(&factors, q.carrier(), table) {
            Ok(Verdict::Holds) => None,
            Ok(Verdict::Fails(f)) => Some(f.describe(&factors)),
            Err(e) => Some(e.to_string()),
        };
        r.record(id, cx);
    }

    let (xl, xr) = (ib.x.left(), ib.x.right());
    let mut linear_a = None;
    'a: for e in a.carrier().elements() {
        for u in x.elements() {
            for v in x.elements() {
                if ib.left_inner(xl.act(u, e), v) != a.mul(e, ib.left_inner(u, v)) {
                    linear_a = Some(format!(
                        "⟨{e}·{u}, {v}⟩ ≠ {e}·⟨{u}, {v}⟩",
                        e = a.carrier().name(e),
                        u = x.name(u),
                        v = x.name(v)
                    ));
                    break 'a;
                }
            }
        }
    }
    r.record("linear(A)", linear_a);
    let mut linear_b = None;
    'b: for e in b.carrier().elements() {
        for u in x.elements() {
            for v in x.elements() {
                if ib.right_inner(u, xr.act(v, e)) != b.mul(ib.right_inner(u, v), e) {
                    linear_b = Some(format!(
                        "⟨{u}, {v}·{e}⟩ ≠ ⟨{u}, {v}⟩·{e}",
                        e = b.carrier().name(e),
                        u = x.name(u),
                        v = x.name(v)
                    ));
                    break 'b;
                }
            }
        }
    }
    r.record("linear(B)", linear_b);

    r.record("full(A)", full(a, &ib.left_inner));
    r.record("full(B)", full(b, &ib.right_inner));

    let mut compat = None;
    'c: for u in x.elements() {
        for v in x.elements() {
            for z in x.elements() {
                if xl.act(z, ib.left_inner(u, v)) != xr.act(u, ib.right_inner(v, z)) {
                    compat = Some(format!(
                        "⟨{u}, {v}⟩·{z} ≠ {u}·⟨{v}, {z}⟩",
                        u = x.name(u),
                        v = x.name(v),
                        z = x.name(z)
                    ));
                    break 'c;
                }
            }
        }
    }
    r.record("compatibility", compat);
    r
}

/// The outputs of [`build_involutive_context`].
#[derive(Clone, Debug)]
pub struct InvolutiveContext {
    pub context: MoritaContext,
    pub imprimitivity: ImprimitivityBimodule,
}

/// `e ↦` the image element of `σ(t)` for any `t` over `e`, where `σ` swaps
/// the two coordinates of every tuple of `t`.
fn swap_star(t: &MultiTensorLattice, image: &ImageSubquantale, side: &str) -> Result<Vec<usize>> {
    let swapped: Vec<usize> = (0..t.space().len())
        .map(|i| {
            let c = t.space().coords(i);
            t.elem_tensor(&[c[1], c[0]])
        })
        .collect();
    let sigma = t.lift_unchecked(t.lattice(), &swapped);
    let n = image.quantale().len();
    let mut star: Vec<Option<(usize, usize)>> = vec![None; n];
    for a in 0..t.len() {
        let e = image.element_of(a);
        let s = image.element_of(sigma.apply(a));
        match star[e] {
            None => star[e] = Some((s, a)),
            Some((prev, first)) if prev != s => {
                return Err(Error::StarNotWellDefined {
                    side: side.to_string(),
                    first: t.lattice().name(first).to_string(),
                    second: t.lattice().name(a).to_string(),
                });
            }
            Some(_) => {}
        }
    }
    Ok(star.into_iter().map(|s| s.expect("image index is surjective").0).collect())
}

/// Build the context of `(p, q)` with `q` derived from `p`, put the stars
/// `L_{x⊗y*} ↦ L_{y⊗x*}` and `R_{y*⊗x} ↦ R_{x*⊗y}` on the two quantales, and
/// package `X` with `_A⟨x,y⟩ = (x, y*)` and `⟨x,y⟩_B = [x*, y]`.
pub fn build_involutive_context(w: &InvolutiveWitness, limits: &Limits) -> Result<InvolutiveContext> {
    let report = check_involutive_conditions(w);
    if !report.passed() {
        return Err(Error::ConditionsFailed(Box::new(report)));
    }
    let pair = involutive_pair_witness(w, limits)?;
    let built = build_parts(&pair, limits)?;
    let star_a = swap_star(&built.t_xy, &built.l, "L")?;
    let star_b = swap_star(&built.t_yx, &built.r, "R")?;
    let context = built.context.with_involutions(star_a, star_b)?;
    let imprimitivity = ImprimitivityBimodule::new(
        context.x().clone(),
        context.pair_xy_table().to_vec(),
        context.pair_yx_table().to_vec(),
    )?;
    Ok(InvolutiveContext {
        context,
        imprimitivity,
    })
}

/// Everything about an involutive context: the Morita context axioms, the
/// imprimitivity properties of `X` and of its conjugate, the conjugate inner
/// product identities, and `Y = X*` as bimodules.
pub fn check_involutive_context(ic: &InvolutiveContext) -> ConditionReport {
    let mut r = ConditionReport::new();
    r.merge("context/", check_morita_context(&ic.context));
    r.merge("X/", check_imprimitivity(&ic.imprimitivity));
    match ic.imprimitivity.conjugate() {
        Err(e) => r.fail("X*", e.to_string()),
        Ok(conj) => {
            r.merge("X*/", check_imprimitivity(&conj));
            let ib = &ic.imprimitivity;
            let x = ib.x.carrier();
            let star_a = ib.a().involution().unwrap_or_default();
            let star_b = ib.b().involution().unwrap_or_default();
            let mut cx = None;
            'outer: for u in x.elements() {
                for v in x.elements() {
                    if conj.left_inner(u, v) != ib.right_inner(u, v) {
                        cx = Some(format!(
                            "_B⟨{u}*, {v}*⟩ = ⟨{v}, {u}⟩_B* differs from [{u}*, {v}]",
                            u = x.name(u),
                            v = x.name(v)
                        ));
                        break 'outer;
                    }
                    if star_a.get(ib.left_inner(v, u)) != Some(&ib.left_inner(u, v))
                        || star_b.get(ib.right_inner(v, u)) != Some(&ib.right_inner(u, v))
                    {
                        cx = Some(format!(
                            "conjugating the inner products at ({}, {}) does not swap them",
                            x.name(u),
                            x.name(v)
                        ));
                        break 'outer;
                    }
                }
            }
            r.record("conjugate inner products", cx);
            let y_is_conjugate = conjugate_bimodule(ic.context.x())
                .map(|xs| xs == *ic.context.y())
                .unwrap_or(false);
            r.record(
                "Y = X*",
                (!y_is_conjugate).then(|| "Y differs from the conjugate bimodule of X".to_string()),
            );
        }
    }
    r
}
