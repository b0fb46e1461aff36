use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::conditions::check_pair_conditions;
use super::witness::MoritaPairWitness;
use crate::error::{Error, Result};
use crate::lattice::FiniteSupLattice;
use crate::limits::Limits;
use crate::module::{check_bimodule, is_m_regular, Bimodule, ModuleAction, RegularityTarget, Side};
use crate::quantale::{image_subquantale, ImageSubquantale, Quantale};
use crate::report::ConditionReport;
use crate::tensor::{is_multimorphism, MultiTensorLattice};
use crate::Verdict;

/// `(A, B, X, Y, (−,−), [−,−])`: an `A,B`-bimodule `X`, a `B,A`-bimodule `Y`
/// and pairings `X×Y → A`, `Y×X → B`.
///
/// The pairings are stored as tables (`pair_xy[x·|Y| + y]`) so that a broken
/// candidate can still be represented and diagnosed.
#[derive(Clone, PartialEq, Eq)]
pub struct MoritaContext {
    a: Arc<Quantale>,
    b: Arc<Quantale>,
    x: Bimodule,
    y: Bimodule,
    pair_xy: Vec<usize>,
    pair_yx: Vec<usize>,
}

impl fmt::Debug for MoritaContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MoritaContext")
            .field("a", &self.a.len())
            .field("b", &self.b.len())
            .field("x", &self.x.carrier().len())
            .field("y", &self.y.carrier().len())
            .field("pair_xy", &self.pair_xy)
            .field("pair_yx", &self.pair_yx)
            .finish()
    }
}

impl MoritaContext {
    /// Shape checks only; the axioms are checked by [`check_morita_context`].
    pub fn new(x: Bimodule, y: Bimodule, pair_xy: Vec<usize>, pair_yx: Vec<usize>) -> Result<Self> {
        let a = x.left_quantale().clone();
        let b = x.right_quantale().clone();
        if *y.left_quantale() != b || *y.right_quantale() != a {
            return Err(Error::ShapeMismatch(
                "Y must be a bimodule over the right and left quantales of X".into(),
            ));
        }
        let (nx, ny) = (x.carrier().len(), y.carrier().len());
        if pair_xy.len() != nx * ny || pair_yx.len() != nx * ny {
            return Err(Error::ShapeMismatch(format!(
                "pairing tables must have {nx}×{ny} entries"
            )));
        }
        if pair_xy.iter().any(|&v| v >= a.len()) || pair_yx.iter().any(|&v| v >= b.len()) {
            return Err(Error::ShapeMismatch("pairing value outside its quantale".into()));
        }
        Ok(MoritaContext {
            a,
            b,
            x,
            y,
            pair_xy,
            pair_yx,
        })
    }

    pub fn a(&self) -> &Arc<Quantale> {
        &self.a
    }

    pub fn b(&self) -> &Arc<Quantale> {
        &self.b
    }

    pub fn x(&self) -> &Bimodule {
        &self.x
    }

    pub fn y(&self) -> &Bimodule {
        &self.y
    }

    pub fn pair_xy_table(&self) -> &[usize] {
        &self.pair_xy
    }

    pub fn pair_yx_table(&self) -> &[usize] {
        &self.pair_yx
    }

    /// `(x, y)`.
    #[inline]
    pub fn pair_xy(&self, x: usize, y: usize) -> usize {
        self.pair_xy[x * self.y.carrier().len() + y]
    }

    /// `[y, x]`.
    #[inline]
    pub fn pair_yx(&self, y: usize, x: usize) -> usize {
        self.pair_yx[y * self.x.carrier().len() + x]
    }

    /// Replace the quantales by copies carrying the given involutions.
    pub fn with_involutions(&self, star_a: Vec<usize>, star_b: Vec<usize>) -> Result<Self> {
        let a = Arc::new((*self.a).clone().with_involution(star_a)?);
        let b = Arc::new((*self.b).clone().with_involution(star_b)?);
        let rebase = |m: &ModuleAction, q: &Arc<Quantale>| {
            ModuleAction::new(m.side(), q.clone(), m.carrier().clone(), m.table().to_vec())
        };
        let x = Bimodule::new(rebase(self.x.left(), &a)?, rebase(self.x.right(), &b)?)?;
        let y = Bimodule::new(rebase(self.y.left(), &b)?, rebase(self.y.right(), &a)?)?;
        Self::new(x, y, self.pair_xy.clone(), self.pair_yx.clone())
    }

    /// The context with the roles of `(A, X)` and `(B, Y)` exchanged.
    pub fn swapped(&self) -> Self {
        MoritaContext {
            a: self.b.clone(),
            b: self.a.clone(),
            x: self.y.clone(),
            y: self.x.clone(),
            pair_xy: self.pair_yx.clone(),
            pair_yx: self.pair_xy.clone(),
        }
    }
}

/// The left operators `L_a(z) = p(a⊗z)` for every `a ∈ X⊗Y`, evaluated as the
/// join of `p` over the tuples of `a`.
fn left_operators(w_outer: &FiniteSupLattice, t: &MultiTensorLattice, f: impl Fn(usize, usize, usize) -> usize) -> Vec<Vec<usize>> {
    (0..t.len())
        .map(|a| {
            let tuples: Vec<Vec<usize>> = t.ideal(a).ones().map(|i| t.space().coords(i)).collect();
            w_outer
                .elements()
                .map(|z| w_outer.join_of(tuples.iter().map(|c| f(c[0], c[1], z))))
                .collect()
        })
        .collect()
}

/// `m·e` for each element `e` of an image subquantale, defined through any
/// tensor element `t` with image `e` as `act(m, t)`; fails when two such `t`
/// disagree.
fn induced_right_action(
    module: &Arc<FiniteSupLattice>,
    domain: &MultiTensorLattice,
    image: &ImageSubquantale,
    label: &str,
    act: impl Fn(usize, &[Vec<usize>]) -> usize,
) -> Result<Vec<usize>> {
    let ne = image.quantale().len();
    let mut table: Vec<Option<usize>> = vec![None; module.len() * ne];
    let mut witness: Vec<Option<usize>> = vec![None; ne];
    for t in 0..domain.len() {
        let e = image.element_of(t);
        let tuples: Vec<Vec<usize>> = domain.ideal(t).ones().map(|i| domain.space().coords(i)).collect();
        for m in module.elements() {
            let v = act(m, &tuples);
            match table[m * ne + e] {
                None => table[m * ne + e] = Some(v),
                Some(prev) if prev != v => {
                    let first = witness[e].expect("set with the table entry");
                    return Err(Error::ActionNotWellDefined(
                        label.to_string(),
                        format!(
                            "{} and {} give the same operator but act differently on {}",
                            domain.lattice().name(first),
                            domain.lattice().name(t),
                            module.name(m)
                        ),
                    ));
                }
                Some(_) => {}
            }
        }
        witness[e].get_or_insert(t);
    }
    Ok(table.into_iter().map(|v| v.expect("image index is surjective")).collect())
}

/// The context of a witness: `A = {L_a : a ∈ X⊗Y}` and `B = {R_b : b ∈ Y⊗X}`
/// acting by `L_a·x = p(a⊗x)`, `x·R_b = p(x⊗b)`, `R_b·y = q(b⊗y)`,
/// `y·L_a = q(y⊗a)`, with pairings `(x,y) = L_{x⊗y}` and `[y,x] = R_{y⊗x}`.
pub fn build_context_from_pair(w: &MoritaPairWitness, limits: &Limits) -> Result<MoritaContext> {
    build_parts(w, limits).map(|b| b.context)
}

/// A built context together with the partial tensors and the operator images
/// it was made from.
pub(crate) struct BuiltContext {
    pub context: MoritaContext,
    pub t_xy: MultiTensorLattice,
    pub t_yx: MultiTensorLattice,
    pub l: ImageSubquantale,
    pub r: ImageSubquantale,
}

pub(crate) fn build_parts(w: &MoritaPairWitness, limits: &Limits) -> Result<BuiltContext> {
    let report = check_pair_conditions(w);
    if !report.passed() {
        return Err(Error::ConditionsFailed(Box::new(report)));
    }
    let (x, y) = (w.x(), w.y());
    let t_xy = MultiTensorLattice::new(vec![x.clone(), y.clone()], limits)?;
    let t_yx = MultiTensorLattice::new(vec![y.clone(), x.clone()], limits)?;

    let l_ops = left_operators(x, &t_xy, |u, v, z| w.p_at(u, v, z));
    let r_ops = left_operators(y, &t_yx, |v, u, z| w.q_at(v, u, z));
    let l = image_subquantale(t_xy.lattice(), x, &l_ops, "L")?;
    let r = image_subquantale(t_yx.lattice(), y, &r_ops, "R")?;
    let a = l.quantale().clone();
    let b = r.quantale().clone();

    let x_left = ModuleAction::from_fn(Side::Left, a.clone(), x.clone(), |m, e| l.operator(e)[m])?;
    let x_right_table = induced_right_action(x, &t_yx, &r, "X", |m, tuples| {
        x.join_of(tuples.iter().map(|c| w.p_at(m, c[0], c[1])))
    })?;
    let x_right = ModuleAction::new(Side::Right, b.clone(), x.clone(), x_right_table)?;
    let y_left = ModuleAction::from_fn(Side::Left, b.clone(), y.clone(), |m, e| r.operator(e)[m])?;
    let y_right_table = induced_right_action(y, &t_xy, &l, "Y", |m, tuples| {
        y.join_of(tuples.iter().map(|c| w.q_at(m, c[0], c[1])))
    })?;
    let y_right = ModuleAction::new(Side::Right, a, y.clone(), y_right_table)?;

    let mut pair_xy = Vec::with_capacity(x.len() * y.len());
    let mut pair_yx = Vec::with_capacity(x.len() * y.len());
    for u in x.elements() {
        for v in y.elements() {
            pair_xy.push(l.element_of(t_xy.elem_tensor(&[u, v])));
        }
    }
    for v in y.elements() {
        for u in x.elements() {
            pair_yx.push(r.element_of(t_yx.elem_tensor(&[v, u])));
        }
    }
    let context = MoritaContext::new(
        Bimodule::new(x_left, x_right)?,
        Bimodule::new(y_left, y_right)?,
        pair_xy,
        pair_yx,
    )?;
    Ok(BuiltContext {
        context,
        t_xy,
        t_yx,
        l,
        r,
    })
}

/// Check ids for one side of a context (`X`, pairing `(−,−)`, quantale `A`).
fn check_side(r: &mut ConditionReport, ctx: &MoritaContext, [xs, ys, a_s]: [&str; 3]) {
    let (x, y) = (ctx.x.carrier().clone(), ctx.y.carrier().clone());
    let (a, b) = (ctx.a.clone(), ctx.b.clone());
    let (al, bl) = (a.carrier().clone(), b.carrier().clone());
    let pair = |u: usize, v: usize| ctx.pair_xy(u, v);
    let xl = ctx.x.left();
    let xr = ctx.x.right();
    let yl = ctx.y.left();
    let yr = ctx.y.right();
    let pname = format!("({xs},{ys})");

    let qa = is_m_regular(RegularityTarget::Quantale(&a));
    r.record(format!("m-regular({a_s})"), qa.describe(&al));
    r.record(
        format!("bimodule({xs})"),
        check_bimodule(&ctx.x).into_counterexample().map(|f| f.describe(&ctx.x)),
    );
    r.record(
        format!("m-regular({xs})"),
        is_m_regular(RegularityTarget::Bimodule(&ctx.x)).describe(&x),
    );

    let factors = vec![x.clone(), y.clone()];
    let mm = match is_multimorphism(&factors, &al, &ctx.pair_xy) {
        Ok(Verdict::Holds) => None,
        Ok(Verdict::Fails(f)) => Some(f.describe(&factors)),
        Err(e) => Some(e.to_string()),
    };
    r.record(format!("multimorphism{pname}"), mm);

    // (a·x, y) = a·(x, y) and (x, y·a) = (x, y)·a.
    let mut bimod = None;
    'outer: for e in al.elements() {
        for u in x.elements() {
            for v in y.elements() {
                if pair(xl.act(u, e), v) != a.mul(e, pair(u, v)) {
                    bimod = Some(format!(
                        "({}·{u}, {v}) ≠ {}·({u}, {v})",
                        al.name(e),
                        al.name(e),
                        u = x.name(u),
                        v = y.name(v)
                    ));
                    break 'outer;
                }
                if pair(u, yr.act(v, e)) != a.mul(pair(u, v), e) {
                    bimod = Some(format!(
                        "({u}, {v}·{e}) ≠ ({u}, {v})·{e}",
                        e = al.name(e),
                        u = x.name(u),
                        v = y.name(v)
                    ));
                    break 'outer;
                }
            }
        }
    }
    r.record(format!("bimodule-map{pname}"), bimod);

    // (x·b, y) = (x, b·y).
    let mut balanced = None;
    'outer: for e in bl.elements() {
        for u in x.elements() {
            for v in y.elements() {
                if pair(xr.act(u, e), v) != pair(u, yl.act(v, e)) {
                    balanced = Some(format!(
                        "({u}·{e}, {v}) ≠ ({u}, {e}·{v})",
                        e = bl.name(e),
                        u = x.name(u),
                        v = y.name(v)
                    ));
                    break 'outer;
                }
            }
        }
    }
    r.record(format!("balanced{pname}"), balanced);

    // (x₁, y)·x₂ = x₁·[y, x₂].
    let mut linking = None;
    'outer: for u1 in x.elements() {
        for v in y.elements() {
            for u2 in x.elements() {
                if xl.act(u2, pair(u1, v)) != xr.act(u1, ctx.pair_yx(v, u2)) {
                    linking = Some(format!(
                        "({u1}, {v})·{u2} ≠ {u1}·[{v}, {u2}]",
                        u1 = x.name(u1),
                        v = y.name(v),
                        u2 = x.name(u2)
                    ));
                    break 'outer;
                }
            }
        }
    }
    r.record(format!("linking({xs})"), linking);

    let mut image = FixedBitSet::with_capacity(al.len());
    for &v in &ctx.pair_xy {
        image.insert(v);
    }
    let closure = al.join_closure(&image);
    let missed: Vec<&str> = al.elements().filter(|&e| !closure.contains(e)).map(|e| al.name(e)).collect();
    r.record(
        format!("surjective({xs}⊗{ys})"),
        (!missed.is_empty()).then(|| format!("the lifted pairing misses {}", missed.join(", "))),
    );
}

/// All axioms of a Morita context: m-regularity of both quantales and both
/// bimodules, the bimodule laws, pairings that are multimorphisms and
/// bimodule maps, balance, the two linking identities and surjectivity of
/// the lifted pairings.
pub fn check_morita_context(ctx: &MoritaContext) -> ConditionReport {
    let mut r = ConditionReport::new();
    check_side(&mut r, ctx, ["X", "Y", "A"]);
    check_side(&mut r, &ctx.swapped(), ["Y", "X", "B"]);
    r
}

/// `p(x₁⊗y⊗x₂) = (x₁, y)·x₂` and `q(y₁⊗x⊗y₂) = [y₁, x]·y₂`, lifted through
/// the tensors.
pub fn extract_pair_from_context(ctx: &MoritaContext, limits: &Limits) -> Result<MoritaPairWitness> {
    let report = check_morita_context(ctx);
    if !report.passed() {
        return Err(Error::ContextInvalid(Box::new(report)));
    }
    let (x, y) = (ctx.x.carrier(), ctx.y.carrier());
    let mut p_gen = Vec::with_capacity(x.len() * x.len() * y.len());
    for u1 in x.elements() {
        for v in y.elements() {
            for u2 in x.elements() {
                p_gen.push(ctx.x.left().act(u2, ctx.pair_xy(u1, v)));
            }
        }
    }
    let mut q_gen = Vec::with_capacity(x.len() * y.len() * y.len());
    for v1 in y.elements() {
        for u in x.elements() {
            for v2 in y.elements() {
                q_gen.push(ctx.y.left().act(v2, ctx.pair_yx(v1, u)));
            }
        }
    }
    MoritaPairWitness::from_generators(x.clone(), y.clone(), &p_gen, &q_gen, limits).map_err(|e| match e {
        Error::NotSupMap(m) => Error::NotAMultimorphism(m),
        other => other,
    })
}
