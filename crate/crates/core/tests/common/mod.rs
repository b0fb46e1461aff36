//! Brute-force oracles and the acceptance criteria, shared by the integration
//! tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use morita_core::census::{run_census, write_records, CensusMode, CensusRecord, CensusTask};
use morita_core::lattice::{enumerate_lattices, enumerate_sup_maps, is_isomorphic};
use morita_core::morita::{
    build_context_from_pair, build_involutive_context, check_involutive_conditions,
    check_involutive_context, check_morita_context, check_pair_conditions, check_pair_conditions_full,
    extract_pair_from_context, involutive_pair_witness, InvolutiveWitness,
};
use morita_core::quantale::endo_quantale;
use morita_core::tensor::{enumerate_trimorphisms, tensor_product, MultiTensorLattice};
use morita_core::{
    Bimodule, Error, FiniteSupLattice, Limits, ModuleAction, MoritaContext, MoritaPairWitness,
    Quantale, Side,
};

pub type Outcome = Result<String, String>;

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// Lattices on up to `limit` elements, sizes in ascending order.
pub fn small_lattices(limit: usize) -> Vec<Arc<FiniteSupLattice>> {
    (1..=limit)
        .flat_map(|n| enumerate_lattices(n, &Limits::default()).unwrap())
        .map(Arc::new)
        .collect()
}

/// Rebuild a lattice from its `n:row/row/…` order id.
pub fn lattice_from_id(id: &str) -> FiniteSupLattice {
    let (n, rows) = id.split_once(':').unwrap();
    let n: usize = n.parse().unwrap();
    let leq: Vec<Vec<bool>> = rows
        .split('/')
        .map(|r| r.chars().map(|c| c == '1').collect())
        .collect();
    FiniteSupLattice::from_leq(names(n), &leq).unwrap()
}

// ---- naive lattice generator -------------------------------------------

fn naive_join(leq: &[Vec<bool>], a: usize, b: usize) -> Option<usize> {
    let n = leq.len();
    let ubs: Vec<usize> = (0..n).filter(|&u| leq[a][u] && leq[b][u]).collect();
    ubs.iter().copied().find(|&u| ubs.iter().all(|&v| leq[u][v]))
}

fn is_lattice_order(leq: &[Vec<bool>]) -> bool {
    let n = leq.len();
    for i in 0..n {
        for j in 0..n {
            if i != j && leq[i][j] && leq[j][i] {
                return false;
            }
            for k in 0..n {
                if leq[i][j] && leq[j][k] && !leq[i][k] {
                    return false;
                }
            }
        }
    }
    (0..n).all(|a| (0..n).all(|b| naive_join(leq, a, b).is_some()))
}

/// Lattices of size `n` up to isomorphism, by filtering every order on the
/// middle elements (bottom and top pinned) and minimising over permutations.
pub fn naive_lattice_count(n: usize) -> usize {
    if n <= 2 {
        return 1;
    }
    let m = n - 2;
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let perms = permutations(m);
    let mut seen = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
            leq[0][i] = true;
            leq[i][n - 1] = true;
        }
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                leq[i + 1][j + 1] = true;
            }
        }
        if !is_lattice_order(&leq) {
            continue;
        }
        let key = perms
            .iter()
            .map(|perm| {
                let pos = |i: usize| if i == 0 || i == n - 1 { i } else { perm[i - 1] + 1 };
                let mut bits = vec![false; n * n];
                for i in 0..n {
                    for j in 0..n {
                        bits[pos(i) * n + pos(j)] = leq[i][j];
                    }
                }
                bits
            })
            .min()
            .unwrap();
        seen.insert(key);
    }
    seen.len()
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

// ---- brute-force maps ---------------------------------------------------

/// Every function `[0, dom) → [0, cod)` as a value table.
pub fn all_functions(dom: usize, cod: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (cod as u64).pow(dom as u32);
    (0..total).map(move |mut k| {
        let mut v = vec![0; dom];
        for slot in v.iter_mut().rev() {
            *slot = (k % cod as u64) as usize;
            k /= cod as u64;
        }
        v
    })
}

fn order_matrix(l: &FiniteSupLattice) -> Vec<Vec<bool>> {
    l.elements().map(|a| l.elements().map(|b| l.leq(a, b)).collect()).collect()
}

/// Join-preserving maps found by filtering all functions; joins recomputed from the order.
pub fn brute_sup_maps(x: &FiniteSupLattice, y: &FiniteSupLattice) -> Vec<Vec<usize>> {
    let (lx, ly) = (order_matrix(x), order_matrix(y));
    let bottom = |leq: &[Vec<bool>]| (0..leq.len()).find(|&b| leq[b].iter().all(|&t| t)).unwrap();
    let (bx, by) = (bottom(&lx), bottom(&ly));
    all_functions(x.len(), y.len())
        .filter(|f| {
            f[bx] == by
                && x.elements().all(|a| {
                    x.elements().all(|b| {
                        Some(f[naive_join(&lx, a, b).unwrap()]) == naive_join(&ly, f[a], f[b])
                    })
                })
        })
        .collect()
}

/// Slotwise join preservation (including the empty join) of a binary table.
pub fn brute_is_bimorphism(x: &FiniteSupLattice, y: &FiniteSupLattice, z: &FiniteSupLattice, f: &[usize]) -> bool {
    let at = |a: usize, b: usize| f[a * y.len() + b];
    x.elements().all(|a| at(a, y.bottom()) == z.bottom())
        && y.elements().all(|b| at(x.bottom(), b) == z.bottom())
        && x.elements().all(|a| {
            y.elements().all(|b| {
                x.elements().all(|a2| at(x.join(a, a2), b) == z.join(at(a, b), at(a2, b)))
                    && y.elements().all(|b2| at(a, y.join(b, b2)) == z.join(at(a, b), at(a, b2)))
            })
        })
}

/// Slotwise join preservation over any number of factors, by direct iteration.
pub fn brute_is_multimorphism(factors: &[&FiniteSupLattice], target: &FiniteSupLattice, f: &[usize]) -> bool {
    let dims: Vec<usize> = factors.iter().map(|l| l.len()).collect();
    let total: usize = dims.iter().product();
    let coords = |mut t: usize| {
        let mut c = vec![0; dims.len()];
        for (slot, &d) in c.iter_mut().zip(&dims).rev() {
            *slot = t % d;
            t /= d;
        }
        c
    };
    let index = |c: &[usize]| c.iter().zip(&dims).fold(0, |acc, (&v, &d)| acc * d + v);
    (0..total).all(|t| {
        let c = coords(t);
        (0..dims.len()).all(|k| {
            let mut bottom = c.clone();
            bottom[k] = factors[k].bottom();
            f[index(&bottom)] == target.bottom()
                && factors[k].elements().all(|b| {
                    let mut other = c.clone();
                    other[k] = b;
                    let mut joined = c.clone();
                    joined[k] = factors[k].join(c[k], b);
                    f[index(&joined)] == target.join(f[t], f[index(&other)])
                })
        })
    })
}

/// Number of multi-ideals of the product, by filtering all subsets of tuples.
pub fn brute_multi_ideal_count(factors: &[&FiniteSupLattice]) -> usize {
    let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let total: usize = dims.iter().product();
    assert!(total <= 16, "too many tuples for subset enumeration");
    let coords = |mut t: usize| {
        let mut c = vec![0; dims.len()];
        for (slot, &d) in c.iter_mut().zip(&dims).rev() {
            *slot = t % d;
            t /= d;
        }
        c
    };
    let index = |c: &[usize]| c.iter().zip(&dims).fold(0, |acc, (&v, &d)| acc * d + v);
    let tuples: Vec<Vec<usize>> = (0..total).map(coords).collect();
    (0u32..(1 << total))
        .filter(|&set| {
            let has = |t: usize| set >> t & 1 == 1;
            tuples.iter().enumerate().all(|(t, c)| {
                let degenerate = c.iter().zip(factors).any(|(&v, f)| v == f.bottom());
                if degenerate && !has(t) {
                    return false;
                }
                if !has(t) {
                    return true;
                }
                tuples.iter().enumerate().all(|(s, d)| {
                    let below = d.iter().zip(c).zip(factors).all(|((&a, &b), f)| f.leq(a, b));
                    if below && !has(s) {
                        return false;
                    }
                    let differ: Vec<usize> = (0..dims.len()).filter(|&k| c[k] != d[k]).collect();
                    if differ.len() == 1 && has(s) {
                        let k = differ[0];
                        let mut j = c.clone();
                        j[k] = factors[k].join(c[k], d[k]);
                        return has(index(&j));
                    }
                    true
                })
            })
        })
        .count()
}

// ---- hand-built contexts ------------------------------------------------

fn chain2_meet() -> Arc<Quantale> {
    Arc::new(Quantale::meet(Arc::new(FiniteSupLattice::chain(2))).unwrap())
}

/// `(2, ∧)` acting on itself, paired by the meet.
pub fn meet_context() -> MoritaContext {
    let q = chain2_meet();
    let x = Bimodule::regular(q.clone());
    let y = Bimodule::regular(q);
    let pair = vec![0, 0, 0, 1];
    MoritaContext::new(x, y, pair.clone(), pair).unwrap()
}

pub fn one_point_context() -> MoritaContext {
    let one = Arc::new(FiniteSupLattice::chain(1));
    let q = Arc::new(Quantale::meet(one).unwrap());
    MoritaContext::new(Bimodule::regular(q.clone()), Bimodule::regular(q), vec![0], vec![0]).unwrap()
}

/// `Q(X)` and `2` linked through `X` and its join-preserving functionals:
/// `(x, φ) ↦ (z ↦ x if φ(z) = 1 else 0)` and `(φ, x) ↦ φ(x)`.
pub fn operator_context(x: FiniteSupLattice) -> MoritaContext {
    let limits = Limits::default();
    let x = Arc::new(x);
    let two = Arc::new(FiniteSupLattice::chain(2));
    let endo = endo_quantale(&x, &limits).unwrap();
    let a = endo.quantale().clone();
    let ops: Vec<Vec<usize>> = endo.operators().iter().map(|f| f.values().to_vec()).collect();
    let op_index = |v: &[usize]| ops.iter().position(|o| o == v).unwrap();
    let b = chain2_meet();

    let funcs: Vec<Vec<usize>> = enumerate_sup_maps(&x, &two, limits.max_maps)
        .unwrap()
        .iter()
        .map(|f| f.values().to_vec())
        .collect();
    let fn_index = |v: &[usize]| funcs.iter().position(|f| f == v).unwrap();
    let leq: Vec<Vec<bool>> = funcs
        .iter()
        .map(|f| funcs.iter().map(|g| f.iter().zip(g).all(|(u, v)| u <= v)).collect())
        .collect();
    let y = Arc::new(
        FiniteSupLattice::from_leq((0..funcs.len()).map(|i| format!("f{i}")).collect(), &leq).unwrap(),
    );
    let zero_fn = fn_index(&vec![0; x.len()]);

    let xl = ModuleAction::from_fn(Side::Left, a.clone(), x.clone(), |m, f| ops[f][m]).unwrap();
    let xr = ModuleAction::from_fn(Side::Right, b.clone(), x.clone(), |m, s| if s == 1 { m } else { x.bottom() }).unwrap();
    let yl = ModuleAction::from_fn(Side::Left, b.clone(), y.clone(), |m, s| if s == 1 { m } else { zero_fn }).unwrap();
    let yr = ModuleAction::from_fn(Side::Right, a.clone(), y.clone(), |m, f| {
        let composed: Vec<usize> = x.elements().map(|z| funcs[m][ops[f][z]]).collect();
        fn_index(&composed)
    })
    .unwrap();
    let xb = Bimodule::new(xl, xr).unwrap();
    let yb = Bimodule::new(yl, yr).unwrap();
    let mut pair_xy = Vec::new();
    for u in x.elements() {
        for phi in &funcs {
            let op: Vec<usize> = x.elements().map(|z| if phi[z] == 1 { u } else { x.bottom() }).collect();
            pair_xy.push(op_index(&op));
        }
    }
    let mut pair_yx = Vec::new();
    for phi in &funcs {
        for u in x.elements() {
            pair_yx.push(phi[u]);
        }
    }
    MoritaContext::new(xb, yb, pair_xy, pair_yx).unwrap()
}

fn perturb_yx(ctx: &MoritaContext, idx: usize, value: usize) -> MoritaContext {
    let mut yx = ctx.pair_yx_table().to_vec();
    yx[idx] = value;
    MoritaContext::new(ctx.x().clone(), ctx.y().clone(), ctx.pair_xy_table().to_vec(), yx).unwrap()
}

fn perturb_xy(ctx: &MoritaContext, idx: usize, value: usize) -> MoritaContext {
    let mut xy = ctx.pair_xy_table().to_vec();
    xy[idx] = value;
    MoritaContext::new(ctx.x().clone(), ctx.y().clone(), xy, ctx.pair_yx_table().to_vec()).unwrap()
}

/// `(name, context, valid)`.
pub fn context_fixtures() -> Vec<(&'static str, MoritaContext, bool)> {
    let meet = meet_context();
    let chain = operator_context(FiniteSupLattice::chain(3));
    let diamond = operator_context(FiniteSupLattice::diamond());
    let top_fn = chain.y().carrier().top();
    let x_top = chain.x().carrier().top();
    let nx = chain.x().carrier().len();
    vec![
        ("one point", one_point_context(), true),
        ("(2, meet)", meet.clone(), true),
        ("Q(3-chain) with 2", chain.clone(), true),
        ("Q(2x2) with 2", diamond, true),
        ("(2, meet) with [1, 1] = 0", perturb_xy(&meet, 3, 0), false),
        ("(2, meet) with (1, 1) = 0 on one side", perturb_yx(&meet, 3, 0), false),
        ("Q(3-chain) with [top, 1] = 0", perturb_yx(&chain, top_fn * nx + x_top, 0), false),
        ("Q(3-chain) with a constant pairing", {
            let zero = chain.a().carrier().bottom();
            let n = chain.pair_xy_table().len();
            MoritaContext::new(chain.x().clone(), chain.y().clone(), vec![zero; n], chain.pair_yx_table().to_vec()).unwrap()
        }, false),
    ]
}

// ---- acceptance criteria ------------------------------------------------

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))?;
    }
    Ok(format!("{detail}; {elapsed:.2?}"))
}

/// SupMaps out of `X ⊗ Y` correspond bijectively to bimorphisms, for |X|,|Y|,|Z| ≤ 3.
pub fn tensor_universal_property() -> Outcome {
    timed(Some(Duration::from_secs(60)), || {
        let lats = small_lattices(3);
        let mut triples = 0;
        for x in &lats {
            for y in &lats {
                let t = tensor_product(&[x.clone(), y.clone()], &Limits::default()).map_err(|e| e.to_string())?;
                for z in &lats {
                    let maps = brute_sup_maps(t.lattice(), z);
                    let restricted: BTreeSet<Vec<usize>> = maps
                        .iter()
                        .map(|g| {
                            (0..x.len() * y.len())
                                .map(|i| g[t.elem_tensor(&[i / y.len(), i % y.len()])])
                                .collect()
                        })
                        .collect();
                    let bimorphisms: BTreeSet<Vec<usize>> = all_functions(x.len() * y.len(), z.len())
                        .filter(|f| brute_is_bimorphism(x, y, z, f))
                        .collect();
                    ensure(restricted.len() == maps.len(), || {
                        format!("restriction not injective for {} ⊗ {} → {}", x.order_id(), y.order_id(), z.order_id())
                    })?;
                    ensure(restricted == bimorphisms, || {
                        format!("restriction not onto the bimorphisms for {} ⊗ {} → {}", x.order_id(), y.order_id(), z.order_id())
                    })?;
                    for b in &bimorphisms {
                        let f = morita_core::Multimorphism::new(vec![x.clone(), y.clone()], z.clone(), b.clone())
                            .map_err(|e| e.to_string())?;
                        let lifted = t.lift(&f).map_err(|e| e.to_string())?;
                        ensure(t.restrict_to_generators(&lifted) == *b, || "lift does not restrict back".into())?;
                    }
                    triples += 1;
                }
            }
        }
        Ok(format!("{triples} triples"))
    })
}

/// `2 ⊗ X ≅ X` for |X| ≤ 5, `|2⊗2| = 2`, `|3⊗3| = 6`, sizes confirmed by subset enumeration.
pub fn tensor_unit_and_sizes() -> Outcome {
    timed(None, || {
        let limits = Limits::default();
        let two = Arc::new(FiniteSupLattice::chain(2));
        let lats = small_lattices(5);
        for x in &lats {
            let t = tensor_product(&[two.clone(), x.clone()], &limits).map_err(|e| e.to_string())?;
            ensure(is_isomorphic(t.lattice(), x), || format!("2 ⊗ {} is not isomorphic to it", x.order_id()))?;
            let brute = brute_multi_ideal_count(&[&two, x]);
            ensure(brute == t.len(), || format!("|2 ⊗ {}| = {} but subsets give {brute}", x.order_id(), t.len()))?;
        }
        let three = Arc::new(FiniteSupLattice::chain(3));
        for (l, expected) in [(&two, 2), (&three, 6)] {
            let t = tensor_product(&[l.clone(), l.clone()], &limits).map_err(|e| e.to_string())?;
            let brute = brute_multi_ideal_count(&[l, l]);
            ensure(t.len() == expected && brute == expected, || {
                format!("|{0}⊗{0}| = {1}, subsets {brute}, expected {expected}", l.len(), t.len())
            })?;
        }
        Ok(format!("{} lattices, |2⊗2| = 2, |3⊗3| = 6", lats.len()))
    })
}

pub fn census(max: usize, mode: CensusMode, jobs: usize) -> Vec<CensusRecord> {
    let mut task = CensusTask::new(max, max, mode);
    task.jobs = jobs;
    let (records, summary) = run_census(&task).unwrap();
    assert!(summary.skipped.is_empty(), "{:?}", summary.skipped);
    assert!(summary.verification_failures.is_empty(), "{:?}", summary.verification_failures);
    records
}

fn record_witness(r: &CensusRecord) -> MoritaPairWitness {
    let x = Arc::new(lattice_from_id(&r.x));
    let y = Arc::new(lattice_from_id(&r.y));
    MoritaPairWitness::from_generators(x, y, &r.p, r.q.as_ref().unwrap(), &Limits::default()).unwrap()
}

/// Every census witness at sizes ≤ 3 builds a context passing every check.
pub fn context_soundness() -> Outcome {
    timed(Some(Duration::from_secs(600)), || {
        let records = census(3, CensusMode::General, 1);
        for r in &records {
            let w = record_witness(r);
            let pair = check_pair_conditions(&w);
            ensure(pair.passed(), || format!("{} / {}: witness fails\n{pair}", r.x, r.y))?;
            let ctx = build_context_from_pair(&w, &Limits::default()).map_err(|e| e.to_string())?;
            let report = check_morita_context(&ctx);
            ensure(report.passed(), || format!("{} / {}: context fails\n{report}", r.x, r.y))?;
            let regular = report.checks.iter().filter(|c| c.id.starts_with("m-regular(")).count();
            ensure(regular == 4, || format!("expected 4 m-regularity checks, found {regular}"))?;
        }
        Ok(format!("{} witnesses", records.len()))
    })
}

/// Extraction after construction gives back the same tables.
pub fn round_trip() -> Outcome {
    timed(None, || {
        let records = census(3, CensusMode::General, 1);
        for r in &records {
            let w = record_witness(r);
            let ctx = build_context_from_pair(&w, &Limits::default()).map_err(|e| e.to_string())?;
            let back = extract_pair_from_context(&ctx, &Limits::default()).map_err(|e| e.to_string())?;
            ensure(back.p().values() == w.p().values() && back.q().values() == w.q().values(), || {
                format!("{} / {}: extracted pair differs", r.x, r.y)
            })?;
        }
        Ok(format!("{} witnesses", records.len()))
    })
}

/// Extraction succeeds exactly on the valid fixtures, and what it extracts passes 1–6.
pub fn converse_on_fixtures() -> Outcome {
    timed(None, || {
        let fixtures = context_fixtures();
        for (name, ctx, valid) in &fixtures {
            match extract_pair_from_context(ctx, &Limits::default()) {
                Ok(w) => {
                    ensure(*valid, || format!("{name}: extraction accepted an invalid context"))?;
                    let report = check_pair_conditions(&w);
                    ensure(report.passed(), || format!("{name}: extracted pair fails\n{report}"))?;
                }
                Err(Error::ContextInvalid(report)) => {
                    ensure(!*valid, || format!("{name}: valid context rejected\n{report}"))?;
                }
                Err(e) => return Err(format!("{name}: {e}")),
            }
        }
        let valid = fixtures.iter().filter(|f| f.2).count();
        Ok(format!("{valid} valid, {} invalid fixtures", fixtures.len() - valid))
    })
}

/// a)–c) hold for `p` exactly when the derived pair passes 1–6, over every
/// trimorphism `X ⊗ X* ⊗ X → X` with |X| ≤ 3; passing ones build well-defined stars.
pub fn involutive_equivalence() -> Outcome {
    timed(None, || {
        let limits = Limits::default();
        let (mut total, mut passing, mut star_alarms) = (0, 0, 0);
        for x in small_lattices(3) {
            let xs = Arc::new(x.conjugate());
            let t = Arc::new(MultiTensorLattice::new(vec![x.clone(), xs.clone(), x.clone()], &limits).map_err(|e| e.to_string())?);
            for p in enumerate_trimorphisms(&x, &xs, &x, &x, false, limits.max_maps).map_err(|e| e.to_string())? {
                total += 1;
                let w = InvolutiveWitness::from_generators_in(t.clone(), p.values()).map_err(|e| e.to_string())?;
                let abc = check_involutive_conditions(&w);
                let pair = involutive_pair_witness(&w, &limits).map_err(|e| e.to_string())?;
                let six = check_pair_conditions(&pair);
                ensure(abc.passed() == six.passed(), || {
                    format!("{}: p = {:?} gives a)-c) {} but 1-6 {}", x.order_id(), p.values(), abc.digest(), six.digest())
                })?;
                if !abc.passed() {
                    continue;
                }
                passing += 1;
                match build_involutive_context(&w, &limits) {
                    Ok(ic) => {
                        let report = check_involutive_context(&ic);
                        ensure(report.passed(), || format!("{}: involutive context fails\n{report}", x.order_id()))?;
                    }
                    Err(Error::StarNotWellDefined { .. }) => star_alarms += 1,
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
        ensure(star_alarms == 0, || format!("{star_alarms} StarNotWellDefined alarms"))?;
        Ok(format!("{total} maps, {passing} passing, 0 star alarms"))
    })
}

/// Generator-level and full-domain checks agree on every pair of trimorphisms
/// whose triple tensors have at most 12 elements.
pub fn generator_reduction() -> Outcome {
    timed(None, || {
        let limits = Limits::default();
        let (mut instances, mut pairs) = (0, 0);
        let lats = small_lattices(4);
        for x in &lats {
            for y in &lats {
                let txyx = MultiTensorLattice::new(vec![x.clone(), y.clone(), x.clone()], &limits).map_err(|e| e.to_string())?;
                let tyxy = MultiTensorLattice::new(vec![y.clone(), x.clone(), y.clone()], &limits).map_err(|e| e.to_string())?;
                if txyx.len() > 12 || tyxy.len() > 12 {
                    continue;
                }
                instances += 1;
                let (txyx, tyxy) = (Arc::new(txyx), Arc::new(tyxy));
                let ps = enumerate_trimorphisms(x, y, x, x, false, limits.max_maps).map_err(|e| e.to_string())?;
                let qs = enumerate_trimorphisms(y, x, y, y, false, limits.max_maps).map_err(|e| e.to_string())?;
                for p in &ps {
                    for q in &qs {
                        let w = MoritaPairWitness::from_generators_in(txyx.clone(), tyxy.clone(), p.values(), q.values())
                            .map_err(|e| e.to_string())?;
                        let gen = check_pair_conditions(&w);
                        let full = check_pair_conditions_full(&w, &limits).map_err(|e| e.to_string())?;
                        for (g, f) in gen.checks.iter().zip(&full.checks) {
                            ensure(g.id == f.id && g.passed == f.passed, || {
                                format!(
                                    "{} / {}: check {} generator {} full {} (p = {:?}, q = {:?})",
                                    x.order_id(), y.order_id(), g.id, g.passed, f.passed, p.values(), q.values()
                                )
                            })?;
                        }
                        ensure(gen.checks.len() == full.checks.len(), || "report lengths differ".into())?;
                        pairs += 1;
                    }
                }
            }
        }
        Ok(format!("{instances} lattice pairs, {pairs} (p, q) pairs"))
    })
}

/// Lattice counts from both generators, and operator quantale sizes by brute force.
pub fn enumeration_oracles() -> Outcome {
    timed(None, || {
        let expected = [1, 1, 1, 2, 5, 15];
        for (i, &e) in expected.iter().enumerate() {
            let n = i + 1;
            let canonical = enumerate_lattices(n, &Limits::default()).map_err(|e| e.to_string())?.len();
            let naive = naive_lattice_count(n);
            ensure(canonical == e && naive == e, || format!("n = {n}: canonical {canonical}, naive {naive}, expected {e}"))?;
        }
        let two = FiniteSupLattice::chain(2);
        let cases = [
            ("2", two.clone(), 2),
            ("3-chain", FiniteSupLattice::chain(3), 6),
            ("2x2", FiniteSupLattice::product(&two, &two), 16),
        ];
        for (name, l, e) in cases {
            let brute = brute_sup_maps(&l, &l).len();
            let q = endo_quantale(&Arc::new(l), &Limits::default()).map_err(|e| e.to_string())?.len();
            ensure(brute == e && q == e, || format!("|Q({name})|: brute {brute}, enumerated {q}, expected {e}"))?;
        }
        Ok("counts 1, 1, 1, 2, 5, 15; |Q| = 2, 6, 16".into())
    })
}

fn census_bytes(task: &CensusTask) -> Result<(Vec<CensusRecord>, Vec<u8>), String> {
    let (records, summary) = run_census(task).map_err(|e| e.to_string())?;
    ensure(summary.verification_failures.is_empty() && summary.skipped.is_empty(), || format!("{summary:?}"))?;
    let mut out = Vec::new();
    write_records(&mut out, &records).map_err(|e| e.to_string())?;
    Ok((records, out))
}

/// One witness at |X| = |Y| = 2, one involutive witness on 2, and output
/// independent of the worker count.
pub fn census_baseline() -> Outcome {
    timed(Some(Duration::from_secs(5)), || {
        let mut task = CensusTask::new(2, 2, CensusMode::General);
        task.x_sizes = 2..=2;
        task.y_sizes = 2..=2;
        let (general, _) = census_bytes(&task)?;
        ensure(general.len() == 1, || format!("{} general records at 2 × 2", general.len()))?;
        let meet = vec![0, 0, 0, 0, 0, 0, 0, 1];
        let r = &general[0];
        ensure(r.p == meet && r.q.as_ref() == Some(&meet) && r.l_size == 2 && r.r_size == 2, || {
            format!("unexpected record {r:?}")
        })?;

        let mut task = CensusTask::new(2, 2, CensusMode::Involutive);
        task.x_sizes = 2..=2;
        let (involutive, _) = census_bytes(&task)?;
        ensure(involutive.len() == 1, || format!("{} involutive records on 2", involutive.len()))?;

        for mode in [CensusMode::General, CensusMode::Involutive] {
            let mut task = CensusTask::new(3, 3, mode);
            let (_, one) = census_bytes(&task)?;
            task.jobs = 4;
            let (_, four) = census_bytes(&task)?;
            ensure(one == four, || format!("{mode:?} output differs between 1 and 4 workers"))?;
        }
        Ok("1 general, 1 involutive, identical output for 1 and 4 workers".into())
    })
}

pub type Criterion = (&'static str, &'static str, fn() -> Outcome);

pub fn criteria() -> Vec<Criterion> {
    vec![
        ("1", "tensor universal property", tensor_universal_property),
        ("2", "tensor unit and sizes", tensor_unit_and_sizes),
        ("3", "contexts from census witnesses pass every check", context_soundness),
        ("4", "build then extract reproduces p and q", round_trip),
        ("5", "extraction on hand-built contexts", converse_on_fixtures),
        ("6", "involutive conditions match conditions 1-6", involutive_equivalence),
        ("7", "generator checks agree with full-domain checks", generator_reduction),
        ("8", "enumeration oracles", enumeration_oracles),
        ("9", "census baseline and determinism", census_baseline),
    ]
}
