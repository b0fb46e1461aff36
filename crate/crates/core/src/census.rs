//! Exhaustive search for Morita pair witnesses over small lattices.
//!
//! For every pair of lattices (up to isomorphism) in the requested size
//! ranges, candidate `p` and `q` are the surjective trimorphisms. Each side
//! is filtered by its separation conditions before pairs are tested against
//! the two linking conditions. Surviving witnesses are reduced to one per
//! orbit under `Aut(X) × Aut(Y)` and re-verified end to end (context built,
//! context checked, witness extracted back) before they are emitted.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{automorphisms, enumerate_lattices, FiniteSupLattice};
use crate::limits::Limits;
use crate::morita::{
    build_context_from_pair, build_involutive_context, check_involutive_context, check_morita_context,
    derived_q_generators, extract_pair_from_context, linking_failure, Half, InvolutiveWitness,
    MoritaPairWitness,
};
use crate::tensor::{enumerate_trimorphisms, MultiTensorLattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    /// Witnesses `(X, Y, p, q)` checked against conditions 1–6.
    General,
    /// Witnesses `(X, p)` with `Y = X*`, checked against conditions a)–c).
    Involutive,
}

#[derive(Clone, Debug)]
pub struct CensusTask {
    pub x_sizes: std::ops::RangeInclusive<usize>,
    /// Ignored in involutive mode.
    pub y_sizes: std::ops::RangeInclusive<usize>,
    pub mode: CensusMode,
    pub limits: Limits,
    pub jobs: usize,
}

impl CensusTask {
    pub fn new(max_x: usize, max_y: usize, mode: CensusMode) -> Self {
        CensusTask {
            x_sizes: 1..=max_x,
            y_sizes: 1..=max_y,
            mode,
            limits: Limits::default(),
            jobs: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |r: &std::ops::RangeInclusive<usize>| *r.start() >= 1 && r.start() <= r.end();
        if !ok(&self.x_sizes) || (self.mode == CensusMode::General && !ok(&self.y_sizes)) {
            return Err(Error::ShapeMismatch(
                "census size bounds must satisfy 1 ≤ min ≤ max".into(),
            ));
        }
        if self.jobs == 0 || self.limits.max_tensor == 0 || self.limits.max_maps == 0 {
            return Err(Error::ShapeMismatch("worker count and caps must be positive".into()));
        }
        Ok(())
    }
}

/// One witness, up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CensusRecord {
    pub x_size: usize,
    pub y_size: usize,
    /// Canonical order id of `X` (`n:row/row/…`).
    pub x: String,
    /// Canonical order id of `Y`; the conjugate of `X` in involutive mode.
    pub y: String,
    /// `p` on generator triples, in tuple-space order.
    pub p: Vec<usize>,
    /// `q` on generator triples; absent in involutive mode.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<Vec<usize>>,
    pub l_size: usize,
    pub r_size: usize,
    /// Digest of the end-to-end verification report.
    pub report: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub lattice_pairs: usize,
    pub p_candidates: usize,
    pub q_candidates: usize,
    pub witnesses: usize,
    pub records: usize,
    /// Lattice pairs whose candidate space hit a resource cap.
    pub skipped: Vec<String>,
    /// Witnesses that failed end-to-end re-verification (not emitted).
    pub verification_failures: Vec<String>,
}

#[derive(Default)]
struct PairOutcome {
    p_candidates: usize,
    q_candidates: usize,
    witnesses: usize,
    records: Vec<CensusRecord>,
    skipped: Option<String>,
    failures: Vec<String>,
}

pub fn run_census(task: &CensusTask) -> Result<(Vec<CensusRecord>, CensusSummary)> {
    task.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(task.jobs)
        .build()
        .map_err(|e| Error::ShapeMismatch(format!("cannot start {} workers: {e}", task.jobs)))?;
    pool.install(|| run_in_pool(task))
}

fn lattices_in(range: &std::ops::RangeInclusive<usize>, limits: &Limits) -> Result<Vec<Arc<FiniteSupLattice>>> {
    let mut out = Vec::new();
    for n in range.clone() {
        out.extend(enumerate_lattices(n, limits)?.into_iter().map(Arc::new));
    }
    Ok(out)
}

fn run_in_pool(task: &CensusTask) -> Result<(Vec<CensusRecord>, CensusSummary)> {
    let xs = lattices_in(&task.x_sizes, &task.limits)?;
    let pairs: Vec<(Arc<FiniteSupLattice>, Arc<FiniteSupLattice>)> = match task.mode {
        CensusMode::General => {
            let ys = lattices_in(&task.y_sizes, &task.limits)?;
            xs.iter()
                .flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone())))
                .collect()
        }
        CensusMode::Involutive => xs.iter().map(|x| (x.clone(), Arc::new(x.conjugate()))).collect(),
    };
    let outcomes: Vec<PairOutcome> = pairs
        .par_iter()
        .map(|(x, y)| match task.mode {
            CensusMode::General => general_pair(x, y, &task.limits),
            CensusMode::Involutive => involutive_lattice(x, y, &task.limits),
        })
        .collect();

    let mut summary = CensusSummary {
        lattice_pairs: pairs.len(),
        ..Default::default()
    };
    let mut records = Vec::new();
    for o in outcomes {
        summary.p_candidates += o.p_candidates;
        summary.q_candidates += o.q_candidates;
        summary.witnesses += o.witnesses;
        summary.skipped.extend(o.skipped);
        summary.verification_failures.extend(o.failures);
        records.extend(o.records);
    }
    records.sort();
    summary.records = records.len();
    Ok((records, summary))
}

fn pair_label(x: &FiniteSupLattice, y: &FiniteSupLattice) -> String {
    format!("X={} Y={}", x.order_id(), y.order_id())
}

/// Apply `(α, β) ∈ Aut(O) × Aut(I)` to a table on `O×I×O → O`.
fn transport(gen: &[usize], no: usize, ni: usize, alpha: &[usize], beta: &[usize]) -> Vec<usize> {
    let mut out = vec![0; gen.len()];
    for o1 in 0..no {
        for i in 0..ni {
            for o2 in 0..no {
                let v = gen[(o1 * ni + i) * no + o2];
                out[(alpha[o1] * ni + beta[i]) * no + alpha[o2]] = alpha[v];
            }
        }
    }
    out
}

/// Separation-filtered surjective trimorphisms `O×I×O → O`.
fn side_candidates(
    outer: &Arc<FiniteSupLattice>,
    inner: &Arc<FiniteSupLattice>,
    limits: &Limits,
) -> Result<Vec<Vec<usize>>> {
    let all = enumerate_trimorphisms(outer, inner, outer, outer, true, limits.max_maps)?;
    Ok(all
        .into_par_iter()
        .filter_map(|m| {
            let h = Half::new(outer, inner, m.values(), "");
            (h.right_collision().is_none() && h.left_collision().is_none()).then(|| m.values().to_vec())
        })
        .collect())
}

fn general_pair(x: &Arc<FiniteSupLattice>, y: &Arc<FiniteSupLattice>, limits: &Limits) -> PairOutcome {
    let mut out = PairOutcome::default();
    let label = pair_label(x, y);
    let skip = |out: &mut PairOutcome, e: Error| {
        out.skipped = Some(format!("{label}: {e}"));
    };
    let tensors = MultiTensorLattice::new(vec![x.clone(), y.clone(), x.clone()], limits).and_then(|t1| {
        MultiTensorLattice::new(vec![y.clone(), x.clone(), y.clone()], limits).map(|t2| (Arc::new(t1), Arc::new(t2)))
    });
    let (t_xyx, t_yxy) = match tensors {
        Ok(t) => t,
        Err(e) => {
            skip(&mut out, e);
            return out;
        }
    };
    let ps = match side_candidates(x, y, limits) {
        Ok(v) => v,
        Err(e) => {
            skip(&mut out, e);
            return out;
        }
    };
    let qs = match side_candidates(y, x, limits) {
        Ok(v) => v,
        Err(e) => {
            skip(&mut out, e);
            return out;
        }
    };
    out.p_candidates = ps.len();
    out.q_candidates = qs.len();

    let found: Vec<(Vec<usize>, Vec<usize>)> = ps
        .par_iter()
        .flat_map_iter(|p| {
            let ph = Half::new(x, y, p, "p");
            qs.iter().filter_map(move |q| {
                let qh = Half::new(y, x, q, "q");
                (linking_failure(ph, qh).is_none() && linking_failure(qh, ph).is_none())
                    .then(|| (p.clone(), q.clone()))
            })
        })
        .collect();
    out.witnesses = found.len();

    let (ax, ay) = (automorphisms(x), automorphisms(y));
    let (nx, ny) = (x.len(), y.len());
    let canonical: BTreeSet<(Vec<usize>, Vec<usize>)> = found
        .into_iter()
        .map(|(p, q)| {
            let mut best = (p.clone(), q.clone());
            for alpha in &ax {
                for beta in &ay {
                    let cand = (transport(&p, nx, ny, alpha, beta), transport(&q, ny, nx, beta, alpha));
                    if cand < best {
                        best = cand;
                    }
                }
            }
            best
        })
        .collect();

    for (p, q) in canonical {
        match verify_general(&t_xyx, &t_yxy, &p, &q, limits) {
            Ok((l_size, r_size, report)) => out.records.push(CensusRecord {
                x_size: nx,
                y_size: ny,
                x: x.order_id(),
                y: y.order_id(),
                p,
                q: Some(q),
                l_size,
                r_size,
                report,
            }),
            Err(e) => out.failures.push(format!("{label} p={p:?} q={q:?}: {e}")),
        }
    }
    out
}

/// Build the context, check it, extract the witness back and compare.
fn verify_general(
    t_xyx: &Arc<MultiTensorLattice>,
    t_yxy: &Arc<MultiTensorLattice>,
    p: &[usize],
    q: &[usize],
    limits: &Limits,
) -> Result<(usize, usize, String)> {
    let w = MoritaPairWitness::from_generators_in(t_xyx.clone(), t_yxy.clone(), p, q)?;
    let ctx = build_context_from_pair(&w, limits)?;
    let report = check_morita_context(&ctx);
    if !report.passed() {
        return Err(Error::ContextInvalid(Box::new(report)));
    }
    let back = extract_pair_from_context(&ctx, limits)?;
    if back.p().values() != w.p().values() || back.q().values() != w.q().values() {
        return Err(Error::ShapeMismatch("extracted witness differs from the original".into()));
    }
    Ok((ctx.a().len(), ctx.b().len(), report.digest()))
}

fn involutive_lattice(x: &Arc<FiniteSupLattice>, x_star: &Arc<FiniteSupLattice>, limits: &Limits) -> PairOutcome {
    let mut out = PairOutcome::default();
    let label = format!("X={}", x.order_id());
    let t = match MultiTensorLattice::new(vec![x.clone(), x_star.clone(), x.clone()], limits) {
        Ok(t) => Arc::new(t),
        Err(e) => {
            out.skipped = Some(format!("{label}: {e}"));
            return out;
        }
    };
    let ps = match side_candidates(x, x_star, limits) {
        Ok(v) => v,
        Err(e) => {
            out.skipped = Some(format!("{label}: {e}"));
            return out;
        }
    };
    out.p_candidates = ps.len();
    let n = x.len();
    let found: Vec<Vec<usize>> = ps
        .into_par_iter()
        .filter(|p| {
            let q = derived_q_generators(n, p);
            linking_failure(Half::new(x, x_star, p, "p"), Half::new(x_star, x, &q, "q")).is_none()
        })
        .collect();
    out.witnesses = found.len();

    let ax = automorphisms(x);
    let canonical: BTreeSet<Vec<usize>> = found
        .into_iter()
        .map(|p| {
            ax.iter()
                .map(|alpha| transport(&p, n, n, alpha, alpha))
                .min()
                .expect("the identity is an automorphism")
        })
        .collect();

    for p in canonical {
        let verified = InvolutiveWitness::from_generators_in(t.clone(), &p).and_then(|w| {
            let ic = build_involutive_context(&w, limits)?;
            let report = check_involutive_context(&ic);
            if !report.passed() {
                return Err(Error::ContextInvalid(Box::new(report)));
            }
            Ok((ic.context.a().len(), ic.context.b().len(), report.digest()))
        });
        match verified {
            Ok((l_size, r_size, report)) => out.records.push(CensusRecord {
                x_size: n,
                y_size: n,
                x: x.order_id(),
                y: x_star.order_id(),
                p,
                q: None,
                l_size,
                r_size,
                report,
            }),
            Err(e) => out.failures.push(format!("{label} p={p:?}: {e}")),
        }
    }
    out
}

/// One JSON object per line.
pub fn write_records<W: Write>(mut out: W, records: &[CensusRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
