//! Morita pairs: the conditions on witnesses `(p, q)`, the context built
//! from a witness, the witness extracted from a context, and the involutive
//! case where `Y = X*` and `q` is determined by `p`.

mod conditions;
mod context;
mod involutive;
mod witness;

pub use conditions::{check_pair_conditions, check_pair_conditions_full};
pub use context::{build_context_from_pair, check_morita_context, extract_pair_from_context, MoritaContext};
pub use involutive::{
    build_involutive_context, check_imprimitivity, check_involutive_conditions, check_involutive_context,
    derive_q_from_p, involutive_pair_witness, ImprimitivityBimodule, InvolutiveContext, InvolutiveWitness,
};
pub use witness::MoritaPairWitness;

pub(crate) use conditions::{linking_failure, Half};
pub(crate) use involutive::derived_q_generators;

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::error::Error;
    use crate::lattice::FiniteSupLattice;
    use crate::limits::Limits;
    use crate::module::{is_m_regular, RegularityTarget};
    use crate::quantale::Quantale;

    fn chain(n: usize) -> Arc<FiniteSupLattice> {
        Arc::new(FiniteSupLattice::chain(n))
    }

    fn table(o: usize, i: usize, f: impl Fn(usize, usize, usize) -> usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(o * i * o);
        for a in 0..o {
            for b in 0..i {
                for c in 0..o {
                    out.push(f(a, b, c));
                }
            }
        }
        out
    }

    fn meet_witness() -> MoritaPairWitness {
        let min3 = |a: usize, b: usize, c: usize| a.min(b).min(c);
        MoritaPairWitness::from_generators(chain(2), chain(2), &table(2, 2, min3), &table(2, 2, min3), &Limits::default())
            .unwrap()
    }

    #[test]
    fn meet_witness_passes_and_builds_meet_context() {
        let w = meet_witness();
        let report = check_pair_conditions(&w);
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 8);
        let ctx = build_context_from_pair(&w, &Limits::default()).unwrap();
        let meet = Quantale::meet(chain(2)).unwrap();
        assert_eq!(ctx.a().table(), meet.table());
        assert_eq!(ctx.b().table(), meet.table());
        assert_eq!(ctx.x().left().table(), &[0, 0, 0, 1]);
        assert_eq!(ctx.x().right().table(), &[0, 0, 0, 1]);
        assert_eq!(ctx.pair_xy_table(), &[0, 0, 0, 1]);
        let cr = check_morita_context(&ctx);
        assert!(cr.passed(), "{cr}");
        assert!(is_m_regular(RegularityTarget::Quantale(ctx.a())).m_regular);
        let back = extract_pair_from_context(&ctx, &Limits::default()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn one_element_context_is_vacuous() {
        let w = MoritaPairWitness::from_generators(chain(1), chain(1), &[0], &[0], &Limits::default()).unwrap();
        assert!(check_pair_conditions(&w).passed());
        let ctx = build_context_from_pair(&w, &Limits::default()).unwrap();
        assert_eq!((ctx.a().len(), ctx.b().len()), (1, 1));
        assert!(check_morita_context(&ctx).passed());
        assert_eq!(extract_pair_from_context(&ctx, &Limits::default()).unwrap(), w);
    }

    #[test]
    fn non_surjective_p_is_reported() {
        // X = 3-chain, Y = 2, p(x₁⊗y⊗x₂) = x₁∧y∧x₂∧a.
        let p = table(3, 2, |a, b, c| a.min(c).min(1).min(b));
        let q = table(2, 3, |a, b, c| if b == 2 { a.min(c) } else { 0 });
        let w = MoritaPairWitness::from_generators(chain(3), chain(2), &p, &q, &Limits::default()).unwrap();
        let report = check_pair_conditions(&w);
        let s = report.get("surjective(p)").unwrap();
        assert!(!s.passed);
        assert_eq!(s.counterexample.as_deref(), Some("the image of p misses 1"));
        assert!(matches!(
            build_context_from_pair(&w, &Limits::default()),
            Err(Error::ConditionsFailed(_))
        ));
    }

    #[test]
    fn non_trimorphism_is_rejected() {
        // p(x₁⊗y⊗x₂) = x₁ ignores the empty join in the other slots.
        let p = table(2, 2, |a, _, _| a);
        let err = MoritaPairWitness::from_generators(chain(2), chain(2), &p, &p, &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::NotSupMap(_)));
    }

    #[test]
    fn perturbed_pairing_is_caught() {
        let ctx = build_context_from_pair(&meet_witness(), &Limits::default()).unwrap();
        let mut pair = ctx.pair_xy_table().to_vec();
        pair[3] = 0;
        let bad = MoritaContext::new(ctx.x().clone(), ctx.y().clone(), pair, ctx.pair_yx_table().to_vec()).unwrap();
        let report = check_morita_context(&bad);
        assert!(!report.passed());
        assert!(!report.check_passed("linking(X)"));
        assert!(!report.check_passed("surjective(X⊗Y)"));
        assert!(matches!(
            extract_pair_from_context(&bad, &Limits::default()),
            Err(Error::ContextInvalid(_))
        ));
    }

    #[test]
    fn generator_and_full_checks_agree_on_small_tables() {
        // All trimorphism pairs over (2, 2) and a few failing ones over (3, 2).
        let limits = Limits::default();
        let two = chain(2);
        let tris = crate::tensor::enumerate_trimorphisms(&two, &two, &two, &two, false, 1000).unwrap();
        for p in &tris {
            for q in &tris {
                let w = MoritaPairWitness::from_generators(two.clone(), two.clone(), p.values(), q.values(), &limits)
                    .unwrap();
                let g = check_pair_conditions(&w);
                let f = check_pair_conditions_full(&w, &limits).unwrap();
                for (a, b) in g.checks.iter().zip(&f.checks) {
                    assert_eq!((&a.id, a.passed), (&b.id, b.passed));
                }
            }
        }
    }

    #[test]
    fn involutive_meet_on_two() {
        let limits = Limits::default();
        let w = InvolutiveWitness::from_generators(chain(2), &table(2, 2, |a, b, c| a.min(b).min(c)), &limits).unwrap();
        assert!(check_involutive_conditions(&w).passed());
        let q = derive_q_from_p(&w, &limits).unwrap();
        assert_eq!(q.cod().names(), &["0*".to_string(), "1*".to_string()]);
        let ic = build_involutive_context(&w, &limits).unwrap();
        assert_eq!(ic.context.a().involution(), Some(&[0usize, 1][..]));
        assert_eq!(ic.context.a().table(), Quantale::meet(chain(2)).unwrap().table());
        assert_eq!(ic.imprimitivity.left_inner_table(), &[0, 0, 0, 1]);
        let report = check_involutive_context(&ic);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn collapsed_p_fails_b() {
        // p(x₁⊗x₂*⊗x₃) = x₁∧x₂∧c(x₃) on the 3-chain, with c sending a to 0.
        let collapse = |x: usize| if x == 1 { 0 } else { x };
        let p = table(3, 3, |a, b, c| a.min(b).min(collapse(c)));
        let w = InvolutiveWitness::from_generators(chain(3), &p, &Limits::default()).unwrap();
        let report = check_involutive_conditions(&w);
        assert!(report.check_passed("surjective(p)"));
        let b = report.get("b").unwrap();
        assert!(!b.passed);
        assert_eq!(b.counterexample.as_deref(), Some("p(−⊗0) = p(−⊗a) but 0 ≠ a"));
    }
}
