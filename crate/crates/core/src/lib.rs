//! Morita pairs between m-regular quantales on finite sup-lattices.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: finite sup-lattices, sup-preserving maps, involutions and
//!   enumeration of lattices up to isomorphism.
//! - [`tensor`]: the sup-lattice tensor product of finitely many factors,
//!   realised as the lattice of multi-ideals of the product, together with
//!   multimorphisms and their lifts.
//! - [`quantale`]: quantales as tables, the operator quantale `Q(X)` and
//!   image subquantales.
//! - [`module`]: module and bimodule actions, essential parts, separation,
//!   m-regularity and conjugate bimodules.
//! - [`morita`]: the pair conditions on `p`/`q` witnesses, construction of a
//!   Morita context from a witness, extraction of a witness from a context,
//!   and the involutive (imprimitivity bimodule) case.
//! - [`census`]: exhaustive search for witnesses over small lattices.
//! - [`format`]: the `.lat`, `.qnt`, `.act`, `.map` and `.elem` text formats
//!   and context bundles.
//!
//! Every lattice here is finite, so joins of arbitrary families reduce to
//! binary joins plus the empty join (the bottom element). Every
//! "preserves joins" check in the crate includes the empty case.

pub mod census;
pub mod error;
pub mod format;
pub mod lattice;
pub mod limits;
pub mod module;
pub mod morita;
pub mod quantale;
pub mod report;
pub mod tensor;

pub use error::{Error, Result};
pub use lattice::{FiniteSupLattice, SupLatticeInvolution, SupMap};
pub use limits::Limits;
pub use module::{Bimodule, ModuleAction, Side};
pub use morita::{MoritaContext, MoritaPairWitness};
pub use report::ConditionReport;
pub use quantale::Quantale;
pub use tensor::{MultiTensorLattice, Multimorphism};

/// Outcome of a law check: either the law holds or a counterexample is returned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<C> {
    Holds,
    Fails(C),
}

impl<C> Verdict<C> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn counterexample(&self) -> Option<&C> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(c) => Some(c),
        }
    }

    pub fn into_counterexample(self) -> Option<C> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(c) => Some(c),
        }
    }
}

impl<C> From<Option<C>> for Verdict<C> {
    fn from(value: Option<C>) -> Self {
        match value {
            None => Verdict::Holds,
            Some(c) => Verdict::Fails(c),
        }
    }
}
