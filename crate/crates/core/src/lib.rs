//! Exact computations with finite categories, marked categories, finite
//! bicategories and the bicategory of correspondences (spans with a marked
//! wrong-way leg).
//!
//! The crate is organised bottom-up:
//!
//! * [`fincat`]: finite categories, functors, natural transformations, limits
//!   with canonical choices, comma and functor categories;
//! * [`marked`]: markings, base change and marked comma categories;
//! * [`twocat`]: a common interface for 2-dimensional calculations, with the
//!   strict 2-category of finite categories as one instance;
//! * [`adjoint`]: adjoint search, triangle identities, mates and the
//!   Beck-Chevalley condition;
//! * [`bicat`]: finite bicategories and pseudofunctors with exhaustive
//!   coherence checks;
//! * [`span`]: span categories and the correspondence bicategory;
//! * [`fib`]: (co)Cartesian fibrations and the Grothendieck construction;
//! * [`bivariant`]: bivariant functors, span extension and the Yoneda and
//!   universality oracles;
//! * [`dot`]: Graphviz output.

pub mod adjoint;
pub mod bicat;
pub mod bivariant;
pub mod dot;
pub mod error;
pub mod fib;
pub mod fincat;
pub mod fixtures;
pub mod marked;
pub mod span;
pub mod twocat;

pub use error::{Error, Result};
