//! Finite presheaf toposes, spans, relations and Booleanization.

pub mod allegory;
pub mod boolean;
pub mod congruence;
pub mod error;
pub mod functor;
pub mod indeterminates;
pub mod index;
pub mod logic;
pub mod object;
pub mod search;
pub mod span;
pub mod subobject;
pub mod text;
pub mod topos;

pub use error::{ParseError, Result, ToposError};
pub use index::{Arrow, IndexCategory};
pub use object::{Morphism, Object};
pub use subobject::Subobject;
pub use topos::Topos;
