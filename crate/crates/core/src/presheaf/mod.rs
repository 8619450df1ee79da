//! Finite categories, finite presheaves on them, and natural transformations.

mod category;
mod enumerate;
mod map;
mod object;
mod validate;

pub use category::{FinCategory, Morphism};
pub use enumerate::{count_maps_where, enumerate_maps, enumerate_maps_where};
pub use map::PresheafMap;
pub use object::Presheaf;
pub use validate::{ValidationReport, Violation};

pub(crate) use object::same_base;

#[cfg(test)]
mod tests;
