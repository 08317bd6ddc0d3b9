pub mod apoly;
pub mod catalog;
pub mod harish_chandra;
pub mod invariant_rings;
pub mod liesuper;
pub mod linalg;
pub mod pbw;
pub mod scalar;
pub mod symmetric_pair;
