pub mod cli;
pub mod fundclass;
pub mod groups;
pub mod linalg;
pub mod padic_fields;
pub mod zmod_cohomology;
