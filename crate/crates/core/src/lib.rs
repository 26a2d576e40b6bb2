pub mod artifact;
pub mod bdd;
pub mod bench;
pub mod generate;
pub mod mdd;
pub mod model;
pub mod multicost;
pub mod session;
pub mod verify;
pub mod wcvd;
