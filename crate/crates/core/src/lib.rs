pub mod pddl;
pub mod search;
pub mod features;
pub mod sketch;
pub mod domains;
pub mod harness;
