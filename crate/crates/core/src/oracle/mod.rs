//! Exhaustive ground truth: allocation enumeration, predicate search,
//! built-in counterexample instances and theorem verification.

pub mod enumerate;
pub mod library;
pub mod open_problems;
pub mod search;
pub mod theorems;

pub use enumerate::{count_allocations, enumerate_allocations, AllocationIter, Constraint};
pub use open_problems::{search_open_problem, OpenProblem, OpenProblemReport};
pub use search::{exists_allocation, scan, ScanResult};
pub use theorems::{verify_theorem, Theorem, TheoremParams, TheoremReport};
