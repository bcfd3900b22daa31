//! Squares of the first `n` natural numbers computed with additions only,
//! a schoolbook arbitrary-precision natural type to run them on, and a
//! benchmark harness that measures how the schoolbook kernels scale.

pub mod bench;
pub mod bignum;
pub mod cli;
pub mod sequences;

pub use bignum::{DivModResult, Natural};
pub use sequences::{
    next_square, squares_first_n, squares_first_n_by_mul, sum_of_squares_first_n, IntBackend,
    MulBackend, SequenceError, SquareStream,
};
