//! Multiplication-free generation of consecutive squares.
//!
//! Consecutive squares differ by consecutive odd numbers, so keeping an odd
//! increment `a` next to the running square lets each new square be formed
//! with two additions. Everything here is generic over [`IntBackend`],
//! whose capability set deliberately has no multiply.

use std::cell::Cell;
use std::fmt;

use thiserror::Error;

use crate::bignum::{self, Natural};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SequenceError {
    /// The value at `index` does not fit the backend's range.
    #[error("value at index {index} overflows the machine backend")]
    Overflow { index: u64 },
}

/// Integer operations available to the additive algorithms.
pub trait IntBackend: Clone + Ord + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    /// Converts a step count into a backend value.
    fn from_count(n: u64) -> Option<Self>;
    fn try_add(&self, other: &Self) -> Option<Self>;
    /// `self + self`.
    fn try_double(&self) -> Option<Self>;
    fn try_add_small(&self, k: u32) -> Option<Self>;
}

/// A backend that can also multiply. Only the baseline uses it.
pub trait MulBackend: IntBackend {
    fn try_mul(&self, other: &Self) -> Option<Self>;
}

impl IntBackend for u64 {
    fn zero() -> Self {
        0
    }

    fn one() -> Self {
        1
    }

    fn from_count(n: u64) -> Option<Self> {
        Some(n)
    }

    fn try_add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }

    fn try_double(&self) -> Option<Self> {
        self.checked_add(*self)
    }

    fn try_add_small(&self, k: u32) -> Option<Self> {
        self.checked_add(u64::from(k))
    }
}

impl MulBackend for u64 {
    fn try_mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
}

impl IntBackend for Natural {
    fn zero() -> Self {
        Natural::zero()
    }

    fn one() -> Self {
        Natural::one()
    }

    fn from_count(n: u64) -> Option<Self> {
        Some(Natural::from(n))
    }

    fn try_add(&self, other: &Self) -> Option<Self> {
        Some(bignum::add(self, other))
    }

    fn try_double(&self) -> Option<Self> {
        Some(bignum::double(self))
    }

    fn try_add_small(&self, k: u32) -> Option<Self> {
        Some(bignum::add_limb(self, k))
    }
}

impl MulBackend for Natural {
    fn try_mul(&self, other: &Self) -> Option<Self> {
        Some(bignum::mul(self, other))
    }
}

/// Loop state of the odd-increment algorithm after `index` steps.
///
/// Invariants: `odd == 2 * index + 1` and `square == index * index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareStream<B> {
    odd: B,
    square: B,
    index: u64,
}

impl<B: IntBackend> SquareStream<B> {
    /// The initial state: `a = 1`, `square = 0`.
    pub fn new() -> Self {
        SquareStream {
            odd: B::one(),
            square: B::zero(),
            index: 0,
        }
    }

    /// The next odd increment, `2 * index + 1`.
    pub fn odd(&self) -> &B {
        &self.odd
    }

    /// The square of `index`.
    pub fn square(&self) -> &B {
        &self.square
    }

    /// Number of steps taken so far.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Emits `(index + 1)^2` and returns it with the successor state.
    pub fn step(&self) -> Result<(Self, B), SequenceError> {
        let index = self.index + 1;
        let overflow = SequenceError::Overflow { index };
        let square = self.square.try_add(&self.odd).ok_or(overflow)?;
        let odd = self.odd.try_add_small(2).ok_or(overflow)?;
        let emitted = square.clone();
        Ok((SquareStream { odd, square, index }, emitted))
    }

    /// Lazily yields squares `1, 4, 9, ...` starting after the current state.
    pub fn into_iter_squares(self) -> Squares<B> {
        Squares {
            state: Some(self),
        }
    }
}

impl<B: IntBackend> Default for SquareStream<B> {
    fn default() -> Self {
        Self::new()
    }
}

/// Iterator over successive squares. Stops after the first overflow.
#[derive(Debug, Clone)]
pub struct Squares<B> {
    state: Option<SquareStream<B>>,
}

impl<B: IntBackend> Iterator for Squares<B> {
    type Item = Result<B, SequenceError>;

    fn next(&mut self) -> Option<Self::Item> {
        let state = self.state.take()?;
        match state.step() {
            Ok((next, value)) => {
                self.state = Some(next);
                Some(Ok(value))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

/// Squares of `1..=n`, each produced by one stream step.
pub fn squares_first_n<B: IntBackend>(n: u64) -> Result<Vec<B>, SequenceError> {
    SquareStream::<B>::new()
        .into_iter_squares()
        .take(n as usize)
        .collect()
}

/// Given `square_n == n^2`, returns `(n + 1)^2 = n^2 + 2(n + 1) - 1`.
///
/// The `2(n + 1) - 1` term is formed as `double(n) + 1`.
pub fn next_square<B: IntBackend>(square_n: &B, n: u64) -> Result<B, SequenceError> {
    let overflow = SequenceError::Overflow {
        index: n.saturating_add(1),
    };
    let odd = B::from_count(n)
        .and_then(|n| n.try_double())
        .and_then(|twice| twice.try_add_small(1))
        .ok_or(overflow)?;
    square_n.try_add(&odd).ok_or(overflow)
}

/// `1^2 + 2^2 + ... + n^2`, summing the stream's emissions.
pub fn sum_of_squares_first_n<B: IntBackend>(n: u64) -> Result<B, SequenceError> {
    let mut sum = B::zero();
    let mut state = SquareStream::<B>::new();
    for _ in 0..n {
        let (next, square) = state.step()?;
        sum = sum
            .try_add(&square)
            .ok_or(SequenceError::Overflow { index: next.index })?;
        state = next;
    }
    Ok(sum)
}

/// Baseline: squares of `1..=n` computed as `k * k`.
pub fn squares_first_n_by_mul<B: MulBackend>(n: u64) -> Result<Vec<B>, SequenceError> {
    let mut out = Vec::with_capacity(n as usize);
    let mut k = B::zero();
    for index in 1..=n {
        let overflow = SequenceError::Overflow { index };
        k = k.try_add_small(1).ok_or(overflow)?;
        out.push(k.try_mul(&k).ok_or(overflow)?);
    }
    Ok(out)
}

/// Backends that can report how many limb steps each operation took.
pub trait Instrumented: MulBackend {
    fn add_with_ops(&self, other: &Self) -> Option<(Self, u64)>;
    fn double_with_ops(&self) -> Option<(Self, u64)>;
    fn add_small_with_ops(&self, k: u32) -> Option<(Self, u64)>;
    fn mul_with_ops(&self, other: &Self) -> Option<(Self, u64)>;
}

impl Instrumented for u64 {
    fn add_with_ops(&self, other: &Self) -> Option<(Self, u64)> {
        self.try_add(other).map(|v| (v, 1))
    }

    fn double_with_ops(&self) -> Option<(Self, u64)> {
        self.try_double().map(|v| (v, 1))
    }

    fn add_small_with_ops(&self, k: u32) -> Option<(Self, u64)> {
        self.try_add_small(k).map(|v| (v, 1))
    }

    fn mul_with_ops(&self, other: &Self) -> Option<(Self, u64)> {
        self.try_mul(other).map(|v| (v, 1))
    }
}

impl Instrumented for Natural {
    fn add_with_ops(&self, other: &Self) -> Option<(Self, u64)> {
        Some(bignum::add_counted(self, other))
    }

    fn double_with_ops(&self) -> Option<(Self, u64)> {
        Some(bignum::add_counted(self, self))
    }

    fn add_small_with_ops(&self, k: u32) -> Option<(Self, u64)> {
        Some(bignum::add_limb_counted(self, k))
    }

    fn mul_with_ops(&self, other: &Self) -> Option<(Self, u64)> {
        Some(bignum::mul_counted(self, other))
    }
}

/// Per-thread tally of the operations a [`Counted`] backend performed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpTally {
    pub adds: u64,
    pub doubles: u64,
    pub small_adds: u64,
    pub muls: u64,
    /// Sum of the limb steps reported by the wrapped backend.
    pub digit_ops: u64,
}

thread_local! {
    static TALLY: Cell<OpTally> = Cell::new(OpTally::default());
}

fn record(f: impl FnOnce(&mut OpTally)) {
    TALLY.with(|t| {
        let mut v = t.get();
        f(&mut v);
        t.set(v);
    });
}

/// Wraps a backend and records every operation into a thread-local tally.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Counted<B>(pub B);

impl<B> Counted<B> {
    pub fn reset_tally() {
        TALLY.with(|t| t.set(OpTally::default()));
    }

    pub fn tally() -> OpTally {
        TALLY.with(Cell::get)
    }

    /// Runs `f` with a fresh tally and returns its result with the tally.
    pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpTally) {
        Self::reset_tally();
        let out = f();
        (out, Self::tally())
    }

    pub fn into_inner(self) -> B {
        self.0
    }
}

impl<B: fmt::Display> fmt::Display for Counted<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<B: Instrumented> IntBackend for Counted<B> {
    fn zero() -> Self {
        Counted(B::zero())
    }

    fn one() -> Self {
        Counted(B::one())
    }

    fn from_count(n: u64) -> Option<Self> {
        B::from_count(n).map(Counted)
    }

    fn try_add(&self, other: &Self) -> Option<Self> {
        let (v, ops) = self.0.add_with_ops(&other.0)?;
        record(|t| {
            t.adds += 1;
            t.digit_ops += ops;
        });
        Some(Counted(v))
    }

    fn try_double(&self) -> Option<Self> {
        let (v, ops) = self.0.double_with_ops()?;
        record(|t| {
            t.doubles += 1;
            t.digit_ops += ops;
        });
        Some(Counted(v))
    }

    fn try_add_small(&self, k: u32) -> Option<Self> {
        let (v, ops) = self.0.add_small_with_ops(k)?;
        record(|t| {
            t.small_adds += 1;
            t.digit_ops += ops;
        });
        Some(Counted(v))
    }
}

impl<B: Instrumented> MulBackend for Counted<B> {
    fn try_mul(&self, other: &Self) -> Option<Self> {
        let (v, ops) = self.0.mul_with_ops(&other.0)?;
        record(|t| {
            t.muls += 1;
            t.digit_ops += ops;
        });
        Some(Counted(v))
    }
}
