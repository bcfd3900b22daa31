//! Timing and operation-count experiments for the schoolbook kernels and
//! for the additive vs multiplicative square tables.
//!
//! Two different sizes appear here. Kernel benchmarks scale the operand
//! length in limbs; square-table comparisons scale the sequence length `n`.
//!
//! Measurements run on the calling thread, one after another. Each trial
//! times a batch of calls sized so the batch is long enough for the
//! monotonic clock to resolve, and the reported figure is the per-call
//! median across trials.

use std::fmt;
use std::hint::black_box;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bignum::{self, Limb, Natural};
use crate::sequences::{
    self, Counted, Instrumented, IntBackend, MulBackend, OpTally, SequenceError,
};

pub const MIN_TRIALS: usize = 5;
pub const WARMUP_RUNS: usize = 2;
/// Minimum wall time of one timed batch.
const BATCH_TARGET: Duration = Duration::from_millis(2);
const MAX_BATCH: u64 = 1 << 20;

/// Exponent bands separating linear from quadratic kernels.
pub const LINEAR_BAND: (f64, f64) = (0.8, 1.3);
pub const QUADRATIC_BAND: (f64, f64) = (1.7, 2.3);

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown operation {0:?} (expected add, sub, mul or divmod)")]
    UnknownOperation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// The schoolbook kernels that can be benchmarked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BignumOp {
    Add,
    Sub,
    Mul,
    DivMod,
}

impl BignumOp {
    pub const ALL: [BignumOp; 4] = [BignumOp::Add, BignumOp::Sub, BignumOp::Mul, BignumOp::DivMod];

    pub fn name(self) -> &'static str {
        match self {
            BignumOp::Add => "add",
            BignumOp::Sub => "sub",
            BignumOp::Mul => "mul",
            BignumOp::DivMod => "divmod",
        }
    }

    /// Expected growth exponent in the operand limb count.
    pub fn expected_exponent(self) -> f64 {
        match self {
            BignumOp::Add | BignumOp::Sub => 1.0,
            BignumOp::Mul | BignumOp::DivMod => 2.0,
        }
    }

    pub fn band(self) -> (f64, f64) {
        match self {
            BignumOp::Add | BignumOp::Sub => LINEAR_BAND,
            BignumOp::Mul | BignumOp::DivMod => QUADRATIC_BAND,
        }
    }
}

impl fmt::Display for BignumOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BignumOp {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BignumOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| BenchError::UnknownOperation(s.to_string()))
    }
}

/// One measurement: median per-call duration at one operand size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSample {
    pub input_size: usize,
    pub median_ns: f64,
    pub trials: usize,
}

/// Least-squares fit of `log(y) = exponent * log(x) + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub r_squared: f64,
}

/// A power-law fit over timing samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub exponent: f64,
    pub r_squared: f64,
    pub samples: Vec<TimingSample>,
}

impl SlopeFit {
    pub fn within(&self, (lo, hi): (f64, f64)) -> bool {
        (lo..=hi).contains(&self.exponent)
    }
}

/// Fits a power law to `(size, cost)` points on log-log axes.
///
/// Needs at least four distinct positive sizes spanning a factor of ten,
/// and positive costs.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit, BenchError> {
    if points.len() < 4 {
        return Err(BenchError::InsufficientSamples(format!(
            "need at least 4 samples, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(BenchError::InsufficientSamples(
            "sizes and costs must be positive and finite".into(),
        ));
    }
    let mut sizes: Vec<f64> = points.iter().map(|p| p.0).collect();
    sizes.sort_by(f64::total_cmp);
    if sizes.windows(2).any(|w| w[0] == w[1]) {
        return Err(BenchError::InsufficientSamples("sizes must be distinct".into()));
    }
    if sizes[sizes.len() - 1] < 10.0 * sizes[0] {
        return Err(BenchError::InsufficientSamples(
            "sizes must span at least one order of magnitude".into(),
        ));
    }

    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let count = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();

    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|&(x, y)| (y - (intercept + exponent * x)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        if ss_res == 0.0 { 1.0 } else { 0.0 }
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(PowerFit {
        exponent,
        r_squared,
    })
}

/// Fits the growth exponent of median duration against operand size.
pub fn fit_slope(samples: &[TimingSample]) -> Result<SlopeFit, BenchError> {
    let points: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (s.input_size as f64, s.median_ns))
        .collect();
    let PowerFit {
        exponent,
        r_squared,
    } = fit_power_law(&points)?;
    Ok(SlopeFit {
        exponent,
        r_squared,
        samples: samples.to_vec(),
    })
}

/// Times `f` over `trials` batches after `WARMUP_RUNS` untimed calls and
/// returns the median per-call duration in nanoseconds.
pub fn median_ns<R>(trials: usize, mut f: impl FnMut() -> R) -> f64 {
    let mut fastest_warmup = Duration::MAX;
    for _ in 0..WARMUP_RUNS {
        let start = Instant::now();
        black_box(f());
        fastest_warmup = fastest_warmup.min(start.elapsed());
    }
    let per_call = fastest_warmup.as_nanos().max(1) as u64;
    let batch = (BATCH_TARGET.as_nanos() as u64 / per_call).clamp(1, MAX_BATCH);

    let mut per_call_ns: Vec<f64> = (0..trials)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..batch {
                black_box(f());
            }
            start.elapsed().as_nanos() as f64 / batch as f64
        })
        .collect();
    per_call_ns.sort_by(f64::total_cmp);
    let mid = per_call_ns.len() / 2;
    let median = if per_call_ns.len() % 2 == 1 {
        per_call_ns[mid]
    } else {
        (per_call_ns[mid - 1] + per_call_ns[mid]) / 2.0
    };
    // A zero reading only means the call is below clock resolution.
    median.max(f64::MIN_POSITIVE)
}

/// A uniformly random value with exactly `limbs` limbs.
pub fn random_natural(rng: &mut impl Rng, limbs: usize) -> Natural {
    let mut v: Vec<Limb> = (0..limbs).map(|_| rng.gen()).collect();
    if let Some(top) = v.last_mut() {
        *top = (*top).max(1);
    }
    Natural::from_limbs(v)
}

/// Operands for one kernel at one size.
///
/// `divmod` divides a `2 * size`-limb dividend by a `size`-limb divisor so
/// the quotient has `size + 1` limbs; an equal-length division yields a
/// single quotient limb and only linear work. `sub` orders its operands so
/// the result is defined.
fn operands(op: BignumOp, size: usize, seed: u64) -> (Natural, Natural) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (size as u64).rotate_left(32));
    match op {
        BignumOp::Add | BignumOp::Mul => (random_natural(&mut rng, size), random_natural(&mut rng, size)),
        BignumOp::Sub => {
            let a = random_natural(&mut rng, size);
            let b = random_natural(&mut rng, size);
            if a >= b {
                (a, b)
            } else {
                (b, a)
            }
        }
        BignumOp::DivMod => (random_natural(&mut rng, 2 * size), random_natural(&mut rng, size)),
    }
}

fn run_op(op: BignumOp, x: &Natural, y: &Natural) -> Natural {
    match op {
        BignumOp::Add => bignum::add(x, y),
        BignumOp::Sub => bignum::sub(x, y).expect("operands ordered"),
        BignumOp::Mul => bignum::mul(x, y),
        BignumOp::DivMod => bignum::divmod(x, y).expect("nonzero divisor").quotient,
    }
}

fn check_size_trials(size: usize, trials: usize) -> Result<(), BenchError> {
    if size == 0 {
        return Err(BenchError::InvalidArgument("size must be positive".into()));
    }
    if trials < MIN_TRIALS {
        return Err(BenchError::InvalidArgument(format!(
            "trials must be at least {MIN_TRIALS}, got {trials}"
        )));
    }
    Ok(())
}

/// Times one named kernel on seeded random operands of `size` limbs.
pub fn time_op(op: &str, size: usize, trials: usize, seed: u64) -> Result<TimingSample, BenchError> {
    let op: BignumOp = op.parse()?;
    time_bignum_op(op, size, trials, seed)
}

pub fn time_bignum_op(
    op: BignumOp,
    size: usize,
    trials: usize,
    seed: u64,
) -> Result<TimingSample, BenchError> {
    check_size_trials(size, trials)?;
    let (x, y) = operands(op, size, seed);
    let median_ns = median_ns(trials, || run_op(op, black_box(&x), black_box(&y)));
    Ok(TimingSample {
        input_size: size,
        median_ns,
        trials,
    })
}

/// Limb steps one kernel executes on the same operands [`time_op`] uses.
pub fn count_op(op: BignumOp, size: usize, seed: u64) -> Result<u64, BenchError> {
    if size == 0 {
        return Err(BenchError::InvalidArgument("size must be positive".into()));
    }
    let (x, y) = operands(op, size, seed);
    let steps = match op {
        BignumOp::Add => bignum::add_counted(&x, &y).1,
        BignumOp::Sub => bignum::sub_counted(&x, &y).expect("operands ordered").1,
        BignumOp::Mul => bignum::mul_counted(&x, &y).1,
        BignumOp::DivMod => bignum::divmod_counted(&x, &y).expect("nonzero divisor").1,
    };
    Ok(steps)
}

/// Growth exponent of the limb-step count over `sizes`.
pub fn count_exponent(op: BignumOp, sizes: &[usize], seed: u64) -> Result<PowerFit, BenchError> {
    let points = sizes
        .iter()
        .map(|&s| count_op(op, s, seed).map(|c| (s as f64, c as f64)))
        .collect::<Result<Vec<_>, _>>()?;
    fit_power_law(&points)
}

/// Which integer type backs a square-table comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Machine,
    Bignum,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Machine => "machine",
            Backend::Bignum => "bignum",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "machine" => Ok(Backend::Machine),
            "bignum" => Ok(Backend::Bignum),
            other => Err(format!("unknown backend {other:?} (expected machine or bignum)")),
        }
    }
}

/// Result of comparing the two square-table methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// Both methods agreed; the figures are comparable.
    Verdict {
        additive_ns: f64,
        multiplicative_ns: f64,
        additive_ops: OpTally,
        multiplicative_ops: OpTally,
    },
    /// The two methods produced different tables; no timing is reported.
    Mismatch { first_index: u64 },
    Overflow { index: u64 },
}

impl Outcome {
    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Verdict { .. } => "ok",
            Outcome::Mismatch { .. } => "mismatch",
            Outcome::Overflow { .. } => "overflow",
        }
    }

    /// Wall-time ratio multiplicative / additive, when a verdict exists.
    pub fn speedup(&self) -> Option<f64> {
        match *self {
            Outcome::Verdict {
                additive_ns,
                multiplicative_ns,
                ..
            } => Some(multiplicative_ns / additive_ns),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodComparison {
    pub backend: Backend,
    pub n: u64,
    pub trials: usize,
    pub outcome: Outcome,
}

/// Gates any timing claim on the two tables being identical.
fn check_tables<B: PartialEq>(additive: &[B], multiplicative: &[B]) -> Result<(), u64> {
    if additive.len() != multiplicative.len() {
        return Err(additive.len().min(multiplicative.len()) as u64 + 1);
    }
    match additive.iter().zip(multiplicative).position(|(a, m)| a != m) {
        Some(i) => Err(i as u64 + 1),
        None => Ok(()),
    }
}

fn compare_with<B: Instrumented>(n: u64, trials: usize) -> Outcome {
    let tables = sequences::squares_first_n::<B>(n)
        .and_then(|a| sequences::squares_first_n_by_mul::<B>(n).map(|m| (a, m)));
    let (additive, multiplicative) = match tables {
        Ok(t) => t,
        Err(SequenceError::Overflow { index }) => return Outcome::Overflow { index },
    };
    if let Err(first_index) = check_tables(&additive, &multiplicative) {
        return Outcome::Mismatch { first_index };
    }
    drop((additive, multiplicative));

    let (_, additive_ops) = Counted::<B>::measure(|| sequences::squares_first_n::<Counted<B>>(n));
    let (_, multiplicative_ops) =
        Counted::<B>::measure(|| sequences::squares_first_n_by_mul::<Counted<B>>(n));
    let additive_ns = median_ns(trials, || sequences::squares_first_n::<B>(black_box(n)));
    let multiplicative_ns = median_ns(trials, || sequences::squares_first_n_by_mul::<B>(black_box(n)));
    Outcome::Verdict {
        additive_ns,
        multiplicative_ns,
        additive_ops,
        multiplicative_ops,
    }
}

/// Times and counts `squares_first_n(n)` against the `k * k` baseline.
pub fn compare_square_methods(
    n: u64,
    backend: Backend,
    trials: usize,
) -> Result<MethodComparison, BenchError> {
    if n == 0 {
        return Err(BenchError::InvalidArgument("n must be at least 1".into()));
    }
    check_size_trials(1, trials)?;
    let outcome = match backend {
        Backend::Machine => compare_with::<u64>(n, trials),
        Backend::Bignum => compare_with::<Natural>(n, trials),
    };
    Ok(MethodComparison {
        backend,
        n,
        trials,
        outcome,
    })
}

/// Cost of one step of each method when the running values are `limbs` long.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCost {
    pub limbs: usize,
    pub additive_ns: f64,
    pub multiplicative_ns: f64,
    pub additive_ops: u64,
    pub multiplicative_ops: u64,
}

/// Measures a single table step on `limbs`-limb operands.
///
/// The additive step is `square + a` then `a + 2`; the multiplicative step
/// is `k + 1` then `k * k`. Operands are random with the seed given.
pub fn compare_step_cost(limbs: usize, trials: usize, seed: u64) -> Result<StepCost, BenchError> {
    check_size_trials(limbs, trials)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = random_natural(&mut rng, limbs);
    let odd = bignum::add(&bignum::double(&k), &Natural::one());
    // The additive state holds a square of about twice the width of `k`.
    let square = random_natural(&mut rng, 2 * limbs);

    let additive_step = |square: &Natural, odd: &Natural| {
        let next = square.try_add(odd);
        let odd = odd.try_add_small(2);
        (next, odd)
    };
    let multiplicative_step = |k: &Natural| {
        let k = k.try_add_small(1).expect("naturals never overflow");
        k.try_mul(&k)
    };

    let (sq, o) = (Counted(square.clone()), Counted(odd.clone()));
    let (_, add_tally) = Counted::<Natural>::measure(|| additive_step_counted(&sq, &o));
    let kc = Counted(k.clone());
    let (_, mul_tally) = Counted::<Natural>::measure(|| {
        let k = kc.try_add_small(1).expect("naturals never overflow");
        k.try_mul(&k)
    });

    let additive_ns = median_ns(trials, || additive_step(black_box(&square), black_box(&odd)));
    let multiplicative_ns = median_ns(trials, || multiplicative_step(black_box(&k)));
    Ok(StepCost {
        limbs,
        additive_ns,
        multiplicative_ns,
        additive_ops: add_tally.digit_ops,
        multiplicative_ops: mul_tally.digit_ops,
    })
}

fn additive_step_counted(square: &Counted<Natural>, odd: &Counted<Natural>) {
    black_box(square.try_add(odd));
    black_box(odd.try_add_small(2));
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpSample {
    pub op: String,
    pub sample: TimingSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpFit {
    pub op: String,
    pub fit: SlopeFit,
}

/// Everything one benchmark session produced.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub seed: u64,
    /// Seconds since the Unix epoch when the report was created.
    pub timestamp: u64,
    pub environment: String,
    pub samples: Vec<OpSample>,
    pub fits: Vec<OpFit>,
    pub comparisons: Vec<MethodComparison>,
}

impl BenchReport {
    pub fn new(seed: u64) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
        BenchReport {
            seed,
            timestamp,
            environment: format!(
                "{}-{} {} build, {}-bit limbs",
                std::env::consts::ARCH,
                std::env::consts::OS,
                profile,
                bignum::LIMB_BITS
            ),
            samples: Vec::new(),
            fits: Vec::new(),
            comparisons: Vec::new(),
        }
    }
}

/// Times each kernel at each size and fits its growth exponent.
pub fn run_kernel_benchmarks(
    ops: &[BignumOp],
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<BenchReport, BenchError> {
    let mut report = BenchReport::new(seed);
    for &op in ops {
        let samples = sizes
            .iter()
            .map(|&size| time_bignum_op(op, size, trials, seed))
            .collect::<Result<Vec<_>, _>>()?;
        report.samples.extend(samples.iter().map(|&sample| OpSample {
            op: op.name().to_string(),
            sample,
        }));
        if let Ok(fit) = fit_slope(&samples) {
            report.fits.push(OpFit {
                op: op.name().to_string(),
                fit,
            });
        }
    }
    Ok(report)
}

pub const SAMPLES_HEADER: &str = "op,size_limbs,trials,median_ns,seed";
pub const SLOPES_HEADER: &str = "op,exponent,r_squared,num_samples";
pub const COMPARISON_HEADER: &str = "backend,n,trials,status,additive_ns,multiplicative_ns,additive_digit_ops,multiplicative_digit_ops,additive_muls,multiplicative_muls,seed";

/// Writes one row per timing sample under [`SAMPLES_HEADER`].
pub fn emit_csv<W: Write + ?Sized>(report: &BenchReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "{SAMPLES_HEADER}")?;
    for OpSample { op, sample } in &report.samples {
        writeln!(
            out,
            "{},{},{},{},{}",
            op, sample.input_size, sample.trials, sample.median_ns, report.seed
        )?;
    }
    Ok(())
}

/// Writes one row per fitted exponent under [`SLOPES_HEADER`].
pub fn emit_slopes_csv<W: Write + ?Sized>(report: &BenchReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "{SLOPES_HEADER}")?;
    for OpFit { op, fit } in &report.fits {
        writeln!(
            out,
            "{},{},{},{}",
            op,
            fit.exponent,
            fit.r_squared,
            fit.samples.len()
        )?;
    }
    Ok(())
}

/// Writes one row per square-table comparison under [`COMPARISON_HEADER`].
/// Figures are left empty when there is no verdict.
pub fn emit_comparison_csv<W: Write + ?Sized>(report: &BenchReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "{COMPARISON_HEADER}")?;
    for c in &report.comparisons {
        write!(out, "{},{},{},{},", c.backend, c.n, c.trials, c.outcome.status())?;
        match c.outcome {
            Outcome::Verdict {
                additive_ns,
                multiplicative_ns,
                additive_ops,
                multiplicative_ops,
            } => write!(
                out,
                "{},{},{},{},{},{},",
                additive_ns,
                multiplicative_ns,
                additive_ops.digit_ops,
                multiplicative_ops.digit_ops,
                additive_ops.muls,
                multiplicative_ops.muls
            )?,
            _ => write!(out, ",,,,,,")?,
        }
        writeln!(out, "{}", report.seed)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(sizes: &[usize], f: impl Fn(f64) -> f64) -> Vec<TimingSample> {
        sizes
            .iter()
            .map(|&s| TimingSample {
                input_size: s,
                median_ns: f(s as f64),
                trials: 5,
            })
            .collect()
    }

    #[test]
    fn fit_recovers_exact_exponents() {
        let sizes = [16, 64, 256, 1024];
        let quad = fit_slope(&synthetic(&sizes, |s| 3.5 * s * s)).unwrap();
        assert!((quad.exponent - 2.0).abs() < 1e-9);
        assert!((quad.r_squared - 1.0).abs() < 1e-12);
        let lin = fit_slope(&synthetic(&sizes, |s| 0.25 * s)).unwrap();
        assert!((lin.exponent - 1.0).abs() < 1e-9);
        assert!((lin.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(lin.samples.len(), 4);
    }

    #[test]
    fn fit_is_invariant_under_time_units() {
        let sizes = [10, 30, 100, 300, 1000];
        let noisy = |s: f64| s.powf(1.4) * (1.0 + 0.1 * (s.ln()).sin());
        let a = fit_slope(&synthetic(&sizes, noisy)).unwrap();
        let b = fit_slope(&synthetic(&sizes, |s| noisy(s) * 1e-3)).unwrap();
        assert!((a.exponent - b.exponent).abs() < 1e-9);
        assert!((a.r_squared - b.r_squared).abs() < 1e-9);
        assert!(a.r_squared < 1.0 && a.r_squared > 0.0);
    }

    #[test]
    fn fit_rejects_bad_inputs() {
        let few = synthetic(&[16, 64, 1024], |s| s);
        assert!(matches!(fit_slope(&few), Err(BenchError::InsufficientSamples(_))));
        let narrow = synthetic(&[100, 200, 400, 800], |s| s);
        assert!(matches!(fit_slope(&narrow), Err(BenchError::InsufficientSamples(_))));
        let dup = synthetic(&[16, 16, 256, 1024], |s| s);
        assert!(matches!(fit_slope(&dup), Err(BenchError::InsufficientSamples(_))));
        let zero = synthetic(&[16, 64, 256, 1024], |_| 0.0);
        assert!(matches!(fit_slope(&zero), Err(BenchError::InsufficientSamples(_))));
    }

    #[test]
    fn time_op_echoes_trials_and_rejects_unknown() {
        let s = time_op("add", 1024, 9, 1).unwrap();
        assert_eq!(s.trials, 9);
        assert_eq!(s.input_size, 1024);
        assert!(s.median_ns > 0.0);
        assert!(matches!(time_op("flip", 8, 5, 1), Err(BenchError::UnknownOperation(op)) if op == "flip"));
        assert!(matches!(time_op("add", 0, 5, 1), Err(BenchError::InvalidArgument(_))));
        assert!(matches!(time_op("add", 8, 4, 1), Err(BenchError::InvalidArgument(_))));
    }

    #[test]
    fn mul_is_slower_than_add_at_1024_limbs() {
        let add = time_op("add", 1024, 9, 7).unwrap();
        let mul = time_op("mul", 1024, 9, 7).unwrap();
        assert!(mul.median_ns > add.median_ns);
    }

    #[test]
    fn count_exponents_are_exact_for_add_and_mul() {
        let sizes = [256, 512, 1024, 2048, 4096];
        let add = count_exponent(BignumOp::Add, &sizes, 3).unwrap();
        assert!((add.exponent - 1.0).abs() < 0.05, "{add:?}");
        let mul = count_exponent(BignumOp::Mul, &sizes, 3).unwrap();
        assert!((mul.exponent - 2.0).abs() < 0.05, "{mul:?}");
        let div = count_exponent(BignumOp::DivMod, &[16, 32, 64, 128, 256], 3).unwrap();
        assert!((div.exponent - 2.0).abs() < 0.05, "{div:?}");
        let sub = count_exponent(BignumOp::Sub, &[16, 32, 64, 128, 256], 3).unwrap();
        assert!((sub.exponent - 1.0).abs() < 0.05, "{sub:?}");
    }

    #[test]
    fn counts_are_deterministic() {
        for op in BignumOp::ALL {
            assert_eq!(count_op(op, 100, 9).unwrap(), count_op(op, 100, 9).unwrap());
        }
        let a = compare_square_methods(300, Backend::Bignum, 5).unwrap();
        let b = compare_square_methods(300, Backend::Bignum, 5).unwrap();
        match (a.outcome, b.outcome) {
            (
                Outcome::Verdict { additive_ops: a1, multiplicative_ops: m1, .. },
                Outcome::Verdict { additive_ops: a2, multiplicative_ops: m2, .. },
            ) => {
                assert_eq!(a1, a2);
                assert_eq!(m1, m2);
            }
            other => panic!("unexpected outcomes {other:?}"),
        }
    }

    #[test]
    fn comparison_requires_identical_tables() {
        assert_eq!(check_tables(&[1u64, 4, 9], &[1, 4, 9]), Ok(()));
        assert_eq!(check_tables(&[1u64, 4, 9], &[1, 4, 10]), Err(3));
        assert_eq!(check_tables(&[1u64, 4], &[1, 4, 9]), Err(3));
    }

    #[test]
    fn machine_comparison_at_1000() {
        let c = compare_square_methods(1000, Backend::Machine, 5).unwrap();
        let Outcome::Verdict { additive_ops, multiplicative_ops, .. } = c.outcome else {
            panic!("expected a verdict, got {:?}", c.outcome);
        };
        assert_eq!(additive_ops.muls, 0);
        assert_eq!(multiplicative_ops.muls, 1000);
        assert!(c.outcome.speedup().unwrap() > 0.0);
    }

    /// An 8-bit backend whose multiply can be made wrong on purpose.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    struct Tiny<const BROKEN: bool>(u8);

    impl<const BROKEN: bool> IntBackend for Tiny<BROKEN> {
        fn zero() -> Self {
            Tiny(0)
        }
        fn one() -> Self {
            Tiny(1)
        }
        fn from_count(n: u64) -> Option<Self> {
            u8::try_from(n).ok().map(Tiny)
        }
        fn try_add(&self, other: &Self) -> Option<Self> {
            self.0.checked_add(other.0).map(Tiny)
        }
        fn try_double(&self) -> Option<Self> {
            self.0.checked_add(self.0).map(Tiny)
        }
        fn try_add_small(&self, k: u32) -> Option<Self> {
            u8::try_from(k).ok().and_then(|k| self.0.checked_add(k)).map(Tiny)
        }
    }

    impl<const BROKEN: bool> MulBackend for Tiny<BROKEN> {
        fn try_mul(&self, other: &Self) -> Option<Self> {
            let p = self.0.checked_mul(other.0)?;
            Some(Tiny(if BROKEN && self.0 == 3 { p + 1 } else { p }))
        }
    }

    impl<const BROKEN: bool> Instrumented for Tiny<BROKEN> {
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

    #[test]
    fn overflow_is_reported_not_fatal() {
        // 15^2 = 225 fits in u8, 16^2 does not.
        assert!(matches!(compare_with::<Tiny<false>>(15, 5), Outcome::Verdict { .. }));
        assert_eq!(compare_with::<Tiny<false>>(20, 5), Outcome::Overflow { index: 16 });
    }

    #[test]
    fn differing_tables_never_yield_a_verdict() {
        let outcome = compare_with::<Tiny<true>>(10, 5);
        assert_eq!(outcome, Outcome::Mismatch { first_index: 3 });
        assert_eq!(outcome.speedup(), None);
    }

    #[test]
    fn step_cost_counts_scale_linear_vs_quadratic() {
        let small = compare_step_cost(64, 5, 1).unwrap();
        let large = compare_step_cost(256, 5, 1).unwrap();
        let add_ratio = large.additive_ops as f64 / small.additive_ops as f64;
        let mul_ratio = large.multiplicative_ops as f64 / small.multiplicative_ops as f64;
        assert!((add_ratio - 4.0).abs() < 0.2, "{add_ratio}");
        assert!((mul_ratio - 16.0).abs() < 0.5, "{mul_ratio}");
        assert!(large.additive_ops < large.multiplicative_ops);
    }

    #[test]
    fn csv_header_only_for_empty_report() {
        let report = BenchReport::new(42);
        let mut buf = Vec::new();
        emit_csv(&report, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{SAMPLES_HEADER}\n"));
        let mut buf = Vec::new();
        emit_slopes_csv(&report, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{SLOPES_HEADER}\n"));
    }

    #[test]
    fn csv_one_sample_is_two_lines() {
        let mut report = BenchReport::new(42);
        report.samples.push(OpSample {
            op: "add".into(),
            sample: TimingSample {
                input_size: 256,
                median_ns: 123.5,
                trials: 9,
            },
        });
        let mut buf = Vec::new();
        emit_csv(&report, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "op,size_limbs,trials,median_ns,seed\nadd,256,9,123.5,42\n"
        );
    }

    #[test]
    fn comparison_csv_leaves_figures_empty_without_verdict() {
        let mut report = BenchReport::new(7);
        report.comparisons.push(MethodComparison {
            backend: Backend::Machine,
            n: 10,
            trials: 5,
            outcome: Outcome::Overflow { index: 4 },
        });
        let mut buf = Vec::new();
        emit_comparison_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row, "machine,10,5,overflow,,,,,,,7");
        assert_eq!(
            row.split(',').count(),
            COMPARISON_HEADER.split(',').count()
        );
    }
}
