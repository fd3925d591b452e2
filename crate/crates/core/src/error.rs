use alloc::string::String;

use crate::regions::RegionLabel;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Why a p-adic number fails to be a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareObstruction {
    OddValuation,
    NonResidueUnit,
}

impl core::fmt::Display for SquareObstruction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SquareObstruction::OddValuation => f.write_str("odd valuation"),
            SquareObstruction::NonResidueUnit => f.write_str("unit part is a quadratic non-residue"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a square in Q_p: {0}")]
    NotASquare(SquareObstruction),
    #[error("inverse map undefined at a point with y = 0")]
    UndefinedInverse,
    #[error("coordinate size {bits} bits exceeds the budget of {budget} bits")]
    BudgetExceeded { bits: u64, budget: u64 },
    #[error("p-adic precision exhausted")]
    PrecisionExhausted,
    #[error("Fibonacci index {0} is below -2")]
    FibonacciIndex(i64),
    #[error("growth exponent index {0} is negative")]
    GrowthIndex(i64),
    #[error("T_n measure needs k >= 2, got {0}")]
    TnExponent(i64),
    #[error("region {label} is empty for d = {d}")]
    EmptyRegion { label: RegionLabel, d: i64 },
    #[error("no admissible norm profile of {label} inside window {window} for d = {d}")]
    EmptyWindow { label: RegionLabel, d: i64, window: i64 },
    #[error("no transition claim is recorded for {0}")]
    NoTransitionClaim(RegionLabel),
    #[error("invalid region label {0}")]
    InvalidLabel(RegionLabel),
    #[error("parameter c = 0 has no finite norm exponent")]
    DegenerateParameter,
    #[error("parse error: {0}")]
    Parse(String),
}
