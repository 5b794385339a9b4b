use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{p} is not prime")]
    NotPrime { p: String },

    #[error("exponent k must be positive")]
    ZeroExponent,

    #[error("modulus {p}^{k} does not fit the backing integer type")]
    Overflow { p: String, k: u32 },

    #[error("operands live in different rings ({left} vs {right})")]
    ModulusMismatch { left: String, right: String },

    #[error("composite modulus factors must have strictly increasing primes")]
    UnorderedFactors,

    #[error("lift precision {supplied} is below the required {required}")]
    PrecisionShortfall { supplied: u32, required: u32 },

    #[error("{value} is not a unit modulo {p}")]
    NotAUnit { value: String, p: String },

    #[error("base {value} is not congruent to 1 modulo {p}")]
    BaseNotOneUnit { value: String, p: String },

    #[error("function is not integer-valued at p = {p}")]
    NotIntegerValued { p: String },

    #[error("operation requires p = {expected}, got p = {actual}")]
    WrongPrime { expected: String, actual: String },

    #[error("bitwise operations are only defined for p = 2 (got p = {p})")]
    BitwiseOddPrime { p: String },

    #[error("coefficient c must not be divisible by p = {p}")]
    CDivisibleByP { p: String },

    #[error("function is not in class B for p = {p}")]
    NotClassB { p: String },

    #[error("function is not in class A for p = {p}")]
    NotClassA { p: String },

    #[error("{states} states exceed the brute-force cap of {cap}")]
    CapExceeded { states: String, cap: u64 },

    #[error("map is not bijective: orbit of 0 re-enters at {state} after {steps} steps")]
    NotBijective { state: String, steps: u64 },

    #[error("operation requires a modulus 2^k with k >= 8")]
    NotBinaryModulus,

    #[error("sequence is empty")]
    EmptySequence,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("series degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },

    #[error("unknown identifier `{name}` at {line}:{col}")]
    UnknownIdentifier { name: String, line: usize, col: usize },

    /// `refuted` separates a disproved property from one that could not be proven.
    #[error("generator is not certified: {reason}")]
    Uncertified { reason: String, refuted: bool },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
