use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("binomial coefficient with negative upper index {0}")]
    NegativeBinomial(i64),
    #[error("gamma ratio has a pole: {0}")]
    Pole(String),
    #[error("hypergeometric series has no nonpositive integer top parameter")]
    NotTerminating,
    #[error("bottom parameter hits a pole at index {index} before termination at {termination}")]
    PoleBeforeTermination { index: usize, termination: usize },
    #[error("divisor leading coefficient is not a scalar")]
    NonScalarLeadingCoefficient,
    #[error("dividend degree {dividend} is lower than divisor degree {divisor}")]
    DegreeError { dividend: usize, divisor: usize },
    #[error("index {index} out of range for {len} roots")]
    IndexError { index: usize, len: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("coefficient c_({n},{h},{l}) missing from table")]
    MissingCoefficient { n: u32, h: u32, l: u32 },
    #[error("routes disagree on c_({n},{h},{l}): {first} vs {second}")]
    RouteDisagreement {
        n: u32,
        h: u32,
        l: u32,
        first: String,
        second: String,
    },
}
