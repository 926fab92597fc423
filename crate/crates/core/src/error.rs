use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside its valid range {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("infeasible parameters: {0}")]
    ParameterInfeasible(String),
    #[error("numerical conditioning failure: {0}")]
    NumericalConditioning(String),
    #[error("compression constraint cannot be met: right-hand side is {rhs} bits")]
    ConstraintInfeasible { rhs: f64 },
    #[error("variable sets passed to a mutual information query overlap")]
    OverlappingSets,
    #[error("malformed kernel `{kernel}`: {reason}")]
    MalformedKernel { kernel: String, reason: String },
    #[error("joint table needs {cells} cells, cap is {cap}")]
    Capacity { cells: u128, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
