use thiserror::Error;

/// Which contract clause kind failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractKind {
    Pre,
    Post,
    Inv,
}

impl ContractKind {
    pub fn name(self) -> &'static str {
        match self {
            ContractKind::Pre => "pre",
            ContractKind::Post => "post",
            ContractKind::Inv => "inv",
        }
    }
}

/// A run-time fault. Faults are terminal: nothing in the action language can
/// catch them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("type fault: {0}")]
    TypeFault(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("call of `{0}` on void")]
    VoidCall(String),
    #[error("no method `{op}` on class `{class}`")]
    NoSuchMethod { class: String, op: String },
    #[error("cannot instantiate abstract class `{0}`")]
    AbstractInstantiation(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class `{class}` has no feature `{feature}`")]
    UnknownFeature { class: String, feature: String },
    #[error("feature `{feature}` of {obj} already holds a value")]
    UpperBoundExceeded { obj: String, feature: String },
    #[error("moving {child} under {parent} would create a containment cycle")]
    ContainmentCycle { parent: String, child: String },
    #[error("precondition `{name}` violated on {obj}")]
    PreconditionViolation { name: String, obj: String },
    #[error("postcondition `{name}` violated on {obj}")]
    PostconditionViolation { name: String, obj: String },
    #[error("invariant `{name}` violated on {obj}")]
    InvariantViolation { name: String, obj: String },
    #[error("method `{0}` ended without returning a value")]
    MissingReturn(String),
    #[error("call depth limit of {0} exceeded")]
    CallDepthExceeded(usize),
    #[error("side effect `{0}` in a side-effect-free context")]
    SideEffect(String),
    #[error("{0}")]
    Raised(String),
    #[error("the model has no root object of class `{0}`")]
    NoEntryObject(String),
}

impl Fault {
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Fault::PreconditionViolation { .. }
                | Fault::PostconditionViolation { .. }
                | Fault::InvariantViolation { .. }
        )
    }
}
