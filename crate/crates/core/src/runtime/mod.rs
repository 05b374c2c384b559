//! Executes woven languages: object graphs with EMOF assignment semantics,
//! the method interpreter, and model files.

mod emof;
mod fault;
mod interp;
mod model;
mod serial;

pub use fault::{ContractKind, Fault};
pub use interp::{ContractPolicy, Interpreter, Trace, TraceEvent, DEFAULT_MAX_DEPTH};
pub use model::{default_value, ModelInstance, Obj, ObjId};
pub use serial::{check_model, conformance, load_model, save_model, ModelError, ModelErrorKind};
