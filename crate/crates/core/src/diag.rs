//! Positioned diagnostics shared by every front-end and by the composer.

use std::fmt;

/// A 1-based source position.
///
/// Positions never participate in equality: two syntax trees that differ only
/// in where they were parsed from compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl PartialEq for Pos {
    fn eq(&self, _other: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

impl std::hash::Hash for Pos {
    fn hash<H: std::hash::Hasher>(&self, _state: &mut H) {}
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Diagnostic classes. The rendered name is what appears in the `CODE`
/// column of `file:line:col: CODE message`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    SyntaxError,
    ResolutionError,
    CycleError,
    DuplicateName,
    ReservedName,
    BadMultiplicity,
    OppositeMismatch,
    ContainmentOpposite,
    UnitNotFound,
    ForbiddenComposition,
    FeatureClash,
    RenameTargetMissing,
    AmbiguousMethod,
    ClosureError,
    LinearizationError,
    TypeError,
    UnknownFeature,
    UnknownMethod,
    ArityMismatch,
    OverrideError,
}

impl Code {
    pub fn name(self) -> &'static str {
        match self {
            Code::SyntaxError => "SyntaxError",
            Code::ResolutionError => "ResolutionError",
            Code::CycleError => "CycleError",
            Code::DuplicateName => "DuplicateName",
            Code::ReservedName => "ReservedName",
            Code::BadMultiplicity => "BadMultiplicity",
            Code::OppositeMismatch => "OppositeMismatch",
            Code::ContainmentOpposite => "ContainmentOpposite",
            Code::UnitNotFound => "UnitNotFound",
            Code::ForbiddenComposition => "ForbiddenComposition",
            Code::FeatureClash => "FeatureClash",
            Code::RenameTargetMissing => "RenameTargetMissing",
            Code::AmbiguousMethod => "AmbiguousMethod",
            Code::ClosureError => "ClosureError",
            Code::LinearizationError => "LinearizationError",
            Code::TypeError => "TypeError",
            Code::UnknownFeature => "UnknownFeature",
            Code::UnknownMethod => "UnknownMethod",
            Code::ArityMismatch => "ArityMismatch",
            Code::OverrideError => "OverrideError",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub unit: String,
    pub pos: Pos,
    pub code: Code,
    pub message: String,
}

impl Diagnostic {
    pub fn new(unit: impl Into<String>, pos: Pos, code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            unit: unit.into(),
            pos,
            code,
            message: message.into(),
        }
    }

    /// Renders the diagnostic, optionally wrapping the code in ANSI bold red.
    pub fn render(&self, color: bool) -> String {
        if color {
            format!(
                "{}:{}:{}: \x1b[1;31m{}\x1b[0m {}",
                self.unit, self.pos.line, self.pos.col, self.code, self.message
            )
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {} {}",
            self.unit, self.pos.line, self.pos.col, self.code, self.message
        )
    }
}
