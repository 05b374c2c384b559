//! Semantic types shared by the metamodel, the expression language and the
//! action language.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveType {
    Int,
    Bool,
    String,
}

impl PrimitiveType {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "Int" | "Integer" => Some(PrimitiveType::Int),
            "Bool" | "Boolean" => Some(PrimitiveType::Bool),
            "String" => Some(PrimitiveType::String),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveType::Int => "Int",
            PrimitiveType::Bool => "Bool",
            PrimitiveType::String => "String",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollKind {
    Set,
    OrderedSet,
    Sequence,
}

impl CollKind {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "Set" => Some(CollKind::Set),
            "OrderedSet" => Some(CollKind::OrderedSet),
            "Sequence" => Some(CollKind::Sequence),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CollKind::Set => "Set",
            CollKind::OrderedSet => "OrderedSet",
            CollKind::Sequence => "Sequence",
        }
    }

    pub fn is_unique(self) -> bool {
        matches!(self, CollKind::Set | CollKind::OrderedSet)
    }
}

/// A semantic type as written in signatures, variable declarations and
/// feature declarations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Prim(PrimitiveType),
    Void,
    Class(String),
    Coll(CollKind, Box<TypeRef>),
}

impl TypeRef {
    pub fn int() -> Self {
        TypeRef::Prim(PrimitiveType::Int)
    }

    pub fn bool() -> Self {
        TypeRef::Prim(PrimitiveType::Bool)
    }

    pub fn string() -> Self {
        TypeRef::Prim(PrimitiveType::String)
    }

    pub fn class(name: impl Into<String>) -> Self {
        TypeRef::Class(name.into())
    }

    pub fn coll(kind: CollKind, elem: TypeRef) -> Self {
        TypeRef::Coll(kind, Box::new(elem))
    }

    /// Every class name mentioned by this type.
    pub fn class_names(&self) -> Vec<&str> {
        match self {
            TypeRef::Class(c) => vec![c.as_str()],
            TypeRef::Coll(_, e) => e.class_names(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Prim(p) => f.write_str(p.name()),
            TypeRef::Void => f.write_str("Void"),
            TypeRef::Class(c) => f.write_str(c),
            TypeRef::Coll(k, e) => write!(f, "{}<{}>", k.name(), e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Upper {
    Bounded(u32),
    Many,
}

/// Multiplicity bounds. Well-formed bounds have an upper of 1 or `*` and
/// `lower <= upper`; anything else is reported by metamodel validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub lower: u32,
    pub upper: Upper,
}

impl Bounds {
    pub const ONE: Bounds = Bounds {
        lower: 1,
        upper: Upper::Bounded(1),
    };
    pub const OPTIONAL: Bounds = Bounds {
        lower: 0,
        upper: Upper::Bounded(1),
    };
    pub const MANY: Bounds = Bounds {
        lower: 0,
        upper: Upper::Many,
    };

    pub fn is_many(&self) -> bool {
        match self.upper {
            Upper::Many => true,
            Upper::Bounded(n) => n > 1,
        }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::ONE
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Upper::Many if self.lower == 0 => f.write_str("[*]"),
            Upper::Many => write!(f, "[{}..*]", self.lower),
            Upper::Bounded(u) => write!(f, "[{}..{}]", self.lower, u),
        }
    }
}
