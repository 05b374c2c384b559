//! The abstract-syntax concern: metamodels made of classes, attributes,
//! references and operation signatures.

mod parse;
mod print;
mod validate;

pub use parse::{parse_metamodel, parse_metamodel_unchecked};
pub use print::pretty_print;
pub use validate::{supertype_closure, validate_metamodel};

use crate::diag::Pos;
use crate::types::{Bounds, PrimitiveType, TypeRef};

/// Name of the implicit root class every class inherits from.
pub const ROOT_CLASS: &str = "Object";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metamodel {
    pub name: String,
    pub classes: Vec<MetaClass>,
    pub source_unit: String,
}

impl Metamodel {
    pub fn class(&self, name: &str) -> Option<&MetaClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn qualified_name(&self, class: &str) -> String {
        format!("{}.{}", self.name, class)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassOrigin {
    BaseMetamodel,
    Aspect,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaClass {
    pub name: String,
    pub is_abstract: bool,
    pub supertypes: Vec<String>,
    pub attributes: Vec<Attribute>,
    pub references: Vec<Reference>,
    pub operations: Vec<OperationSig>,
    pub origin: ClassOrigin,
    pub pos: Pos,
}

impl MetaClass {
    pub fn new(name: impl Into<String>) -> Self {
        MetaClass {
            name: name.into(),
            is_abstract: false,
            supertypes: Vec::new(),
            attributes: Vec::new(),
            references: Vec::new(),
            operations: Vec::new(),
            origin: ClassOrigin::BaseMetamodel,
            pos: Pos::default(),
        }
    }

    pub fn reference(&self, name: &str) -> Option<&Reference> {
        self.references.iter().find(|r| r.name == name)
    }

    /// Attribute and reference names in declaration order.
    pub fn feature_names(&self) -> impl Iterator<Item = (&str, Pos)> {
        self.attributes
            .iter()
            .map(|a| (a.name.as_str(), a.pos))
            .chain(self.references.iter().map(|r| (r.name.as_str(), r.pos)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub ty: PrimitiveType,
    pub multiplicity: Bounds,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reference {
    pub name: String,
    pub target: String,
    pub multiplicity: Bounds,
    pub is_containment: bool,
    pub opposite: Option<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationSig {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: TypeRef,
    pub pos: Pos,
}

impl OperationSig {
    pub fn same_shape(&self, other: &OperationSig) -> bool {
        self.return_type == other.return_type
            && self.params.len() == other.params.len()
            && self.params.iter().zip(&other.params).all(|(a, b)| a.ty == b.ty)
    }
}

/// A structural feature: either kind, with the information the runtime needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feature {
    Attr(Attribute),
    Ref(Reference),
}

impl Feature {
    pub fn name(&self) -> &str {
        match self {
            Feature::Attr(a) => &a.name,
            Feature::Ref(r) => &r.name,
        }
    }

    pub fn multiplicity(&self) -> Bounds {
        match self {
            Feature::Attr(a) => a.multiplicity,
            Feature::Ref(r) => r.multiplicity,
        }
    }

    pub fn is_many(&self) -> bool {
        self.multiplicity().is_many()
    }

    pub fn as_ref(&self) -> Option<&Reference> {
        match self {
            Feature::Ref(r) => Some(r),
            Feature::Attr(_) => None,
        }
    }

    /// The element type (ignoring multiplicity).
    pub fn element_type(&self) -> TypeRef {
        match self {
            Feature::Attr(a) => TypeRef::Prim(a.ty),
            Feature::Ref(r) => TypeRef::Class(r.target.clone()),
        }
    }

    /// Many-valued references are ordered sets, many-valued attributes sequences.
    pub fn value_type(&self) -> TypeRef {
        use crate::types::CollKind;
        let elem = self.element_type();
        match (self.is_many(), self) {
            (false, _) => elem,
            (true, Feature::Ref(_)) => TypeRef::coll(CollKind::OrderedSet, elem),
            (true, Feature::Attr(_)) => TypeRef::coll(CollKind::Sequence, elem),
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Feature::Attr(a) => a.pos,
            Feature::Ref(r) => r.pos,
        }
    }
}
