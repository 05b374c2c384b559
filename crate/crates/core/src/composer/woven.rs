use std::collections::BTreeMap;
use std::sync::Arc;

use crate::behavior::{MethodDef, Renaming};
use crate::contracts::NamedClause;
use crate::meta::{Feature, OperationSig, ROOT_CLASS};
use crate::types::TypeRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WovenOrigin {
    BaseMetamodel,
    /// Defined by no metamodel; only the implicit root is woven this way.
    AspectOnly,
}

/// What one unit added to one class, for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectSummary {
    pub unit: String,
    pub added_supertypes: Vec<String>,
    /// Rendered member lines (`val x: Int`, `def run()`, `inv name`, ...).
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WovenFeature {
    pub feature: Feature,
    pub defining_class: String,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodEntry {
    pub defining_class: String,
    pub method: Arc<MethodDef>,
    pub unit: String,
}

/// A dispatchable operation name and its signature, as seen from one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigEntry {
    pub sig: OperationSig,
    pub defining_class: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatInvariant {
    pub owner: String,
    pub clause: NamedClause,
}

/// Pre- or postconditions contributed by one class level; they conjoin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractGroup {
    pub owner: String,
    pub clauses: Vec<NamedClause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WovenClass {
    pub name: String,
    pub origin: WovenOrigin,
    pub is_abstract: bool,
    pub metamodel: Option<String>,
    pub base_unit: Option<String>,
    /// One entry per contributing aspect unit, in require order.
    pub aspects: Vec<AspectSummary>,
    /// Declared supertypes followed by aspect-added ones.
    pub supertypes: Vec<String>,
    pub linearization: Vec<String>,
    pub features: BTreeMap<String, WovenFeature>,
    /// Features declared on this class itself, in declaration order.
    pub own_features: Vec<String>,
    pub own_methods: BTreeMap<String, MethodEntry>,
    pub own_signatures: BTreeMap<String, OperationSig>,
    pub renamings: Vec<Renaming>,
    pub method_table: BTreeMap<String, Vec<MethodEntry>>,
    pub signatures: BTreeMap<String, SigEntry>,
    pub own_invariants: Vec<NamedClause>,
    pub own_pre: BTreeMap<String, Vec<NamedClause>>,
    pub own_post: BTreeMap<String, Vec<NamedClause>>,
    pub flat_invariants: Vec<FlatInvariant>,
    pub flat_pre: BTreeMap<String, Vec<ContractGroup>>,
    pub flat_post: BTreeMap<String, Vec<ContractGroup>>,
}

impl WovenClass {
    pub fn new(name: impl Into<String>, origin: WovenOrigin) -> Self {
        WovenClass {
            name: name.into(),
            origin,
            is_abstract: false,
            metamodel: None,
            base_unit: None,
            aspects: Vec::new(),
            supertypes: Vec::new(),
            linearization: Vec::new(),
            features: BTreeMap::new(),
            own_features: Vec::new(),
            own_methods: BTreeMap::new(),
            own_signatures: BTreeMap::new(),
            renamings: Vec::new(),
            method_table: BTreeMap::new(),
            signatures: BTreeMap::new(),
            own_invariants: Vec::new(),
            own_pre: BTreeMap::new(),
            own_post: BTreeMap::new(),
            flat_invariants: Vec::new(),
            flat_pre: BTreeMap::new(),
            flat_post: BTreeMap::new(),
        }
    }

    pub fn aspect_units(&self) -> impl Iterator<Item = &str> {
        self.aspects.iter().map(|a| a.unit.as_str())
    }

    pub fn feature(&self, name: &str) -> Option<&Feature> {
        self.features.get(name).map(|f| &f.feature)
    }

    /// The method that runs for `op` on instances of this class.
    pub fn dispatch(&self, op: &str) -> Option<&MethodEntry> {
        self.method_table.get(op).and_then(|v| v.first())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitInfo {
    pub name: String,
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WovenModel {
    pub package: String,
    pub units: Vec<UnitInfo>,
    pub classes: BTreeMap<String, WovenClass>,
    /// Class names in definition order (base metamodels in require order,
    /// root last).
    pub class_order: Vec<String>,
    pub root_class: String,
    /// `Class.member` to the unit that contributed it.
    pub provenance: BTreeMap<String, String>,
}

impl WovenModel {
    pub fn class(&self, name: &str) -> Option<&WovenClass> {
        self.classes.get(name)
    }

    /// `sub` is `sup` or one of its descendants.
    pub fn conforms(&self, sub: &str, sup: &str) -> bool {
        if sup == ROOT_CLASS || sub == sup {
            return true;
        }
        self.classes
            .get(sub)
            .is_some_and(|c| c.linearization.iter().any(|l| l == sup))
    }

    pub fn feature(&self, class: &str, name: &str) -> Option<&Feature> {
        self.classes.get(class).and_then(|c| c.feature(name))
    }

    pub fn signature(&self, class: &str, op: &str) -> Option<&SigEntry> {
        self.classes.get(class).and_then(|c| c.signatures.get(op))
    }

    /// Type conformance for static checking. `Void` (the literal) conforms
    /// to every class and collection type; collection kinds convert freely.
    pub fn type_conforms(&self, actual: &TypeRef, expected: &TypeRef) -> bool {
        match (actual, expected) {
            (a, e) if a == e => true,
            (TypeRef::Void, TypeRef::Class(_) | TypeRef::Coll(..)) => true,
            (TypeRef::Class(a), TypeRef::Class(e)) => self.conforms(a, e),
            (TypeRef::Coll(_, a), TypeRef::Coll(_, e)) => self.type_conforms(a, e),
            _ => false,
        }
    }

    pub fn type_exists(&self, ty: &TypeRef) -> bool {
        ty.class_names().iter().all(|c| self.classes.contains_key(*c))
    }

    /// Classes in definition order.
    pub fn ordered_classes(&self) -> impl Iterator<Item = &WovenClass> {
        self.class_order.iter().filter_map(|n| self.classes.get(n))
    }
}
