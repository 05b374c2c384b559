use std::fmt::Write;

use crate::runtime::{ModelInstance, ObjId};
use crate::types::CollKind;

/// A run-time value. Collections are materialized and owned.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
    Void,
    Obj(ObjId),
    Coll(Collection),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Collection {
    pub kind: CollKind,
    items: Vec<Value>,
}

impl Collection {
    pub fn empty(kind: CollKind) -> Self {
        Collection {
            kind,
            items: Vec::new(),
        }
    }

    /// Builds a collection; unique kinds keep the first occurrence of each value.
    pub fn new(kind: CollKind, items: impl IntoIterator<Item = Value>) -> Self {
        let mut c = Collection::empty(kind);
        for v in items {
            c.push(v);
        }
        c
    }

    pub fn items(&self) -> &[Value] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Value> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.items.iter().any(|x| x.equals(v))
    }

    /// Appends `v`; a no-op for unique kinds that already hold it. Returns
    /// whether the collection changed.
    pub fn push(&mut self, v: Value) -> bool {
        if self.kind.is_unique() && self.contains(&v) {
            return false;
        }
        self.items.push(v);
        true
    }

    /// Removes the first element equal to `v`.
    pub fn remove(&mut self, v: &Value) -> bool {
        match self.items.iter().position(|x| x.equals(v)) {
            Some(i) => {
                self.items.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn coerce(self, kind: CollKind) -> Collection {
        if kind == self.kind {
            return self;
        }
        Collection::new(kind, self.items)
    }
}

impl Value {
    pub fn coll(kind: CollKind, items: impl IntoIterator<Item = Value>) -> Value {
        Value::Coll(Collection::new(kind, items))
    }

    pub fn as_obj(&self) -> Option<ObjId> {
        match self {
            Value::Obj(o) => Some(*o),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_coll(&self) -> Option<&Collection> {
        match self {
            Value::Coll(c) => Some(c),
            _ => None,
        }
    }

    /// Language-level equality: primitives structurally, objects by
    /// identity, sets regardless of order, other collections element-wise.
    pub fn equals(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Coll(a), Value::Coll(b)) => {
                if a.len() != b.len() {
                    return false;
                }
                if a.kind == CollKind::Set && b.kind == CollKind::Set {
                    a.items.iter().all(|x| b.contains(x))
                } else {
                    a.items.iter().zip(&b.items).all(|(x, y)| x.equals(y))
                }
            }
            _ => self == other,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "Int",
            Value::Bool(_) => "Bool",
            Value::Str(_) => "String",
            Value::Void => "Void",
            Value::Obj(_) => "object",
            Value::Coll(c) => c.kind.name(),
        }
    }

    /// Human-readable rendering, showing objects by their model id.
    pub fn render(&self, model: &ModelInstance) -> String {
        let mut s = String::new();
        self.render_into(model, &mut s);
        s
    }

    fn render_into(&self, model: &ModelInstance, s: &mut String) {
        match self {
            Value::Int(i) => {
                let _ = write!(s, "{i}");
            }
            Value::Bool(b) => {
                let _ = write!(s, "{b}");
            }
            Value::Str(x) => {
                let _ = write!(s, "{x:?}");
            }
            Value::Void => s.push_str("void"),
            Value::Obj(o) => s.push_str(model.label(*o)),
            Value::Coll(c) => {
                s.push_str(c.kind.name());
                s.push('[');
                for (i, v) in c.items.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    v.render_into(model, s);
                }
                s.push(']');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_kinds_dedupe_keeping_first() {
        let c = Collection::new(CollKind::OrderedSet, [Value::Int(2), Value::Int(1), Value::Int(2)]);
        assert_eq!(c.items(), &[Value::Int(2), Value::Int(1)]);
        let s = Collection::new(CollKind::Sequence, [Value::Int(2), Value::Int(2)]);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn sequence_to_set_coercion_preserves_first_occurrence() {
        let s = Collection::new(CollKind::Sequence, [3, 1, 3, 2, 1].map(Value::Int));
        let set = s.coerce(CollKind::Set);
        assert_eq!(set.items(), &[3, 1, 2].map(Value::Int));
    }

    #[test]
    fn set_equality_ignores_order() {
        let a = Value::coll(CollKind::Set, [1, 2].map(Value::Int));
        let b = Value::coll(CollKind::Set, [2, 1].map(Value::Int));
        assert!(a.equals(&b));
        let c = Value::coll(CollKind::Sequence, [2, 1].map(Value::Int));
        let d = Value::coll(CollKind::Sequence, [1, 2].map(Value::Int));
        assert!(!c.equals(&d));
    }
}
