use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::composer::WovenModel;
use crate::expr::{Collection, Value};
use crate::meta::Feature;
use crate::types::{CollKind, PrimitiveType, TypeRef};

use super::Fault;

/// Index of an object inside its `ModelInstance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub u32);

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Obj {
    pub id: ObjId,
    /// The external id used in model files and traces.
    pub label: String,
    pub class_name: String,
    pub slots: BTreeMap<String, Value>,
    pub container: Option<(ObjId, String)>,
}

/// An object graph conforming to a woven model. Objects are never deleted,
/// so an `ObjId` stays valid for the lifetime of the instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelInstance {
    pub conforms_to: String,
    objects: Vec<Obj>,
    by_label: HashMap<String, ObjId>,
    /// Exactly the objects without a container, in insertion order.
    roots: Vec<ObjId>,
    next_fresh: u64,
}

impl std::hash::Hash for ModelInstance {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.conforms_to.hash(state);
        self.objects.hash(state);
        self.roots.hash(state);
    }
}

/// Initial slot value for a freshly created object.
pub fn default_value(feature: &Feature) -> Value {
    match feature.value_type() {
        TypeRef::Coll(kind, _) => Value::Coll(Collection::empty(kind)),
        TypeRef::Prim(PrimitiveType::Int) => Value::Int(0),
        TypeRef::Prim(PrimitiveType::Bool) => Value::Bool(false),
        TypeRef::Prim(PrimitiveType::String) => Value::Str(String::new()),
        _ => Value::Void,
    }
}

impl ModelInstance {
    pub fn new(conforms_to: impl Into<String>) -> Self {
        ModelInstance {
            conforms_to: conforms_to.into(),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[Obj] {
        &self.objects
    }

    pub fn ids(&self) -> impl Iterator<Item = ObjId> {
        (0..self.objects.len() as u32).map(ObjId)
    }

    pub fn roots(&self) -> &[ObjId] {
        &self.roots
    }

    pub fn obj(&self, id: ObjId) -> &Obj {
        &self.objects[id.0 as usize]
    }

    pub(crate) fn obj_mut(&mut self, id: ObjId) -> &mut Obj {
        &mut self.objects[id.0 as usize]
    }

    pub fn label(&self, id: ObjId) -> &str {
        self.objects.get(id.0 as usize).map(|o| o.label.as_str()).unwrap_or("?")
    }

    pub fn class_of(&self, id: ObjId) -> &str {
        &self.obj(id).class_name
    }

    pub fn by_label(&self, label: &str) -> Option<ObjId> {
        self.by_label.get(label).copied()
    }

    pub fn container(&self, id: ObjId) -> Option<ObjId> {
        self.obj(id).container.as_ref().map(|(c, _)| *c)
    }

    /// Creates an instance of `class` with every feature at its default.
    pub fn create(&mut self, woven: &WovenModel, class: &str) -> Result<ObjId, Fault> {
        let label = loop {
            self.next_fresh += 1;
            let l = format!("o{}", self.next_fresh);
            if !self.by_label.contains_key(&l) {
                break l;
            }
        };
        self.create_labeled(woven, class, label)
    }

    /// Like `create`, with a caller-chosen external id. The label must be
    /// unused.
    pub fn create_labeled(&mut self, woven: &WovenModel, class: &str, label: String) -> Result<ObjId, Fault> {
        let wc = woven
            .class(class)
            .ok_or_else(|| Fault::UnknownClass(class.to_string()))?;
        if wc.is_abstract {
            return Err(Fault::AbstractInstantiation(class.to_string()));
        }
        if self.by_label.contains_key(&label) {
            return Err(Fault::TypeFault(format!("duplicate object id `{label}`")));
        }
        let id = ObjId(self.objects.len() as u32);
        let slots = wc
            .features
            .iter()
            .map(|(n, f)| (n.clone(), default_value(&f.feature)))
            .collect();
        self.by_label.insert(label.clone(), id);
        self.objects.push(Obj {
            id,
            label,
            class_name: class.to_string(),
            slots,
            container: None,
        });
        self.roots.push(id);
        Ok(id)
    }

    pub fn get(&self, id: ObjId, feature: &str) -> Result<&Value, Fault> {
        let o = self.obj(id);
        o.slots.get(feature).ok_or_else(|| Fault::UnknownFeature {
            class: o.class_name.clone(),
            feature: feature.to_string(),
        })
    }

    pub(crate) fn set_container(&mut self, id: ObjId, container: Option<(ObjId, String)>) {
        let had = self.obj(id).container.is_some();
        let has = container.is_some();
        self.obj_mut(id).container = container;
        if had && !has {
            self.roots.push(id);
        } else if !had && has {
            self.roots.retain(|r| *r != id);
        }
    }

    /// Replaces the root order; used by the loader to honor the file's
    /// listing. `roots` must be a permutation of the current roots.
    pub(crate) fn reorder_roots(&mut self, roots: Vec<ObjId>) {
        debug_assert_eq!(roots.len(), self.roots.len());
        self.roots = roots;
    }

    /// All objects whose class conforms to `class`, in creation order.
    pub fn instances_of<'a>(&'a self, woven: &'a WovenModel, class: &'a str) -> impl Iterator<Item = ObjId> + 'a {
        self.objects
            .iter()
            .filter(move |o| woven.conforms(&o.class_name, class))
            .map(|o| o.id)
    }

    /// Reference targets currently held in a slot.
    pub fn targets(&self, id: ObjId, feature: &str) -> Vec<ObjId> {
        match self.obj(id).slots.get(feature) {
            Some(Value::Obj(o)) => vec![*o],
            Some(Value::Coll(c)) => c.items().iter().filter_map(Value::as_obj).collect(),
            _ => Vec::new(),
        }
    }
}

/// Kind used to store a many-valued feature.
pub(crate) fn slot_kind(feature: &Feature) -> CollKind {
    match feature.value_type() {
        TypeRef::Coll(k, _) => k,
        _ => CollKind::Sequence,
    }
}
