//! Assignment semantics for structural features: opposite ends are kept in
//! sync and containment re-parents the contained object.

use crate::composer::WovenModel;
use crate::expr::{Collection, Value};
use crate::meta::{Feature, Reference};
use crate::types::{PrimitiveType, Upper};

use super::model::slot_kind;
use super::{Fault, ModelInstance, ObjId};

impl ModelInstance {
    fn feature_of(&self, woven: &WovenModel, id: ObjId, name: &str) -> Result<Feature, Fault> {
        let class = self.class_of(id);
        woven
            .feature(class, name)
            .cloned()
            .ok_or_else(|| Fault::UnknownFeature {
                class: class.to_string(),
                feature: name.to_string(),
            })
    }

    /// `obj.feature := value`. Single-valued references replace (and unlink)
    /// the old target; many-valued features are replaced element-wise.
    pub fn set_feature(&mut self, woven: &WovenModel, obj: ObjId, feature: &str, value: Value) -> Result<(), Fault> {
        match self.feature_of(woven, obj, feature)? {
            Feature::Attr(a) => {
                let v = if a.multiplicity.is_many() {
                    let Value::Coll(c) = value else {
                        return Err(type_fault(feature, "a collection", &value));
                    };
                    for item in c.items() {
                        check_prim(feature, a.ty, item)?;
                    }
                    Value::Coll(c.coerce(slot_kind(&Feature::Attr(a.clone()))))
                } else {
                    check_prim(feature, a.ty, &value)?;
                    value
                };
                self.obj_mut(obj).slots.insert(feature.to_string(), v);
                Ok(())
            }
            Feature::Ref(r) if r.multiplicity.is_many() => {
                let Value::Coll(c) = value else {
                    return Err(type_fault(feature, "a collection", &value));
                };
                let mut wanted = Vec::new();
                for item in c.items() {
                    match item {
                        Value::Obj(o) => {
                            self.check_target(woven, &r, *o)?;
                            if !wanted.contains(o) {
                                wanted.push(*o);
                            }
                        }
                        other => return Err(type_fault(feature, "an object", other)),
                    }
                }
                for old in self.targets(obj, feature) {
                    if !wanted.contains(&old) {
                        self.unlink(woven, obj, &r, old)?;
                    }
                }
                for o in &wanted {
                    self.link(woven, obj, &r, *o)?;
                }
                // Keep the order the caller gave.
                let ordered = Collection::new(slot_kind(&Feature::Ref(r.clone())), wanted.into_iter().map(Value::Obj));
                self.obj_mut(obj)
                    .slots
                    .insert(feature.to_string(), Value::Coll(ordered));
                Ok(())
            }
            Feature::Ref(r) => match value {
                Value::Void => {
                    if let Some(old) = self.targets(obj, feature).first().copied() {
                        self.unlink(woven, obj, &r, old)?;
                    }
                    Ok(())
                }
                Value::Obj(o) => self.link(woven, obj, &r, o),
                other => Err(type_fault(feature, "an object", &other)),
            },
        }
    }

    /// `obj.feature.add(value)`.
    pub fn add_to_feature(&mut self, woven: &WovenModel, obj: ObjId, feature: &str, value: Value) -> Result<(), Fault> {
        match self.feature_of(woven, obj, feature)? {
            Feature::Attr(a) if a.multiplicity.is_many() => {
                check_prim(feature, a.ty, &value)?;
                if let Some(Value::Coll(c)) = self.obj_mut(obj).slots.get_mut(feature) {
                    c.push(value);
                }
                Ok(())
            }
            Feature::Attr(_) => Err(Fault::TypeFault(format!(
                "`add` on single-valued attribute `{feature}`"
            ))),
            Feature::Ref(r) => {
                let Value::Obj(o) = value else {
                    return Err(type_fault(feature, "an object", &value));
                };
                if r.multiplicity.upper == Upper::Bounded(1) {
                    if let Some(cur) = self.targets(obj, feature).first() {
                        if *cur != o {
                            return Err(Fault::UpperBoundExceeded {
                                obj: self.label(obj).to_string(),
                                feature: feature.to_string(),
                            });
                        }
                    }
                }
                self.link(woven, obj, &r, o)
            }
        }
    }

    /// `obj.feature.remove(value)`; removing an absent element is a no-op.
    pub fn remove_from_feature(
        &mut self,
        woven: &WovenModel,
        obj: ObjId,
        feature: &str,
        value: &Value,
    ) -> Result<(), Fault> {
        match self.feature_of(woven, obj, feature)? {
            Feature::Attr(a) if a.multiplicity.is_many() => {
                if let Some(Value::Coll(c)) = self.obj_mut(obj).slots.get_mut(feature) {
                    c.remove(value);
                }
                Ok(())
            }
            Feature::Attr(_) => Err(Fault::TypeFault(format!(
                "`remove` on single-valued attribute `{feature}`"
            ))),
            Feature::Ref(r) => match value {
                Value::Obj(o) => self.unlink(woven, obj, &r, *o),
                Value::Void => Ok(()),
                other => Err(type_fault(feature, "an object", other)),
            },
        }
    }

    fn check_target(&self, woven: &WovenModel, r: &Reference, target: ObjId) -> Result<(), Fault> {
        let class = self.class_of(target);
        if woven.conforms(class, &r.target) {
            Ok(())
        } else {
            Err(Fault::TypeFault(format!(
                "`{}` expects {}, got {} of class {class}",
                r.name,
                r.target,
                self.label(target)
            )))
        }
    }

    fn opposite_of(&self, woven: &WovenModel, target: ObjId, r: &Reference) -> Option<Reference> {
        let opp = r.opposite.as_deref()?;
        woven
            .feature(self.class_of(target), opp)
            .and_then(|f| f.as_ref())
            .cloned()
    }

    /// True if `anc` is `obj` or contains it, transitively.
    fn is_ancestor_or_self(&self, anc: ObjId, obj: ObjId) -> bool {
        let mut cur = Some(obj);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = self.container(c);
        }
        false
    }

    fn holds(&self, a: ObjId, r: &str, b: ObjId) -> bool {
        match self.obj(a).slots.get(r) {
            Some(Value::Obj(o)) => *o == b,
            Some(Value::Coll(c)) => c.contains(&Value::Obj(b)),
            _ => false,
        }
    }

    fn raw_add(&mut self, a: ObjId, r: &Reference, b: ObjId) {
        let slot = self.obj_mut(a).slots.entry(r.name.clone()).or_insert(Value::Void);
        if r.multiplicity.is_many() {
            if let Value::Coll(c) = slot {
                c.push(Value::Obj(b));
            }
        } else {
            *slot = Value::Obj(b);
        }
    }

    fn raw_remove(&mut self, a: ObjId, r: &Reference, b: ObjId) {
        if let Some(slot) = self.obj_mut(a).slots.get_mut(&r.name) {
            match slot {
                Value::Coll(c) => {
                    c.remove(&Value::Obj(b));
                }
                Value::Obj(o) if *o == b => *slot = Value::Void,
                _ => {}
            }
        }
    }

    /// Makes `b ∈ a.r` hold, with opposite and containment bookkeeping.
    fn link(&mut self, woven: &WovenModel, a: ObjId, r: &Reference, b: ObjId) -> Result<(), Fault> {
        self.check_target(woven, r, b)?;
        if self.holds(a, &r.name, b) {
            return Ok(());
        }
        let s = self.opposite_of(woven, b, r);

        if r.is_containment && self.is_ancestor_or_self(b, a) {
            return Err(self.cycle_fault(a, b));
        }
        let s_contains = s.as_ref().is_some_and(|s| s.is_containment);
        if s_contains && self.is_ancestor_or_self(a, b) {
            return Err(self.cycle_fault(b, a));
        }

        if !r.multiplicity.is_many() {
            if let Some(old) = self.targets(a, &r.name).first().copied() {
                self.unlink(woven, a, r, old)?;
            }
        }
        if let Some(s) = &s {
            if !s.multiplicity.is_many() {
                if let Some(old) = self.targets(b, &s.name).first().copied() {
                    self.unlink(woven, b, s, old)?;
                }
            }
        }
        if r.is_containment {
            if let Some((p, f)) = self.obj(b).container.clone() {
                let pr = self.reference_of(woven, p, &f)?;
                self.unlink(woven, p, &pr, b)?;
            }
        }
        if s_contains {
            if let Some((p, f)) = self.obj(a).container.clone() {
                let pr = self.reference_of(woven, p, &f)?;
                self.unlink(woven, p, &pr, a)?;
            }
        }

        self.raw_add(a, r, b);
        if let Some(s) = &s {
            self.raw_add(b, s, a);
        }
        if r.is_containment {
            self.set_container(b, Some((a, r.name.clone())));
        }
        if let Some(s) = s.as_ref().filter(|s| s.is_containment) {
            self.set_container(a, Some((b, s.name.clone())));
        }
        Ok(())
    }

    /// Makes `b ∉ a.r` hold, clearing the opposite end and, for containment,
    /// returning the child to the roots.
    fn unlink(&mut self, woven: &WovenModel, a: ObjId, r: &Reference, b: ObjId) -> Result<(), Fault> {
        if !self.holds(a, &r.name, b) {
            return Ok(());
        }
        let s = self.opposite_of(woven, b, r);
        self.raw_remove(a, r, b);
        if let Some(s) = &s {
            self.raw_remove(b, s, a);
        }
        if r.is_containment {
            self.set_container(b, None);
        }
        if s.as_ref().is_some_and(|s| s.is_containment) {
            self.set_container(a, None);
        }
        Ok(())
    }

    fn reference_of(&self, woven: &WovenModel, obj: ObjId, name: &str) -> Result<Reference, Fault> {
        match self.feature_of(woven, obj, name)? {
            Feature::Ref(r) => Ok(r),
            Feature::Attr(_) => Err(Fault::TypeFault(format!("`{name}` is not a reference"))),
        }
    }

    fn cycle_fault(&self, parent: ObjId, child: ObjId) -> Fault {
        Fault::ContainmentCycle {
            parent: self.label(parent).to_string(),
            child: self.label(child).to_string(),
        }
    }
}

fn check_prim(feature: &str, ty: PrimitiveType, v: &Value) -> Result<(), Fault> {
    let ok = matches!(
        (ty, v),
        (PrimitiveType::Int, Value::Int(_))
            | (PrimitiveType::Bool, Value::Bool(_))
            | (PrimitiveType::String, Value::Str(_))
    );
    if ok {
        Ok(())
    } else {
        Err(type_fault(feature, ty.name(), v))
    }
}

fn type_fault(feature: &str, expected: &str, got: &Value) -> Fault {
    Fault::TypeFault(format!("`{feature}` expects {expected}, got {}", got.type_name()))
}
