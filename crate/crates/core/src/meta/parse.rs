use crate::diag::Diagnostic;
use crate::syntax::Parser;

use super::{validate_metamodel, ClassOrigin, MetaClass, Metamodel};

/// Parses a `.mm` unit and validates it; any invariant violation is returned
/// as diagnostics.
pub fn parse_metamodel(unit: &str, text: &str) -> Result<Metamodel, Vec<Diagnostic>> {
    let mm = parse_metamodel_unchecked(unit, text).map_err(|d| vec![d])?;
    let diags = validate_metamodel(&mm);
    if diags.is_empty() {
        Ok(mm)
    } else {
        Err(diags)
    }
}

/// Syntax only; no resolution or well-formedness checks.
pub fn parse_metamodel_unchecked(unit: &str, text: &str) -> Result<Metamodel, Diagnostic> {
    let mut p = Parser::new(unit, text)?;
    p.expect_kw("metamodel")?;
    let name = p.expect_ident()?;
    p.expect_sym("{")?;
    let mut classes = Vec::new();
    while !p.at_sym("}") {
        classes.push(parse_class(&mut p)?);
    }
    p.expect_sym("}")?;
    if !p.at_eof() {
        return Err(p.error("trailing input after metamodel"));
    }
    Ok(Metamodel {
        name,
        classes,
        source_unit: unit.to_string(),
    })
}

fn parse_class(p: &mut Parser) -> Result<MetaClass, Diagnostic> {
    let pos = p.pos();
    let is_abstract = p.eat_kw("abstract");
    p.expect_kw("class")?;
    let mut class = MetaClass::new(p.expect_ident()?);
    class.is_abstract = is_abstract;
    class.origin = ClassOrigin::BaseMetamodel;
    class.pos = pos;
    if p.eat_kw("extends") {
        loop {
            class.supertypes.push(p.expect_ident()?);
            if !p.eat_sym(",") {
                break;
            }
        }
    }
    p.expect_sym("{")?;
    loop {
        let fpos = p.pos();
        if p.eat_kw("attr") {
            class.attributes.push(p.parse_attr(fpos)?);
        } else if p.eat_kw("ref") {
            class.references.push(p.parse_ref(fpos)?);
        } else if p.eat_kw("op") {
            class.operations.push(p.parse_op_header(fpos)?);
            p.expect_sym(";")?;
        } else if p.eat_sym("}") {
            break;
        } else {
            return Err(p.error("expected `attr`, `ref`, `op` or `}`"));
        }
    }
    Ok(class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Code;
    use crate::types::{Bounds, PrimitiveType};

    #[test]
    fn activity_with_containment() {
        let mm = parse_metamodel(
            "f.mm",
            "metamodel fuml {
               class Activity { attr name: String; ref node: ActivityNode[*] containment; }
               abstract class ActivityNode {}
             }",
        )
        .unwrap();
        let act = mm.class("Activity").unwrap();
        assert_eq!(act.attributes.len(), 1);
        assert_eq!(act.attributes[0].ty, PrimitiveType::String);
        assert_eq!(act.references.len(), 1);
        assert!(act.references[0].is_containment);
        assert_eq!(act.references[0].multiplicity, Bounds::MANY);
        assert!(mm.class("ActivityNode").unwrap().is_abstract);
    }

    #[test]
    fn empty_body() {
        let mm = parse_metamodel("e.mm", "metamodel empty {}").unwrap();
        assert!(mm.classes.is_empty());
        assert_eq!(mm.name, "empty");
    }

    #[test]
    fn dangling_supertype_names_target() {
        let errs = parse_metamodel("a.mm", "metamodel m { class A extends B {} }").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].code, Code::ResolutionError);
        assert!(errs[0].message.contains("`B`"), "{}", errs[0]);
        assert_eq!((errs[0].pos.line, errs[0].pos.col), (1, 15));
    }

    #[test]
    fn syntax_error_is_positioned() {
        let err = parse_metamodel("s.mm", "metamodel m {\n class A { attr x Int; } }").unwrap_err();
        assert_eq!(err[0].code, Code::SyntaxError);
        assert_eq!(err[0].pos.line, 2);
    }

    #[test]
    fn op_signatures_and_bounds() {
        let mm = parse_metamodel(
            "o.mm",
            "metamodel m { class A { attr xs: Int[0..*]; ref b: A[0..1]; op run(n: Int, other: A): Bool; op go(); } }",
        )
        .unwrap();
        let a = mm.class("A").unwrap();
        assert!(a.attributes[0].multiplicity.is_many());
        assert_eq!(a.references[0].multiplicity, Bounds::OPTIONAL);
        assert_eq!(a.operations.len(), 2);
        assert_eq!(a.operations[0].params.len(), 2);
    }
}
