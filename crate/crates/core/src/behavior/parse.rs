use std::sync::Arc;

use crate::diag::Diagnostic;
use crate::syntax::Parser;

use super::{AspectClass, BehaviorModule, MethodDef, Renaming};

pub fn parse_behavior(unit: &str, text: &str) -> Result<BehaviorModule, Diagnostic> {
    let mut p = Parser::new(unit, text)?;
    let (package, requires) = p.parse_unit_header()?;
    let mut aspects = Vec::new();
    while !p.at_eof() {
        aspects.push(parse_aspect(&mut p)?);
    }
    Ok(BehaviorModule {
        package,
        requires,
        aspects,
        source_unit: unit.to_string(),
    })
}

fn parse_aspect(p: &mut Parser) -> Result<AspectClass, Diagnostic> {
    let pos = p.pos();
    p.expect_kw("aspect")?;
    p.expect_kw("class")?;
    let mut a = AspectClass::new(p.expect_ident()?);
    a.pos = pos;
    if p.eat_kw("inherits") {
        loop {
            a.added_supertypes.push(p.expect_ident()?);
            if !p.eat_sym(",") {
                break;
            }
        }
    }
    p.expect_sym("{")?;
    loop {
        let mpos = p.pos();
        if p.eat_sym("}") {
            break;
        } else if p.eat_kw("attr") {
            a.added_attributes.push(p.parse_attr(mpos)?);
        } else if p.eat_kw("ref") {
            a.added_references.push(p.parse_ref(mpos)?);
        } else if p.at_kw("method") || p.at_kw("operation") {
            let overrides = p.eat_kw("method");
            if !overrides {
                p.expect_kw("operation")?;
            }
            let sig = p.parse_op_header(mpos)?;
            p.expect_kw("is")?;
            p.expect_kw("do")?;
            let body = p.parse_block(&["end"])?;
            p.expect_kw("end")?;
            p.eat_sym(";");
            a.methods.push(Arc::new(MethodDef { sig, body, overrides }));
        } else if p.eat_kw("rename") {
            let op = p.expect_ident()?;
            p.expect_kw("from")?;
            let from = p.expect_ident()?;
            p.expect_kw("as")?;
            let new_name = p.expect_ident()?;
            p.expect_sym(";")?;
            a.renamings.push(Renaming {
                op,
                from,
                new_name,
                pos: mpos,
            });
        } else {
            return Err(p.error("expected `attr`, `ref`, `method`, `operation`, `rename` or `}`"));
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::StmtKind;
    use crate::diag::Code;
    use crate::types::{CollKind, TypeRef};

    const EXECUTE: &str = r#"aspect class Activity inherits Executable{
// the semantics of executing an activity
method execute(runnable : Runnable) : Void is do
	// Creation of an activity node activation group
	runnable.execute()
	var group : ActivityNodeActivationGroup init ActivityNodeActivationGroup
				.new()
	group.execution := runnable
	runnable.group := group

	// Activation of all the activity nodes in the activity
	runnable.group.activate(self.node,
		self.edge)
	var outputNodeActivations :
		OrderedSet<ActivityParameterNode>
		init runnable.group.
	fumlGetOutputParameterNodeActivations()

	// Copy the values on the tokens offered by output parameter nodes to the corresponding output parameters
	outputNodeActivations.each {outputNodeActivation |
		var parameterValue : ParameterValue init ParameterValue.new()
		parameterValue.parameter := (outputNodeActivation.asType(ActivityParameterNode)).parameter
		var tokens : Set<Token> init outputNodeActivation.
					fumlGetTokens()
		tokens.each { token |
			var val : Value init (token.asType(ObjectToken)).val
			if (val != void) then
				parameterValue.values.add(val)
			end
		}
		runnable.fumlSetParameterValue(parameterValue)
	}
end
}
"#;

    fn with_header(body: &str) -> String {
        format!("package fuml;\nrequire \"fuml.mm\"\n{body}")
    }

    #[test]
    fn activity_execute_listing_parses() {
        let bm = parse_behavior("fuml.kmt", &with_header(EXECUTE)).unwrap();
        assert_eq!(bm.aspects.len(), 1);
        let a = &bm.aspects[0];
        assert_eq!(a.class_name, "Activity");
        assert_eq!(a.added_supertypes, vec!["Executable"]);
        assert_eq!(a.methods.len(), 1);
        let m = &a.methods[0];
        assert_eq!(m.sig.name, "execute");
        assert!(m.overrides);
        assert_eq!(m.sig.return_type, TypeRef::Void);
        // The listing's first statement is the `runnable.execute()` call; the
        // activation-group declaration follows it.
        assert!(matches!(m.body[0].kind, StmtKind::Expr(_)));
        match &m.body[1].kind {
            StmtKind::VarDecl { name, ty, init } => {
                assert_eq!(name, "group");
                assert_eq!(ty, &TypeRef::class("ActivityNodeActivationGroup"));
                assert!(init.is_some());
            }
            other => panic!("expected var decl, got {other:?}"),
        }
        let decl_of_outputs = m.body.iter().find_map(|s| match &s.kind {
            StmtKind::VarDecl { name, ty, .. } if name == "outputNodeActivations" => Some(ty.clone()),
            _ => None,
        });
        assert_eq!(
            decl_of_outputs,
            Some(TypeRef::coll(
                CollKind::OrderedSet,
                TypeRef::class("ActivityParameterNode")
            ))
        );
        assert!(matches!(m.body.last().unwrap().kind, StmtKind::Each { .. }));
    }

    #[test]
    fn empty_aspect() {
        let bm = parse_behavior("a.act", &with_header("aspect class A {}")).unwrap();
        let a = &bm.aspects[0];
        assert!(a.methods.is_empty() && a.added_attributes.is_empty() && a.renamings.is_empty());
    }

    #[test]
    fn pin_gains_two_supertypes() {
        let bm = parse_behavior(
            "p.act",
            &with_header("aspect class Pin inherits ObjectNode, MultiplicityElement { }"),
        )
        .unwrap();
        assert_eq!(
            bm.aspects[0].added_supertypes,
            vec!["ObjectNode", "MultiplicityElement"]
        );
    }

    #[test]
    fn is_ready_operation() {
        let src = with_header(
            "aspect class InputPinActivation {
               operation isReady() : Boolean is do
                 // \"lower\" from MultiplicityElement on node
                 var minimum : Integer init self.node.lower
               end
             }",
        );
        let bm = parse_behavior("f.act", &src).unwrap();
        let m = &bm.aspects[0].methods[0];
        assert!(!m.overrides);
        assert_eq!(m.sig.return_type, TypeRef::bool());
    }

    #[test]
    fn renaming_clause() {
        let bm = parse_behavior("d.act", &with_header("aspect class D { rename run from C as runC; }")).unwrap();
        let r = &bm.aspects[0].renamings[0];
        assert_eq!(
            (r.op.as_str(), r.from.as_str(), r.new_name.as_str()),
            ("run", "C", "runC")
        );
    }

    #[test]
    fn unterminated_method_reports_position() {
        let e = parse_behavior(
            "u.act",
            &with_header("aspect class A {\n operation f() is do\n var x : Int := 1\n"),
        )
        .unwrap_err();
        assert_eq!(e.code, Code::SyntaxError);
        assert!(e.pos.line >= 5, "{e}");
    }
}
