use std::fmt::Write;

use crate::types::{Bounds, TypeRef};

use super::Metamodel;

/// Renders a metamodel in the `.mm` syntax accepted by `parse_metamodel`.
pub fn pretty_print(mm: &Metamodel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "metamodel {} {{", mm.name);
    for c in &mm.classes {
        let abs = if c.is_abstract { "abstract " } else { "" };
        let _ = write!(s, "  {abs}class {}", c.name);
        if !c.supertypes.is_empty() {
            let _ = write!(s, " extends {}", c.supertypes.join(", "));
        }
        if c.attributes.is_empty() && c.references.is_empty() && c.operations.is_empty() {
            s.push_str(" {}\n");
            continue;
        }
        s.push_str(" {\n");
        for a in &c.attributes {
            let _ = writeln!(s, "    attr {}: {}{};", a.name, a.ty.name(), mult(a.multiplicity));
        }
        for r in &c.references {
            let _ = write!(s, "    ref {}: {}{}", r.name, r.target, mult(r.multiplicity));
            if r.is_containment {
                s.push_str(" containment");
            }
            if let Some(o) = &r.opposite {
                let _ = write!(s, " opposite {o}");
            }
            s.push_str(";\n");
        }
        for op in &c.operations {
            let params: Vec<String> = op.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
            let _ = write!(s, "    op {}({})", op.name, params.join(", "));
            if op.return_type != TypeRef::Void {
                let _ = write!(s, ": {}", op.return_type);
            }
            s.push_str(";\n");
        }
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

fn mult(b: Bounds) -> String {
    if b == Bounds::ONE {
        String::new()
    } else {
        b.to_string()
    }
}
