use std::fmt::Write;
use std::path::Path;

use super::woven::WovenModel;

fn base_name(unit: &str) -> &str {
    Path::new(unit).file_name().and_then(|n| n.to_str()).unwrap_or(unit)
}

/// Renders the composition as aspect traits, rich classes, a factory and
/// conversion pairs. Only classes that received an aspect get entries.
/// Output is deterministic for identical input.
pub fn emit_report(w: &WovenModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "package {}", w.package);
    let units: Vec<String> = w
        .units
        .iter()
        .map(|u| format!("{} ({})", base_name(&u.name), u.kind))
        .collect();
    let _ = writeln!(s, "units: {}", units.join(", "));

    let aspected: Vec<_> = w.ordered_classes().filter(|c| !c.aspects.is_empty()).collect();
    for c in &aspected {
        s.push('\n');
        for a in &c.aspects {
            let mut ext = vec![w.root_class.clone()];
            ext.extend(a.added_supertypes.iter().cloned());
            let _ = writeln!(
                s,
                "trait {}Aspect@{} extends {}",
                c.name,
                base_name(&a.unit),
                ext.join(", ")
            );
            for m in &a.members {
                let _ = writeln!(s, "  {m}");
            }
        }
    }
    if !aspected.is_empty() {
        s.push('\n');
    }
    for c in &aspected {
        let traits: Vec<String> = c
            .aspects
            .iter()
            .map(|a| format!("{}Aspect@{}", c.name, base_name(&a.unit)))
            .collect();
        let _ = writeln!(
            s,
            "class Rich{0} extends {0}Impl with {1}",
            c.name,
            traits.join(" with ")
        );
        let _ = writeln!(s, "  linearization: {}", c.linearization.join(" -> "));
    }
    s.push('\n');
    let _ = writeln!(s, "object RichFactory extends FactoryImpl");
    for c in aspected.iter().filter(|c| !c.is_abstract) {
        let _ = writeln!(s, "  override create{0}: {0} = new Rich{0}", c.name);
    }
    s.push('\n');
    let _ = writeln!(s, "object ImplicitConversion");
    for c in &aspected {
        let _ = writeln!(s, "  rich({0}) = Rich{0}", c.name);
        let _ = writeln!(s, "  rich({0}Aspect) = Rich{0}", c.name);
    }
    s
}
