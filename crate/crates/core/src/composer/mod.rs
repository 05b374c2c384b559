//! The mashup engine: loads required units, weaves aspects into metamodel
//! classes, linearizes the class graph and flattens contracts.

mod linearize;
mod report;
mod validate;
mod weave;
mod woven;

pub use linearize::{linearize, linearize_all};
pub use report::emit_report;
pub use validate::validate_woven;
pub use weave::{classify_pair, compose, merge_contributions, AspectContribution, CompositionCase, DefinitionSite};
pub use woven::{
    AspectSummary, ContractGroup, FlatInvariant, MethodEntry, SigEntry, UnitInfo, WovenClass, WovenFeature, WovenModel,
    WovenOrigin,
};

use std::collections::BTreeMap;
use std::path::{Component, Path, PathBuf};

use crate::behavior::{parse_behavior, typecheck_behavior, BehaviorModule};
use crate::contracts::{parse_contracts, typecheck_contracts, ContractModule};
use crate::diag::{Code, Diagnostic, Pos};
use crate::meta::{parse_metamodel, Metamodel};
use crate::syntax::Parser;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MashupManifest {
    pub package_name: String,
    pub requires: Vec<(String, Pos)>,
    pub main: Option<(String, String)>,
    pub source_unit: String,
}

/// `package P; require "unit"; ... main Class.op;`
pub fn parse_manifest(unit: &str, text: &str) -> Result<MashupManifest, Diagnostic> {
    let mut p = Parser::new(unit, text)?;
    p.expect_kw("package")?;
    let package_name = p.expect_ident()?;
    p.eat_sym(";");
    let mut requires = Vec::new();
    let mut main = None;
    while !p.at_eof() {
        let pos = p.pos();
        if p.eat_kw("require") {
            requires.push((p.expect_string()?, pos));
        } else if p.eat_kw("main") {
            let class = p.expect_ident()?;
            p.expect_sym(".")?;
            let op = p.expect_ident()?;
            main = Some((class, op));
        } else {
            return Err(p.error("expected `require` or `main`"));
        }
        p.eat_sym(";");
    }
    if requires.is_empty() {
        return Err(p.error("a manifest needs at least one `require`"));
    }
    Ok(MashupManifest {
        package_name,
        requires,
        main,
        source_unit: unit.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unit {
    Metamodel(Metamodel),
    Contracts(ContractModule),
    Behavior(BehaviorModule),
}

impl Unit {
    pub fn kind(&self) -> &'static str {
        match self {
            Unit::Metamodel(_) => "metamodel",
            Unit::Contracts(_) => "constraints",
            Unit::Behavior(_) => "behavior",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedUnit {
    /// Display name used in diagnostics and provenance.
    pub name: String,
    pub path: PathBuf,
    pub unit: Unit,
}

/// Source of unit text. Tests use `MapLoader` to avoid the file system.
pub trait UnitLoader {
    fn read(&self, path: &Path) -> std::io::Result<String>;
}

pub struct FsLoader;

impl UnitLoader for FsLoader {
    fn read(&self, path: &Path) -> std::io::Result<String> {
        std::fs::read_to_string(path)
    }
}

#[derive(Debug, Default, Clone)]
pub struct MapLoader {
    files: BTreeMap<PathBuf, String>,
}

impl MapLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, path: impl Into<PathBuf>, text: impl Into<String>) -> Self {
        self.files.insert(normalize(&path.into()), text.into());
        self
    }
}

impl UnitLoader for MapLoader {
    fn read(&self, path: &Path) -> std::io::Result<String> {
        self.files
            .get(&normalize(path))
            .cloned()
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, "no such unit"))
    }
}

/// Lexical path normalization (no file-system access).
pub fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}

/// Parses one unit, choosing the grammar by file extension.
pub fn parse_unit(name: &str, text: &str) -> Result<Unit, Vec<Diagnostic>> {
    let ext = Path::new(name).extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext {
        "mm" | "ecore" => parse_metamodel(name, text).map(Unit::Metamodel),
        "inv" | "ocl" => parse_contracts(name, text).map(Unit::Contracts).map_err(|d| vec![d]),
        "act" | "kmt" => parse_behavior(name, text).map(Unit::Behavior).map_err(|d| vec![d]),
        _ => Err(vec![Diagnostic::new(
            name,
            Pos::new(1, 1),
            Code::UnitNotFound,
            format!("unknown unit kind `.{ext}` (expected .mm, .inv or .act)"),
        )]),
    }
}

/// Loads every unit the manifest requires, plus the units those require,
/// each exactly once. A unit's own requirements are placed before it.
pub fn resolve_requires(
    manifest: &MashupManifest,
    base_dir: &Path,
    loader: &dyn UnitLoader,
) -> Result<Vec<LoadedUnit>, Vec<Diagnostic>> {
    let mut r = Resolver {
        loader,
        units: Vec::new(),
        active: Vec::new(),
        diags: Vec::new(),
    };
    for (req, pos) in &manifest.requires {
        r.load(&base_dir.join(req), &manifest.source_unit, *pos);
    }
    if r.diags.is_empty() {
        Ok(r.units)
    } else {
        Err(r.diags)
    }
}

struct Resolver<'a> {
    loader: &'a dyn UnitLoader,
    units: Vec<LoadedUnit>,
    active: Vec<PathBuf>,
    diags: Vec<Diagnostic>,
}

impl Resolver<'_> {
    fn load(&mut self, path: &Path, from_unit: &str, pos: Pos) {
        let path = normalize(path);
        if self.units.iter().any(|u| u.path == path) || self.active.contains(&path) {
            return;
        }
        let name = path.to_string_lossy().into_owned();
        let text = match self.loader.read(&path) {
            Ok(t) => t,
            Err(e) => {
                self.diags.push(Diagnostic::new(
                    from_unit,
                    pos,
                    Code::UnitNotFound,
                    format!("cannot read required unit `{name}`: {e}"),
                ));
                return;
            }
        };
        let unit = match parse_unit(&name, &text) {
            Ok(u) => u,
            Err(ds) => {
                self.diags.extend(ds);
                return;
            }
        };
        let nested: Vec<String> = match &unit {
            Unit::Metamodel(_) => Vec::new(),
            Unit::Contracts(c) => c.requires.clone(),
            Unit::Behavior(b) => b.requires.clone(),
        };
        self.active.push(path.clone());
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for req in nested {
            self.load(&dir.join(&req), &name, Pos::new(1, 1));
        }
        self.active.pop();
        self.units.push(LoadedUnit { name, path, unit });
    }
}

/// Type checks constraint and behavior units against a woven model.
pub fn typecheck_units(units: &[LoadedUnit], woven: &WovenModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for u in units {
        match &u.unit {
            Unit::Contracts(c) => out.extend(typecheck_contracts(c, woven)),
            Unit::Behavior(b) => out.extend(typecheck_behavior(b, woven)),
            Unit::Metamodel(_) => {}
        }
    }
    out
}

/// Parses, composes and type checks in-memory units given as
/// `(name, text)` pairs in require order.
pub fn compose_sources(sources: &[(&str, &str)]) -> Result<WovenModel, Vec<Diagnostic>> {
    let mut units = Vec::new();
    let mut diags = Vec::new();
    for (name, text) in sources {
        match parse_unit(name, text) {
            Ok(unit) => units.push(LoadedUnit {
                name: name.to_string(),
                path: PathBuf::from(name),
                unit,
            }),
            Err(ds) => diags.extend(ds),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let woven = compose("main", &units)?;
    let diags = typecheck_units(&units, &woven);
    if diags.is_empty() {
        Ok(woven)
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_with_three_concerns() {
        let m = parse_manifest(
            "fuml.mashup",
            "package fuml;\nrequire \"fuml.mm\" # abstract syntax\nrequire \"fuml.inv\";\nrequire \"fuml.act\";\nmain Activity.execute;",
        )
        .unwrap();
        assert_eq!(m.package_name, "fuml");
        let reqs: Vec<&str> = m.requires.iter().map(|(r, _)| r.as_str()).collect();
        assert_eq!(reqs, ["fuml.mm", "fuml.inv", "fuml.act"]);
        assert_eq!(m.main, Some(("Activity".into(), "execute".into())));
    }

    fn loader() -> MapLoader {
        MapLoader::new()
            .with("l/a.mm", "metamodel a { class A {} }")
            .with(
                "l/a.inv",
                "package a; require \"a.mm\"; aspect class A { inv t: true; }",
            )
            .with(
                "l/a.act",
                "package a; require \"a.mm\"; aspect class A { operation f() is do end }",
            )
    }

    #[test]
    fn three_units_load_in_order() {
        let m = parse_manifest(
            "l/m.mashup",
            "package a; require \"a.mm\"; require \"a.inv\"; require \"a.act\";",
        )
        .unwrap();
        let units = resolve_requires(&m, Path::new("l"), &loader()).unwrap();
        let kinds: Vec<&str> = units.iter().map(|u| u.unit.kind()).collect();
        assert_eq!(kinds, ["metamodel", "constraints", "behavior"]);
    }

    #[test]
    fn duplicate_and_transitive_requires_load_once() {
        let m = parse_manifest(
            "l/m.mashup",
            "package a; require \"a.act\"; require \"./a.mm\"; require \"a.act\";",
        )
        .unwrap();
        let units = resolve_requires(&m, Path::new("l"), &loader()).unwrap();
        let names: Vec<&str> = units.iter().map(|u| u.name.as_str()).collect();
        assert_eq!(names, ["l/a.mm", "l/a.act"]);
    }

    #[test]
    fn missing_unit() {
        let m = parse_manifest("m.mashup", "package a; require \"nope.mm\";").unwrap();
        let err = resolve_requires(&m, Path::new(""), &loader()).unwrap_err();
        assert_eq!(err[0].code, Code::UnitNotFound);
    }

    #[test]
    fn metamodel_only_language_composes() {
        let m = parse_manifest("l/m.mashup", "package a; require \"a.mm\";").unwrap();
        let units = resolve_requires(&m, Path::new("l"), &loader()).unwrap();
        assert_eq!(units.len(), 1);
        let w = compose("a", &units).unwrap();
        assert!(w.class("A").unwrap().method_table.is_empty());
    }
}
