use std::collections::{BTreeMap, HashSet};

use crate::meta::ROOT_CLASS;

/// Scala-style linearization: `C`, then the linearizations of the direct
/// supertypes from last to first, concatenated, keeping only the rightmost
/// occurrence of each class; the root always comes last.
///
/// `supers` maps each class to its ordered direct supertypes. Returns the
/// offending cycle on failure.
pub fn linearize(class: &str, supers: &BTreeMap<String, Vec<String>>) -> Result<Vec<String>, Vec<String>> {
    let mut memo = BTreeMap::new();
    lin(class, supers, &mut memo, &mut Vec::new())
}

/// Linearizes every class of the graph.
pub fn linearize_all(supers: &BTreeMap<String, Vec<String>>) -> Result<BTreeMap<String, Vec<String>>, Vec<String>> {
    let mut memo = BTreeMap::new();
    for c in supers.keys() {
        lin(c, supers, &mut memo, &mut Vec::new())?;
    }
    Ok(memo)
}

fn lin(
    class: &str,
    supers: &BTreeMap<String, Vec<String>>,
    memo: &mut BTreeMap<String, Vec<String>>,
    stack: &mut Vec<String>,
) -> Result<Vec<String>, Vec<String>> {
    if let Some(l) = memo.get(class) {
        return Ok(l.clone());
    }
    if class == ROOT_CLASS {
        return Ok(vec![ROOT_CLASS.to_string()]);
    }
    if let Some(at) = stack.iter().position(|c| c == class) {
        let mut cycle = stack[at..].to_vec();
        cycle.push(class.to_string());
        return Err(cycle);
    }
    stack.push(class.to_string());
    let mut concat: Vec<String> = Vec::new();
    for s in supers.get(class).map(Vec::as_slice).unwrap_or_default().iter().rev() {
        concat.extend(lin(s, supers, memo, stack)?.into_iter().filter(|c| c != ROOT_CLASS));
    }
    stack.pop();

    let mut seen = HashSet::new();
    let mut kept: Vec<String> = concat.into_iter().rev().filter(|c| seen.insert(c.clone())).collect();
    kept.reverse();

    let mut out = Vec::with_capacity(kept.len() + 2);
    out.push(class.to_string());
    out.extend(kept);
    out.push(ROOT_CLASS.to_string());
    memo.insert(class.to_string(), out.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &[&str])]) -> BTreeMap<String, Vec<String>> {
        edges
            .iter()
            .map(|(c, s)| (c.to_string(), s.iter().map(|x| x.to_string()).collect()))
            .collect()
    }

    #[test]
    fn lone_class() {
        assert_eq!(linearize("C", &graph(&[("C", &[])])).unwrap(), ["C", "Object"]);
    }

    #[test]
    fn pin_with_added_multiplicity_element() {
        let g = graph(&[
            ("Pin", &["ObjectNode", "MultiplicityElement"]),
            ("ObjectNode", &["ActivityNode"]),
            ("ActivityNode", &[]),
            ("MultiplicityElement", &[]),
        ]);
        assert_eq!(
            linearize("Pin", &g).unwrap(),
            ["Pin", "MultiplicityElement", "ObjectNode", "ActivityNode", "Object"]
        );
    }

    #[test]
    fn diamond_keeps_shared_ancestor_once() {
        let g = graph(&[("D", &["B", "C"]), ("B", &["A"]), ("C", &["A"]), ("A", &[])]);
        assert_eq!(linearize("D", &g).unwrap(), ["D", "C", "B", "A", "Object"]);
    }

    #[test]
    fn cycle_is_reported() {
        let g = graph(&[("A", &["B"]), ("B", &["A"])]);
        let cyc = linearize("A", &g).unwrap_err();
        assert_eq!(cyc, ["A", "B", "A"]);
    }
}
