//! Generator for the recursive benchmark activity: a Hilbert-style
//! expansion, unrolled into one linear chain of actions.
//!
//! Depth `d` emits one "turn" action followed by four depth `d-1`
//! expansions; depth 0 is a single "draw" action. So the action count is
//! `A(0) = 1`, `A(d) = 4 A(d-1) + 1 = (4^(d+1) - 1) / 3`.

use serde_json::{json, Value as Json};

/// Number of actions at `depth`; also the number of `NodeExecuted` events
/// one run produces.
pub fn action_count(depth: u32) -> u64 {
    (4u64.pow(depth + 1) - 1) / 3
}

/// Objects in the model: activity, initial, final, actions, and one edge
/// more than there are actions.
pub fn element_count(depth: u32) -> u64 {
    2 * action_count(depth) + 4
}

fn names(depth: u32, path: &str, out: &mut Vec<String>) {
    if depth == 0 {
        out.push(format!("draw{path}"));
        return;
    }
    out.push(format!("turn{path}"));
    for k in 0..4 {
        names(depth - 1, &format!("{path}.{k}"), out);
    }
}

/// The model file text for `depth`.
pub fn recursive_model(depth: u32) -> String {
    let mut actions = Vec::new();
    names(depth, "", &mut actions);
    let mut chain = vec!["initial".to_string()];
    chain.extend((0..actions.len()).map(|i| format!("a{i}")));
    chain.push("final".to_string());

    let mut objects = vec![json!({
        "id": "act",
        "class": "Activity",
        "slots": {
            "name": format!("Hilbert{depth}"),
            "node": chain.iter().map(|n| format!("@{n}")).collect::<Vec<_>>(),
            "edge": (0..chain.len() - 1).map(|i| format!("@e{i}")).collect::<Vec<_>>(),
        }
    })];
    objects.push(json!({"id": "initial", "class": "InitialNode", "slots": {"name": "start"}}));
    for (i, name) in actions.iter().enumerate() {
        objects.push(json!({"id": format!("a{i}"), "class": "OpaqueAction", "slots": {"name": name}}));
    }
    objects.push(json!({"id": "final", "class": "FinalNode", "slots": {"name": "end"}}));
    for (i, pair) in chain.windows(2).enumerate() {
        objects.push(json!({
            "id": format!("e{i}"),
            "class": "ControlFlow",
            "slots": {"source": format!("@{}", pair[0]), "target": format!("@{}", pair[1])}
        }));
    }
    let doc: Json = json!({"conformsTo": "fuml", "objects": objects, "roots": ["@act"]});
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_recursion() {
        let mut a = 1;
        for d in 0..6 {
            assert_eq!(action_count(d), a);
            let mut v = Vec::new();
            names(d, "", &mut v);
            assert_eq!(v.len() as u64, a);
            a = 4 * a + 1;
        }
    }

    #[test]
    fn depth_four_size() {
        assert_eq!(element_count(4), 686);
        let doc: Json = serde_json::from_str(&recursive_model(4)).unwrap();
        assert_eq!(doc["objects"].as_array().unwrap().len(), 686);
    }

    #[test]
    fn depth_zero_is_a_single_action() {
        assert_eq!(action_count(0), 1);
        assert_eq!(element_count(0), 6);
    }
}
