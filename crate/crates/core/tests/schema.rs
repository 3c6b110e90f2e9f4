use serde_json::Value;

use blochsim_core::experiments::{preset, PRESET_NAMES};

fn schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/scenario.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn resolve<'a>(root: &'a Value, node: &'a Value) -> &'a Value {
    match node.get("$ref").and_then(Value::as_str) {
        Some(r) => root.pointer(r.trim_start_matches('#')).unwrap(),
        None => node,
    }
}

/// Object branch of `node` matching `value`: the one whose `kind` const agrees, else the only object.
fn branch<'a>(root: &'a Value, node: &'a Value, value: &Value) -> &'a Value {
    let node = resolve(root, node);
    let Some(options) = node.get("oneOf").and_then(Value::as_array) else {
        return node;
    };
    let objects: Vec<&Value> = options
        .iter()
        .map(|o| resolve(root, o))
        .filter(|o| o.get("properties").is_some())
        .collect();
    match value.get("kind") {
        Some(kind) => objects
            .into_iter()
            .find(|o| o.pointer("/properties/kind/const") == Some(kind))
            .unwrap_or_else(|| panic!("no schema branch for kind {kind}")),
        None => objects[0],
    }
}

fn walk(root: &Value, node: &Value, value: &Value, path: &str) {
    let Value::Object(map) = value else { return };
    let node = branch(root, node, value);
    assert_eq!(node.get("additionalProperties"), Some(&Value::Bool(false)), "{path} is open");
    let props = node["properties"].as_object().unwrap();
    for (k, v) in map {
        let sub = props.get(k).unwrap_or_else(|| panic!("{path}.{k} missing from schema"));
        walk(root, sub, v, &format!("{path}.{k}"));
    }
    for req in node.get("required").and_then(Value::as_array).into_iter().flatten() {
        assert!(map.contains_key(req.as_str().unwrap()), "{path} lacks required {req}");
    }
}

#[test]
fn schema_describes_every_preset_key() {
    let root = schema();
    for name in PRESET_NAMES {
        let v = preset(name).unwrap().resolved().unwrap().to_value();
        walk(&root, &root, &v, name);
    }
}
