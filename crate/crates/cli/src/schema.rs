//! Validation against the JSON schemas shipped in `schemas/`.
//!
//! Supports the subset of JSON Schema those files use: `type`, `const`,
//! `enum`, `properties`, `required`, `additionalProperties`, `items`,
//! `prefixItems`, `minItems`, `maxItems`, `minLength`, numeric bounds,
//! `anyOf` and local `$ref`s into `$defs`.

use serde_json::Value;

pub const EXPERIMENT_CONFIG: &str = include_str!("../../../schemas/experiment_config.schema.json");
pub const CLASSIFY_REPORT: &str = include_str!("../../../schemas/classify_report.schema.json");
pub const QUASIP_CLASSES: &str = include_str!("../../../schemas/quasip_classes.schema.json");
pub const RUN_MANIFEST: &str = include_str!("../../../schemas/run_manifest.schema.json");

/// Every violation found, as `path: message` strings.
pub fn validate(schema: &Value, doc: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    check(schema, schema, doc, "$", &mut errors);
    errors
}

/// Parse `schema_src` and validate `doc` against it.
pub fn validate_str(schema_src: &str, doc: &Value) -> Vec<String> {
    match serde_json::from_str::<Value>(schema_src) {
        Ok(schema) => validate(&schema, doc),
        Err(e) => vec![format!("schema does not parse: {e}")],
    }
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "null" => v.is_null(),
        "boolean" => v.is_boolean(),
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64() || v.as_f64().is_some_and(|x| x.fract() == 0.0),
        _ => false,
    }
}

fn resolve<'a>(root: &'a Value, reference: &str) -> Option<&'a Value> {
    let pointer = reference.strip_prefix('#')?;
    root.pointer(pointer)
}

fn check(root: &Value, schema: &Value, v: &Value, path: &str, errors: &mut Vec<String>) {
    let Some(s) = schema.as_object() else {
        if schema == &Value::Bool(false) {
            errors.push(format!("{path}: no value allowed here"));
        }
        return;
    };

    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        match resolve(root, r) {
            Some(target) => check(root, target, v, path, errors),
            None => errors.push(format!("{path}: unresolved reference {r}")),
        }
    }

    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(name) => type_matches(name, v),
            Value::Array(names) => names.iter().filter_map(Value::as_str).any(|n| type_matches(n, v)),
            _ => true,
        };
        if !ok {
            errors.push(format!("{path}: expected type {t}, found {v}"));
            return;
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            errors.push(format!("{path}: expected {c}, found {v}"));
        }
    }
    if let Some(Value::Array(options)) = s.get("enum") {
        if !options.contains(v) {
            errors.push(format!("{path}: {v} is not one of {}", Value::Array(options.clone())));
        }
    }
    if let Some(Value::Array(branches)) = s.get("anyOf") {
        let matched = branches.iter().any(|b| {
            let mut sink = Vec::new();
            check(root, b, v, path, &mut sink);
            sink.is_empty()
        });
        if !matched {
            errors.push(format!("{path}: matches none of the allowed forms"));
        }
    }

    if let Some(x) = v.as_f64() {
        let bound = |key: &str| s.get(key).and_then(Value::as_f64);
        if let Some(m) = bound("minimum") {
            if x < m {
                errors.push(format!("{path}: {x} is below the minimum {m}"));
            }
        }
        if let Some(m) = bound("maximum") {
            if x > m {
                errors.push(format!("{path}: {x} is above the maximum {m}"));
            }
        }
        if let Some(m) = bound("exclusiveMinimum") {
            if x <= m {
                errors.push(format!("{path}: {x} must exceed {m}"));
            }
        }
        if let Some(m) = bound("exclusiveMaximum") {
            if x >= m {
                errors.push(format!("{path}: {x} must be below {m}"));
            }
        }
    }

    if let Some(text) = v.as_str() {
        if let Some(min) = s.get("minLength").and_then(Value::as_u64) {
            if (text.chars().count() as u64) < min {
                errors.push(format!("{path}: string shorter than {min}"));
            }
        }
    }

    if let Some(items) = v.as_array() {
        let len = items.len() as u64;
        if let Some(min) = s.get("minItems").and_then(Value::as_u64) {
            if len < min {
                errors.push(format!("{path}: {len} items, at least {min} required"));
            }
        }
        if let Some(max) = s.get("maxItems").and_then(Value::as_u64) {
            if len > max {
                errors.push(format!("{path}: {len} items, at most {max} allowed"));
            }
        }
        let prefix = s.get("prefixItems").and_then(Value::as_array);
        let skip = prefix.map_or(0, |p| p.len());
        if let Some(prefix) = prefix {
            for (i, (item, sub)) in items.iter().zip(prefix).enumerate() {
                check(root, sub, item, &format!("{path}[{i}]"), errors);
            }
        }
        if let Some(item_schema) = s.get("items") {
            for (i, item) in items.iter().enumerate().skip(skip) {
                check(root, item_schema, item, &format!("{path}[{i}]"), errors);
            }
        }
    }

    if let Some(obj) = v.as_object() {
        if let Some(Value::Array(required)) = s.get("required") {
            for key in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    errors.push(format!("{path}: missing required field `{key}`"));
                }
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (key, val) in obj {
            let child = format!("{path}.{key}");
            match props.and_then(|p| p.get(key)) {
                Some(sub) => check(root, sub, val, &child, errors),
                None => match s.get("additionalProperties") {
                    Some(Value::Bool(false)) => errors.push(format!("{path}: unknown field `{key}`")),
                    Some(sub @ Value::Object(_)) => check(root, sub, val, &child, errors),
                    _ => {}
                },
            }
        }
    }
}
