//! Key-path replacement diffs over canonical JSON.
//!
//! A diff is a list of operations addressed by JSON pointers. Objects are
//! descended up to [`MAX_DEPTH`] levels (top-level keys, then one entry
//! per overlay, then one field of that overlay); anything deeper is
//! replaced wholesale.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DiffOp {
    Add { path: String, value: Value },
    Replace { path: String, value: Value },
    Remove { path: String },
}

impl DiffOp {
    pub fn path(&self) -> &str {
        match self {
            DiffOp::Add { path, .. } | DiffOp::Replace { path, .. } | DiffOp::Remove { path } => path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoldError {
    #[error("path {0:?} is not a JSON pointer")]
    BadPointer(String),
    #[error("path {0:?} has no parent object")]
    MissingParent(String),
    #[error("path {0:?} does not exist")]
    MissingTarget(String),
}

fn escape(segment: &str) -> String {
    segment.replace('~', "~0").replace('/', "~1")
}

fn unescape(segment: &str) -> String {
    segment.replace("~1", "/").replace("~0", "~")
}

/// Operations turning `old` into `new`. Equal inputs give no operations.
pub fn diff(old: &Value, new: &Value) -> Vec<DiffOp> {
    let mut ops = Vec::new();
    walk(old, new, String::new(), 0, &mut ops);
    ops
}

fn walk(old: &Value, new: &Value, path: String, depth: usize, ops: &mut Vec<DiffOp>) {
    if old == new {
        return;
    }
    match (old, new) {
        (Value::Object(a), Value::Object(b)) if depth < MAX_DEPTH => {
            for (k, va) in a {
                let p = format!("{path}/{}", escape(k));
                match b.get(k) {
                    Some(vb) => walk(va, vb, p, depth + 1, ops),
                    None => ops.push(DiffOp::Remove { path: p }),
                }
            }
            for (k, vb) in b {
                if !a.contains_key(k) {
                    ops.push(DiffOp::Add {
                        path: format!("{path}/{}", escape(k)),
                        value: vb.clone(),
                    });
                }
            }
        }
        _ => ops.push(DiffOp::Replace {
            path,
            value: new.clone(),
        }),
    }
}

fn split(path: &str) -> Result<Option<(Vec<String>, String)>, FoldError> {
    if path.is_empty() {
        return Ok(None);
    }
    let rest = path
        .strip_prefix('/')
        .ok_or_else(|| FoldError::BadPointer(path.to_owned()))?;
    let mut parts: Vec<String> = rest.split('/').map(unescape).collect();
    let last = parts.pop().expect("split yields at least one part");
    Ok(Some((parts, last)))
}

fn parent_mut<'a>(root: &'a mut Value, parents: &[String], path: &str) -> Result<&'a mut Map<String, Value>, FoldError> {
    let mut cur = root;
    for seg in parents {
        cur = cur
            .as_object_mut()
            .and_then(|m| m.get_mut(seg))
            .ok_or_else(|| FoldError::MissingParent(path.to_owned()))?;
    }
    cur.as_object_mut()
        .ok_or_else(|| FoldError::MissingParent(path.to_owned()))
}

/// Applies one operation in place.
pub fn apply(root: &mut Value, op: &DiffOp) -> Result<(), FoldError> {
    let path = op.path();
    let Some((parents, key)) = split(path)? else {
        return match op {
            DiffOp::Add { value, .. } | DiffOp::Replace { value, .. } => {
                *root = value.clone();
                Ok(())
            }
            DiffOp::Remove { .. } => Err(FoldError::MissingTarget(path.to_owned())),
        };
    };
    let parent = parent_mut(root, &parents, path)?;
    match op {
        DiffOp::Add { value, .. } => {
            parent.insert(key, value.clone());
        }
        DiffOp::Replace { value, .. } => {
            let slot = parent
                .get_mut(&key)
                .ok_or_else(|| FoldError::MissingTarget(path.to_owned()))?;
            *slot = value.clone();
        }
        DiffOp::Remove { .. } => {
            parent
                .remove(&key)
                .ok_or_else(|| FoldError::MissingTarget(path.to_owned()))?;
        }
    }
    Ok(())
}

/// Folds a stream of diffs over a snapshot.
pub fn fold<'a, I>(snapshot: &Value, diffs: I) -> Result<Value, FoldError>
where
    I: IntoIterator<Item = &'a [DiffOp]>,
{
    let mut state = snapshot.clone();
    for ops in diffs {
        for op in ops {
            apply(&mut state, op)?;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn equal_values_have_empty_diff() {
        let v = json!({"a": 1, "overlays": {"x": {"focus": null}}});
        assert!(diff(&v, &v).is_empty());
    }

    #[test]
    fn diff_addresses_overlay_fields() {
        let a = json!({"scene_id": "s", "overlays": {"trend": {"focus": null, "version": 0}}});
        let b = json!({"scene_id": "s", "overlays": {"trend": {"focus": {"index": 3}, "version": 0}}});
        let ops = diff(&a, &b);
        assert_eq!(
            ops,
            vec![DiffOp::Replace {
                path: "/overlays/trend/focus".into(),
                value: json!({"index": 3}),
            }]
        );
        assert_eq!(fold(&a, [ops.as_slice()]).unwrap(), b);
    }

    #[test]
    fn keys_with_slashes_round_trip() {
        let a = json!({"overlays": {}});
        let b = json!({"overlays": {"a/b~c": {"v": 1}}});
        let ops = diff(&a, &b);
        assert_eq!(ops[0].path(), "/overlays/a~1b~0c");
        assert_eq!(fold(&a, [ops.as_slice()]).unwrap(), b);
    }

    #[test]
    fn removing_a_missing_key_fails() {
        let mut v = json!({"a": 1});
        let err = apply(&mut v, &DiffOp::Remove { path: "/b".into() });
        assert_eq!(err, Err(FoldError::MissingTarget("/b".into())));
    }

    fn leaf() -> impl Strategy<Value = Value> {
        prop_oneof![
            Just(Value::Null),
            any::<bool>().prop_map(Value::Bool),
            (-1000i64..1000).prop_map(|n| json!(n)),
            "[a-z]{0,4}".prop_map(Value::String),
        ]
    }

    fn tree() -> impl Strategy<Value = Value> {
        leaf().prop_recursive(4, 48, 5, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Array),
                prop::collection::btree_map("[a-d/~]{1,3}", inner, 0..5)
                    .prop_map(|m| Value::Object(m.into_iter().collect())),
            ]
        })
    }

    proptest! {
        #[test]
        fn fold_of_diff_reproduces_target(a in tree(), b in tree()) {
            let ops = diff(&a, &b);
            prop_assert_eq!(fold(&a, [ops.as_slice()]).unwrap(), b);
        }
    }
}
