//! On-disk description of chart categories and fibered covers.
//!
//! ```json
//! {
//!   "objects": [{ "id": "U", "vertices": ["a", "b"], "maximal_simplices": [["a", "b"]] }],
//!   "morphisms": [{ "id": "id_U", "source": "U", "target": "U",
//!                   "vertex_map": { "a": "a", "b": "b" }, "identity": true }],
//!   "composition": []
//! }
//! ```
//!
//! Each object needs exactly one morphism flagged `"identity": true`.
//! Composites with an identity are implied; every other composable pair
//! must appear in `"composition"`. Fibered covers add `"fiber"` and
//! `"sub_objects"`, whose simplices list product vertices as
//! `[chart_vertex, fiber_vertex]` pairs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub objects: Vec<ObjectSpec>,
    pub morphisms: Vec<MorphismSpec>,
    #[serde(default)]
    pub composition: Vec<CompositionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sub_objects: Vec<SubObjectSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<FamilySpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: String,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub maximal_simplices: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub id: String,
    pub source: String,
    pub target: String,
    pub vertex_map: BTreeMap<String, String>,
    #[serde(default)]
    pub identity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionSpec {
    pub first: String,
    pub then: String,
    pub equals: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub maximal_simplices: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubObjectSpec {
    pub id: String,
    pub base: String,
    pub maximal_simplices: Vec<Vec<[String; 2]>>,
}

/// A per-object cochain family for the j map. Simplices are keyed by their
/// vertices joined with `,`; values are rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    pub degree: usize,
    pub values: BTreeMap<String, BTreeMap<String, String>>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
