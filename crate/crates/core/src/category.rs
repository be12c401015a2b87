//! Finite categories of charts: objects carry simplicial complexes and
//! morphisms are simplicial maps, with an explicit composition table.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::ValidationError;
use crate::model::ModelFile;
use crate::simplicial::{SimplicialComplex, SimplicialMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartObject {
    pub id: String,
    pub complex: SimplicialComplex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMorphism {
    pub id: String,
    pub source: usize,
    pub target: usize,
    pub map: SimplicialMap,
    pub identity: bool,
}

/// A validated finite chart category.
#[derive(Clone, Debug)]
pub struct ChartCategory {
    objects: Vec<ChartObject>,
    morphisms: Vec<ChartMorphism>,
    identities: Vec<usize>,
    table: HashMap<(usize, usize), usize>,
    outgoing: Vec<Vec<usize>>,
}

/// A string `U0 → U1 → … → Up` of composable morphisms; `p = 0` strings are
/// bare objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainString {
    pub source: usize,
    pub arrows: Vec<usize>,
}

impl ChainString {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

impl ChartCategory {
    /// Validates and builds. `compositions` holds `(first, then, equals)`
    /// for composable pairs of non-identity morphisms.
    pub fn new(
        objects: Vec<ChartObject>,
        morphisms: Vec<ChartMorphism>,
        compositions: &[(usize, usize, usize)],
    ) -> Result<Self, ValidationError> {
        let mut seen = HashSet::new();
        for id in objects.iter().map(|o| &o.id).chain(morphisms.iter().map(|m| &m.id)) {
            if !seen.insert(id.clone()) {
                return Err(ValidationError::DuplicateId(id.clone()));
            }
        }
        for m in &morphisms {
            if m.source >= objects.len() || m.target >= objects.len() {
                return Err(ValidationError::UnknownReference(format!(
                    "morphism {} refers to a missing object",
                    m.id
                )));
            }
            m.map
                .check(&objects[m.source].complex, &objects[m.target].complex)
                .map_err(|reason| ValidationError::NonSimplicialMap {
                    morphism: m.id.clone(),
                    reason,
                })?;
            if m.identity {
                let fixes = m.source == m.target
                    && m.map.images().iter().enumerate().all(|(i, &v)| i == v);
                if !fixes {
                    return Err(ValidationError::NonSimplicialMap {
                        morphism: m.id.clone(),
                        reason: "an identity must be an endomorphism fixing every vertex".into(),
                    });
                }
            }
        }
        let mut identities = vec![usize::MAX; objects.len()];
        for (i, m) in morphisms.iter().enumerate() {
            if m.identity {
                if identities[m.source] != usize::MAX {
                    return Err(ValidationError::DuplicateId(format!(
                        "second identity {} on object {}",
                        m.id, objects[m.source].id
                    )));
                }
                identities[m.source] = i;
            }
        }
        if let Some(o) = identities.iter().position(|&i| i == usize::MAX) {
            return Err(ValidationError::MissingIdentity {
                object: objects[o].id.clone(),
            });
        }

        let bad = |f: usize, g: usize, h: usize| ValidationError::BadComposite {
            first: morphisms[f].id.clone(),
            then: morphisms[g].id.clone(),
            equals: morphisms[h].id.clone(),
        };
        let mut table = HashMap::new();
        for &(f, g, h) in compositions {
            let (mf, mg, mh) = (&morphisms[f], &morphisms[g], &morphisms[h]);
            if mf.target != mg.source || mh.source != mf.source || mh.target != mg.target {
                return Err(bad(f, g, h));
            }
            if mf.map.then(&mg.map) != mh.map {
                return Err(bad(f, g, h));
            }
            let implied = if mf.identity {
                Some(g)
            } else if mg.identity {
                Some(f)
            } else {
                None
            };
            if implied.is_some_and(|i| i != h) {
                return Err(bad(f, g, h));
            }
            if let Some(prev) = table.insert((f, g), h) {
                if prev != h {
                    return Err(bad(f, g, h));
                }
            }
        }

        let mut outgoing = vec![Vec::new(); objects.len()];
        for (i, m) in morphisms.iter().enumerate() {
            outgoing[m.source].push(i);
        }
        let cat = ChartCategory {
            objects,
            morphisms,
            identities,
            table,
            outgoing,
        };
        for f in 0..cat.morphisms.len() {
            for &g in &cat.outgoing[cat.morphisms[f].target] {
                if cat.compose(f, g).is_none() {
                    return Err(ValidationError::OpenComposition {
                        first: cat.morphisms[f].id.clone(),
                        then: cat.morphisms[g].id.clone(),
                    });
                }
            }
        }
        for f in 0..cat.morphisms.len() {
            for &g in &cat.outgoing[cat.morphisms[f].target] {
                let fg = cat.compose(f, g).expect("closed");
                for &h in &cat.outgoing[cat.morphisms[g].target] {
                    let gh = cat.compose(g, h).expect("closed");
                    if cat.compose(fg, h) != cat.compose(f, gh) {
                        return Err(ValidationError::NotAssociative {
                            f: cat.morphisms[f].id.clone(),
                            g: cat.morphisms[g].id.clone(),
                            h: cat.morphisms[h].id.clone(),
                        });
                    }
                }
            }
        }
        Ok(cat)
    }

    /// Builds the category described by the `objects`, `morphisms` and
    /// `composition` sections of a model.
    pub fn from_model(model: &ModelFile) -> Result<Self, ValidationError> {
        let mut objects = Vec::new();
        let mut object_index = BTreeMap::new();
        for spec in &model.objects {
            let complex = SimplicialComplex::from_maximal(spec.vertices.clone(), &spec.maximal_simplices)
                .map_err(|reason| ValidationError::BadComplex {
                    object: spec.id.clone(),
                    reason,
                })?;
            if object_index.insert(spec.id.clone(), objects.len()).is_some() {
                return Err(ValidationError::DuplicateId(spec.id.clone()));
            }
            objects.push(ChartObject {
                id: spec.id.clone(),
                complex,
            });
        }
        let lookup = |id: &str, what: &str| {
            object_index
                .get(id)
                .copied()
                .ok_or_else(|| ValidationError::UnknownReference(format!("{what} {id}")))
        };
        let mut morphisms = Vec::new();
        let mut morphism_index = BTreeMap::new();
        for spec in &model.morphisms {
            let source = lookup(&spec.source, "object")?;
            let target = lookup(&spec.target, "object")?;
            let src = &objects[source].complex;
            let tgt = &objects[target].complex;
            let mut map = Vec::with_capacity(src.vertices().len());
            for v in src.vertices() {
                let image = spec.vertex_map.get(v).ok_or_else(|| ValidationError::NonSimplicialMap {
                    morphism: spec.id.clone(),
                    reason: format!("vertex {v} has no image"),
                })?;
                let w = tgt.vertex_index(image).ok_or_else(|| {
                    ValidationError::UnknownReference(format!("vertex {image} of object {}", spec.target))
                })?;
                map.push(w);
            }
            if let Some(extra) = spec.vertex_map.keys().find(|k| src.vertex_index(k).is_none()) {
                return Err(ValidationError::UnknownReference(format!(
                    "vertex {extra} of object {}",
                    spec.source
                )));
            }
            if morphism_index.insert(spec.id.clone(), morphisms.len()).is_some() {
                return Err(ValidationError::DuplicateId(spec.id.clone()));
            }
            morphisms.push(ChartMorphism {
                id: spec.id.clone(),
                source,
                target,
                map: SimplicialMap::new(map),
                identity: spec.identity,
            });
        }
        let find = |id: &str| {
            morphism_index
                .get(id)
                .copied()
                .ok_or_else(|| ValidationError::UnknownReference(format!("morphism {id}")))
        };
        let mut compositions = Vec::new();
        for c in &model.composition {
            compositions.push((find(&c.first)?, find(&c.then)?, find(&c.equals)?));
        }
        ChartCategory::new(objects, morphisms, &compositions)
    }

    pub fn objects(&self) -> &[ChartObject] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[ChartMorphism] {
        &self.morphisms
    }

    pub fn object(&self, i: usize) -> &ChartObject {
        &self.objects[i]
    }

    pub fn morphism(&self, i: usize) -> &ChartMorphism {
        &self.morphisms[i]
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }

    pub fn morphism_index(&self, id: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.id == id)
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identities[object]
    }

    /// Morphisms leaving `object`, in declaration order.
    pub fn outgoing(&self, object: usize) -> &[usize] {
        &self.outgoing[object]
    }

    /// `first` then `then`; `None` when not composable.
    pub fn compose(&self, first: usize, then: usize) -> Option<usize> {
        let (f, g) = (&self.morphisms[first], &self.morphisms[then]);
        if f.target != g.source {
            return None;
        }
        if f.identity {
            return Some(then);
        }
        if g.identity {
            return Some(first);
        }
        self.table.get(&(first, then)).copied()
    }

    /// Composition table including identities, as `(first, then, equals)`.
    pub fn composition_table(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for f in 0..self.morphisms.len() {
            for &g in &self.outgoing[self.morphisms[f].target] {
                out.push((f, g, self.compose(f, g).expect("validated")));
            }
        }
        out
    }

    /// Number of length-`p` strings, without materializing them.
    pub fn count_strings(&self, p: usize) -> u128 {
        let mut counts: Vec<u128> = vec![1; self.objects.len()];
        for _ in 0..p {
            counts = (0..self.objects.len())
                .map(|o| {
                    self.outgoing[o]
                        .iter()
                        .map(|&m| counts[self.morphisms[m].target])
                        .fold(0u128, |a, b| a.saturating_add(b))
                })
                .collect();
        }
        counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }

    /// All length-`p` strings, identities included, ordered by source
    /// object and then lexicographically by morphism index.
    pub fn strings(&self, p: usize) -> Vec<ChainString> {
        let mut out = Vec::new();
        for source in 0..self.objects.len() {
            let mut stack = vec![ChainString {
                source,
                arrows: Vec::new(),
            }];
            while let Some(s) = stack.pop() {
                if s.arrows.len() == p {
                    out.push(s);
                    continue;
                }
                let here = s.arrows.last().map_or(source, |&m| self.morphisms[m].target);
                for &m in self.outgoing[here].iter().rev() {
                    let mut next = s.clone();
                    next.arrows.push(m);
                    stack.push(next);
                }
            }
        }
        out.sort();
        out
    }

    /// Target object of a string.
    pub fn end(&self, s: &ChainString) -> usize {
        s.arrows.last().map_or(s.source, |&m| self.morphisms[m].target)
    }

    pub fn label(&self, s: &ChainString) -> String {
        if s.arrows.is_empty() {
            return format!("({})", self.objects[s.source].id);
        }
        let ids: Vec<&str> = s.arrows.iter().map(|&m| self.morphisms[m].id.as_str()).collect();
        format!("({})", ids.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelFile;

    const ARROW: &str = r#"{
        "objects": [
            {"id": "A", "vertices": ["a"]},
            {"id": "B", "vertices": ["b"]}
        ],
        "morphisms": [
            {"id": "id_A", "source": "A", "target": "A", "vertex_map": {"a": "a"}, "identity": true},
            {"id": "id_B", "source": "B", "target": "B", "vertex_map": {"b": "b"}, "identity": true},
            {"id": "f", "source": "A", "target": "B", "vertex_map": {"a": "b"}}
        ]
    }"#;

    fn arrow() -> ChartCategory {
        ChartCategory::from_model(&ModelFile::from_json(ARROW).unwrap()).unwrap()
    }

    #[test]
    fn string_enumeration() {
        let cat = arrow();
        assert_eq!(cat.strings(0).len(), 2);
        assert_eq!(cat.strings(1).len(), 3);
        let two: Vec<String> = cat.strings(2).iter().map(|s| cat.label(s)).collect();
        assert_eq!(two, ["(id_A,id_A)", "(id_A,f)", "(f,id_B)", "(id_B,id_B)"]);
        for p in 0..5 {
            assert_eq!(cat.count_strings(p), cat.strings(p).len() as u128);
        }
    }

    #[test]
    fn identity_only_category() {
        let json = r#"{"objects": [{"id": "P", "vertices": ["p"]}],
            "morphisms": [{"id": "id_P", "source": "P", "target": "P", "vertex_map": {"p": "p"}, "identity": true}]}"#;
        let cat = ChartCategory::from_model(&ModelFile::from_json(json).unwrap()).unwrap();
        for p in 0..4 {
            assert_eq!(cat.strings(p).len(), 1);
        }
    }

    #[test]
    fn missing_identity() {
        let mut model = ModelFile::from_json(ARROW).unwrap();
        model.morphisms.remove(1);
        assert_eq!(
            ChartCategory::from_model(&model).unwrap_err(),
            ValidationError::MissingIdentity { object: "B".into() }
        );
    }

    #[test]
    fn open_composition() {
        let mut model = ModelFile::from_json(ARROW).unwrap();
        model.morphisms.push(crate::model::MorphismSpec {
            id: "g".into(),
            source: "B".into(),
            target: "A".into(),
            vertex_map: [("b".to_string(), "a".to_string())].into(),
            identity: false,
        });
        assert!(matches!(
            ChartCategory::from_model(&model).unwrap_err(),
            ValidationError::OpenComposition { .. }
        ));
    }

    #[test]
    fn non_simplicial_and_bad_composites() {
        let json = r#"{
            "objects": [
                {"id": "E", "vertices": ["0", "1"]},
                {"id": "F", "vertices": ["x", "y"], "maximal_simplices": [["x", "y"]]}
            ],
            "morphisms": [
                {"id": "id_E", "source": "E", "target": "E", "vertex_map": {"0": "0", "1": "1"}, "identity": true},
                {"id": "id_F", "source": "F", "target": "F", "vertex_map": {"x": "x", "y": "y"}, "identity": true},
                {"id": "squash", "source": "F", "target": "E", "vertex_map": {"x": "0", "y": "1"}}
            ]
        }"#;
        let err = ChartCategory::from_model(&ModelFile::from_json(json).unwrap()).unwrap_err();
        assert!(matches!(err, ValidationError::NonSimplicialMap { ref morphism, .. } if morphism == "squash"));

        let mut model = ModelFile::from_json(ARROW).unwrap();
        model.composition.push(crate::model::CompositionSpec {
            first: "f".into(),
            then: "id_B".into(),
            equals: "id_A".into(),
        });
        assert!(matches!(
            ChartCategory::from_model(&model).unwrap_err(),
            ValidationError::BadComposite { .. }
        ));
    }

    #[test]
    fn non_associative_table() {
        // (s then s) then s = t, s then (s then s) = s
        let json = r#"{
            "objects": [{"id": "P", "vertices": ["p"]}],
            "morphisms": [
                {"id": "e", "source": "P", "target": "P", "vertex_map": {"p": "p"}, "identity": true},
                {"id": "s", "source": "P", "target": "P", "vertex_map": {"p": "p"}},
                {"id": "t", "source": "P", "target": "P", "vertex_map": {"p": "p"}}
            ],
            "composition": [
                {"first": "s", "then": "s", "equals": "t"},
                {"first": "s", "then": "t", "equals": "s"},
                {"first": "t", "then": "s", "equals": "t"},
                {"first": "t", "then": "t", "equals": "t"}
            ]
        }"#;
        let err = ChartCategory::from_model(&ModelFile::from_json(json).unwrap()).unwrap_err();
        assert!(matches!(err, ValidationError::NotAssociative { .. }));
    }

    #[test]
    fn duplicate_and_unknown_ids() {
        let mut model = ModelFile::from_json(ARROW).unwrap();
        model.morphisms[2].id = "id_A".into();
        assert!(matches!(
            ChartCategory::from_model(&model).unwrap_err(),
            ValidationError::DuplicateId(_)
        ));
        let mut model = ModelFile::from_json(ARROW).unwrap();
        model.morphisms[2].target = "C".into();
        assert!(matches!(
            ChartCategory::from_model(&model).unwrap_err(),
            ValidationError::UnknownReference(_)
        ));
    }
}
