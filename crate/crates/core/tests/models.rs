//! Every shipped model loads, its differentials square to zero on random
//! cochains, and its total cohomology matches the committed simplicial
//! oracle.

use std::collections::BTreeSet;
use std::path::PathBuf;

use leafspace::category::ChartCategory;
use leafspace::cdr::{total_cohomology, DoubleComplex};
use leafspace::homotopy::FiberedCover;
use leafspace::model::ModelFile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn load(name: &str) -> ModelFile {
    ModelFile::load(&models_dir().join(format!("{name}.json"))).unwrap()
}

const MODELS: [&str; 7] = [
    "point",
    "circle_one_chart",
    "circle_pushout",
    "arrow",
    "z2",
    "point_fiber",
    "edge_fiber",
];

#[derive(Deserialize)]
struct OracleCase {
    model: String,
    complex: Complex,
    betti: Vec<usize>,
}

#[derive(Deserialize)]
struct Complex {
    vertices: Vec<String>,
    maximal_simplices: Vec<Vec<String>>,
}

/// Faces of dimension `q` as sorted vertex-index lists.
fn faces(c: &Complex, q: usize) -> Vec<Vec<usize>> {
    let mut out = BTreeSet::new();
    for s in &c.maximal_simplices {
        let mut idx: Vec<usize> = s.iter().map(|v| c.vertices.iter().position(|w| w == v).unwrap()).collect();
        idx.sort_unstable();
        for mask in 0u32..(1 << idx.len()) {
            if mask.count_ones() as usize == q + 1 {
                out.insert((0..idx.len()).filter(|i| mask & (1 << i) != 0).map(|i| idx[i]).collect::<Vec<_>>());
            }
        }
    }
    out.into_iter().collect()
}

fn rank(mut a: Vec<Vec<i128>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            let (x, y) = (a[r][c], a[i][c]);
            for j in 0..cols {
                a[i][j] = a[i][j] * x - a[r][j] * y;
            }
        }
        r += 1;
    }
    r
}

/// Betti numbers of a simplicial complex from its boundary matrices.
fn oracle_betti(c: &Complex, max: usize) -> Vec<usize> {
    let dims: Vec<usize> = (0..=max + 1).map(|q| faces(c, q).len()).collect();
    let boundary_rank = |q: usize| -> usize {
        if q == 0 || dims[q] == 0 || dims[q - 1] == 0 {
            return 0;
        }
        let lower = faces(c, q - 1);
        let m = faces(c, q)
            .iter()
            .map(|s| {
                let mut row = vec![0i128; lower.len()];
                for i in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(i);
                    row[lower.iter().position(|l| *l == f).unwrap()] = if i % 2 == 0 { 1 } else { -1 };
                }
                row
            })
            .collect();
        rank(m)
    };
    (0..=max).map(|q| dims[q] - boundary_rank(q) - boundary_rank(q + 1)).collect()
}

#[test]
fn shipped_models_validate() {
    for name in MODELS {
        let model = load(name);
        ChartCategory::from_model(&model).unwrap_or_else(|e| panic!("{name}: {e}"));
        if model.fiber.is_some() {
            FiberedCover::from_model(&model).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn differentials_square_to_zero_on_random_cochains() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for name in MODELS {
        let cat = ChartCategory::from_model(&load(name)).unwrap();
        let dc = DoubleComplex::new(&cat, 3).unwrap();
        for p in 0..=1 {
            for q in 0..=dc.max_q() {
                for _ in 0..100 {
                    let w = dc.random(p, q, &mut rng);
                    assert!(dc.delta(&dc.delta(&w).unwrap()).unwrap().is_zero(), "{name} ({p},{q})");
                    assert!(dc.vertical(&dc.vertical(&w).unwrap()).unwrap().is_zero(), "{name} ({p},{q})");
                }
            }
        }
        for t in 0..=1 {
            let d1 = dc.total_matrix(t).unwrap();
            let d2 = dc.total_matrix(t + 1).unwrap();
            for _ in 0..100 {
                let v = leafspace::cdr::random_vector(&mut rng, dc.total_dim(t));
                assert!(d2.mul_vec(&d1.mul_vec(&v)).iter().all(|x| *x == leafspace::rational::int(0)), "{name} D² at {t}");
            }
        }
    }
}

#[test]
fn total_cohomology_matches_oracle() {
    let text = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/simplicial_oracle.json")).unwrap();
    let cases: Vec<OracleCase> = serde_json::from_str(&text).unwrap();
    for case in cases {
        let max = case.betti.len() - 1;
        assert_eq!(oracle_betti(&case.complex, max), case.betti, "oracle for {}", case.model);
        let cat = ChartCategory::from_model(&load(&case.model)).unwrap();
        let (_, h) = total_cohomology(&cat, max).unwrap();
        assert_eq!(h.betti, case.betti, "{}", case.model);
    }
}
