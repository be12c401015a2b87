//! Finite abstract simplicial complexes, simplicial maps and their cochains.
//!
//! Vertices are ordered by their position in the vertex list; a simplex is
//! stored as the increasing list of its vertex positions. The coboundary is
//! `(dc)(σ) = Σ (−1)^i c(∂_i σ)`, where `∂_i` drops the `i`-th vertex.

use std::collections::{BTreeSet, HashMap};

use num_traits::One;

use crate::linalg::SparseMatrix;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    maximal: Vec<Vec<usize>>,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplicialComplex {
    /// The complex generated by `maximal`; every vertex must be listed in
    /// `vertices`, and every vertex must lie in some listed simplex or stand
    /// alone.
    pub fn from_maximal(vertices: Vec<String>, maximal: &[Vec<String>]) -> Result<Self, String> {
        if vertices.is_empty() {
            return Err("empty vertex set".into());
        }
        let mut pos = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if pos.insert(v.clone(), i).is_some() {
                return Err(format!("vertex {v:?} listed twice"));
            }
        }
        let mut gens = Vec::new();
        for simplex in maximal {
            if simplex.is_empty() {
                return Err("empty simplex".into());
            }
            let mut idx = Vec::with_capacity(simplex.len());
            for v in simplex {
                idx.push(*pos.get(v).ok_or_else(|| format!("simplex uses unknown vertex {v:?}"))?);
            }
            idx.sort_unstable();
            if idx.windows(2).any(|w| w[0] == w[1]) {
                return Err(format!("simplex {simplex:?} repeats a vertex"));
            }
            gens.push(idx);
        }
        for i in 0..vertices.len() {
            if !gens.iter().any(|s| s.contains(&i)) {
                gens.push(vec![i]);
            }
        }
        Ok(Self::from_index_simplices(vertices, gens))
    }

    /// The complex generated by simplices given as vertex positions.
    pub fn from_index_simplices(vertices: Vec<String>, gens: Vec<Vec<usize>>) -> Self {
        let mut faces: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for g in &gens {
            let k = g.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).map(|b| g[b]).collect();
                let q = face.len() - 1;
                while faces.len() <= q {
                    faces.push(BTreeSet::new());
                }
                faces[q].insert(face);
            }
        }
        let simplices: Vec<Vec<Vec<usize>>> = faces.into_iter().map(|s| s.into_iter().collect()).collect();
        let index = simplices
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut maximal: Vec<Vec<usize>> = Vec::new();
        for level in &simplices {
            for s in level {
                let contained = simplices
                    .get(s.len())
                    .is_some_and(|up| up.iter().any(|t| s.iter().all(|v| t.contains(v))));
                if !contained {
                    maximal.push(s.clone());
                }
            }
        }
        SimplicialComplex {
            vertices,
            maximal,
            simplices,
            index,
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn maximal_simplices(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Simplices of dimension `q` in canonical (lexicographic) order.
    pub fn simplices(&self, q: usize) -> &[Vec<usize>] {
        self.simplices.get(q).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, q: usize) -> usize {
        self.simplices(q).len()
    }

    pub fn simplex_index(&self, simplex: &[usize]) -> Option<usize> {
        let q = simplex.len().checked_sub(1)?;
        self.index.get(q)?.get(simplex).copied()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.simplex_index(simplex).is_some()
    }

    /// Matrix of the coboundary `C^q → C^{q+1}`.
    pub fn coboundary(&self, q: usize) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(self.count(q + 1), self.count(q));
        for (row, s) in self.simplices(q + 1).iter().enumerate() {
            for i in 0..s.len() {
                let mut face = s.clone();
                face.remove(i);
                let col = self.simplex_index(&face).expect("faces are simplices");
                m.add_to(row, col, rational::int(if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        m
    }

    /// Betti numbers in degrees `0..=max_degree`.
    pub fn betti(&self, max_degree: usize) -> Vec<usize> {
        (0..=max_degree)
            .map(|q| {
                let outgoing = self.coboundary(q);
                let incoming = (q > 0).then(|| self.coboundary(q - 1));
                crate::linalg::CohomologySpace::compute(incoming.as_ref(), Some(&outgoing), self.count(q)).betti()
            })
            .collect()
    }
}

/// Vertex map between complexes, `map[i]` the image of source vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplicialMap {
    map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(map: Vec<usize>) -> Self {
        SimplicialMap { map }
    }

    pub fn identity(n: usize) -> Self {
        SimplicialMap { map: (0..n).collect() }
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }

    /// `self` then `next`.
    pub fn then(&self, next: &SimplicialMap) -> SimplicialMap {
        SimplicialMap {
            map: self.map.iter().map(|&v| next.map[v]).collect(),
        }
    }

    /// First simplex of `source` whose image is not a simplex of `target`.
    pub fn check(&self, source: &SimplicialComplex, target: &SimplicialComplex) -> Result<(), String> {
        if self.map.len() != source.vertices.len() {
            return Err(format!(
                "vertex map has {} entries for {} vertices",
                self.map.len(),
                source.vertices.len()
            ));
        }
        if let Some(&v) = self.map.iter().find(|&&v| v >= target.vertices.len()) {
            return Err(format!("image vertex {v} out of range"));
        }
        for s in &source.maximal {
            let image = self.image_set(s);
            if !target.contains(&image) {
                let names: Vec<&str> = s.iter().map(|&i| source.vertices[i].as_str()).collect();
                return Err(format!("simplex {names:?} does not map to a simplex"));
            }
        }
        Ok(())
    }

    fn image_set(&self, simplex: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = simplex.iter().map(|&v| self.map[v]).collect();
        set.into_iter().collect()
    }

    /// Matrix of the pullback `C^q(target) → C^q(source)`: a `q`-simplex
    /// goes to the sorted image with its permutation sign, or to zero when
    /// two vertices collapse.
    pub fn pullback(&self, source: &SimplicialComplex, target: &SimplicialComplex, q: usize) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(source.count(q), target.count(q));
        for (row, s) in source.simplices(q).iter().enumerate() {
            let image: Vec<usize> = s.iter().map(|&v| self.map[v]).collect();
            let mut sorted = image.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let col = target.simplex_index(&sorted).expect("simplicial map");
            let mut inversions = 0;
            for i in 0..image.len() {
                for j in i + 1..image.len() {
                    if image[i] > image[j] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { Rational::one() } else { -Rational::one() };
            m.set(row, col, sign);
        }
        m
    }
}

/// Categorical product: vertices are pairs, ordered lexicographically by
/// position, and a set of pairs is a simplex when both projections are.
pub fn product(a: &SimplicialComplex, b: &SimplicialComplex) -> (SimplicialComplex, Vec<(usize, usize)>) {
    let pairs: Vec<(usize, usize)> = (0..a.vertices.len())
        .flat_map(|i| (0..b.vertices.len()).map(move |j| (i, j)))
        .collect();
    let names: Vec<String> = pairs
        .iter()
        .map(|&(i, j)| pair_name(&a.vertices[i], &b.vertices[j]))
        .collect();
    let width = b.vertices.len();
    let mut gens = Vec::new();
    for sa in &a.maximal {
        for sb in &b.maximal {
            gens.push(
                sa.iter()
                    .flat_map(|&i| sb.iter().map(move |&j| i * width + j))
                    .collect::<Vec<usize>>(),
            );
        }
    }
    (SimplicialComplex::from_index_simplices(names, gens), pairs)
}

/// Display name of a product vertex.
pub fn pair_name(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn circle() -> SimplicialComplex {
        SimplicialComplex::from_maximal(
            s(&["a", "b", "c"]),
            &[s(&["a", "b"]), s(&["b", "c"]), s(&["a", "c"])],
        )
        .unwrap()
    }

    #[test]
    fn faces_and_counts() {
        let c = circle();
        assert_eq!(c.count(0), 3);
        assert_eq!(c.count(1), 3);
        assert_eq!(c.count(2), 0);
        assert_eq!(c.dim(), 1);
        let tri = SimplicialComplex::from_maximal(s(&["a", "b", "c"]), &[s(&["c", "a", "b"])]).unwrap();
        assert_eq!(tri.count(1), 3);
        assert_eq!(tri.maximal_simplices(), &[vec![0, 1, 2]]);
        assert!(SimplicialComplex::from_maximal(s(&["a"]), &[s(&["a", "z"])]).is_err());
        assert!(SimplicialComplex::from_maximal(vec![], &[]).is_err());
    }

    #[test]
    fn vertex_coboundary_sign() {
        let edge = SimplicialComplex::from_maximal(s(&["v0", "v1"]), &[s(&["v0", "v1"])]).unwrap();
        let d = edge.coboundary(0);
        let f = vec![rational::int(1), rational::int(0)];
        assert_eq!(d.mul_vec(&f), vec![rational::int(-1)]);
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(circle().betti(1), vec![1, 1]);
        let tri = SimplicialComplex::from_maximal(s(&["a", "b", "c"]), &[s(&["a", "b", "c"])]).unwrap();
        assert_eq!(tri.betti(2), vec![1, 0, 0]);
        let two_points = SimplicialComplex::from_maximal(s(&["p", "q"]), &[]).unwrap();
        assert_eq!(two_points.betti(0), vec![2]);
    }

    #[test]
    fn pullback_signs_and_collapse() {
        let c = circle();
        let swap = SimplicialMap::new(vec![1, 0, 2]);
        swap.check(&c, &c).unwrap();
        let p = swap.pullback(&c, &c, 1);
        // [a,b] ↦ [b,a] = −[a,b]
        assert_eq!(p.get(0, 0), rational::int(-1));
        let collapse = SimplicialMap::new(vec![0, 0, 0]);
        assert!(collapse.pullback(&c, &c, 1).is_zero());
        let bad = SimplicialMap::new(vec![0, 1, 2]);
        let point = SimplicialComplex::from_maximal(s(&["p"]), &[]).unwrap();
        assert!(bad.check(&c, &point).is_err());
    }

    #[test]
    fn pullback_is_a_chain_map() {
        let c = circle();
        let f = SimplicialMap::new(vec![1, 2, 0]);
        for q in 0..1 {
            let lhs = c.coboundary(q).mul(&f.pullback(&c, &c, q));
            let rhs = f.pullback(&c, &c, q + 1).mul(&c.coboundary(q));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn product_of_edges() {
        let e = SimplicialComplex::from_maximal(s(&["0", "1"]), &[s(&["0", "1"])]).unwrap();
        let (sq, pairs) = product(&e, &e);
        assert_eq!(pairs.len(), 4);
        assert_eq!(sq.dim(), 3);
        assert_eq!(sq.betti(3), vec![1, 0, 0, 0]);
        let (cyl, _) = product(&circle(), &e);
        assert_eq!(cyl.betti(2), vec![1, 1, 0]);
    }
}
