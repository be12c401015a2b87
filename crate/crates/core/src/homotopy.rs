//! Comparison of the cover by product charts `Q(U) = U × fiber` with its
//! refinement by sub-objects `V ⊆ Q(U)`.
//!
//! The small category has the products as objects and `Q(h) = h × id` as
//! morphisms. The big category adds the listed sub-objects; a morphism
//! `V → V′` is a base morphism `h` with `Q(h)(V) ⊆ V′`, so that restricted
//! maps `g`, inclusions `i_V = id_U: V → Q(U)` and the `Q(h)` all live there.
//! On cochains
//!
//! ```text
//! μ(φ)(g1, …, gk)  = φ(Q(h1), …, Q(hk))|_{V0}
//! λ(c)(Q(h1), …, Q(hk)) = c(Q(h1), …, Q(hk))
//! F(φ)(g1, …, g_{k−1}) = Σ_{s=0}^{k−1} (−1)^s φ(g1, …, gs, i_{Vs}, Q(h_{s+1}), …, Q(h_{k−1}))
//! ```
//!
//! and the verifier checks `λ∘μ = id` and `μ∘λ − id = δ∘F + F∘δ` exactly.

use std::collections::HashMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::category::{ChainString, ChartCategory, ChartMorphism, ChartObject};
use crate::cdr::{random_vector, total_cohomology, BigradedCochain, DoubleComplex};
use crate::error::{Error, ValidationError};
use crate::linalg::SparseMatrix;
use crate::model::ModelFile;
use crate::rational::{self, Rational};
use crate::simplicial::{pair_name, product, SimplicialComplex, SimplicialMap};

/// A base chart category with a fiber and sub-objects of the products.
#[derive(Clone, Debug)]
pub struct FiberedCover {
    base: ChartCategory,
    small: ChartCategory,
    big: ChartCategory,
    /// Base object under each big object.
    over: Vec<usize>,
    /// Base morphism under each big morphism.
    under: Vec<usize>,
    /// Big object `Q(U)` for each base object `U`.
    full: Vec<usize>,
    /// Big morphism `Q(h)` for each base morphism `h`.
    extended: Vec<usize>,
    /// Big morphism `i_V: V → Q(U)` for each big object.
    inclusion: Vec<usize>,
}

struct SubObject {
    id: String,
    base: usize,
    complex: SimplicialComplex,
    /// Position in `Q(base)` of each vertex.
    embedding: Vec<usize>,
}

impl FiberedCover {
    /// `sub_objects[i] = (id, base object, maximal simplices as pairs)`.
    pub fn new(
        base: ChartCategory,
        fiber: &SimplicialComplex,
        sub_objects: &[(String, usize, Vec<Vec<(usize, usize)>>)],
    ) -> Result<Self, ValidationError> {
        let products: Vec<(SimplicialComplex, Vec<(usize, usize)>)> =
            base.objects().iter().map(|o| product(&o.complex, fiber)).collect();

        let mut objects: Vec<SubObject> = Vec::new();
        for (u, (complex, _)) in products.iter().enumerate() {
            objects.push(SubObject {
                id: format!("Q({})", base.object(u).id),
                base: u,
                complex: complex.clone(),
                embedding: (0..complex.vertices().len()).collect(),
            });
        }
        for (id, u, simplices) in sub_objects {
            let (q_complex, pairs) = &products[*u];
            let width = fiber.vertices().len();
            let containment = |reason: String| ValidationError::Containment {
                base: base.object(*u).id.clone(),
                sub_object: id.clone(),
                reason,
            };
            if simplices.is_empty() {
                return Err(containment("no simplices listed".into()));
            }
            let mut gens = Vec::new();
            for s in simplices {
                let mut idx: Vec<usize> = s.iter().map(|&(a, f)| a * width + f).collect();
                idx.sort_unstable();
                idx.dedup();
                if !q_complex.contains(&idx) {
                    let names: Vec<&str> = idx.iter().map(|&i| q_complex.vertices()[i].as_str()).collect();
                    return Err(containment(format!("{names:?} is not a simplex of the product")));
                }
                gens.push(idx);
            }
            let mut used: Vec<usize> = gens.iter().flatten().copied().collect();
            used.sort_unstable();
            used.dedup();
            let position: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let names = used
                .iter()
                .map(|&v| {
                    let (a, f) = pairs[v];
                    pair_name(&base.object(*u).complex.vertices()[a], &fiber.vertices()[f])
                })
                .collect();
            let local = gens.iter().map(|g| g.iter().map(|v| position[v]).collect()).collect();
            let complex = SimplicialComplex::from_index_simplices(names, local);
            let duplicate = objects
                .iter()
                .any(|o| o.base == *u && o.embedding == used && o.complex == complex);
            if duplicate {
                continue;
            }
            if objects.iter().any(|o| o.id == *id) {
                return Err(ValidationError::DuplicateId(id.clone()));
            }
            objects.push(SubObject {
                id: id.clone(),
                base: *u,
                complex,
                embedding: used,
            });
        }

        // small category: products and extended morphisms only
        let small_objects: Vec<ChartObject> = objects[..base.objects().len()]
            .iter()
            .map(|o| ChartObject {
                id: o.id.clone(),
                complex: o.complex.clone(),
            })
            .collect();
        let small_morphisms: Vec<ChartMorphism> = base
            .morphisms()
            .iter()
            .map(|m| ChartMorphism {
                id: format!("Q({})", m.id),
                source: m.source,
                target: m.target,
                map: extend(&m.map, fiber.vertices().len()),
                identity: m.identity,
            })
            .collect();
        let small_table: Vec<(usize, usize, usize)> = base
            .composition_table()
            .into_iter()
            .filter(|&(f, g, _)| !base.morphism(f).identity && !base.morphism(g).identity)
            .collect();
        let small = ChartCategory::new(small_objects, small_morphisms, &small_table)?;

        // big category
        let mut big_morphisms = Vec::new();
        let mut under = Vec::new();
        let mut lookup: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for (h, m) in base.morphisms().iter().enumerate() {
            let q_map = extend(&m.map, fiber.vertices().len());
            for (vi, v) in objects.iter().enumerate().filter(|(_, o)| o.base == m.source) {
                for (wi, w) in objects.iter().enumerate().filter(|(_, o)| o.base == m.target) {
                    let Some(map) = restrict(&q_map, v, w) else {
                        continue;
                    };
                    let identity = m.identity && vi == wi;
                    let id = if identity {
                        format!("id_{}", v.id)
                    } else if vi < base.objects().len() && wi < base.objects().len() {
                        format!("Q({})", m.id)
                    } else {
                        format!("{}:{}->{}", m.id, v.id, w.id)
                    };
                    lookup.insert((h, vi, wi), big_morphisms.len());
                    big_morphisms.push(ChartMorphism {
                        id,
                        source: vi,
                        target: wi,
                        map,
                        identity,
                    });
                    under.push(h);
                }
            }
        }
        let mut big_table = Vec::new();
        for (a, ma) in big_morphisms.iter().enumerate() {
            for (b, mb) in big_morphisms.iter().enumerate() {
                if ma.target != mb.source || ma.identity || mb.identity {
                    continue;
                }
                let h = base.compose(under[a], under[b]).expect("validated base");
                let c = lookup[&(h, ma.source, mb.target)];
                big_table.push((a, b, c));
            }
        }
        let over: Vec<usize> = objects.iter().map(|o| o.base).collect();
        let big_objects: Vec<ChartObject> = objects
            .into_iter()
            .map(|o| ChartObject {
                id: o.id,
                complex: o.complex,
            })
            .collect();
        let full: Vec<usize> = (0..base.objects().len()).collect();
        let extended: Vec<usize> = (0..base.morphisms().len())
            .map(|h| {
                let m = base.morphism(h);
                lookup[&(h, m.source, m.target)]
            })
            .collect();
        let inclusion: Vec<usize> = (0..big_objects.len())
            .map(|v| {
                let u = over[v];
                lookup[&(base.identity(u), v, u)]
            })
            .collect();
        let big = ChartCategory::new(big_objects, big_morphisms, &big_table)?;
        Ok(FiberedCover {
            base,
            small,
            big,
            over,
            under,
            full,
            extended,
            inclusion,
        })
    }

    /// Reads the base category, `"fiber"` and `"sub_objects"` of a model.
    pub fn from_model(model: &ModelFile) -> Result<Self, Error> {
        let base = ChartCategory::from_model(model)?;
        let spec = model.fiber.as_ref().ok_or_else(|| ValidationError::BadComplex {
            object: "fiber".into(),
            reason: "the model has no fiber section".into(),
        })?;
        let fiber = SimplicialComplex::from_maximal(spec.vertices.clone(), &spec.maximal_simplices).map_err(
            |reason| ValidationError::BadComplex {
                object: "fiber".into(),
                reason,
            },
        )?;
        let mut subs = Vec::new();
        for s in &model.sub_objects {
            let u = base
                .object_index(&s.base)
                .ok_or_else(|| ValidationError::UnknownReference(format!("object {}", s.base)))?;
            let chart = &base.object(u).complex;
            let mut simplices = Vec::new();
            for simplex in &s.maximal_simplices {
                let mut pairs = Vec::new();
                for [a, f] in simplex {
                    let containment = |what: &str| ValidationError::Containment {
                        base: s.base.clone(),
                        sub_object: s.id.clone(),
                        reason: format!("unknown {what} vertex in ({a},{f})"),
                    };
                    let ai = chart.vertex_index(a).ok_or_else(|| containment("chart"))?;
                    let fi = fiber.vertex_index(f).ok_or_else(|| containment("fiber"))?;
                    pairs.push((ai, fi));
                }
                simplices.push(pairs);
            }
            subs.push((s.id.clone(), u, simplices));
        }
        Ok(FiberedCover::new(base, &fiber, &subs)?)
    }

    pub fn base(&self) -> &ChartCategory {
        &self.base
    }

    pub fn small(&self) -> &ChartCategory {
        &self.small
    }

    pub fn big(&self) -> &ChartCategory {
        &self.big
    }

    /// Base object under a big object.
    pub fn base_object(&self, v: usize) -> usize {
        self.over[v]
    }

    /// Base morphism under a big morphism.
    pub fn base_morphism(&self, g: usize) -> usize {
        self.under[g]
    }

    /// The big morphism `i_V: V → Q(U)`.
    pub fn inclusion(&self, v: usize) -> usize {
        self.inclusion[v]
    }

    /// The big morphism `Q(h)`.
    pub fn extended(&self, h: usize) -> usize {
        self.extended[h]
    }

    fn small_string(&self, g: &ChainString) -> ChainString {
        ChainString {
            source: self.over[g.source],
            arrows: g.arrows.iter().map(|&a| self.under[a]).collect(),
        }
    }

    fn full_string(&self, s: &ChainString) -> ChainString {
        ChainString {
            source: self.full[s.source],
            arrows: s.arrows.iter().map(|&h| self.extended[h]).collect(),
        }
    }

    /// `(g1, …, gs, i_{Vs}, Q(h_{s+1}), …, Q(h_{k−1}))`.
    pub fn hybrid_string(&self, g: &ChainString, s: usize) -> ChainString {
        let mut arrows = g.arrows[..s].to_vec();
        let vs = if s == 0 {
            g.source
        } else {
            self.big.morphism(g.arrows[s - 1]).target
        };
        arrows.push(self.inclusion[vs]);
        arrows.extend(g.arrows[s..].iter().map(|&a| self.extended[self.under[a]]));
        ChainString {
            source: g.source,
            arrows,
        }
    }

    /// Pullback along `i_V`, `C^q(Q(U)) → C^q(V)`.
    fn restriction(&self, v: usize, q: usize) -> SparseMatrix {
        let i = self.big.morphism(self.inclusion[v]);
        i.map
            .pullback(&self.big.object(v).complex, &self.big.object(i.target).complex, q)
    }

    /// Matrix of `μ: C^{k,q}(small) → C^{k,q}(big)`.
    pub fn mu_matrix(&self, small: &DoubleComplex<'_>, big: &DoubleComplex<'_>, k: usize, q: usize) -> SparseMatrix {
        let src = small.offsets(k, q);
        let dst = big.offsets(k, q);
        let mut m = SparseMatrix::zeros(*dst.last().unwrap(), *src.last().unwrap());
        let mut cache: HashMap<usize, SparseMatrix> = HashMap::new();
        for (row_block, g) in big.strings(k).iter().enumerate() {
            let col_block = small.string_index(&self.small_string(g)).expect("underlying string");
            let r = cache.entry(g.source).or_insert_with(|| self.restriction(g.source, q));
            for (i, j, v) in r.entries() {
                m.add_to(dst[row_block] + i, src[col_block] + j, v.clone());
            }
        }
        m
    }

    /// Matrix of `λ: C^{k,q}(big) → C^{k,q}(small)`.
    pub fn lambda_matrix(&self, small: &DoubleComplex<'_>, big: &DoubleComplex<'_>, k: usize, q: usize) -> SparseMatrix {
        let src = big.offsets(k, q);
        let dst = small.offsets(k, q);
        let mut m = SparseMatrix::zeros(*dst.last().unwrap(), *src.last().unwrap());
        for (row_block, s) in small.strings(k).iter().enumerate() {
            let col_block = big.string_index(&self.full_string(s)).expect("product string");
            for i in 0..dst[row_block + 1] - dst[row_block] {
                m.add_to(dst[row_block] + i, src[col_block] + i, Rational::from_integer(1.into()));
            }
        }
        m
    }

    /// Matrix of `F: C^{k,q}(big) → C^{k−1,q}(big)`.
    pub fn f_matrix(&self, big: &DoubleComplex<'_>, k: usize, q: usize) -> Result<SparseMatrix, Error> {
        if k == 0 {
            return Err(Error::InvalidArgument("F is defined from string length 1 on".into()));
        }
        let src = big.offsets(k, q);
        let dst = big.offsets(k - 1, q);
        let mut m = SparseMatrix::zeros(*dst.last().unwrap(), *src.last().unwrap());
        for (row_block, g) in big.strings(k - 1).iter().enumerate() {
            let n = dst[row_block + 1] - dst[row_block];
            for s in 0..k {
                let hybrid = self.hybrid_string(g, s);
                let col_block = big.string_index(&hybrid).ok_or_else(|| {
                    Error::InvalidArgument(format!("hybrid string {} is not composable", self.big.label(&hybrid)))
                })?;
                let sign = rational::int(if s % 2 == 0 { 1 } else { -1 });
                for i in 0..n {
                    m.add_to(dst[row_block] + i, src[col_block] + i, sign.clone());
                }
            }
        }
        Ok(m)
    }
}

/// `h × id` on product vertices `a * width + f`.
fn extend(map: &SimplicialMap, width: usize) -> SimplicialMap {
    SimplicialMap::new(
        map.images()
            .iter()
            .flat_map(|&b| (0..width).map(move |f| b * width + f))
            .collect(),
    )
}

/// `q_map` restricted to `v` and corestricted to `w`, if it lands there.
fn restrict(q_map: &SimplicialMap, v: &SubObject, w: &SubObject) -> Option<SimplicialMap> {
    let position: HashMap<usize, usize> = w.embedding.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let images: Vec<usize> = v
        .embedding
        .iter()
        .map(|&x| position.get(&q_map.apply(x)).copied())
        .collect::<Option<_>>()?;
    let map = SimplicialMap::new(images);
    map.check(&v.complex, &w.complex).ok()?;
    Some(map)
}

fn count_nonzero(v: &[Rational]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Outcome for one bidegree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BidegreeOutcome {
    pub k: usize,
    pub q: usize,
    pub trials: usize,
    /// Nonzero entries of `λμφ − φ`, summed over trials.
    pub lambda_mu_residual: usize,
    /// Nonzero entries of `(μλ − id)φ − (δF + Fδ)φ`, summed over trials.
    pub homotopy_residual: usize,
    /// Nonzero entries of `F dφ − d Fφ`, summed over trials.
    pub f_commutes_residual: usize,
}

impl BidegreeOutcome {
    pub fn passed(&self) -> bool {
        self.lambda_mu_residual == 0 && self.homotopy_residual == 0 && self.f_commutes_residual == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyReport {
    pub seed: u64,
    pub trials: usize,
    pub max_degree: usize,
    pub small_objects: usize,
    pub big_objects: usize,
    pub big_morphisms: usize,
    pub bidegrees: Vec<BidegreeOutcome>,
    /// Term-by-term expansion at `k = 2` agrees with `μλ − id`.
    pub expansion_check: bool,
    pub small_betti: Vec<usize>,
    pub big_betti: Vec<usize>,
    /// `μ` and `λ` induce mutually inverse maps on total cohomology.
    pub inverse_on_cohomology: bool,
}

impl HomotopyReport {
    pub fn passed(&self) -> bool {
        self.bidegrees.iter().all(BidegreeOutcome::passed) && self.expansion_check && self.inverse_on_cohomology
    }

    pub fn to_json(&self) -> Value {
        let bidegrees: Vec<Value> = self
            .bidegrees
            .iter()
            .map(|b| {
                json!({
                    "k": b.k,
                    "q": b.q,
                    "trials": b.trials,
                    "lambda_mu_residual": b.lambda_mu_residual,
                    "homotopy_residual": b.homotopy_residual,
                    "f_commutes_residual": b.f_commutes_residual,
                    "passed": b.passed(),
                })
            })
            .collect();
        json!({
            "seed": self.seed,
            "trials": self.trials,
            "max_degree": self.max_degree,
            "small_objects": self.small_objects,
            "big_objects": self.big_objects,
            "big_morphisms": self.big_morphisms,
            "bidegrees": bidegrees,
            "expansion_check": self.expansion_check,
            "small_betti": self.small_betti,
            "big_betti": self.big_betti,
            "inverse_on_cohomology": self.inverse_on_cohomology,
            "passed": self.passed(),
        })
    }
}

/// Checks both identities on `trials` random cochains in every bidegree
/// `(k, q)` with `k + q <= max_degree`, the `k = 2` expansion, and the
/// induced maps on total cohomology up to `max_degree`.
pub fn verify_identities(
    cover: &FiberedCover,
    seed: u64,
    trials: usize,
    max_degree: usize,
) -> Result<HomotopyReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = DoubleComplex::new(&cover.small, max_degree + 1)?;
    let big = DoubleComplex::new(&cover.big, max_degree + 1)?;
    let max_q = big.max_q().min(max_degree);
    let mut bidegrees = Vec::new();
    for q in 0..=max_q {
        for k in 0..=max_degree - q {
            let mu = cover.mu_matrix(&small, &big, k, q);
            let lambda = cover.lambda_matrix(&small, &big, k, q);
            let delta_k = big.delta_matrix(k, q)?;
            let f_next = cover.f_matrix(&big, k + 1, q)?;
            let delta_prev_f = if k > 0 {
                Some((big.delta_matrix(k - 1, q)?, cover.f_matrix(&big, k, q)?))
            } else {
                None
            };
            let sign_k = rational::int(if k % 2 == 0 { 1 } else { -1 });
            let d_k = big.vertical_matrix(k, q)?;
            let mut outcome = BidegreeOutcome {
                k,
                q,
                trials,
                lambda_mu_residual: 0,
                homotopy_residual: 0,
                f_commutes_residual: 0,
            };
            for _ in 0..trials {
                let phi = random_vector(&mut rng, small.dim(k, q));
                let back = lambda.mul_vec(&mu.mul_vec(&phi));
                outcome.lambda_mu_residual += count_nonzero(&sub(&back, &phi));

                let c = random_vector(&mut rng, big.dim(k, q));
                let lhs = sub(&mu.mul_vec(&lambda.mul_vec(&c)), &c);
                let mut rhs = f_next.mul_vec(&delta_k.mul_vec(&c));
                if let Some((delta_prev, f_k)) = &delta_prev_f {
                    rhs = add(&rhs, &delta_prev.mul_vec(&f_k.mul_vec(&c)));
                }
                outcome.homotopy_residual += count_nonzero(&sub(&lhs, &rhs));

                if k > 0 && q < big.max_q() {
                    // plain d on both sides: undo the (−1)^k and (−1)^{k−1} factors
                    let f_k = &delta_prev_f.as_ref().expect("k > 0").1;
                    let d_c: Vec<Rational> = d_k.mul_vec(&c).iter().map(|x| x * &sign_k).collect();
                    let f_up = cover.f_matrix(&big, k, q + 1)?;
                    let left = f_up.mul_vec(&d_c);
                    let d_prev = big.vertical_matrix(k - 1, q)?;
                    let right: Vec<Rational> = d_prev
                        .mul_vec(&f_k.mul_vec(&c))
                        .iter()
                        .map(|x| -(x * &sign_k))
                        .collect();
                    outcome.f_commutes_residual += count_nonzero(&sub(&left, &right));
                }
            }
            bidegrees.push(outcome);
        }
    }
    bidegrees.sort_by_key(|b| (b.k + b.q, b.k));

    let expansion_check = if max_degree >= 2 {
        (0..trials.min(20)).all(|_| expansion_agrees(cover, &big, &small, &mut rng).unwrap_or(false))
    } else {
        true
    };

    let (small_dc, small_h) = total_cohomology(&cover.small, max_degree)?;
    let (big_dc, big_h) = total_cohomology(&cover.big, max_degree)?;
    let mut inverse = small_h.betti == big_h.betti;
    for t in 0..=max_degree {
        if !inverse {
            break;
        }
        let small_d = small_dc.total_matrix(t)?;
        let big_d = big_dc.total_matrix(t)?;
        let mut mu_images = Vec::new();
        for rep in &small_h.representatives[t] {
            let image: Vec<BigradedCochain> = rep
                .iter()
                .map(|c| {
                    let v = cover.mu_matrix(&small_dc, &big_dc, c.p, c.q).mul_vec(&small_dc.flatten(c));
                    big_dc.unflatten(c.p, c.q, &v)
                })
                .collect();
            let flat = big_dc.join_total(t, &image);
            if count_nonzero(&big_d.mul_vec(&flat)) != 0 {
                inverse = false;
                break;
            }
            let back: Vec<BigradedCochain> = image
                .iter()
                .map(|c| {
                    let v = cover.lambda_matrix(&small_dc, &big_dc, c.p, c.q).mul_vec(&big_dc.flatten(c));
                    small_dc.unflatten(c.p, c.q, &v)
                })
                .collect();
            if small_dc.join_total(t, &back) != small_dc.join_total(t, rep) {
                inverse = false;
                break;
            }
            mu_images.push(big_h.class_of(t, &flat)?);
        }
        if !inverse {
            break;
        }
        for rep in &big_h.representatives[t] {
            let down: Vec<BigradedCochain> = rep
                .iter()
                .map(|c| {
                    let v = cover.lambda_matrix(&small_dc, &big_dc, c.p, c.q).mul_vec(&big_dc.flatten(c));
                    small_dc.unflatten(c.p, c.q, &v)
                })
                .collect();
            let flat = small_dc.join_total(t, &down);
            if count_nonzero(&small_d.mul_vec(&flat)) != 0 {
                inverse = false;
                break;
            }
            let up: Vec<BigradedCochain> = down
                .iter()
                .map(|c| {
                    let v = cover.mu_matrix(&small_dc, &big_dc, c.p, c.q).mul_vec(&small_dc.flatten(c));
                    big_dc.unflatten(c.p, c.q, &v)
                })
                .collect();
            let diff = sub(&big_dc.join_total(t, &up), &big_dc.join_total(t, rep));
            if !big_h.space(t).is_exact(&diff) {
                inverse = false;
                break;
            }
        }
        if inverse && !mu_images.is_empty() {
            inverse = SparseMatrix::from_dense(&mu_images).rank() == mu_images.len();
        }
    }

    Ok(HomotopyReport {
        seed,
        trials,
        max_degree,
        small_objects: cover.small.objects().len(),
        big_objects: cover.big.objects().len(),
        big_morphisms: cover.big.morphisms().len(),
        bidegrees,
        expansion_check,
        small_betti: small_h.betti,
        big_betti: big_h.betti,
        inverse_on_cohomology: inverse,
    })
}

/// Value of a cochain on one string.
fn value<'c>(dc: &DoubleComplex<'_>, c: &'c BigradedCochain, s: &ChainString) -> &'c [Rational] {
    &c.values[dc.string_index(s).expect("string exists")]
}

fn pull(cat: &ChartCategory, m: usize, q: usize, v: &[Rational]) -> Vec<Rational> {
    let mor = cat.morphism(m);
    mor.map
        .pullback(&cat.object(mor.source).complex, &cat.object(mor.target).complex, q)
        .mul_vec(v)
}

fn chain(source: usize, arrows: &[usize]) -> ChainString {
    ChainString {
        source,
        arrows: arrows.to_vec(),
    }
}

/// For a random `φ ∈ C^{2,0}` of the big cover, writes `(δF + Fδ)φ` on every
/// length-2 string as the explicit sum of terms (twelve from `Fδ`, six from
/// `δF`) and compares with `(μλ − id)φ`.
fn expansion_agrees(
    cover: &FiberedCover,
    big: &DoubleComplex<'_>,
    small: &DoubleComplex<'_>,
    rng: &mut ChaCha8Rng,
) -> Result<bool, Error> {
    let q = 0;
    let cat = &cover.big;
    let phi2 = big.random(2, q, rng);
    let dphi = big.delta(&phi2)?;
    let compose = |a: usize, b: usize| cat.compose(a, b).expect("composable");
    let tgt = |m: usize| cat.morphism(m).target;
    let i = |v: usize| cover.inclusion[v];
    let qh = |g: usize| cover.extended[cover.under[g]];

    // (Fφ)(g) = φ(i_{V0}, Q(h)) − φ(g, i_{V1})
    let f_phi = |g: usize| -> Vec<Rational> {
        let v0 = cat.morphism(g).source;
        let a = value(big, &phi2, &chain(v0, &[i(v0), qh(g)]));
        let b = value(big, &phi2, &chain(v0, &[g, i(tgt(g))]));
        sub(a, b)
    };
    // (δφ)(a1, a2, a3) = a1^*φ(a2, a3) − φ(a2∘a1, a3) + φ(a1, a3∘a2) − φ(a1, a2)
    let delta_phi = |v0: usize, a1: usize, a2: usize, a3: usize| -> Vec<Rational> {
        let t1 = pull(cat, a1, q, value(big, &phi2, &chain(tgt(a1), &[a2, a3])));
        let t2 = value(big, &phi2, &chain(v0, &[compose(a1, a2), a3]));
        let t3 = value(big, &phi2, &chain(v0, &[a1, compose(a2, a3)]));
        let t4 = value(big, &phi2, &chain(v0, &[a1, a2]));
        sub(&add(&sub(&t1, t2), t3), t4)
    };

    let mu = cover.mu_matrix(small, big, 2, q);
    let lambda = cover.lambda_matrix(small, big, 2, q);
    let mu_lambda = big.unflatten(2, q, &mu.mul_vec(&lambda.mul_vec(&big.flatten(&phi2))));
    let _ = &dphi;
    for s in big.strings(2) {
        let v0 = s.source;
        let (g1, g2) = (s.arrows[0], s.arrows[1]);
        let v1 = tgt(g1);
        let v2 = tgt(g2);
        // Fδφ
        let s0 = delta_phi(v0, i(v0), qh(g1), qh(g2));
        let s1 = delta_phi(v0, g1, i(v1), qh(g2));
        let s2 = delta_phi(v0, g1, g2, i(v2));
        let f_delta = add(&sub(&s0, &s1), &s2);
        // δFφ
        let d_f = add(&sub(&pull(cat, g1, q, &f_phi(g2)), &f_phi(compose(g1, g2))), &f_phi(g1));
        let rhs = add(&f_delta, &d_f);
        let lhs = sub(value(big, &mu_lambda, s), value(big, &phi2, s));
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ARROW_EDGE: &str = r#"{
        "objects": [{"id": "A", "vertices": ["a"]}, {"id": "B", "vertices": ["b"]}],
        "morphisms": [
            {"id": "id_A", "source": "A", "target": "A", "vertex_map": {"a": "a"}, "identity": true},
            {"id": "id_B", "source": "B", "target": "B", "vertex_map": {"b": "b"}, "identity": true},
            {"id": "f", "source": "A", "target": "B", "vertex_map": {"a": "b"}}
        ],
        "fiber": {"vertices": ["e0", "e1"], "maximal_simplices": [["e0", "e1"]]},
        "sub_objects": [
            {"id": "A0", "base": "A", "maximal_simplices": [[["a", "e0"]]]},
            {"id": "A1", "base": "A", "maximal_simplices": [[["a", "e1"]]]},
            {"id": "B0", "base": "B", "maximal_simplices": [[["b", "e0"]]]},
            {"id": "B1", "base": "B", "maximal_simplices": [[["b", "e1"]]]}
        ]
    }"#;

    fn cover(json: &str) -> FiberedCover {
        FiberedCover::from_model(&ModelFile::from_json(json).unwrap()).unwrap()
    }

    #[test]
    fn object_counts() {
        let c = cover(ARROW_EDGE);
        assert_eq!(c.small().objects().len(), 2);
        assert_eq!(c.big().objects().len(), 6);
        assert_eq!(c.big().morphisms().len(), 15);
        let mut model = ModelFile::from_json(ARROW_EDGE).unwrap();
        model.sub_objects.truncate(1);
        assert_eq!(FiberedCover::from_model(&model).unwrap().big().objects().len(), 3);
    }

    #[test]
    fn point_fiber_with_full_sub_objects() {
        let mut model = ModelFile::from_json(ARROW_EDGE).unwrap();
        model.fiber = Some(crate::model::ComplexSpec {
            vertices: vec!["*".into()],
            maximal_simplices: vec![],
        });
        model.sub_objects = vec![
            crate::model::SubObjectSpec {
                id: "QA".into(),
                base: "A".into(),
                maximal_simplices: vec![vec![["a".into(), "*".into()]]],
            },
            crate::model::SubObjectSpec {
                id: "QB".into(),
                base: "B".into(),
                maximal_simplices: vec![vec![["b".into(), "*".into()]]],
            },
        ];
        let c = FiberedCover::from_model(&model).unwrap();
        assert_eq!(c.big().objects().len(), 2);
        assert_eq!(c.big().morphisms().len(), c.base().morphisms().len());
        let report = verify_identities(&c, 3, 10, 3).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn containment_violation() {
        let mut model = ModelFile::from_json(ARROW_EDGE).unwrap();
        model.sub_objects[0].maximal_simplices = vec![vec![["a".into(), "e9".into()]]];
        assert!(matches!(
            FiberedCover::from_model(&model),
            Err(Error::Validation(ValidationError::Containment { .. }))
        ));
    }

    #[test]
    fn f_at_length_one_is_the_inclusion_term() {
        let c = cover(ARROW_EDGE);
        let big = DoubleComplex::new(c.big(), 2).unwrap();
        let f1 = c.f_matrix(&big, 1, 0).unwrap();
        // F(φ)(V0) = φ(i_{V0})
        let rows = big.offsets(0, 0);
        let cols = big.offsets(1, 0);
        for (block, v) in big.strings(0).iter().enumerate() {
            let col = big.string_index(&chain(v.source, &[c.inclusion(v.source)])).unwrap();
            for i in 0..rows[block + 1] - rows[block] {
                assert_eq!(f1.get(rows[block] + i, cols[col] + i), rational::int(1));
            }
        }
        assert!(c.f_matrix(&big, 0, 0).is_err());
    }

    #[test]
    fn identities_on_edge_fiber() {
        let c = cover(ARROW_EDGE);
        let report = verify_identities(&c, 7, 10, 3).unwrap();
        assert!(report.passed(), "{:?}", report);
        assert_eq!(report.small_betti, vec![1, 0, 0, 0]);
    }
}
