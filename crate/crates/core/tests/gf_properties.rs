use leafspace::gf::{induced_map, GFComplex, GFElement, Variant};
use leafspace::linalg::bareiss_rank;
use leafspace::rational::{self, Rational};
use proptest::prelude::*;

const VARIANTS: [Variant; 3] = [Variant::W, Variant::WO, Variant::WGL];

fn random_element(complex: &GFComplex, degree: u32, coefs: &[i64]) -> GFElement {
    let dim = complex.basis(degree).len();
    let v: Vec<Rational> = (0..dim).map(|i| rational::int(coefs[i % coefs.len()])).collect();
    GFElement::from_vector(complex, degree, &v)
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>], inner: usize, cols: usize) -> Vec<Vec<Rational>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(rational::int(0), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

#[test]
fn betti_numbers_match_dense_oracle() {
    for n in 1..=3 {
        for v in VARIANTS {
            let complex = GFComplex::new(v, n).unwrap();
            let top = complex.top_degree();
            let h = complex.cohomology(top).unwrap();
            let mut euler_chain = 0i64;
            let mut euler_betti = 0i64;
            for d in 0..=top {
                let dim = complex.basis(d).len();
                let out_rank = bareiss_rank(&complex.differential_matrix(d));
                let in_rank = if d == 0 { 0 } else { bareiss_rank(&complex.differential_matrix(d - 1)) };
                assert_eq!(h.betti[d as usize], dim - out_rank - in_rank, "{v}_{n} degree {d}");
                let s = if d % 2 == 0 { 1 } else { -1 };
                euler_chain += s * dim as i64;
                euler_betti += s * h.betti[d as usize] as i64;
            }
            assert_eq!(euler_chain, euler_betti, "{v}_{n}");
        }
    }
}

#[test]
fn gl_classes_die_in_w() {
    for n in 1..=3 {
        let wgl = GFComplex::new(Variant::WGL, n).unwrap();
        let w = GFComplex::new(Variant::W, n).unwrap();
        for d in 1..=wgl.top_degree() {
            assert!(induced_map(&wgl, &w, d).unwrap().is_zero(), "n = {n}, degree {d}");
        }
    }
}

#[test]
fn induced_maps_compose() {
    for n in 1..=2 {
        let wgl = GFComplex::new(Variant::WGL, n).unwrap();
        let wo = GFComplex::new(Variant::WO, n).unwrap();
        let w = GFComplex::new(Variant::W, n).unwrap();
        for d in 0..=w.top_degree() {
            let a = induced_map(&wgl, &wo, d).unwrap();
            let b = induced_map(&wo, &w, d).unwrap();
            let c = induced_map(&wgl, &w, d).unwrap();
            let product = mat_mul(
                &b.matrix,
                &a.matrix,
                a.target_representatives.len(),
                a.source_representatives.len(),
            );
            assert_eq!(product, c.matrix, "n = {n}, degree {d}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn differential_squares_to_zero(
        vi in 0usize..3,
        n in 1u32..=3,
        d in 0u32..12,
        coefs in prop::collection::vec(-4i64..=4, 1..8),
    ) {
        let complex = GFComplex::new(VARIANTS[vi], n).unwrap();
        prop_assume!(d <= complex.top_degree());
        let x = random_element(&complex, d, &coefs);
        prop_assert!(x.differential().differential().is_zero());
    }

    #[test]
    fn differential_is_a_derivation(
        vi in 0usize..3,
        n in 1u32..=2,
        da in 0u32..6,
        db in 0u32..6,
        ca in prop::collection::vec(-3i64..=3, 1..5),
        cb in prop::collection::vec(-3i64..=3, 1..5),
    ) {
        let complex = GFComplex::new(VARIANTS[vi], n).unwrap();
        let a = random_element(&complex, da, &ca);
        let b = random_element(&complex, db, &cb);
        let sign = rational::int(if da % 2 == 0 { 1 } else { -1 });
        let lhs = a.mul(&b).differential();
        let rhs = a
            .differential()
            .mul(&b)
            .add(&a.mul(&b.differential()).scale(&sign))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
