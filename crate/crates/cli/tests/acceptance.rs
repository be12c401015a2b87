//! The ten acceptance criteria, one PASS/FAIL line each. Every comparison
//! is an exact equality of rationals, forms or bytes.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use leafspace::category::ChartCategory;
use leafspace::cdr::{family_from_spec, j_map, random_vector, total_cohomology, DoubleComplex};
use leafspace::form::ExteriorForm;
use leafspace::gf::{induced_map, is_trivial_class, GFComplex, GFElement, Triviality, Variant};
use leafspace::homotopy::{verify_identities, FiberedCover};
use leafspace::jets::{
    check_invariance, chern_form_quotient, godbillon_vey_reference, maurer_cartan_expansion, realize_class,
    reflection_action, scaling_action, standard_family, tautological_form, FamilyMember, JetCoordinates,
};
use leafspace::model::ModelFile;
use leafspace::ratfunc::RationalFunction;
use leafspace::rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn model(name: &str) -> ModelFile {
    ModelFile::load(&root().join("models").join(format!("{name}.json"))).unwrap()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn element(v: Variant, n: u32, s: &str) -> Result<GFElement, String> {
    GFComplex::new(v, n).map_err(err)?.parse_element(s).map_err(err)
}

/// `a = s * b` for some rational `s != 0`.
fn proportional(a: &GFElement, b: &GFElement) -> bool {
    let (va, vb) = (a.to_vector(), b.to_vector());
    let Some(j) = vb.iter().position(|x| *x != rational::int(0)) else {
        return false;
    };
    let s = &va[j] / &vb[j];
    s != rational::int(0) && vb.iter().zip(&va).all(|(y, x)| &(y * &s) == x)
}

fn criterion_1() -> Outcome {
    let wo1 = GFComplex::new(Variant::WO, 1).map_err(err)?;
    let h = wo1.cohomology(3).map_err(err)?;
    check(h.betti == [1, 0, 0, 1], format!("betti(WO1) = {:?}", h.betti))?;
    let gv = wo1.parse_element("y1*c1").map_err(err)?;
    check(proportional(&h.representatives[3][0], &gv), "degree-3 class is not a multiple of y1*c1")?;
    let wgl1 = GFComplex::new(Variant::WGL, 1).map_err(err)?;
    let h = wgl1.cohomology(wgl1.top_degree()).map_err(err)?;
    check(h.betti == [1, 0, 1], format!("betti(WGL1) = {:?}", h.betti))?;
    check(
        proportional(&h.representatives[2][0], &wgl1.parse_element("c1").map_err(err)?),
        "degree-2 class of WGL1 is not a multiple of c1",
    )?;
    Ok("betti(WO1) = [1,0,0,1] spanned by y1*c1; betti(WGL1) = [1,0,1] spanned by c1".into())
}

fn criterion_2() -> Outcome {
    let c2_w = element(Variant::W, 2, "c2")?;
    match is_trivial_class(&c2_w).map_err(err)? {
        Triviality::Trivial { primitive } => {
            check(primitive == element(Variant::W, 2, "y2")?, format!("primitive of c2 is {primitive}"))?
        }
        Triviality::Nontrivial { .. } => return Err("c2 is nontrivial in W2".into()),
    }
    for v in [Variant::WO, Variant::WGL] {
        check(
            !is_trivial_class(&element(v, 2, "c2")?).map_err(err)?.is_trivial(),
            format!("c2 is trivial in {v}2"),
        )?;
    }
    let wo1 = GFComplex::new(Variant::WO, 1).map_err(err)?;
    let w1 = GFComplex::new(Variant::W, 1).map_err(err)?;
    for d in 0..=w1.top_degree().max(wo1.top_degree()) {
        check(induced_map(&wo1, &w1, d).map_err(err)?.is_isomorphism(), format!("WO1 -> W1 not iso in degree {d}"))?;
    }
    for n in 1..=3 {
        let wgl = GFComplex::new(Variant::WGL, n).map_err(err)?;
        let w = GFComplex::new(Variant::W, n).map_err(err)?;
        for d in 1..=wgl.top_degree() {
            check(induced_map(&wgl, &w, d).map_err(err)?.is_zero(), format!("WGL{n} -> W{n} nonzero in degree {d}"))?;
        }
    }
    Ok("c2 = d(y2) in W2, nontrivial in WO2 and WGL2; WO1 -> W1 iso; WGL_n -> W_n zero for n <= 3".into())
}

fn criterion_3() -> Outcome {
    let coords = JetCoordinates::one_dimensional(3);
    let gv = realize_class(&element(Variant::WO, 1, "y1*c1")?, &coords).map_err(err)?;
    let reference = godbillon_vey_reference(&coords).map_err(err)?;
    let s = gv.ratio_to(&reference).ok_or_else(|| format!("{gv} is not a multiple of the reference form"))?;
    check(s == rational::int(-1), format!("scalar {s}"))?;
    Ok(format!("realize(y1*c1) = {gv} = -1 * (1/x1^3 dx0^dx1^dx2)"))
}

fn gl1_members(coords: &JetCoordinates) -> Result<Vec<FamilyMember>, String> {
    Ok(vec![
        FamilyMember {
            name: "scaling".into(),
            action: scaling_action(coords, &RationalFunction::var("lambda")).map_err(err)?,
        },
        FamilyMember {
            name: "reflection".into(),
            action: reflection_action(coords).map_err(err)?,
        },
    ])
}

fn criterion_4() -> Outcome {
    let coords = JetCoordinates::one_dimensional(3);
    let chern = chern_form_quotient(&coords).map_err(err)?;
    let c1 = realize_class(&element(Variant::WGL, 1, "c1")?, &coords).map_err(err)?;
    check(chern == c1.neg(), format!("dy2^dy0 = {chern}, c1 = {c1}"))?;
    check(chern.exterior_derivative().is_zero() && c1.exterior_derivative().is_zero(), "not closed")?;
    let members = gl1_members(&coords)?;
    for f in [&chern, &c1] {
        let report = check_invariance(f, &members).map_err(err)?;
        check(report.invariant(), format!("{f} not GL(1) invariant"))?;
    }
    Ok(format!("dy2^dy0 = -realize(c1) = {chern}; closed and GL(1) invariant"))
}

fn criterion_5() -> Outcome {
    let coords = JetCoordinates::one_dimensional(3);
    let family = standard_family(&coords).map_err(err)?;
    let gv = realize_class(&element(Variant::WO, 1, "y1*c1")?, &coords).map_err(err)?;
    let report = check_invariance(&gv, &family).map_err(err)?;
    if let Some(bad) = report.first_failure() {
        return Err(format!("{} leaves residual {}", bad.name, bad.residual));
    }
    let dx0 = ExteriorForm::differential(coords.names(), 0);
    let control = check_invariance(&dx0, &family).map_err(err)?;
    let failure = control.first_failure().ok_or("dx0 passed every member")?;
    Ok(format!(
        "y1*c1 invariant under cubic, scaling and reflection; dx0 fails ({}: {})",
        failure.name, failure.residual
    ))
}

fn criterion_6() -> Outcome {
    let coords = JetCoordinates::one_dimensional(5);
    let taut = tautological_form(&coords).map_err(err)?;
    for k in 0..=3 {
        let lhs = taut.components()[k].exterior_derivative();
        let rhs = maurer_cartan_expansion(&taut, k).map_err(err)?;
        check(lhs == rhs, format!("d theta_{k} = {lhs}, expansion {rhs}"))?;
    }
    Ok("d theta_k matches the structure-constant expansion for k = 0..3 at K = 5".into())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let names = ["point", "circle_one_chart", "circle_pushout", "arrow", "z2", "point_fiber", "edge_fiber"];
    for name in names {
        let cat = ChartCategory::from_model(&model(name)).map_err(err)?;
        let dc = DoubleComplex::new(&cat, 3).map_err(err)?;
        for p in 0..=1 {
            for q in 0..=dc.max_q() {
                for _ in 0..100 {
                    let w = dc.random(p, q, &mut rng);
                    check(dc.delta(&dc.delta(&w).map_err(err)?).map_err(err)?.is_zero(), format!("{name}: delta^2"))?;
                }
            }
        }
        for t in 0..=1 {
            let (d1, d2) = (dc.total_matrix(t).map_err(err)?, dc.total_matrix(t + 1).map_err(err)?);
            for _ in 0..100 {
                let v = random_vector(&mut rng, dc.total_dim(t));
                check(d2.mul_vec(&d1.mul_vec(&v)).iter().all(|x| *x == rational::int(0)), format!("{name}: D^2"))?;
            }
        }
    }
    let fixture = root().join("crates/core/tests/fixtures/simplicial_oracle.json");
    let oracle: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(fixture).map_err(err)?).map_err(err)?;
    let expected = |name: &str| -> Vec<usize> {
        let case = oracle.iter().find(|c| c["model"] == name).expect("fixture entry");
        serde_json::from_value(case["betti"].clone()).unwrap()
    };
    let betti = |name: &str, max: usize| -> Result<Vec<usize>, String> {
        let cat = ChartCategory::from_model(&model(name)).map_err(err)?;
        Ok(total_cohomology(&cat, max).map_err(err)?.1.betti)
    };
    check(betti("point", 2)? == [1, 0, 0] && expected("point") == [1, 0, 0], "point")?;
    let one = betti("circle_one_chart", 1)?;
    let two = betti("circle_pushout", 1)?;
    check(one == [1, 1] && two == [1, 1], format!("circles {one:?} {two:?}"))?;
    check(expected("circle_one_chart") == one, "circle_one_chart vs oracle")?;
    check(expected("circle_pushout")[..2] == two[..], "circle_pushout vs oracle")?;
    Ok("delta^2 = D^2 = 0 on 100 cochains per bidegree and model; point [1,0,0]; both circles [1,1]".into())
}

fn criterion_8() -> Outcome {
    let m = model("circle_one_chart");
    let cat = ChartCategory::from_model(&m).map_err(err)?;
    let (dc, h) = total_cohomology(&cat, 1).map_err(err)?;
    let spec = m.families.iter().find(|f| f.name == "generator").ok_or("no generator family")?;
    let family = family_from_spec(&cat, spec).map_err(err)?;
    let jw = j_map(&dc, &family, 1).map_err(err)?;
    check(jw.p == 0 && jw.q == 1, "j lands outside bidegree (0,1)")?;
    let flat = dc.join_total(1, &[jw]);
    check(dc.total_matrix(1).map_err(err)?.mul_vec(&flat).iter().all(|x| *x == rational::int(0)), "j(w) not D-closed")?;
    let class = h.class_of(1, &flat).map_err(err)?;
    check(class.iter().any(|x| *x != rational::int(0)), "j(w) is exact")?;
    let shown: Vec<String> = class.iter().map(rational::format).collect();
    Ok(format!("j(generator) is D-closed with class [{}] in H^1 = Q", shown.join(",")))
}

fn criterion_9() -> Outcome {
    let mut summary = Vec::new();
    for name in ["point_fiber", "edge_fiber"] {
        let cover = FiberedCover::from_model(&model(name)).map_err(err)?;
        let report = verify_identities(&cover, 7, 100, 3).map_err(err)?;
        check(report.passed(), format!("{name}: {}", report.to_json()))?;
        check(report.bidegrees.iter().all(|b| b.k + b.q <= 3 && b.trials == 100), "bidegree range")?;
        check(report.bidegrees.iter().any(|b| b.k + b.q == 3), "total degree 3 not reached")?;
        summary.push(format!("{name} ({} big objects)", report.big_objects));
    }
    Ok(format!("lambda mu = id, mu lambda - id = dF + Fd, inverse on cohomology: {}", summary.join(", ")))
}

fn criterion_10() -> Outcome {
    let runs: [&[&str]; 4] = [
        &["gf", "--variant", "WO", "--n", "2", "--format", "json"],
        &["realize", "--class", "y1*c1", "--format", "json"],
        &["cdr", "--model", "models/circle_pushout.json", "--representatives"],
        &["verify-homotopy", "--model", "models/edge_fiber.json", "--seed", "11", "--trials", "20"],
    ];
    for args in runs {
        let once = || {
            Command::new(env!("CARGO_BIN_EXE_leafspace"))
                .args(args)
                .current_dir(root())
                .output()
                .map_err(err)
        };
        let (a, b) = (once()?, once()?);
        check(a.status.success() && b.status.success(), format!("{args:?} failed"))?;
        check(a.stdout == b.stdout, format!("{args:?} differs between runs"))?;
    }
    Ok("four commands byte-identical across two runs".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("Gelfand-Fuchs small cases", criterion_1, Duration::from_secs(1)),
        ("comparison facts", criterion_2, Duration::from_secs(10)),
        ("Godbillon-Vey realization", criterion_3, Duration::from_secs(1)),
        ("Chern-form consistency", criterion_4, Duration::from_secs(1)),
        ("invariance suite", criterion_5, Duration::from_secs(5)),
        ("Maurer-Cartan structure", criterion_6, Duration::from_secs(5)),
        ("double complex", criterion_7, Duration::from_secs(30)),
        ("j map", criterion_8, Duration::from_secs(5)),
        ("homotopy identities", criterion_9, Duration::from_secs(60)),
        ("reproducibility", criterion_10, Duration::from_secs(120)),
    ];
    let mut failures = Vec::new();
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => {
                let note = if elapsed > budget && !cfg!(debug_assertions) { " (over time budget)" } else { "" };
                println!("PASS {:>2} {name}: {detail} [{:.2?}]{note}", i + 1, elapsed);
            }
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} [{:.2?}]", i + 1, elapsed);
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
