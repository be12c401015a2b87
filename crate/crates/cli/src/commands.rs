use std::fmt::Write as _;
use std::path::Path;

use leafspace::category::ChartCategory;
use leafspace::cdr::{family_from_spec, j_map, total_cohomology};
use leafspace::form::ExteriorForm;
use leafspace::gf::{induced_map, is_trivial_class, GFComplex, GFElement, Triviality, Variant};
use leafspace::homotopy::{verify_identities, FiberedCover};
use leafspace::jets::{check_invariance, chern_form_quotient, realize_class, standard_family, JetCoordinates, MIN_ORDER};
use leafspace::model::ModelFile;
use leafspace::ratfunc::RationalFunction;
use leafspace::rational::{self, Rational};
use leafspace::Error;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(_) => 3,
            CliError::Lib(Error::Guard(_)) => 1,
            CliError::Lib(Error::Validation(_) | Error::Json(_)) => 3,
            CliError::Lib(_) => 2,
        }
    }
}

/// Text to print and whether the run counts as a failed verification.
pub struct Rendered {
    pub text: String,
    pub failed: bool,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Rendered { text, failed: false }
    }
}

fn json_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn variant(text: &str) -> Result<Variant, CliError> {
    text.parse().map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn codimension(n: u32) -> Result<u32, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(n)
}

fn model_of(v: Variant, n: u32, uncapped: bool) -> Result<GFComplex, CliError> {
    let n = codimension(n)?;
    Ok(if uncapped {
        GFComplex::new_unbounded(v, n)?
    } else {
        GFComplex::new(v, n)?
    })
}

fn load_model(path: &Path) -> Result<ModelFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    ModelFile::from_json(&text).map_err(|e| CliError::Model(format!("{}: {e}", path.display())))
}

fn model_error(path: &Path, e: Error) -> CliError {
    match e {
        Error::Guard(_) => CliError::Lib(e),
        other => CliError::Model(format!("{}: {other}", path.display())),
    }
}

fn fmt_matrix(m: &[Vec<Rational>]) -> Vec<Vec<String>> {
    m.iter().map(|row| row.iter().map(rational::format).collect()).collect()
}

pub fn gf(variant_name: &str, n: u32, max_degree: Option<u32>, uncapped: bool, format: Format) -> Result<Rendered, CliError> {
    let v = variant(variant_name)?;
    let complex = model_of(v, n, uncapped)?;
    let max = max_degree.unwrap_or_else(|| complex.top_degree());
    let h = complex.cohomology(max)?;
    if format == Format::Json {
        return Ok(Rendered::ok(json_text(&h.to_json())));
    }
    let mut out = String::new();
    writeln!(out, "H^*({v}_{n}), degrees 0..{max}").unwrap();
    writeln!(out, "degree  betti  representatives").unwrap();
    for (d, (b, reps)) in h.betti.iter().zip(&h.representatives).enumerate() {
        let reps: Vec<String> = reps.iter().map(|r| r.to_string()).collect();
        let line = format!("{d:<7} {b:<6} {}", reps.join("; "));
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    Ok(Rendered::ok(out))
}

const CHAIN: [(Variant, Variant); 3] = [
    (Variant::WGL, Variant::WO),
    (Variant::WO, Variant::W),
    (Variant::WGL, Variant::W),
];

pub fn compare(n: u32, degree: Option<u32>, uncapped: bool, format: Format) -> Result<Rendered, CliError> {
    let models: Vec<GFComplex> = [Variant::W, Variant::WO, Variant::WGL]
        .into_iter()
        .map(|v| model_of(v, n, uncapped))
        .collect::<Result<_, _>>()?;
    let get = |v: Variant| models.iter().find(|c| c.variant() == v).expect("all variants built");
    let degrees: Vec<u32> = match degree {
        Some(d) => vec![d],
        None => (0..=get(Variant::W).top_degree()).collect(),
    };
    let mut json_degrees = Vec::new();
    let mut out = String::new();
    writeln!(out, "n = {n}").unwrap();
    for &d in &degrees {
        writeln!(out, "degree {d}").unwrap();
        let mut maps = Vec::new();
        for (s, t) in CHAIN {
            let map = induced_map(get(s), get(t), d)?;
            let mut kernel = Vec::new();
            for k in map.kernel_elements() {
                let image = k.include_into(get(t))?;
                let primitive = match is_trivial_class(&image)? {
                    Triviality::Trivial { primitive } => primitive,
                    Triviality::Nontrivial { .. } => unreachable!("kernel classes are exact in the target"),
                };
                kernel.push((k, primitive));
            }
            let flagged = s == Variant::WGL && t == Variant::WO;
            let status = if map.source_representatives.is_empty() && map.target_representatives.is_empty() {
                "trivial groups"
            } else if map.is_isomorphism() {
                "isomorphism"
            } else if map.is_zero() {
                "zero"
            } else {
                "neither zero nor an isomorphism"
            };
            let names = |reps: &[GFElement]| reps.iter().map(|r| r.to_string()).collect::<Vec<_>>();
            writeln!(
                out,
                "  {s} -> {t}: {status}; source [{}]; target [{}]",
                names(&map.source_representatives).join(", "),
                names(&map.target_representatives).join(", ")
            )
            .unwrap();
            if !map.is_zero() {
                for row in fmt_matrix(&map.matrix) {
                    writeln!(out, "    [{}]", row.join(", ")).unwrap();
                }
            }
            for (k, p) in &kernel {
                write!(out, "    kernel: {k} = d({p})").unwrap();
                if flagged {
                    write!(out, "  [zero on every leaf space]").unwrap();
                }
                out.push('\n');
            }
            maps.push(json!({
                "source": s.to_string(),
                "target": t.to_string(),
                "status": status,
                "source_basis": names(&map.source_representatives),
                "target_basis": names(&map.target_representatives),
                "matrix": fmt_matrix(&map.matrix),
                "kernel": kernel.iter().map(|(k, p)| json!({
                    "class": k.to_string(),
                    "primitive_in_target": p.to_string(),
                    "zero_on_leaf_spaces": flagged,
                })).collect::<Vec<_>>(),
            }));
        }
        json_degrees.push(json!({ "degree": d, "maps": maps }));
    }
    Ok(Rendered::ok(match format {
        Format::Json => json_text(&json!({ "n": n, "degrees": json_degrees })),
        Format::Table => out,
    }))
}

pub fn realize(class: &str, variant_name: &str, n: u32, k: Option<usize>, format: Format) -> Result<Rendered, CliError> {
    let complex = GFComplex::new(variant(variant_name)?, codimension(n)?)?;
    let element = complex.parse_element(class).map_err(|e| CliError::Usage(e.to_string()))?;
    let k = k.unwrap_or_else(|| MIN_ORDER.max(element.degree() as usize));
    let coords = JetCoordinates::new(n as usize, k)?;
    let form = realize_class(&element, &coords)?;
    Ok(Rendered::ok(match format {
        Format::Json => json_text(&json!({
            "class": element.to_string(),
            "n": n,
            "K": k,
            "form": form.to_json(),
        })),
        Format::Table => format!("{form}\n"),
    }))
}

/// Forms with constant coefficients: `2 * dx0^dx1 - 1/2 * dx1`.
fn parse_form(text: &str, coords: &JetCoordinates) -> Result<ExteriorForm, CliError> {
    let names = coords.names();
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(CliError::Usage("empty form".into()));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with(['*', '^']) {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    let mut total: Option<ExteriorForm> = None;
    for term in terms {
        let (negative, body) = match term.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        let (coef, basis) = match body.split_once('*') {
            Some((c, b)) => (rational::parse(c).map_err(|e| CliError::Usage(e.to_string()))?, b),
            None if body.starts_with('d') => (Rational::from_integer(1.into()), body),
            None => (rational::parse(body).map_err(|e| CliError::Usage(e.to_string()))?, ""),
        };
        let coef = if negative { -coef } else { coef };
        let mut indices = Vec::new();
        if !basis.is_empty() {
            for part in basis.split('^') {
                let name = part
                    .strip_prefix('d')
                    .ok_or_else(|| CliError::Usage(format!("expected a differential, got {part:?}")))?;
                indices.push(
                    coords
                        .index(name)
                        .ok_or_else(|| CliError::Usage(format!("unknown coordinate {name:?}")))?,
                );
            }
        }
        let piece = ExteriorForm::monomial(names, RationalFunction::constant(coef), &indices);
        total = Some(match total {
            None => piece,
            Some(t) => t.add(&piece).map_err(|e| CliError::Usage(e.to_string()))?,
        });
    }
    Ok(total.expect("at least one term"))
}

pub fn invariance(
    class: Option<&str>,
    form: Option<&str>,
    variant_name: &str,
    k: usize,
    format: Format,
) -> Result<Rendered, CliError> {
    let coords = JetCoordinates::new(1, k)?;
    let (label, form) = match (class, form) {
        (Some(c), _) => {
            let complex = GFComplex::new(variant(variant_name)?, 1)?;
            let element = complex.parse_element(c).map_err(|e| CliError::Usage(e.to_string()))?;
            (element.to_string(), realize_class(&element, &coords)?)
        }
        (None, Some("chern")) => ("chern".to_string(), chern_form_quotient(&coords)?),
        (None, Some(f)) => (f.to_string(), parse_form(f, &coords)?),
        (None, None) => return Err(CliError::Usage("give --class or --form".into())),
    };
    let report = check_invariance(&form, &standard_family(&coords)?)?;
    Ok(Rendered::ok(match format {
        Format::Json => json_text(&json!({
            "input": label,
            "K": k,
            "form": form.to_string(),
            "invariant": report.invariant(),
            "members": report.outcomes.iter().map(|o| json!({
                "name": o.name,
                "invariant": o.invariant(),
                "residual": o.residual.to_string(),
            })).collect::<Vec<_>>(),
        })),
        Format::Table => {
            let mut out = format!("form: {form}\n");
            for o in &report.outcomes {
                if o.invariant() {
                    writeln!(out, "{}: invariant", o.name).unwrap();
                } else {
                    writeln!(out, "{}: residual {}", o.name, o.residual).unwrap();
                }
            }
            writeln!(out, "invariant: {}", report.invariant()).unwrap();
            out
        }
    }))
}

pub fn cdr(
    path: &Path,
    max_degree: usize,
    representatives: bool,
    family: Option<&str>,
    format: Format,
) -> Result<Rendered, CliError> {
    let model = load_model(path)?;
    let cat = ChartCategory::from_model(&model).map_err(|e| model_error(path, e.into()))?;
    let (dc, h) = total_cohomology(&cat, max_degree)?;
    let mut value = json!({
        "model": model.name.clone().unwrap_or_else(|| path.display().to_string()),
        "max_degree": max_degree,
        "betti": h.betti,
    });
    let mut out = String::new();
    writeln!(out, "model: {}", value["model"].as_str().unwrap()).unwrap();
    writeln!(out, "degree  betti").unwrap();
    for (t, b) in h.betti.iter().enumerate() {
        writeln!(out, "{t:<7} {b}").unwrap();
    }
    if representatives {
        let mut reps = Vec::new();
        for (t, list) in h.representatives.iter().enumerate() {
            for rep in list {
                let pieces: Vec<Value> = rep.iter().filter(|c| !c.is_zero()).map(|c| dc.cochain_json(c)).collect();
                writeln!(out, "representative in degree {t}: {}", serde_json::to_string(&pieces).unwrap()).unwrap();
                reps.push(json!({ "degree": t, "cochains": pieces }));
            }
        }
        value["representatives"] = Value::Array(reps);
    }
    if let Some(name) = family {
        let spec = model
            .families
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| CliError::Usage(format!("the model has no family named {name:?}")))?;
        let t = spec.degree;
        if t > max_degree {
            return Err(CliError::Usage(format!("family degree {t} exceeds --max-degree {max_degree}")));
        }
        let values = family_from_spec(&cat, spec).map_err(|e| model_error(path, e))?;
        let jw = j_map(&dc, &values, t)?;
        let flat = dc.join_total(t, &[jw.clone()]);
        let closed = dc.total_matrix(t)?.mul_vec(&flat).iter().all(Rational::is_zero);
        let class: Option<Vec<String>> = if closed {
            Some(h.class_of(t, &flat)?.iter().map(rational::format).collect())
        } else {
            None
        };
        writeln!(
            out,
            "j({name}): closed {closed}, class [{}]",
            class.as_deref().map(|c| c.join(", ")).unwrap_or_default()
        )
        .unwrap();
        value["j_map"] = json!({
            "family": name,
            "degree": t,
            "cochain": dc.cochain_json(&jw),
            "closed": closed,
            "class": class,
        });
    }
    Ok(Rendered::ok(match format {
        Format::Json => json_text(&value),
        Format::Table => out,
    }))
}

pub fn verify_homotopy(path: &Path, seed: u64, trials: usize, max_degree: usize, format: Format) -> Result<Rendered, CliError> {
    let model = load_model(path)?;
    let cover = FiberedCover::from_model(&model).map_err(|e| model_error(path, e))?;
    let report = verify_identities(&cover, seed, trials, max_degree)?;
    let text = match format {
        Format::Json => json_text(&report.to_json()),
        Format::Table => {
            let mut out = String::new();
            writeln!(
                out,
                "objects: {} small, {} big ({} big morphisms); seed {seed}, {trials} trials",
                report.small_objects, report.big_objects, report.big_morphisms
            )
            .unwrap();
            writeln!(out, "k  q  lambda-mu  homotopy  F-d").unwrap();
            for b in &report.bidegrees {
                writeln!(
                    out,
                    "{:<2} {:<2} {:<10} {:<9} {}",
                    b.k, b.q, b.lambda_mu_residual, b.homotopy_residual, b.f_commutes_residual
                )
                .unwrap();
            }
            writeln!(out, "expansion check: {}", report.expansion_check).unwrap();
            writeln!(out, "betti small {:?}, big {:?}", report.small_betti, report.big_betti).unwrap();
            writeln!(out, "inverse on cohomology: {}", report.inverse_on_cohomology).unwrap();
            writeln!(out, "passed: {}", report.passed()).unwrap();
            out
        }
    };
    Ok(Rendered {
        text,
        failed: !report.passed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_parser() {
        let coords = JetCoordinates::new(1, 3).unwrap();
        assert_eq!(parse_form("dx0", &coords).unwrap().to_string(), "1 * dx0");
        assert_eq!(
            parse_form("2 * dx1^dx0 - 1/2*dx1^dx2", &coords).unwrap().to_string(),
            "-2 * dx0^dx1 - 1/2 * dx1^dx2"
        );
        assert!(parse_form("dx0 + dx1^dx2", &coords).is_err());
        assert!(parse_form("dy0", &coords).is_err());
        assert!(parse_form("", &coords).is_err());
    }
}
