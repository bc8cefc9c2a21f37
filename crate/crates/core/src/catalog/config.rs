use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Deserialize;

use super::{
    InvariantRow, InvariantTable, JSource, PairGeometry, TauDSource, ToricClass, ToricData, ZeroJustification,
};
use crate::algebra::{AlgebraElement, GradedAlgebra, RestrictionMap};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat, Rational};
use crate::series::TruncationPolicy;

pub const BUILTIN_NAMES: [&str; 3] = ["p2_cubic", "p3_quartic", "blp3_k3"];

const P2_CUBIC: &str = include_str!("../../geometries/p2_cubic.toml");
const P3_QUARTIC: &str = include_str!("../../geometries/p3_quartic.toml");
const BLP3_K3: &str = include_str!("../../geometries/blp3_k3.toml");

pub fn builtin(name: &str) -> Result<PairGeometry> {
    let text = match name {
        "p2_cubic" => P2_CUBIC,
        "p3_quartic" => P3_QUARTIC,
        "blp3_k3" => BLP3_K3,
        other => {
            return Err(Error::Config(format!(
                "unknown builtin geometry `{other}` (available: {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    load_geometry(text)
}

/// Integer or `"p/q"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Text(String),
}

impl RawRational {
    fn value(&self) -> Result<Rational> {
        match self {
            RawRational::Int(n) => Ok(rat(*n)),
            RawRational::Text(s) => parse_rational(s),
        }
    }
}

/// `[[label, coeff], ...]`.
type RawClass = Vec<(String, RawRational)>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    #[serde(default)]
    description: String,
    algebra: RawAlgebras,
    restriction: BTreeMap<String, RawClass>,
    pair: RawPair,
    toric: Option<RawToric>,
    truncation: Option<RawTruncation>,
    #[serde(default)]
    invariant: Vec<RawInvariant>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebras {
    ambient: RawAlgebra,
    divisor: RawAlgebra,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    labels: Vec<String>,
    degrees: Vec<u32>,
    unit: String,
    point: Option<String>,
    #[serde(default)]
    products: Vec<(String, String, String, RawRational)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    divisor_class: RawClass,
    novikov: Vec<String>,
    prefactor: Vec<RawClass>,
    m_vector: Vec<i64>,
    j_source: String,
    projective_dim: Option<u32>,
    hyperplane: Option<String>,
    tau_d_source: String,
    justification: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawToricClass {
    label: String,
    class: RawClass,
    pairing: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawToric {
    divisors: Vec<RawToricClass>,
    #[serde(default)]
    bundles: Vec<RawToricClass>,
    relative: RawToricClass,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncation {
    weights: Option<Vec<u32>>,
    order: Option<u32>,
    z_min: Option<i64>,
    z_max: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInvariant {
    kind: String,
    class: String,
    psi_power: u32,
    #[serde(default = "point_insertion")]
    insertion: String,
    value: RawRational,
}

fn point_insertion() -> String {
    super::POINT.into()
}

fn build_algebra(name: &str, raw: &RawAlgebra) -> Result<GradedAlgebra> {
    let index = |label: &str| {
        raw.labels.iter().position(|l| l == label).ok_or_else(|| Error::InvalidAlgebra {
            algebra: name.into(),
            invariant: "known labels",
            detail: format!("`{label}` is not a basis label"),
        })
    };
    let mut products = Vec::with_capacity(raw.products.len());
    for (a, b, c, v) in &raw.products {
        products.push((index(a)?, index(b)?, index(c)?, v.value()?));
    }
    let point = raw.point.as_deref().map(index).transpose()?;
    GradedAlgebra::new(name, raw.labels.clone(), raw.degrees.clone(), index(&raw.unit)?, point, &products)
}

fn build_class(algebra: &GradedAlgebra, raw: &RawClass) -> Result<AlgebraElement> {
    let mut out = algebra.zero();
    for (label, c) in raw {
        out = &out + &algebra.class(label)?.scale(&c.value()?);
    }
    Ok(out)
}

/// Parses and validates a geometry description.
pub fn load_geometry(text: &str) -> Result<PairGeometry> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let name = raw.name.clone();
    let reject = |invariant: &'static str, detail: String| Error::InvalidGeometry {
        geometry: name.clone(),
        invariant,
        detail,
    };

    let ambient = build_algebra(&format!("{name}.ambient"), &raw.algebra.ambient)?;
    let divisor = build_algebra(&format!("{name}.divisor"), &raw.algebra.divisor)?;

    let mut images = Vec::with_capacity(ambient.dim());
    for label in ambient.labels() {
        let img = raw
            .restriction
            .get(label)
            .ok_or_else(|| reject("restriction covers the ambient basis", format!("no image for `{label}`")))?;
        images.push(build_class(&divisor, img)?);
    }
    for label in raw.restriction.keys() {
        if ambient.index_of(label).is_none() {
            return Err(reject("restriction covers the ambient basis", format!("unknown class `{label}`")));
        }
    }
    let restriction = RestrictionMap::from_images(images, divisor.dim())?;
    restriction.validate(&ambient, &divisor)?;

    let pair = &raw.pair;
    let divisor_class = build_class(&ambient, &pair.divisor_class)?;
    if !is_homogeneous(&ambient, &divisor_class, 1) || divisor_class.is_zero() {
        return Err(reject("divisor class has degree 1", ambient.display(&divisor_class)));
    }
    let r = pair.novikov.len();
    if r == 0 {
        return Err(reject("at least one Novikov variable", String::new()));
    }
    if pair.m_vector.len() != r || pair.prefactor.len() != r {
        return Err(reject(
            "one m-entry and one prefactor class per Novikov variable",
            format!(
                "{r} variables, {} m-entries, {} prefactor classes",
                pair.m_vector.len(),
                pair.prefactor.len()
            ),
        ));
    }
    let prefactor = pair
        .prefactor
        .iter()
        .map(|c| build_class(&ambient, c))
        .collect::<Result<Vec<_>>>()?;
    for p in &prefactor {
        if !is_homogeneous(&ambient, p, 1) {
            return Err(reject("prefactor classes have degree 1", ambient.display(p)));
        }
    }
    // D = sum m_i p_i is what makes D . beta = m . beta
    let mut combo = ambient.zero();
    for (p, m) in prefactor.iter().zip(&pair.m_vector) {
        combo = &combo + &p.scale(&rat(*m));
    }
    if combo != divisor_class {
        return Err(reject(
            "D . beta from m_vector matches the intersection pairing",
            format!("D = {}, sum m_i p_i = {}", ambient.display(&divisor_class), ambient.display(&combo)),
        ));
    }

    let toric = raw
        .toric
        .as_ref()
        .map(|t| build_toric(&ambient, t, r))
        .transpose()?;
    if let Some(t) = &toric {
        if t.relative.pairing != pair.m_vector {
            return Err(reject(
                "D . beta from m_vector matches the intersection pairing",
                format!("relative divisor pairing {:?} vs m {:?}", t.relative.pairing, pair.m_vector),
            ));
        }
        if t.relative.class != divisor_class {
            return Err(reject("relative toric divisor is D", ambient.display(&t.relative.class)));
        }
        for tc in t.divisors.iter().chain(&t.bundles).chain(std::iter::once(&t.relative)) {
            if tc.pairing.len() != r {
                return Err(reject("toric pairings have one entry per variable", tc.label.clone()));
            }
            if !is_homogeneous(&ambient, &tc.class, 1) {
                return Err(reject("toric classes have degree 1", tc.label.clone()));
            }
        }
    }

    let j_source = match pair.j_source.as_str() {
        "closed_form_projective" => {
            let n = pair
                .projective_dim
                .ok_or_else(|| reject("projective source names its dimension", String::new()))?;
            let label = pair.hyperplane.as_deref().unwrap_or("H");
            let h = ambient.class(label)?;
            let top = ambient.power(&h, n)?;
            if ambient.dim() != n as usize + 1 || ambient.integrate(&top)? != Rational::one() || r != 1 {
                return Err(reject(
                    "projective source matches the ambient algebra",
                    format!("P^{n} with hyperplane `{label}`"),
                ));
            }
            if prefactor[0] != h {
                return Err(reject("projective prefactor is the hyperplane class", ambient.display(&prefactor[0])));
            }
            JSource::ClosedFormProjective { dim: n, hyperplane: h }
        }
        "toric_hypergeometric" => {
            if toric.is_none() {
                return Err(reject("toric source has toric data", String::new()));
            }
            JSource::ToricHypergeometric
        }
        "invariant_table" => JSource::InvariantTable,
        other => return Err(Error::Config(format!("unknown j_source `{other}`"))),
    };

    let tau_d_source = match pair.tau_d_source.as_str() {
        "zero" => {
            let just = pair
                .justification
                .as_deref()
                .ok_or_else(|| reject("zero mirror map in D is justified", "missing justification".into()))?;
            let just = ZeroJustification::parse(just)?;
            let needed = match just {
                ZeroJustification::K3 => Some(2),
                ZeroJustification::EllipticCurve => Some(1),
                ZeroJustification::Nef => None,
            };
            if let Some(d) = needed {
                if divisor.top_degree() != d {
                    return Err(reject(
                        "zero mirror map in D is justified",
                        format!("{just:?} needs a divisor of dimension {d}, algebra has top degree {}", divisor.top_degree()),
                    ));
                }
            }
            TauDSource::Zero(just)
        }
        "closed_form_from_one_point_invariants" | "table" => TauDSource::FromDivisorInvariants,
        other => return Err(Error::Config(format!("unknown tau_d_source `{other}`"))),
    };

    let policy = build_policy(raw.truncation.as_ref(), r)?;

    let invariants = if raw.invariant.is_empty() {
        None
    } else {
        let rows = raw
            .invariant
            .iter()
            .map(|i| {
                Ok(InvariantRow {
                    kind: i.kind.clone(),
                    class: i.class.clone(),
                    psi_power: i.psi_power,
                    insertion: i.insertion.clone(),
                    value: crate::rational::format_rational(&i.value.value()?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let table = InvariantTable::from_rows(rows)?;
        table.check_arity(r)?;
        Some(table)
    };

    Ok(PairGeometry {
        name,
        description: raw.description,
        ambient,
        divisor,
        restriction,
        divisor_class,
        novikov: pair.novikov.clone(),
        prefactor,
        m_vector: pair.m_vector.clone(),
        j_source,
        tau_d_source,
        toric,
        invariants,
        policy,
    })
}

fn is_homogeneous(algebra: &GradedAlgebra, a: &AlgebraElement, degree: u32) -> bool {
    a.coeffs
        .iter()
        .enumerate()
        .all(|(i, c)| c.is_zero() || algebra.degree(i) == degree)
}

fn build_toric(ambient: &GradedAlgebra, raw: &RawToric, r: usize) -> Result<ToricData> {
    let one = |t: &RawToricClass| -> Result<ToricClass> {
        if t.pairing.len() != r {
            return Err(Error::Config(format!(
                "toric class `{}` has {} pairings, expected {r}",
                t.label,
                t.pairing.len()
            )));
        }
        Ok(ToricClass {
            class: build_class(ambient, &t.class)?,
            label: t.label.clone(),
            pairing: t.pairing.clone(),
        })
    };
    Ok(ToricData {
        divisors: raw.divisors.iter().map(one).collect::<Result<_>>()?,
        bundles: raw.bundles.iter().map(one).collect::<Result<_>>()?,
        relative: one(&raw.relative)?,
    })
}

fn build_policy(raw: Option<&RawTruncation>, r: usize) -> Result<TruncationPolicy> {
    let weights = raw.and_then(|t| t.weights.clone()).unwrap_or_else(|| vec![1; r]);
    if weights.len() != r {
        return Err(Error::Config(format!("{} truncation weights for {r} variables", weights.len())));
    }
    let order = raw.and_then(|t| t.order).unwrap_or(8);
    let default = TruncationPolicy::with_weights(weights.clone(), order.max(1));
    TruncationPolicy::new(
        weights,
        order,
        raw.and_then(|t| t.z_min).unwrap_or(default.z_min),
        raw.and_then(|t| t.z_max).unwrap_or(default.z_max),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::TauDSource;

    #[test]
    fn builtins_load() {
        for name in BUILTIN_NAMES {
            let g = builtin(name).unwrap();
            assert_eq!(g.name, name);
        }
        assert!(builtin("quintic").is_err());
    }

    #[test]
    fn p2_cubic_shape() {
        let g = builtin("p2_cubic").unwrap();
        assert_eq!(g.ambient.dim(), 3);
        assert_eq!(g.m_vector, vec![3]);
        assert_eq!(g.divisor_class, g.ambient.class("H").unwrap().scale(&rat(3)));
        assert_eq!(g.tau_d_source, TauDSource::Zero(ZeroJustification::EllipticCurve));
    }

    #[test]
    fn p3_quartic_shape() {
        let g = builtin("p3_quartic").unwrap();
        assert_eq!(g.m_vector, vec![4]);
        assert_eq!(g.tau_d_source, TauDSource::Zero(ZeroJustification::K3));
        let h = g.restriction.apply(&g.ambient.class("H").unwrap()).unwrap();
        assert_eq!(g.divisor.integrate(&g.divisor.multiply(&h, &h).unwrap()).unwrap(), rat(4));
        let h2 = g.restriction.apply(&g.ambient.class("H2").unwrap()).unwrap();
        assert!(g.divisor.multiply(&h2, &h2).unwrap().is_zero());
    }

    #[test]
    fn blp3_shape() {
        let g = builtin("blp3_k3").unwrap();
        assert_eq!(g.m_vector, vec![-1, 1]);
        assert_eq!(g.negative_m(), vec![0]);
        assert_eq!(g.degree(&[1, 3]), 2);
        let a = &g.ambient;
        let hh = a.multiply(&a.class("h").unwrap(), &a.class("h").unwrap()).unwrap();
        assert_eq!(hh, a.class("Hh").unwrap());
        let toric = g.toric.as_ref().unwrap();
        assert_eq!(toric.bundles[0].pairing, vec![4, 1]);
        let r_h = g.restriction.apply(&a.class("H").unwrap()).unwrap();
        assert_eq!(r_h, g.restriction.apply(&a.class("h").unwrap()).unwrap());
    }

    fn p3_with(edit: impl Fn(String) -> String) -> Result<PairGeometry> {
        load_geometry(&edit(P3_QUARTIC.to_string()))
    }

    #[test]
    fn rejects_named_invariants() {
        let err = p3_with(|s| s.replace("m_vector = [4]", "m_vector = [3]")).unwrap_err();
        assert!(matches!(err, Error::InvalidGeometry { invariant, .. } if invariant.contains("m_vector")));
        let err = p3_with(|s| s.replace("justification = \"k3\"", "justification = \"elliptic_curve\"")).unwrap_err();
        assert!(matches!(err, Error::InvalidGeometry { invariant, .. } if invariant.contains("justified")));
        let err = p3_with(|s| s.replace("H = [[\"h\", 1]]", "H = [[\"h\", 2]]")).unwrap_err();
        assert!(matches!(err, Error::InvalidAlgebra { invariant: "ring homomorphism", .. }));
        let err = p3_with(|s| s.replace("justification = \"k3\"\n", "")).unwrap_err();
        assert!(matches!(err, Error::InvalidGeometry { .. }));
    }

    #[test]
    fn inline_invariants_and_truncation() {
        let text = format!(
            "{}\n[[invariant]]\nkind = \"X\"\nclass = \"1\"\npsi_power = 2\nvalue = 1\n",
            P3_QUARTIC
        );
        let g = load_geometry(&text).unwrap();
        assert_eq!(g.invariants.unwrap().len(), 1);
        assert_eq!(g.policy.weights, vec![4]);
        assert!(load_geometry("name = 1").is_err());
    }
}
