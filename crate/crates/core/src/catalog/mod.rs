//! Pair geometries (X, D): algebras, divisor data, invariant sources and
//! truncation defaults, plus the built-in examples.

mod config;
mod invariants;

use serde::Serialize;

pub use config::{builtin, load_geometry, BUILTIN_NAMES};
pub use invariants::{
    format_class, parse_class, InvariantKey, InvariantKind, InvariantRow, InvariantTable, POINT, POINT_TAU_D,
};

use crate::algebra::{AlgebraElement, GradedAlgebra, RestrictionMap};
use crate::error::{Error, Result};
use crate::series::{pairing, TruncationPolicy};

/// Where the J-function of X comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JSource {
    /// `J = z e^{H log y / z} sum_d y^d / prod_{k=1}^d (H + kz)^(n+1)`.
    ClosedFormProjective {
        dim: u32,
        #[serde(skip)]
        hyperplane: AlgebraElement,
    },
    /// Hypergeometric I-function assembled from the toric data.
    ToricHypergeometric,
    /// One-point invariants `<[pt] psi^a>` from a table.
    InvariantTable,
}

/// Why the mirror map in D may be skipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroJustification {
    Nef,
    K3,
    EllipticCurve,
}

impl ZeroJustification {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "nef" => Ok(Self::Nef),
            "k3" | "K3" => Ok(Self::K3),
            "elliptic_curve" => Ok(Self::EllipticCurve),
            other => Err(Error::Config(format!(
                "unknown justification `{other}` (expected nef, k3 or elliptic_curve)"
            ))),
        }
    }
}

/// Where the mirror map in D comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TauDSource {
    Zero(ZeroJustification),
    /// Computed from the D rows of the invariant table.
    FromDivisorInvariants,
}

/// A toric divisor or bundle class with its pairing against the Novikov basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToricClass {
    #[serde(skip)]
    pub class: AlgebraElement,
    pub label: String,
    pub pairing: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToricData {
    pub divisors: Vec<ToricClass>,
    pub bundles: Vec<ToricClass>,
    pub relative: ToricClass,
}

/// Everything the pipeline needs to know about a pair (X, D).
#[derive(Clone, Debug)]
pub struct PairGeometry {
    pub name: String,
    pub description: String,
    pub ambient: GradedAlgebra,
    pub divisor: GradedAlgebra,
    pub restriction: RestrictionMap,
    /// The class of D in the ambient algebra.
    pub divisor_class: AlgebraElement,
    pub novikov: Vec<String>,
    /// Classes `p_i` with `p_i . beta = beta_i`; they enter the `e^{p log y / z}` prefactor.
    pub prefactor: Vec<AlgebraElement>,
    /// `D . beta = sum_i m_i beta_i`.
    pub m_vector: Vec<i64>,
    pub j_source: JSource,
    pub tau_d_source: TauDSource,
    pub toric: Option<ToricData>,
    pub invariants: Option<InvariantTable>,
    pub policy: TruncationPolicy,
}

impl PairGeometry {
    pub fn nvars(&self) -> usize {
        self.novikov.len()
    }

    /// `D . beta`.
    pub fn degree(&self, beta: &[u32]) -> i64 {
        pairing(&self.m_vector, beta)
    }

    /// Coordinates of `m` that are negative, reported alongside results.
    pub fn negative_m(&self) -> Vec<usize> {
        self.m_vector
            .iter()
            .enumerate()
            .filter(|(_, m)| **m < 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `c_1(N_{D/X})` as a divisor class.
    pub fn normal_class(&self) -> Result<AlgebraElement> {
        self.restriction.apply(&self.divisor_class)
    }

    /// Same geometry, new maximal total weight.
    pub fn with_order(&self, n: u32) -> Self {
        Self {
            policy: self.policy.with_order(n),
            ..self.clone()
        }
    }

    pub fn with_policy(&self, policy: TruncationPolicy) -> Result<Self> {
        if policy.nvars() != self.nvars() {
            return Err(Error::Config(format!(
                "policy has {} variables, geometry `{}` has {}",
                policy.nvars(),
                self.name,
                self.nvars()
            )));
        }
        Ok(Self {
            policy,
            ..self.clone()
        })
    }

    /// Attaches an invariant table, checking class arity.
    pub fn with_invariants(&self, table: InvariantTable) -> Result<Self> {
        table.check_arity(self.nvars())?;
        Ok(Self {
            invariants: Some(table),
            ..self.clone()
        })
    }

    pub fn invariants(&self) -> Result<&InvariantTable> {
        self.invariants
            .as_ref()
            .ok_or_else(|| Error::MissingSource(format!("geometry `{}` needs an invariant table", self.name)))
    }
}
