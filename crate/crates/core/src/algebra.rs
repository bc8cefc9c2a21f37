//! Finite-dimensional graded commutative algebras presented by a basis and a
//! multiplication table, with integration and restriction maps.
//!
//! Degrees are complex degrees. Every algebra used by the pipeline is small
//! (dimension well under twenty), so structure constants are stored densely.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// A rational vector over the basis of some [`GradedAlgebra`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraElement {
    pub coeffs: Vec<Rational>,
}

impl AlgebraElement {
    pub fn zero(dim: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut e = Self::zero(dim);
        e.coeffs[index] = Rational::one();
        e
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn coefficient(&self, index: usize) -> &Rational {
        &self.coeffs[index]
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        assert_eq!(self.dim(), other.dim(), "algebra element dimension mismatch");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Graded commutative algebra with structure constants `c[i][j][k]`,
/// i.e. `e_i * e_j = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedAlgebra {
    name: String,
    labels: Vec<String>,
    degrees: Vec<u32>,
    table: Vec<Vec<Vec<Rational>>>,
    unit: usize,
    point: Option<usize>,
}

impl GradedAlgebra {
    /// Builds and validates an algebra. Products with the unit are filled in
    /// automatically; each listed product `(i, j, k, c)` sets both `c[i][j][k]`
    /// and `c[j][i][k]`.
    #[allow(clippy::needless_range_loop)]
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        degrees: Vec<u32>,
        unit: usize,
        point: Option<usize>,
        products: &[(usize, usize, usize, Rational)],
    ) -> Result<Self> {
        let name = name.into();
        let dim = labels.len();
        let invalid = |invariant: &'static str, detail: String| Error::InvalidAlgebra {
            algebra: name.clone(),
            invariant,
            detail,
        };
        if dim == 0 {
            return Err(invalid("nonempty basis", "no basis classes".into()));
        }
        if degrees.len() != dim {
            return Err(invalid(
                "one degree per basis class",
                format!("{} labels, {} degrees", dim, degrees.len()),
            ));
        }
        if unit >= dim || point.is_some_and(|p| p >= dim) {
            return Err(invalid("indices in range", "unit or point index out of range".into()));
        }
        let mut table = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for i in 0..dim {
            table[unit][i][i] = Rational::one();
            table[i][unit][i] = Rational::one();
        }
        for (i, j, k, c) in products {
            if *i >= dim || *j >= dim || *k >= dim {
                return Err(invalid("indices in range", format!("product ({i},{j},{k})")));
            }
            table[*i][*j][*k] = c.clone();
            table[*j][*i][*k] = c.clone();
        }
        let algebra = Self {
            name,
            labels,
            degrees,
            table,
            unit,
            point,
        };
        algebra.validate()?;
        Ok(algebra)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, index: usize) -> u32 {
        self.degrees[index]
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn point_index(&self) -> Option<usize> {
        self.point
    }

    pub fn top_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.table[i][j][k]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::zero(self.dim())
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement::basis(self.dim(), self.unit)
    }

    pub fn basis(&self, index: usize) -> AlgebraElement {
        AlgebraElement::basis(self.dim(), index)
    }

    pub fn scalar(&self, r: Rational) -> AlgebraElement {
        self.one().scale(&r)
    }

    /// Looks up a basis class by label.
    pub fn class(&self, label: &str) -> Result<AlgebraElement> {
        self.index_of(label)
            .map(|i| self.basis(i))
            .ok_or_else(|| Error::Config(format!("algebra `{}` has no class `{label}`", self.name)))
    }

    /// Linear combination of labelled basis classes.
    pub fn combination(&self, terms: &[(&str, Rational)]) -> Result<AlgebraElement> {
        let mut out = self.zero();
        for (label, c) in terms {
            out = &out + &self.class(label)?.scale(c);
        }
        Ok(out)
    }

    fn conform(&self, a: &AlgebraElement) -> Result<()> {
        if a.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::Conformance {
                expected: self.dim(),
                found: a.dim(),
            })
        }
    }

    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.conform(a)?;
        self.conform(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let dim = self.dim();
        let mut out = vec![Rational::zero(); dim];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let ab = ai * bj;
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &ab * c;
                    }
                }
            }
        }
        AlgebraElement { coeffs: out }
    }

    pub fn power(&self, a: &AlgebraElement, n: u32) -> Result<AlgebraElement> {
        self.conform(a)?;
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul_unchecked(&acc, a);
        }
        Ok(acc)
    }

    /// Point-class coefficient of `a`.
    pub fn integrate(&self, a: &AlgebraElement) -> Result<Rational> {
        self.conform(a)?;
        let p = self.point.ok_or_else(|| {
            Error::Unsupported(format!("algebra `{}` declares no point class", self.name))
        })?;
        Ok(a.coeffs[p].clone())
    }

    /// Coefficient of the unit class.
    pub fn unit_coefficient(&self, a: &AlgebraElement) -> Rational {
        a.coeffs[self.unit].clone()
    }

    /// True when `a` is a rational multiple of the unit.
    pub fn is_scalar(&self, a: &AlgebraElement) -> bool {
        a.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i == self.unit || c.is_zero())
    }

    /// Smallest `n` with `a^n = 0`, if it exists within `top_degree + 1` steps.
    pub fn nilpotency_index(&self, a: &AlgebraElement) -> Option<u32> {
        // acc = a^n
        let mut acc = a.clone();
        for n in 1..=self.top_degree() + 1 {
            if acc.is_zero() {
                return Some(n);
            }
            acc = self.mul_unchecked(&acc, a);
        }
        None
    }

    pub fn is_nilpotent(&self, a: &AlgebraElement) -> bool {
        self.nilpotency_index(a).is_some()
    }

    /// Exhaustive check of commutativity, associativity, unit, degree
    /// additivity and nilpotency of positive-degree basis classes.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let invalid = |invariant: &'static str, detail: String| Error::InvalidAlgebra {
            algebra: self.name.clone(),
            invariant,
            detail,
        };
        if self.degrees[self.unit] != 0 {
            return Err(invalid("unit has degree 0", String::new()));
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let c = &self.table[i][j][k];
                    if *c != self.table[j][i][k] {
                        return Err(invalid("commutativity", format!("e{i}*e{j} != e{j}*e{i}")));
                    }
                    if !c.is_zero() && self.degrees[k] != self.degrees[i] + self.degrees[j] {
                        return Err(invalid(
                            "degree additivity",
                            format!(
                                "{} * {} has a {} component",
                                self.labels[i], self.labels[j], self.labels[k]
                            ),
                        ));
                    }
                }
            }
        }
        for i in 0..dim {
            let e = self.basis(i);
            if self.mul_unchecked(&self.one(), &e) != e {
                return Err(invalid("unit acts as identity", self.labels[i].clone()));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let ij = self.mul_unchecked(&self.basis(i), &self.basis(j));
                for k in 0..dim {
                    let left = self.mul_unchecked(&ij, &self.basis(k));
                    let jk = self.mul_unchecked(&self.basis(j), &self.basis(k));
                    let right = self.mul_unchecked(&self.basis(i), &jk);
                    if left != right {
                        return Err(invalid(
                            "associativity",
                            format!(
                                "({} {}) {}",
                                self.labels[i], self.labels[j], self.labels[k]
                            ),
                        ));
                    }
                }
            }
        }
        let bound = self.top_degree() + 1;
        for i in 0..dim {
            if self.degrees[i] == 0 {
                continue;
            }
            match self.nilpotency_index(&self.basis(i)) {
                Some(n) if n <= bound => {}
                _ => return Err(invalid("nilpotency", self.labels[i].clone())),
            }
        }
        Ok(())
    }

    /// Solves `factor * x = target`; returns one particular solution.
    pub fn divide(&self, target: &AlgebraElement, factor: &AlgebraElement) -> Option<AlgebraElement> {
        let dim = self.dim();
        // column j of the matrix is factor * e_j
        let columns: Vec<AlgebraElement> =
            (0..dim).map(|j| self.mul_unchecked(factor, &self.basis(j))).collect();
        let rows: Vec<Vec<Rational>> = (0..dim)
            .map(|k| columns.iter().map(|c| c.coeffs[k].clone()).collect())
            .collect();
        solve_linear(rows, target.coeffs.clone()).map(|coeffs| AlgebraElement { coeffs })
    }

    /// Matrix of the pairing `(e_i, e_j) -> integrate(e_i e_j)`.
    pub fn pairing_matrix(&self) -> Result<Vec<Vec<Rational>>> {
        let dim = self.dim();
        let mut m = vec![vec![Rational::zero(); dim]; dim];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.integrate(&self.mul_unchecked(&self.basis(i), &self.basis(j)))?;
            }
        }
        Ok(m)
    }

    pub fn display(&self, a: &AlgebraElement) -> String {
        let parts: Vec<String> = a
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if c.is_one() {
                    self.labels[i].clone()
                } else {
                    format!("{}*{}", format_rational(c), self.labels[i])
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for GradedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<{}>", self.name, self.labels.join(", "))
    }
}

/// Gaussian elimination over Q. Returns a particular solution (free
/// variables set to zero) or `None` when the system is inconsistent.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_linear(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n_cols {
        let Some(p) = (r..n_rows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..n_rows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..n_cols {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
                let d = &f * &rhs[r];
                rhs[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
        if r == n_rows {
            break;
        }
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n_cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}

/// Linear map from an ambient algebra to a divisor algebra, e.g. pullback
/// along the inclusion of the divisor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictionMap {
    /// `matrix[t][s]`: coefficient of target class `t` in the image of source class `s`.
    #[serde(skip)]
    pub matrix: Vec<Vec<Rational>>,
    pub source_dim: usize,
    pub target_dim: usize,
}

impl RestrictionMap {
    /// Builds the map from the images of the source basis classes.
    pub fn from_images(images: Vec<AlgebraElement>, target_dim: usize) -> Result<Self> {
        let source_dim = images.len();
        let mut matrix = vec![vec![Rational::zero(); source_dim]; target_dim];
        for (s, img) in images.iter().enumerate() {
            if img.dim() != target_dim {
                return Err(Error::Conformance {
                    expected: target_dim,
                    found: img.dim(),
                });
            }
            for (t, c) in img.coeffs.iter().enumerate() {
                matrix[t][s] = c.clone();
            }
        }
        Ok(Self {
            matrix,
            source_dim,
            target_dim,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_images((0..dim).map(|i| AlgebraElement::basis(dim, i)).collect(), dim)
            .expect("identity map is well formed")
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.dim() != self.source_dim {
            return Err(Error::Conformance {
                expected: self.source_dim,
                found: a.dim(),
            });
        }
        let coeffs = self
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&a.coeffs)
                    .fold(Rational::zero(), |acc, (m, x)| acc + m * x)
            })
            .collect();
        Ok(AlgebraElement { coeffs })
    }

    /// Unit preservation and the homomorphism property on all basis pairs.
    pub fn validate(&self, source: &GradedAlgebra, target: &GradedAlgebra) -> Result<()> {
        let invalid = |invariant: &'static str, detail: String| Error::InvalidAlgebra {
            algebra: format!("{} -> {}", source.name(), target.name()),
            invariant,
            detail,
        };
        if self.source_dim != source.dim() || self.target_dim != target.dim() {
            return Err(invalid("restriction dimensions", String::new()));
        }
        if self.apply(&source.one())? != target.one() {
            return Err(invalid("unit maps to unit", String::new()));
        }
        for i in 0..source.dim() {
            for j in i..source.dim() {
                let (a, b) = (source.basis(i), source.basis(j));
                let lhs = self.apply(&source.mul_unchecked(&a, &b))?;
                let rhs = target.mul_unchecked(&self.apply(&a)?, &self.apply(&b)?);
                if lhs != rhs {
                    return Err(invalid(
                        "ring homomorphism",
                        format!("{} * {}", source.labels()[i], source.labels()[j]),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Gysin pushforward of a divisor class `delta`: the ambient class `x`
    /// with `integrate(x * a) = integrate_D(delta * r(a))` for every `a`.
    pub fn pushforward(
        &self,
        delta: &AlgebraElement,
        source: &GradedAlgebra,
        target: &GradedAlgebra,
    ) -> Result<AlgebraElement> {
        let pairing = source.pairing_matrix()?;
        let mut rhs = Vec::with_capacity(source.dim());
        for j in 0..source.dim() {
            let r = self.apply(&source.basis(j))?;
            rhs.push(target.integrate(&target.multiply(delta, &r)?)?);
        }
        solve_linear(pairing, rhs)
            .map(|coeffs| AlgebraElement { coeffs })
            .ok_or_else(|| {
                Error::Unsupported("pushforward: pairing data is inconsistent".into())
            })
    }
}

/// `P^n` with hyperplane class `H`: basis `1, H, ..., H^n`.
pub fn projective_space(n: u32) -> GradedAlgebra {
    let labels: Vec<String> = (0..=n)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "H".to_string(),
            _ => format!("H{k}"),
        })
        .collect();
    let mut products = Vec::new();
    for i in 1..=n as usize {
        for j in i..=n as usize {
            if i + j <= n as usize {
                products.push((i, j, i + j, Rational::one()));
            }
        }
    }
    GradedAlgebra::new(
        format!("P{n}"),
        labels,
        (0..=n).collect(),
        0,
        Some(n as usize),
        &products,
    )
    .expect("projective space algebra is valid")
}
