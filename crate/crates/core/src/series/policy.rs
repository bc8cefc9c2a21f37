use serde::Serialize;

use crate::error::{Error, Result};

/// Exponent vector of a Novikov monomial.
pub type Exponent = Vec<u32>;

/// Weighted-degree truncation for Novikov variables plus the z-window
/// used when reporting z-expansions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationPolicy {
    pub weights: Vec<u32>,
    pub max_weight: u32,
    pub z_min: i64,
    pub z_max: i64,
}

impl TruncationPolicy {
    pub fn new(weights: Vec<u32>, max_weight: u32, z_min: i64, z_max: i64) -> Result<Self> {
        if weights.contains(&0) {
            return Err(Error::Config("truncation weights must be positive".into()));
        }
        if max_weight == 0 {
            return Err(Error::Config("truncation order must be positive".into()));
        }
        if !(z_min <= -1 && z_max >= 1) {
            return Err(Error::Config(format!(
                "z-window [{z_min}, {z_max}] must contain [-1, 1]"
            )));
        }
        Ok(Self {
            weights,
            max_weight,
            z_min,
            z_max,
        })
    }

    /// Unit weights, order `n`, window `[-(n+3), 1]`.
    pub fn uniform(nvars: usize, n: u32) -> Self {
        Self::with_weights(vec![1; nvars], n)
    }

    pub fn with_weights(weights: Vec<u32>, n: u32) -> Self {
        Self::new(weights, n, -(n as i64 + 3), 1).expect("default policy is valid")
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, e: &[u32]) -> u64 {
        e.iter()
            .zip(&self.weights)
            .map(|(&a, &w)| a as u64 * w as u64)
            .sum()
    }

    pub fn admits(&self, e: &[u32]) -> bool {
        self.weight(e) <= self.max_weight as u64
    }

    pub fn min_weight(&self) -> u32 {
        self.weights.iter().copied().min().unwrap_or(1)
    }

    /// Same weights, new order; the window follows the default rule.
    pub fn with_order(&self, n: u32) -> Self {
        Self::new(self.weights.clone(), n, self.z_min.min(-(n as i64 + 3)), self.z_max)
            .expect("order change keeps a valid policy")
    }

    /// Appends a variable of the given weight.
    pub fn extended(&self, weight: u32) -> Self {
        let mut weights = self.weights.clone();
        weights.push(weight);
        Self {
            weights,
            ..self.clone()
        }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.weights != other.weights || self.max_weight != other.max_weight {
            return Err(Error::Config(format!(
                "incompatible truncation policies (weights {:?} order {} vs weights {:?} order {})",
                self.weights, self.max_weight, other.weights, other.max_weight
            )));
        }
        Ok(())
    }

    /// All admissible exponents, in lexicographic order.
    pub fn exponents(&self) -> Vec<Exponent> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.nvars()];
        self.enumerate(0, 0, &mut cur, &mut out);
        out.sort();
        out
    }

    fn enumerate(&self, var: usize, used: u64, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if var == self.nvars() {
            out.push(cur.clone());
            return;
        }
        let w = self.weights[var] as u64;
        let mut a = 0u32;
        while used + a as u64 * w <= self.max_weight as u64 {
            cur[var] = a;
            self.enumerate(var + 1, used + a as u64 * w, cur, out);
            a += 1;
        }
        cur[var] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_windows_and_weights() {
        assert!(TruncationPolicy::new(vec![1, 0], 4, -5, 1).is_err());
        assert!(TruncationPolicy::new(vec![1], 4, 0, 1).is_err());
        assert!(TruncationPolicy::new(vec![1], 4, -2, 0).is_err());
    }

    #[test]
    fn enumerates_weighted_exponents() {
        let p = TruncationPolicy::with_weights(vec![1, 2], 3);
        let ex = p.exponents();
        assert_eq!(ex.len(), 6); // (0,0) (1,0) (2,0) (3,0) (0,1) (1,1)
        assert!(ex.iter().all(|e| p.admits(e)));
        assert_eq!(p.min_weight(), 1);
    }
}
