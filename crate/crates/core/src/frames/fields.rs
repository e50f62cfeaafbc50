use std::collections::BTreeMap;
use std::fmt;

use crate::Poly;

/// First-order differential operator `sum_k a_k d/dx_k` on Laurent
/// polynomials, keyed by variable index.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    components: BTreeMap<usize, Poly>,
}

impl VectorField {
    pub fn zero() -> Self {
        VectorField { components: BTreeMap::new() }
    }

    pub fn from_components(components: impl IntoIterator<Item = (usize, Poly)>) -> Self {
        let mut out = Self::zero();
        for (k, v) in components {
            out.add_component(k, v);
        }
        out
    }

    fn add_component(&mut self, k: usize, v: Poly) {
        let sum = match self.components.remove(&k) {
            Some(old) => &old + &v,
            None => v,
        };
        if !sum.is_zero() {
            self.components.insert(k, sum);
        }
    }

    pub fn components(&self) -> &BTreeMap<usize, Poly> {
        &self.components
    }

    /// Coefficient of `d/dx_k`, if nonzero.
    pub fn component(&self, k: usize) -> Option<&Poly> {
        self.components.get(&k)
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        let mut acc = Poly::zero(p.table());
        for (&k, a) in &self.components {
            let d = p.derivative(k);
            if !d.is_zero() {
                acc = &acc + &(a * &d);
            }
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, v) in &other.components {
            out.add_component(k, v.clone());
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> Self {
        Self::from_components(self.components.iter().map(|(&k, v)| (k, v * c)))
    }

    pub fn scale_int(&self, n: i64) -> Self {
        Self::from_components(self.components.iter().map(|(&k, v)| (k, v.scale_int(n))))
    }

    /// Commutator `[self, other]`.
    pub fn bracket(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&k, b) in &other.components {
            out.add_component(k, self.apply(b));
        }
        for (&k, a) in &self.components {
            out.add_component(k, -other.apply(a));
        }
        out
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(&k, v)| format!("({v}) d/d{}", v.table().name(k)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
