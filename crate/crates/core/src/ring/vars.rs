use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::RingError;

/// Ordered roster of named variables with quasi-homogeneous weights.
///
/// The order of declaration is the order used by the graded
/// lexicographic monomial ordering.
#[derive(Clone, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    weights: Vec<i64>,
    index: HashMap<String, usize>,
}

impl VarTable {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = (S, i64)>) -> Result<Arc<Self>, RingError> {
        let mut names = Vec::new();
        let mut weights = Vec::new();
        let mut index = HashMap::new();
        for (name, weight) in vars {
            let name = name.into();
            if weight < 0 {
                return Err(RingError::NegativeWeight(name));
            }
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(RingError::DuplicateVariable(name));
            }
            names.push(name);
            weights.push(weight);
        }
        Ok(Arc::new(VarTable { names, weights, index }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize, RingError> {
        self.lookup(name)
            .ok_or_else(|| RingError::UnknownVariable(name.to_string()))
    }
}

impl fmt::Debug for VarTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.names.iter().zip(&self.weights))
            .finish()
    }
}

pub(crate) fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
