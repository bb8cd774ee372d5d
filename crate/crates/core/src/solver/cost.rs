use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Cost per priority level. Levels absent from the map count as 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CostVector(pub BTreeMap<i64, i64>);

impl CostVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, priority: i64) -> i64 {
        self.0.get(&priority).copied().unwrap_or(0)
    }

    pub fn add(&mut self, priority: i64, weight: i64) {
        let v = self.0.entry(priority).or_insert(0);
        *v = v.saturating_add(weight);
    }

    /// Values from the highest priority down.
    pub fn values_desc(&self) -> Vec<i64> {
        self.0.values().rev().copied().collect()
    }
}

impl<const N: usize> From<[(i64, i64); N]> for CostVector {
    fn from(v: [(i64, i64); N]) -> Self {
        CostVector(v.into_iter().collect())
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().rev().map(|(p, v)| format!("{v}@{p}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Lexicographic comparison, highest priority first.
pub fn compare_costs(a: &CostVector, b: &CostVector) -> Ordering {
    let levels: std::collections::BTreeSet<i64> = a.0.keys().chain(b.0.keys()).copied().collect();
    for p in levels.into_iter().rev() {
        match a.get(p).cmp(&b.get(p)) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    Ordering::Equal
}

impl PartialOrd for CostVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(compare_costs(self, other))
    }
}
