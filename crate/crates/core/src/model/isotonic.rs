//! Weighted pool-adjacent-violators for sequences indexed by position.

/// Required ordering of block means along the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A run of consecutive positions sharing one fitted value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pool {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub weight: f64,
    pub weighted_sum: f64,
}

impl Pool {
    pub fn mean(&self) -> f64 {
        self.weighted_sum / self.weight
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Weighted isotonic regression of `values` by pooling adjacent violators.
///
/// Two neighbouring pools merge whenever the later mean fails to move in the
/// required direction by more than `tie_tol`, so equal-mean neighbours are
/// always merged. Weights must be positive and the slices equally long.
pub fn pool_adjacent_violators(
    values: &[f64],
    weights: &[f64],
    direction: Direction,
    tie_tol: f64,
) -> Vec<Pool> {
    assert_eq!(values.len(), weights.len(), "values and weights differ in length");
    let violates = |earlier: f64, later: f64| match direction {
        Direction::Increasing => later <= earlier + tie_tol,
        Direction::Decreasing => later >= earlier - tie_tol,
    };

    let mut pools: Vec<Pool> = Vec::with_capacity(values.len());
    for (i, (&y, &w)) in values.iter().zip(weights).enumerate() {
        pools.push(Pool {
            start: i,
            end: i,
            weight: w,
            weighted_sum: w * y,
        });
        while pools.len() > 1 {
            let n = pools.len();
            if !violates(pools[n - 2].mean(), pools[n - 1].mean()) {
                break;
            }
            let last = pools.pop().expect("len > 1");
            let prev = pools.last_mut().expect("len > 1");
            prev.end = last.end;
            prev.weight += last.weight;
            prev.weighted_sum += last.weighted_sum;
        }
    }
    pools
}

/// Expands pools into one fitted value per position.
pub fn fitted(pools: &[Pool]) -> Vec<f64> {
    pools
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.mean(), p.len()))
        .collect()
}
