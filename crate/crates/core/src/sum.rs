//! Order-fixed summation helpers.

/// Pairwise (tree) summation. The split points depend only on the length, so
/// the result is bit-reproducible for a given input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
