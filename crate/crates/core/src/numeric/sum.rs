/// Pairwise (tree) summation. The reduction tree depends only on the length
/// of the input, so results are reproducible regardless of how the terms were
/// produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..len`.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= 8 {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, len, &f)
}
