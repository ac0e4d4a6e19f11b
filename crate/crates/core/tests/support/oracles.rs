//! Brute-force reference implementations. These deliberately take different
//! routes than the library: pairwise-comparison ranks and the single-pass
//! textbook correlation formula, so agreement is evidence rather than
//! tautology.

/// Midranks by pairwise counting: rank_i = 1 + #{j: v_j < v_i} + ties/2.
pub fn ranks_bruteforce(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let less = values.iter().filter(|&&w| w < v).count();
            let ties = values
                .iter()
                .enumerate()
                .filter(|&(j, &w)| j != i && w == v)
                .count();
            1.0 + less as f64 + ties as f64 / 2.0
        })
        .collect()
}

/// Single-pass product-moment formula:
/// r = (n Sxy - Sx Sy) / sqrt((n Sxx - Sx^2)(n Syy - Sy^2)).
pub fn pearson_direct(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

pub fn spearman_direct(xs: &[f64], ys: &[f64]) -> f64 {
    pearson_direct(&ranks_bruteforce(xs), &ranks_bruteforce(ys))
}

pub fn rmse_direct(xs: &[f64], ys: &[f64]) -> f64 {
    let sq: f64 = xs.iter().zip(ys).map(|(x, y)| (x - y) * (x - y)).sum();
    (sq / xs.len() as f64).sqrt()
}
