use crate::sparse::{cholesky_on_pattern, SymbolicFactor};

/// `-log det S` for `S` given on the symbolic factor's input pattern, or
/// `+inf` when `S` is not positive definite.
pub fn barrier(values: &[f64], symbolic: &SymbolicFactor) -> f64 {
    match cholesky_on_pattern(values, symbolic) {
        Ok(f) => -f.log_det(),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{min_degree_order, symbolic_factor, SparsityPattern};

    #[test]
    fn identity_and_scaled_identity() {
        let pat = SparsityPattern::diagonal(2);
        let sym = symbolic_factor(&pat, &min_degree_order(&pat)).unwrap();
        assert_eq!(barrier(&[1.0, 1.0], &sym), 0.0);
        let e = std::f64::consts::E;
        assert!((barrier(&[1.0 / e, 1.0], &sym) - 1.0).abs() < 1e-15);
        assert_eq!(barrier(&[-1.0, 1.0], &sym), f64::INFINITY);
    }
}
