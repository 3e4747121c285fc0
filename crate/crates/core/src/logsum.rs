//! Sums of exponentials with max-exponent factoring.

/// `log(sum_i e^{t_i})`, summed in the given order; negative infinity for an
/// empty input or when every term is negative infinity.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let t_max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if t_max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if t_max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = terms.iter().map(|&t| (t - t_max).exp()).sum();
    t_max + s.ln()
}

/// `log(sum_i c_i e^{t_i})` for nonnegative coefficients.
pub fn log_weighted_sum_exp(terms: &[(f64, f64)]) -> f64 {
    let t_max = terms
        .iter()
        .filter(|(c, _)| *c > 0.0)
        .map(|&(_, t)| t)
        .fold(f64::NEG_INFINITY, f64::max);
    if t_max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = terms
        .iter()
        .filter(|(c, _)| *c > 0.0)
        .map(|&(c, t)| c * (t - t_max).exp())
        .sum();
    t_max + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_overflow() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let w = log_weighted_sum_exp(&[(2.0, -800.0), (0.0, 5.0)]);
        assert!((w - (-800.0 + 2f64.ln())).abs() < 1e-12);
    }
}
