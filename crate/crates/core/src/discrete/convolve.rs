use crate::chaos::{ChaosExpansion, TruncationLoss};
use crate::error::Result;

use super::signal::{same_policy, DiscreteSignal};

/// Output of a Wick convolution with the number of products dropped by the
/// truncation policy.
#[derive(Clone, Debug, PartialEq)]
pub struct Convolution {
    pub output: DiscreteSignal,
    pub loss: TruncationLoss,
}

/// `y_n = Σ_m h_{n−m} ◊ u_m` over the finite supports.
///
/// The output support is contained in the Minkowski sum of the supports.
pub fn wick_convolve(h: &DiscreteSignal, u: &DiscreteSignal) -> Result<Convolution> {
    same_policy(h.policy(), u.policy())?;
    let mut output = DiscreteSignal::new(h.policy());
    let mut loss = TruncationLoss::default();
    for (nh, hn) in h.iter() {
        for (m, um) in u.iter() {
            let (prod, l) = hn.wick(um);
            loss = loss.merge(l);
            output.accumulate(nh + m, prod);
        }
    }
    Ok(Convolution { output, loss })
}

/// One-sided form `y_n = Σ_{m=0}^{n} h_{n−m} ◊ u_m` for `n ≥ 0`.
pub fn wick_convolve_causal(h: &DiscreteSignal, u: &DiscreteSignal) -> Result<Convolution> {
    wick_convolve(&h.causal_part(), &u.causal_part())
}

/// Coefficientwise double sum `y_α(n) = Σ_m Σ_{β≤α} h_{α−β}(n−m) u_β(m)`.
///
/// Evaluated term by term over the policy basis without calling the Wick
/// product; used as an independent check of [`wick_convolve`].
pub fn double_convolution_oracle(h: &DiscreteSignal, u: &DiscreteSignal) -> Result<DiscreteSignal> {
    same_policy(h.policy(), u.policy())?;
    let policy = h.policy();
    let mut output = DiscreteSignal::new(policy);
    let (Some((hl, hh)), Some((ul, uh))) = (h.support(), u.support()) else {
        return Ok(output);
    };
    let basis = policy.basis();
    for n in (hl + ul)..=(hh + uh) {
        let mut terms = Vec::new();
        for alpha in &basis {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for (m, um) in u.iter() {
                let Some(hnm) = h.get(n - m) else { continue };
                for beta in alpha.sub_indices() {
                    let gamma = alpha.checked_sub(&beta).expect("β ≤ α");
                    acc += hnm.coeff(&gamma) * um.coeff(&beta);
                }
            }
            terms.push((alpha.clone(), acc));
        }
        output.accumulate(n, ChaosExpansion::from_terms(policy, terms)?);
    }
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{MultiIndex, TruncationPolicy};

    fn p() -> TruncationPolicy {
        TruncationPolicy::new(2, 3).unwrap()
    }

    #[test]
    fn unit_impulse_is_identity() {
        let h = DiscreteSignal::deterministic(p(), &[(0, 1.0)]);
        let f = ChaosExpansion::monomial(p(), MultiIndex::unit(1), 2.0).unwrap();
        let u = DiscreteSignal::from_samples(p(), [(-1, f.clone()), (4, f)]).unwrap();
        let y = wick_convolve(&h, &u).unwrap();
        assert_eq!(y.output, u);
        assert!(y.loss.is_lossless());
    }

    #[test]
    fn classical_convolution() {
        let h = DiscreteSignal::deterministic(p(), &[(0, 1.0), (1, 2.0)]);
        let u = DiscreteSignal::deterministic(p(), &[(0, 3.0), (1, 4.0), (2, 5.0)]);
        let y = wick_convolve(&h, &u).unwrap().output;
        let expect = DiscreteSignal::deterministic(p(), &[(0, 3.0), (1, 10.0), (2, 13.0), (3, 10.0)]);
        assert_eq!(y, expect);
        assert_eq!(double_convolution_oracle(&h, &u).unwrap(), expect);
    }

    #[test]
    fn single_term_oracle() {
        let b0 = MultiIndex::unit(2);
        let h = DiscreteSignal::impulse(0, ChaosExpansion::monomial(p(), b0.clone(), 1.0).unwrap());
        let f = ChaosExpansion::from_terms(
            p(),
            [(MultiIndex::zero(), 1.0), (MultiIndex::unit(1), 2.0), (MultiIndex::unit(2), 3.0)],
        )
        .unwrap();
        let u = DiscreteSignal::impulse(3, f.clone());
        let y = double_convolution_oracle(&h, &u).unwrap();
        let y3 = y.sample(3);
        for alpha in p().basis() {
            let expect = alpha.checked_sub(&b0).map_or(0.0.into(), |g| f.coeff(&g));
            assert_eq!(y3.coeff(&alpha), expect, "{alpha}");
        }
        assert_eq!(wick_convolve(&h, &u).unwrap().output, y);
    }

    #[test]
    fn zero_input() {
        let h = DiscreteSignal::deterministic(p(), &[(0, 1.0)]);
        let u = DiscreteSignal::new(p());
        assert!(wick_convolve(&h, &u).unwrap().output.is_empty());
        assert!(double_convolution_oracle(&h, &u).unwrap().is_empty());
    }

    #[test]
    fn causal_variant_drops_negative_times() {
        let h = DiscreteSignal::deterministic(p(), &[(-1, 1.0), (0, 1.0)]);
        let u = DiscreteSignal::deterministic(p(), &[(-2, 1.0), (0, 1.0), (1, 1.0)]);
        let y = wick_convolve_causal(&h, &u).unwrap().output;
        assert_eq!(y, DiscreteSignal::deterministic(p(), &[(0, 1.0), (1, 1.0)]));
    }

    #[test]
    fn loss_is_counted() {
        let small = TruncationPolicy::new(1, 1).unwrap();
        let f = ChaosExpansion::monomial(small, MultiIndex::unit(1), 1.0).unwrap();
        let h = DiscreteSignal::impulse(0, f.clone());
        let u = DiscreteSignal::impulse(0, f);
        let y = wick_convolve(&h, &u).unwrap();
        assert!(y.output.is_empty());
        assert_eq!(y.loss.dropped_terms, 1);
    }
}
