//! Particular solutions of the driven harmonic oscillator
//! `ÿ + ω²y = B·(t−t₁)^l·e^{imωt}`.
//!
//! The solution is `P(t−t₁)·e^{imωt}` with `P` a polynomial obeying
//! `P'' + 2imωP' + (1−m²)ω²P = B·τ^l`. Off resonance (`|m| ≠ 1`) `P` has
//! degree `l` and is found by back-substitution from `p_l`. On resonance the
//! constant term drops out of the equation, `P` has degree `l+1`, and `p₀` is
//! fixed to zero so the prime-frequency part vanishes at `t = t₁`.
//!
//! Every coefficient `p_k` scales as `ω^{−(2+l−k)}`, so the recursion runs in
//! exact rationals with `ω = 1` and the powers are attached afterwards.

use crate::rational::RationalComplex;
use crate::series::{FourierSecularSeries, SeriesTerm};

/// Coefficients `ρ_k` with `p_k = ρ_k · B · ω^{−(2+l−k)}`, index `k = 0..=deg`.
pub(crate) fn particular_profile(m: i32, l: u32) -> Vec<RationalComplex> {
    let l = l as usize;
    let mi = RationalComplex::imag_ratio(m as i64, 1);
    let two_im = &RationalComplex::from_int(2) * &mi;
    if m.abs() == 1 {
        // (k+2)(k+1)p_{k+2} + 2imω(k+1)p_{k+1} = B·δ_{kl},  k = 0..=l
        let mut p = vec![RationalComplex::zero(); l + 2];
        for k in (0..=l).rev() {
            let mut rhs = if k == l { RationalComplex::one() } else { RationalComplex::zero() };
            if k + 2 <= l + 1 {
                let c = RationalComplex::from_int(((k + 2) * (k + 1)) as i64);
                rhs = &rhs - &(&c * &p[k + 2]);
            }
            let denom = &two_im * &RationalComplex::from_int((k + 1) as i64);
            p[k + 1] = &rhs / &denom;
        }
        // p[0] stays zero: the homogeneous solution absorbs it.
        p
    } else {
        // (k+2)(k+1)p_{k+2} + 2imω(k+1)p_{k+1} + (1−m²)ω²p_k = B·δ_{kl}
        let diag = RationalComplex::from_int(1 - (m as i64) * (m as i64));
        let mut p = vec![RationalComplex::zero(); l + 1];
        for k in (0..=l).rev() {
            let mut rhs = if k == l { RationalComplex::one() } else { RationalComplex::zero() };
            if k < l {
                let c = &two_im * &RationalComplex::from_int((k + 1) as i64);
                rhs = &rhs - &(&c * &p[k + 1]);
            }
            if k + 2 <= l {
                let c = RationalComplex::from_int(((k + 2) * (k + 1)) as i64);
                rhs = &rhs - &(&c * &p[k + 2]);
            }
            p[k] = &rhs / &diag;
        }
        p
    }
}

/// Particular solution for a single inhomogeneity monomial `rhs_term`.
pub fn solve_particular(rhs_term: &SeriesTerm) -> FourierSecularSeries {
    let key = &rhs_term.key;
    let profile = particular_profile(key.harmonic, key.t_pow);
    let l = key.t_pow as i32;
    let mut out = FourierSecularSeries::new();
    for (k, rho) in profile.iter().enumerate() {
        if rho.is_zero() {
            continue;
        }
        let mut term_key = key.clone().with_t_pow(k as u32);
        term_key.omega_pow = key.omega_pow - (2 + l - k as i32);
        out.add_term(rho * &rhs_term.coeff, term_key);
    }
    out
}

/// Particular solution for a whole inhomogeneity, term by term.
pub fn solve_oscillator(rhs: &FourierSecularSeries) -> FourierSecularSeries {
    let mut out = FourierSecularSeries::new();
    for term in rhs.terms() {
        out = out.add(&solve_particular(&term));
    }
    out
}

/// `ÿ + ω²y` of a series; zero residual against the drive certifies a solve.
pub fn oscillator_operator(y: &FourierSecularSeries) -> FourierSecularSeries {
    y.ddt().ddt().add(&y.times_omega_pow(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TermKey;
    use proptest::prelude::*;

    #[test]
    fn third_harmonic_of_vdp_first_order() {
        // B = −iωA³ at m = 3  →  (iA³/8ω) e^{3iωt}
        let rhs = SeriesTerm::new(RationalComplex::imag_ratio(-1, 1), TermKey::amplitude(3, 3, 0).with_omega_pow(1));
        let want = FourierSecularSeries::monomial(
            RationalComplex::imag_ratio(1, 8),
            TermKey::amplitude(3, 3, 0).with_omega_pow(-1),
        );
        assert_eq!(solve_particular(&rhs), want);
    }

    #[test]
    fn resonant_drive_gives_secular_term() {
        // B = iωA(1−|A|²) at m = 1  →  ½(t−t₁)A(1−|A|²)e^{iωt}
        let rhs = FourierSecularSeries::from_terms([
            SeriesTerm::new(RationalComplex::i(), TermKey::amplitude(1, 1, 0).with_omega_pow(1)),
            SeriesTerm::new(RationalComplex::imag_ratio(-1, 1), TermKey::amplitude(1, 2, 1).with_omega_pow(1)),
        ]);
        let want = FourierSecularSeries::from_terms([
            SeriesTerm::new(RationalComplex::ratio(1, 2), TermKey::amplitude(1, 1, 0).with_t_pow(1)),
            SeriesTerm::new(RationalComplex::ratio(-1, 2), TermKey::amplitude(1, 2, 1).with_t_pow(1)),
        ]);
        assert_eq!(solve_oscillator(&rhs), want);
    }

    #[test]
    fn constant_drive_is_static_displacement() {
        let rhs = SeriesTerm::new(RationalComplex::ratio(3, 5), TermKey::amplitude(0, 1, 1));
        let want = FourierSecularSeries::monomial(
            RationalComplex::ratio(3, 5),
            TermKey::amplitude(0, 1, 1).with_omega_pow(-2),
        );
        assert_eq!(solve_particular(&rhs), want);
    }

    #[test]
    fn empty_drive_has_empty_solution() {
        assert!(solve_oscillator(&FourierSecularSeries::new()).is_empty());
    }

    #[test]
    fn off_resonance_second_coefficient() {
        // p_{l−1} = −2iml B / ((1−m²)² ω³)
        for (m, l) in [(0, 1), (2, 3), (-3, 2), (5, 4)] {
            let prof = particular_profile(m, l);
            let d = (1 - m * m) as i64;
            let want = RationalComplex::imag_ratio(-2 * m as i64 * l as i64, d * d);
            assert_eq!(prof[l as usize - 1], want, "m={m} l={l}");
        }
    }

    fn arb_term() -> impl Strategy<Value = SeriesTerm> {
        (-7i32..=7, 0u32..=4, -40i64..=40, -40i64..=40, 1i64..=12, 0u32..=3, 0u32..=3, -3i32..=3)
            .prop_filter("nonzero", |(_, _, a, b, ..)| *a != 0 || *b != 0)
            .prop_map(|(m, l, re, im, den, p, q, w)| {
                let c = &RationalComplex::ratio(re, den) + &RationalComplex::imag_ratio(im, den);
                SeriesTerm::new(c, TermKey::amplitude(m, p, q).with_t_pow(l).with_omega_pow(w))
            })
    }

    proptest! {
        #[test]
        fn solution_satisfies_oscillator_identity(term in arb_term()) {
            let y = solve_particular(&term);
            let residual = oscillator_operator(&y).sub(&FourierSecularSeries::from_terms([term.clone()]));
            prop_assert!(residual.is_empty());
            let deg = y.max_t_pow().unwrap();
            if term.key.harmonic.abs() == 1 {
                prop_assert_eq!(deg, term.key.t_pow + 1);
                prop_assert!(y.iter().all(|(k, _)| k.t_pow > 0));
            } else {
                prop_assert_eq!(deg, term.key.t_pow);
            }
        }
    }
}
