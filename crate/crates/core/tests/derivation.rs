use rgwb_core::derivation::derive;
use rgwb_core::flow::FlowKey;
use rgwb_core::golden;
use rgwb_core::model::ModelSpec;
use rgwb_core::monomial::{Monomial, Rate};
use rgwb_core::rational::RationalComplex;
use rgwb_core::series::TermKey;

fn re(n: i64, d: i64) -> RationalComplex {
    RationalComplex::ratio(n, d)
}

fn im(n: i64, d: i64) -> RationalComplex {
    RationalComplex::imag_ratio(n, d)
}

fn flow_coeff(model: &str, key: FlowKey, p: u32, q: u32, w: i32) -> Option<RationalComplex> {
    let d = derive(&ModelSpec::parse(model).unwrap()).unwrap();
    d.flow.entry(&key).and_then(|e| e.get(&(p, q, w)).cloned())
}

#[test]
fn vdp_fifth_harmonic() {
    let d = derive(&ModelSpec::parse(golden::VDP_MODEL).unwrap()).unwrap();
    let key = TermKey::amplitude(5, 5, 0).with_eps(Monomial::pow("mu", 2)).with_omega_pow(-2);
    assert_eq!(d.solution.coeff(&key), Some(&re(-5, 192)));
    assert_eq!(d.solution.coeff(&key.conj()), Some(&re(-5, 192)));
}

#[test]
fn vdp_flow_coefficients() {
    let m = golden::VDP_MODEL;
    let mu = || FlowKey::adiabatic(Monomial::var("mu"));
    let mu2 = || FlowKey::adiabatic(Monomial::pow("mu", 2));
    assert_eq!(flow_coeff(m, mu(), 1, 0, 0), Some(re(1, 2)));
    assert_eq!(flow_coeff(m, mu(), 2, 1, 0), Some(re(-1, 2)));
    assert_eq!(flow_coeff(m, mu2(), 1, 0, -1), Some(im(-1, 8)));
    assert_eq!(flow_coeff(m, mu2(), 2, 1, -1), Some(im(1, 2)));
    assert_eq!(flow_coeff(m, mu2(), 3, 2, -1), Some(im(-7, 16)));
    // ω̇ drives the amplitude as −A/(2ω), which keeps |A|²ω fixed
    assert_eq!(flow_coeff(m, FlowKey::with_rate(Monomial::one(), Rate::Omega), 1, 0, -1), Some(re(-1, 2)));
}

#[test]
fn vdpd_mixed_order_flow() {
    let key = FlowKey::adiabatic(Monomial::from_pairs([("mu", 1), ("beta", 1)]));
    // −(1/4ω²) A|A|²(3 − 2|A|²)
    assert_eq!(flow_coeff(golden::VDPD_MODEL, key.clone(), 2, 1, -2), Some(re(-3, 4)));
    assert_eq!(flow_coeff(golden::VDPD_MODEL, key, 3, 2, -2), Some(re(1, 2)));
    let beta = FlowKey::adiabatic(Monomial::var("beta"));
    assert_eq!(flow_coeff(golden::VDPD_MODEL, beta, 2, 1, -1), Some(im(3, 2)));
}

#[test]
fn built_in_tables_match() {
    for case in golden::all() {
        let d = derive(&case.model).unwrap();
        assert!(golden::diff(&case, &d).is_empty(), "{}", case.name);
    }
}

#[test]
fn pure_duffing_has_no_growth() {
    let d =
        derive(&ModelSpec::parse("omega = 1\nparam beta = 0.1\nnonlinearity = -beta*y^3\norders = beta\n").unwrap())
            .unwrap();
    let key = FlowKey::adiabatic(Monomial::var("beta"));
    let e = d.flow.entry(&key).unwrap();
    assert_eq!(e.len(), 1);
    // frequency shift 3β|A|²/(2ω): purely imaginary
    assert_eq!(e.get(&(2, 1, -1)), Some(&im(3, 2)));
}

#[test]
fn solutions_are_real() {
    for case in golden::all() {
        assert!(derive(&case.model).unwrap().solution.is_conjugation_closed());
    }
}
