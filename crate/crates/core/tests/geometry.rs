mod common;

use rgwb_core::geometry::{Ellipse, Geometry, Mode};
use rgwb_core::golden;
use rgwb_core::polar::{polar_form, ParamValues};

use common::rel;

fn vdp_geometry_sys() -> rgwb_core::polar::PolarRGSystem {
    polar_form(&golden::vdp().flow).unwrap()
}

#[test]
fn vdp_connection_and_curvature() {
    let sys = vdp_geometry_sys();
    let g = Geometry::new(&sys, ["mu".into(), "omega".into()], ParamValues::new());
    for (mu, w) in [(0.1, 2.0), (0.05, 1.5), (0.2, 3.0)] {
        let c = g.connection([mu, w]).unwrap();
        assert!((c.r - 2.0).abs() < 1e-12);
        assert!(c.a[0].abs() < 1e-12, "a_mu = {}", c.a[0]);
        assert!(rel(c.a[1], mu / (8.0 * w * w)) < 1e-10, "a_omega = {}", c.a[1]);
        let k = g.curvature([mu, w], 1e-4).unwrap();
        assert!(rel(k.chi, common::vdp_chi(w)) < 1e-6, "{k:?}");
    }
}

#[test]
fn vdp_loop_integral_matches_quadrature() {
    let sys = vdp_geometry_sys();
    let g = Geometry::new(&sys, ["mu".into(), "omega".into()], ParamValues::new());
    let e = Ellipse { center: [0.09, 2.0], radii: [0.01, 0.2], orientation: 1.0 };
    let want = common::vdp_loop_integral(e.center, e.radii);
    assert!(rel(g.loop_integral(&e).unwrap(), want) < 1e-6);
    let pred = g.predicted_loop_phase(&e).unwrap();
    assert!(rel(pred, common::vdp_chi(2.0) * common::ellipse_area(e.radii)) < 1e-6);
    let rev = Ellipse { orientation: -1.0, ..e };
    assert!(rel(g.loop_integral(&rev).unwrap(), -want) < 1e-9);
}

#[test]
fn vdpd_singular_curvature() {
    let sys = polar_form(&golden::vdpd().flow).unwrap();
    let base: ParamValues = [("omega".to_string(), 1.0)].into();
    let g = Geometry::new(&sys, ["mu".into(), "beta".into()], base).with_mode(Mode::SingularOnly);
    for (mu, beta) in [(0.01, 0.005), (0.02, 0.02)] {
        let c = g.connection([mu, beta]).unwrap();
        assert!(c.a[0].abs() < 1e-12);
        assert!(rel(c.a[1], -1.5 * beta / mu) < 1e-6, "a_beta = {}", c.a[1]);
        let k = g.curvature([mu, beta], 1e-4).unwrap();
        assert!(rel(k.chi, common::vdpd_chi(mu, beta, 1.0)) < 1e-4, "{k:?}");
    }
}

#[test]
fn flat_when_no_rate_terms() {
    // Without time-dependent parameters there is no connection at all.
    let m = rgwb_core::model::ModelSpec::parse("omega = 1\nparam mu = 0.1\nparam beta = 0.01\nnonlinearity = mu*(1 - y^2)*ydot - beta*y^3\norders = mu, beta\n").unwrap();
    let sys = polar_form(&rgwb_core::derivation::derive(&m).unwrap().flow).unwrap();
    let g = Geometry::new(&sys, ["mu".into(), "beta".into()], [("omega".to_string(), 1.0)].into());
    let k = g.curvature([0.1, 0.01], 1e-4).unwrap();
    assert!(k.a.iter().all(|a| a.abs() < 1e-14));
    assert!(k.chi.abs() < 1e-9);
}
