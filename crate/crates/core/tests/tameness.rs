use std::sync::Arc;

use colotame_core::bivar::{BivarFn, Jet2, JetSource};
use colotame_core::funrep::{Grid, GridConfig, SmoothFn};
use colotame_core::grading::{disk_contains, Grading};
use colotame_core::nemytskii::CompOp;
use colotame_core::sampling::{stream, uniform, Purpose};
use colotame_core::tameness::{
    build_n, build_p, chi_identity_residual, chi_kernel, jet_derivative, x_sequences,
    GeneratorFamily, JetRecursion, MajorantTable, DEFAULT_QUAD_NODES,
};
use colotame_core::Error;
use proptest::prelude::*;

fn grid(degree: usize, n: usize) -> Arc<Grid> {
    Grid::new(GridConfig::with_degree(degree, n).unwrap()).unwrap()
}

fn op(text: &str, g: &Arc<Grid>) -> CompOp {
    CompOp::new(BivarFn::parse(text).unwrap(), g).unwrap()
}

fn poly(g: &Arc<Grid>, coeffs: Vec<f64>) -> SmoothFn {
    SmoothFn::from_coeffs(g, coeffs).unwrap()
}

fn random_coeffs(seed: u64, k: u64, len: usize, amp: f64) -> Vec<f64> {
    let mut rng = stream(seed, Purpose::Aux, k);
    (0..len).map(|_| uniform(&mut rng, -amp, amp)).collect()
}

/// Product of two Chebyshev series on the shifted basis, truncated to `len`.
fn cheb_mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (j, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            let half = 0.5 * x * y;
            if j + k < len {
                out[j + k] += half;
            }
            out[j.abs_diff(k)] += half;
        }
    }
    out
}

fn cheb_exp(a: &[f64], len: usize) -> Vec<f64> {
    let mut sum = vec![0.0; len];
    let mut term = vec![0.0; len];
    sum[0] = 1.0;
    term[0] = 1.0;
    for n in 1..80 {
        term = cheb_mul(&term, a, len)
            .into_iter()
            .map(|c| c / n as f64)
            .collect();
        sum.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
    }
    sum
}

#[test]
fn chi_vanishes_for_affine_phi() {
    let g = grid(32, 4);
    let x = SmoothFn::identity(&g).scaled(0.3);
    let chi = chi_kernel(&op("2*eta + s", &g), &x, DEFAULT_QUAD_NODES).unwrap();
    assert!(chi.is_zero());
    for (s, eta) in [(0.0, -1.0), (0.4, 0.3), (1.0, 1.0)] {
        assert_eq!(chi.value(s, eta).unwrap(), 0.0);
    }
}

#[test]
fn chi_for_exp_matches_closed_form() {
    let g = grid(32, 4);
    let chi = chi_kernel(&op("exp(eta)", &g), &SmoothFn::zero(&g), DEFAULT_QUAD_NODES).unwrap();
    assert!((chi.value(0.5, 0.0).unwrap() - 4.0).abs() <= 1e-10);
    for eta in [-1.0_f64, -0.4, 0.05, 0.7, 1.0] {
        let exact = 2.0 * ((2.0 * eta).exp() - 1.0) / eta;
        for s in [0.0, 0.3, 1.0] {
            assert!(
                (chi.value(s, eta).unwrap() - exact).abs() <= 1e-10,
                "s={s} eta={eta}"
            );
        }
    }
}

#[test]
fn chi_for_cubic_is_linear_in_eta() {
    // ∂₂²φ = 6η and ∂₂φ(s, 0) = 1: χ = 4∫₀¹ 12tη dt = 24η
    let g = grid(32, 4);
    let chi = chi_kernel(
        &op("eta+eta^3", &g),
        &SmoothFn::zero(&g),
        DEFAULT_QUAD_NODES,
    )
    .unwrap();
    for eta in [-1.0, -0.25, 0.0, 0.6] {
        assert!((chi.value(0.7, eta).unwrap() - 24.0 * eta).abs() <= 1e-12);
    }
    let jet = chi.jet(2, 0.7, 0.6).unwrap();
    assert!((jet[(0, 1)] - 24.0).abs() <= 1e-12);
    assert!(jet[(1, 0)].abs() <= 1e-12 && jet[(0, 2)].abs() <= 1e-12);
}

#[test]
fn chi_identity_trivial_cases() {
    let g = grid(64, 4);
    let x = poly(&g, vec![0.1, 0.2]);
    let u = poly(&g, vec![0.05, -0.1, 0.02]);
    let v = poly(&g, vec![0.3, 0.1, -0.2, 0.05]);
    let linear = op("3*eta + s", &g);
    let chi = chi_kernel(&linear, &x, DEFAULT_QUAD_NODES).unwrap();
    assert!(chi_identity_residual(&linear, &chi, &x, &u, &v).unwrap() <= 1e-14);
    let cubic = op("eta+eta^3", &g);
    let chi = chi_kernel(&cubic, &x, DEFAULT_QUAD_NODES).unwrap();
    assert!(chi_identity_residual(&cubic, &chi, &x, &SmoothFn::zero(&g), &v).unwrap() <= 1e-14);
}

#[test]
fn chi_identity_for_polynomial_phi() {
    let g = grid(64, 4);
    for text in [
        "eta+eta^3",
        "eta + 0.1*s*eta^2 + eta^5",
        "2*eta + eta^3*s + 0.25*eta^4",
    ] {
        let f = op(text, &g);
        for k in 0..20 {
            let x = poly(&g, random_coeffs(5, 3 * k, 4, 0.1));
            let u = poly(&g, random_coeffs(5, 3 * k + 1, 4, 0.05));
            let v = poly(&g, random_coeffs(5, 3 * k + 2, 4, 0.5));
            let chi = chi_kernel(&f, &x, DEFAULT_QUAD_NODES).unwrap();
            let r = chi_identity_residual(&f, &chi, &x, &u, &v).unwrap();
            assert!(r <= 1e-9, "{text} triple {k}: {r:e}");
        }
    }
}

#[test]
fn p_structure() {
    let ps = build_p(7);
    assert_eq!(ps.len(), 7);
    let first: Vec<_> = ps[0].terms().collect();
    assert_eq!(first.len(), 1);
    let (mono, c) = first[0];
    assert_eq!(
        (c, mono.xi, mono.eta, mono.zeta.as_slice()),
        (1, (1, 0), 0, &[0][..])
    );
    for (idx, p) in ps.iter().enumerate() {
        let i = idx + 1;
        assert_eq!(p.order(), i);
        for (mono, c) in p.terms() {
            assert_ne!(c, 0);
            assert!(mono.xi.0 + mono.xi.1 <= i);
            assert!(mono.eta < i);
            assert!(!mono.zeta.is_empty() && mono.zeta.iter().all(|&z| z < i));
        }
    }
}

#[test]
fn jet_derivative_examples() {
    let g = grid(16, 5);
    let rec = JetRecursion::new(6);
    let c = BivarFn::parse("2.5").unwrap();
    let (u, v) = (SmoothFn::constant(&g, 0.3), SmoothFn::constant(&g, -0.7));
    for i in 1..=5 {
        assert!(jet_derivative(&c, &rec, &u, &v, i, 0.6).unwrap().abs() <= 1e-13);
    }
    // (s·s·1)' = 2s
    let chi = BivarFn::parse("s").unwrap();
    let (u, v) = (SmoothFn::identity(&g), SmoothFn::constant(&g, 1.0));
    assert!((jet_derivative(&chi, &rec, &u, &v, 1, 0.4).unwrap() - 0.8).abs() <= 1e-14);
    assert!((jet_derivative(&chi, &rec, &u, &v, 2, 0.4).unwrap() - 2.0).abs() <= 1e-13);
    assert!(jet_derivative(&chi, &rec, &u, &v, 3, 0.4).unwrap().abs() <= 1e-12);
}

/// The oracle forms `χ₁(s, u)·u·v` in coefficient space, so its rounding
/// stays relative to each coefficient before spectral differentiation.
#[test]
fn jet_derivative_matches_spectral_differentiation() {
    let degree = 64;
    let g = grid(degree, 5);
    let len = degree + 1;
    let rec = JetRecursion::new(6);
    let s_coeffs = [0.5, 0.5];
    for text in ["2.5", "0.75", "s", "s*eta", "exp(eta)"] {
        let chi = BivarFn::parse(text).unwrap();
        let mut worst = 0.0_f64;
        for k in 0..20 {
            let cu = random_coeffs(3, 2 * k, 4, 0.5);
            let cv = random_coeffs(3, 2 * k + 1, 4, 0.5);
            let chi_u = match text {
                "s" => s_coeffs.to_vec(),
                "s*eta" => cheb_mul(&s_coeffs, &cu, len),
                "exp(eta)" => cheb_exp(&cu, len),
                constant => vec![constant.parse().unwrap()],
            };
            let w = poly(&g, cheb_mul(&cheb_mul(&chi_u, &cu, len), &cv, len));
            let (u, v) = (poly(&g, cu), poly(&g, cv));
            for i in 1..=5 {
                let d = w.nth_derivative(i);
                let scale = d.sup_abs(0).unwrap();
                for t in 0..=20 {
                    let s = t as f64 / 20.0;
                    let got = jet_derivative(&chi, &rec, &u, &v, i, s).unwrap();
                    let want = d.eval(s).unwrap();
                    worst = worst.max((got - want).abs() / scale.max(want.abs()));
                }
            }
        }
        assert!(worst <= 1e-7, "{text}: {worst:e}");
    }
}

fn table_from(xi: impl Fn(usize, usize) -> f64, max_order: usize) -> MajorantTable {
    let xi_sup = Jet2::from_fn(max_order + 1, |a, b| Ok(xi(a, b))).unwrap();
    MajorantTable::from_parts(
        xi_sup,
        Arc::new(JetRecursion::new(max_order + 1)),
        max_order,
    )
}

#[test]
fn majorant_examples() {
    let zero = table_from(|_, _| 0.0, 5);
    assert_eq!(zero.b0(), 1.0);
    for i in 0..=5 {
        for s in [0.0, 0.3, 4.0] {
            assert_eq!(zero.bound_r(i, s).unwrap(), 0.0);
            assert_eq!(zero.rho(i, s).unwrap(), s);
        }
    }
    let linear_s = table_from(
        |a, b| {
            if (a, b) == (1, 0) || (a, b) == (0, 0) {
                1.0
            } else {
                0.0
            }
        },
        3,
    );
    assert_eq!(linear_s.bound_r(0, 0.5).unwrap(), 0.25);
    assert_eq!(linear_s.b0(), 2.0);
    assert!(matches!(
        zero.rho(6, 1.0),
        Err(Error::OrderOutOfRange { .. })
    ));
}

#[test]
fn theta_examples() {
    let t = table_from(|_, _| 0.0, 3);
    assert!((t.theta0(0.2, 1.0, 0).unwrap() - 25.0 / 14.0).abs() <= 1e-15);
    assert_eq!(t.theta0(0.2, 0.0, 1).unwrap(), 0.0);
    assert!(matches!(
        t.theta0(0.5, 1.0, 0),
        Err(Error::ThetaDomain { .. })
    ));
    assert!(matches!(
        t.theta0(1.0 / 3.0 * 1.5, 1.0, 0),
        Err(Error::ThetaDomain { .. })
    ));
}

/// Exact rational replay of the halving loop for `χ ≡ 0`, where
/// `θ₀(r, s, i) = s / (1 − r(2 + r))`.
fn replay_zero_kernel(l0: usize) -> Vec<(i128, i128)> {
    fn reduce(n: i128, d: i128) -> (i128, i128) {
        let (mut a, mut b) = (n.abs(), d.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        (n / a, d / a)
    }
    let p = 1_i128;
    let mut q = 3_i128;
    loop {
        // 1 − r(2 + r) = (q² − 2pq − p²) / q²
        let (num, den) = (q * q - 2 * p * q - p * p, q * q);
        let mut n = vec![(p, q)];
        for i in 0..l0 {
            let (a, b) = n[i];
            n.push(reduce(a * den, b * num));
        }
        let (a, b) = n[l0];
        if l0 as i128 * a <= b {
            return n;
        }
        q *= 2;
    }
}

#[test]
fn build_n_zero_kernel_replay() {
    let table = table_from(|_, _| 0.0, 4);
    for l0 in [1, 2, 3] {
        let (n, _) = build_n(l0, &table).unwrap();
        let exact = replay_zero_kernel(l0);
        assert_eq!(n.len(), l0 + 1);
        for (got, (a, b)) in n.iter().zip(&exact) {
            assert!(
                (got - *a as f64 / *b as f64).abs() <= 1e-15 * got,
                "l0={l0}"
            );
        }
        assert!(n.windows(2).all(|w| w[0] <= w[1]));
        assert!(n[0] <= 1.0 / 3.0 && l0 as f64 * n[l0] <= 1.0);
    }
    let (n, halvings) = build_n(2, &table).unwrap();
    assert!(halvings >= 1);
    assert!((n[0] - 1.0 / 6.0).abs() <= 1e-16);
}

#[test]
fn x_sequence_examples() {
    let g = grid(32, 4);
    let n0 = 0.2;
    let (x0, x1) = x_sequences(&SmoothFn::zero(&g), n0, 2).unwrap();
    assert!(x0.iter().all(|&v| v == 1.0) && x1.iter().all(|&v| v == 1.0 / n0));
    let (x0, x1) = x_sequences(&SmoothFn::constant(&g, 2.0), n0, 3).unwrap();
    assert!(x0.iter().all(|&v| v == 3.0) && x1.iter().all(|&v| (v - 1.0 / n0).abs() <= 1e-15));
    let (x0, x1) = x_sequences(&SmoothFn::identity(&g), n0, 1).unwrap();
    assert!(x0.iter().all(|&v| (v - 2.0).abs() <= 1e-14));
    assert!(x1.iter().all(|&v| (v - 1.0 / n0).abs() <= 1e-13));
    assert!(x_sequences(&SmoothFn::zero(&g), 0.0, 1).is_err());
}

fn cubic_family() -> (CompOp, GeneratorFamily) {
    let g = grid(64, 6);
    let f = op("eta+eta^3", &g);
    let family = GeneratorFamily::build(&f, &SmoothFn::zero(&g), 2, DEFAULT_QUAD_NODES).unwrap();
    (f, family)
}

#[test]
fn affine_generator_is_trivial() {
    let g = grid(32, 4);
    let f = op("2*eta + s", &g);
    let x = SmoothFn::identity(&g).scaled(0.5);
    let family = GeneratorFamily::build(&f, &x, 2, DEFAULT_QUAD_NODES).unwrap();
    assert_eq!(family.b0(), 1.0);
    let m = family.canonical().unwrap();
    family.check_membership(&m).unwrap();
    let star = family.verify_star(&m, 16, 2).unwrap();
    assert!(star.passed && star.max_gauge == 0.0);
    assert!(m.gauge(&x).unwrap() <= family.base_point_scale());
}

#[test]
fn cubic_generator_end_to_end() {
    let (f, family) = cubic_family();
    let n = family.n();
    assert!(n[0] <= 1.0 / (3.0 * family.b0()));
    assert!(2.0 * n[2] <= 1.0);
    assert!(n.windows(2).all(|w| w[0] <= w[1]));
    let m = family.canonical().unwrap();
    family.check_membership(&m).unwrap();
    assert_eq!(&m.values()[..3], n);
    let colo = f
        .colo_check(&SmoothFn::zero(f.grid()), 0.5, &m, 64, 7)
        .unwrap();
    assert!(colo.passed, "max ratio {}", colo.max_ratio);
    let x = family.base_point();
    assert!(m.gauge(x).unwrap() <= family.base_point_scale());
}

#[test]
fn cubic_merge_and_absorb() {
    let (_, family) = cubic_family();
    let m = family.canonical().unwrap();
    assert_eq!(family.merge(&m, &m).unwrap(), m);
    let (eps, same) = family.absorb(m.values()).unwrap();
    assert_eq!(eps, 1.0);
    assert_eq!(same, m);
    let (eps, big) = family.absorb(&[10.0; 7]).unwrap();
    assert_eq!(
        eps,
        family
            .n()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b / 10.0))
    );
    assert!(big.values().iter().all(|&v| eps * 10.0 <= v));
    family.check_membership(&big).unwrap();
    let mut members = vec![m.clone(), big];
    for k in 0..10 {
        let mut rng = stream(11, Purpose::Grading, k);
        let b: Vec<f64> = (0..7)
            .map(|_| 10f64.powf(uniform(&mut rng, -3.0, 6.0)))
            .collect();
        let (eps, a) = family.absorb(&b).unwrap();
        assert!(eps > 0.0);
        assert!(a.values().iter().zip(&b).all(|(v, bi)| eps * bi <= *v));
        family.check_membership(&a).unwrap();
        let other = &members[k as usize % members.len()];
        let merged = family.merge(&a, other).unwrap();
        family.check_membership(&merged).unwrap();
        assert!((0..=6).all(|i| merged[i] >= a[i].max(other[i])));
        members.push(merged);
    }
}

#[test]
fn cubic_star_property() {
    let (_, family) = cubic_family();
    let m = family.canonical().unwrap();
    let report = family.verify_star(&m, 64, 3).unwrap();
    assert!(
        report.passed && report.v0_ok,
        "max gauge {}",
        report.max_gauge
    );
    let mut inflated = m.values().to_vec();
    inflated[3] *= 10.0;
    let inflated = Grading::new(inflated).unwrap();
    assert!(matches!(
        family.verify_star(&inflated, 4, 3),
        Err(Error::NotMember(_))
    ));
    let zero = SmoothFn::zero(family.base_point().grid());
    assert!(disk_contains(&zero, &m).unwrap());
}

#[test]
fn cubic_derivative_bound() {
    let (_, family) = cubic_family();
    let m = family.canonical().unwrap();
    let report = family.deriv_bound_check(&m, 64, 4).unwrap();
    assert!(report.passed, "ratio {}", report.max_ratio);
    assert!(report.passed_loose, "ratio {}", report.max_ratio_loose);
    assert_eq!(report.checks, 64 * 257 * 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rho_is_monotone(sups in prop::collection::vec(0.0_f64..5.0, 28), s in 0.0_f64..3.0, ds in 0.0_f64..1.0) {
        let table = table_from(|a, b| sups[(a * 7 + b) % sups.len()], 5);
        for i in 0..=5 {
            prop_assert_eq!(table.rho(i, 0.0).unwrap(), 0.0);
            let lo = table.rho(i, s).unwrap();
            prop_assert!(lo >= s);
            prop_assert!(table.rho(i, s + ds).unwrap() >= lo);
            if i > 0 {
                prop_assert!(lo >= table.rho(i - 1, s).unwrap());
            }
        }
    }

    #[test]
    fn build_n_satisfies_constraints(sups in prop::collection::vec(0.0_f64..50.0, 28), l0 in 1_usize..=4) {
        let table = table_from(|a, b| sups[(a * 7 + b) % sups.len()], 5);
        let (n, _) = build_n(l0, &table).unwrap();
        prop_assert!(n[0] <= 1.0 / (3.0 * table.b0()));
        prop_assert!(l0 as f64 * n[l0] <= 1.0);
        prop_assert!(n.windows(2).all(|w| w[0] <= w[1]));
    }
}
