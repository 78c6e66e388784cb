//! Closed-form values checked through the public API.

use std::f64::consts::PI;

use num_complex::Complex64;
use tfzak_core::experiments::{check_finite_parseval, check_quasiperiodicity, check_zak_parseval};
use tfzak_core::norms::{mixed_lebesgue_norm, Domain, NormInput, NormSpec};
use tfzak_core::transforms::{finite_zak, fourier, stft, zak};
use tfzak_core::{dual_basis, product_basis, sample, Exponent, MixedExponent, OrderedBasis, Weight, Window};

fn gaussian(step: f64) -> tfzak_core::SampledField {
    sample(|x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0), &[-16.0], &[16.0], step).unwrap()
}

#[test]
fn gaussian_is_fourier_self_dual() {
    let f = gaussian(1.0 / 64.0);
    let g = fourier(&f).unwrap();
    let err = (0..g.len())
        .map(|i| (g.values()[i] - (-g.point(i)[0].powi(2) / 2.0).exp()).norm())
        .fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
    assert!((g.l2_norm() - f.l2_norm()).abs() <= 1e-10);
}

#[test]
fn stft_of_unit_gaussian() {
    let f = gaussian(1.0 / 64.0);
    let v = stft(&f, &Window::standard(1)).unwrap();
    let mut err = 0.0f64;
    for i in 0..v.len() {
        let p = v.point(i);
        let want = 0.5f64.sqrt() * (-(p[0] * p[0] + p[1] * p[1]) / 4.0).exp();
        err = err.max((v.values()[i].norm() - want).abs());
    }
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn modulation_l2_of_unit_gaussian_is_sqrt_pi() {
    let f = gaussian(1.0 / 32.0);
    let v = NormSpec::modulation_l2().evaluate(NormInput::Signal(&f)).unwrap();
    assert!((v.value - PI.sqrt()).abs() <= 1e-4, "{}", v.value);
}

#[test]
fn finite_zak_small_cases() {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    assert_eq!(finite_zak(&[one, zero, zero, zero], 2, 2).unwrap(), vec![one, one, zero, zero]);
    let z = finite_zak(&[one; 4], 2, 2).unwrap();
    for n in 0..2 {
        assert!((z[n * 2] - 2.0).norm() < 1e-15 && z[n * 2 + 1].norm() < 1e-15);
    }
    assert!(check_finite_parseval(4096, 5, 7).unwrap() <= 1e-10);
}

#[test]
fn zak_parseval_constant() {
    let c = check_zak_parseval(&gaussian(1.0 / 64.0), &OrderedBasis::standard(1)).unwrap();
    assert!((c / (2.0 * PI).sqrt() - 1.0).abs() <= 0.01, "{c}");
    // With E = {2} the dual cell has length π and the constant is its square root.
    let c2 = check_zak_parseval(&gaussian(1.0 / 64.0), &OrderedBasis::diagonal(&[2.0]).unwrap()).unwrap();
    assert!((c2 / PI.sqrt() - 1.0).abs() <= 0.01, "{c2}");
}

#[test]
fn zak_of_gaussian_is_quasi_periodic() {
    let z = zak(&gaussian(1.0 / 32.0), &OrderedBasis::standard(1)).unwrap();
    assert!(check_quasiperiodicity(&z) <= 1e-9);
}

#[test]
fn dual_of_product_is_product_of_duals() {
    let e1 = OrderedBasis::from_columns(vec![vec![1.0, 0.3], vec![0.2, 2.0]]).unwrap();
    let e2 = OrderedBasis::diagonal(&[0.5, 3.0]).unwrap();
    let lhs = dual_basis(&product_basis(&e1, &e2).unwrap());
    let rhs = product_basis(&dual_basis(&e1), &dual_basis(&e2)).unwrap();
    assert!(lhs.approx_eq(&rhs, 1e-12));
    assert!(dual_basis(&OrderedBasis::standard(2)).approx_eq(&OrderedBasis::diagonal(&[2.0 * PI, 2.0 * PI]).unwrap(), 1e-12));
}

#[test]
fn equal_mixed_exponents_give_plain_lp() {
    let f = sample(|x| Complex64::new((-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp(), x[0]), &[-4.0, -4.0], &[4.0, 4.0], 0.125).unwrap();
    for p in [0.5, 1.0, 3.0] {
        let direct = (f.values().iter().map(|v| v.norm().powf(p)).sum::<f64>() * f.quadrature_weight()).powf(1.0 / p);
        let v = mixed_lebesgue_norm(&f, &OrderedBasis::standard(2), &MixedExponent::scalar(Exponent::of(p), 2), &Weight::one(), &Domain::Full)
            .unwrap()
            .value;
        assert!((v / direct - 1.0).abs() <= 1e-12);
    }
}
