use mzak::bourgain::*;
use mzak::spectral::Grid;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

mod common;
use common::{naive_trilinear, random_spectral};

fn random_field(g: Grid, nt: usize, dt: f64, seed: u64) -> SpaceTimeField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..g.len() * nt)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SpaceTimeField::from_values(g, nt, dt, StRepresentation::Physical, v).unwrap()
}

/// Naive space-time DFT straight from the definition, centred times.
fn naive_coefficients(f: &SpaceTimeField) -> Vec<(Vec<i64>, i64, Complex64)> {
    let g = *f.grid();
    let nt = f.n_time();
    let n = g.len();
    let norm = 1.0 / (n * nt) as f64;
    let ext = nt as f64 * f.dt();
    let mut out = Vec::new();
    for kt in 0..nt {
        let km = if kt < nt / 2 {
            kt as i64
        } else {
            kt as i64 - nt as i64
        };
        let tau = 2.0 * PI * km as f64 / ext;
        for i in 0..n {
            let xi = g.wavevector(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..nt {
                let t = (j as f64 - (nt / 2) as f64) * f.dt();
                for s in 0..n {
                    let x = g.position(s);
                    let ph = -(xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2] + tau * t);
                    acc += f.values()[j * n + s] * Complex64::from_polar(1.0, ph);
                }
            }
            out.push((g.modes(i).to_vec(), km, acc * norm));
        }
    }
    out
}

#[test]
fn transform_matches_naive_dft() {
    let g = Grid::new(2, 8, 3.0).unwrap();
    let f = random_field(g, 8, 0.2, 1);
    let s = f.to_spectral();
    for (m, k, c) in naive_coefficients(&f) {
        let kt = k.rem_euclid(8) as usize;
        let i = g.flat_of_modes([m[0], m[1], 0]);
        assert!((s.values()[kt * g.len() + i] - c).norm() < 1e-12);
    }
}

#[test]
fn xkb_norm_matches_direct_sum() {
    let g = Grid::new(2, 8, 2.0 * PI).unwrap();
    let (nt, dt) = (8, 0.15);
    let f = random_field(g, nt, dt, 2);
    let coeffs = naive_coefficients(&f);
    let ext = nt as f64 * dt;
    let specs = [
        NormSpec::x(1.0, 0.5),
        NormSpec::x(-0.5, -0.49),
        NormSpec::x_wave(0.7, 0.5, 1),
        NormSpec::x_wave(-1.0, -0.5, -1),
    ];
    for spec in specs {
        let mut sum = 0.0;
        for (m, k, c) in &coeffs {
            let q = (m[0] * m[0] + m[1] * m[1]) as f64;
            let tau = 2.0 * PI * *k as f64 / ext;
            let sigma = match spec.dispersion {
                Dispersion::Schrodinger => tau + q,
                Dispersion::WavePlus => tau + q.sqrt(),
                Dispersion::WaveMinus => tau - q.sqrt(),
            };
            let w = (1.0 + q).powf(spec.spatial_exponent / 2.0)
                * (1.0 + sigma * sigma).powf(spec.modulation_exponent / 2.0);
            sum += w * w * c.norm_sqr();
        }
        let expect = (sum * g.volume() * ext).sqrt();
        let got = xkb_norm(&f, &spec).unwrap();
        assert!(
            (got - expect).abs() < 1e-10 * expect,
            "{spec:?}: {got} vs {expect}"
        );
    }
}

#[test]
fn zero_exponents_give_l2() {
    let g = Grid::new(3, 8, 1.7).unwrap();
    let f = random_field(g, 8, 0.3, 3);
    let direct: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.cell_volume() * 0.3;
    let got = xkb_norm(&f, &NormSpec::x(0.0, 0.0)).unwrap();
    assert!((got - direct.sqrt()).abs() < 1e-12 * got);
}

#[test]
fn single_slice_y_equals_x_with_b_minus_one() {
    let g = Grid::new(2, 8, 2.0 * PI).unwrap();
    let (nt, dt) = (16, 0.1);
    let mut f = SpaceTimeField::zeros(g, nt, dt, StRepresentation::SpectralXt).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..g.len() {
        f.values_mut()[5 * g.len() + i] =
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let spec = NormSpec::x(0.8, 0.3);
    let y = yk_norm(&f, &spec).unwrap();
    let x = xkb_norm(
        &f,
        &NormSpec {
            modulation_exponent: -1.0,
            ..spec
        },
    )
    .unwrap();
    assert!((y - x * (2.0 * PI / (nt as f64 * dt)).sqrt()).abs() < 1e-12 * y);
    let zero = SpaceTimeField::zeros(g, nt, dt, StRepresentation::Physical).unwrap();
    assert_eq!(yk_norm(&zero, &spec).unwrap(), 0.0);
}

#[test]
fn window_examples() {
    let g = Grid::new(2, 8, 1.0).unwrap();
    let (nt, dt) = (64, 0.05);
    let delta = 0.5;
    let inner = SpaceTimeField::from_fn(g, nt, dt, |x, t| {
        if t.abs() <= delta {
            Complex64::new(1.0 + x[0], t)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .unwrap();
    assert_eq!(time_window(&inner, delta).unwrap(), inner);
    let outer = SpaceTimeField::from_fn(g, nt, dt, |_, t| {
        if t.abs() >= 2.0 * delta {
            Complex64::new(3.0, 1.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .unwrap();
    assert_eq!(time_window(&outer, delta).unwrap().max_abs(), 0.0);
    for j in 0..nt {
        let t = (j as f64 - 32.0) * dt;
        if t.abs() <= delta {
            assert_eq!(
                psi_delta(t, delta) * psi_delta(t, delta),
                psi_delta(t, delta)
            );
        }
    }
    assert!(time_window(&inner, 1.0).is_err());
    assert!(time_window(&inner, 0.0).is_err());
}

#[test]
fn trilinear_matches_nested_loops() {
    let g = Grid::new(2, 8, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let styles = [
        DenominatorStyle::BracketXi,
        DenominatorStyle::BracketXi2,
        DenominatorStyle::HomogeneousXi2,
    ];
    let disps = [
        Dispersion::Schrodinger,
        Dispersion::WavePlus,
        Dispersion::WaveMinus,
    ];
    for case in 0..6 {
        let dt = rng.gen_range(0.05..0.5);
        let sp = rng.gen_range(0.2..1.0);
        let v = random_spectral(g, 8, dt, &mut rng, sp);
        let v1 = random_spectral(g, 8, dt, &mut rng, sp);
        let v2 = random_spectral(g, 8, dt, &mut rng, sp);
        let w = TrilinearWeights {
            a: rng.gen_range(0.0..0.5),
            a1: rng.gen_range(0.0..0.5),
            a2: rng.gen_range(0.0..0.5),
            m: rng.gen_range(0.0..2.0),
        };
        let style = styles[case % 3];
        let disp = disps[(case / 3 + case) % 3];
        let fast = trilinear_integral(&v, &v1, &v2, w, disp, style).unwrap();
        let slow = naive_trilinear(&v, &v1, &v2, w, disp, style);
        assert!(
            (fast - slow).abs() <= 1e-10 * slow,
            "case {case}: {fast} vs {slow}"
        );
    }
    let zero = SpaceTimeField::zeros(g, 8, 0.1, StRepresentation::Physical).unwrap();
    let any = random_field(g, 8, 0.1, 5);
    let w = TrilinearWeights {
        a: 0.3,
        a1: 0.3,
        a2: 0.3,
        m: 1.0,
    };
    assert_eq!(
        trilinear_integral(
            &zero,
            &any,
            &any,
            w,
            Dispersion::WavePlus,
            DenominatorStyle::BracketXi
        )
        .unwrap(),
        0.0
    );
}

fn band_field(g: Grid, nt: usize, dt: f64, t: f64, seed: u64) -> SpaceTimeField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..9)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let om: Vec<f64> = (0..9).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let f = SpaceTimeField::from_fn(g, nt, dt, |x, tt| {
        let mut s = Complex64::new(0.0, 0.0);
        for a in -1i64..=1 {
            for b in -1i64..=1 {
                let j = ((a + 1) * 3 + b + 1) as usize;
                s += amps[j]
                    * Complex64::from_polar(1.0, a as f64 * x[0] + b as f64 * x[1] + om[j] * tt);
            }
        }
        s
    })
    .unwrap();
    time_window(&f, t).unwrap()
}

#[test]
fn lhs_norms_agree_with_dual_pairing() {
    let g = Grid::new(2, 8, 2.0 * PI).unwrap();
    let (nt, dt) = (8, 0.3);
    let p = BilinearParams {
        t: 0.5,
        ..BilinearParams::default()
    };
    let phi = band_field(g, nt, dt, p.t, 1);
    let chi = band_field(g, nt, dt, p.t, 2);
    let p_lim = BilinearParams {
        k: 1.0,
        l: 0.0,
        ..p
    };
    for (lemma, params) in [
        (LemmaId::EPrime, p),
        (LemmaId::EDoublePrime, p),
        (LemmaId::F, p),
        (LemmaId::FTilde, p),
        (LemmaId::E, BilinearParams { k: 0.5, ..p }),
        (LemmaId::FPrime, p_lim),
        (LemmaId::FDoublePrime, p_lim),
    ] {
        let (direct, dual) = duality_check(&phi, &chi, lemma, &params).unwrap();
        assert!(direct > 0.0);
        assert!(
            (direct - dual).abs() <= 1e-8 * direct,
            "{lemma}: {direct} vs {dual}"
        );
        let (lhs, _) = bilinear_parts(&phi, &chi, lemma, &params).unwrap();
        assert!((lhs - direct).abs() <= 1e-12 * direct);
    }
}

#[test]
fn bilinear_zero_and_support() {
    let g = Grid::new(2, 8, 2.0 * PI).unwrap();
    let p = BilinearParams {
        t: 0.5,
        ..BilinearParams::default()
    };
    let chi = band_field(g, 8, 0.3, p.t, 3);
    let zero = SpaceTimeField::zeros(g, 8, 0.3, StRepresentation::Physical).unwrap();
    for lemma in LemmaId::admissible_for(2, &p) {
        assert_eq!(bilinear_ratio(&zero, &chi, lemma, &p).unwrap(), 0.0);
    }
    let wide = random_field(g, 8, 0.3, 4);
    assert!(bilinear_ratio(&wide, &chi, LemmaId::F, &p).is_err());
    assert!(matches!(
        bilinear_ratio(&chi, &chi, LemmaId::CPrime, &p),
        Err(mzak::Error::Inadmissible { .. })
    ));
}

#[test]
fn identity_residual_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100_000 {
        let d = if rng.gen_bool(0.5) { 2 } else { 3 };
        let mut v = || {
            let mut a = [0.0; 3];
            for c in a.iter_mut().take(d) {
                *c = rng.gen_range(-10.0..10.0);
            }
            a
        };
        let (x1, x2) = (v(), v());
        let r = dispersive_identity_residual(
            x1,
            x2,
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
            if rng.gen_bool(0.5) { 1 } else { -1 },
        );
        assert!(r <= 1e-12);
    }
}

#[test]
fn identity_residual_is_relative_roundoff_at_large_frequencies() {
    for dim in [2, 3] {
        for s in random_samples(dim, 50_000, 1e4, 12) {
            let scale = 1.0 + dot(s.xi1, s.xi1) + dot(s.xi2, s.xi2) + s.tau1.abs() + s.tau2.abs();
            let r = dispersive_identity_residual(s.xi1, s.xi2, s.tau1, s.tau2, s.sign);
            assert!(r <= 1e-14 * scale, "{r:e} at scale {scale:e}");
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[test]
fn shipped_constants_hold_and_sweep_agrees() {
    let worst = sweep_constants(200_000, 1e3, 5);
    let c = InequalityConstants::default().c;
    for w in worst {
        assert!(w <= c, "{worst:?}");
    }
    let samples = random_samples(3, 200_000, 1e3, 6);
    let rep = inequality_check_31_33(&samples, Region::default(), InequalityConstants::default())
        .unwrap();
    assert!(rep.all_satisfied());
    assert!(rep.min_c.iter().all(|m| *m <= c));
}

#[test]
fn small_frequencies_are_trivially_bounded() {
    let s = FrequencySample {
        xi1: [0.6, 0.5, 0.0],
        xi2: [0.0; 3],
        tau1: 3.0,
        tau2: -7.0,
        sign: 1,
    };
    let r = inequality_ratios(&s, 4.0 / 33.0, 12.0);
    assert!(r.iter().all(|x| *x <= 2.0));
}

fn lattice_field(dim: usize, seed: u64) -> SpaceTimeField {
    random_field(Grid::new(dim, 8, 2.0 * PI).unwrap(), 8, 0.25, seed)
}

fn any_spec() -> impl Strategy<Value = NormSpec> {
    (-2.0..2.0f64, -1.0..1.0f64, 0..3usize, any::<bool>()).prop_map(|(k, b, d, h)| {
        let dispersion = [
            Dispersion::Schrodinger,
            Dispersion::WavePlus,
            Dispersion::WaveMinus,
        ][d];
        let weight_style = if h {
            WeightStyle::Homogeneous
        } else {
            WeightStyle::Inhomogeneous
        };
        NormSpec {
            spatial_exponent: k,
            modulation_exponent: b,
            dispersion,
            weight_style,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_axioms(spec in any_spec(), s1 in 0u64..1000, s2 in 0u64..1000, lambda in -3.0..3.0f64) {
        let f = lattice_field(2, s1).remove_spatial_mean();
        let g = lattice_field(2, s2).remove_spatial_mean();
        let nf = xkb_norm(&f, &spec).unwrap();
        let scaled = f.map(|v| v * Complex64::new(lambda, 0.5 * lambda));
        let ns = xkb_norm(&scaled, &spec).unwrap();
        prop_assert!((ns - (1.25f64).sqrt() * lambda.abs() * nf).abs() <= 1e-10 * nf.max(1e-300) * (1.0 + lambda.abs()));
        let sum = SpaceTimeField::from_values(*f.grid(), 8, 0.25, StRepresentation::SpectralXt,
            f.values().iter().zip(g.values()).map(|(a, b)| a + b).collect()).unwrap();
        let ng = xkb_norm(&g, &spec).unwrap();
        prop_assert!(xkb_norm(&sum, &spec).unwrap() <= (nf + ng) * (1.0 + 1e-10));
        let y = yk_norm(&sum, &spec).unwrap();
        prop_assert!(y <= (yk_norm(&f, &spec).unwrap() + yk_norm(&g, &spec).unwrap()) * (1.0 + 1e-10));
    }

    #[test]
    fn monotone_in_exponents(seed in 0u64..1000, k in -2.0..2.0f64, b in -1.0..1.0f64, dk in 0.0..1.0f64, db in 0.0..1.0f64, d in 0..3usize) {
        let f = lattice_field(3, seed);
        let disp = [Dispersion::Schrodinger, Dispersion::WavePlus, Dispersion::WaveMinus][d];
        let base = NormSpec { spatial_exponent: k, modulation_exponent: b, dispersion: disp, weight_style: WeightStyle::Inhomogeneous };
        let n0 = xkb_norm(&f, &base).unwrap();
        let nk = xkb_norm(&f, &NormSpec { spatial_exponent: k + dk, ..base }).unwrap();
        let nb = xkb_norm(&f, &NormSpec { modulation_exponent: b + db, ..base }).unwrap();
        prop_assert!(nk >= n0 * (1.0 - 1e-14));
        prop_assert!(nb >= n0 * (1.0 - 1e-14));
    }

    #[test]
    fn three_term_bound_random(y1 in -1e6..1e6f64, y2 in -1e6..1e6f64, lambda in 1.0001..10.0f64) {
        prop_assert!(inequality_check_301(y1, y2, lambda));
    }
}
