use std::f64::consts::PI;

use mzak::dynamics::*;
use mzak::harness::InitialData;
use mzak::spectral::{Field, Grid};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const I: Complex64 = Complex64::new(0.0, 1.0);

type Modes = Vec<([f64; 3], Complex64)>;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// `[e^{ik·x}, e^{iq·x}] = −cross(k, q) e^{i(k+q)·x}`.
fn cross(k: [f64; 3], q: [f64; 3], geometry: Geometry) -> f64 {
    match geometry {
        Geometry::Dim2 => k[0] * q[1] - k[1] * q[0],
        Geometry::Dim3 { e } => {
            let c = [
                k[1] * q[2] - k[2] * q[1],
                k[2] * q[0] - k[0] * q[2],
                k[0] * q[1] - k[1] * q[0],
            ];
            dot(c, e)
        }
    }
}

fn eval(modes: &Modes, x: [f64; 3]) -> Complex64 {
    modes
        .iter()
        .map(|&(k, a)| a * Complex64::from_polar(1.0, dot(k, x)))
        .sum()
}

fn random_modes(rng: &mut ChaCha8Rng, dim: usize, count: usize, real: bool) -> Modes {
    let mut out = Vec::new();
    while out.len() < count {
        let mut k = [0.0; 3];
        for v in k.iter_mut().take(dim) {
            *v = rng.gen_range(-3i64..=3) as f64;
        }
        if dot(k, k) == 0.0 {
            continue;
        }
        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        out.push((k, a));
        if real {
            out.push((k.map(|v| -v), a.conj()));
        }
    }
    out
}

/// Rates of the system on trigonometric data, summed term by term.
fn analytic_rates(
    phi: &Modes,
    chi: &Modes,
    chi_t: &Modes,
    geometry: Geometry,
) -> (Modes, Modes, Modes) {
    let inv_lap = |v: [f64; 3]| {
        if dot(v, v) == 0.0 {
            0.0
        } else {
            -1.0 / dot(v, v)
        }
    };
    // φₜ = iΔφ + Δ⁻¹[φ, χ]
    let mut dphi: Modes = phi.iter().map(|&(k, a)| (k, -I * dot(k, k) * a)).collect();
    for &(k, a) in phi {
        for &(q, c) in chi {
            let s = add(k, q);
            dphi.push((s, -cross(k, q, geometry) * inv_lap(s) * a * c));
        }
    }
    // W = [φ̄, φ];  χₜₜ = Δχ − iΔW
    let mut chi_tt: Modes = chi.iter().map(|&(q, c)| (q, -dot(q, q) * c)).collect();
    for &(k, a) in phi {
        for &(k2, a2) in phi {
            let s = add(k2, k.map(|v| -v));
            let w = cross(k, k2, geometry) * a.conj() * a2;
            chi_tt.push((s, I * dot(s, s) * w));
        }
    }
    (dphi, chi_t.clone(), chi_tt)
}

fn check_rates(dim: usize, geometry: Geometry, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = random_modes(&mut rng, dim, 4, false);
    let chi = random_modes(&mut rng, dim, 3, true);
    let chi_t = random_modes(&mut rng, dim, 3, true);
    let g = Grid::new(dim, 32, 2.0 * PI).unwrap();
    let field = |m: &Modes| Field::from_fn(g, |x| eval(m, x));
    let s = State::from_data(&field(&phi), &field(&chi), &field(&chi_t), geometry, true).unwrap();
    let (dphi, dplus, dminus) = rhs_first_order(&s, &SimConfig::default()).unwrap();
    let (chi_rate, chi_t_rate) = from_first_order(&dplus, &dminus).unwrap();
    let (e_phi, e_chi, e_tt) = analytic_rates(&phi, &chi, &chi_t, geometry);
    for (got, want) in [(dphi, e_phi), (chi_rate, e_chi), (chi_t_rate, e_tt)] {
        let want = field(&want);
        let err = got.to_physical().max_abs_diff(&want).unwrap();
        assert!(
            err <= 1e-11 * want.max_abs().max(1.0),
            "seed {seed}: {err:.3e}"
        );
    }
}

#[test]
fn rates_match_trigonometric_oracle() {
    for seed in 0..5 {
        check_rates(2, Geometry::Dim2, seed);
        check_rates(
            3,
            Geometry::Dim3 {
                e: [0.48, 0.6, 0.64],
            },
            10 + seed,
        );
    }
}

fn packet_state(dim: usize, n: usize, amplitude: f64) -> State {
    let g = Grid::new(dim, n, 2.0 * PI).unwrap();
    let geometry = if dim == 2 {
        Geometry::Dim2
    } else {
        Geometry::Dim3 { e: [0.0, 0.6, 0.8] }
    };
    InitialData::default()
        .scaled(amplitude / 0.1)
        .build(g, geometry, true)
        .unwrap()
}

fn run(s: &State, integrator: Integrator, dt: f64, t_end: f64) -> State {
    let cfg = SimConfig {
        dt,
        t_end,
        integrator,
        checkpoint_stride: u64::MAX,
        ..SimConfig::default()
    };
    evolve(s.clone(), &cfg, &mut []).unwrap().final_state
}

fn distance(a: &State, b: &State) -> f64 {
    let num = a.phi.sub(&b.phi).unwrap().norm_sq() + a.chi_plus.sub(&b.chi_plus).unwrap().norm_sq();
    (num / (b.phi.norm_sq() + b.chi_plus.norm_sq())).sqrt()
}

fn observed_order(
    s: &State,
    integrator: Integrator,
    dts: &[f64],
    t_end: f64,
    reference: &State,
) -> f64 {
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| distance(&run(s, integrator, dt, t_end), reference))
        .collect();
    let n = errs.len();
    (errs[n - 2] / errs[n - 1]).log2()
}

#[test]
fn orders_against_a_fine_reference() {
    let s = packet_state(2, 32, 1.0);
    let t_end = 0.2;
    let reference = run(&s, Integrator::InteractionRk4, 2.5e-4, t_end);
    let strang = observed_order(
        &s,
        Integrator::Strang,
        &[0.02, 0.01, 0.005],
        t_end,
        &reference,
    );
    let irk4 = observed_order(
        &s,
        Integrator::InteractionRk4,
        &[0.04, 0.02, 0.01],
        t_end,
        &reference,
    );
    let rk4 = observed_order(
        &s,
        Integrator::ReferenceRk4SecondOrder,
        &[0.004, 0.002, 0.001],
        t_end,
        &reference,
    );
    assert!(strang >= 1.9, "strang {strang}");
    assert!(irk4 >= 3.7, "interaction rk4 {irk4}");
    assert!(rk4 >= 3.7, "reference rk4 {rk4}");
}

#[test]
fn linear_flow_is_exact_in_3d() {
    let g = Grid::new(3, 16, 3.0).unwrap();
    let unit = 2.0 * PI / 3.0;
    let (k, p) = (
        [2.0 * unit, -1.0 * unit, 3.0 * unit],
        [0.0, 1.0 * unit, -2.0 * unit],
    );
    let phi = Field::from_fn(g, |x| Complex64::from_polar(0.5, dot(k, x)));
    let chi = Field::from_fn(g, |x| Complex64::new(dot(p, x).cos(), 0.0));
    let zero = Field::from_fn(g, |_| Complex64::new(0.0, 0.0));
    let geometry = Geometry::Dim3 { e: [0.0, 0.6, 0.8] };
    let s = State::from_data(&phi, &chi, &zero, geometry, true).unwrap();
    let t = 0.3;
    for integrator in [Integrator::Strang, Integrator::InteractionRk4] {
        let cfg = SimConfig {
            dt: 1e-3,
            t_end: t,
            integrator,
            nonlinearity_enabled: false,
            checkpoint_stride: u64::MAX,
            ..SimConfig::default()
        };
        let end = evolve(s.clone(), &cfg, &mut []).unwrap().final_state;
        let phi_t = Field::from_fn(g, |x| Complex64::from_polar(0.5, dot(k, x) - dot(k, k) * t));
        let chi_t = Field::from_fn(g, |x| {
            Complex64::new(dot(p, x).cos() * (dot(p, p).sqrt() * t).cos(), 0.0)
        });
        let (chi_end, _) = end.chi_pair().unwrap();
        assert!(end.phi.to_physical().max_abs_diff(&phi_t).unwrap() <= 1e-10);
        assert!(chi_end.to_physical().max_abs_diff(&chi_t).unwrap() <= 1e-10);
    }
}

#[test]
fn first_order_substitution_round_trips() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_modes(&mut rng, 2, 5, true);
    let b = random_modes(&mut rng, 2, 5, true);
    let chi0 = Field::from_fn(g, |x| eval(&a, x));
    let chi1 = Field::from_fn(g, |x| eval(&b, x));
    let (p, m) = to_first_order(&chi0, &chi1).unwrap();
    let (c0, c1) = from_first_order(&p, &m).unwrap();
    assert!(c0.to_physical().max_abs_diff(&chi0).unwrap() < 1e-13);
    assert!(c1.to_physical().max_abs_diff(&chi1).unwrap() < 1e-13);
    assert!(from_first_order(&p, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gauge_covariance(theta in 0.0..(2.0 * PI), amplitude in 0.05..1.5f64, three in any::<bool>()) {
        let s = if three { packet_state(3, 8, amplitude) } else { packet_state(2, 16, amplitude) };
        let a = run(&s.gauge_rotated(theta), Integrator::Strang, 2e-3, 0.1);
        let b = run(&s, Integrator::Strang, 2e-3, 0.1).gauge_rotated(theta);
        prop_assert!(distance(&a, &b) <= 1e-8);
    }

    #[test]
    fn evolution_keeps_wave_field_real(seed in 0u64..1000, integrator in prop_oneof![
        Just(Integrator::Strang),
        Just(Integrator::InteractionRk4),
        Just(Integrator::ReferenceRk4SecondOrder),
    ]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let field = |m: &Modes| Field::from_fn(g, |x| eval(m, x));
        let phi = field(&random_modes(&mut rng, 2, 4, false));
        let chi0 = field(&random_modes(&mut rng, 2, 3, true));
        let chi1 = field(&random_modes(&mut rng, 2, 3, true));
        let s = State::from_data(&phi, &chi0, &chi1, Geometry::Dim2, true).unwrap();
        let end = run(&s, integrator, 1e-3, 0.05);
        prop_assert!(end.conjugacy_residual() <= 1e-12);
        let (chi, chi_t) = end.chi_pair().unwrap();
        prop_assert!(chi.to_physical().max_imag() <= 1e-12 && chi_t.to_physical().max_imag() <= 1e-10);
    }
}
