//! The substitution `χ± = χ ± iB⁻¹χₜ` and its inverse.

use num_complex::Complex64;

use super::state::CONJUGACY_TOLERANCE;
use crate::error::{Error, Result};
use crate::spectral::{self, Field, Multiplier, ZERO_MODE_TOLERANCE};

fn require_mean_zero(f: &Field, what: &str) -> Result<()> {
    let scale = f.max_abs().max(1.0);
    let mean = f.mean().norm();
    if mean > ZERO_MODE_TOLERANCE * scale {
        return Err(Error::ZeroMode(format!(
            "{what} must be mean-zero (mean {mean:.3e})"
        )));
    }
    Ok(())
}

/// `χ± = χ₀ ± iB⁻¹χ₁`, spectral outputs.
pub fn to_first_order(chi0: &Field, chi1: &Field) -> Result<(Field, Field)> {
    chi0.check_same_grid(chi1)?;
    let chi0 = chi0.to_spectral();
    let chi1 = chi1.to_spectral();
    require_mean_zero(&chi0, "chi0")?;
    require_mean_zero(&chi1, "chi1")?;
    let inv = spectral::apply_multiplier(&chi1, Multiplier::RieszPower(-1.0))?;
    let plus = chi0.axpy(Complex64::i(), &inv)?;
    let minus = chi0.axpy(-Complex64::i(), &inv)?;
    Ok((plus, minus))
}

/// `χ = (χ₊ + χ₋)/2`, `χₜ = B(χ₊ − χ₋)/(2i)`, spectral outputs.
///
/// Fails with [`Error::Conjugacy`] when `χ₋` is not the conjugate of `χ₊`
/// to [`CONJUGACY_TOLERANCE`].
pub fn from_first_order(chi_plus: &Field, chi_minus: &Field) -> Result<(Field, Field)> {
    chi_plus.check_same_grid(chi_minus)?;
    let plus = chi_plus.to_spectral();
    let minus = chi_minus.to_spectral();
    let scale = plus.norm().max(minus.norm());
    if scale > 0.0 {
        let residual = minus.sub(&plus.conj())?.norm() / scale;
        if residual > CONJUGACY_TOLERANCE {
            return Err(Error::Conjugacy { residual });
        }
    }
    let half = Complex64::new(0.5, 0.0);
    let chi = plus.add(&minus)?.scale(half);
    let diff = plus.sub(&minus)?.scale(Complex64::new(0.0, -0.5));
    let chi_t = spectral::apply_multiplier(&diff, Multiplier::RieszPower(1.0))?;
    Ok((chi, chi_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, Representation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real_mean_zero(g: Grid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..g.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let f = Field::from_values(g, Representation::Physical, values).unwrap();
        spectral::project_admissible(&f, false)
    }

    #[test]
    fn zero_velocity_gives_equal_components() {
        let g = Grid::new(2, 8, 2.0).unwrap();
        let chi0 = real_mean_zero(g, 1);
        let zero = Field::zeros(g, Representation::Spectral);
        let (p, m) = to_first_order(&chi0, &zero).unwrap();
        assert_eq!(p, chi0);
        assert_eq!(m, chi0);
        let (chi, chi_t) = from_first_order(&p, &m).unwrap();
        assert!(chi.max_abs_diff(&chi0).unwrap() < 1e-14);
        assert!(chi_t.max_abs() < 1e-14);
    }

    #[test]
    fn zero_displacement_gives_opposite_components() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        let chi1 = real_mean_zero(g, 2);
        let zero = Field::zeros(g, Representation::Spectral);
        let (p, m) = to_first_order(&zero, &chi1).unwrap();
        let expect = spectral::apply_multiplier(&chi1, Multiplier::RieszPower(-1.0))
            .unwrap()
            .scale(Complex64::i());
        assert!(p.max_abs_diff(&expect).unwrap() < 1e-14);
        assert!(p.add(&m).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn round_trip_and_definition() {
        let g = Grid::new(2, 10, 3.0).unwrap();
        let chi0 = real_mean_zero(g, 3);
        let chi1 = real_mean_zero(g, 4);
        let (p, m) = to_first_order(&chi0, &chi1).unwrap();
        assert!(m.max_abs_diff(&p.conj()).unwrap() < 1e-14);
        let (chi, chi_t) = from_first_order(&p, &m).unwrap();
        assert!(chi.max_abs_diff(&chi0).unwrap() / chi0.max_abs() < 1e-12);
        assert!(chi_t.max_abs_diff(&chi1).unwrap() / chi1.max_abs() < 1e-12);
        assert!(chi.max_imag() < 1e-14 && chi_t.max_imag() < 1e-13);
    }

    #[test]
    fn rejects_mean_and_broken_conjugacy() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let one = Field::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let zero = Field::zeros(g, Representation::Spectral);
        assert!(matches!(
            to_first_order(&one, &zero),
            Err(Error::ZeroMode(_))
        ));
        let a = real_mean_zero(g, 5);
        let b = real_mean_zero(g, 6);
        assert!(matches!(
            from_first_order(&a, &b),
            Err(Error::Conjugacy { .. })
        ));
    }
}
