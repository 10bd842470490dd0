//! Time integration of the first-order system
//!
//! ```text
//! ∂ₜφ  = iΔφ + Δ⁻¹C,          C = [φ, χ]
//! ∂ₜχ± = ∓iBχ± ∓ B W,         W = [φ̄, φ],   χ = (χ₊ + χ₋)/2
//! ```
//!
//! and of the second-order system it came from,
//!
//! ```text
//! ∂ₜφ = iΔφ + Δ⁻¹C,   ∂ₜχ = χₜ,   ∂ₜχₜ = Δχ + (1/i)ΔW.
//! ```

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::{BracketKernel, KernelScratch};
use super::propagator::PropagatorKind;
use super::state::{Geometry, State};
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, Representation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Exact linear half step, explicit midpoint on the nonlinear subflow
    /// over `dt`, exact linear half step. Second order.
    Strang,
    /// Classical RK4 on the interaction-picture variables. Fourth order.
    InteractionRk4,
    /// Plain RK4 on the second-order system carrying `(φ, χ, χₜ)`.
    ReferenceRk4SecondOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub dealias: bool,
    pub nonlinearity_enabled: bool,
    pub checkpoint_stride: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            integrator: Integrator::Strang,
            dealias: true,
            nonlinearity_enabled: true,
            checkpoint_stride: 100,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !self.t_end.is_finite() || self.t_end < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "t_end must be finite and nonnegative, got {}",
                self.t_end
            )));
        }
        if self.checkpoint_stride == 0 {
            return Err(Error::InvalidArgument(
                "checkpoint_stride must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps from `t_start` to `t_end`.
    pub fn steps_from(&self, t_start: f64) -> u64 {
        if self.t_end <= t_start {
            0
        } else {
            ((self.t_end - t_start) / self.dt).round() as u64
        }
    }
}

type Vars = [Vec<Complex64>; 3];

fn zeros(n: usize) -> Vars {
    [
        vec![Complex64::new(0.0, 0.0); n],
        vec![Complex64::new(0.0, 0.0); n],
        vec![Complex64::new(0.0, 0.0); n],
    ]
}

/// `out = u + s·k`.
fn set_axpy(out: &mut Vars, u: &Vars, s: f64, k: &Vars) {
    for c in 0..3 {
        for ((o, a), b) in out[c].iter_mut().zip(&u[c]).zip(&k[c]) {
            *o = a + b * s;
        }
    }
}

/// `out += s·k`.
fn add_scaled(out: &mut Vars, s: f64, k: &Vars) {
    for c in 0..3 {
        for (o, b) in out[c].iter_mut().zip(&k[c]) {
            *o += b * s;
        }
    }
}

/// `out = E·u`.
fn set_phased(out: &mut Vars, phases: &[Vec<Complex64>; 3], u: &Vars) {
    for c in 0..3 {
        for ((o, p), a) in out[c].iter_mut().zip(&phases[c]).zip(&u[c]) {
            *o = p * a;
        }
    }
}

/// `u = E·u`.
fn phase_in_place(phases: &[Vec<Complex64>; 3], u: &mut Vars) {
    for c in 0..3 {
        for (o, p) in u[c].iter_mut().zip(&phases[c]) {
            *o *= p;
        }
    }
}

fn all_finite(u: &Vars) -> bool {
    u.iter()
        .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
}

const KINDS: [PropagatorKind; 3] = [
    PropagatorKind::Schrodinger,
    PropagatorKind::WavePlus,
    PropagatorKind::WaveMinus,
];

/// Stage buffers reused across steps.
#[derive(Debug, Clone)]
struct Work {
    k: [Vars; 4],
    stage: Vars,
    acc: Vars,
    chi: Vec<Complex64>,
    scratch: KernelScratch,
}

impl Work {
    fn new(n: usize) -> Self {
        Self {
            k: [zeros(n), zeros(n), zeros(n), zeros(n)],
            stage: zeros(n),
            acc: zeros(n),
            chi: vec![Complex64::new(0.0, 0.0); n],
            scratch: KernelScratch::new(n),
        }
    }
}

/// Precomputed operators and workspace for one grid, geometry and
/// configuration.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    geometry: Geometry,
    config: SimConfig,
    xi_sq: Vec<f64>,
    xi_abs: Vec<f64>,
    inv_laplacian: Vec<f64>,
    half: [Vec<Complex64>; 3],
    full: [Vec<Complex64>; 3],
    kernel: BracketKernel,
    work: RefCell<Work>,
}

impl Stepper {
    pub fn new(grid: Grid, geometry: Geometry, config: &SimConfig) -> Result<Self> {
        config.validate()?;
        if grid.dimension() != geometry.dimension() {
            return Err(Error::Dimension {
                op: "Stepper::new",
                needed: geometry.dimension(),
                found: grid.dimension(),
            });
        }
        let xi_sq = grid.xi_sq_table();
        let xi_abs = xi_sq.iter().map(|x| x.sqrt()).collect();
        let inv_laplacian = xi_sq
            .iter()
            .map(|&x| if x == 0.0 { 0.0 } else { -1.0 / x })
            .collect();
        let h = config.dt;
        let half = KINDS.map(|k| k.phases(&grid, 0.5 * h));
        let full = KINDS.map(|k| k.phases(&grid, h));
        let kernel = BracketKernel::new(&grid, geometry, config.dealias);
        Ok(Self {
            grid,
            geometry,
            config: config.clone(),
            xi_sq,
            xi_abs,
            inv_laplacian,
            half,
            full,
            kernel,
            work: RefCell::new(Work::new(grid.len())),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    fn field(&self, values: Vec<Complex64>) -> Field {
        Field::from_values(self.grid, Representation::Spectral, values)
            .expect("buffer length matches grid")
    }

    /// Nonlinear rates of the first-order system into `out`.
    fn nonlinear(
        &self,
        u: &Vars,
        out: &mut Vars,
        chi: &mut [Complex64],
        scratch: &mut KernelScratch,
    ) {
        if !self.config.nonlinearity_enabled {
            for c in out.iter_mut() {
                c.fill(Complex64::new(0.0, 0.0));
            }
            return;
        }
        for ((x, p), m) in chi.iter_mut().zip(&u[1]).zip(&u[2]) {
            *x = (p + m) * 0.5;
        }
        self.kernel.brackets(&u[0], chi, scratch);
        let (c, w) = scratch.result();
        let [dphi, dplus, dminus] = out;
        for i in 0..c.len() {
            dphi[i] = c[i] * self.inv_laplacian[i];
            let bw = w[i] * self.xi_abs[i];
            dplus[i] = -bw;
            dminus[i] = bw;
        }
    }

    fn strang(&self, u: &mut Vars, work: &mut Work) {
        let h = self.config.dt;
        phase_in_place(&self.half, u);
        if self.config.nonlinearity_enabled {
            let Work {
                k,
                stage,
                chi,
                scratch,
                ..
            } = work;
            let [k1, k2, ..] = k;
            // explicit midpoint on the nonlinear subflow
            self.nonlinear(u, k1, chi, scratch);
            set_axpy(stage, u, 0.5 * h, k1);
            self.nonlinear(stage, k2, chi, scratch);
            add_scaled(u, h, k2);
        }
        phase_in_place(&self.half, u);
    }

    fn interaction_rk4(&self, u: &mut Vars, work: &mut Work) {
        let h = self.config.dt;
        let Work {
            k,
            stage,
            acc,
            chi,
            scratch,
        } = work;
        let [k1, k2, k3, k4] = k;
        self.nonlinear(u, k1, chi, scratch);
        // k2 = N(E(h/2)(u + h/2 k1))
        set_axpy(acc, u, 0.5 * h, k1);
        set_phased(stage, &self.half, acc);
        self.nonlinear(stage, k2, chi, scratch);
        // k3 = N(E(h/2)u + h/2 k2)
        set_phased(acc, &self.half, u);
        set_axpy(stage, acc, 0.5 * h, k2);
        self.nonlinear(stage, k3, chi, scratch);
        // k4 = N(E(h)u + h E(h/2)k3)
        set_phased(acc, &self.half, k3);
        phase_in_place(&self.full, u);
        set_axpy(stage, u, h, acc);
        self.nonlinear(stage, k4, chi, scratch);
        // E(h)u + h/6 [E(h)k1 + 2E(h/2)(k2 + k3) + k4]
        phase_in_place(&self.full, k1);
        add_scaled(k2, 1.0, k3);
        phase_in_place(&self.half, k2);
        add_scaled(u, h / 6.0, k1);
        add_scaled(u, h / 3.0, k2);
        add_scaled(u, h / 6.0, k4);
    }

    /// Rates of the second-order system on `(φ, χ, χₜ)` into `out`.
    fn second_order_rhs(&self, s: &Vars, out: &mut Vars, scratch: &mut KernelScratch) {
        let enabled = self.config.nonlinearity_enabled;
        if enabled {
            self.kernel.brackets(&s[0], &s[1], scratch);
        }
        let (c, w) = scratch.result();
        let [dphi, dchi, dv] = out;
        for i in 0..s[0].len() {
            let x = self.xi_sq[i];
            dphi[i] = Complex64::new(0.0, -x) * s[0][i];
            dchi[i] = s[2][i];
            dv[i] = -x * s[1][i];
            if enabled {
                dphi[i] += c[i] * self.inv_laplacian[i];
                // (1/i)ΔW = i|ξ|²Ŵ
                dv[i] += Complex64::new(0.0, x) * w[i];
            }
        }
    }

    fn reference_rk4(&self, u: &mut Vars, work: &mut Work) {
        let h = self.config.dt;
        let Work {
            k,
            stage,
            acc,
            scratch,
            ..
        } = work;
        let [k1, k2, k3, k4] = k;
        self.to_second_order(u, acc);
        self.second_order_rhs(acc, k1, scratch);
        set_axpy(stage, acc, 0.5 * h, k1);
        self.second_order_rhs(stage, k2, scratch);
        set_axpy(stage, acc, 0.5 * h, k2);
        self.second_order_rhs(stage, k3, scratch);
        set_axpy(stage, acc, h, k3);
        self.second_order_rhs(stage, k4, scratch);
        combine_rk4(acc, h, k1, k2, k3, k4);
        self.to_first_order(acc, u);
    }

    fn to_second_order(&self, u: &Vars, s: &mut Vars) {
        for i in 0..u[0].len() {
            s[0][i] = u[0][i];
            s[1][i] = (u[1][i] + u[2][i]) * 0.5;
            s[2][i] = (u[1][i] - u[2][i]) * Complex64::new(0.0, -0.5) * self.xi_abs[i];
        }
    }

    fn to_first_order(&self, s: &Vars, u: &mut Vars) {
        for i in 0..s[0].len() {
            let b = self.xi_abs[i];
            let inv = if b == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                s[2][i] / b
            };
            u[0][i] = s[0][i];
            u[1][i] = s[1][i] + Complex64::i() * inv;
            u[2][i] = s[1][i] - Complex64::i() * inv;
        }
    }

    fn check(&self, state: &State) -> Result<()> {
        if *state.grid() != self.grid
            || *state.chi_plus.grid() != self.grid
            || *state.chi_minus.grid() != self.grid
        {
            return Err(Error::GridMismatch);
        }
        if state.geometry != self.geometry {
            return Err(Error::InvalidArgument(
                "state geometry differs from stepper".into(),
            ));
        }
        Ok(())
    }

    /// Advances `state` by one step in place. Non-finite output is reported
    /// as [`Error::BlowUp`] with `step = 1`; the state is then left holding
    /// the non-finite values.
    pub fn advance(&self, state: &mut State) -> Result<()> {
        self.check(state)?;
        let take = |f: &mut Field| {
            std::mem::replace(f, Field::zeros(self.grid, Representation::Spectral))
                .into_spectral()
                .into_values()
        };
        let mut u: Vars = [
            take(&mut state.phi),
            take(&mut state.chi_plus),
            take(&mut state.chi_minus),
        ];
        {
            let mut work = self.work.borrow_mut();
            match self.config.integrator {
                Integrator::Strang => self.strang(&mut u, &mut work),
                Integrator::InteractionRk4 => self.interaction_rk4(&mut u, &mut work),
                Integrator::ReferenceRk4SecondOrder => self.reference_rk4(&mut u, &mut work),
            }
        }
        state.t += self.config.dt;
        let finite = all_finite(&u);
        let [p, a, b] = u;
        state.phi = self.field(p);
        state.chi_plus = self.field(a);
        state.chi_minus = self.field(b);
        if !finite {
            return Err(Error::BlowUp {
                step: 1,
                t: state.t,
            });
        }
        Ok(())
    }

    /// One step of the configured integrator.
    pub fn step(&self, state: &State) -> Result<State> {
        let mut next = state.clone();
        self.advance(&mut next)?;
        Ok(next)
    }

    /// `(∂ₜφ, ∂ₜχ₊, ∂ₜχ₋)` at `state`, spectral.
    pub fn rates(&self, state: &State) -> Result<(Field, Field, Field)> {
        self.check(state)?;
        let [p, a, b] = state.spectral_parts();
        let u: Vars = [p.into_values(), a.into_values(), b.into_values()];
        let mut out = zeros(self.grid.len());
        let mut work = self.work.borrow_mut();
        let Work { chi, scratch, .. } = &mut *work;
        self.nonlinear(&u, &mut out, chi, scratch);
        for (c, kind) in KINDS.iter().enumerate() {
            for i in 0..u[c].len() {
                out[c][i] += u[c][i] * kind.rate(self.xi_sq[i]);
            }
        }
        let [a, b, c] = out;
        Ok((self.field(a), self.field(b), self.field(c)))
    }
}

/// `u += h/6 (k1 + 2k2 + 2k3 + k4)`.
fn combine_rk4(u: &mut Vars, h: f64, k1: &Vars, k2: &Vars, k3: &Vars, k4: &Vars) {
    for c in 0..3 {
        for i in 0..u[c].len() {
            u[c][i] += (k1[c][i] + (k2[c][i] + k3[c][i]) * 2.0 + k4[c][i]) * (h / 6.0);
        }
    }
}

/// `(∂ₜφ, ∂ₜχ₊, ∂ₜχ₋)` of the first-order system.
pub fn rhs_first_order(state: &State, config: &SimConfig) -> Result<(Field, Field, Field)> {
    Stepper::new(*state.grid(), state.geometry, config)?.rates(state)
}

/// Advances `state` by one `config.dt`.
pub fn step(state: &State, config: &SimConfig) -> Result<State> {
    Stepper::new(*state.grid(), state.geometry, config)?.step(state)
}

/// Receives an immutable view of the state every `checkpoint_stride` steps.
pub trait Observer {
    fn observe(&mut self, step: u64, state: &State) -> Result<()>;
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: State,
    pub steps: u64,
    pub observations: u64,
}

/// Steps from `state.t` to `config.t_end`, calling every observer at step 0
/// and then every `checkpoint_stride` steps.
pub fn evolve(
    state: State,
    config: &SimConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory> {
    evolve_from(state, 0, config, observers)
}

/// As [`evolve`], numbering steps from `first_step` (used when resuming).
pub fn evolve_from(
    state: State,
    first_step: u64,
    config: &SimConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory> {
    let stepper = Stepper::new(*state.grid(), state.geometry, config)?;
    let steps = config.steps_from(state.t);
    let stride = config.checkpoint_stride;
    let mut current = state;
    current.phi = current.phi.into_spectral();
    current.chi_plus = current.chi_plus.into_spectral();
    current.chi_minus = current.chi_minus.into_spectral();
    let mut observations = 0;
    for k in 0..=steps {
        if k % stride == 0 {
            for obs in observers.iter_mut() {
                obs.observe(first_step + k, &current)?;
            }
            observations += 1;
        }
        if k == steps {
            break;
        }
        stepper.advance(&mut current).map_err(|e| match e {
            Error::BlowUp { t, .. } => Error::BlowUp {
                step: first_step + k + 1,
                t,
            },
            other => other,
        })?;
    }
    Ok(Trajectory {
        final_state: current,
        steps,
        observations,
    })
}
