use std::path::Path;

use crate::bench::{average_viscosity, field_extrema, front_location, BenchmarkSpec};
use crate::error::{Error, Result};
use crate::evolve::Evolver;
use crate::filter::{artificial_viscosity, helmholtz_filter, FilterConfig, IndicatorField};
use crate::linalg::SolverConfig;
use crate::mesh::{Axis, BoundarySpec, FaceField, Grid, VectorField};
use crate::relax::{relax_and_update, RelaxParams};
use crate::scalar::{lit, Real};
use crate::thermo::{Constants, State};

use super::config::RunConfig;
use super::output::{write_diagnostics, write_snapshot, DiagnosticRecord, OutputDir};

/// Iteration counts of one evolve-filter-relax step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub pressure_iterations: usize,
    pub enthalpy_iterations: usize,
    pub filter_iterations: usize,
}

/// A run in progress: the current state and everything needed to advance it.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    pub config: RunConfig,
    pub spec: BenchmarkSpec<T>,
    pub grid: Grid<T>,
    pub constants: Constants<T>,
    pub state: State<T>,
    /// End-of-step mass flux of the current time level.
    pub flux: FaceField<T>,
    /// Indicator and filter viscosity of the last step.
    pub indicator: IndicatorField<T>,
    pub mu: Vec<T>,
    pub step: usize,
    pub last_stats: StepStats,
    evolver: Evolver<T>,
    filter: FilterConfig<T>,
    relax: RelaxParams<T>,
    solver: SolverConfig<T>,
    dt: T,
}

impl<T: Real> Simulation<T> {
    /// Sets up the initial condition of the configured benchmark.
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let spec = BenchmarkSpec::<T>::of(config.benchmark);
        let spec = BenchmarkSpec { t_final: lit(config.t_final), ..spec };
        let c = &config.constants;
        let constants = Constants::new(lit(c.r), lit(c.cv), lit(c.g), lit(c.p0))?;
        let grid = spec.build_grid(lit(config.h))?;
        let state = spec.initial_state(&grid, &constants)?;
        Self::from_state(config, spec, grid, constants, state)
    }

    /// Starts from an explicit state on the benchmark grid.
    pub fn from_state(
        config: RunConfig,
        spec: BenchmarkSpec<T>,
        grid: Grid<T>,
        constants: Constants<T>,
        state: State<T>,
    ) -> Result<Self> {
        grid.check_len("initial state", state.n_cells())?;
        let dt: T = lit(config.dt);
        let solver = SolverConfig::with_tol(lit(config.solver_tol));
        let reference = spec.unperturbed().initial_state(&grid, &constants)?;
        let evolver = Evolver::new(grid, constants, dt, config.convection_scheme, solver)?
            .with_reference(&reference)?;
        let f = &config.filter;
        let filter = FilterConfig { kind: f.kind, alpha: lit(f.alpha), eps_grad: lit(f.eps_grad), deconv_alpha: lit(f.deconv_alpha) };
        let relax = RelaxParams::new(lit(config.relax.chi), lit(config.relax.xi))?;
        let indicator = filter.indicator(&state.u, &grid, &solver)?;
        let mu = artificial_viscosity(&state.rho, &indicator, filter.alpha, dt)?;
        Ok(Self {
            config,
            spec,
            grid,
            constants,
            flux: FaceField::zeros(&grid),
            state,
            indicator,
            mu,
            step: 0,
            last_stats: StepStats::default(),
            evolver,
            filter,
            relax,
            solver,
            dt,
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.config.dt
    }

    pub fn n_steps(&self) -> usize {
        self.config.n_steps()
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.n_steps()
    }

    /// One evolve-filter-relax step. Failures are tagged with the step
    /// index and the time being advanced to.
    pub fn advance(&mut self) -> Result<StepStats> {
        let next = self.step + 1;
        let stats = self.efr_step().map_err(|e| Error::Step {
            step: next,
            time: next as f64 * self.config.dt,
            source: Box::new(e),
        })?;
        self.step = next;
        self.last_stats = stats;
        Ok(stats)
    }

    fn efr_step(&mut self) -> Result<StepStats> {
        let grid = &self.grid;
        let inter = self.evolver.step(&self.state, &self.flux)?;
        let indicator = self.filter.indicator(&inter.v, grid, &self.solver)?;
        let mu = artificial_viscosity(&inter.rho, &indicator, self.filter.alpha, self.dt)?;
        let filt = |phi: &[T], bc: &BoundarySpec<T>| helmholtz_filter(phi, &mu, &inter.rho, self.dt, grid, bc, &self.solver);
        let (u_bar, iu) = filt(&inter.v.x, &BoundarySpec::free_slip(Axis::X))?;
        let (w_bar, iw) = filt(&inter.v.z, &BoundarySpec::free_slip(Axis::Z))?;
        let z = self.evolver.heights();
        let s: Vec<T> = inter.l.iter().zip(z).map(|(&l, &z)| l + self.constants.g * z).collect();
        let (s_bar, is) = filt(&s, &BoundarySpec::zero_gradient())?;
        let l_bar: Vec<T> = if is == 0 && mu.iter().all(|&m| m == T::zero()) {
            inter.l.clone()
        } else {
            s_bar.iter().zip(z).map(|(&s, &z)| s - self.constants.g * z).collect()
        };
        let v_bar = VectorField { x: u_bar, z: w_bar };
        let state = relax_and_update(&inter, &v_bar, &l_bar, &self.state, &self.relax, &self.constants, grid)?;
        let stats = StepStats {
            pressure_iterations: inter.pressure_iterations,
            enthalpy_iterations: inter.enthalpy_iterations,
            filter_iterations: iu + iw + is,
        };
        self.state = state;
        self.flux = inter.face_flux;
        self.indicator = indicator;
        self.mu = mu;
        Ok(stats)
    }

    pub fn theta_prime(&self) -> Result<Vec<T>> {
        self.state.theta_prime(&self.constants, self.spec.theta0)
    }

    pub fn total_mass(&self) -> T {
        let vol = self.grid.cell_volume();
        self.state.rho.iter().map(|&r| r * vol).sum()
    }

    /// Diagnostics of the current time level.
    pub fn diagnostics(&self) -> Result<DiagnosticRecord> {
        let tp = self.theta_prime()?;
        let (tp_min, tp_max) = field_extrema(&tp)?;
        let (w_min, w_max) = field_extrema(&self.state.u.z)?;
        let nx = self.grid.nx;
        let x: Vec<T> = (0..nx).map(|i| self.grid.x_center(i)).collect();
        let front = front_location(&tp[..nx], &x);
        Ok(DiagnosticRecord {
            t: self.time(),
            theta_prime_min: tp_min.as_f64(),
            theta_prime_max: tp_max.as_f64(),
            w_min: w_min.as_f64(),
            w_max: w_max.as_f64(),
            front_location: front.map(Real::as_f64),
            mu_av: average_viscosity(&self.mu, &self.grid)?.as_f64(),
            total_mass: self.total_mass().as_f64(),
            pressure_iterations: self.last_stats.pressure_iterations,
            enthalpy_iterations: self.last_stats.enthalpy_iterations,
            filter_iterations: self.last_stats.filter_iterations,
        })
    }

    pub fn write_snapshot(&self, path: &Path) -> Result<()> {
        write_snapshot(&self.state, &self.theta_prime()?, &self.grid, lit(self.time()), path)
    }
}

/// Result of a complete run.
#[derive(Debug, Clone)]
pub struct RunOutcome<T> {
    pub state: State<T>,
    pub grid: Grid<T>,
    pub diagnostics: Vec<DiagnosticRecord>,
    /// Final indicator field (the one used in the last step).
    pub indicator: IndicatorField<T>,
    pub snapshots: Vec<std::path::PathBuf>,
    pub steps: usize,
}

/// Runs the configured benchmark to `t_final`.
///
/// Diagnostics are recorded at step 0, every `diagnostic_stride` steps and
/// at the last step. With an output directory the manifest is written
/// first, snapshots as they are reached, and the diagnostics table at the
/// end or when the run aborts.
pub fn run_simulation<T: Real>(config: &RunConfig) -> Result<RunOutcome<T>> {
    let out = config.output_dir.as_ref().map(OutputDir::create).transpose()?;
    if let Some(dir) = &out {
        std::fs::write(dir.manifest(), config.to_config_text())?;
    }
    let mut sim = Simulation::<T>::new(config.clone())?;
    let snap_steps: Vec<(usize, f64)> = config.snapshot_times.iter().map(|&t| (config.step_of(t), t)).collect();
    let mut snapshots = Vec::new();
    let mut diagnostics = Vec::new();
    let n = sim.n_steps();

    let mut body = |sim: &mut Simulation<T>| -> Result<()> {
        loop {
            let s = sim.step;
            for &(_, t) in snap_steps.iter().filter(|(k, _)| *k == s) {
                if let Some(dir) = &out {
                    let path = dir.snapshot(t);
                    sim.write_snapshot(&path)?;
                    snapshots.push(path);
                }
            }
            if s.is_multiple_of(config.diagnostic_stride) || s == n {
                diagnostics.push(sim.diagnostics()?);
            }
            if s >= n {
                return Ok(());
            }
            sim.advance()?;
        }
    };
    let result = body(&mut sim);
    if let Some(dir) = &out {
        write_diagnostics(&diagnostics, &dir.diagnostics())?;
    }
    result?;
    Ok(RunOutcome {
        state: sim.state,
        grid: sim.grid,
        diagnostics,
        indicator: sim.indicator,
        snapshots,
        steps: sim.step,
    })
}
