//! Parallel-tempering Monte Carlo.
//!
//! An [`Ensemble`] holds one replica per temperature slot. Replicas advance
//! in parallel for `exchange_every` sweeps, then neighbouring slots attempt
//! configuration swaps (even pairs and odd pairs on alternate passes). Each
//! slot owns its random stream, so results do not depend on the number of
//! worker threads.

mod checkpoint;
mod system;

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use system::{ConstrainedSystem, ReferenceSystem, SpinSums, SpinSystem, SPIN_OFFSETS};

use crate::eem::EffectiveParams;
use crate::error::{Error, Result};
use crate::rbim::BondDisorder;
use crate::reference::{nishimori_beta, SquareRbim};
use crate::rng::{self, RngState};

const TAG_DISORDER: u64 = 0x4449_534F;
const TAG_REPLICA: u64 = 0x5245_504C;
const TAG_EXCHANGE: u64 = 0x4558_4348;

/// Inverse temperatures, one per slot, strictly decreasing (temperatures
/// strictly increasing).
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    betas: Vec<f64>,
}

impl Ladder {
    /// `n` temperatures evenly spaced in `[t_min, t_max]`.
    pub fn uniform(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if n == 0 || !(t_min > 0.0) || t_max < t_min || (n > 1 && t_max == t_min) {
            return Err(Error::Parameter(format!(
                "ladder needs 0 < t_min < t_max and n >= 1 (got {t_min}, {t_max}, {n})"
            )));
        }
        let temps = (0..n).map(|i| {
            if n == 1 {
                t_min
            } else {
                t_min + (t_max - t_min) * i as f64 / (n - 1) as f64
            }
        });
        Self::from_betas(temps.map(|t| 1.0 / t).collect())
    }

    pub fn from_betas(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty()
            || betas.iter().any(|b| !b.is_finite() || *b < 0.0)
            || betas.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::Parameter(
                "inverse temperatures must be finite, non-negative and strictly decreasing".into(),
            ));
        }
        Ok(Ladder { betas })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.betas.iter().map(|b| 1.0 / b).collect()
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunProtocol {
    /// Equilibration is capped at `2^b` sweeps.
    pub b: u32,
    pub test_interval: u64,
    pub measure_sweeps: u64,
    pub measure_stride: u64,
    pub exchange_every: u64,
    pub samples: usize,
    pub checkpoint_every: u64,
}

impl Default for RunProtocol {
    fn default() -> Self {
        RunProtocol {
            b: 21,
            test_interval: 10_000,
            measure_sweeps: 200_000,
            measure_stride: 5,
            exchange_every: 10,
            samples: 1,
            checkpoint_every: 100_000,
        }
    }
}

/// Number of energy blocks per test interval.
const BLOCKS_PER_TEST: u64 = 40;

impl RunProtocol {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parameter(format!("protocol: {m}")));
        if self.b == 0 || self.b > 40 {
            return bad("b must lie in 1..=40");
        }
        if self.test_interval == 0
            || self.measure_sweeps == 0
            || self.measure_stride == 0
            || self.exchange_every == 0
            || self.samples == 0
            || self.checkpoint_every == 0
        {
            return bad("all fields must be positive");
        }
        if !self.measure_sweeps.is_multiple_of(self.measure_stride) {
            return bad("measure_stride must divide measure_sweeps");
        }
        if !self.test_interval.is_multiple_of(BLOCKS_PER_TEST) {
            return bad("test_interval must be a multiple of 40");
        }
        if !self.test_interval.is_multiple_of(self.exchange_every)
            || !self.checkpoint_every.is_multiple_of(self.exchange_every)
            || !self.measure_sweeps.is_multiple_of(self.exchange_every)
        {
            return bad("exchange_every must divide test_interval, measure_sweeps and checkpoint_every");
        }
        Ok(())
    }

    pub fn max_equilibration_sweeps(&self) -> u64 {
        1u64 << self.b
    }

    pub fn snapshots(&self) -> u64 {
        self.measure_sweeps / self.measure_stride
    }

    fn block_size(&self) -> u64 {
        self.test_interval / BLOCKS_PER_TEST
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Equilibrating,
    Measuring,
    Done,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EquilibrationReport {
    pub sweeps: u64,
    /// Outcome of each test, in order.
    pub history: Vec<bool>,
    /// Whether two consecutive tests passed before the cap.
    pub converged: bool,
}

/// Thermal averages at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalMeans {
    pub beta: f64,
    pub chi0: f64,
    pub chik: f64,
    pub energy: f64,
    pub snapshots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Accumulator {
    n: u64,
    chi0: f64,
    chik: f64,
    energy: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Slot<St> {
    state: St,
    energy: f64,
    label: usize,
    rng: ChaCha8Rng,
    block_sum: f64,
    block_len: u64,
    block_means: Vec<f64>,
    acc: Accumulator,
    accepted: u64,
    proposed: u64,
}

impl<St> Slot<St> {
    fn record_energy(&mut self, block: u64) {
        self.block_sum += self.energy;
        self.block_len += 1;
        if self.block_len == block {
            self.block_means.push(self.block_sum / block as f64);
            self.block_sum = 0.0;
            self.block_len = 0;
        }
    }

    /// Compares the means of blocks `[n/4, n/2)` and `[n/2, n)`.
    fn bins_agree(&self) -> bool {
        let n = self.block_means.len();
        let (a, b) = (&self.block_means[n / 4..n / 2], &self.block_means[n / 2..]);
        if a.len() < 2 || b.len() < 2 {
            return false;
        }
        let stats = |x: &[f64]| {
            let m = x.iter().sum::<f64>() / x.len() as f64;
            let v = x.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
            (m, v / x.len() as f64)
        };
        let (ma, va) = stats(a);
        let (mb, vb) = stats(b);
        (ma - mb).abs() <= 2.0 * (va + vb).sqrt()
    }
}

/// Replicas of one quenched disorder sample at a ladder of temperatures.
#[derive(Debug, Clone)]
pub struct Ensemble<S: SpinSystem> {
    system: S,
    betas: Vec<f64>,
    slots: Vec<Slot<S::State>>,
    exchange_rng: ChaCha8Rng,
    exchange_odd: bool,
    exchange_attempts: Vec<u64>,
    exchange_accepts: Vec<u64>,
    phase: Phase,
    sweeps: u64,
    measure_sweeps: u64,
    history: Vec<bool>,
}

impl<S: SpinSystem> Ensemble<S> {
    /// Random initial replicas; slot `i` draws from stream `i` of
    /// `(master_seed, tags)`.
    pub fn new(system: S, ladder: &Ladder, master_seed: u64, tags: &[u64]) -> Self {
        let mut rtags = vec![TAG_REPLICA];
        rtags.extend_from_slice(tags);
        let mut xtags = vec![TAG_EXCHANGE];
        xtags.extend_from_slice(tags);
        let slots = (0..ladder.len())
            .map(|i| {
                let mut rng = rng::stream(master_seed, &rtags, i as u64);
                let state = system.random_state(&mut rng);
                let energy = system.energy(&state);
                Slot {
                    state,
                    energy,
                    label: i,
                    rng,
                    block_sum: 0.0,
                    block_len: 0,
                    block_means: Vec::new(),
                    acc: Accumulator::default(),
                    accepted: 0,
                    proposed: 0,
                }
            })
            .collect();
        let pairs = ladder.len().saturating_sub(1);
        Ensemble {
            system,
            betas: ladder.betas().to_vec(),
            slots,
            exchange_rng: rng::stream(master_seed, &xtags, 0),
            exchange_odd: false,
            exchange_attempts: vec![0; pairs],
            exchange_accepts: vec![0; pairs],
            phase: Phase::Equilibrating,
            sweeps: 0,
            measure_sweeps: 0,
            history: Vec::new(),
        }
    }

    pub fn system(&self) -> &S {
        &self.system
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Sweeps done so far (equilibration plus measurement).
    pub fn sweeps(&self) -> u64 {
        self.sweeps + self.measure_sweeps
    }

    pub fn state(&self, slot: usize) -> &S::State {
        &self.slots[slot].state
    }

    pub fn energies(&self) -> Vec<f64> {
        self.slots.iter().map(|s| s.energy).collect()
    }

    /// Replica label held by each slot; always a permutation.
    pub fn labels(&self) -> Vec<usize> {
        self.slots.iter().map(|s| s.label).collect()
    }

    /// Metropolis acceptance rate per slot.
    pub fn acceptance_rates(&self) -> Vec<f64> {
        self.slots
            .iter()
            .map(|s| s.accepted as f64 / s.proposed.max(1) as f64)
            .collect()
    }

    /// Swap acceptance rate per adjacent pair.
    pub fn exchange_rates(&self) -> Vec<f64> {
        self.exchange_attempts
            .iter()
            .zip(&self.exchange_accepts)
            .map(|(&n, &a)| a as f64 / n.max(1) as f64)
            .collect()
    }

    /// Plain sweeps of every replica, without recording.
    pub fn sweep_all(&mut self, sweeps: u64) {
        self.run_chunk(sweeps, None);
    }

    fn run_chunk(&mut self, len: u64, mode: Option<(Phase, u64, u64)>) {
        let system = &self.system;
        let betas = &self.betas;
        let start = self.measure_sweeps;
        self.slots.par_iter_mut().enumerate().for_each(|(i, slot)| {
            let beta = betas[i];
            for t in 0..len {
                slot.accepted += system.sweep(&mut slot.state, beta, &mut slot.energy, &mut slot.rng);
                slot.proposed += system.moves_per_sweep() as u64;
                match mode {
                    Some((Phase::Equilibrating, block, _)) => slot.record_energy(block),
                    Some((Phase::Measuring, _, stride)) if (start + t + 1).is_multiple_of(stride) => {
                        let l = system.linear_size();
                        let sums = system.spin_sums(&slot.state);
                        slot.acc.n += 1;
                        slot.acc.chi0 += sums.chi0(l);
                        slot.acc.chik += sums.chik(l);
                        slot.acc.energy += slot.energy;
                    }
                    _ => {}
                }
            }
        });
    }

    /// One pass of swap attempts over even or odd neighbouring pairs.
    pub fn exchange(&mut self) {
        let first = self.exchange_odd as usize;
        self.exchange_odd = !self.exchange_odd;
        let mut i = first;
        while i + 1 < self.slots.len() {
            let delta = (self.betas[i] - self.betas[i + 1]) * (self.slots[i].energy - self.slots[i + 1].energy);
            self.exchange_attempts[i] += 1;
            if delta >= 0.0 || self.exchange_rng.gen::<f64>() < delta.exp() {
                self.exchange_accepts[i] += 1;
                let (a, b) = self.slots.split_at_mut(i + 1);
                let (x, y) = (&mut a[i], &mut b[0]);
                std::mem::swap(&mut x.state, &mut y.state);
                std::mem::swap(&mut x.energy, &mut y.energy);
                std::mem::swap(&mut x.label, &mut y.label);
            }
            i += 2;
        }
    }

    /// Advances by one exchange period (shorter if the equilibration cap
    /// falls inside it) and updates the phase. Returns the new phase.
    pub fn step(&mut self, protocol: &RunProtocol) -> Phase {
        match self.phase {
            Phase::Equilibrating => {
                let cap = protocol.max_equilibration_sweeps();
                let len = protocol.exchange_every.min(cap - self.sweeps);
                self.run_chunk(len, Some((Phase::Equilibrating, protocol.block_size(), 0)));
                self.sweeps += len;
                self.exchange();
                if self.sweeps.is_multiple_of(protocol.test_interval) {
                    let pass = self.slots.iter().all(|s| s.bins_agree());
                    self.history.push(pass);
                    if self.history.ends_with(&[true, true]) {
                        self.phase = Phase::Measuring;
                    }
                }
                if self.sweeps >= cap {
                    self.phase = Phase::Measuring;
                }
            }
            Phase::Measuring => {
                let len = protocol.exchange_every;
                self.run_chunk(len, Some((Phase::Measuring, 0, protocol.measure_stride)));
                self.measure_sweeps += len;
                self.exchange();
                if self.measure_sweeps >= protocol.measure_sweeps {
                    self.phase = Phase::Done;
                }
            }
            Phase::Done => {}
        }
        self.phase
    }

    pub fn equilibration_report(&self) -> EquilibrationReport {
        EquilibrationReport {
            sweeps: self.sweeps,
            history: self.history.clone(),
            converged: self.history.ends_with(&[true, true]),
        }
    }

    /// Runs until two consecutive tests pass or the cap is reached.
    pub fn equilibrate(&mut self, protocol: &RunProtocol) -> EquilibrationReport {
        while self.phase == Phase::Equilibrating {
            self.step(protocol);
        }
        self.equilibration_report()
    }

    /// Runs the measurement phase and returns thermal means per slot.
    pub fn measure(&mut self, protocol: &RunProtocol) -> Vec<ThermalMeans> {
        self.equilibrate(protocol);
        while self.phase == Phase::Measuring {
            self.step(protocol);
        }
        self.thermal_means()
    }

    pub fn thermal_means(&self) -> Vec<ThermalMeans> {
        self.slots
            .iter()
            .zip(&self.betas)
            .map(|(s, &beta)| {
                let n = s.acc.n.max(1) as f64;
                ThermalMeans {
                    beta,
                    chi0: s.acc.chi0 / n,
                    chik: s.acc.chik / n,
                    energy: s.acc.energy / n,
                    snapshots: s.acc.n,
                }
            })
            .collect()
    }
}

/// Which Hamiltonian a run simulates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    /// Constrained model with the given single and pair rates.
    Constrained { p1: f64, p2: f64 },
    /// Square-lattice ±J model with antiferromagnetic bond rate `p`.
    Reference { p: f64 },
}

impl ModelSpec {
    pub fn label(&self) -> &'static str {
        match self {
            ModelSpec::Constrained { .. } => "constrained",
            ModelSpec::Reference { .. } => "reference",
        }
    }

    /// Inverse temperature where Boltzmann weights equal error likelihoods.
    pub fn nishimori_beta(&self) -> Result<f64> {
        match *self {
            ModelSpec::Constrained { p1, p2 } => Ok(EffectiveParams::new(p1, p2)?.beta_n),
            ModelSpec::Reference { p } => Ok(nishimori_beta(p)),
        }
    }

    /// Exact disorder-averaged energy per cell (per site for the reference
    /// model) at the Nishimori point. Gauge symmetry gives
    /// `[<eta s s'>] = 1 - 2 pbar` for every bond whose coupling matches its
    /// log-odds there.
    pub fn nishimori_energy(&self) -> Result<f64> {
        match *self {
            ModelSpec::Constrained { p1, p2 } => {
                let params = EffectiveParams::new(p1, p2)?;
                let (k2, k3) = BondDisorder::couplings(&params);
                // Two l1 bonds per cell; each diagonal contributes
                // `k (s s' + s'' s''') = 2 k u`.
                Ok(-2.0
                    * ((1.0 - 2.0 * params.pbar1)
                        + k2 * (1.0 - 2.0 * params.pbar2)
                        + k3 * (1.0 - 2.0 * params.pbar3)))
            }
            ModelSpec::Reference { p } => Ok(-2.0 * (1.0 - 2.0 * p)),
        }
    }

    fn tags(&self, l: usize, sample: usize) -> Vec<u64> {
        let (kind, a, b) = match *self {
            ModelSpec::Constrained { p1, p2 } => (1, p1, p2),
            ModelSpec::Reference { p } => (2, p, 0.0),
        };
        vec![kind, a.to_bits(), b.to_bits(), l as u64, sample as u64]
    }
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub model: ModelSpec,
    pub l: usize,
    pub ladder: Ladder,
    pub protocol: RunProtocol,
    pub master_seed: u64,
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        if self.l < 2 {
            return Err(Error::Parameter(format!("lattice size {} below 2", self.l)));
        }
        match self.model {
            ModelSpec::Constrained { p1, p2 } => {
                EffectiveParams::new(p1, p2)?;
            }
            ModelSpec::Reference { p } => {
                if !(p > 0.0 && p < 0.5) {
                    return Err(Error::Parameter(format!("p = {p} must lie in (0, 1/2)")));
                }
            }
        }
        Ok(())
    }

    /// Quenched bonds of the constrained model for one sample.
    pub fn constrained_system(&self, sample: usize) -> Result<ConstrainedSystem> {
        let ModelSpec::Constrained { p1, p2 } = self.model else {
            return Err(Error::Parameter("not a constrained-model run".into()));
        };
        let params = EffectiveParams::new(p1, p2)?;
        let mut rng = self.disorder_rng(sample);
        Ok(ConstrainedSystem::new(BondDisorder::sample_with(self.l, self.l, &params, &mut rng)))
    }

    pub fn reference_system(&self, sample: usize) -> Result<ReferenceSystem> {
        let ModelSpec::Reference { p } = self.model else {
            return Err(Error::Parameter("not a reference-model run".into()));
        };
        let mut rng = self.disorder_rng(sample);
        Ok(ReferenceSystem::new(SquareRbim::sample_with(self.l, p, &mut rng)?))
    }

    fn disorder_rng(&self, sample: usize) -> ChaCha8Rng {
        let mut tags = vec![TAG_DISORDER];
        tags.extend(self.model.tags(self.l, sample));
        rng::stream(self.master_seed, &tags, 0)
    }
}

/// Result of one disorder sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub sample: usize,
    pub equilibration: EquilibrationReport,
    pub means: Vec<ThermalMeans>,
    pub exchange_rates: Vec<f64>,
}

/// Hooks for tests and long runs.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub checkpoint: Option<PathBuf>,
    /// Continue from an existing checkpoint when present.
    pub resume: bool,
    /// Stop right after writing this many checkpoints (simulated interruption).
    pub halt_after_checkpoints: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Completed(Vec<SampleResult>),
    Halted { completed: usize },
}

/// Runs every disorder sample of `spec`: sample bonds, equilibrate, measure.
pub fn run_disorder_ensemble(spec: &RunSpec, options: &RunOptions) -> Result<RunOutcome> {
    spec.validate()?;
    match spec.model {
        ModelSpec::Constrained { .. } => run_generic(spec, options, |s| spec.constrained_system(s)),
        ModelSpec::Reference { .. } => run_generic(spec, options, |s| spec.reference_system(s)),
    }
}

fn run_generic<S: SpinSystem>(
    spec: &RunSpec,
    options: &RunOptions,
    build: impl Fn(usize) -> Result<S>,
) -> Result<RunOutcome> {
    let protocol = &spec.protocol;
    let mut done: Vec<SampleResult> = Vec::new();
    let mut resumed: Option<Ensemble<S>> = None;
    if let (true, Some(path)) = (options.resume, &options.checkpoint) {
        if path.exists() {
            let cp = Checkpoint::read(path)?;
            cp.check_spec(spec)?;
            done = cp.completed;
            if let Some(partial) = cp.partial {
                let system = build(done.len())?;
                resumed = Some(partial.restore(system, &spec.ladder)?);
            }
        }
    }

    let mut written = 0usize;
    let mut save = |done: &[SampleResult], ens: Option<&Ensemble<S>>| -> Result<bool> {
        if let Some(path) = &options.checkpoint {
            Checkpoint::write(path, spec, done, ens)?;
            written += 1;
            if options.halt_after_checkpoints == Some(written) {
                return Ok(true);
            }
        }
        Ok(false)
    };

    for sample in done.len()..protocol.samples {
        let mut ens = match resumed.take() {
            Some(e) => e,
            None => {
                let tags = spec.model.tags(spec.l, sample);
                Ensemble::new(build(sample)?, &spec.ladder, spec.master_seed, &tags)
            }
        };
        while ens.phase() != Phase::Done {
            ens.step(protocol);
            if ens.phase() != Phase::Done && ens.sweeps() % protocol.checkpoint_every == 0 && save(&done, Some(&ens))? {
                return Ok(RunOutcome::Halted { completed: done.len() });
            }
        }
        done.push(SampleResult {
            sample,
            equilibration: ens.equilibration_report(),
            means: ens.thermal_means(),
            exchange_rates: ens.exchange_rates(),
        });
        if save(&done, None)? {
            return Ok(RunOutcome::Halted { completed: done.len() });
        }
    }
    Ok(RunOutcome::Completed(done))
}

pub(crate) use checkpoint::PartialEnsemble;

impl<S: SpinSystem> Ensemble<S> {
    pub(crate) fn snapshot(&self) -> PartialEnsemble {
        PartialEnsemble {
            phase: self.phase,
            sweeps: self.sweeps,
            measure_sweeps: self.measure_sweeps,
            history: self.history.clone(),
            exchange_odd: self.exchange_odd,
            exchange_rng: RngState::capture(&self.exchange_rng),
            exchange_attempts: self.exchange_attempts.clone(),
            exchange_accepts: self.exchange_accepts.clone(),
            slots: self
                .slots
                .iter()
                .map(|s| checkpoint::SlotRecord {
                    state: self.system.encode_state(&s.state),
                    energy: s.energy,
                    label: s.label,
                    rng: RngState::capture(&s.rng),
                    block_sum: s.block_sum,
                    block_len: s.block_len,
                    block_means: s.block_means.clone(),
                    acc: s.acc,
                    accepted: s.accepted,
                    proposed: s.proposed,
                })
                .collect(),
        }
    }
}

impl PartialEnsemble {
    pub(crate) fn restore<S: SpinSystem>(self, system: S, ladder: &Ladder) -> Result<Ensemble<S>> {
        if self.slots.len() != ladder.len() {
            return Err(Error::Dimension {
                expected: ladder.len(),
                found: self.slots.len(),
            });
        }
        let slots = self
            .slots
            .into_iter()
            .map(|r| {
                Ok(Slot {
                    state: system.decode_state(&r.state)?,
                    energy: r.energy,
                    label: r.label,
                    rng: r.rng.restore(),
                    block_sum: r.block_sum,
                    block_len: r.block_len,
                    block_means: r.block_means,
                    acc: r.acc,
                    accepted: r.accepted,
                    proposed: r.proposed,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            system,
            betas: ladder.betas().to_vec(),
            slots,
            exchange_rng: self.exchange_rng.restore(),
            exchange_odd: self.exchange_odd,
            exchange_attempts: self.exchange_attempts,
            exchange_accepts: self.exchange_accepts,
            phase: self.phase,
            sweeps: self.sweeps,
            measure_sweeps: self.measure_sweeps,
            history: self.history,
        })
    }
}
