//! Binary checkpoint format.
//!
//! Little-endian. Layout: magic `SQCK`, format version, the run spec, the
//! finished sample results, then an optional in-progress ensemble (phase,
//! counters, per-slot replica bytes, energies, block statistics,
//! accumulators and generator positions). Bonds are not stored; they are
//! regenerated from the master seed.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{
    Accumulator, EquilibrationReport, Ensemble, Ladder, ModelSpec, Phase, RunProtocol, RunSpec,
    SampleResult, SpinSystem, ThermalMeans,
};
use crate::error::{Error, Result};
use crate::rng::RngState;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"SQCK";

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SlotRecord {
    pub state: Vec<u8>,
    pub energy: f64,
    pub label: usize,
    pub rng: RngState,
    pub block_sum: f64,
    pub block_len: u64,
    pub block_means: Vec<f64>,
    pub acc: Accumulator,
    pub accepted: u64,
    pub proposed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PartialEnsemble {
    pub phase: Phase,
    pub sweeps: u64,
    pub measure_sweeps: u64,
    pub history: Vec<bool>,
    pub exchange_odd: bool,
    pub exchange_rng: RngState,
    pub exchange_attempts: Vec<u64>,
    pub exchange_accepts: Vec<u64>,
    pub slots: Vec<SlotRecord>,
}

/// Decoded checkpoint file.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub spec: RunSpec,
    pub completed: Vec<SampleResult>,
    pub(crate) partial: Option<PartialEnsemble>,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u128(&mut self, v: u128) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn len(&mut self, n: usize) {
        self.u64(n as u64);
    }
    fn bytes(&mut self, b: &[u8]) {
        self.len(b.len());
        self.0.extend_from_slice(b);
    }
    fn f64s(&mut self, v: &[f64]) {
        self.len(v.len());
        v.iter().for_each(|&x| self.f64(x));
    }
    fn u64s(&mut self, v: &[u64]) {
        self.len(v.len());
        v.iter().for_each(|&x| self.u64(x));
    }
    fn bools(&mut self, v: &[bool]) {
        self.bytes(&v.iter().map(|&b| b as u8).collect::<Vec<_>>());
    }
    fn rng(&mut self, s: &RngState) {
        self.0.extend_from_slice(&s.seed);
        self.u64(s.stream);
        self.u128(s.word_pos);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Format("checkpoint truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn u128(&mut self) -> Result<u128> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn len(&mut self) -> Result<usize> {
        let n = self.u64()? as usize;
        if n > self.buf.len() {
            return Err(Error::Format(format!("checkpoint length {n} exceeds file")));
        }
        Ok(n)
    }
    fn bytes(&mut self) -> Result<Vec<u8>> {
        let n = self.len()?;
        Ok(self.take(n)?.to_vec())
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len()?;
        (0..n).map(|_| self.f64()).collect()
    }
    fn u64s(&mut self) -> Result<Vec<u64>> {
        let n = self.len()?;
        (0..n).map(|_| self.u64()).collect()
    }
    fn bools(&mut self) -> Result<Vec<bool>> {
        Ok(self.bytes()?.into_iter().map(|b| b != 0).collect())
    }
    fn rng(&mut self) -> Result<RngState> {
        Ok(RngState {
            seed: self.take(32)?.try_into().unwrap(),
            stream: self.u64()?,
            word_pos: self.u128()?,
        })
    }
}

fn write_spec(w: &mut Writer, spec: &RunSpec) {
    match spec.model {
        ModelSpec::Constrained { p1, p2 } => {
            w.u8(1);
            w.f64(p1);
            w.f64(p2);
        }
        ModelSpec::Reference { p } => {
            w.u8(2);
            w.f64(p);
            w.f64(0.0);
        }
    }
    w.len(spec.l);
    w.f64s(spec.ladder.betas());
    let p = &spec.protocol;
    w.u32(p.b);
    for v in [p.test_interval, p.measure_sweeps, p.measure_stride, p.exchange_every] {
        w.u64(v);
    }
    w.len(p.samples);
    w.u64(p.checkpoint_every);
    w.u64(spec.master_seed);
}

fn read_spec(r: &mut Reader) -> Result<RunSpec> {
    let kind = r.u8()?;
    let (a, b) = (r.f64()?, r.f64()?);
    let model = match kind {
        1 => ModelSpec::Constrained { p1: a, p2: b },
        2 => ModelSpec::Reference { p: a },
        k => return Err(Error::Format(format!("unknown model kind {k}"))),
    };
    let l = r.len()?;
    let ladder = Ladder::from_betas(r.f64s()?)?;
    let b = r.u32()?;
    let (test_interval, measure_sweeps, measure_stride, exchange_every) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?);
    let samples = r.len()?;
    let checkpoint_every = r.u64()?;
    Ok(RunSpec {
        model,
        l,
        ladder,
        protocol: RunProtocol {
            b,
            test_interval,
            measure_sweeps,
            measure_stride,
            exchange_every,
            samples,
            checkpoint_every,
        },
        master_seed: r.u64()?,
    })
}

fn write_result(w: &mut Writer, s: &SampleResult) {
    w.len(s.sample);
    w.u64(s.equilibration.sweeps);
    w.bools(&s.equilibration.history);
    w.u8(s.equilibration.converged as u8);
    w.len(s.means.len());
    for m in &s.means {
        for v in [m.beta, m.chi0, m.chik, m.energy] {
            w.f64(v);
        }
        w.u64(m.snapshots);
    }
    w.f64s(&s.exchange_rates);
}

fn read_result(r: &mut Reader) -> Result<SampleResult> {
    let sample = r.len()?;
    let equilibration = EquilibrationReport {
        sweeps: r.u64()?,
        history: r.bools()?,
        converged: r.u8()? != 0,
    };
    let n = r.len()?;
    let means = (0..n)
        .map(|_| {
            Ok(ThermalMeans {
                beta: r.f64()?,
                chi0: r.f64()?,
                chik: r.f64()?,
                energy: r.f64()?,
                snapshots: r.u64()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleResult {
        sample,
        equilibration,
        means,
        exchange_rates: r.f64s()?,
    })
}

fn write_partial(w: &mut Writer, p: &PartialEnsemble) {
    w.u8(match p.phase {
        Phase::Equilibrating => 0,
        Phase::Measuring => 1,
        Phase::Done => 2,
    });
    w.u64(p.sweeps);
    w.u64(p.measure_sweeps);
    w.bools(&p.history);
    w.u8(p.exchange_odd as u8);
    w.rng(&p.exchange_rng);
    w.u64s(&p.exchange_attempts);
    w.u64s(&p.exchange_accepts);
    w.len(p.slots.len());
    for s in &p.slots {
        w.bytes(&s.state);
        w.f64(s.energy);
        w.len(s.label);
        w.rng(&s.rng);
        w.f64(s.block_sum);
        w.u64(s.block_len);
        w.f64s(&s.block_means);
        w.u64(s.acc.n);
        for v in [s.acc.chi0, s.acc.chik, s.acc.energy] {
            w.f64(v);
        }
        w.u64(s.accepted);
        w.u64(s.proposed);
    }
}

fn read_partial(r: &mut Reader) -> Result<PartialEnsemble> {
    let phase = match r.u8()? {
        0 => Phase::Equilibrating,
        1 => Phase::Measuring,
        2 => Phase::Done,
        k => return Err(Error::Format(format!("unknown phase {k}"))),
    };
    let sweeps = r.u64()?;
    let measure_sweeps = r.u64()?;
    let history = r.bools()?;
    let exchange_odd = r.u8()? != 0;
    let exchange_rng = r.rng()?;
    let exchange_attempts = r.u64s()?;
    let exchange_accepts = r.u64s()?;
    let n = r.len()?;
    let slots = (0..n)
        .map(|_| {
            Ok(SlotRecord {
                state: r.bytes()?,
                energy: r.f64()?,
                label: r.len()?,
                rng: r.rng()?,
                block_sum: r.f64()?,
                block_len: r.u64()?,
                block_means: r.f64s()?,
                acc: Accumulator {
                    n: r.u64()?,
                    chi0: r.f64()?,
                    chik: r.f64()?,
                    energy: r.f64()?,
                },
                accepted: r.u64()?,
                proposed: r.u64()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PartialEnsemble {
        phase,
        sweeps,
        measure_sweeps,
        history,
        exchange_odd,
        exchange_rng,
        exchange_attempts,
        exchange_accepts,
        slots,
    })
}

impl Checkpoint {
    pub fn encode<S: SpinSystem>(spec: &RunSpec, completed: &[SampleResult], partial: Option<&Ensemble<S>>) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(CHECKPOINT_VERSION);
        write_spec(&mut w, spec);
        w.len(completed.len());
        completed.iter().for_each(|s| write_result(&mut w, s));
        match partial {
            Some(e) => {
                w.u8(1);
                write_partial(&mut w, &e.snapshot());
            }
            None => w.u8(0),
        }
        w.0
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Format("not a checkpoint file".into()));
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {version}")));
        }
        let spec = read_spec(&mut r)?;
        let n = r.len()?;
        let completed = (0..n).map(|_| read_result(&mut r)).collect::<Result<Vec<_>>>()?;
        let partial = match r.u8()? {
            0 => None,
            1 => Some(read_partial(&mut r)?),
            k => return Err(Error::Format(format!("bad partial flag {k}"))),
        };
        if r.pos != bytes.len() {
            return Err(Error::Format("trailing bytes in checkpoint".into()));
        }
        Ok(Checkpoint {
            spec,
            completed,
            partial,
        })
    }

    /// Writes atomically: a temporary sibling file is renamed into place.
    pub fn write<S: SpinSystem>(
        path: &Path,
        spec: &RunSpec,
        completed: &[SampleResult],
        partial: Option<&Ensemble<S>>,
    ) -> Result<()> {
        let bytes = Self::encode(spec, completed, partial);
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes)
    }

    /// Sample currently in progress, if any.
    pub fn in_progress(&self) -> bool {
        self.partial.is_some()
    }

    pub(crate) fn check_spec(&self, spec: &RunSpec) -> Result<()> {
        if &self.spec != spec {
            return Err(Error::Parameter(
                "checkpoint was written by a run with different parameters".into(),
            ));
        }
        Ok(())
    }
}
