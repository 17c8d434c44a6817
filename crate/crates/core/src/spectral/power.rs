//! Lockstep truncated power iteration of `R` instances on a network.

use super::{start_sign, InstanceLog, SpectralError};
use crate::congest::{pipelined_sums_flat, AggregationTree, Inbox, Message, Network, VertexContext, VertexProgram};
use crate::numeric::{ExtFloat, TruncError, TruncatedReal, WireFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Operator {
    /// `L`
    Laplacian,
    /// `2I - L`
    Complement,
}

/// A previously recovered eigenpair `(mu, v)` of `2I - L`, deflated every iteration.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Stored {
    pub mu: f64,
    pub entries: Vec<f64>,
}

pub(crate) struct Level<'a> {
    pub op: Operator,
    pub shift: f64,
    /// Project against `sqrt(deg)` at the start and every this many iterations.
    pub null_period: Option<u64>,
    pub stored: &'a [Stored],
    pub iterations: u64,
    pub seeds: Vec<(usize, u32, u64)>,
    pub format: WireFormat,
    /// Replaces the random start of a single instance.
    pub start: Option<&'a [f64]>,
}

/// Final sums of one instance, all as known at every vertex.
#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub instance: usize,
    pub restart: u32,
    pub numer: ExtFloat,
    pub denom: ExtFloat,
    pub null_coeff: ExtFloat,
    pub coeffs: Vec<ExtFloat>,
    /// `x~_v = sqrt(d_v) y~_v` of the last evaluated vector.
    pub x: Vec<ExtFloat>,
}

pub(crate) struct LevelRun {
    pub outcomes: Vec<Outcome>,
    pub volume: ExtFloat,
    pub drift: Vec<f64>,
}

/// Vertex-local state. Entry `i` of `x`, `y` and `acc` stands for the value
/// times `2^scale[i]`, with one scale per instance shared by all vertices.
struct Slot {
    x: Vec<f64>,
    y: Vec<f64>,
    acc: Vec<f64>,
    spread: Vec<f64>,
    inv_sqrt_deg: f64,
}

/// A truncated value together with its decoding in the instance's scale, so
/// each broadcast is decoded once rather than once per receiver.
struct Wire {
    value: TruncatedReal,
    scaled: f64,
}

impl Message for Wire {
    fn bit_width(&self) -> u32 {
        self.value.bit_width()
    }
}

/// One matrix-vector product per instance: in round `r` every vertex
/// broadcasts its truncated `x_v / sqrt(d_v)` for instance `r - 1`.
struct Exchange<'a> {
    scale: &'a [i32],
    format: WireFormat,
    evaluate: bool,
}

impl VertexProgram for Exchange<'_> {
    type State = Slot;
    type Msg = Wire;

    fn init(&self, _: &VertexContext<'_>) -> Slot {
        unreachable!("exchange runs on persistent slots")
    }

    fn send(&self, _: &VertexContext<'_>, s: &mut Slot, round: u64) -> Result<Option<Wire>, TruncError> {
        let i = round as usize - 1;
        let (value, scaled) = TruncatedReal::encode_scaled(s.x[i] * s.inv_sqrt_deg, self.scale[i], self.format)?;
        s.y[i] = scaled;
        Ok(Some(Wire { value, scaled }))
    }

    fn receive(&self, _: &VertexContext<'_>, s: &mut Slot, round: u64, inbox: Inbox<'_, Wire>) {
        let i = round as usize - 1;
        let own = s.y[i];
        let mut acc = 0.0;
        let mut spread = 0.0;
        for (_, w, m) in inbox {
            acc += w * m.scaled;
            if self.evaluate {
                let d = own - m.scaled;
                spread += w * d * d;
            }
        }
        s.acc[i] = acc;
        s.spread[i] = spread;
    }

    fn halted(&self, _: &VertexContext<'_>, _: &Slot, round: u64) -> bool {
        round >= self.scale.len() as u64
    }
}

fn flat(n: usize, count: usize, f: impl Fn(usize, usize) -> ExtFloat) -> Vec<ExtFloat> {
    let mut out = Vec::with_capacity(n * count);
    for v in 0..n {
        out.extend((0..count).map(|s| f(v, s)));
    }
    out
}

fn exchange(net: &mut Network<'_>, slots: &mut [Slot], scale: &[i32], format: WireFormat, evaluate: bool) -> Result<(), SpectralError> {
    net.execute(&Exchange { scale, format, evaluate }, slots)?;
    Ok(())
}

/// `c / 2^scale` as a plain float.
fn descale(c: ExtFloat, scale: i32) -> f64 {
    (c * ExtFloat::from_parts(1.0, -scale)).to_f64()
}

/// Keeps the largest entry of every instance near 1; shifts by powers of two are exact.
fn rescale(slots: &mut [Slot], scale: &mut [i32]) {
    for (i, sc) in scale.iter_mut().enumerate() {
        let top = slots.iter().fold(0.0f64, |a, s| a.max(s.x[i].abs()));
        if top == 0.0 || !top.is_finite() {
            continue;
        }
        let e = ((top.to_bits() >> 52) & 0x7ff) as i32 - 1023;
        if (-512..=512).contains(&e) {
            continue;
        }
        let factor = f64::from_bits(((1023 - e) as u64) << 52);
        for s in slots.iter_mut() {
            s.x[i] *= factor;
        }
        *sc += e;
    }
}

/// Runs every seed of `level` in lockstep for `level.iterations` steps and
/// evaluates the final vectors.
pub(crate) fn run_level(
    net: &mut Network<'_>,
    tree: &AggregationTree,
    level: &Level<'_>,
    known_volume: Option<ExtFloat>,
) -> Result<LevelRun, SpectralError> {
    let g = net.graph();
    let n = g.n();
    let r = level.seeds.len();
    let fmt = level.format;
    let sqrt_deg: Vec<f64> = g.sqrt_degrees();
    let deg: Vec<ExtFloat> = g.degrees().iter().map(|&d| ExtFloat::new(d)).collect();
    let stored = level.stored;
    let k = stored.len();
    let shift = level.shift;
    let op_sign = match level.op {
        Operator::Laplacian => -1.0,
        Operator::Complement => 1.0,
    };
    let mut scale = vec![0i32; r];
    let at = |x: f64, i: usize, scale: &[i32]| ExtFloat::from_parts(x, scale[i]);

    let mut slots: Vec<Slot> = (0..n)
        .map(|v| Slot {
            x: match level.start {
                Some(x) => vec![x[v]; r],
                None => level.seeds.iter().map(|&(_, _, seed)| start_sign(seed, v)).collect(),
            },
            y: vec![0.0; r],
            acc: vec![0.0; r],
            spread: vec![0.0; r],
            inv_sqrt_deg: 1.0 / sqrt_deg[v],
        })
        .collect();
    rescale(&mut slots, &mut scale);

    let mut volume = known_volume.unwrap_or(ExtFloat::ZERO);
    let mut drift = Vec::new();
    if level.null_period.is_some() {
        let need_volume = known_volume.is_none();
        let offset = usize::from(need_volume);
        let values = flat(n, r + offset, |v, s| {
            if s < offset {
                deg[v]
            } else {
                at(slots[v].x[s - offset] * sqrt_deg[v], s - offset, &scale)
            }
        });
        let sums = pipelined_sums_flat(net, tree, &values, r + offset, fmt)?;
        if need_volume {
            volume = sums[0];
        }
        project_null(&mut slots, &sums[offset..], volume, &sqrt_deg, &scale);
    }

    let mut coeffs = vec![0.0; r * k];
    for t in 1..=level.iterations {
        exchange(net, &mut slots, &scale, fmt, false)?;
        for (v, s) in slots.iter_mut().enumerate() {
            let (sd, isd) = (sqrt_deg[v], s.inv_sqrt_deg);
            for i in 0..r {
                let x = s.y[i] * sd;
                s.x[i] = x + op_sign * (s.acc[i] * isd) + shift * x;
            }
        }
        if k > 0 {
            let values = flat(n, r * k, |v, s| at(slots[v].y[s / k] * sqrt_deg[v] * stored[s % k].entries[v], s / k, &scale));
            let sums = pipelined_sums_flat(net, tree, &values, r * k, fmt)?;
            for (c, (idx, sum)) in coeffs.iter_mut().zip(sums.iter().enumerate()) {
                *c = stored[idx % k].mu * descale(*sum, scale[idx / k]);
            }
            for (v, s) in slots.iter_mut().enumerate() {
                for (i, x) in s.x.iter_mut().enumerate() {
                    for (j, sv) in stored.iter().enumerate() {
                        *x -= coeffs[i * k + j] * sv.entries[v];
                    }
                }
            }
        }
        if let Some(p) = level.null_period {
            if t % p == 0 {
                let values = flat(n, r, |v, i| at(slots[v].x[i] * sqrt_deg[v], i, &scale));
                let sums = pipelined_sums_flat(net, tree, &values, r, fmt)?;
                for (i, c) in sums.iter().enumerate() {
                    let norm = slots.iter().fold(ExtFloat::ZERO, |a, s| a + at(s.x[i] * s.x[i], i, &scale) * at(1.0, i, &scale));
                    if !norm.is_zero() {
                        drift.push((c.abs() / (volume * norm).sqrt()).to_f64());
                    }
                }
                project_null(&mut slots, &sums, volume, &sqrt_deg, &scale);
            }
        }
        rescale(&mut slots, &mut scale);
    }

    exchange(net, &mut slots, &scale, fmt, true)?;
    let has_null = level.null_period.is_some();
    let per = 2 + usize::from(has_null) + k;
    let values = flat(n, r * per, |v, s| {
        let (i, j) = (s / per, s % per);
        let y = slots[v].y[i];
        let e = scale[i];
        match (j, has_null) {
            (0, _) => ExtFloat::from_parts(slots[v].spread[i] * 0.5, 2 * e),
            (1, _) => deg[v] * ExtFloat::from_parts(y * y, 2 * e),
            (2, true) => deg[v] * ExtFloat::from_parts(y, e),
            _ => ExtFloat::from_parts(y * sqrt_deg[v] * stored[j - 2 - usize::from(has_null)].entries[v], e),
        }
    });
    let sums = pipelined_sums_flat(net, tree, &values, r * per, fmt)?;
    let outcomes = (0..r)
        .map(|i| {
            let row = &sums[i * per..(i + 1) * per];
            let (null_coeff, rest) = if has_null { (row[2], &row[3..]) } else { (ExtFloat::ZERO, &row[2..]) };
            Outcome {
                instance: level.seeds[i].0,
                restart: level.seeds[i].1,
                numer: row[0],
                denom: row[1],
                null_coeff,
                coeffs: rest.to_vec(),
                x: (0..n).map(|v| ExtFloat::from_parts(slots[v].y[i] * sqrt_deg[v], scale[i])).collect(),
            }
        })
        .collect();
    Ok(LevelRun { outcomes, volume, drift })
}

fn project_null(slots: &mut [Slot], coeffs: &[ExtFloat], volume: ExtFloat, sqrt_deg: &[f64], scale: &[i32]) {
    let scaled: Vec<f64> = coeffs.iter().zip(scale).map(|(&c, &e)| descale(c / volume, e)).collect();
    for (v, s) in slots.iter_mut().enumerate() {
        for (x, c) in s.x.iter_mut().zip(&scaled) {
            *x -= c * sqrt_deg[v];
        }
    }
}

/// One-sided bounds on the Rayleigh quotient of `x~` against
/// `L + 2 v v^T + sum mu_j v_j v_j^T`. Every summed quantity lost at most a
/// factor `(1 - eta)^(h+1)` on its way through the tree.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

pub(crate) fn bounds(o: &Outcome, stored: &[Stored], volume: ExtFloat, height: usize, format: WireFormat) -> Option<Bounds> {
    if o.denom.is_zero() {
        return None;
    }
    let loss = 1.0 - format.relative_error();
    let slack = ExtFloat::new(loss).powi(height as u32 + 1);
    let mut extra = ExtFloat::ZERO;
    if !volume.is_zero() {
        extra += ExtFloat::new(2.0) * o.null_coeff * o.null_coeff / volume;
    }
    for (c, s) in o.coeffs.iter().zip(stored) {
        extra += ExtFloat::new(s.mu) * *c * *c;
    }
    let lower = (o.numer * slack).ratio(o.denom);
    let upper = (o.numer / slack + extra).ratio(o.denom);
    Some(Bounds { lower, upper })
}

pub(crate) fn log_entry(o: &Outcome, value: f64) -> InstanceLog {
    InstanceLog { instance: o.instance, restart: o.restart, rayleigh: value }
}
