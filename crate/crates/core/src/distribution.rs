//! Empirical distribution statistics for `C(k)`, `pi i s_q(t)` and `R~(u)`
//! samples: scaled ECDF, symmetry, tails, extremes, almost periodicity and
//! histograms.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bias::CkVector;
use crate::dedekind::Spectrum;
use crate::error::{Error, Result};
use crate::foundations::arith::pairwise_sum;
use crate::moments::empirical_moments;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DistKind {
    C,
    #[serde(rename = "s")]
    S,
    R,
}

impl DistKind {
    /// `e^gamma / 2` for `C` and `s`, `3 e^gamma / pi^2` for `R`.
    pub fn default_scale(self) -> f64 {
        match self {
            DistKind::C | DistKind::S => EULER_GAMMA.exp() / 2.0,
            DistKind::R => 3.0 * EULER_GAMMA.exp() / (PI * PI),
        }
    }

    fn residue_indexed(self) -> bool {
        matches!(self, DistKind::C | DistKind::S)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

/// Samples with a sorted copy for order statistics. For `C` and `s` the
/// sample at position `i` belongs to residue `k = i + 1` modulo
/// `q = len + 1`.
#[derive(Clone, Debug)]
pub struct EmpiricalDistribution {
    label: DistKind,
    samples: Vec<f64>,
    sorted: Vec<f64>,
    scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub x: f64,
    pub side: Side,
    pub frequency: f64,
    /// `ln(-ln f)`, present when `0 < f < 1`.
    pub log_log: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extremes {
    pub min: f64,
    pub argmin: u64,
    pub max: f64,
    pub argmax: u64,
    /// `max / ((e^gamma/2) log log q)` for residue-indexed kinds.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlmostPeriod {
    pub m: u64,
    pub value: f64,
    pub pairs: u64,
    /// Set when `m` is outside `1..=q/4`.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub moments: Vec<f64>,
    pub symmetry_stat: f64,
}

impl EmpiricalDistribution {
    pub fn new(label: DistKind, samples: Vec<f64>) -> Result<Self> {
        Self::with_scale(label, samples, label.default_scale())
    }

    pub fn with_scale(label: DistKind, samples: Vec<f64>, scale: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("no samples"));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain("scale must be positive"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("samples must be finite"));
        }
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution {
            label,
            samples,
            sorted,
            scale,
        })
    }

    /// `C(k)` for `k = 1..q-1`.
    pub fn from_ck(ck: &CkVector) -> Result<Self> {
        Self::new(DistKind::C, ck.values().to_vec())
    }

    /// `pi i s_q(t)` for `t = 1..q-1`.
    pub fn from_spectrum(spec: &Spectrum) -> Result<Self> {
        Self::new(DistKind::S, spec.scaled_samples())
    }

    pub fn label(&self) -> DistKind {
        self.label
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn modulus(&self) -> Option<u64> {
        self.label.residue_indexed().then(|| self.samples.len() as u64 + 1)
    }

    fn index_label(&self, i: usize) -> u64 {
        if self.label.residue_indexed() {
            i as u64 + 1
        } else {
            i as u64
        }
    }

    /// Fraction of samples `<= scale * x`.
    pub fn ecdf_scaled(&self, x: f64) -> f64 {
        let t = self.scale * x;
        self.sorted.partition_point(|&v| v <= t) as f64 / self.sorted.len() as f64
    }

    /// Fraction of samples `< scale * x`, the left limit of the ECDF.
    pub fn ecdf_left(&self, x: f64) -> f64 {
        let t = self.scale * x;
        self.sorted.partition_point(|&v| v < t) as f64 / self.sorted.len() as f64
    }

    /// `sup_x |F(x) + F(-x) - 1|` over the given grid.
    pub fn symmetry_stat_on(&self, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&x| (self.ecdf_scaled(x) + self.ecdf_scaled(-x) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Symmetry statistic over every sample point and its reflection.
    pub fn symmetry_stat(&self) -> f64 {
        let grid: Vec<f64> = self.sorted.iter().map(|v| v / self.scale).collect();
        self.symmetry_stat_on(&grid)
    }

    pub fn tail_frequency(&self, x: f64, side: Side) -> TailReport {
        let t = self.scale * x;
        let n = self.sorted.len() as f64;
        let count = match side {
            Side::Upper => self.sorted.len() - self.sorted.partition_point(|&v| v < t),
            Side::Lower => self.sorted.partition_point(|&v| v <= -t),
        };
        let f = count as f64 / n;
        TailReport {
            x,
            side,
            frequency: f,
            log_log: (f > 0.0 && f < 1.0).then(|| (-f.ln()).ln()),
        }
    }

    pub fn extremes(&self) -> Extremes {
        self.extremes_filtered(|_| true).expect("distribution is nonempty")
    }

    /// Extremes over the samples whose index label passes `keep`.
    pub fn extremes_filtered(&self, keep: impl Fn(u64) -> bool) -> Result<Extremes> {
        let mut best: Option<(f64, usize, f64, usize)> = None;
        for (i, &v) in self.samples.iter().enumerate() {
            if !keep(self.index_label(i)) {
                continue;
            }
            best = Some(match best {
                None => (v, i, v, i),
                Some((lo, il, hi, ih)) => {
                    let (lo, il) = if v < lo { (v, i) } else { (lo, il) };
                    let (hi, ih) = if v > hi { (v, i) } else { (hi, ih) };
                    (lo, il, hi, ih)
                }
            });
        }
        let (min, il, max, ih) = best.ok_or_else(|| Error::precondition("filter selects no samples"))?;
        let ratio = self.modulus().and_then(|q| {
            let ll = (q as f64).ln().ln();
            (ll > 0.0).then(|| max / (EULER_GAMMA.exp() / 2.0 * ll))
        });
        Ok(Extremes {
            min,
            argmin: self.index_label(il),
            max,
            argmax: self.index_label(ih),
            ratio,
        })
    }

    /// Mean of `|v(k) - v(k+m)|^2` over residues `k` with neither `k` nor
    /// `k + m` divisible by `q`.
    pub fn almost_period_stat(&self, m: u64) -> Result<AlmostPeriod> {
        let q = self
            .modulus()
            .ok_or_else(|| Error::domain("almost periodicity needs residue-indexed samples"))?;
        let shift = m % q;
        let flagged = m == 0 || m > q / 4;
        if shift == 0 {
            return Ok(AlmostPeriod {
                m,
                value: 0.0,
                pairs: q - 1,
                flagged,
            });
        }
        let sq: Vec<f64> = (1..q)
            .filter(|&k| (k + shift) % q != 0)
            .map(|k| {
                let d = self.samples[(k - 1) as usize] - self.samples[((k + shift) % q - 1) as usize];
                d * d
            })
            .collect();
        Ok(AlmostPeriod {
            m,
            value: pairwise_sum(&sq) / sq.len() as f64,
            pairs: sq.len() as u64,
            flagged,
        })
    }

    /// Histogram with Freedman-Diaconis bin width unless `bins` is given.
    pub fn histogram(&self, bins: Option<usize>) -> Vec<HistogramBin> {
        let lo = self.sorted[0];
        let hi = *self.sorted.last().unwrap();
        let n = self.sorted.len();
        let count = match bins {
            Some(b) => b.max(1),
            None => {
                let iqr = quantile(&self.sorted, 0.75) - quantile(&self.sorted, 0.25);
                let width = 2.0 * iqr / (n as f64).cbrt();
                if width > 0.0 && hi > lo {
                    (((hi - lo) / width).ceil() as usize).clamp(1, 10_000)
                } else {
                    1
                }
            }
        };
        let width = if hi > lo { (hi - lo) / count as f64 } else { 1.0 };
        let mut counts = vec![0u64; count];
        for &v in &self.sorted {
            let b = (((v - lo) / width) as usize).min(count - 1);
            counts[b] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| HistogramBin {
                lo: lo + i as f64 * width,
                hi: if i + 1 == count { hi.max(lo + width) } else { lo + (i + 1) as f64 * width },
                count: c,
            })
            .collect()
    }

    /// ECDF sampled on `points` evenly spaced scaled abscissae in `[lo, hi]`.
    pub fn ecdf_table(&self, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                (x, self.ecdf_scaled(x))
            })
            .collect()
    }

    pub fn summary(&self) -> Summary {
        Summary {
            count: self.samples.len(),
            min: self.sorted[0],
            max: *self.sorted.last().unwrap(),
            moments: empirical_moments(&self.samples, 6).expect("nonempty"),
            symmetry_stat: self.symmetry_stat(),
        }
    }
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}
