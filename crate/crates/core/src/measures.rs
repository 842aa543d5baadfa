//! Finite measures and weights: the A2 characteristic, growth constants and
//! measure doubling constants.
//!
//! Every ball of a finite space equals a closed ball whose radius is `0` or
//! a pairwise distance, so suprema run over that finite family.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{BallMode, FiniteMetricSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedMeasure {
    pub mu: Vec<f64>,
    pub w: Vec<f64>,
}

impl WeightedMeasure {
    pub fn new(mu: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if mu.len() != w.len() {
            return Err(Error::InvalidParams(format!("{} masses for {} weights", mu.len(), w.len())));
        }
        for (i, (&m, &wi)) in mu.iter().zip(&w).enumerate() {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::InvalidWeight(i));
            }
            if m > 0.0 && !(wi > 0.0 && wi.is_finite()) {
                return Err(Error::InvalidWeight(i));
            }
        }
        if mu.iter().sum::<f64>() <= 0.0 {
            return Err(Error::DegenerateMeasure);
        }
        Ok(Self { mu, w })
    }

    /// Counting measure with weights `w`.
    pub fn counting(w: Vec<f64>) -> Result<Self> {
        Self::new(vec![1.0; w.len()], w)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::counting(vec![1.0; n])
    }

    /// The same measure with `w` replaced by `1 / w`.
    pub fn inverted(&self) -> Self {
        let w = self
            .w
            .iter()
            .zip(&self.mu)
            .map(|(&w, &m)| if m > 0.0 { 1.0 / w } else { w })
            .collect();
        Self { mu: self.mu.clone(), w }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mass(&self, points: &[usize]) -> f64 {
        points.iter().map(|&p| self.mu[p]).sum()
    }

    /// Reads `{"mu": {name: mass}, "w": {name: weight}}`; `mu` defaults to the
    /// counting measure and missing names to mass `0` / weight `1`.
    pub fn from_json(space: &FiniteMetricSpace, text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            mu: Option<BTreeMap<String, f64>>,
            w: BTreeMap<String, f64>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        let n = space.len();
        let mut mu = vec![if raw.mu.is_some() { 0.0 } else { 1.0 }; n];
        let mut w = vec![1.0; n];
        for (name, v) in raw.mu.iter().flatten() {
            mu[space.index_of(name)?] = *v;
        }
        for (name, v) in &raw.w {
            w[space.index_of(name)?] = *v;
        }
        Self::new(mu, w)
    }

    fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        if self.len() != space.len() {
            return Err(Error::InvalidParams(format!(
                "measure has {} points, space has {}",
                self.len(),
                space.len()
            )));
        }
        if self.mu.iter().sum::<f64>() <= 0.0 {
            return Err(Error::DegenerateMeasure);
        }
        Ok(())
    }
}

/// Closed ball `(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallWitness {
    pub center: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A2Report {
    pub value: f64,
    pub witness: BallWitness,
    pub balls_checked: usize,
}

fn radii(space: &FiniteMetricSpace) -> Vec<f64> {
    let mut r = vec![0.0];
    r.extend(space.pairwise_distances());
    r
}

/// `sup_B (avg_B w)(avg_B 1/w)` over closed balls, skipping null balls.
pub fn a2_characteristic(space: &FiniteMetricSpace, wm: &WeightedMeasure) -> Result<A2Report> {
    wm.check_space(space)?;
    let mut best: Option<A2Report> = None;
    let mut seen = std::collections::HashSet::new();
    for center in 0..space.len() {
        for radius in radii(space) {
            let ball: Vec<usize> = space.ball_unchecked(center, radius, BallMode::Closed).collect();
            if !seen.insert(ball.clone()) {
                continue;
            }
            let m = wm.mass(&ball);
            if m <= 0.0 {
                continue;
            }
            let mut aw = 0.0;
            let mut ainv = 0.0;
            for &x in &ball {
                if wm.mu[x] > 0.0 {
                    aw += wm.mu[x] * wm.w[x];
                    ainv += wm.mu[x] / wm.w[x];
                }
            }
            let value = (aw / m) * (ainv / m);
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(A2Report { value, witness: BallWitness { center, radius }, balls_checked: 0 });
            }
        }
    }
    let mut report = best.ok_or(Error::DegenerateMeasure)?;
    report.balls_checked = seen.len();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub m: f64,
    pub c_min: f64,
    /// `None` when no positive pairwise distance exists.
    pub witness: Option<BallWitness>,
    pub radii: Vec<f64>,
}

/// Smallest `C` with `mu(B(x, r)) <= C r^m` over positive pairwise-distance
/// radii.
pub fn growth_constant(space: &FiniteMetricSpace, wm: &WeightedMeasure, m: f64) -> Result<GrowthReport> {
    wm.check_space(space)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParams(format!("exponent {m} must be positive")));
    }
    let radii = space.pairwise_distances();
    let mut c_min = 0.0;
    let mut witness = None;
    for center in 0..space.len() {
        for &radius in &radii {
            let ball: Vec<usize> = space.ball_unchecked(center, radius, BallMode::Closed).collect();
            let c = wm.mass(&ball) / radius.powf(m);
            if witness.is_none() || c > c_min {
                c_min = c;
                witness = Some(BallWitness { center, radius });
            }
        }
    }
    Ok(GrowthReport { m, c_min, witness, radii })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub constant: f64,
    pub witness: Option<BallWitness>,
}

/// `max mu(B(x, 2r)) / mu(B(x, r))` over pairwise-distance radii with
/// `mu(B(x, r)) > 0`; `1` when there is no such radius.
pub fn measure_doubling_constant(space: &FiniteMetricSpace, wm: &WeightedMeasure) -> Result<DoublingReport> {
    wm.check_space(space)?;
    let mut out = DoublingReport { constant: 1.0, witness: None };
    for center in 0..space.len() {
        for radius in space.pairwise_distances() {
            let small: Vec<usize> = space.ball_unchecked(center, radius, BallMode::Closed).collect();
            let m = wm.mass(&small);
            if m <= 0.0 {
                continue;
            }
            let big: Vec<usize> = space.ball_unchecked(center, 2.0 * radius, BallMode::Closed).collect();
            let ratio = wm.mass(&big) / m;
            if out.witness.is_none() || ratio > out.constant {
                out = DoublingReport { constant: ratio, witness: Some(BallWitness { center, radius }) };
            }
        }
    }
    Ok(out)
}
