//! Closed-form decode probabilities and the fairness feasibility test.
//!
//! `decode_prob(l, L, T, p)` is the probability that a user with per-slot
//! packet error probability `p` decodes exactly the first `l` packets of an
//! `L`-packet block within `T` slots; `at_least_prob` sums the tail. The
//! fairness constraint requires every user to decode at least `l_min`
//! packets with probability `p_th`.

use serde::{Deserialize, Serialize};

use crate::channel;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Per-user fairness requirement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairnessSpec {
    /// Minimum decodable prefix every user must reach.
    pub l_min: u8,
    /// Probability threshold for reaching it.
    pub p_th: f64,
}

impl FairnessSpec {
    pub fn validate(&self, layers: u8) -> Result<()> {
        if self.l_min < 1 || self.l_min > layers {
            return Err(Error::InvalidParameter(format!(
                "fairness prefix {} outside [1, {layers}]",
                self.l_min
            )));
        }
        if !(0.0..=1.0).contains(&self.p_th) {
            return Err(Error::InvalidParameter(format!(
                "fairness threshold {} outside [0, 1]",
                self.p_th
            )));
        }
        Ok(())
    }
}

/// Binomial coefficient as f64, by the multiplicative formula.
fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn check_params(l: usize, layers: usize, slots: usize, p: f64) -> Result<()> {
    if l < 1 || l > layers {
        return Err(Error::InvalidParameter(format!("prefix {l} outside [1, {layers}]")));
    }
    if layers > slots {
        return Err(Error::InvalidParameter(format!(
            "deadline T (T >= L) violated: T={slots} < L={layers}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("loss probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Probability of decoding exactly the first `l` packets of an `layers`-packet
/// block in `slots` slots at per-slot loss probability `p`.
pub fn decode_prob(l: usize, layers: usize, slots: usize, p: f64) -> Result<f64> {
    check_params(l, layers, slots, p)?;
    let s = 1.0 - p;
    if l == layers {
        // at least L successes in T slots
        let mut acc = 0.0;
        for i in layers..=slots {
            acc += binomial(slots, i) * s.powi(i as i32) * p.powi((slots - i) as i32);
        }
        Ok(acc)
    } else {
        let trailing = slots - l - 1;
        let mut sum = 0.0;
        for i in 0..=(layers - l - 1) {
            sum += binomial(trailing, i) * s.powi(i as i32) * p.powi((trailing - i) as i32);
        }
        Ok(s.powi(l as i32) * p * sum)
    }
}

/// Probability of decoding at least the first `l` packets.
pub fn at_least_prob(l: usize, layers: usize, slots: usize, p: f64) -> Result<f64> {
    check_params(l, layers, slots, p)?;
    let mut acc = 0.0;
    for j in l..=layers {
        acc += decode_prob(j, layers, slots, p)?;
    }
    Ok(acc)
}

/// True when every user in the scenario meets the fairness constraint with
/// the transmitter hovering at `q`.
pub fn feasible(
    q: &channel::Point2D,
    scenario: &Scenario,
    spec: &FairnessSpec,
) -> Result<bool> {
    let pose = channel::UavPose::new(*q, scenario.altitude);
    for user in &scenario.users {
        let p = channel::per_for_user(&pose, user, &scenario.radio)?;
        let reach = at_least_prob(
            spec.l_min as usize,
            scenario.layers as usize,
            scenario.slots,
            p,
        )?;
        if reach < spec.p_th {
            return Ok(false);
        }
    }
    Ok(true)
}
