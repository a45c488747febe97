//! Line-of-sight channel model: UAV/user geometry to distance, channel gain,
//! SNR, bit error rate and packet error rate.
//!
//! The link is BPSK over a free-space LoS channel. All quantities are linear;
//! dB-valued configuration is converted once at load time via
//! [`db_to_linear`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A horizontal position in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Squared horizontal distance to another point.
    pub fn dist2(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Hover pose of the transmitter: horizontal position plus fixed altitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UavPose {
    pub q: Point2D,
    /// Altitude in meters; must be positive.
    pub h: f64,
}

impl UavPose {
    pub fn new(q: Point2D, h: f64) -> Self {
        UavPose { q, h }
    }

    fn validate(&self) -> Result<()> {
        if !self.q.is_finite() || !self.h.is_finite() {
            return Err(Error::InvalidGeometry("non-finite pose".into()));
        }
        if self.h <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "altitude must be positive, got {}",
                self.h
            )));
        }
        Ok(())
    }
}

/// Which BER expression to use for BPSK.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BerModel {
    /// Q(2*sqrt(gamma)); the default.
    #[default]
    PaperQ2SqrtGamma,
    /// Q(sqrt(2*gamma)), the textbook coherent-BPSK expression, offered for
    /// comparison; it only rescales the effective SNR.
    StandardBpsk,
}

/// Radio-layer parameters, all linear.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Channel power gain at 1 m reference distance (linear).
    pub beta0: f64,
    /// Transmit power in watts.
    pub pt: f64,
    /// Noise variance at the receiver in watts.
    pub sigma2: f64,
    /// Packet length in bits.
    pub n_bits: u32,
    pub ber_model: BerModel,
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta0 > 0.0 && self.pt > 0.0 && self.sigma2 > 0.0) {
            return Err(Error::InvalidParameter(
                "radio parameters beta0, pt, sigma2 must be positive".into(),
            ));
        }
        if self.n_bits < 1 {
            return Err(Error::InvalidParameter("packet length must be at least 1 bit".into()));
        }
        Ok(())
    }
}

/// Convert a decibel quantity to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Gaussian tail function Q(x) = 0.5 * erfc(x / sqrt(2)).
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn slant_dist2(pose: &UavPose, user: &Point2D) -> Result<f64> {
    pose.validate()?;
    if !user.is_finite() {
        return Err(Error::InvalidGeometry("non-finite user position".into()));
    }
    Ok(pose.q.dist2(user) + pose.h * pose.h)
}

/// Slant distance from the transmitter to a user, in meters.
pub fn distance(pose: &UavPose, user: &Point2D) -> Result<f64> {
    Ok(slant_dist2(pose, user)?.sqrt())
}

/// Channel power gain beta0 / d^2.
pub fn channel_gain(pose: &UavPose, user: &Point2D, radio: &RadioParams) -> Result<f64> {
    Ok(radio.beta0 / slant_dist2(pose, user)?)
}

/// Received SNR gamma = beta0 * pt / (d^2 * sigma2).
pub fn snr(pose: &UavPose, user: &Point2D, radio: &RadioParams) -> Result<f64> {
    Ok(radio.beta0 * radio.pt / (slant_dist2(pose, user)? * radio.sigma2))
}

/// Bit error rate for a given SNR.
pub fn ber(gamma: f64, radio: &RadioParams) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("snr must be non-negative, got {gamma}")));
    }
    Ok(match radio.ber_model {
        BerModel::PaperQ2SqrtGamma => q_func(2.0 * gamma.sqrt()),
        BerModel::StandardBpsk => q_func((2.0 * gamma).sqrt()),
    })
}

/// Packet error rate 1 - (1 - ber)^n.
pub fn per(bit_error: f64, radio: &RadioParams) -> f64 {
    debug_assert!((0.0..=1.0).contains(&bit_error));
    1.0 - (1.0 - bit_error).powi(radio.n_bits as i32)
}

/// Packet error rate of a user straight from geometry.
pub fn per_for_user(pose: &UavPose, user: &Point2D, radio: &RadioParams) -> Result<f64> {
    let gamma = snr(pose, user, radio)?;
    Ok(per(ber(gamma, radio)?, radio))
}
