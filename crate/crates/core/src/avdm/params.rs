use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model constants. Serialised as `key = value` text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AvdmParams {
    pub a_hat: f64,
    pub b_hat: f64,
    pub tau_lp_ms: f64,
    pub tau_hp_ms: f64,
    pub emd_offset_px: usize,
    /// Maps motion energy `r` to the reported score. Arbitrary units.
    pub score_gain: f64,
    /// Lower bound on the contrast estimate.
    pub c_floor: f64,
}

impl Default for AvdmParams {
    fn default() -> Self {
        AvdmParams {
            a_hat: 1.0,
            b_hat: 1.0,
            tau_lp_ms: 25.0,
            tau_hp_ms: 50.0,
            emd_offset_px: 1,
            score_gain: 10000.0,
            c_floor: 0.05,
        }
    }
}

impl AvdmParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidArgument(format!("{what} out of range: {v}")))
        };
        if !(self.tau_lp_ms > 0.0) {
            return bad("tau_lp_ms", self.tau_lp_ms);
        }
        if !(self.tau_hp_ms > 0.0) {
            return bad("tau_hp_ms", self.tau_hp_ms);
        }
        if self.emd_offset_px < 1 {
            return bad("emd_offset_px", self.emd_offset_px as f64);
        }
        if !(self.score_gain > 0.0) {
            return bad("score_gain", self.score_gain);
        }
        if !(self.c_floor > 0.0 && self.c_floor <= 1.0) {
            return bad("c_floor", self.c_floor);
        }
        if !self.a_hat.is_finite() || !self.b_hat.is_finite() {
            return bad("decoding coefficients", self.a_hat);
        }
        Ok(())
    }

    /// Frames after a reset during which filter transients dominate:
    /// three of the slower time constant, and never fewer than two.
    pub fn warmup_frames(&self, sample_rate: f64) -> usize {
        let tau_s = self.tau_hp_ms.max(self.tau_lp_ms) / 1000.0;
        ((3.0 * tau_s * sample_rate).ceil() as usize).max(2)
    }

    pub fn to_text(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn from_text(text: &str) -> std::result::Result<Self, String> {
        let p: AvdmParams = toml::from_str(text).map_err(|e| e.to_string())?;
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text).map_err(|msg| Error::parse(path, msg))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()?).map_err(|e| Error::io(path, e))
    }
}
