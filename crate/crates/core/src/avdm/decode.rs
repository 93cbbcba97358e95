use crate::avdm::AvdmParams;
use crate::error::{Error, Result};

/// `omega = a_hat * lambda^b_hat * (1 + c) / (2 c) * sqrt(r)`, degrees/second.
pub fn decode_angular_velocity(r: f64, lambda: f64, c_hat: f64, params: &AvdmParams) -> Result<f64> {
    if !(c_hat > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "contrast estimate must be positive, got {c_hat}"
        )));
    }
    if !(r >= 0.0) || !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need r >= 0 and lambda > 0, got r={r}, lambda={lambda}"
        )));
    }
    Ok(params.a_hat * lambda.powf(params.b_hat) * contrast_factor(c_hat) * r.sqrt())
}

#[inline]
pub(crate) fn contrast_factor(c: f64) -> f64 {
    (1.0 + c) / (2.0 * c)
}
