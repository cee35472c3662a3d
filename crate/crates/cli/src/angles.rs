//! CPT cosines between the four reference states after the Approach-2 gate,
//! evaluated from closed forms and directly from the inner product.

use ptqkd_core::eve::approach2_gate;
use ptqkd_core::{cpt_cosine, Bb84State, CptMetric, Result};
use serde::Serialize;

/// Pairs in table order.
pub const PAIRS: [(Bb84State, Bb84State); 6] = [
    (Bb84State::Psi00, Bb84State::Psi10),
    (Bb84State::Psi00, Bb84State::Psi01),
    (Bb84State::Psi00, Bb84State::Psi11),
    (Bb84State::Psi10, Bb84State::Psi11),
    (Bb84State::Psi01, Bb84State::Psi11),
    (Bb84State::Psi10, Bb84State::Psi01),
];

#[derive(Debug, Clone, Serialize)]
pub struct AngleRow {
    pub pair: String,
    pub closed_form: f64,
    pub direct: f64,
    /// Imaginary part of the direct value; zero up to rounding.
    pub direct_imag: f64,
    /// `||closed_form| − |direct||`. Cosines are compared up to a global phase.
    pub difference: f64,
    pub same_sign: bool,
}

/// Closed-form cosine for a pair, `None` for pairs outside [`PAIRS`].
pub fn closed_form(u: Bb84State, v: Bb84State, alpha: f64, rho: f64) -> Option<f64> {
    use Bb84State::*;
    let (sa, sr, cr) = (alpha.sin(), rho.sin(), rho.cos());
    let mixed = |num: f64, k1: f64, k2: f64| num / (2.0 * (1.0 + k1 * cr * sa) * (1.0 + k2 * sr * sa)).sqrt();
    Some(match (u, v) {
        (Psi00, Psi10) => sa * sr / (1.0 - cr * cr * sa * sa).sqrt(),
        (Psi00, Psi01) => mixed(1.0 + sa * (sr + cr), 1.0, 1.0),
        (Psi00, Psi11) => mixed(1.0 + sa * (cr - sr), 1.0, -1.0),
        (Psi10, Psi11) => mixed(1.0 - sa * (sr + cr), -1.0, -1.0),
        (Psi01, Psi11) => sa * cr / (1.0 - sr * sr * sa * sa).sqrt(),
        (Psi10, Psi01) => mixed(1.0 + sa * (sr - cr), -1.0, 1.0),
        _ => return None,
    })
}

pub fn table(alpha: f64, rho: f64) -> Result<Vec<AngleRow>> {
    let metric = CptMetric::new(alpha)?;
    let gate = approach2_gate(rho);
    PAIRS
        .iter()
        .map(|&(u, v)| {
            let direct = cpt_cosine(&metric, gate * u.vector(), gate * v.vector())?;
            let closed = closed_form(u, v, alpha, rho).expect("listed pair");
            Ok(AngleRow {
                pair: format!("({}, {})", u.label(), v.label()),
                closed_form: closed,
                direct: direct.re,
                direct_imag: direct.im,
                difference: (closed.abs() - direct.norm()).abs(),
                same_sign: closed * direct.re >= 0.0 || closed.abs() < 1e-12,
            })
        })
        .collect()
}
