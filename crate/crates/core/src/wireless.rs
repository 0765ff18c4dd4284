//! Parallel interference channel: `K` transmitter-receiver pairs, `S`
//! non-overlapping bands, each transmitter picks one band.
//!
//! Noise power is normalized to one and every transmitter uses the same
//! power, so the scalar SNR `rho = 10^(snr_db / 10)` fully parameterizes the
//! link budget. The utility of pair `k` is its spectral efficiency
//! `log2(1 + SINR_k)` in bps/Hz with
//!
//! ```text
//! SINR_k = rho * g[k][k][s_k] / (1 + rho * sum_{j != k, s_j = s_k} g[j][k][s_k])
//! ```

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::game::NormalFormGame;

/// Channel realization and link budget for one interference channel.
///
/// `gains[(j * K + k) * S + s]` is the power gain from transmitter `j` to
/// receiver `k` on band `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcScenario {
    #[serde(rename = "K")]
    pub num_pairs: usize,
    #[serde(rename = "S")]
    pub num_channels: usize,
    pub snr_db: f64,
    pub gains: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl IcScenario {
    pub fn new(num_pairs: usize, num_channels: usize, snr_db: f64, gains: Vec<f64>) -> Result<Self> {
        let s = Self { num_pairs, num_channels, snr_db, gains, seed: None };
        s.validate()?;
        Ok(s)
    }

    /// Draws Rayleigh-fading gains from `seed`.
    pub fn random(num_pairs: usize, num_channels: usize, snr_db: f64, seed: u64) -> Result<Self> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let gains = draw_gains(&mut rng, num_pairs, num_channels)?;
        let mut s = Self::new(num_pairs, num_channels, snr_db, gains)?;
        s.seed = Some(seed);
        Ok(s)
    }

    /// Every direct link has gain `direct` and every cross link `cross`, on
    /// all `num_channels` bands; two pairs.
    pub fn symmetric(num_channels: usize, direct: f64, cross: f64, snr_db: f64) -> Self {
        Self::per_band(2, &vec![direct; num_channels], &vec![cross; num_channels], snr_db)
    }

    /// All pairs share the per-band direct gains `direct[s]` and cross gains
    /// `cross[s]`.
    pub fn per_band(num_pairs: usize, direct: &[f64], cross: &[f64], snr_db: f64) -> Self {
        assert_eq!(direct.len(), cross.len(), "direct and cross gains per band");
        let s = direct.len();
        let mut gains = vec![0.0; num_pairs * num_pairs * s];
        for j in 0..num_pairs {
            for k in 0..num_pairs {
                for band in 0..s {
                    gains[(j * num_pairs + k) * s + band] = if j == k { direct[band] } else { cross[band] };
                }
            }
        }
        Self { num_pairs, num_channels: s, snr_db, gains, seed: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_pairs == 0 {
            return Err(invalid("scenario needs at least one transmitter-receiver pair"));
        }
        if self.num_channels == 0 {
            return Err(invalid("scenario needs at least one band"));
        }
        if !self.snr_db.is_finite() {
            return Err(invalid("snr_db must be finite"));
        }
        let expected = self.num_pairs * self.num_pairs * self.num_channels;
        if self.gains.len() != expected {
            return Err(invalid(format!("expected {expected} gains, got {}", self.gains.len())));
        }
        if self.gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(invalid("gains must be finite and nonnegative"));
        }
        Ok(())
    }

    #[inline]
    pub fn gain(&self, from: usize, to: usize, band: usize) -> f64 {
        self.gains[(from * self.num_pairs + to) * self.num_channels + band]
    }

    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    /// Spectral efficiency of `pair` when transmitters use `bands`.
    pub fn spectral_efficiency(&self, bands: &[usize], pair: usize) -> f64 {
        let rho = self.snr_linear();
        let band = bands[pair];
        let interference: f64 = (0..self.num_pairs)
            .filter(|&j| j != pair && bands[j] == band)
            .map(|j| self.gain(j, pair, band))
            .sum();
        let sinr = rho * self.gain(pair, pair, band) / (1.0 + rho * interference);
        (1.0 + sinr).log2()
    }

    /// Stable 64-bit fingerprint of the gains, used to check that paired
    /// comparisons saw the same realization.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the dimensions and IEEE bits.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.num_pairs as u64);
        eat(self.num_channels as u64);
        for g in &self.gains {
            eat(g.to_bits());
        }
        h
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }
}

/// The channel-selection game induced by a scenario: `S` actions per pair.
pub fn build_ic_game(scenario: &IcScenario) -> Result<NormalFormGame> {
    scenario.validate()?;
    let k = scenario.num_pairs;
    NormalFormGame::from_fn(vec![scenario.num_channels; k], |bands| {
        (0..k).map(|pair| scenario.spectral_efficiency(bands, pair)).collect()
    })
}

/// IID unit-mean exponential power gains, laid out as in [`IcScenario`].
pub fn draw_gains<R: Rng + ?Sized>(rng: &mut R, num_pairs: usize, num_channels: usize) -> Result<Vec<f64>> {
    if num_pairs == 0 || num_channels == 0 {
        return Err(invalid("gain tensor dimensions must be positive"));
    }
    Ok((0..num_pairs * num_pairs * num_channels).map(|_| rng.sample::<f64, _>(Exp1)).collect())
}

/// Sum of all players' utilities at a profile, in bps/Hz for IC games.
pub fn network_spectral_efficiency(game: &NormalFormGame, profile: &[usize]) -> Result<f64> {
    let idx = game.shape().index_of(profile)?;
    Ok((0..game.num_players()).map(|k| game.utility_at(idx, k)).sum())
}
