use std::fmt;
use std::str::FromStr;

use rand::Rng;

/// Measured quantity. The discriminant is the on-wire stream type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StreamType {
    HeartRate = 1,
    Respiration = 2,
    SpO2 = 3,
    BodyTemp = 4,
    Ecg = 5,
}

impl StreamType {
    pub const ALL: [StreamType; 5] =
        [StreamType::HeartRate, StreamType::Respiration, StreamType::SpO2, StreamType::BodyTemp, StreamType::Ecg];

    pub fn name(self) -> &'static str {
        match self {
            StreamType::HeartRate => "hr",
            StreamType::Respiration => "resp",
            StreamType::SpO2 => "spo2",
            StreamType::BodyTemp => "temp",
            StreamType::Ecg => "ecg",
        }
    }

    pub fn from_u8(b: u8) -> Option<Self> {
        StreamType::ALL.into_iter().find(|s| *s as u8 == b)
    }

    pub fn spec(self) -> SensorSpec {
        let (interval_us, sample_bytes) = match self {
            StreamType::HeartRate => (5_000_000, 1),
            StreamType::Respiration => (10_000_000, 1),
            StreamType::SpO2 => (1_000_000, 3),
            StreamType::BodyTemp => (60_000_000, 3),
            StreamType::Ecg => (2_000, 3),
        };
        SensorSpec { stream: self, interval_us, sample_bytes }
    }
}

impl fmt::Display for StreamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StreamType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        StreamType::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| format!("unknown stream type `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SensorSpec {
    pub stream: StreamType,
    /// Time between two samples.
    pub interval_us: u64,
    pub sample_bytes: usize,
}

impl SensorSpec {
    /// Number of samples taken at `k * interval` inside `[from_us, to_us)`.
    pub fn samples_in(&self, from_us: u64, to_us: u64) -> u64 {
        let first = from_us.div_ceil(self.interval_us);
        let end = to_us.div_ceil(self.interval_us);
        end.saturating_sub(first)
    }

    /// Synthetic reading for sample number `k`.
    pub fn sample(&self, k: u64, rng: &mut impl Rng) -> Vec<u8> {
        let jitter = |rng: &mut dyn rand::RngCore, span: i64| rng.random_range(-span..=span);
        match self.stream {
            StreamType::HeartRate => vec![(72 + jitter(rng, 4)) as u8],
            StreamType::Respiration => vec![(16 + jitter(rng, 2)) as u8],
            // saturation %, pulse, perfusion index x10
            StreamType::SpO2 => vec![(97 + jitter(rng, 1)) as u8, (72 + jitter(rng, 4)) as u8, (35 + jitter(rng, 5)) as u8],
            StreamType::BodyTemp => le24((3670 + jitter(rng, 15)) as u32),
            StreamType::Ecg => {
                // crude PQRST shape at 72 bpm around a 24-bit midpoint
                let phase = (k * 2_000 % 833_333) as f64 / 833_333.0;
                let wave = 1500.0 * (-((phase - 0.30) / 0.012).powi(2)).exp()
                    + 250.0 * (-((phase - 0.55) / 0.05).powi(2)).exp()
                    + 120.0 * (-((phase - 0.15) / 0.03).powi(2)).exp();
                le24(((0x80_0000 as f64 + wave) as i64 + jitter(rng, 8)) as u32)
            }
        }
    }
}

fn le24(v: u32) -> Vec<u8> {
    v.to_le_bytes()[..3].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn table() {
        let per_sec: Vec<(u64, usize)> = StreamType::ALL
            .iter()
            .map(|s| {
                let sp = s.spec();
                (sp.samples_in(0, 60_000_000), sp.sample_bytes)
            })
            .collect();
        assert_eq!(per_sec, [(12, 1), (6, 1), (60, 3), (1, 3), (30_000, 3)]);
        // 500 reads of 3 bytes a second
        assert_eq!(StreamType::Ecg.spec().samples_in(7_000_000, 8_000_000) * 3, 1500);
        assert_eq!(StreamType::HeartRate.spec().samples_in(1_000_000, 2_000_000), 0);
        assert_eq!(StreamType::HeartRate.spec().samples_in(5_000_000, 6_000_000), 1);
    }

    #[test]
    fn sample_sizes_and_names() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        for s in StreamType::ALL {
            for k in 0..50 {
                assert_eq!(s.spec().sample(k, &mut rng).len(), s.spec().sample_bytes);
            }
            assert_eq!(s.name().parse::<StreamType>().unwrap(), s);
            assert_eq!(StreamType::from_u8(s as u8), Some(s));
        }
        assert_eq!(StreamType::from_u8(0xFF), None);
    }
}
