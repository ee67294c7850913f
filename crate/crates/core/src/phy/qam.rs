use super::C64;

/// Square Gray-free QAM constellations normalized to unit average energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bpsk" => Some(Self::Bpsk),
            "qpsk" => Some(Self::Qpsk),
            "16qam" | "qam16" => Some(Self::Qam16),
            "64qam" | "qam64" => Some(Self::Qam64),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bpsk => "bpsk",
            Self::Qpsk => "qpsk",
            Self::Qam16 => "16qam",
            Self::Qam64 => "64qam",
        }
    }

    pub fn order(self) -> usize {
        match self {
            Self::Bpsk => 2,
            Self::Qpsk => 4,
            Self::Qam16 => 16,
            Self::Qam64 => 64,
        }
    }

    /// Levels per axis; BPSK uses only the real axis.
    fn side(self) -> usize {
        match self {
            Self::Bpsk => 2,
            Self::Qpsk => 2,
            Self::Qam16 => 4,
            Self::Qam64 => 8,
        }
    }

    fn scale(self) -> f64 {
        match self {
            Self::Bpsk => 1.0,
            _ => {
                let m = self.side() as f64;
                // Mean energy of a square M-QAM on odd-integer grid: 2(M-1)/3.
                (2.0 * (m * m - 1.0) / 3.0).sqrt()
            }
        }
    }

    fn level(self, i: usize) -> f64 {
        2.0 * i as f64 - (self.side() as f64 - 1.0)
    }

    /// Constellation point for `symbol` in `0..order()`.
    pub fn map(self, symbol: usize) -> C64 {
        let symbol = symbol % self.order();
        match self {
            Self::Bpsk => C64::new(self.level(symbol), 0.0),
            _ => {
                let m = self.side();
                let s = self.scale();
                C64::new(self.level(symbol % m) / s, self.level(symbol / m) / s)
            }
        }
    }

    /// Nearest constellation point index.
    pub fn slice(self, y: C64) -> usize {
        let m = self.side();
        let pick = |x: f64| -> usize {
            let i = ((x + (m as f64 - 1.0)) / 2.0).round();
            i.clamp(0.0, (m - 1) as f64) as usize
        };
        match self {
            Self::Bpsk => pick(y.re),
            _ => {
                let s = self.scale();
                pick(y.re * s) + m * pick(y.im * s)
            }
        }
    }
}
