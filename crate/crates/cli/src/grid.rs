use std::str::FromStr;

/// Inclusive evenly spaced grid written `min:max:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + step * i as f64).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected min:max:count, got {s:?}"));
        };
        let min: f64 = lo.parse().map_err(|_| format!("bad grid minimum {lo:?}"))?;
        let max: f64 = hi.parse().map_err(|_| format!("bad grid maximum {hi:?}"))?;
        let count: usize = n.parse().map_err(|_| format!("bad grid count {n:?}"))?;
        if count == 0 || !(min <= max) || (count == 1 && min != max) {
            return Err(format!("grid {s:?} is empty or reversed"));
        }
        Ok(Grid { min, max, count })
    }
}
