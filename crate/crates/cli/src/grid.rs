use std::str::FromStr;

/// Inclusive grid `lo:hi:steps` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                let x = self.lo + (self.hi - self.lo) * k as f64 / last;
                // keep decimal grids such as 0.5:0.9:5 exact in the output
                let r = (x * 1e12).round() / 1e12;
                if (r - x).abs() < 1e-15 * x.abs().max(1.0) {
                    r
                } else {
                    x
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(format!("expected lo:hi:steps, got `{s}`"));
        };
        let lo: f64 = lo.trim().parse().map_err(|e| format!("lo `{lo}`: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("hi `{hi}`: {e}"))?;
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|e| format!("steps `{steps}`: {e}"))?;
        if !lo.is_finite() || !hi.is_finite() {
            return Err("grid bounds must be finite".into());
        }
        match steps {
            0 => Err("steps must be at least 1".into()),
            1 if lo != hi => Err("a one-point grid needs lo == hi".into()),
            1 => Ok(Self { lo, hi, steps }),
            _ if lo < hi => Ok(Self { lo, hi, steps }),
            _ => Err(format!("grid must be strictly increasing, got {lo}:{hi}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands() {
        let g: Grid = "0.5:0.9:5".parse().unwrap();
        assert_eq!(g.points(), vec![0.5, 0.6, 0.7, 0.8, 0.9]);
        let g: Grid = "1:1:1".parse().unwrap();
        assert_eq!(g.points(), vec![1.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        for bad in [
            "1:0:3", "0:1", "0:1:0", "a:1:2", "0:1:x", "0:inf:2", "0:1:1",
        ] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }
}
