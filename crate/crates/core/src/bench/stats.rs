//! Small-sample statistics for benchmark reporting: mean, sample standard
//! deviation, and Student-t 95% confidence intervals.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 when n < 2.
    pub sd: f64,
}

pub fn sample_stats(xs: &[f64]) -> SampleStats {
    let n = xs.len();
    if n == 0 {
        return SampleStats {
            n: 0,
            mean: f64::NAN,
            sd: 0.0,
        };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = if n < 2 {
        0.0
    } else {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        var.sqrt()
    };
    SampleStats { n, mean, sd }
}

/// Two-sided 95% quantiles of the t distribution for 1..=30 degrees of
/// freedom; larger df use the normal approximation.
const T95: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045, 2.042,
];

pub fn t95(df: usize) -> f64 {
    match df {
        0 => f64::INFINITY,
        1..=30 => T95[df - 1],
        _ => 1.960,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ci95 {
    pub mean: f64,
    pub half_width: f64,
}

impl Ci95 {
    pub fn lo(self) -> f64 {
        self.mean - self.half_width
    }

    pub fn hi(self) -> f64 {
        self.mean + self.half_width
    }
}

/// Confidence interval for the mean; `None` below two samples.
pub fn ci95(xs: &[f64]) -> Option<Ci95> {
    let stats = sample_stats(xs);
    if stats.n < 2 {
        return None;
    }
    let half_width = t95(stats.n - 1) * stats.sd / (stats.n as f64).sqrt();
    Some(Ci95 {
        mean: stats.mean,
        half_width,
    })
}

/// True when the two intervals share no point.
pub fn non_overlapping(a: Ci95, b: Ci95) -> bool {
    a.hi() < b.lo() || b.hi() < a.lo()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_small_sample() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let s = sample_stats(&xs);
        assert_eq!(s.mean, 3.0);
        assert!((s.sd - 2.5f64.sqrt()).abs() < 1e-12);
        let ci = ci95(&xs).unwrap();
        // t(4) = 2.776, sd = 1.5811, n = 5
        let expected = 2.776 * 2.5f64.sqrt() / 5f64.sqrt();
        assert!((ci.half_width - expected).abs() < 1e-9);
    }

    #[test]
    fn quantiles_shrink_toward_the_normal_limit() {
        assert_eq!(t95(1), 12.706);
        for df in 2..=30 {
            assert!(t95(df) < t95(df - 1));
        }
        assert_eq!(t95(31), 1.960);
        assert_eq!(t95(1000), 1.960);
        assert!(t95(30) > t95(31));
    }

    #[test]
    fn degenerate_samples() {
        assert!(ci95(&[]).is_none());
        assert!(ci95(&[7.0]).is_none());
        let ci = ci95(&[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(ci.half_width, 0.0);
        assert_eq!(ci.mean, 4.0);
    }

    #[test]
    fn overlap_is_symmetric_and_strict() {
        let a = Ci95 { mean: 10.0, half_width: 1.0 };
        let b = Ci95 { mean: 13.0, half_width: 1.0 };
        let c = Ci95 { mean: 11.5, half_width: 1.0 };
        assert!(non_overlapping(a, b));
        assert!(non_overlapping(b, a));
        assert!(!non_overlapping(a, c));
        assert!(!non_overlapping(c, b));
        // touching endpoints count as overlap
        let d = Ci95 { mean: 12.0, half_width: 1.0 };
        assert!(!non_overlapping(a, d));
    }
}
