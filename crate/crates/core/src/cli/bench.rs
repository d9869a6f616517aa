use std::io::Write;
use std::time::{Duration, Instant};

use super::{read_dataset, BenchArgs, CliError};
use crate::geometry::TriangulationProblem;
use crate::triangulate::{instance_seeds, synth_instance, triangulate, TriangulateConfig};

/// Nearest-rank percentile of an ascending slice.
fn percentile(sorted: &[Duration], q: f64) -> Duration {
    if sorted.is_empty() {
        return Duration::ZERO;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

pub(super) fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let problems: Vec<TriangulationProblem> = match &a.input {
        Some(path) => read_dataset(path)?
            .iter()
            .enumerate()
            .map(|(k, p)| {
                p.to_problem().map_err(|source| CliError::Geometry { context: format!("line {}", k + 1), source })
            })
            .collect::<Result<_, _>>()?,
        None => instance_seeds(a.seed, a.n).into_iter().map(|s| synth_instance(s, a.noise).problem).collect(),
    };
    let cfg = TriangulateConfig::default();
    // Warm caches and the allocator before timing.
    for p in problems.iter().take(100) {
        let _ = triangulate(p, &cfg);
    }
    let mut times = Vec::with_capacity(problems.len());
    let mut failures = 0usize;
    let start = Instant::now();
    for p in &problems {
        let t0 = Instant::now();
        let ok = triangulate(p, &cfg).is_ok();
        times.push(t0.elapsed());
        failures += usize::from(!ok);
    }
    let total = start.elapsed();
    times.sort();
    let us = |d: Duration| d.as_secs_f64() * 1e6;
    let mean = if times.is_empty() { 0.0 } else { us(total) / times.len() as f64 };
    writeln!(out, "instances  {}", times.len())?;
    writeln!(out, "failures   {failures}")?;
    writeln!(out, "mean_us    {mean:.2}")?;
    for (label, q) in [("p50_us", 0.5), ("p90_us", 0.9), ("p99_us", 0.99), ("max_us", 1.0)] {
        writeln!(out, "{label:<10} {:.2}", us(percentile(&times, q)))?;
    }
    writeln!(out, "total_ms   {:.2}", total.as_secs_f64() * 1e3)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let v: Vec<Duration> = (1..=10).map(Duration::from_micros).collect();
        assert_eq!(percentile(&v, 0.5), Duration::from_micros(5));
        assert_eq!(percentile(&v, 0.9), Duration::from_micros(9));
        assert_eq!(percentile(&v, 1.0), Duration::from_micros(10));
        assert_eq!(percentile(&[], 0.5), Duration::ZERO);
    }
}
