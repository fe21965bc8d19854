use rayon::prelude::*;

use crate::rng::{stream_rng, Rng};

/// Runs `f` on trials `0..samples`, trial `s` getting stream `s` of `seed`.
/// Results come back in trial order regardless of the worker count.
pub fn par_trials<T: Send>(samples: u64, seed: u64, f: impl Fn(u64, &mut Rng) -> T + Sync) -> Vec<T> {
    (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s);
            f(s, &mut rng)
        })
        .collect()
}

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let (_, se) = mean_se(xs);
    se * (xs.len() as f64).sqrt()
}

/// Binomial proportion and its normal-approximation standard error.
pub fn proportion(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = successes as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

/// Three standard errors: the pre-registered slack of every statistical comparison.
pub fn three_sigma(se: f64) -> f64 {
    3.0 * se
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn mean_and_error() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample variance 5/3, se = sqrt(5/12)
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(proportion(3, 4).0, 0.75);
    }

    #[test]
    fn trials_do_not_depend_on_pool_size() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| par_trials(64, 5, |_, r| r.gen::<u64>()))
        };
        assert_eq!(run(1), run(3));
    }
}
