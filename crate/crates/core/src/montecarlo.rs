//! Seeded Monte Carlo estimates of the positive-vector probability and
//! audits of the complement duality.
//!
//! Trial `i` always draws from a stream derived from `(seed, i)`, so results
//! do not depend on how trials are scheduled across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decide::{self, PointCloud, DEFAULT_TOL};
use crate::error::{domain, Result};
use crate::exact::{self, Rational};
use crate::linalg::{self, gaussian_matrix, haar_subspace, Matrix, RngStream, SamplingMethod, SubspaceBasis};

/// Default normal quantile for the Wilson interval (95%).
pub const DEFAULT_Z: f64 = 1.96;

/// Estimation route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Kernel of an `(n−k)×n` Gaussian matrix, tested with the LP.
    Kernel,
    /// Span of an `n×k` Gaussian matrix, tested with the LP.
    Span,
    /// `n` Gaussian points in `R^{n−k}`; a trial succeeds when their hull
    /// contains the origin, the complement of the half-space event.
    Hull,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Kernel => "kernel",
            Method::Span => "span",
            Method::Hull => "hull",
        }
    }

    /// Sub-stream tag, so different methods never share draws.
    fn stream_tag(self) -> u64 {
        match self {
            Method::Kernel => 0,
            Method::Span => 1,
            Method::Hull => 2,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kernel" => Ok(Method::Kernel),
            "span" => Ok(Method::Span),
            "hull" => Ok(Method::Hull),
            other => Err(format!("unknown method {other:?} (expected kernel, span or hull)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub n: usize,
    pub k: usize,
    pub method: Method,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub exact: Rational,
    pub z_score: f64,
    pub seed: u64,
    pub boundary_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub xor_holds: u64,
    pub xor_fails: u64,
    pub boundary: u64,
    pub strict_dual_holds: u64,
    pub strict_dual_fails: u64,
}

/// Wilson score interval for `successes` out of `trials`, clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials >= 1 && successes <= trials, "need 0 <= successes <= trials, trials >= 1");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // The interval always covers p̂; min/max only absorb rounding at the ends.
    let low = (center - half).clamp(0.0, 1.0).min(p);
    let high = (center + half).clamp(0.0, 1.0).max(p);
    (low, high)
}

/// `(p̂ − p)/√(p(1−p)/trials)`; zero when the reference is degenerate and
/// matched, signed infinity when it is degenerate and missed.
pub fn z_score(p_hat: f64, exact: f64, trials: u64) -> f64 {
    let var = exact * (1.0 - exact) / trials as f64;
    if var > 0.0 {
        (p_hat - exact) / var.sqrt()
    } else if p_hat == exact {
        0.0
    } else {
        (p_hat - exact).signum() * f64::INFINITY
    }
}

/// Configurable Monte Carlo run; [`estimate`] uses the defaults.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub method: Method,
    pub z: f64,
    pub tol: f64,
    pub parallel: bool,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    successes: u64,
    boundary: u64,
}

impl Tally {
    fn merge(self, other: Self) -> Self {
        Self { successes: self.successes + other.successes, boundary: self.boundary + other.boundary }
    }
}

fn run_trials<F>(trials: u64, parallel: bool, trial: F) -> Result<Tally>
where
    F: Fn(u64) -> Result<Tally> + Sync + Send,
{
    if parallel {
        (0..trials).into_par_iter().map(&trial).try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
    } else {
        (0..trials).try_fold(Tally::default(), |acc, i| Ok(acc.merge(trial(i)?)))
    }
}

impl Experiment {
    pub fn new(n: usize, k: usize, trials: u64, seed: u64, method: Method) -> Self {
        Self { n, k, trials, seed, method, z: DEFAULT_Z, tol: DEFAULT_TOL, parallel: true }
    }

    pub fn z(mut self, z: f64) -> Self {
        self.z = z;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    fn validate(&self) -> Result<()> {
        let (n, k) = (self.n, self.k);
        if n == 0 || k < 1 || k > n {
            return domain(format!("need 1 <= k <= n, got n={n}, k={k}"));
        }
        if self.trials == 0 {
            return domain("trials must be positive");
        }
        if self.method == Method::Hull && k == n {
            return domain("hull method needs k < n");
        }
        if !(self.z > 0.0) || !(self.tol > 0.0) {
            return domain("z and tol must be positive");
        }
        Ok(())
    }

    fn trial(&self, index: u64) -> Result<Tally> {
        let (n, k) = (self.n, self.k);
        let mut rng = RngStream::new(self.seed).derive(index).derive(self.method.stream_tag());
        let decision = match self.method {
            // The kernel of the empty map is all of Rⁿ.
            Method::Kernel if k == n => decide::contains_positive(&SubspaceBasis::new(Matrix::identity(n))?, self.tol)?,
            Method::Kernel => {
                decide::contains_positive(&haar_subspace::<f64, _>(n, k, &mut rng, SamplingMethod::Kernel)?, self.tol)?
            }
            Method::Span => {
                decide::contains_positive(&haar_subspace::<f64, _>(n, k, &mut rng, SamplingMethod::Span)?, self.tol)?
            }
            Method::Hull => {
                let points = PointCloud::from_columns(&gaussian_matrix::<f64, _>(n - k, n, &mut rng));
                decide::hull_contains_origin(&points, self.tol)?
            }
        };
        Ok(Tally { successes: decision.feasible as u64, boundary: decision.boundary as u64 })
    }

    pub fn run(&self) -> Result<Estimate> {
        self.validate()?;
        let tally = run_trials(self.trials, self.parallel, |i| self.trial(i))?;
        let exact = exact::p_exact(self.n, self.k)?;
        let p_hat = tally.successes as f64 / self.trials as f64;
        let (ci_low, ci_high) = wilson_interval(tally.successes, self.trials, self.z);
        Ok(Estimate {
            n: self.n,
            k: self.k,
            method: self.method,
            trials: self.trials,
            successes: tally.successes,
            p_hat,
            ci_low,
            ci_high,
            z_score: z_score(p_hat, exact.to_f64(), self.trials),
            exact,
            seed: self.seed,
            boundary_count: tally.boundary,
        })
    }
}

/// Monte Carlo estimate of the probability that a random `k`-subspace of
/// `Rⁿ` contains a positive vector, with default `z` and tolerance.
pub fn estimate(n: usize, k: usize, trials: u64, seed: u64, method: Method) -> Result<Estimate> {
    Experiment::new(n, k, trials, seed, method).run()
}

#[derive(Default, Clone, Copy)]
struct DualTally {
    xor_holds: u64,
    xor_fails: u64,
    boundary: u64,
    strict_holds: u64,
    strict_fails: u64,
}

impl DualTally {
    fn merge(self, o: Self) -> Self {
        Self {
            xor_holds: self.xor_holds + o.xor_holds,
            xor_fails: self.xor_fails + o.xor_fails,
            boundary: self.boundary + o.boundary,
            strict_holds: self.strict_holds + o.strict_holds,
            strict_fails: self.strict_fails + o.strict_fails,
        }
    }
}

fn duality_trial(n: usize, k: usize, seed: u64, index: u64, tol: f64) -> Result<DualTally> {
    let mut rng = RngStream::new(seed).derive(index);
    let method = if index % 2 == 0 { SamplingMethod::Kernel } else { SamplingMethod::Span };
    let v = haar_subspace::<f64, _>(n, k, &mut rng, method)?;
    let w = linalg::complement(&v)?;
    let in_v = decide::contains_positive(&v, tol)?;
    let in_w = decide::contains_positive(&w, tol)?;
    let strict_w = decide::contains_strictly_positive(&w, tol)?;
    if in_v.boundary || in_w.boundary || strict_w.boundary {
        return Ok(DualTally { boundary: 1, ..Default::default() });
    }
    let xor = in_v.feasible != in_w.feasible;
    let strict = in_v.feasible == !strict_w.feasible;
    Ok(DualTally {
        xor_holds: xor as u64,
        xor_fails: !xor as u64,
        strict_holds: strict as u64,
        strict_fails: !strict as u64,
        boundary: 0,
    })
}

/// Checks on random subspaces that exactly one of `V`, `V^⊥` contains a
/// positive vector, and that `V` does iff `V^⊥` has no strictly positive
/// vector. Even trials sample by kernel, odd ones by span.
pub fn duality_audit(n: usize, k: usize, trials: u64, seed: u64) -> Result<DualityReport> {
    duality_audit_with(n, k, trials, seed, DEFAULT_TOL)
}

pub fn duality_audit_with(n: usize, k: usize, trials: u64, seed: u64, tol: f64) -> Result<DualityReport> {
    if k < 1 || k >= n {
        return domain(format!("duality audit needs 1 <= k < n, got n={n}, k={k}"));
    }
    if trials == 0 {
        return domain("trials must be positive");
    }
    let t = (0..trials)
        .into_par_iter()
        .map(|i| duality_trial(n, k, seed, i, tol))
        .try_reduce(DualTally::default, |a, b| Ok(a.merge(b)))?;
    Ok(DualityReport {
        n,
        k,
        trials,
        seed,
        xor_holds: t.xor_holds,
        xor_fails: t.xor_fails,
        boundary: t.boundary,
        strict_dual_holds: t.strict_holds,
        strict_dual_fails: t.strict_fails,
    })
}
