//! Discrete variational mechanics: point particles on piecewise-linear
//! worldlines, Ξ = κ Σ Mᵢ Tᵢ per time interval, stationarity under
//! volume-preserving transfer of coordinate time between intervals, and the
//! conserved energy E = Σ Mᵢ/√(1−uᵢ²).
//!
//! Total proper time is strictly concave in the interior boundary times
//! (∂²T/∂t² = −d²/T³), so the stationary point is the unique interior
//! maximum of Ξ; relaxation is a deterministic gradient ascent with
//! backtracking.

use crate::error::{Error, Result};
use serde::Serialize;

/// One linear worldline piece. Timelike: (Δt)² > |Δx|².
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WorldlineSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub x_start: [f64; 3],
    pub x_end: [f64; 3],
    pub mass: f64,
}

impl WorldlineSegment {
    pub fn displacement(&self) -> f64 {
        let dx: f64 = self
            .x_start
            .iter()
            .zip(self.x_end.iter())
            .map(|(a, b)| (b - a) * (b - a))
            .sum();
        dx.sqrt()
    }

    /// Proper time √(Δt² − |Δx|²); `SpacelikeSegment` at or beyond the null
    /// boundary.
    pub fn proper_time(&self) -> Result<f64> {
        let dt = self.t_end - self.t_start;
        let dx = self.displacement();
        if dt <= 0.0 || dx >= dt {
            return Err(Error::SpacelikeSegment { dx, dt });
        }
        Ok((dt * dt - dx * dx).sqrt())
    }

    pub fn speed(&self) -> f64 {
        self.displacement() / (self.t_end - self.t_start)
    }
}

/// One particle: mass plus a chain of breakpoints starting at interval
/// `first_interval`. `points.len()` must equal the number of spanned
/// boundaries (active intervals + 1).
#[derive(Clone, Debug, Serialize)]
pub struct Particle {
    pub mass: f64,
    pub first_interval: usize,
    pub points: Vec<[f64; 3]>,
}

impl Particle {
    /// Interval range [first, last) this particle is active on.
    pub fn active_range(&self) -> (usize, usize) {
        (
            self.first_interval,
            self.first_interval + self.points.len().saturating_sub(1),
        )
    }
}

/// Global time slabs shared by all particles, with per-particle breakpoint
/// chains; κ scales the Ξ form.
#[derive(Clone, Debug, Serialize)]
pub struct SystemState {
    /// K+1 boundary times delimiting K intervals, strictly increasing.
    pub boundary_times: Vec<f64>,
    pub particles: Vec<Particle>,
    pub kappa: f64,
}

impl SystemState {
    pub fn intervals(&self) -> usize {
        self.boundary_times.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.intervals() == 0 {
            return Err(Error::InvalidParam("need at least one interval".into()));
        }
        if !self
            .boundary_times
            .windows(2)
            .all(|w| w[1] > w[0] && w[0].is_finite() && w[1].is_finite())
        {
            return Err(Error::InvalidParam(
                "boundary times must be strictly increasing".into(),
            ));
        }
        for (i, p) in self.particles.iter().enumerate() {
            if p.mass < 0.0 {
                return Err(Error::InvalidParam(format!("particle {i} has mass < 0")));
            }
            let (first, last) = p.active_range();
            if p.points.len() < 2 || last > self.intervals() {
                return Err(Error::InvalidParam(format!(
                    "particle {i} breakpoints do not fit the interval grid"
                )));
            }
            if first >= last {
                return Err(Error::InvalidParam(format!(
                    "particle {i} spans no interval"
                )));
            }
        }
        // every segment must be timelike
        for k in 0..self.intervals() {
            for seg in self.segments_in(k) {
                seg.proper_time()?;
            }
        }
        Ok(())
    }

    /// Segments of all particles active in interval k.
    pub fn segments_in(&self, k: usize) -> Vec<WorldlineSegment> {
        let mut out = Vec::new();
        for p in &self.particles {
            let (first, last) = p.active_range();
            if k >= first && k < last {
                let i = k - first;
                out.push(WorldlineSegment {
                    t_start: self.boundary_times[k],
                    t_end: self.boundary_times[k + 1],
                    x_start: p.points[i],
                    x_end: p.points[i + 1],
                    mass: p.mass,
                });
            }
        }
        out
    }

    /// Ξ of one interval: κ Σ Mᵢ √(Δt² − |Δx|²).
    pub fn xi_interval(&self, k: usize) -> Result<f64> {
        let mut sum = 0.0;
        for seg in self.segments_in(k) {
            sum += seg.mass * seg.proper_time()?;
        }
        Ok(self.kappa * sum)
    }

    pub fn xi_total(&self) -> Result<f64> {
        (0..self.intervals()).try_fold(0.0, |acc, k| Ok(acc + self.xi_interval(k)?))
    }

    /// Relativistic energy of interval k: Σ Mᵢ/√(1 − uᵢ²). Equals
    /// −(1/κ)·∂Ξ/∂(start time).
    pub fn energy(&self, k: usize) -> Result<f64> {
        let mut sum = 0.0;
        for seg in self.segments_in(k) {
            let u = seg.speed();
            let t = seg.proper_time()?;
            // (t_end − t_start)/T = 1/sqrt(1−u²)
            debug_assert!(u < 1.0);
            sum += seg.mass * (seg.t_end - seg.t_start) / t;
        }
        Ok(sum)
    }

    /// Analytic first variation of Ξ under the volume-preserving transfer
    /// that shrinks interval a at its start and dilates interval b at its
    /// end: ∂Ξ_a/∂t + ∂Ξ_b/∂t′ = κ·(E_b − E_a). Zero iff the energies match.
    pub fn stationarity_residual(&self, interval_a: usize, interval_b: usize) -> Result<f64> {
        let ea = self.energy(interval_a)?;
        let eb = self.energy(interval_b)?;
        Ok(self.kappa * (eb - ea))
    }

    /// Gradient of total Ξ with respect to the interior boundary time T_k
    /// (k in 1..K): κ·(E_{k−1} − E_k).
    fn grad_interior(&self, k: usize) -> Result<f64> {
        Ok(self.kappa * (self.energy(k - 1)? - self.energy(k)?))
    }

    /// |∂²Ξ/∂T_k²| = κ Σ_i (d_L²/T_L³ + d_R²/T_R³); zero only when every
    /// adjacent segment is at rest.
    fn curvature_interior(&self, k: usize) -> Result<f64> {
        let mut acc = 0.0;
        for seg in self
            .segments_in(k - 1)
            .iter()
            .chain(self.segments_in(k).iter())
        {
            let d = seg.displacement();
            let t = seg.proper_time()?;
            acc += seg.mass * d * d / (t * t * t);
        }
        Ok(self.kappa.abs() * acc)
    }

    /// Galilean boost: shifts every breakpoint by w·t at its boundary time.
    pub fn boosted(&self, w: [f64; 3]) -> SystemState {
        let mut out = self.clone();
        for p in out.particles.iter_mut() {
            let first = p.first_interval;
            for (i, x) in p.points.iter_mut().enumerate() {
                let t = self.boundary_times[first + i];
                for (xi, wi) in x.iter_mut().zip(w.iter()) {
                    *xi += wi * t;
                }
            }
        }
        out
    }
}

/// Relaxation outcome: the stationary state plus diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct RelaxReport {
    pub state: SystemState,
    pub iterations: usize,
    pub max_residual: f64,
    pub energies: Vec<f64>,
    pub xi_total: f64,
}

/// Options for the interior-time relaxation.
#[derive(Clone, Copy, Debug)]
pub struct RelaxOptions {
    pub max_iterations: usize,
    /// Convergence threshold on max |∂Ξ/∂T_k|, relative to κ·max(1, E).
    pub tolerance: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            tolerance: 1e-12,
        }
    }
}

/// Adjust interior boundary times (spatial endpoints and the total time
/// budget fixed) until Ξ is stationary; at convergence the interval energies
/// agree. Deterministic gradient ascent with backtracking; Ξ never
/// decreases across accepted iterations (it is concave in these variables).
pub fn relax_to_stationary(state: &SystemState, opts: RelaxOptions) -> Result<RelaxReport> {
    state.validate()?;
    let k_intervals = state.intervals();
    let mut current = state.clone();
    let mut xi = current.xi_total()?;

    let scale = |s: &SystemState| -> Result<f64> {
        let mut e_max: f64 = 1.0;
        for k in 0..k_intervals {
            e_max = e_max.max(s.energy(k)?);
        }
        Ok(s.kappa.abs().max(1e-300) * e_max)
    };

    let grad = |s: &SystemState| -> Result<Vec<f64>> {
        (1..k_intervals).map(|k| s.grad_interior(k)).collect()
    };

    if k_intervals < 2 {
        let energies = vec![current.energy(0)?];
        return Ok(RelaxReport {
            iterations: 0,
            max_residual: 0.0,
            energies,
            xi_total: xi,
            state: current,
        });
    }

    let mut iterations = 0;
    loop {
        let g = grad(&current)?;
        let max_resid = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if max_resid <= opts.tolerance * scale(&current)? {
            let energies: Result<Vec<f64>> = (0..k_intervals).map(|k| current.energy(k)).collect();
            return Ok(RelaxReport {
                iterations,
                max_residual: max_resid,
                energies: energies?,
                xi_total: xi,
                state: current,
            });
        }
        if iterations >= opts.max_iterations {
            return Err(Error::NoConvergence(iterations));
        }
        iterations += 1;

        // Ascent direction: gradient preconditioned by the (diagonal)
        // curvature of Ξ in each interior time.
        let mut dir = vec![0.0; g.len()];
        let mut slope = 0.0;
        for (k, gk) in g.iter().enumerate() {
            let h = current.curvature_interior(k + 1)?;
            let slab = (current.boundary_times[k + 2] - current.boundary_times[k + 1])
                .min(current.boundary_times[k + 1] - current.boundary_times[k]);
            let d = if h > 0.0 { gk / h } else { gk.signum() * slab };
            dir[k] = d;
            slope += gk * d;
        }

        // Backtracking line search on the ascent direction.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..80 {
            let mut trial = current.clone();
            for (k, d) in dir.iter().enumerate() {
                trial.boundary_times[k + 1] += step * d;
            }
            let ordered = trial.boundary_times.windows(2).all(|w| w[1] > w[0]);
            if ordered {
                if let Ok(xi_trial) = trial.xi_total() {
                    if xi_trial >= xi + 1e-4 * step * slope && xi_trial.is_finite() {
                        let moved = trial.boundary_times != current.boundary_times;
                        current = trial;
                        xi = xi_trial;
                        accepted = moved;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // Step underflow: the state is at the floating-point limit of
            // stationarity.
            return Err(Error::NoConvergence(iterations));
        }
    }
}

/// Plain-text scenario format, one directive per line:
///
/// ```text
/// # comment
/// kappa 1.0
/// times 0.0 1.0 2.0
/// particle <mass> <first-interval> x0 y0 z0 x1 y1 z1 ...
/// ```
///
/// Each particle lists one 3-vector breakpoint per spanned boundary.
pub fn parse_scenario(text: &str) -> Result<SystemState> {
    let mut kappa = 1.0;
    let mut times: Option<Vec<f64>> = None;
    let mut particles = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let parse_err = |msg: &str| Error::ScenarioParse {
            line: lineno + 1,
            msg: msg.into(),
        };
        let floats: std::result::Result<Vec<f64>, _> =
            tokens.clone().map(|t| t.parse::<f64>()).collect();
        match head {
            "kappa" => {
                let vals = floats.map_err(|_| parse_err("bad number"))?;
                if vals.len() != 1 {
                    return Err(parse_err("kappa takes one value"));
                }
                kappa = vals[0];
            }
            "times" => {
                let vals = floats.map_err(|_| parse_err("bad number"))?;
                if vals.len() < 2 {
                    return Err(parse_err("times needs at least two boundaries"));
                }
                times = Some(vals);
            }
            "particle" => {
                let vals = floats.map_err(|_| parse_err("bad number"))?;
                if vals.len() < 2 + 6 {
                    return Err(parse_err(
                        "particle needs mass, first interval and >= 2 breakpoints",
                    ));
                }
                let mass = vals[0];
                let first = vals[1];
                if first < 0.0 || first.fract() != 0.0 {
                    return Err(parse_err("first interval must be a nonnegative integer"));
                }
                let coords = &vals[2..];
                if coords.len() % 3 != 0 {
                    return Err(parse_err("breakpoints come as x y z triples"));
                }
                let points: Vec<[f64; 3]> =
                    coords.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
                particles.push(Particle {
                    mass,
                    first_interval: first as usize,
                    points,
                });
            }
            other => {
                return Err(parse_err(&format!("unknown directive '{other}'")));
            }
        }
    }

    let state = SystemState {
        boundary_times: times.ok_or(Error::ScenarioParse {
            line: 0,
            msg: "missing 'times' directive".into(),
        })?,
        particles,
        kappa,
    };
    state.validate()?;
    Ok(state)
}
