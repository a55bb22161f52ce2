//! Deterministic synthetic traces.
//!
//! A generator spec is a name followed by `key=value` parameters:
//!
//! ```text
//! ramp peak=120.0226 duration=20 dt=0.01
//! pursuit gap_min=0.6864
//! obstacle gap_min=0.6864 err_max=548.0303
//! ```
//!
//! Every generator places its documented extremum exactly at one sample;
//! the seeded noise only ever moves other samples away from it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Trace, TraceError};

const MAX_SAMPLES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `speed` ramps up to `peak`, then eases off.
    Ramp,
    /// Five cars `y1..y5`; the gap `y5 - y4` bottoms out at `gap_min`.
    Pursuit,
    /// Desired and actual positions `d_pos_x`, `v_pos_x` and obstacle
    /// distance `d2obs`; `d_pos_x - v_pos_x` peaks at `err_max` and `d2obs`
    /// bottoms out at `gap_min`.
    Obstacle,
}

impl Generator {
    fn keys(self) -> &'static [(&'static str, f64)] {
        match self {
            Generator::Ramp => &[("peak", 120.0), ("duration", 20.0), ("dt", 0.01), ("noise", 0.2)],
            Generator::Pursuit => &[("gap_min", 0.6864), ("duration", 100.0), ("dt", 0.1), ("noise", 0.05)],
            Generator::Obstacle => &[
                ("gap_min", 0.6864),
                ("err_max", 548.0303),
                ("duration", 60.0),
                ("dt", 0.1),
                ("noise", 0.05),
            ],
        }
    }
}

/// A parsed generator spec with every parameter resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub generator: Generator,
    pub params: BTreeMap<String, f64>,
}

impl SynthSpec {
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let bad = |m: String| TraceError::BadSpec(m);
        let mut words = text.split_whitespace();
        let generator = match words.next() {
            Some("ramp") => Generator::Ramp,
            Some("pursuit") => Generator::Pursuit,
            Some("obstacle") => Generator::Obstacle,
            Some(other) => return Err(bad(format!("unknown generator `{other}`"))),
            None => return Err(bad("empty spec".into())),
        };
        let mut given = BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| bad(format!("expected key=value, found `{w}`")))?;
            if !generator.keys().iter().any(|(name, _)| *name == k) {
                return Err(bad(format!("unknown parameter `{k}`")));
            }
            let v: f64 = v
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| bad(format!("`{k}` needs a finite number")))?;
            if given.insert(k.to_string(), v).is_some() {
                return Err(bad(format!("`{k}` given twice")));
            }
        }
        let mut params = BTreeMap::new();
        for (k, default) in generator.keys() {
            params.insert(k.to_string(), given.get(*k).copied().unwrap_or(*default));
        }
        let spec = SynthSpec { generator, params };
        spec.validate()?;
        Ok(spec)
    }

    fn get(&self, key: &str) -> f64 {
        self.params[key]
    }

    fn validate(&self) -> Result<(), TraceError> {
        let (duration, dt, noise) = (self.get("duration"), self.get("dt"), self.get("noise"));
        if duration <= 0.0 {
            return Err(TraceError::BadSpec("duration must be positive".into()));
        }
        if dt <= 0.0 {
            return Err(TraceError::BadSpec("dt must be positive".into()));
        }
        if dt > duration {
            return Err(TraceError::BadSpec("dt exceeds duration".into()));
        }
        if noise < 0.0 {
            return Err(TraceError::BadSpec("noise must be non-negative".into()));
        }
        let n = duration / dt;
        if n + 1.0 > MAX_SAMPLES as f64 {
            return Err(TraceError::BadSpec(format!("more than {MAX_SAMPLES} samples")));
        }
        if self.generator == Generator::Ramp && self.get("peak") <= 0.0 {
            return Err(TraceError::BadSpec("peak must be positive".into()));
        }
        if self.generator == Generator::Obstacle {
            if self.get("err_max") <= 0.0 {
                return Err(TraceError::BadSpec("err_max must be positive".into()));
            }
            if self.samples() < 3 {
                return Err(TraceError::BadSpec("obstacle needs at least three samples".into()));
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        (self.get("duration") / self.get("dt") + 1e-9).floor() as usize + 1
    }

    pub fn generate(&self, seed: u64) -> Trace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.samples();
        let dt = self.get("dt");
        let amp = self.get("noise");
        let ts: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let mut jitter = || if amp > 0.0 { rng.gen_range(0.0..amp) } else { 0.0 };
        let at = |frac: f64| ((n - 1) as f64 * frac).round() as usize;
        let signals = match self.generator {
            Generator::Ramp => {
                let peak = self.get("peak");
                let kp = at(0.75).max(1);
                let tp = ts[kp];
                let tail = ts[n - 1] - tp + dt;
                let speed = (0..n)
                    .map(|k| {
                        let e = jitter();
                        if k == kp {
                            peak
                        } else if k < kp {
                            (peak * ts[k] / tp - e).min(peak)
                        } else {
                            (peak - 0.1 * peak * (ts[k] - tp) / tail - e).min(peak)
                        }
                    })
                    .collect();
                vec![("speed".to_string(), speed)]
            }
            Generator::Pursuit => {
                let gap_min = self.get("gap_min");
                let km = at(0.6);
                let mut cols: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(n)).collect();
                for k in 0..n {
                    let y4 = 15.0 * ((k as f64 - km as f64) * dt);
                    let d = (k as f64 - km as f64) * dt;
                    let gap = gap_min + 0.01 + 0.5 * (d / 10.0).abs().min(8.0) + jitter();
                    let y5 = if k == km { gap_min } else { y4 + gap };
                    let y3 = y4 - 5.0 - jitter();
                    let y2 = y3 - 5.0 - jitter();
                    let y1 = y2 - 5.0 - jitter();
                    for (c, v) in cols.iter_mut().zip([y1, y2, y3, y4, y5]) {
                        c.push(v);
                    }
                }
                cols.into_iter().enumerate().map(|(j, c)| (format!("y{}", j + 1), c)).collect()
            }
            Generator::Obstacle => {
                let gap_min = self.get("gap_min");
                let err_max = self.get("err_max");
                let (ke, km) = (at(0.3), at(0.7));
                let w = 0.1 * ts[n - 1];
                let (mut d_pos, mut v_pos, mut d2obs) = (Vec::new(), Vec::new(), Vec::new());
                for k in 0..n {
                    let v = 2.0 * ((k as f64 - ke as f64) * dt);
                    let de = ((ts[k] - ts[ke]).abs() / w).min(1.0);
                    let err = err_max - 0.45 * err_max * de - jitter() * err_max * 1e-3;
                    let dm = ((ts[k] - ts[km]).abs() / w).min(1.0);
                    let gap = gap_min + 0.01 + 5.0 * dm + jitter();
                    if k == ke {
                        v_pos.push(0.0);
                        d_pos.push(err_max);
                    } else {
                        v_pos.push(v);
                        d_pos.push(v + err.min(err_max - 1e-9 * err_max));
                    }
                    d2obs.push(if k == km { gap_min } else { gap });
                }
                vec![
                    ("d_pos_x".to_string(), d_pos),
                    ("v_pos_x".to_string(), v_pos),
                    ("d2obs".to_string(), d2obs),
                ]
            }
        };
        Trace::new(ts, signals).expect("generators produce valid traces")
    }
}

/// Parse `spec` and generate its trace for `seed`.
pub fn synth(spec: &str, seed: u64) -> Result<Trace, TraceError> {
    Ok(SynthSpec::parse(spec)?.generate(seed))
}
