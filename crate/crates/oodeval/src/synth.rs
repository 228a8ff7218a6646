//! Seeded synthetic score generation from mixtures on `[0, 1]`.
//!
//! Serves two purposes: demo inputs for the CLI, and controlled score
//! distributions for separability studies and tests — pairs with nearly
//! identical rank metrics but very different score concentration.
//!
//! Reproducibility is part of the contract. The generator is ChaCha8
//! seeded from a `u64`; uniform doubles are produced from the top 53 bits
//! of each output word, normal deviates via the Box-Muller transform, and
//! truncated gaussians by rejection from the parent normal (never by
//! clipping, which would pile mass onto the interval edges). Identical
//! `(spec, n, seed)` therefore yields the identical sequence on every run.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::scores::{Kind, ScoreSet};

/// One mixture component with support inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentKind {
    /// Gaussian truncated to `[0, 1]`.
    TruncatedGaussian { mean: f64, stddev: f64 },
    /// Uniform on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Degenerate point mass.
    Point { value: f64 },
}

/// A weighted component; weights are normalized at sampling time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    #[serde(flatten)]
    pub kind: ComponentKind,
    pub weight: f64,
}

/// A mixture over `[0, 1]` described by its components.
///
/// Serializes as `{"components": [{"kind": "uniform", "lo": 0.0,
/// "hi": 1.0, "weight": 1.0}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub components: Vec<Component>,
}

impl SynthSpec {
    pub fn single(kind: ComponentKind) -> SynthSpec {
        SynthSpec {
            components: vec![Component { kind, weight: 1.0 }],
        }
    }

    /// Checks that the mixture is non-empty, weights are positive, and
    /// every component's support sits inside `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(EvalError::InvalidArgument {
                reason: "mixture needs at least one component".into(),
            });
        }
        for c in &self.components {
            if !(c.weight.is_finite() && c.weight > 0.0) {
                return Err(EvalError::InvalidArgument {
                    reason: format!("component weight must be positive, got {}", c.weight),
                });
            }
            match c.kind {
                ComponentKind::TruncatedGaussian { mean, stddev } => {
                    if !(0.0..=1.0).contains(&mean) || !(stddev.is_finite() && stddev > 0.0) {
                        return Err(EvalError::InvalidArgument {
                            reason: format!(
                                "truncated gaussian needs mean in [0,1] and stddev > 0, \
                                 got mean={mean} stddev={stddev}"
                            ),
                        });
                    }
                }
                ComponentKind::Uniform { lo, hi } => {
                    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
                        return Err(EvalError::InvalidArgument {
                            reason: format!("uniform needs 0 <= lo < hi <= 1, got [{lo}, {hi})"),
                        });
                    }
                }
                ComponentKind::Point { value } => {
                    if !(0.0..=1.0).contains(&value) {
                        return Err(EvalError::InvalidArgument {
                            reason: format!("point mass must lie in [0, 1], got {value}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Draws `n` values; identical `(self, n, seed)` gives identical output.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total_weight: f64 = self.components.iter().map(|c| c.weight).sum();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            // cumulative scan over normalized weights
            let pick = uniform_f64(&mut rng) * total_weight;
            let mut acc = 0.0;
            let mut chosen = self.components[self.components.len() - 1].kind;
            for c in &self.components {
                acc += c.weight;
                if pick < acc {
                    chosen = c.kind;
                    break;
                }
            }
            out.push(draw(chosen, &mut rng));
        }
        Ok(out)
    }
}

/// Uniform in `[0, 1)` from the top 53 bits of one ChaCha word.
#[inline]
fn uniform_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller; consumes two uniforms per deviate.
#[inline]
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // 1 - u keeps the logarithm away from zero
    let u1 = 1.0 - uniform_f64(rng);
    let u2 = uniform_f64(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn draw(kind: ComponentKind, rng: &mut ChaCha8Rng) -> f64 {
    match kind {
        ComponentKind::Point { value } => value,
        ComponentKind::Uniform { lo, hi } => lo + uniform_f64(rng) * (hi - lo),
        ComponentKind::TruncatedGaussian { mean, stddev } => loop {
            let x = mean + stddev * standard_normal(rng);
            if (0.0..=1.0).contains(&x) {
                break x;
            }
        },
    }
}

/// Samples a named [`ScoreSet`] from a mixture spec.
pub fn sample_scores(
    spec: &SynthSpec,
    n: usize,
    seed: u64,
    name: impl Into<String>,
    kind: Kind,
) -> Result<ScoreSet> {
    if n == 0 {
        return Err(EvalError::EmptyInput);
    }
    ScoreSet::new(name, kind, spec.sample(n, seed)?)
}

/// Built-in ID/OOD spec pairs covering characteristic score layouts.
///
/// The pairs are chosen for their metric signatures, not to match any
/// particular detector: `WellSeparated` and `AdjacentPeaks` both rank
/// essentially perfectly, but their threshold curves differ drastically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// ID mass near 0, OOD mass near 1; comfortable threshold range.
    WellSeparated,
    /// Two narrow peaks straddling one point; perfect ranking, razor-thin
    /// threshold range.
    AdjacentPeaks,
    /// Broad overlapping humps.
    HeavyOverlap,
    /// ID scores spread uniformly over the whole range.
    IdUniform,
    /// Clearly separated but wider humps.
    ModerateSeparation,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::WellSeparated,
        Preset::AdjacentPeaks,
        Preset::HeavyOverlap,
        Preset::IdUniform,
        Preset::ModerateSeparation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::WellSeparated => "well-separated",
            Preset::AdjacentPeaks => "adjacent-peaks",
            Preset::HeavyOverlap => "heavy-overlap",
            Preset::IdUniform => "id-uniform",
            Preset::ModerateSeparation => "moderate-separation",
        }
    }

    pub fn from_name(name: &str) -> Result<Preset> {
        let norm = name.trim().to_ascii_lowercase().replace('_', "-");
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| EvalError::UnknownPreset { name: name.into() })
    }
}

/// The (ID spec, OOD spec) pair behind a preset.
pub fn preset_pair(preset: Preset) -> (SynthSpec, SynthSpec) {
    use ComponentKind::*;
    let pair = |id_kind: ComponentKind, ood_kind: ComponentKind| {
        (SynthSpec::single(id_kind), SynthSpec::single(ood_kind))
    };
    match preset {
        Preset::WellSeparated => pair(
            TruncatedGaussian {
                mean: 0.05,
                stddev: 0.02,
            },
            TruncatedGaussian {
                mean: 0.95,
                stddev: 0.02,
            },
        ),
        Preset::AdjacentPeaks => pair(
            TruncatedGaussian {
                mean: 0.49,
                stddev: 0.003,
            },
            TruncatedGaussian {
                mean: 0.51,
                stddev: 0.003,
            },
        ),
        Preset::HeavyOverlap => pair(
            TruncatedGaussian {
                mean: 0.35,
                stddev: 0.2,
            },
            TruncatedGaussian {
                mean: 0.65,
                stddev: 0.2,
            },
        ),
        Preset::IdUniform => pair(
            Uniform { lo: 0.0, hi: 1.0 },
            TruncatedGaussian {
                mean: 0.85,
                stddev: 0.08,
            },
        ),
        Preset::ModerateSeparation => pair(
            TruncatedGaussian {
                mean: 0.15,
                stddev: 0.08,
            },
            TruncatedGaussian {
                mean: 0.85,
                stddev: 0.08,
            },
        ),
    }
}

/// Preset lookup by name; errors with [`EvalError::UnknownPreset`].
pub fn preset_pair_by_name(name: &str) -> Result<(SynthSpec, SynthSpec)> {
    Ok(preset_pair(Preset::from_name(name)?))
}
