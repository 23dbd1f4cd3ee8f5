//! Per-segment rigid-body equilibrium of the loaded chain.
//!
//! Each segment contributes two force equations and one moment equation. The
//! unknowns are the pin reactions at `J_0..J_(n−1)`, the couples the wearer's
//! finger transmits across the interior joints `J_1..J_(n−1)`, and the
//! fingertip force. The system is assembled densely; its rank comes from a
//! column-pivoted QR and a rank-deficient layout is reported together with
//! its null direction.
//!
//! Nothing here uses the closed-form moment sums; the loads are rebuilt as
//! force vectors applied at points on each segment.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::geometry::{Configuration, PhalangeDesign, Vec2};
use crate::statics::TensionProfile;

/// A force applied at a point of one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AppliedLoad {
    pub force: Vec2,
    pub point: Vec2,
}

/// How the terminal tension is oriented when the loads are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReading {
    /// Along `-(sin β, cos β)`, parallel to the fingertip force line.
    #[default]
    TipDirection,
    /// Along the last cable run, toward the previous passage.
    AlongCable,
}

/// How the fingertip force enters the unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TipMode {
    /// One scalar along the prescribed tip direction; all interior joints carry couples.
    #[default]
    FixedDirection,
    /// Two free components; the distal-most pin is frictionless (no couple). Needs `n ≥ 2`.
    FreeDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadedChain {
    pub configuration: Configuration,
    /// Loads per segment, index 0 is segment 1.
    pub applied_loads: Vec<Vec<AppliedLoad>>,
    pub tip_direction: Vec2,
}

impl LoadedChain {
    /// Rebuilds the cable loads of the model as point forces.
    pub fn from_model(
        design: &PhalangeDesign,
        configuration: &Configuration,
        tensions: &TensionProfile,
        kink_forces: &[f64],
        anchor_offset: f64,
        reading: TerminalReading,
    ) -> Result<Self> {
        let n = design.segments();
        if kink_forces.len() != n || tensions.frictions.len() != n || configuration.holes.len() != n
        {
            return Err(ModelError::Shape {
                what: "loaded chain",
                expected: n,
                got: kink_forces.len(),
            });
        }
        let beta = configuration.theta[n - 1] - design.segment().tip_inclination();
        let tip_direction = Vec2::new(beta.sin(), beta.cos());

        let mut applied_loads: Vec<Vec<AppliedLoad>> = (0..n)
            .map(|i| {
                let hole = configuration.holes[i];
                let (st, ct) = configuration.theta[i].sin_cos();
                let (sp, cp) = configuration.phi[i].sin_cos();
                vec![
                    AppliedLoad {
                        force: Vec2::new(st, ct) * kink_forces[i],
                        point: hole,
                    },
                    AppliedLoad {
                        force: Vec2::new(cp, sp) * -tensions.frictions[i],
                        point: hole,
                    },
                ]
            })
            .collect();

        let last_hole = configuration.holes[n - 1];
        let theta_n = configuration.theta[n - 1];
        let last_axis = Vec2::new(theta_n.cos(), -theta_n.sin());
        let anchor = last_hole + last_axis * anchor_offset;
        let pull = match reading {
            TerminalReading::TipDirection => -tip_direction,
            TerminalReading::AlongCable => {
                let toward = if n >= 2 {
                    configuration.holes[n - 2] - last_hole
                } else {
                    -last_axis
                };
                toward * (1.0 / toward.norm())
            }
        };
        applied_loads[n - 1].push(AppliedLoad {
            force: pull * tensions.terminal_tension,
            point: anchor,
        });

        Ok(Self {
            configuration: configuration.clone(),
            applied_loads,
            tip_direction,
        })
    }

    pub fn segments(&self) -> usize {
        self.configuration.segments()
    }

    /// Largest applied force magnitude, used to scale residual tolerances.
    pub fn load_scale(&self) -> f64 {
        self.applied_loads
            .iter()
            .flatten()
            .map(|l| l.force.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    /// Fingertip force along the prescribed direction (signed).
    pub p_tip: f64,
    pub tip_force: Vec2,
    /// Reaction on segment `i+1` at `J_i` from its proximal neighbour (or the ground at `O`).
    pub pin_reactions: Vec<Vec2>,
    /// Couple transmitted across `J_1..J_(n−1)` onto the distal segment (N·mm).
    pub joint_couples: Vec<f64>,
    /// Largest per-equation residual (N or N·mm).
    pub residual: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOptions {
    pub mode: TipMode,
    /// Residual tolerance relative to `max(1, largest load × chain length)`.
    pub relative_tolerance: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            mode: TipMode::FixedDirection,
            relative_tolerance: 1e-9,
        }
    }
}

struct Layout {
    n: usize,
    couples: usize,
    tip_unknowns: usize,
}

impl Layout {
    fn reaction(&self, joint: usize) -> usize {
        2 * joint
    }
    // Couple at interior joint `j` (1-based).
    fn couple(&self, joint: usize) -> Option<usize> {
        (joint >= 1 && joint <= self.couples).then(|| 2 * self.n + joint - 1)
    }
    fn tip(&self) -> usize {
        2 * self.n + self.couples
    }
    fn unknowns(&self) -> usize {
        self.tip() + self.tip_unknowns
    }
}

// Eigenvector of AᵀA with the smallest eigenvalue.
fn null_direction(a: &DMatrix<f64>) -> Vec<f64> {
    let eig = (a.transpose() * a).symmetric_eigen();
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    eig.eigenvectors.column(idx).iter().copied().collect()
}

/// Solves the chain statics for the fingertip force and internal reactions.
pub fn solve_equilibrium(chain: &LoadedChain, opts: &OracleOptions) -> Result<OracleSolution> {
    let cfg = &chain.configuration;
    let n = cfg.segments();
    if chain.applied_loads.len() != n || cfg.joints.len() != n + 1 {
        return Err(ModelError::Shape {
            what: "applied loads",
            expected: n,
            got: chain.applied_loads.len(),
        });
    }
    let layout = match opts.mode {
        TipMode::FixedDirection => Layout {
            n,
            couples: n - 1,
            tip_unknowns: 1,
        },
        TipMode::FreeDirection => {
            if n < 2 {
                return Err(ModelError::RankDeficient {
                    rank: 3,
                    unknowns: 4,
                    direction: vec![],
                });
            }
            Layout {
                n,
                couples: n - 2,
                tip_unknowns: 2,
            }
        }
    };
    let rows = 3 * n;
    let cols = layout.unknowns();
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);

    for s in 0..n {
        let (fx, fy, m) = (3 * s, 3 * s + 1, 3 * s + 2);
        // Moments about the proximal pin of the segment keep the lever arms short.
        let pivot = cfg.joints[s];

        let prox = layout.reaction(s);
        a[(fx, prox)] += 1.0;
        a[(fy, prox + 1)] += 1.0;
        // r × R with r = 0 at the pivot.

        if s + 1 < n {
            let dist = layout.reaction(s + 1);
            let r = cfg.joints[s + 1] - pivot;
            a[(fx, dist)] -= 1.0;
            a[(fy, dist + 1)] -= 1.0;
            // −(r × R) = −(r.x R.y − r.y R.x)
            a[(m, dist)] += r.y;
            a[(m, dist + 1)] -= r.x;
        }
        if let Some(c) = layout.couple(s) {
            a[(m, c)] += 1.0;
        }
        if let Some(c) = layout.couple(s + 1) {
            a[(m, c)] -= 1.0;
        }

        for load in &chain.applied_loads[s] {
            b[fx] -= load.force.x;
            b[fy] -= load.force.y;
            b[m] -= (load.point - pivot).cross(load.force);
        }

        if s + 1 == n {
            let r = cfg.tip - pivot;
            let t = layout.tip();
            match opts.mode {
                TipMode::FixedDirection => {
                    let d = chain.tip_direction;
                    a[(fx, t)] += d.x;
                    a[(fy, t)] += d.y;
                    a[(m, t)] += r.cross(d);
                }
                TipMode::FreeDirection => {
                    a[(fx, t)] += 1.0;
                    a[(fy, t + 1)] += 1.0;
                    a[(m, t)] -= r.y;
                    a[(m, t + 1)] += r.x;
                }
            }
        }
    }

    // Scale columns so reaction, couple and tip unknowns are comparable.
    let length_scale = cfg
        .joints
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .sum::<f64>()
        .max(cfg.tip.norm())
        .max(1.0);
    let mut col_scale = DVector::<f64>::from_element(cols, 1.0);
    for j in 1..=layout.couples {
        if let Some(c) = layout.couple(j) {
            col_scale[c] = length_scale;
        }
    }
    let scaled = DMatrix::from_fn(rows, cols, |i, j| a[(i, j)] * col_scale[j]);

    // Rank from column-pivoted QR; the solve itself uses full-pivot LU.
    let qr = scaled.clone().col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..cols).map(|i| r[(i, i)].abs()).collect();
    let rank_tol = diag[0] * 1e-12 * rows.max(cols) as f64;
    let rank = diag.iter().filter(|&&d| d > rank_tol).count();
    if rank < cols {
        return Err(ModelError::RankDeficient {
            rank,
            unknowns: cols,
            direction: null_direction(&scaled),
        });
    }
    let y = scaled
        .clone()
        .full_piv_lu()
        .solve(&b)
        .ok_or_else(|| ModelError::RankDeficient {
            rank,
            unknowns: cols,
            direction: null_direction(&scaled),
        })?;
    let x = y.component_mul(&col_scale);

    let residual = (&a * &x - &b).amax();
    let tolerance = opts.relative_tolerance * (chain.load_scale() * length_scale).max(1.0);
    if !(residual <= tolerance) {
        return Err(ModelError::Inconsistent {
            residual,
            tolerance,
        });
    }

    let pin_reactions = (0..n)
        .map(|j| Vec2::new(x[layout.reaction(j)], x[layout.reaction(j) + 1]))
        .collect();
    let joint_couples = (1..n)
        .map(|j| layout.couple(j).map_or(0.0, |c| x[c]))
        .collect();
    let t = layout.tip();
    let (p_tip, tip_force) = match opts.mode {
        TipMode::FixedDirection => (x[t], chain.tip_direction * x[t]),
        TipMode::FreeDirection => {
            let f = Vec2::new(x[t], x[t + 1]);
            (f.dot(chain.tip_direction), f)
        }
    };

    Ok(OracleSolution {
        p_tip,
        tip_force,
        pin_reactions,
        joint_couples,
        residual,
        rank,
    })
}

/// Net moment about the knuckle of every external load, including the fingertip force.
///
/// The ground reaction at `O` has no arm, so a consistent solution leaves zero.
pub fn whole_chain_moment_check(chain: &LoadedChain, solution: &OracleSolution) -> f64 {
    let applied: f64 = chain
        .applied_loads
        .iter()
        .flatten()
        .map(|l| l.point.cross(l.force))
        .sum();
    (applied + chain.configuration.tip.cross(solution.tip_force)).abs()
}
