//! Knot type of a (possibly distorted) signature by pulling each echo back
//! to the reference torus and counting how often the track wraps.
//!
//! Only the total windings of the recovered path are used, so the unknown
//! trajectory speed drops out.
//!
//! Every point echo depends on the look angle through `cos(α - θ)`, so each
//! composite's response is mirror symmetric and the torus function satisfies
//! `U(c₁ + y, z) = U(c₁ - y, z)` (likewise in `z`). Every echo therefore has
//! up to four exact matches, and near a mirror line two of them fall inside
//! the search window. The tracker separates them with three rules:
//!
//! * candidate matches are grouped into clusters and tried nearest to the
//!   position predicted from the recent motion first;
//! * once a coordinate has moved `continuity_window / 2` cells without
//!   reversing, its direction is locked, since a constant-rank phase map
//!   composed with a linear knot never turns back;
//! * a branch that runs out of matches is abandoned and the next cluster at
//!   the most recent branching pulse is tried.
//!
//! Mirror symmetry also means the relative orientation of the two windings
//! cannot be observed; the knot is reported with both windings positive.

use num_complex::Complex;
use std::cmp::Ordering;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::KnotType;
use crate::scalar::Scalar;
use crate::signal::{Signature, TorusFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackOptions<T: Scalar = f64> {
    /// Half-width, in grid cells, of the search box around the previous match.
    pub continuity_window: usize,
    /// Largest acceptable distance between an echo and the reference surface
    /// near its matched cell. Defaults to 1.5 times the interpolation bound
    /// of the reference tori, combined over frequencies; raise it for noisy
    /// measurements.
    pub residual_tolerance: Option<T>,
    /// Cap on abandoned branches, per pulse.
    pub max_backtracks_per_pulse: usize,
}

impl<T: Scalar> Default for PullbackOptions<T> {
    fn default() -> Self {
        Self {
            continuity_window: 8,
            residual_tolerance: None,
            max_backtracks_per_pulse: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PullbackResult<T: Scalar = f64> {
    pub knot: KnotType,
    /// Signed windings of the tracked path in its own (arbitrary) orientation.
    pub windings: (i64, i64),
    pub max_residual: T,
    pub rms_residual: T,
    pub tolerance: T,
    /// Matched grid cell per pulse.
    pub path: Vec<(usize, usize)>,
}

/// Reference tori stacked cell-major so a cell's frequencies are contiguous.
struct Stack<T: Scalar> {
    rows: usize,
    cols: usize,
    k: usize,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> Stack<T> {
    fn new(tori: &[TorusFunction<T>]) -> Self {
        let (rows, cols) = tori[0].grid_size();
        let k = tori.len();
        let mut values = vec![Complex::new(T::zero(), T::zero()); rows * cols * k];
        for (f, torus) in tori.iter().enumerate() {
            for (cell, v) in torus.values().iter().enumerate() {
                values[cell * k + f] = *v;
            }
        }
        Self {
            rows,
            cols,
            k,
            values,
        }
    }

    fn cell(&self, i: isize, j: isize) -> usize {
        let i = i.rem_euclid(self.rows as isize) as usize;
        let j = j.rem_euclid(self.cols as isize) as usize;
        i * self.cols + j
    }

    fn slice(&self, cell: usize) -> &[Complex<T>] {
        &self.values[cell * self.k..(cell + 1) * self.k]
    }

    /// Largest distance across a grid cell diagonal.
    fn quantization(&self) -> T {
        (0..self.rows as isize)
            .into_par_iter()
            .map(|i| {
                let mut worst = T::zero();
                for j in 0..self.cols as isize {
                    let d1 = self.node_dist(self.cell(i, j), self.slice(self.cell(i + 1, j + 1)));
                    let d2 = self.node_dist(self.cell(i + 1, j), self.slice(self.cell(i, j + 1)));
                    worst = worst.max(d1).max(d2);
                }
                worst
            })
            .reduce(T::zero, T::max)
    }

    fn node_dist(&self, cell: usize, echo: &[Complex<T>]) -> T {
        self.slice(cell)
            .iter()
            .zip(echo)
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr())
            .sqrt()
    }

    /// Distance from `echo` to the patch of surface around node `(i, j)`
    /// reaching a little over half a cell in each direction.
    ///
    /// The patch is the separable quadratic through the node and its four
    /// neighbours. Nodes further than `gate` from the echo are scored by the
    /// node distance alone.
    fn surface_dist(&self, i: isize, j: isize, echo: &[Complex<T>], gate: T) -> T {
        let node = self.cell(i, j);
        let d0 = self.node_dist(node, echo);
        if d0 > gate {
            return d0;
        }
        let c64 = |z: Complex<T>| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy());
        let u0 = self.slice(node);
        let (yp, ym) = (self.slice(self.cell(i + 1, j)), self.slice(self.cell(i - 1, j)));
        let (zp, zm) = (self.slice(self.cell(i, j + 1)), self.slice(self.cell(i, j - 1)));
        // R(a, b) = |r - Σ c_k v_k|² with c = (a, b, a², b²)
        let mut rr = 0.0;
        let mut proj = [0.0f64; 4];
        let mut gram = [[0.0f64; 4]; 4];
        for f in 0..self.k {
            let (c, py, my, pz, mz) = (c64(u0[f]), c64(yp[f]), c64(ym[f]), c64(zp[f]), c64(zm[f]));
            let r = c64(echo[f]) - c;
            let v = [
                (py - my) * 0.5,
                (pz - mz) * 0.5,
                (py - c * 2.0 + my) * 0.5,
                (pz - c * 2.0 + mz) * 0.5,
            ];
            rr += r.norm_sqr();
            for a in 0..4 {
                proj[a] += (v[a].conj() * r).re;
                for b in a..4 {
                    gram[a][b] += (v[a].conj() * v[b]).re;
                }
            }
        }
        for a in 0..4 {
            for b in 0..a {
                gram[a][b] = gram[b][a];
            }
        }
        let eval = |a: f64, b: f64| {
            let c = [a, b, a * a, b * b];
            let mut s = rr;
            for x in 0..4 {
                s -= 2.0 * c[x] * proj[x];
                s += c[x] * c[x] * gram[x][x];
                for y in x + 1..4 {
                    s += 2.0 * c[x] * c[y] * gram[x][y];
                }
            }
            s
        };
        // Gauss-Newton on the patch coordinates, kept inside the cell
        let solve = |mut a: f64, mut b: f64| {
            for _ in 0..20 {
                let c = [a, b, a * a, b * b];
                let rho: Vec<f64> = (0..4)
                    .map(|i| proj[i] - (0..4).map(|j| c[j] * gram[i][j]).sum::<f64>())
                    .collect();
                let ga = rho[0] + 2.0 * a * rho[2];
                let gb = rho[1] + 2.0 * b * rho[3];
                let haa = gram[0][0] + 4.0 * a * gram[0][2] + 4.0 * a * a * gram[2][2];
                let hbb = gram[1][1] + 4.0 * b * gram[1][3] + 4.0 * b * b * gram[3][3];
                let hab = gram[0][1] + 2.0 * b * gram[0][3] + 2.0 * a * gram[2][1]
                    + 4.0 * a * b * gram[2][3];
                let det = haa * hbb - hab * hab;
                let (da, db) = if det > 1e-12 * haa * hbb {
                    ((ga * hbb - gb * hab) / det, (gb * haa - ga * hab) / det)
                } else {
                    (
                        if haa > 0.0 { ga / haa } else { 0.0 },
                        if hbb > 0.0 { gb / hbb } else { 0.0 },
                    )
                };
                let (na, nb) = ((a + da).clamp(-REACH, REACH), (b + db).clamp(-REACH, REACH));
                let moved = (na - a).abs().max((nb - b).abs());
                a = na;
                b = nb;
                if moved < 1e-12 {
                    break;
                }
            }
            (eval(a, b), a, b)
        };
        const REACH: f64 = 0.55;
        const STEPS: i32 = 3;
        let step = REACH / STEPS as f64;
        let mut coarse = (eval(0.0, 0.0), 0.0, 0.0);
        for a in -STEPS..=STEPS {
            for b in -STEPS..=STEPS {
                let (a, b) = (a as f64 * step, b as f64 * step);
                let s = eval(a, b);
                if s < coarse.0 {
                    coarse = (s, a, b);
                }
            }
        }
        let from_node = solve(0.0, 0.0);
        let from_grid = solve(coarse.1, coarse.2);
        let best = [coarse, from_node, from_grid]
            .into_iter()
            .fold((f64::INFINITY, 0.0, 0.0), |acc, x| if x.0 < acc.0 { x } else { acc });
        T::lit(best.0.max(0.0).sqrt())
    }
}

fn wrap_cells(d: isize, n: usize) -> isize {
    let n = n as isize;
    let r = d.rem_euclid(n);
    if r > n / 2 {
        r - n
    } else {
        r
    }
}

/// Tracker state after a pulse has been matched.
#[derive(Debug, Clone, Copy)]
struct Step<T> {
    /// Unwrapped position in cells.
    pos: (isize, isize),
    residual: T,
    /// Displacement since the last reversal, per coordinate.
    run: (isize, isize),
    lock: (isize, isize),
}

/// A pulse where more than one cluster of matches was admissible.
struct Branch {
    pulse: usize,
    rest: Vec<(isize, isize)>,
}

/// Candidate cells for one pulse, one per cluster, best first.
fn candidates<T: Scalar>(
    stack: &Stack<T>,
    echo: &[Complex<T>],
    prev: &[Step<T>],
    window: isize,
    tolerance: T,
    gate: T,
) -> Vec<(isize, isize)> {
    let last = prev.last().expect("tracking starts from a matched pulse");
    let (yi, zi) = last.pos;
    let back = prev.len().saturating_sub(1).min(4);
    let then = prev[prev.len() - 1 - back].pos;
    let (vy, vz) = if back == 0 {
        (0.0, 0.0)
    } else {
        (
            (yi - then.0) as f64 / back as f64,
            (zi - then.1) as f64 / back as f64,
        )
    };
    let predicted = (yi as f64 + vy, zi as f64 + vz);

    let mut hits: Vec<(isize, isize, T)> = Vec::new();
    for dy in -window..=window {
        if dy * last.lock.0 < 0 {
            continue;
        }
        for dz in -window..=window {
            if dz * last.lock.1 < 0 {
                continue;
            }
            let d = stack.surface_dist(yi + dy, zi + dz, echo, gate);
            if d <= tolerance {
                hits.push((yi + dy, zi + dz, d));
            }
        }
    }
    let miss = |p: (isize, isize)| {
        let (a, b) = (p.0 as f64 - predicted.0, p.1 as f64 - predicted.1);
        a * a + b * b
    };
    // every hit lies on the surface to within the tolerance, so the motion
    // prior decides; the score only breaks ties
    hits.sort_by(|a, b| {
        miss((a.0, a.1))
            .total_cmp(&miss((b.0, b.1)))
            .then(a.2.partial_cmp(&b.2).unwrap_or(Ordering::Equal))
            .then((a.0, a.1).cmp(&(b.0, b.1)))
    });

    // clusters in order of their nearest member; each is represented by the
    // best fitting hit next to that member
    let far = (window / 2).max(1);
    let mut seeds: Vec<(isize, isize)> = Vec::new();
    for &(y, z, _) in &hits {
        let near = |rep: &(isize, isize)| (rep.0 - y).abs().max((rep.1 - z).abs()) <= far;
        if !seeds.iter().any(near) {
            seeds.push((y, z));
        }
    }
    let clusters = seeds
        .into_iter()
        .map(|s| {
            hits.iter()
                .filter(|h| (h.0 - s.0).abs() <= 1 && (h.1 - s.1).abs() <= 1)
                .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap_or(Ordering::Equal))
                .map_or(s, |h| (h.0, h.1))
        })
        .collect();
    clusters
}

/// Track every pulse of `sig` across the reference tori (one per signature
/// frequency, in order) and return the knot traced out.
pub fn phase_pullback_knot<T: Scalar>(
    sig: &Signature<T>,
    reference: &[TorusFunction<T>],
    opts: &PullbackOptions<T>,
) -> Result<PullbackResult<T>> {
    if reference.len() != sig.n_freqs() {
        return Err(Error::Dimension(format!(
            "{} reference tori for {} signature frequencies",
            reference.len(),
            sig.n_freqs()
        )));
    }
    let grid = reference[0].grid_size();
    for (torus, &f) in reference.iter().zip(sig.frequencies()) {
        if torus.grid_size() != grid {
            return Err(Error::Dimension("reference tori use different grids".into()));
        }
        if (torus.frequency - f).abs() > T::lit(1e-9) * (T::one() + f.abs()) {
            return Err(Error::Axis(format!(
                "reference torus at {} Hz paired with signature frequency {f} Hz",
                torus.frequency
            )));
        }
    }
    if sig.pulses() < 2 {
        return Err(Error::Dimension("pullback needs at least two pulses".into()));
    }
    if opts.continuity_window == 0 {
        return Err(Error::Domain("continuity window must be at least one cell".into()));
    }

    let stack = Stack::new(reference);
    let tolerance = opts
        .residual_tolerance
        .unwrap_or_else(|| surface_tolerance(reference));
    let gate = stack.quantization() + tolerance;
    let window = opts.continuity_window as isize;
    let (rows, cols) = grid;
    let settle = (window / 2).max(1);

    // first pulse: global search
    let echo0 = sig.row(0);
    let (start, best0) = (0..rows * cols)
        .into_par_iter()
        .map(|c| {
            let (i, j) = ((c / cols) as isize, (c % cols) as isize);
            (c, stack.surface_dist(i, j, echo0, gate))
        })
        .reduce(
            || (usize::MAX, T::infinity()),
            |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    if best0 > tolerance {
        return Err(Error::Mismatch {
            residual: best0.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    let origin = ((start / cols) as isize, (start % cols) as isize);
    let mut steps = vec![Step {
        pos: origin,
        residual: best0,
        run: (0, 0),
        lock: (0, 0),
    }];
    let mut branches: Vec<Branch> = Vec::new();
    let mut budget = opts.max_backtracks_per_pulse.saturating_mul(sig.pulses());
    let mut deepest = 0usize;

    let advance = |steps: &mut Vec<Step<T>>, pos: (isize, isize)| {
        let echo = sig.row(steps.len());
        let residual = stack.surface_dist(pos.0, pos.1, echo, gate);
        let prev = *steps.last().expect("nonempty");
        let extend = |run: isize, step: isize| if run * step < 0 { step } else { run + step };
        let run = (
            extend(prev.run.0, pos.0 - prev.pos.0),
            extend(prev.run.1, pos.1 - prev.pos.1),
        );
        let mut lock = prev.lock;
        if lock.0 == 0 && run.0.abs() >= settle {
            lock.0 = run.0.signum();
        }
        if lock.1 == 0 && run.1.abs() >= settle {
            lock.1 = run.1.signum();
        }
        steps.push(Step {
            pos,
            residual,
            run,
            lock,
        });
    };

    while steps.len() < sig.pulses() {
        let pulse = steps.len();
        let mut found = candidates(&stack, sig.row(pulse), &steps, window, tolerance, gate);
        if found.is_empty() {
            deepest = deepest.max(pulse);
            // abandon this branch for the next cluster at the latest fork
            let Some(mut fork) = branches.pop() else {
                return Err(Error::Continuity {
                    pulse,
                    residual: best_window_residual(&stack, sig.row(pulse), &steps, window, gate)
                        .to_f64_lossy(),
                    tolerance: tolerance.to_f64_lossy(),
                });
            };
            if budget == 0 {
                return Err(Error::Ambiguity {
                    pulse: fork.pulse,
                    best: tolerance.to_f64_lossy(),
                    rival: tolerance.to_f64_lossy(),
                });
            }
            budget -= 1;
            steps.truncate(fork.pulse);
            let next = fork.rest.remove(0);
            if !fork.rest.is_empty() {
                branches.push(fork);
            }
            advance(&mut steps, next);
            continue;
        }
        let first = found.remove(0);
        if !found.is_empty() {
            branches.push(Branch { pulse, rest: found });
        }
        advance(&mut steps, first);
    }
    let _ = deepest;

    // close the loop back to the first match
    let first = steps[0].pos;
    let last = steps.last().expect("nonempty").pos;
    let total_y = last.0 - first.0 + wrap_cells(first.0 - last.0, rows);
    let total_z = last.1 - first.1 + wrap_cells(first.1 - last.1, cols);
    debug_assert_eq!(total_y.rem_euclid(rows as isize), 0);
    debug_assert_eq!(total_z.rem_euclid(cols as isize), 0);
    let windings = (
        (total_y / rows as isize) as i64,
        (total_z / cols as isize) as i64,
    );
    let knot = KnotType::new(windings.0.abs(), windings.1.abs())?;

    let residuals: Vec<T> = steps.iter().map(|s| s.residual).collect();
    let max_residual = residuals.iter().copied().fold(T::zero(), T::max);
    let rms_residual = (residuals.iter().fold(T::zero(), |a, r| a + *r * *r)
        / T::from_usize_lossy(residuals.len()))
    .sqrt();
    let path = steps
        .iter()
        .map(|s| {
            let c = stack.cell(s.pos.0, s.pos.1);
            (c / cols, c % cols)
        })
        .collect();
    Ok(PullbackResult {
        knot,
        windings,
        max_residual,
        rms_residual,
        tolerance,
        path,
    })
}

/// Smallest residual anywhere in the admissible window, for error reports.
fn best_window_residual<T: Scalar>(
    stack: &Stack<T>,
    echo: &[Complex<T>],
    prev: &[Step<T>],
    window: isize,
    gate: T,
) -> T {
    let last = prev.last().expect("nonempty");
    let mut best = T::infinity();
    for dy in -window..=window {
        if dy * last.lock.0 < 0 {
            continue;
        }
        for dz in -window..=window {
            if dz * last.lock.1 < 0 {
                continue;
            }
            best = best.min(stack.surface_dist(last.pos.0 + dy, last.pos.1 + dz, echo, gate));
        }
    }
    best
}

/// Default match tolerance: 1.5 times the first-order surface model error,
/// combined over frequencies.
fn surface_tolerance<T: Scalar>(reference: &[TorusFunction<T>]) -> T {
    let sum = reference.iter().fold(T::zero(), |acc, u| {
        let b = u.interpolation_bound();
        acc + b * b
    });
    T::lit(1.5) * sum.sqrt()
}


