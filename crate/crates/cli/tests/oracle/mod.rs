//! Naive transcriptions of the score formulas, written without reusing any of the
//! library's helpers. Slow and direct on purpose.

use std::collections::HashMap;

use motionbench_core::bundle::{FeatureBundle, InstanceTrack};
use motionbench_core::skeleton::SkeletonSchema;

pub const G: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Tolerances the oracle looks up itself.
pub struct Tolerances {
    pub mss: HashMap<String, f64>,
    pub mss_default: f64,
    pub pas: HashMap<String, f64>,
    pub pas_default: f64,
    pub length: f64,
    pub angle: f64,
    pub cover: f64,
    pub margin_fraction: f64,
    pub depth_window: usize,
    pub min_area_fraction: f64,
}

impl Tolerances {
    fn mss_for(&self, scenario: &str) -> f64 {
        *self.mss.get(scenario).unwrap_or(&self.mss_default)
    }

    fn pas_for(&self, scenario: &str) -> f64 {
        *self.pas.get(scenario).unwrap_or(&self.pas_default)
    }
}

pub fn cas(p: &[f64; 5]) -> f64 {
    let mut s = 0.0;
    for i in 0..5 {
        s += p[i] * G[i];
    }
    s
}

pub fn mss(q: &[f64], tau: f64) -> Option<f64> {
    let t = q.len();
    if t < 2 {
        return None;
    }
    let mut bad = 0;
    for i in 1..t {
        if q[i - 1] - q[i] > tau {
            bad += 1;
        }
    }
    Some(1.0 - bad as f64 / t as f64)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn joint_angle(a: [f64; 2], j: [f64; 2], b: [f64; 2]) -> Option<f64> {
    let (ux, uy) = (a[0] - j[0], a[1] - j[1]);
    let (vx, vy) = (b[0] - j[0], b[1] - j[1]);
    if (ux == 0.0 && uy == 0.0) || (vx == 0.0 && vy == 0.0) {
        return None;
    }
    Some(vy.atan2(vx) - uy.atan2(ux))
}

/// Smallest rotation between two angles, in `[0, π]`.
fn angle_gap(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(std::f64::consts::TAU);
    if d > std::f64::consts::PI {
        d = std::f64::consts::TAU - d;
    }
    d
}

/// `(observed, intact)` cell counts over every known-schema keypoint track.
pub fn ois_counts(b: &FeatureBundle, schemas: &[SkeletonSchema], tol: &Tolerances) -> (usize, usize) {
    let mut observed = 0;
    let mut intact = 0;
    for track in &b.keypoint_tracks {
        let Some(schema) = schemas.iter().find(|s| s.schema_id == track.schema_id) else {
            continue;
        };
        let frames = track.positions.len();
        let vis = |t: usize, ks: &[usize]| ks.iter().all(|&k| track.visibility[t][k]);
        for (ci, pair) in schema.length_components.iter().enumerate() {
            let reference = match &schema.reference_lengths {
                Some(r) => Some(r[ci]),
                None => {
                    let mut ls = Vec::new();
                    for t in 0..frames {
                        if vis(t, pair) {
                            ls.push(dist(track.positions[t][pair[0]], track.positions[t][pair[1]]));
                        }
                    }
                    ls.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let n = ls.len();
                    let m = match n {
                        0 => None,
                        _ if n % 2 == 1 => Some(ls[n / 2]),
                        _ => Some(0.5 * (ls[n / 2 - 1] + ls[n / 2])),
                    };
                    m.filter(|&m| m > 0.0)
                }
            };
            let Some(reference) = reference else { continue };
            for t in 1..frames {
                if vis(t - 1, pair) && vis(t, pair) {
                    let l0 = dist(track.positions[t - 1][pair[0]], track.positions[t - 1][pair[1]]);
                    let l1 = dist(track.positions[t][pair[0]], track.positions[t][pair[1]]);
                    observed += 1;
                    if (l1 - l0).abs() / reference <= tol.length {
                        intact += 1;
                    }
                }
            }
        }
        for tri in &schema.angle_components {
            for t in 1..frames {
                if !(vis(t - 1, tri) && vis(t, tri)) {
                    continue;
                }
                let p0 = &track.positions[t - 1];
                let p1 = &track.positions[t];
                let (Some(a0), Some(a1)) = (
                    joint_angle(p0[tri[0]], p0[tri[1]], p0[tri[2]]),
                    joint_angle(p1[tri[0]], p1[tri[1]], p1[tri[2]]),
                ) else {
                    continue;
                };
                observed += 1;
                if angle_gap(a1, a0) <= tol.angle {
                    intact += 1;
                }
            }
        }
    }
    (observed, intact)
}

pub fn pas(b: &FeatureBundle, tau: f64) -> Option<f64> {
    let active: Vec<_> = b.trajectories.iter().filter(|t| t.active).collect();
    if active.is_empty() {
        return None;
    }
    let frames = active[0].points.len();
    let mut total = 0.0;
    for t in 1..frames {
        let mut sum = 0.0;
        let mut n = 0;
        for tr in &active {
            for k in 0..tr.points[t].len() {
                if tr.visible[t - 1][k] && tr.visible[t][k] {
                    sum += dist(tr.points[t][k], tr.points[t - 1][k]);
                    n += 1;
                }
            }
        }
        let d = if n > 0 { sum / n as f64 } else { 0.0 };
        total += if d / tau < 1.0 { d / tau } else { 1.0 };
    }
    Some(total / frames as f64)
}

fn covered_fraction(s: [f64; 4], c: [f64; 4]) -> f64 {
    let w = (s[2].min(c[2]) - s[0].max(c[0])).max(0.0);
    let h = (s[3].min(c[3]) - s[1].max(c[1])).max(0.0);
    let area = (s[2] - s[0]).max(0.0) * (s[3] - s[1]).max(0.0);
    if area > 0.0 {
        w * h / area
    } else {
        0.0
    }
}

fn near_edge_moving_out(c: [f64; 2], v: [f64; 2], w: f64, h: f64, frac: f64) -> bool {
    let m = frac * w.min(h);
    (c[0] <= m && v[0] < 0.0)
        || (c[0] >= w - m && v[0] > 0.0)
        || (c[1] <= m && v[1] < 0.0)
        || (c[1] >= h - m && v[1] > 0.0)
}

/// Whether a single presence change at frame `t` (first frame of the new state)
/// is excused by occlusion, boundary or depth.
pub fn change_excused(inst: &InstanceTrack, all: &[InstanceTrack], t: usize, w: f64, h: f64, tol: &Tolerances) -> bool {
    let disappear = inst.present[t - 1] && !inst.present[t];
    let (seen, hidden) = if disappear { (t - 1, t) } else { (t, t - 1) };

    // occlusion
    if let Some(sb) = inst.bbox[seen] {
        for other in all {
            if other.object_id == inst.object_id {
                continue;
            }
            if let Some(ob) = other.bbox[hidden] {
                if covered_fraction(sb, ob) >= tol.cover {
                    return true;
                }
            }
        }
    }

    // boundary: needs a second visible frame on the seen side
    let neighbour = if disappear { seen.checked_sub(1) } else { Some(seen + 1) };
    if let Some(n) = neighbour.filter(|&n| n < inst.present.len() && inst.present[n]) {
        if let (Some(cs), Some(cn)) = (inst.centroid[seen], inst.centroid[n]) {
            let v = [cs[0] - cn[0], cs[1] - cn[1]];
            if near_edge_moving_out(cs, v, w, h, tol.margin_fraction) {
                return true;
            }
        }
    }

    // depth: areas nearest the change, ordered away from it, must strictly grow
    let mut areas = Vec::new();
    if disappear {
        let mut f = seen as isize;
        while f >= 0 && areas.len() < tol.depth_window {
            if let Some(a) = inst.area[f as usize] {
                areas.push(a);
            }
            f -= 1;
        }
    } else {
        let mut f = seen;
        while f < inst.present.len() && areas.len() < tol.depth_window {
            if let Some(a) = inst.area[f] {
                areas.push(a);
            }
            f += 1;
        }
    }
    let mut growing = areas.len() >= 2;
    for i in 1..areas.len() {
        if areas[i] <= areas[i - 1] {
            growing = false;
        }
    }
    growing && areas[0] < tol.min_area_fraction * w * h
}

/// Ids of instances with an unexcused presence change.
pub fn tcs_anomalous(all: &[InstanceTrack], w: f64, h: f64, tol: &Tolerances) -> Vec<String> {
    let mut out = Vec::new();
    for inst in all {
        let mut ok = true;
        for t in 1..inst.present.len() {
            if inst.present[t] != inst.present[t - 1] && !change_excused(inst, all, t, w, h, tol) {
                ok = false;
            }
        }
        if !ok {
            out.push(inst.object_id.clone());
        }
    }
    out
}

pub fn tcs(all: &[InstanceTrack], w: f64, h: f64, tol: &Tolerances) -> Option<f64> {
    if all.is_empty() {
        return None;
    }
    Some(1.0 - tcs_anomalous(all, w, h, tol).len() as f64 / all.len() as f64)
}

/// All five scores for one bundle, `None` where the score is undefined.
pub fn scores(b: &FeatureBundle, schemas: &[SkeletonSchema], tol: &Tolerances) -> [Option<f64>; 5] {
    let scenario = &b.scene.scenario_id;
    let (observed, intact) = ois_counts(b, schemas, tol);
    [
        b.class_probs.as_ref().map(|c| cas(&c.p)),
        mss(&b.quality.q, tol.mss_for(scenario)),
        (observed > 0).then(|| intact as f64 / observed as f64),
        pas(b, tol.pas_for(scenario)),
        tcs(&b.instance_tracks, f64::from(b.width), f64::from(b.height), tol),
    ]
}
