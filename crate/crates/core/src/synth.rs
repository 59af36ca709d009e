//! Synthetic feature bundles for tests, fixtures and demos.
//!
//! Nothing here models real perception output; the generators only produce
//! inputs with controllable structure (static scenes, planted quality drops,
//! random small bundles, graded "model quality").

use rand::Rng;

use crate::bundle::{
    ClassProbabilities, FeatureBundle, FrameQualitySeries, InstanceTrack, KeypointTrack, MovementMode, PointTrajectory,
    SceneContext, SCHEMA_VERSION,
};
use crate::skeleton::{SkeletonRegistry, SkeletonSchema};

/// Id of the small probe skeleton returned by [`probe_schema`].
pub const PROBE_SCHEMA: &str = "probe4";

/// Four keypoints in a chain: three length components and two angle components.
pub fn probe_schema() -> SkeletonSchema {
    SkeletonSchema {
        schema_id: PROBE_SCHEMA.into(),
        keypoint_names: ["a", "b", "c", "d"].map(String::from).to_vec(),
        length_components: vec![[0, 1], [1, 2], [2, 3]],
        angle_components: vec![[0, 1, 2], [1, 2, 3]],
        reference_lengths: None,
    }
}

/// Builtin registry plus the probe skeleton.
pub fn registry_with_probe() -> SkeletonRegistry {
    let mut reg = SkeletonRegistry::builtin();
    reg.insert(probe_schema()).expect("probe schema is valid");
    reg
}

fn scene(scenario: &str) -> SceneContext {
    let mode = scenario
        .split('/')
        .next()
        .and_then(|m| m.parse().ok())
        .unwrap_or(MovementMode::BiologicalMotion);
    SceneContext {
        scenario_id: scenario.into(),
        movement_mode: mode,
    }
}

/// A bundle skeleton with only the quality series filled in.
pub fn empty_bundle(video_id: &str, scenario: &str, q: Vec<f64>) -> FeatureBundle {
    FeatureBundle {
        schema_version: SCHEMA_VERSION.into(),
        video_id: video_id.into(),
        prompt_id: format!("prompt-{video_id}"),
        frame_count: q.len(),
        fps: 8.0,
        width: 320,
        height: 240,
        scene: scene(scenario),
        quality: FrameQualitySeries::new(q),
        keypoint_tracks: vec![],
        instance_tracks: vec![],
        trajectories: vec![],
        class_probs: None,
    }
}

/// A T-pose-ish human skeleton centred at `(cx, cy)` with unit scale `s`.
pub fn human_pose(cx: f64, cy: f64, s: f64) -> Vec<[f64; 2]> {
    let offsets: [[f64; 2]; 17] = [
        [0.0, -9.0],
        [-0.5, -9.5],
        [0.5, -9.5],
        [-1.0, -9.0],
        [1.0, -9.0],
        [-2.0, -7.0],
        [2.0, -7.0],
        [-3.5, -4.5],
        [3.5, -4.5],
        [-4.0, -2.0],
        [4.0, -2.0],
        [-1.5, 0.0],
        [1.5, 0.0],
        [-1.7, 4.0],
        [1.7, 4.0],
        [-1.8, 8.0],
        [1.8, 8.0],
    ];
    offsets.iter().map(|o| [cx + o[0] * s, cy + o[1] * s]).collect()
}

/// Nothing moves: constant quality, a rigid human, one static active subject and
/// one always-present instance. PAS is 0; every other metric is 1.
pub fn static_bundle(video_id: &str, scenario: &str, frames: usize) -> FeatureBundle {
    let mut b = empty_bundle(video_id, scenario, vec![0.7; frames]);
    let pose = human_pose(160.0, 120.0, 8.0);
    b.keypoint_tracks.push(KeypointTrack {
        subject_id: "person".into(),
        schema_id: "human17".into(),
        positions: vec![pose; frames],
        visibility: vec![vec![true; 17]; frames],
    });
    b.trajectories.push(PointTrajectory {
        subject_id: "person".into(),
        active: true,
        points: vec![vec![[150.0, 100.0], [170.0, 140.0]]; frames],
        visible: vec![vec![true; 2]; frames],
    });
    b.instance_tracks.push(InstanceTrack::from_boxes(
        "person",
        vec![Some([120.0, 40.0, 200.0, 200.0]); frames],
    ));
    b.class_probs = Some(ClassProbabilities {
        p: [0.0, 0.0, 0.0, 0.0, 1.0],
    });
    b
}

/// Every metric at its ceiling: perfect class, constant quality, a rigid human
/// translating by `step` pixels per frame, one instance present throughout.
/// PAS saturates on every transition, so it reaches `(T-1)/T`.
pub fn ideal_bundle(video_id: &str, scenario: &str, frames: usize, step: f64) -> FeatureBundle {
    let mut b = static_bundle(video_id, scenario, frames);
    for (t, pose) in b.keypoint_tracks[0].positions.iter_mut().enumerate() {
        *pose = human_pose(100.0 + step * t as f64, 120.0, 8.0);
    }
    for (t, pts) in b.trajectories[0].points.iter_mut().enumerate() {
        *pts = vec![[100.0 + step * t as f64, 100.0], [110.0 + step * t as f64, 140.0]];
    }
    b
}

/// A bundle whose positive quality drops are exactly `drops`: the series alternates
/// between 1 and `1 - d`.
pub fn planted_drop_bundle(video_id: &str, scenario: &str, drops: &[f64]) -> FeatureBundle {
    let mut q = Vec::with_capacity(drops.len() * 2);
    for &d in drops {
        q.push(1.0);
        q.push(1.0 - d);
    }
    if q.len() < 2 {
        q.resize(2, 1.0);
    }
    empty_bundle(video_id, scenario, q)
}

fn random_walk<R: Rng>(rng: &mut R, frames: usize, start: [f64; 2], step: f64) -> Vec<[f64; 2]> {
    let mut p = start;
    (0..frames)
        .map(|_| {
            let cur = p;
            p = [
                p[0] + rng.random_range(-step..=step),
                p[1] + rng.random_range(-step..=step),
            ];
            cur
        })
        .collect()
}

fn random_simplex<R: Rng>(rng: &mut R) -> [f64; 5] {
    let mut w = [0.0; 5];
    for v in &mut w {
        *v = rng.random_range(0.0..1.0);
    }
    if rng.random_bool(0.2) {
        w[rng.random_range(0..5)] += 3.0;
    }
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Presence pattern with a mix of steady, vanishing, appearing and flickering tracks.
fn random_presence<R: Rng>(rng: &mut R, frames: usize) -> Vec<bool> {
    match rng.random_range(0..5) {
        0 => vec![true; frames],
        1 => {
            let cut = rng.random_range(1..frames);
            (0..frames).map(|t| t < cut).collect()
        }
        2 => {
            let cut = rng.random_range(1..frames);
            (0..frames).map(|t| t >= cut).collect()
        }
        _ => {
            let mut p: Vec<bool> = (0..frames).map(|_| rng.random_bool(0.7)).collect();
            if !p.iter().any(|&x| x) {
                p[0] = true;
            }
            p
        }
    }
}

/// A random instance track; boxes wander and sometimes shrink steadily or hug an edge.
fn random_instance<R: Rng>(rng: &mut R, id: &str, frames: usize, width: f64, height: f64) -> InstanceTrack {
    let present = random_presence(rng, frames);
    let mut cx = rng.random_range(0.0..width);
    let mut cy = rng.random_range(0.0..height);
    let mut half = rng.random_range(1.0..width.min(height) / 4.0);
    let (vx, vy) = (rng.random_range(-15.0..15.0), rng.random_range(-15.0..15.0));
    let shrink = rng.random_bool(0.3);
    let boxes = present
        .iter()
        .map(|&on| {
            let b = [
                (cx - half).clamp(-width, 2.0 * width),
                (cy - half).clamp(-height, 2.0 * height),
                (cx + half).clamp(-width, 2.0 * width) + 1e-3,
                (cy + half).clamp(-height, 2.0 * height) + 1e-3,
            ];
            cx += vx;
            cy += vy;
            half = if shrink {
                half * 0.6
            } else {
                (half + rng.random_range(-1.0..1.0)).max(0.5)
            };
            on.then_some(b)
        })
        .collect();
    InstanceTrack::from_boxes(id, boxes)
}

/// A small random bundle: at most 10 frames, 5 instances, 3 trajectories and two
/// probe-skeleton tracks (5 components each). Visibility and presence are random.
pub fn random_small_bundle<R: Rng>(rng: &mut R, video_id: &str) -> FeatureBundle {
    let frames = rng.random_range(2..=10);
    let q: Vec<f64> = (0..frames)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.5
            } else {
                rng.random_range(0.0..=1.0)
            }
        })
        .collect();
    let scenario = ["biological_motion/walking", "fluid_dynamics/pouring", "unseen/x"][rng.random_range(0..3)];
    let mut b = empty_bundle(video_id, scenario, q);
    b.width = rng.random_range(64..=256);
    b.height = rng.random_range(64..=256);
    let (w, h) = (f64::from(b.width), f64::from(b.height));

    for k in 0..rng.random_range(0..=2) {
        let centre = [rng.random_range(0.0..w), rng.random_range(0.0..h)];
        let positions: Vec<Vec<[f64; 2]>> = {
            let walks: Vec<Vec<[f64; 2]>> = (0..4)
                .map(|j| {
                    let start = [centre[0] + 10.0 * j as f64, centre[1] + rng.random_range(-10.0..10.0)];
                    let step = rng.random_range(0.0..4.0);
                    random_walk(rng, frames, start, step)
                })
                .collect();
            (0..frames).map(|t| walks.iter().map(|wk| wk[t]).collect()).collect()
        };
        let visibility = (0..frames)
            .map(|_| (0..4).map(|_| rng.random_bool(0.85)).collect())
            .collect();
        b.keypoint_tracks.push(KeypointTrack {
            subject_id: format!("subject{k}"),
            schema_id: PROBE_SCHEMA.into(),
            positions,
            visibility,
        });
    }

    for k in 0..rng.random_range(0..=5) {
        b.instance_tracks
            .push(random_instance(rng, &format!("obj{k}"), frames, w, h));
    }

    for k in 0..rng.random_range(1..=3) {
        let n_points = rng.random_range(1..=4);
        let step = rng.random_range(0.0..12.0);
        let walks: Vec<Vec<[f64; 2]>> = (0..n_points)
            .map(|_| {
                let start = [rng.random_range(0.0..w), rng.random_range(0.0..h)];
                random_walk(rng, frames, start, step)
            })
            .collect();
        b.trajectories.push(PointTrajectory {
            subject_id: format!("mover{k}"),
            active: k == 0 || rng.random_bool(0.5),
            points: (0..frames).map(|t| walks.iter().map(|wk| wk[t]).collect()).collect(),
            visible: (0..frames)
                .map(|_| (0..n_points).map(|_| rng.random_bool(0.8)).collect())
                .collect(),
        });
    }

    if rng.random_bool(0.8) {
        b.class_probs = Some(ClassProbabilities { p: random_simplex(rng) });
    }
    b
}

/// A bundle whose defects scale with `defect` in `[0,1]`: quality drops, limb
/// stretching, a vanishing instance and reduced motion all grow with it.
pub fn graded_bundle<R: Rng>(
    rng: &mut R,
    video_id: &str,
    prompt_id: &str,
    scenario: &str,
    defect: f64,
) -> FeatureBundle {
    let frames = 16;
    let q: Vec<f64> = (0..frames)
        .map(|t| {
            let base = 0.8 - 0.02 * t as f64 * defect;
            let glitch = if rng.random_bool(defect * 0.4) {
                rng.random_range(0.1..0.3)
            } else {
                0.0
            };
            (base - glitch + rng.random_range(-0.01..0.01)).clamp(0.0, 1.0)
        })
        .collect();
    let mut b = empty_bundle(video_id, scenario, q);
    b.prompt_id = prompt_id.into();

    let speed = 6.0 * (1.0 - 0.8 * defect);
    let positions = (0..frames)
        .map(|t| {
            let mut pose = human_pose(80.0 + speed * t as f64, 120.0, 8.0);
            for p in &mut pose {
                p[0] += rng.random_range(-0.3..0.3);
                p[1] += rng.random_range(-0.3..0.3);
            }
            if rng.random_bool(defect * 0.5) {
                // A wrist flies off: stretches the forearm and bends the elbow.
                let k = if rng.random_bool(0.5) { 9 } else { 10 };
                pose[k][0] += rng.random_range(10.0..30.0);
                pose[k][1] += rng.random_range(10.0..30.0);
            }
            pose
        })
        .collect();
    b.keypoint_tracks.push(KeypointTrack {
        subject_id: "person".into(),
        schema_id: "human17".into(),
        positions,
        visibility: vec![vec![true; 17]; frames],
    });

    b.trajectories.push(PointTrajectory {
        subject_id: "person".into(),
        active: true,
        points: (0..frames)
            .map(|t| {
                let x = 80.0 + speed * t as f64;
                vec![[x, 100.0], [x + 5.0, 130.0], [x - 4.0, 150.0]]
            })
            .collect(),
        visible: vec![vec![true; 3]; frames],
    });
    b.trajectories.push(PointTrajectory {
        subject_id: "leaves".into(),
        active: false,
        points: (0..frames).map(|t| vec![[20.0 + 3.0 * t as f64, 20.0]]).collect(),
        visible: vec![vec![true]; frames],
    });

    b.instance_tracks.push(InstanceTrack::from_boxes(
        "person",
        (0..frames)
            .map(|t| {
                let x = 80.0 + speed * t as f64;
                Some([x - 40.0, 40.0, x + 40.0, 200.0])
            })
            .collect(),
    ));
    let vanish_at = if rng.random_bool(defect) {
        Some(rng.random_range(4..12))
    } else {
        None
    };
    b.instance_tracks.push(InstanceTrack::from_boxes(
        "ball",
        (0..frames)
            .map(|t| match vanish_at {
                Some(v) if t >= v => None,
                _ => Some([250.0, 180.0, 270.0, 200.0]),
            })
            .collect(),
    ));

    let centre = (1.0 - defect).clamp(0.0, 1.0) * 4.0;
    let mut p = [0.0; 5];
    for (i, v) in p.iter_mut().enumerate() {
        *v = (-(i as f64 - centre).powi(2) / 1.5).exp();
    }
    let s: f64 = p.iter().sum();
    b.class_probs = Some(ClassProbabilities { p: p.map(|v| v / s) });
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_bundles_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..300 {
            random_small_bundle(&mut rng, &format!("v{i}")).validate().unwrap();
        }
        for i in 0..20 {
            graded_bundle(
                &mut rng,
                &format!("g{i}"),
                "p",
                "biological_motion/walking",
                i as f64 / 19.0,
            )
            .validate()
            .unwrap();
        }
        static_bundle("s", "x", 4).validate().unwrap();
        ideal_bundle("i", "x", 4, 3.0).validate().unwrap();
        planted_drop_bundle("d", "x", &[0.2, 0.4]).validate().unwrap();
    }

    #[test]
    fn probe_schema_is_valid() {
        probe_schema().validate().unwrap();
        assert_eq!(probe_schema().components().len(), 5);
    }
}
