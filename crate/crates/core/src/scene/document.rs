//! TOML scene documents.
//!
//! ```toml
//! [bounds]
//! min = [0.0, 0.0]
//! max = [30.0, 30.0]
//!
//! [[targets]]
//! id = 0
//! kind = "rect"            # or "circle"
//! center = [10.0, 10.0]
//! width = 3.0              # rect only
//! height = 2.0             # rect only
//! rotation_deg = 0.0       # rect only, optional
//! radius = 1.5             # circle only
//! ref_count = 4            # optional, default 4
//! ref_points = [[x, y]]    # optional, overrides ref_count
//!
//! [trajectory]
//! waypoints = [[5.0, 5.0], [25.0, 5.0]]
//! speed = 1.0
//! step_interval = 0.5
//! ```

use std::path::Path;

use serde::Deserialize;

use super::{ExtendedTarget, Scene, ShapeSpec, Trajectory, DEFAULT_REFERENCE_COUNT};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scene::Aabb;

/// Built-in layout: 8 rectangles and 2 circles around a 20 m square loop.
pub const DEFAULT_SCENE_TOML: &str = include_str!("../../data/default_scene.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    bounds: BoundsDoc,
    #[serde(default)]
    targets: Vec<TargetDoc>,
    trajectory: TrajectoryDoc,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsDoc {
    min: [f64; 2],
    max: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum TargetDoc {
    #[serde(rename = "rect")]
    Rect {
        id: u32,
        center: [f64; 2],
        width: f64,
        height: f64,
        #[serde(default)]
        rotation_deg: f64,
        ref_count: Option<usize>,
        ref_points: Option<Vec<[f64; 2]>>,
    },
    #[serde(rename = "circle")]
    Circle {
        id: u32,
        center: [f64; 2],
        radius: f64,
        ref_count: Option<usize>,
        ref_points: Option<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryDoc {
    waypoints: Vec<[f64; 2]>,
    speed: f64,
    step_interval: f64,
}

impl TargetDoc {
    fn into_target(self) -> Result<ExtendedTarget> {
        let (id, shape, ref_count, ref_points) = match self {
            TargetDoc::Rect {
                id,
                center,
                width,
                height,
                rotation_deg,
                ref_count,
                ref_points,
            } => (
                id,
                ShapeSpec::Rectangle {
                    center: center.into(),
                    width,
                    height,
                    rotation: rotation_deg.to_radians(),
                },
                ref_count,
                ref_points,
            ),
            TargetDoc::Circle {
                id,
                center,
                radius,
                ref_count,
                ref_points,
            } => (
                id,
                ShapeSpec::Circle {
                    center: center.into(),
                    radius,
                },
                ref_count,
                ref_points,
            ),
        };
        shape
            .validate()
            .map_err(|e| Error::validation(format!("target {id}: {e}")))?;
        let reference_points = match ref_points {
            Some(points) => points.into_iter().map(Vec2::from).collect(),
            None => shape.reference_points(ref_count.unwrap_or(DEFAULT_REFERENCE_COUNT))?,
        };
        Ok(ExtendedTarget {
            id,
            shape,
            reference_points,
        })
    }
}

/// Parse and validate a scene document.
pub fn load_scene(document: &str) -> Result<Scene> {
    let de = toml::Deserializer::new(document);
    let doc: SceneDoc = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        field: e.path().to_string(),
        message: e.inner().message().trim().to_string(),
    })?;
    let targets = doc
        .targets
        .into_iter()
        .map(TargetDoc::into_target)
        .collect::<Result<Vec<_>>>()?;
    let scene = Scene {
        bounds: Aabb::new(doc.bounds.min.into(), doc.bounds.max.into()),
        targets,
        trajectory: Trajectory {
            waypoints: doc.trajectory.waypoints.into_iter().map(Vec2::from).collect(),
            speed: doc.trajectory.speed,
            step_interval: doc.trajectory.step_interval,
        },
    };
    scene.validate()?;
    Ok(scene)
}

pub fn load_scene_file(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_scene(&text)
}
