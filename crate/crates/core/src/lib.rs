//! Desk-scale simulator for OFDM-sensing SLAM over multiple extended targets.
//!
//! The pipeline is: [`scene`] geometry produces ground-truth echoes, a sensing
//! backend ([`ofdm`] or [`parametric`]) turns them into polar detections,
//! [`slam`] fuses detections into an occupancy grid and point map,
//! [`clustering`] recognises targets, and [`metrics`] scores the map with
//! ET-GOPSA. [`harness`] drives Monte Carlo experiments over all of it.

pub mod backend;
pub mod clustering;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod ofdm;
pub mod par;
pub mod parametric;
pub mod scan;
pub mod scene;
pub mod slam;

pub use error::{Error, Result};
pub use geometry::{Pose, Vec2};
