//! Longitudinal point-mass kinematics.

/// Position and speed of one vehicle along the lane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// Metres along the lane.
    pub x: f64,
    /// m/s, never negative.
    pub v: f64,
}

impl VehicleState {
    pub fn new(x: f64, v: f64) -> Self {
        VehicleState { x, v: v.max(0.0) }
    }

    /// Advances one step of `dt` seconds with acceleration `a`.
    ///
    /// Semi-implicit Euler: speed is updated first and clamped at zero, so a
    /// braking vehicle stops instead of reversing, then position moves with
    /// the new speed.
    pub fn advance(&mut self, a: f64, dt: f64) {
        self.v = (self.v + a * dt).max(0.0);
        self.x += self.v * dt;
    }
}
