//! Cruise speed controller.

/// Proportional throttle towards a set speed, released whenever the last
/// received AEBstatus is non-zero.
#[derive(Debug, Clone)]
pub struct SpeedController {
    pub set_speed: f64,
    pub gain: f64,
    pub max_accel: f64,
    status_rx: u8,
}

impl SpeedController {
    pub fn new(set_speed: f64, gain: f64, max_accel: f64) -> Self {
        SpeedController { set_speed, gain, max_accel, status_rx: 0 }
    }

    pub fn receive(&mut self, status: u8) {
        self.status_rx = status;
    }

    pub fn status_rx(&self) -> u8 {
        self.status_rx
    }

    pub fn wants_release(&self) -> bool {
        self.status_rx != 0
    }

    /// Throttle acceleration in m/s^2 given the (possibly overridden) release flag.
    pub fn throttle(&self, release: bool, v_ego: f64) -> f64 {
        if release {
            0.0
        } else {
            (self.gain * (self.set_speed - v_ego)).clamp(0.0, self.max_accel)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn throttle_is_clamped_and_released() {
        let mut s = SpeedController::new(20.0, 0.5, 2.0);
        assert_eq!(s.throttle(s.wants_release(), 20.0), 0.0);
        assert_eq!(s.throttle(s.wants_release(), 19.0), 0.5);
        assert_eq!(s.throttle(s.wants_release(), 5.0), 2.0);
        assert_eq!(s.throttle(s.wants_release(), 25.0), 0.0);
        s.receive(2);
        assert!(s.wants_release());
        assert_eq!(s.throttle(s.wants_release(), 5.0), 0.0);
    }
}
