//! Streams recorded by the simulator and where each one originates.

use crate::trace::{Level, Sort, StreamDecl};

fn stage_sort() -> Sort {
    Sort::enumeration([0, 1, 2, 3])
}

/// Every stream in a simulation trace.
pub fn stream_decls() -> Vec<StreamDecl> {
    use Level::*;
    let real = |id: &str, unit: &str, source: &str, level| StreamDecl::signal(id, Sort::Real, unit, source, level);
    let flag = |id: &str, source: &str, level| StreamDecl::signal(id, Sort::Bool, "", source, level);
    vec![
        real("headway", "m", "vehicle_dynamics", Data),
        real("v_ego", "m/s", "vehicle_dynamics", Data),
        real("x_ego", "m", "vehicle_dynamics", Data),
        real("a_ego", "m/s^2", "vehicle_dynamics", Data),
        real("v_mio", "m/s", "vehicle_dynamics", Data),
        real("x_mio", "m", "vehicle_dynamics", Data),
        real("brake_applied", "m/s^2", "vehicle_dynamics", Data),
        flag("simultaneous_braking_throttle", "vehicle_dynamics", Data),
        real("fusion_distance", "m", "sensor_fusion", Data),
        real("fusion_rel_velocity", "m/s", "sensor_fusion", Data),
        StreamDecl::event("rx_fusion", "can_bus", Network),
        StreamDecl::event("rx_aeb_status", "can_bus", Network),
        StreamDecl::event("rx_brake_cmd", "can_bus", Network),
        StreamDecl::event("bus_drop", "can_bus", Network),
        real("bus_backlog", "msgs", "can_bus", Network),
        StreamDecl::signal("AEBstatus", stage_sort(), "", "aeb_controller", Functional),
        real("Deceleration", "m/s^2", "aeb_controller", Functional),
        flag("fcw", "aeb_controller", Functional),
        real("ttc", "s", "aeb_controller", Functional),
        flag("ttc_lt_stopping", "aeb_controller", Functional),
        real("aeb_v_ego", "m/s", "aeb_controller", Functional),
        StreamDecl::signal("stage", stage_sort(), "", "aeb_controller", Functional),
        StreamDecl::signal("AEBstatus_rx", stage_sort(), "", "speed_controller", Functional),
        flag("ThrottleRelease", "speed_controller", Functional),
        real("throttle_cmd", "m/s^2", "speed_controller", Functional),
    ]
}

/// Signals a fault may override.
pub const INJECTABLE: [&str; 7] =
    ["fusion_distance", "fusion_rel_velocity", "AEBstatus", "Deceleration", "fcw", "ThrottleRelease", "throttle_cmd"];

/// Sort of an injectable signal, or `None` if faults cannot target it.
pub fn injectable_sort(name: &str) -> Option<Sort> {
    if !INJECTABLE.contains(&name) {
        return None;
    }
    stream_decls().into_iter().find(|d| d.id == name).map(|d| d.sort)
}
