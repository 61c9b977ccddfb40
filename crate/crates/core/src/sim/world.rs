//! Closed-loop simulation of the ego car, the MIO, and the components
//! between them.
//!
//! Each tick runs, in order: flood filler onto the bus, MIO motion, sensor
//! fusion, bus delivery, the AEB controller, the speed controller, ego
//! motion, and finally sampling of every stream. Faults override component
//! outputs after the component computed them and before anything observes
//! them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::aeb::AebController;
use super::bus::{Bus, BusStats, MessageId, Payload};
use super::config::ScenarioConfig;
use super::speed::SpeedController;
use super::streams::stream_decls;
use super::vehicle::VehicleState;
use crate::inject::FaultSet;
use crate::trace::{Sample, Trace, Value};

/// Result of one simulation run.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub trace: Trace,
    /// For every fault-targeted signal, the value its component computed
    /// before the override, per tick.
    pub unfaulted: BTreeMap<String, Vec<(u64, Value)>>,
    pub bus: BusStats,
}

struct Recorder<'a> {
    trace: Trace,
    faults: &'a FaultSet,
    unfaulted: BTreeMap<String, Vec<(u64, Value)>>,
    tick: u64,
}

impl Recorder<'_> {
    fn put(&mut self, stream: &str, value: Value) {
        self.trace.append(Sample::new(stream, self.tick, value)).expect("simulator streams are well-formed");
    }

    /// Applies faults to a component output, records it, and returns what
    /// downstream components see.
    fn output(&mut self, stream: &str, computed: Value) -> Value {
        if self.faults.targets_signal(stream) {
            self.unfaulted.entry(stream.to_string()).or_default().push((self.tick, computed));
        }
        let seen = self.faults.apply(stream, self.tick, computed);
        self.put(stream, seen);
        seen
    }
}

fn real(v: Value) -> f64 {
    v.as_number().unwrap_or(0.0)
}

/// Runs a scenario with the given faults.
pub fn simulate(config: &ScenarioConfig, faults: &FaultSet) -> SimOutput {
    let dt = config.step.as_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ego = VehicleState::new(0.0, config.ego_speed);
    let mut mio = VehicleState::new(config.initial_gap, config.mio_speed);
    let mut bus = Bus::new(config.bus_latency, config.bus_capacity, config.bus_queue_limit);
    let mut aeb = AebController::new(config.stages);
    let mut speed = SpeedController::new(config.set_speed, config.gain, config.max_accel);
    let mut brake_applied = 0.0;
    let mut fusion_held = (config.initial_gap, config.mio_speed - config.ego_speed);

    let trace = Trace::with_streams(config.step, stream_decls()).expect("stream table is consistent");
    let mut rec = Recorder { trace, faults, unfaulted: BTreeMap::new(), tick: 0 };

    for k in 0..config.ticks() {
        rec.tick = k;
        let mut dropped = false;

        for _ in 0..faults.flood_rate(k) {
            dropped |= !bus.send(MessageId::Flood, Payload::Filler, k, 0);
        }

        mio.advance(config.mio_accel(config.step.wall(k)), dt);

        if k % config.fusion_period == 0 {
            let nd: f64 = rng.sample(StandardNormal);
            let nv: f64 = rng.sample(StandardNormal);
            fusion_held = (mio.x - ego.x + config.noise_distance * nd, mio.v - ego.v + config.noise_velocity * nv);
        }
        let distance = real(rec.output("fusion_distance", Value::Real(fusion_held.0)));
        let rel_velocity = real(rec.output("fusion_rel_velocity", Value::Real(fusion_held.1)));
        if k % config.fusion_period == 0 {
            let extra = faults.extra_delay(MessageId::Fusion, k);
            dropped |= !bus.send(MessageId::Fusion, Payload::Fusion { distance, rel_velocity }, k, extra);
        }

        let mut rx = [false; 3];
        for m in bus.deliver(k) {
            match m.payload {
                Payload::Fusion { distance, rel_velocity } => {
                    aeb.receive(distance, rel_velocity);
                    rx[0] = true;
                }
                Payload::Status(s) => {
                    speed.receive(s);
                    rx[1] = true;
                }
                Payload::Brake(d) => {
                    brake_applied = d;
                    rx[2] = true;
                }
                Payload::Filler => {}
            }
        }
        for (stream, hit) in ["rx_fusion", "rx_aeb_status", "rx_brake_cmd"].into_iter().zip(rx) {
            if hit {
                rec.put(stream, Value::Event);
            }
        }

        let out = aeb.step(ego.v);
        let status = match rec.output("AEBstatus", Value::Enum(out.stage.status())) {
            Value::Enum(s) => s,
            _ => out.stage.status(),
        };
        let decel = real(rec.output("Deceleration", Value::Real(out.decel)));
        rec.output("fcw", Value::Bool(out.fcw));
        rec.put("ttc", Value::Real(out.ttc.unwrap_or(f64::INFINITY)));
        rec.put("ttc_lt_stopping", Value::Bool(out.ttc_lt_stopping));
        rec.put("aeb_v_ego", Value::Real(ego.v));
        rec.put("stage", Value::Enum(out.stage.status()));
        if k % config.status_period == 0 {
            let extra = faults.extra_delay(MessageId::AebStatus, k);
            dropped |= !bus.send(MessageId::AebStatus, Payload::Status(status), k, extra);
        }
        let extra = faults.extra_delay(MessageId::BrakeCmd, k);
        dropped |= !bus.send(MessageId::BrakeCmd, Payload::Brake(decel), k, extra);

        rec.put("AEBstatus_rx", Value::Enum(speed.status_rx()));
        let release = matches!(rec.output("ThrottleRelease", Value::Bool(speed.wants_release())), Value::Bool(true));
        let throttle = real(rec.output("throttle_cmd", Value::Real(speed.throttle(release, ego.v))));

        let a = throttle - brake_applied;
        ego.advance(a, dt);

        rec.put("bus_backlog", Value::Real(bus.backlog() as f64));
        if dropped {
            rec.put("bus_drop", Value::Event);
        }
        rec.put("headway", Value::Real(mio.x - ego.x));
        rec.put("v_ego", Value::Real(ego.v));
        rec.put("x_ego", Value::Real(ego.x));
        rec.put("a_ego", Value::Real(a));
        rec.put("v_mio", Value::Real(mio.v));
        rec.put("x_mio", Value::Real(mio.x));
        rec.put("brake_applied", Value::Real(brake_applied));
        rec.put("simultaneous_braking_throttle", Value::Bool(brake_applied > 0.0 && throttle > 0.0));
    }

    SimOutput { trace: rec.trace, unfaulted: rec.unfaulted, bus: bus.stats() }
}
