//! Shared vehicle bus with fixed latency and per-tick capacity.
//!
//! Messages wait in one FIFO queue. Each tick the bus hands over, in queue
//! order, up to `capacity` messages whose due tick has arrived. A message is
//! never due before an earlier message with the same id, so every id is
//! delivered in send order. When the queue is full new messages are dropped
//! and counted.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageId {
    Fusion,
    AebStatus,
    BrakeCmd,
    Flood,
}

impl MessageId {
    pub const ALL: [MessageId; 4] = [MessageId::Fusion, MessageId::AebStatus, MessageId::BrakeCmd, MessageId::Flood];

    pub fn name(self) -> &'static str {
        match self {
            MessageId::Fusion => "fusion",
            MessageId::AebStatus => "aeb_status",
            MessageId::BrakeCmd => "brake_cmd",
            MessageId::Flood => "flood",
        }
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MessageId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MessageId::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown bus message `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payload {
    Fusion { distance: f64, rel_velocity: f64 },
    Status(u8),
    Brake(f64),
    Filler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub id: MessageId,
    pub payload: Payload,
    pub sent: u64,
    pub due: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BusStats {
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
}

#[derive(Debug, Clone)]
pub struct Bus {
    latency: u64,
    capacity: usize,
    queue_limit: usize,
    queue: VecDeque<Message>,
    last_due: BTreeMap<MessageId, u64>,
    stats: BusStats,
}

impl Bus {
    pub fn new(latency: u64, capacity: usize, queue_limit: usize) -> Self {
        Bus { latency, capacity, queue_limit, queue: VecDeque::new(), last_due: BTreeMap::new(), stats: BusStats::default() }
    }

    /// Queues a message sent at tick `now` with `extra` ticks of added delay.
    /// Returns `false` when the queue is full and the message is dropped.
    pub fn send(&mut self, id: MessageId, payload: Payload, now: u64, extra: u64) -> bool {
        self.stats.sent += 1;
        if self.queue.len() >= self.queue_limit {
            self.stats.dropped += 1;
            return false;
        }
        let earliest = now + self.latency + extra;
        let due = self.last_due.get(&id).map_or(earliest, |&d| d.max(earliest));
        self.last_due.insert(id, due);
        self.queue.push_back(Message { id, payload, sent: now, due });
        true
    }

    /// Messages handed over at tick `now`.
    pub fn deliver(&mut self, now: u64) -> Vec<Message> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.queue.len() && out.len() < self.capacity {
            if self.queue[i].due <= now {
                out.extend(self.queue.remove(i));
            } else {
                i += 1;
            }
        }
        self.stats.delivered += out.len() as u64;
        out
    }

    pub fn backlog(&self) -> usize {
        self.queue.len()
    }

    pub fn stats(&self) -> BusStats {
        self.stats
    }
}
