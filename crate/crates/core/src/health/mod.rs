//! Healthcare telemetry simulator: sensor streams written to per-type files
//! each second, sealed with CP-ABE, shipped over UDP and collected.

pub mod clock;
pub mod collector;
pub mod datagram;
pub mod generator;
pub mod pipeline;
pub mod report;
pub mod sender;
pub mod sensors;

pub use clock::{Clock, RealClock, SimClock};
pub use collector::{CollectedFile, Collector, CollectorConfig, CollectorStats};
pub use datagram::{TelemetryDatagram, MAX_CHUNK};
pub use generator::{generate_streams, GeneratedFile, GeneratorConfig};
pub use pipeline::{run_loopback, run_send, PipelineConfig, PipelineError, PipelineReport, SendReport};
pub use report::{FileStatus, LatencyRow};
pub use sender::{Sender, SenderConfig, SenderStats};
pub use sensors::{SensorSpec, StreamType};
