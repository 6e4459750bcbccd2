//! JSON protocol description format.
//!
//! ```json
//! { "schema": "ndlab.protocol/1",
//!   "tick_ns": 1000,
//!   "beacons": {"times": [0], "omega": 32, "period": 3200},
//!   "receptions": {"windows": [{"start": 0, "d": 3200}], "period": 12800, "repetitive": true},
//!   "radio": {"alpha": [1, 1], "d_oTx": 0, "d_oRx": 0, "d_oTxRx": 0, "d_oRxTx": 0,
//!             "semantics": "ideal"} }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{NdError, Result};
use crate::rational::ratio;
use crate::schedule::{
    BeaconSchedule, ProtocolSpec, RadioModel, ReceptionSchedule, ReceptionWindow, Semantics, Ticks, TimeBase,
};

/// Schema tag written into every protocol document. Documents without a tag
/// are read as this version.
pub const PROTOCOL_SCHEMA: &str = "ndlab.protocol/1";

fn protocol_schema() -> String {
    PROTOCOL_SCHEMA.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeaconsJson {
    pub times: Vec<Ticks>,
    pub omega: Ticks,
    pub period: Option<Ticks>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowJson {
    pub start: Ticks,
    pub d: Ticks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceptionsJson {
    pub windows: Vec<WindowJson>,
    pub period: Ticks,
    pub repetitive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsJson {
    Ideal,
    Contained,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioJson {
    pub alpha: [i64; 2],
    #[serde(rename = "d_oTx")]
    pub d_o_tx: Ticks,
    #[serde(rename = "d_oRx")]
    pub d_o_rx: Ticks,
    #[serde(rename = "d_oTxRx")]
    pub d_o_tx_rx: Ticks,
    #[serde(rename = "d_oRxTx")]
    pub d_o_rx_tx: Ticks,
    pub semantics: SemanticsJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolJson {
    #[serde(default = "protocol_schema")]
    pub schema: String,
    pub tick_ns: u64,
    pub beacons: BeaconsJson,
    pub receptions: ReceptionsJson,
    pub radio: RadioJson,
}

impl From<&ProtocolSpec> for ProtocolJson {
    fn from(p: &ProtocolSpec) -> Self {
        let r = &p.radio;
        ProtocolJson {
            schema: protocol_schema(),
            tick_ns: p.time_base.tick_ns(),
            beacons: BeaconsJson {
                times: p.beacons.times().to_vec(),
                omega: p.beacons.omega(),
                period: p.beacons.period(),
            },
            receptions: ReceptionsJson {
                windows: p.receptions.windows().iter().map(|w| WindowJson { start: w.start, d: w.duration }).collect(),
                period: p.receptions.period(),
                repetitive: p.receptions.is_repetitive(),
            },
            radio: RadioJson {
                alpha: [*r.alpha.numer() as i64, *r.alpha.denom() as i64],
                d_o_tx: r.d_o_tx,
                d_o_rx: r.d_o_rx,
                d_o_tx_rx: r.d_o_tx_rx,
                d_o_rx_tx: r.d_o_rx_tx,
                semantics: match r.semantics {
                    Semantics::Ideal => SemanticsJson::Ideal,
                    Semantics::Contained => SemanticsJson::Contained,
                },
            },
        }
    }
}

impl TryFrom<ProtocolJson> for ProtocolSpec {
    type Error = NdError;

    fn try_from(j: ProtocolJson) -> Result<Self> {
        if j.schema != PROTOCOL_SCHEMA {
            return Err(NdError::Format(format!("unsupported schema {:?}, expected {PROTOCOL_SCHEMA:?}", j.schema)));
        }
        let [num, den] = j.radio.alpha;
        if den == 0 {
            return Err(NdError::InvalidRadio("alpha denominator is zero".into()));
        }
        let radio = RadioModel {
            alpha: ratio(num as i128, den as i128),
            omega: j.beacons.omega,
            d_o_tx: j.radio.d_o_tx,
            d_o_rx: j.radio.d_o_rx,
            d_o_tx_rx: j.radio.d_o_tx_rx,
            d_o_rx_tx: j.radio.d_o_rx_tx,
            semantics: match j.radio.semantics {
                SemanticsJson::Ideal => Semantics::Ideal,
                SemanticsJson::Contained => Semantics::Contained,
            },
        };
        let beacons = BeaconSchedule::new(j.beacons.times, j.beacons.omega, j.beacons.period)?;
        let windows = j.receptions.windows.iter().map(|w| ReceptionWindow::new(w.start, w.d)).collect();
        let receptions = ReceptionSchedule::new(windows, j.receptions.period, j.receptions.repetitive)?;
        ProtocolSpec::new(TimeBase::from_nanos(j.tick_ns)?, beacons, receptions, radio)
    }
}

pub fn protocol_to_json(p: &ProtocolSpec) -> String {
    serde_json::to_string_pretty(&ProtocolJson::from(p)).expect("protocol JSON serializes")
}

pub fn protocol_from_json(text: &str) -> Result<ProtocolSpec> {
    let j: ProtocolJson = serde_json::from_str(text).map_err(|e| NdError::Format(e.to_string()))?;
    ProtocolSpec::try_from(j)
}
