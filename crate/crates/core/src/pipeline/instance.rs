//! JSON instance files.
//!
//! ```json
//! {
//!   "nodes": ["s", "v", "t"],
//!   "arcs": [{"tail": "s", "head": "v", "capacity": 1, "transit": "1/2", "cost": 0}],
//!   "balances": {"s": 1, "t": -1}
//! }
//! ```
//!
//! Numbers are integers or exact fraction/decimal strings. Nodes missing
//! from `balances` have balance zero.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::{Network, NetworkError};
use crate::scalar::{ParseScalarError, Scalar};

/// An integer or a string holding an exact number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Text(String),
}

impl Value {
    pub fn parse<T: Scalar>(&self) -> Result<T, ParseScalarError> {
        match self {
            Value::Int(i) => Ok(T::from_i64(*i)),
            Value::Text(s) => T::parse_exact(s),
        }
    }

    /// Integers are written as JSON numbers, everything else as fractions.
    pub fn of<T: Scalar>(value: &T) -> Self {
        match value.to_i64_exact() {
            Some(i) => Value::Int(i),
            None => Value::Text(value.to_fraction_string()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub tail: String,
    pub head: String,
    pub capacity: Value,
    pub transit: Value,
    pub cost: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub nodes: Vec<String>,
    pub arcs: Vec<ArcRecord>,
    #[serde(default)]
    pub balances: BTreeMap<String, Value>,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Number {
        field: String,
        #[source]
        source: ParseScalarError,
    },
    #[error("balance given for unknown node {0:?}")]
    UnknownBalance(String),
    #[error("arc {index}: unknown node {name:?}")]
    UnknownNode { index: usize, name: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn to_network<T: Scalar>(&self) -> Result<Network<T>, InstanceError> {
        let number =
            |v: &Value, field: String| v.parse::<T>().map_err(|source| InstanceError::Number { field, source });
        for name in self.balances.keys() {
            if !self.nodes.contains(name) {
                return Err(InstanceError::UnknownBalance(name.clone()));
            }
        }
        let mut b = Network::builder();
        let mut ids = BTreeMap::new();
        for name in &self.nodes {
            let balance = match self.balances.get(name) {
                Some(v) => number(v, format!("balance of {name}"))?,
                None => T::zero(),
            };
            ids.insert(name.as_str(), b.node(name.clone(), balance));
        }
        for (index, arc) in self.arcs.iter().enumerate() {
            let lookup = |name: &String| {
                ids.get(name.as_str())
                    .copied()
                    .ok_or_else(|| InstanceError::UnknownNode {
                        index,
                        name: name.clone(),
                    })
            };
            let (tail, head) = (lookup(&arc.tail)?, lookup(&arc.head)?);
            b.arc(
                tail,
                head,
                number(&arc.capacity, format!("arc {index} capacity"))?,
                number(&arc.transit, format!("arc {index} transit"))?,
                number(&arc.cost, format!("arc {index} cost"))?,
            );
        }
        Ok(b.build()?)
    }

    pub fn from_network<T: Scalar>(network: &Network<T>) -> Self {
        let arcs = network
            .arcs()
            .iter()
            .map(|a| ArcRecord {
                tail: network.name(a.tail).to_string(),
                head: network.name(a.head).to_string(),
                capacity: Value::of(&a.capacity),
                transit: Value::of(&a.transit),
                cost: Value::of(&a.cost),
            })
            .collect();
        let balances = network
            .nodes()
            .filter(|&v| !network.balance(v).is_zero())
            .map(|v| (network.name(v).to_string(), Value::of(network.balance(v))))
            .collect();
        InstanceFile {
            nodes: network.names().to_vec(),
            arcs,
            balances,
        }
    }
}

pub fn read_network<T: Scalar>(text: &str) -> Result<Network<T>, InstanceError> {
    InstanceFile::from_json(text)?.to_network()
}
