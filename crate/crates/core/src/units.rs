use serde::{Deserialize, Serialize};

/// Unit of a single-sided amplitude spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsdUnit {
    #[serde(rename = "m/sqrt(Hz)")]
    MetrePerRootHz,
    #[serde(rename = "N/sqrt(Hz)")]
    NewtonPerRootHz,
}

impl AsdUnit {
    pub fn symbol(self) -> &'static str {
        match self {
            AsdUnit::MetrePerRootHz => "m/√Hz",
            AsdUnit::NewtonPerRootHz => "N/√Hz",
        }
    }
}
