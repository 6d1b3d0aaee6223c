//! Parameter files and built-in presets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{LaaClassParams, LaaClassProfile, LaaCommon, WifiMacProfile};

pub const PRESETS: [&str; 4] = ["table2-wifi", "table3-laa", "table4-class1", "table5-class4"];

/// Any subset of the parameter tables. Missing sections fall back to the
/// defaults when resolved.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wifi: Option<WifiMacProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laa: Option<LaaCommon>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laa_class: Option<LaaClassParams>,
}

impl ParamSet {
    pub fn preset(name: &str) -> Result<Self> {
        let set = match name {
            "table2-wifi" => ParamSet {
                wifi: Some(WifiMacProfile::table2()),
                ..ParamSet::default()
            },
            "table3-laa" => ParamSet {
                laa: Some(LaaCommon::default()),
                ..ParamSet::default()
            },
            "table4-class1" => ParamSet {
                laa_class: Some(LaaClassParams::class1()),
                ..ParamSet::default()
            },
            "table5-class4" => ParamSet {
                laa_class: Some(LaaClassParams::class4()),
                ..ParamSet::default()
            },
            other => return Err(Error::UnknownPreset(other.to_owned())),
        };
        Ok(set)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let set: ParamSet = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        set.wifi_profile()?;
        set.laa_profile()?;
        Ok(set)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn wifi_profile(&self) -> Result<WifiMacProfile> {
        let wifi = self.wifi.clone().unwrap_or_default();
        wifi.validate()?;
        Ok(wifi)
    }

    pub fn laa_profile(&self) -> Result<LaaClassProfile> {
        let common = self.laa.clone().unwrap_or_default();
        let class = self.laa_class.clone().unwrap_or_else(LaaClassParams::class1);
        LaaClassProfile::compose(&common, &class)
    }
}
