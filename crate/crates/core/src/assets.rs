//! Profiles and price tables shipped with the crate.

use serde::Deserialize;

use crate::advisor::NodeSizes;
use crate::cost::{fit_alpha, PriceTable};
use crate::formats::{parse_price_table, ProfileDoc};

pub const LOCAL_PROFILE_TOML: &str = include_str!("../data/profile_local.toml");
pub const CLOUD_PROFILE_TOML: &str = include_str!("../data/profile_cloud.toml");
pub const PRICES_1GB_CSV: &str = include_str!("../data/prices_1gb.csv");
pub const PRICES_2GB_CSV: &str = include_str!("../data/prices_2gb.csv");
pub const PRICES_4GB_CSV: &str = include_str!("../data/prices_4gb.csv");
pub const NODE_SIZES_TOML: &str = include_str!("../data/node_sizes.toml");
pub const SWEEP_DEFAULT_TOML: &str = include_str!("../data/sweep_default.toml");

#[derive(Deserialize)]
struct BundledSizes {
    local: NodeSizes,
    cloud: NodeSizes,
}

fn bundled_sizes() -> BundledSizes {
    toml::from_str(NODE_SIZES_TOML).expect("bundled node sizes parse")
}

pub fn local_profile_doc() -> ProfileDoc {
    ProfileDoc::from_toml(LOCAL_PROFILE_TOML).expect("bundled profile parses")
}

pub fn cloud_profile_doc() -> ProfileDoc {
    ProfileDoc::from_toml(CLOUD_PROFILE_TOML).expect("bundled profile parses")
}

/// Memory configurations of the bundled price tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryConfig {
    OneGb,
    TwoGb,
    FourGb,
}

impl MemoryConfig {
    pub const ALL: [MemoryConfig; 3] = [MemoryConfig::OneGb, MemoryConfig::TwoGb, MemoryConfig::FourGb];

    pub fn label(self) -> &'static str {
        match self {
            MemoryConfig::OneGb => "1GB/proc",
            MemoryConfig::TwoGb => "2GB/proc",
            MemoryConfig::FourGb => "4GB/proc",
        }
    }

    pub fn price_table(self) -> PriceTable<f64> {
        let csv = match self {
            MemoryConfig::OneGb => PRICES_1GB_CSV,
            MemoryConfig::TwoGb => PRICES_2GB_CSV,
            MemoryConfig::FourGb => PRICES_4GB_CSV,
        };
        parse_price_table(csv.as_bytes(), self.label()).expect("bundled price table parses")
    }
}

/// Hourly-rate slope of the 4 GB/proc table, the default cost model.
pub fn default_alpha() -> f64 {
    fit_alpha(&MemoryConfig::FourGb.price_table()).expect("bundled table fits").alpha
}

/// Node sizes the bundled cloud prices are quoted for.
pub fn cloud_node_sizes() -> NodeSizes {
    bundled_sizes().cloud
}

pub fn local_node_sizes() -> NodeSizes {
    bundled_sizes().local
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_loads() {
        let local = local_profile_doc().to_profile().unwrap();
        assert_eq!(local.a(), 1013.5);
        assert_eq!(local.b(), -1.58);
        assert_eq!(cloud_profile_doc().to_profile().unwrap().b(), -2.06);
        for m in MemoryConfig::ALL {
            assert_eq!(m.price_table().rows().len(), 6);
        }
        assert!((default_alpha() - 0.06701855670103093).abs() < 1e-15);
        assert_eq!(local_node_sizes(), NodeSizes::contiguous(200).unwrap());
        assert_eq!(cloud_node_sizes().as_slice(), [1, 2, 4, 8, 12, 16]);
    }

    #[test]
    fn bundled_sweep_config_is_the_default() {
        let shipped = crate::sweep::SweepConfig::from_toml(SWEEP_DEFAULT_TOML).unwrap();
        assert_eq!(shipped, crate::sweep::SweepConfig::default());
    }
}
