//! Preference and attribute vocabulary shared by ingestion, queries and scoring.
//!
//! Restaurant and hotel attributes are rated 1-5; attraction orientations are
//! measured 0-3. The same enums name both a business attribute and the query
//! preference that asks for it.

use serde::{Deserialize, Serialize};
use std::fmt;

macro_rules! vocab {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $label)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn label(self) -> &'static str {
                match self { $($name::$variant => $label),+ }
            }

            /// Case-insensitive lookup by label.
            pub fn from_label(s: &str) -> Option<Self> {
                let s = s.trim();
                Self::ALL.iter().copied().find(|v| v.label().eq_ignore_ascii_case(s))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
    };
}

vocab!(
    /// Trip budget word. Maps onto price tiers via [`Budget::accepts_tier`].
    Budget { Cheap => "cheap", Moderate => "moderate", Expensive => "expensive" }
);

vocab!(
    /// Restaurant review attribute, 1-5.
    RestaurantQuality {
        Flavor => "flavor",
        Freshness => "freshness",
        Service => "service",
        Environment => "environment",
        Value => "value",
    }
);

vocab!(
    /// Hotel review attribute, 1-5.
    HotelQuality { Quality => "quality", Location => "location", Service => "service", Safety => "safety" }
);

vocab!(
    /// Attraction orientation, measured 0-3.
    Orientation {
        Family => "family",
        History => "history",
        Activity => "activity",
        Nature => "nature",
        Food => "food",
        Shopping => "shopping",
    }
);

vocab!(
    Cuisine {
        Us => "US",
        Mexican => "Mexican",
        Irish => "Irish",
        French => "French",
        Italian => "Italian",
        Greek => "Greek",
        Indian => "Indian",
        Chinese => "Chinese",
        Japanese => "Japanese",
        Korean => "Korean",
        Vietnamese => "Vietnamese",
        Thai => "Thai",
        AsianFusion => "Asian Fusion",
        MiddleEastern => "Middle Eastern",
    }
);

impl Budget {
    /// cheap -> tier 1, moderate -> tier 2, expensive -> tiers 3 and 4.
    /// A missing tier never satisfies a budget.
    pub fn accepts_tier(self, tier: Option<u8>) -> bool {
        matches!(
            (self, tier),
            (Budget::Cheap, Some(1)) | (Budget::Moderate, Some(2)) | (Budget::Expensive, Some(3 | 4))
        )
    }

    /// Representative tier for synthetic data.
    pub fn tiers(self) -> &'static [u8] {
        match self {
            Budget::Cheap => &[1],
            Budget::Moderate => &[2],
            Budget::Expensive => &[3, 4],
        }
    }
}

impl Cuisine {
    /// True when a free-text cuisine field names this cuisine.
    pub fn matches(self, field: &str) -> bool {
        self.label().eq_ignore_ascii_case(field.trim())
    }
}

/// One query preference that individual plan entries can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Preference {
    Budget(Budget),
    Cuisine(Cuisine),
    Restaurant(RestaurantQuality),
    Hotel(HotelQuality),
    Orientation(Orientation),
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preference::Budget(b) => write!(f, "{b} budget"),
            Preference::Cuisine(c) => write!(f, "{c} cuisine"),
            Preference::Restaurant(q) => write!(f, "good {q} (restaurant)"),
            Preference::Hotel(q) => write!(f, "good {q} (hotel)"),
            Preference::Orientation(o) => write!(f, "{o} oriented"),
        }
    }
}
