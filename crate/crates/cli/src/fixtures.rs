//! Reference confusion matrices with their published coefficient values.
#![allow(clippy::approx_constant)]

use funcorr_core::{ConfusionMatrix, ValuationClass};

/// Published values of the five base coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expected {
    pub ii: f64,
    pub id: f64,
    pub co: f64,
    pub anti: f64,
    pub sup: f64,
}

impl Expected {
    pub fn get(&self, class: ValuationClass) -> Option<f64> {
        match class {
            ValuationClass::Ii => Some(self.ii),
            ValuationClass::Id => Some(self.id),
            ValuationClass::Co => Some(self.co),
            ValuationClass::Anti => Some(self.anti),
            ValuationClass::Sup => Some(self.sup),
            ValuationClass::Mon | ValuationClass::Coanti => None,
        }
    }

    pub const CLASSES: [ValuationClass; 5] =
        [ValuationClass::Ii, ValuationClass::Id, ValuationClass::Co, ValuationClass::Anti, ValuationClass::Sup];
}

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub rows: &'static [&'static [f64]],
    pub expected: Option<Expected>,
    pub note: &'static str,
}

impl Fixture {
    pub fn matrix(&self) -> ConfusionMatrix {
        ConfusionMatrix::from_rows(self.rows).expect("fixtures are valid")
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

const fn expected(ii: f64, id: f64, co: f64, anti: f64, sup: f64) -> Option<Expected> {
    Some(Expected { ii, id, co, anti, sup })
}

const CM3_PUBLISHED: Option<Expected> = expected(-0.0912, 0.6454, 0.3999, 0.6892, 0.6892);
const CM5_PUBLISHED: Option<Expected> = expected(0.8660, -0.3535, 0.8660, 0.8416, 0.8660);

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "CM0",
        aliases: &[],
        rows: &[&[0.1, 0.0, 0.1], &[0.2, 0.0, 0.2], &[0.0, 0.2, 0.2]],
        expected: expected(0.5345, 0.0, 0.5345, 0.6123, 0.7071),
        note: "MON < COANTI < SUP strictly",
    },
    Fixture {
        name: "CM1",
        aliases: &[],
        rows: &[&[0.2, 0.0, 0.1], &[0.1, 0.1, 0.0], &[0.2, 0.1, 0.2]],
        expected: expected(0.2309, 0.0476, 0.4330, 0.0476, 0.4537),
        note: "",
    },
    Fixture {
        name: "CM2",
        aliases: &[],
        rows: &[&[0.1, 0.0, 0.0], &[0.0, 0.4, 0.0], &[0.2, 0.2, 0.1]],
        expected: expected(0.5091, 0.2182, 0.7165, 0.2182, 0.7165),
        note: "",
    },
    Fixture {
        name: "CM3",
        aliases: &[],
        rows: &[&[0.1428, 0.0, 0.1428], &[0.0, 0.0, 0.0], &[0.3285, 0.2857, 0.0]],
        expected: CM3_PUBLISHED,
        note: "entries as printed; raw total 0.8998",
    },
    Fixture {
        name: "CM3'",
        aliases: &["CM3V", "CM3P"],
        rows: &[&[0.1428, 0.0, 0.1428], &[0.0, 0.0, 0.0], &[0.4285, 0.2857, 0.0]],
        expected: CM3_PUBLISHED,
        note: "0.3285 read as 0.4285; raw total 0.9998",
    },
    Fixture {
        name: "CM4",
        aliases: &[],
        rows: &[&[0.1428, 0.0, 0.1428], &[0.0, 0.2857, 0.1428], &[0.1428, 0.1428, 0.0]],
        expected: expected(0.2999, 0.3281, 0.5902, 0.3281, 0.5902),
        note: "published ID and ANTI lie below attainable values (0.4281)",
    },
    Fixture {
        name: "CM5",
        aliases: &[],
        rows: &[
            &[0.1428, 0.1428, 0.0, 0.0],
            &[0.0, 0.1428, 0.0, 0.1428],
            &[0.0, 0.0, 0.0, 0.3285],
            &[0.0, 0.0, 0.0, 0.0],
        ],
        expected: CM5_PUBLISHED,
        note: "entries as printed; raw total 0.8997",
    },
    Fixture {
        name: "CM5'",
        aliases: &["CM5V", "CM5P"],
        rows: &[
            &[0.1428, 0.1428, 0.0, 0.0],
            &[0.0, 0.1428, 0.0, 0.1428],
            &[0.0, 0.0, 0.0, 0.4285],
            &[0.0, 0.0, 0.0, 0.0],
        ],
        expected: CM5_PUBLISHED,
        note: "0.3285 read as 0.4285; raw total 0.9997",
    },
    Fixture {
        name: "CM6",
        aliases: &[],
        rows: &[
            &[0.0, 0.0, 0.1428, 0.0],
            &[0.1428, 0.1428, 0.1428, 0.0],
            &[0.1428, 0.1428, 0.1428, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ],
        expected: expected(-0.0912, 0.4714, 0.2581, 0.4714, 0.4714),
        note: "",
    },
    Fixture {
        name: "CM10",
        aliases: &[],
        rows: &[
            &[0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.2083, 0.0291, 0.0, 0.0],
            &[0.0, 0.0083, 0.3916, 0.0083, 0.0],
            &[0.0, 0.0, 0.0458, 0.1625, 0.0],
            &[0.0, 0.0, 0.0, 0.0208, 0.1250],
        ],
        expected: expected(0.9459, -0.2109, 0.9459, -0.0512, 0.9459),
        note: "",
    },
    Fixture {
        name: "CM11",
        aliases: &[],
        rows: &[
            &[0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.1875, 0.0500, 0.0],
            &[0.0, 0.0, 0.0083, 0.3625, 0.0375],
            &[0.0, 0.0, 0.0, 0.0250, 0.1833],
            &[0.0, 0.0, 0.0, 0.0, 0.1458],
        ],
        expected: expected(0.8966, -0.2039, 0.8966, 0.8434, 0.8966),
        note: "",
    },
    Fixture {
        name: "CM12",
        aliases: &[],
        rows: &[
            &[0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.2083, 0.0291, 0.0, 0.0],
            &[0.0, 0.0083, 0.3916, 0.0083, 0.0],
            &[0.0, 0.0, 0.0875, 0.1208, 0.0],
            &[0.0, 0.0, 0.0, 0.1208, 0.0250],
        ],
        expected: expected(0.9096, -0.2173, 0.9096, 0.5520, 0.9096),
        note: "published ID lies below the attainable value (-0.0894)",
    },
    Fixture {
        name: "CM(A)",
        aliases: &["CMA", "A"],
        rows: &[
            &[0.3076, 0.0, 0.0, 0.0],
            &[0.0, 0.4615, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.2307],
        ],
        expected: expected(1.0, -0.3651, 1.0, -0.3651, 1.0),
        note: "",
    },
    Fixture {
        name: "CM(B)",
        aliases: &["CMB", "B"],
        rows: &[
            &[0.0, 0.3076, 0.0, 0.0],
            &[0.0, 0.0, 0.4615, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.2307],
        ],
        expected: expected(1.0, -0.3651, 1.0, 1.0, 1.0),
        note: "",
    },
    Fixture {
        name: "CM(C)",
        aliases: &["CMC", "C"],
        rows: &[
            &[0.0, 0.0, 0.3076, 0.0],
            &[0.0, 0.0, 0.4615, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.2307],
        ],
        expected: expected(1.0, -0.3651, 1.0, 1.0, 1.0),
        note: "",
    },
    Fixture {
        name: "CM(D)",
        aliases: &["CMD", "D"],
        rows: &[
            &[0.0, 0.3076, 0.0, 0.0],
            &[0.4615, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.2307],
        ],
        expected: expected(1.0, 0.6172, 1.0, 1.0, 1.0),
        note: "",
    },
    Fixture {
        name: "DIAG3",
        aliases: &["DIAGONAL"],
        rows: &[&[0.2, 0.0, 0.0], &[0.0, 0.3, 0.0], &[0.0, 0.0, 0.5]],
        expected: None,
        note: "perfect agreement",
    },
    Fixture {
        name: "ANTIDIAG3",
        aliases: &["ANTIDIAGONAL"],
        rows: &[&[0.0, 0.0, 0.2], &[0.0, 0.3, 0.0], &[0.5, 0.0, 0.0]],
        expected: None,
        note: "perfect reversal",
    },
    Fixture {
        name: "PRODUCT3",
        aliases: &["PRODUCT", "INDEPENDENT"],
        rows: &[&[0.06, 0.09, 0.15], &[0.04, 0.06, 0.10], &[0.10, 0.15, 0.25]],
        expected: expected(0.0, 0.0, 0.0, 0.0, 0.0),
        note: "independent classifiers",
    },
];

fn canonical(name: &str) -> String {
    name.chars()
        .filter_map(|c| match c {
            '\'' => Some('P'),
            c if c.is_ascii_alphanumeric() => Some(c.to_ascii_uppercase()),
            _ => None,
        })
        .collect()
}

/// Looks a fixture up by name or alias, ignoring case and punctuation.
pub fn find(name: &str) -> Option<&'static Fixture> {
    let key = canonical(name);
    FIXTURES.iter().find(|f| canonical(f.name) == key || f.aliases.iter().any(|a| canonical(a) == key))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|f| f.name)
}
