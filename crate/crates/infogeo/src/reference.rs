//! Closed-form reference tables for the two-dimensional normal family.
//!
//! The Fisher-metric table below is exact: the Hessian of the potential is
//! the covariance matrix of the sufficient statistics (x, y, x², xy, y²),
//! and those Gaussian moments are classical. It backs hard regression
//! assertions.
//!
//! The sectional-curvature and Ricci tables are hand transcriptions of
//! machine-generated published expressions whose subscripts are visibly
//! corrupted in places (line-broken symbols, and a bare `σ₂` that sometimes
//! denotes the variance Σ₂₂ and sometimes the covariance Σ₁₂). Entries
//! with such ambiguities are *quarantined*: the audit evaluates them under
//! both documented readings of `σ₂` against the numerical pipeline and
//! reports per-entry agreement instead of asserting it. Entries free of
//! ambiguity (the constants K₁₂, K₁₃, K₂₅ and several Ricci components)
//! are asserted directly elsewhere.
//!
//! Symbol map used throughout: σ₁ and σ₁₁ ↦ Σ₁₁, σ₂₂ ↦ Σ₂₂, σ₁₂ ↦ Σ₁₂,
//! with the two readings of a bare σ₂ as above. Line-broken subscripts
//! (`σ_{1 1}`, `σ_{2 2}`, `σ_{1 2}`) are joined.

/// Mean/covariance parameters of the bivariate normal, symbol-mapped.
#[derive(Debug, Clone, Copy)]
pub struct Normal2Params {
    pub mu1: f64,
    pub mu2: f64,
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
}

/// The two documented readings of the ambiguous `σ₂` token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaTwoReading {
    /// σ₂ ↦ Σ₂₂ (the default: σ₂ as shorthand for the second variance).
    Variance,
    /// σ₂ ↦ Σ₁₂ (subscript `1` lost to a line break).
    Covariance,
}

impl SigmaTwoReading {
    pub fn label(self) -> &'static str {
        match self {
            SigmaTwoReading::Variance => "sigma2 = Sigma22",
            SigmaTwoReading::Covariance => "sigma2 = Sigma12",
        }
    }
}

fn sig2(p: &Normal2Params, r: SigmaTwoReading) -> f64 {
    match r {
        SigmaTwoReading::Variance => p.s22,
        SigmaTwoReading::Covariance => p.s12,
    }
}

/// Exact Fisher metric of N² in natural coordinates, expressed through
/// (μ, Σ): the covariance matrix of (x, y, x², xy, y²).
pub fn fisher_reference(p: &Normal2Params) -> [[f64; 5]; 5] {
    let Normal2Params {
        mu1,
        mu2,
        s11,
        s22,
        s12,
    } = *p;
    let mut g = [[0.0; 5]; 5];
    g[0][0] = s11;
    g[0][1] = s12;
    g[0][2] = 2.0 * mu1 * s11;
    g[0][3] = s11 * mu2 + s12 * mu1;
    g[0][4] = 2.0 * s12 * mu2;
    g[1][1] = s22;
    g[1][2] = 2.0 * s12 * mu1;
    g[1][3] = s22 * mu1 + s12 * mu2;
    g[1][4] = 2.0 * s22 * mu2;
    g[2][2] = 2.0 * s11 * (s11 + 2.0 * mu1 * mu1);
    g[2][3] = 2.0 * s12 * s11 + 2.0 * mu1 * s11 * mu2 + 2.0 * mu1 * mu1 * s12;
    g[2][4] = 2.0 * s12 * (s12 + 2.0 * mu1 * mu2);
    g[3][3] = s11 * s22 + s11 * mu2 * mu2 + mu1 * mu1 * s22 + 2.0 * mu1 * s12 * mu2 + s12 * s12;
    g[3][4] = 2.0 * s22 * s12 + 2.0 * s22 * mu1 * mu2 + 2.0 * s12 * mu2 * mu2;
    g[4][4] = 2.0 * s22 * (s22 + 2.0 * mu2 * mu2);
    for i in 0..5 {
        for j in 0..i {
            g[i][j] = g[j][i];
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Sectional,
    Ricci,
}

/// One transcribed closed-form component.
pub struct ReferenceEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    /// 0-based coordinate slot (i, j).
    pub slot: (usize, usize),
    /// True when the printed source contains a bare σ₂ or another visible
    /// garble; these entries are audited, never asserted.
    pub ambiguous: bool,
    pub eval: fn(&Normal2Params, f64, SigmaTwoReading) -> f64,
}

pub fn reference_entries() -> &'static [ReferenceEntry] {
    &ENTRIES
}

// ---------------------------------------------------------------------------
// Sectional components. Transcribed literally; `s2` is the ambiguous token.
// ---------------------------------------------------------------------------

fn k12(_p: &Normal2Params, a: f64, _r: SigmaTwoReading) -> f64 {
    0.25 - 0.25 * a * a
}

fn k13(_p: &Normal2Params, a: f64, _r: SigmaTwoReading) -> f64 {
    -0.5 + 0.5 * a * a
}

fn k25(_p: &Normal2Params, a: f64, _r: SigmaTwoReading) -> f64 {
    -0.5 + 0.5 * a * a
}

fn k14(p: &Normal2Params, a: f64, r: SigmaTwoReading) -> f64 {
    let (m1, s1, s22) = (p.mu1, p.s11, p.s22);
    let s2 = sig2(p, r);
    let num1 = -3.0 * s2 * s2 * s1 - s1 * s1 * s22 - s2 * s2 * m1 * m1 + s1 * m1 * m1 * s22;
    let num2 = s1 * s1 * s22 + 3.0 * s2 * s2 * s1 - s1 * m1 * m1 * s22 + s2 * s2 * m1 * m1;
    let den = s1 * s1 * s22 + s1 * m1 * m1 * s22 + s2 * s2 * s1 - s2 * s2 * m1 * m1;
    -0.25 * (num1 * a * a) / den - 0.25 * num2 / den
}

fn k15(p: &Normal2Params, a: f64, r: SigmaTwoReading) -> f64 {
    let (m2, s1, s22) = (p.mu2, p.s11, p.s22);
    let s2 = sig2(p, r);
    let num1 = s1 * m2 * m2 * s22 - s22 * s2 * s2 - s2 * s2 * m2 * m2;
    let num2 = -s1 * m2 * m2 * s22 + s22 * s2 * s2 + s2 * s2 * m2 * m2;
    let den = s22 * s22 * s1 + 2.0 * s1 * m2 * m2 * s22 - 2.0 * s2 * s2 * m2 * m2;
    -0.5 * (num1 * a * a) / den - 0.5 * num2 / den
}

fn k23(p: &Normal2Params, a: f64, r: SigmaTwoReading) -> f64 {
    let (m1, s1, s22, s12) = (p.mu1, p.s11, p.s22, p.s12);
    let s2 = sig2(p, r);
    let num1 = -s2 * s2 * s1 - s12 * s12 * m1 * m1 + s1 * m1 * m1 * s22;
    let num2 = -s1 * m1 * m1 * s22 + s2 * s2 * m1 * m1 + s2 * s2 * s1;
    let den = s1 * s1 * s22 + 2.0 * s1 * m1 * m1 * s22 - 2.0 * s2 * s2 * m1 * m1;
    -0.5 * (num1 * a * a) / den - 0.5 * num2 / den
}

fn k24(p: &Normal2Params, a: f64, r: SigmaTwoReading) -> f64 {
    let (m2, s1, s22, s12) = (p.mu2, p.s11, p.s22, p.s12);
    let s2 = sig2(p, r);
    let num1 = -s22 * s22 * s1 + s1 * m2 * m2 * s22 - 3.0 * s22 * s2 * s2 - s2 * s2 * m2 * m2;
    let num2 = s22 * s22 * s1 - s1 * m2 * m2 * s22 + 3.0 * s22 * s2 * s2 + s2 * s2 * m2 * m2;
    let den1 = s22 * s22 * s1 + s1 * m2 * m2 * s22 + s22 * s2 * s2 - s2 * s2 * m2 * m2;
    // the second denominator is printed with σ₁₂² where the first has σ₂²
    let den2 = s22 * s22 * s1 + s1 * m2 * m2 * s22 + s22 * s12 * s12 - s2 * s2 * m2 * m2;
    -0.25 * (num1 * a * a) / den1 - 0.25 * num2 / den2
}

fn k34(p: &Normal2Params, a: f64, r: SigmaTwoReading) -> f64 {
    let (m1, m2, s1, s22) = (p.mu1, p.mu2, p.s11, p.s22);
    let s2 = sig2(p, r);
    let (s1_2, s1_3) = (s1 * s1, s1 * s1 * s1);
    let (m1_2, m1_4) = (m1 * m1, m1 * m1 * m1 * m1);
    let num1 = -s1_3 * s22 - s1_3 * m2 * m2 - 3.0 * s1_2 * m1_2 * s22
        + s2 * s2 * s1_2
        + 2.0 * s1_2 * m1 * s2 * m2
        + s1 * s22 * m1_4
        + 2.0 * s1 * s2 * s2 * m1_2
        - s2 * s2 * m1_4;
    let num2 =
        s1_3 * s22 + s2 * s2 * m1_4 - s2 * s2 * s1_2 + s1_3 * m2 * m2 + 3.0 * s1_2 * m1_2 * s22
            - 2.0 * s1_2 * m1 * s2 * m2
            - s1 * s22 * m1_4
            - 2.0 * s1 * s2 * s2 * m1_2;
    let den = s1_3 * s22 + s1_3 * m2 * m2 + 3.0 * s1_2 * m1_2 * s22
        - 2.0 * s1_2 * m1 * s2 * m2
        - s2 * s2 * s1_2
        + 2.0 * s1 * s22 * m1_4
        - 2.0 * s1 * s2 * s2 * m1_2
        - 2.0 * s2 * s2 * m1_4;
    -0.5 * (num1 * a * a) / den - 0.5 * num2 / den
}

fn k35(p: &Normal2Params, a: f64, r: SigmaTwoReading) -> f64 {
    let (m1, m2, s1, s22) = (p.mu1, p.mu2, p.s11, p.s22);
    let s2 = sig2(p, r);
    let num1 = -s1 * s22 * s2 * s2 - 2.0 * s1 * s22 * m1 * s2 * m2 + s1 * s22 * m1 * m1 * m2 * m2
        - s1 * s2 * s2 * m2 * m2
        - s2 * s2 * m1 * m1 * s22
        - m1 * m1 * s2 * s2 * m2 * m2
        + s2.powi(4)
        + 4.0 * s2.powi(3) * m1 * m2;
    let num2 = s1 * s22 * s2 * s2 + 2.0 * s1 * s22 * m1 * s2 * m2 - s1 * s22 * m1 * m1 * m2 * m2
        + s1 * s2 * s2 * m2 * m2
        + s2 * s2 * m1 * m1 * s22
        + m1 * m1 * s2 * s2 * m2 * m2
        - s2.powi(4)
        - 4.0 * s2.powi(3) * m1 * m2;
    let den = s1 * s1 * s22 * s22
        + 2.0 * s1 * s1 * m2 * m2 * s22
        + 2.0 * s1 * s22 * s22 * m1 * m1
        + 4.0 * s1 * s22 * m1 * m1 * m2 * m2
        - 4.0 * s2.powi(3) * m1 * m2
        - 4.0 * m1 * m1 * s2 * s2 * m2 * m2
        - s2.powi(4);
    -(num1 * a * a) / den - num2 / den
}

fn k45(p: &Normal2Params, a: f64, r: SigmaTwoReading) -> f64 {
    let (m1, m2, s1, s22, s12) = (p.mu1, p.mu2, p.s11, p.s22, p.s12);
    let s2 = sig2(p, r);
    let (s22_2, s22_3) = (s22 * s22, s22 * s22 * s22);
    let (m2_2, m2_4) = (m2 * m2, m2 * m2 * m2 * m2);
    let num1 = s1 * s22_3 + 3.0 * s1 * s22_2 * m2_2 - s1 * s22 * m2_4 + s22_3 * m1 * m1
        - s22_2 * s2 * s2
        - 2.0 * s22_2 * m1 * s2 * m2
        - 2.0 * s22 * s2 * s2 * m2_2
        + s2 * s2 * m2_4;
    // printed with σ₁₂² where num1 has σ₂²
    let num2 = -s1 * s22_3 - 3.0 * s1 * s22_2 * m2_2 + s1 * s22 * m2_4 - s22_3 * m1 * m1
        + s22_2 * s12 * s12
        + 2.0 * s22_2 * m1 * s2 * m2
        + 2.0 * s22 * s2 * s2 * m2_2
        - s2 * s2 * m2_4;
    let den = s1 * s22_3 + 3.0 * s1 * s22_2 * m2_2 + 2.0 * s1 * s22 * m2_4 + s22_3 * m1 * m1
        - 2.0 * s22_2 * m1 * s2 * m2
        - s22_2 * s2 * s2
        - 2.0 * s22 * s2 * s2 * m2_2
        - 2.0 * s2 * s2 * m2_4;
    0.5 * (num1 * a * a) / den + 0.5 * num2 / den
}

// ---------------------------------------------------------------------------
// Ricci components. Every printed entry has the shape c·(α² − 1).
// ---------------------------------------------------------------------------

fn ric_factor(name: &str, p: &Normal2Params, r: SigmaTwoReading) -> f64 {
    let (m1, m2, s1, s22) = (p.mu1, p.mu2, p.s11, p.s22);
    let s2 = sig2(p, r);
    match name {
        "Ric11" => 0.5 * s1,
        "Ric12" => 0.5 * s2,
        "Ric13" => m1 * s1,
        "Ric14" => 0.5 * s1 * m2 + 0.5 * s2 * m1,
        "Ric15" => s2 * m2,
        "Ric22" => 0.5 * s22,
        "Ric23" => s2 * m1,
        "Ric24" => 0.5 * s22 * m1 + 0.5 * s2 * m2,
        "Ric25" => s22 * m2,
        "Ric33" => 2.0 * s1 * (s1 + m1 * m1),
        "Ric34" => 2.0 * s2 * s1 + m1 * s1 * m2 + m1 * m1 * s2,
        "Ric35" => -s1 * s22 + 3.0 * s2 * s2 + 2.0 * m1 * s2 * m2,
        "Ric44" => {
            1.5 * s1 * s22 + 0.5 * s1 * m2 * m2 + 0.5 * m1 * m1 * s22 + 0.5 * s2 * s2 + m1 * s2 * m2
        }
        "Ric45" => 2.0 * s22 * s2 + s22 * m1 * m2 + s2 * m2 * m2,
        "Ric55" => 2.0 * s22 * (s22 + m2 * m2),
        other => unreachable!("unknown Ricci entry {other}"),
    }
}

macro_rules! ric_fn {
    ($fn_name:ident, $name:literal) => {
        fn $fn_name(p: &Normal2Params, a: f64, r: SigmaTwoReading) -> f64 {
            ric_factor($name, p, r) * (a * a - 1.0)
        }
    };
}

ric_fn!(ric11, "Ric11");
ric_fn!(ric12, "Ric12");
ric_fn!(ric13, "Ric13");
ric_fn!(ric14, "Ric14");
ric_fn!(ric15, "Ric15");
ric_fn!(ric22, "Ric22");
ric_fn!(ric23, "Ric23");
ric_fn!(ric24, "Ric24");
ric_fn!(ric25, "Ric25");
ric_fn!(ric33, "Ric33");
ric_fn!(ric34, "Ric34");
ric_fn!(ric35, "Ric35");
ric_fn!(ric44, "Ric44");
ric_fn!(ric45, "Ric45");
ric_fn!(ric55, "Ric55");

const ENTRIES: [ReferenceEntry; 25] = [
    ReferenceEntry {
        name: "K12",
        kind: EntryKind::Sectional,
        slot: (0, 1),
        ambiguous: false,
        eval: k12,
    },
    ReferenceEntry {
        name: "K13",
        kind: EntryKind::Sectional,
        slot: (0, 2),
        ambiguous: false,
        eval: k13,
    },
    ReferenceEntry {
        name: "K14",
        kind: EntryKind::Sectional,
        slot: (0, 3),
        ambiguous: true,
        eval: k14,
    },
    ReferenceEntry {
        name: "K15",
        kind: EntryKind::Sectional,
        slot: (0, 4),
        ambiguous: true,
        eval: k15,
    },
    ReferenceEntry {
        name: "K23",
        kind: EntryKind::Sectional,
        slot: (1, 2),
        ambiguous: true,
        eval: k23,
    },
    ReferenceEntry {
        name: "K24",
        kind: EntryKind::Sectional,
        slot: (1, 3),
        ambiguous: true,
        eval: k24,
    },
    ReferenceEntry {
        name: "K25",
        kind: EntryKind::Sectional,
        slot: (1, 4),
        ambiguous: false,
        eval: k25,
    },
    ReferenceEntry {
        name: "K34",
        kind: EntryKind::Sectional,
        slot: (2, 3),
        ambiguous: true,
        eval: k34,
    },
    ReferenceEntry {
        name: "K35",
        kind: EntryKind::Sectional,
        slot: (2, 4),
        ambiguous: true,
        eval: k35,
    },
    ReferenceEntry {
        name: "K45",
        kind: EntryKind::Sectional,
        slot: (3, 4),
        ambiguous: true,
        eval: k45,
    },
    ReferenceEntry {
        name: "Ric11",
        kind: EntryKind::Ricci,
        slot: (0, 0),
        ambiguous: false,
        eval: ric11,
    },
    ReferenceEntry {
        name: "Ric12",
        kind: EntryKind::Ricci,
        slot: (0, 1),
        ambiguous: true,
        eval: ric12,
    },
    ReferenceEntry {
        name: "Ric13",
        kind: EntryKind::Ricci,
        slot: (0, 2),
        ambiguous: false,
        eval: ric13,
    },
    ReferenceEntry {
        name: "Ric14",
        kind: EntryKind::Ricci,
        slot: (0, 3),
        ambiguous: true,
        eval: ric14,
    },
    ReferenceEntry {
        name: "Ric15",
        kind: EntryKind::Ricci,
        slot: (0, 4),
        ambiguous: true,
        eval: ric15,
    },
    ReferenceEntry {
        name: "Ric22",
        kind: EntryKind::Ricci,
        slot: (1, 1),
        ambiguous: false,
        eval: ric22,
    },
    ReferenceEntry {
        name: "Ric23",
        kind: EntryKind::Ricci,
        slot: (1, 2),
        ambiguous: true,
        eval: ric23,
    },
    ReferenceEntry {
        name: "Ric24",
        kind: EntryKind::Ricci,
        slot: (1, 3),
        ambiguous: true,
        eval: ric24,
    },
    ReferenceEntry {
        name: "Ric25",
        kind: EntryKind::Ricci,
        slot: (1, 4),
        ambiguous: false,
        eval: ric25,
    },
    ReferenceEntry {
        name: "Ric33",
        kind: EntryKind::Ricci,
        slot: (2, 2),
        ambiguous: false,
        eval: ric33,
    },
    ReferenceEntry {
        name: "Ric34",
        kind: EntryKind::Ricci,
        slot: (2, 3),
        ambiguous: true,
        eval: ric34,
    },
    ReferenceEntry {
        name: "Ric35",
        kind: EntryKind::Ricci,
        slot: (2, 4),
        ambiguous: true,
        eval: ric35,
    },
    ReferenceEntry {
        name: "Ric44",
        kind: EntryKind::Ricci,
        slot: (3, 3),
        ambiguous: true,
        eval: ric44,
    },
    ReferenceEntry {
        name: "Ric45",
        kind: EntryKind::Ricci,
        slot: (3, 4),
        ambiguous: true,
        eval: ric45,
    },
    ReferenceEntry {
        name: "Ric55",
        kind: EntryKind::Ricci,
        slot: (4, 4),
        ambiguous: false,
        eval: ric55,
    },
];
