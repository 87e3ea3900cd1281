//! Published benchmark tables for the six test baskets: Monte-Carlo means,
//! their standard errors, the moment-matched prices and the C1/C2 footers.

#![allow(dead_code)]

pub struct Column {
    pub group: &'static str,
    pub law: &'static str,
    /// `(scenario, index of the strike within the scenario)` per entry.
    pub cases: &'static [(&'static str, usize)],
    pub mc: &'static [f64],
    pub se: &'static [f64],
    pub ours: &'static [f64],
    pub c1: f64,
    pub c2: f64,
}

const S1: &[(&str, usize)] = &[("S1", 0), ("S1", 1), ("S1", 2), ("S1", 3), ("S1", 4)];
const S2: &[(&str, usize)] = &[("S2", 0), ("S2", 1), ("S2", 2), ("S2", 3), ("S2", 4)];
const S3: &[(&str, usize)] = &[("S3", 0), ("S3", 1), ("S3", 2), ("S3", 3), ("S3", 4)];
const S456: &[(&str, usize)] = &[("S4", 0), ("S5", 0), ("S6", 0)];

pub const COLUMNS: &[Column] = &[
    Column {
        group: "s1",
        law: "exp1",
        cases: S1,
        mc: &[9.3540, 8.3827, 7.5417, 6.8105, 6.1717],
        se: &[0.0064, 0.0062, 0.0061, 0.0059, 0.0058],
        ours: &[9.4214, 8.4529, 7.6117, 6.8780, 6.2353],
        c1: 100.0,
        c2: 0.90,
    },
    Column {
        group: "s1",
        law: "gamma22",
        cases: S1,
        mc: &[9.7012, 8.7296, 7.8562, 7.0747, 6.3771],
        se: &[0.0057, 0.0055, 0.0054, 0.0052, 0.0051],
        ours: &[9.7275, 8.7581, 7.8858, 7.1043, 6.4060],
        c1: 100.0,
        c2: 0.37,
    },
    Column {
        group: "s1",
        law: "ig12",
        cases: S1,
        mc: &[9.7601, 8.7898, 7.9112, 7.1194, 6.4085],
        se: &[0.0057, 0.0056, 0.0054, 0.0052, 0.0051],
        ours: &[9.8083, 8.8378, 7.9579, 7.1639, 6.4502],
        c1: 100.0,
        c2: 0.58,
    },
    Column {
        group: "s2",
        law: "exp1",
        cases: S2,
        mc: &[10.1565, 12.2973, 14.8167, 17.6883, 20.8524],
        se: &[0.0061, 0.0066, 0.0070, 0.0075, 0.0079],
        ours: &[10.1627, 12.3898, 14.9907, 17.9198, 21.1214],
        c1: 100.0,
        c2: 0.92,
    },
    Column {
        group: "s2",
        law: "gamma22",
        cases: S2,
        mc: &[10.8574, 13.0688, 15.5660, 18.3386, 21.3661],
        se: &[0.0060, 0.0065, 0.0070, 0.0074, 0.0079],
        ours: &[10.9906, 13.2499, 15.7861, 18.5865, 21.6310],
        c1: 100.0,
        c2: 1.32,
    },
    Column {
        group: "s2",
        law: "ig12",
        cases: S2,
        mc: &[11.0131, 13.2423, 15.7384, 18.4918, 21.4880],
        se: &[0.0059, 0.0064, 0.0070, 0.0075, 0.0079],
        ours: &[11.1013, 13.3770, 15.9116, 18.6949, 21.7121],
        c1: 100.0,
        c2: 1.01,
    },
    Column {
        group: "s3",
        law: "exp1",
        cases: S3,
        mc: &[25.2992, 17.4806, 11.4667, 7.6897, 5.3455],
        se: &[0.0090, 0.0085, 0.0078, 0.0070, 0.0062],
        ours: &[25.2967, 17.4779, 11.4657, 7.6919, 5.3512],
        c1: 100.0,
        c2: 0.03,
    },
    Column {
        group: "s3",
        law: "gamma22",
        cases: S3,
        mc: &[25.4051, 17.8465, 12.0070, 7.9797, 5.3472],
        se: &[0.0086, 0.0079, 0.0071, 0.0062, 0.0054],
        ours: &[25.3848, 17.8327, 11.9987, 7.9744, 5.3437],
        c1: 100.0,
        c2: 0.07,
    },
    Column {
        group: "s3",
        law: "ig12",
        cases: S3,
        mc: &[25.3672, 17.8799, 12.0898, 8.0080, 5.3073],
        se: &[0.0086, 0.0079, 0.0071, 0.0062, 0.0054],
        ours: &[25.3714, 17.8857, 12.0973, 8.0186, 5.3188],
        c1: 100.0,
        c2: 0.09,
    },
    Column {
        group: "s4-6",
        law: "exp1",
        cases: S456,
        mc: &[1.1595, 6.7895, 8.9799],
        se: &[0.0013, 0.0029, 0.0062],
        ours: &[1.1473, 6.8238, 9.0029],
        c1: 100.0,
        c2: 0.60,
    },
    Column {
        group: "s4-6",
        law: "gamma22",
        cases: S456,
        mc: &[1.1457, 7.1012, 9.3498],
        se: &[0.0012, 0.0029, 0.0056],
        ours: &[1.1438, 7.1307, 9.3764],
        c1: 100.0,
        c2: 0.29,
    },
    Column {
        group: "s4-6",
        law: "ig12",
        cases: S456,
        mc: &[1.1310, 7.1661, 9.4288],
        se: &[0.0012, 0.0029, 0.0056],
        ours: &[1.1279, 7.1926, 9.4512],
        c1: 100.0,
        c2: 0.29,
    },
];

pub fn table2() -> basketmm::scenario::ScenarioFile {
    basketmm::scenario::ScenarioFile::load(std::path::Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/table2.toml"
    )))
    .expect("bundled scenario file parses")
}
