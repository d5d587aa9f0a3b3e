//! Deterministic stand-in for the three public ASD screening files.
//!
//! Layout, attribute declarations, quoting and missing-value pattern follow
//! the published child (292 rows), adolescent (104) and adult (704) ARFF
//! files. Item responses come from a one-factor logistic model and the class
//! is the AQ-10 screening rule: YES iff more than six items score 1. Group
//! means of the latent trait are set so each file's YES rate lands near the
//! published class balance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use asdbench::sampling::SeededRng;

struct Group {
    file: &'static str,
    relation: &'static str,
    rows: usize,
    age: fn(&mut SeededRng) -> u32,
    age_desc: &'static str,
    trait_mean: f64,
    missing_profile: f64,
    missing_age: usize,
    relation_weights: [f64; 5],
    seed: u64,
}

const ITEM_SLOPE: [f64; 10] = [1.1, 1.4, 0.9, 1.2, 1.6, 1.3, 0.8, 1.0, 1.5, 1.2];
const ITEM_LOCATION: [f64; 10] = [-0.8, 0.1, -0.2, 0.4, -0.1, 0.6, -0.5, 0.9, 0.2, -0.4];

const ETHNICITY: [(&str, f64); 10] = [
    ("White-European", 0.36),
    ("Asian", 0.16),
    ("Middle Eastern ", 0.13),
    ("Black", 0.06),
    ("South Asian", 0.06),
    ("Others", 0.06),
    ("Latino", 0.05),
    ("Hispanic", 0.04),
    ("Pasifika", 0.04),
    ("Turkish", 0.04),
];

const RELATION: [&str; 5] = ["Parent", "Self", "Relative", "Health care professional", "Others"];

const COUNTRIES: [&str; 36] = [
    "United States",
    "United Kingdom",
    "India",
    "New Zealand",
    "Jordan",
    "United Arab Emirates",
    "Australia",
    "Canada",
    "Afghanistan",
    "Sri Lanka",
    "Netherlands",
    "France",
    "Brazil",
    "Iran",
    "Pakistan",
    "Russia",
    "Mexico",
    "Egypt",
    "Italy",
    "Spain",
    "Bangladesh",
    "Austria",
    "Ireland",
    "Germany",
    "Saudi Arabia",
    "Kazakhstan",
    "Malaysia",
    "Philippines",
    "South Africa",
    "Viet Nam",
    "Japan",
    "Sweden",
    "Lebanon",
    "Romania",
    "Argentina",
    "Armenia",
];

fn groups() -> [Group; 3] {
    [
        Group {
            file: "Autism-Child-Data.arff",
            relation: "child",
            rows: 292,
            age: |r| 4 + r.below(8) as u32,
            age_desc: "4-11 years",
            trait_mean: 0.45,
            missing_profile: 43.0 / 292.0,
            missing_age: 4,
            relation_weights: [0.85, 0.04, 0.06, 0.04, 0.01],
            seed: 11,
        },
        Group {
            file: "Autism-Adolescent-Data.arff",
            relation: "adolescent",
            rows: 104,
            age: |r| 12 + r.below(5) as u32,
            age_desc: "12-16 years",
            trait_mean: 0.6,
            missing_profile: 6.0 / 104.0,
            missing_age: 0,
            relation_weights: [0.7, 0.15, 0.08, 0.05, 0.02],
            seed: 12,
        },
        Group {
            file: "Autism-Adult-Data.arff",
            relation: "adult",
            rows: 704,
            age: |r| {
                let e = -(1.0 - r.unit()).ln() * 11.0;
                (18.0 + e).min(64.0) as u32
            },
            age_desc: "18 and more",
            trait_mean: -0.3,
            missing_profile: 95.0 / 704.0,
            missing_age: 2,
            relation_weights: [0.07, 0.86, 0.04, 0.01, 0.02],
            seed: 13,
        },
    ]
}

fn normal(rng: &mut SeededRng) -> f64 {
    let u1 = 1.0 - rng.unit();
    let u2 = rng.unit();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn bernoulli(rng: &mut SeededRng, p: f64) -> bool {
    rng.unit() < p
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn weighted<'a>(rng: &mut SeededRng, items: impl Iterator<Item = (&'a str, f64)> + Clone) -> &'a str {
    let total: f64 = items.clone().map(|(_, w)| w).sum();
    let mut u = rng.unit() * total;
    let mut last = "";
    for (v, w) in items {
        if u < w {
            return v;
        }
        u -= w;
        last = v;
    }
    last
}

/// ARFF value, quoted the way the public files quote it.
fn quote(v: &str) -> String {
    if v.contains(' ') || v.contains(',') || v.contains('\'') {
        format!("'{}'", v.replace('\'', "\\'"))
    } else {
        v.to_string()
    }
}

fn nominal(values: &[&str]) -> String {
    let q: Vec<String> = values.iter().map(|v| quote(v)).collect();
    format!("{{{}}}", q.join(","))
}

/// ARFF text of one replica file.
fn render(g: &Group) -> String {
    let mut rng = SeededRng::new(g.seed);
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", g.relation);
    let _ = writeln!(out);
    for j in 1..=10 {
        let _ = writeln!(out, "@attribute A{j}_Score {{0,1}}");
    }
    let ethnicity: Vec<&str> = ETHNICITY.iter().map(|(e, _)| *e).collect();
    let _ = writeln!(out, "@attribute age numeric");
    let _ = writeln!(out, "@attribute gender {{m,f}}");
    let _ = writeln!(out, "@attribute ethnicity {}", nominal(&ethnicity));
    let _ = writeln!(out, "@attribute jundice {{no,yes}}");
    let _ = writeln!(out, "@attribute austim {{no,yes}}");
    let _ = writeln!(out, "@attribute contry_of_res {}", nominal(&COUNTRIES));
    let _ = writeln!(out, "@attribute used_app_before {{no,yes}}");
    let _ = writeln!(out, "@attribute result numeric");
    let _ = writeln!(out, "@attribute age_desc {}", nominal(&[g.age_desc]));
    let _ = writeln!(out, "@attribute relation {}", nominal(&RELATION));
    let _ = writeln!(out, "@attribute Class/ASD {{NO,YES}}");
    let _ = writeln!(out);
    let _ = writeln!(out, "@data");

    let mut missing_age = vec![false; g.rows];
    let mut placed = 0;
    while placed < g.missing_age {
        let i = rng.below(g.rows as u64) as usize;
        if !missing_age[i] {
            missing_age[i] = true;
            placed += 1;
        }
    }
    for row in 0..g.rows {
        let z = g.trait_mean + normal(&mut rng);
        let scores: Vec<u8> = (0..10)
            .map(|j| u8::from(bernoulli(&mut rng, logistic(1.7 * ITEM_SLOPE[j] * (z - ITEM_LOCATION[j])))))
            .collect();
        let sum: u32 = scores.iter().map(|&s| u32::from(s)).sum();
        let age = (g.age)(&mut rng);
        let gender = if bernoulli(&mut rng, 0.5) { "m" } else { "f" };
        let profile_missing = bernoulli(&mut rng, g.missing_profile);
        let eth = weighted(&mut rng, ETHNICITY.iter().copied());
        let jundice = bernoulli(&mut rng, logistic(-2.0 + 0.3 * z));
        let austim = bernoulli(&mut rng, logistic(-2.2 + 0.4 * z));
        let weights = COUNTRIES
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, 1.0 / (i as f64 + 1.0)));
        let country = weighted(&mut rng, weights);
        let app = bernoulli(&mut rng, 0.03);
        let rel = weighted(
            &mut rng,
            RELATION.iter().copied().zip(g.relation_weights.iter().copied()),
        );

        let mut cells: Vec<String> = scores.iter().map(|s| s.to_string()).collect();
        cells.push(if missing_age[row] { "?".into() } else { age.to_string() });
        cells.push(gender.into());
        cells.push(if profile_missing { "?".into() } else { quote(eth) });
        cells.push(if jundice { "yes" } else { "no" }.into());
        cells.push(if austim { "yes" } else { "no" }.into());
        cells.push(quote(country));
        cells.push(if app { "yes" } else { "no" }.into());
        cells.push(sum.to_string());
        cells.push(quote(g.age_desc));
        cells.push(if profile_missing { "?".into() } else { quote(rel) });
        cells.push(if sum > 6 { "YES" } else { "NO" }.into());
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Writes the three replica files into `dir` and returns their paths in
/// child, adolescent, adult order.
pub fn write_replica(dir: &Path) -> Vec<PathBuf> {
    std::fs::create_dir_all(dir).expect("create replica directory");
    groups()
        .iter()
        .map(|g| {
            let p = dir.join(g.file);
            std::fs::write(&p, render(g)).expect("write replica file");
            p
        })
        .collect()
}
