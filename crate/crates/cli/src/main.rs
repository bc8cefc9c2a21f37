mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use relmirror::catalog::{format_class, InvariantKind, BUILTIN_NAMES};
use relmirror::identities::{bell_suite, lagrange_suite, roundtrip_g_w, SuiteReport};
use relmirror::periods::{
    classical_period, delta_d_check, point_invariants, proper_potential, quantum_period, regularize,
    verify_period_theorem, PeriodSeries,
};
use relmirror::pipeline::{
    extended_i, geometry_i_function, invert_mirror_map, mirror_data, tau_d, ContactEntry, Direction, MirrorChange,
    RelativeRing,
};
use relmirror::{builtin, format_rational, load_geometry, AlgebraElement, GradedAlgebra, InvariantTable, PairGeometry};
use serde_json::{json, Value};

use output::{emit, write_csv, write_table, Format, Record};

#[derive(Parser, Debug)]
#[command(name = "relmirror", version, about = "Exact mirror maps, proper potentials and periods of log Calabi-Yau pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Builtin geometry name or path to a geometry TOML file.
    #[arg(long)]
    geometry: String,
    /// Maximal total Novikov weight (at least 2).
    #[arg(long)]
    order: Option<u32>,
    /// Lowest z-power kept.
    #[arg(long, allow_hyphen_values = true)]
    z_min: Option<i64>,
    /// Invariant table (JSON or CSV) attached to the geometry.
    #[arg(long)]
    invariants: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "pretty")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Relative I-function body, per curve class, contact order and z-power.
    IFunction {
        #[command(flatten)]
        common: Common,
        /// Add the extension variable for the unit class of contact 1.
        #[arg(long)]
        extended: bool,
    },
    /// Mirror map in D.
    TauD {
        #[command(flatten)]
        common: Common,
    },
    /// g, the contact -1 and nonnegative-contact reports, and y(q).
    MirrorMap {
        #[command(flatten)]
        common: Common,
    },
    /// Quantum period from the point invariants.
    QuantumPeriod {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        per_beta: bool,
        /// Write the invariant table used (JSON, or CSV for a .csv path).
        #[arg(long)]
        write_invariants: Option<PathBuf>,
    },
    /// Quantum period with degree-d terms multiplied by d!.
    RegularizedPeriod {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        per_beta: bool,
    },
    /// W = x exp(g(y(q))).
    ProperPotential {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        per_beta: bool,
    },
    /// Constant terms of the powers of W.
    ClassicalPeriod {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        per_beta: bool,
    },
    /// Period comparison, Delta_D identities and the g -> W -> g round trip.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Perturb one point invariant; passes when the mismatch is flagged.
        #[arg(long)]
        negative_control: bool,
    },
    /// Randomized Lagrange inversion and Bell identity suites.
    Identities {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        cases: usize,
        /// Order for both suites (defaults: 10 for Lagrange, 12 for Bell).
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn check_order(order: Option<u32>) -> Result<()> {
    match order {
        Some(n) if n < 2 => bail!("--order must be at least 2, got {n}"),
        _ => Ok(()),
    }
}

fn load(common: &Common) -> Result<PairGeometry> {
    check_order(common.order)?;
    let path = Path::new(&common.geometry);
    let mut g = if BUILTIN_NAMES.contains(&common.geometry.as_str()) {
        builtin(&common.geometry)?
    } else if path.exists() {
        load_geometry(&read(path)?).with_context(|| format!("loading {}", path.display()))?
    } else {
        bail!(
            "`{}` is neither a builtin geometry ({}) nor a readable file",
            common.geometry,
            BUILTIN_NAMES.join(", ")
        );
    };
    if let Some(n) = common.order {
        g = g.with_order(n);
    }
    if let Some(z) = common.z_min {
        let mut policy = g.policy.clone();
        if z > -1 {
            bail!("--z-min must be at most -1, got {z}");
        }
        policy.z_min = z;
        g = g.with_policy(policy)?;
    }
    if let Some(p) = &common.invariants {
        let table = InvariantTable::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
        g = g.with_invariants(table)?;
    }
    Ok(g)
}

fn class_entries(alg: &GradedAlgebra, a: &AlgebraElement) -> Vec<(String, relmirror::Rational)> {
    alg.labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), a.coefficient(i).clone()))
        .filter(|(_, c)| *c != relmirror::Rational::from_integer(0.into()))
        .collect()
}

fn i_function(g: &PairGeometry, extended: bool) -> Result<Vec<Record>> {
    let i = if extended { extended_i(g, &tau_d(g)?)? } else { geometry_i_function(g)? };
    let mut eg = g.clone();
    eg.policy = i.body.policy().clone();
    let ring = RelativeRing::new(&eg);
    let mut out = Vec::new();
    for (beta, x) in i.body.terms() {
        for (n, a) in x.components() {
            let alg = if *n == 0 { &g.ambient } else { &g.divisor };
            for (k, c) in ring.visible(*n, a).terms() {
                for (label, v) in class_entries(alg, c) {
                    out.push(
                        Record::new("I", v)
                            .with("beta", format_class(beta))
                            .with("contact", *n)
                            .with("z_exp", *k)
                            .with("class", label),
                    );
                }
            }
        }
    }
    Ok(out)
}

fn tau_d_records(g: &PairGeometry) -> Result<Vec<Record>> {
    let tau = tau_d(g)?;
    let mut out = Vec::new();
    for (beta, x) in tau.terms() {
        for (k, c) in x.terms() {
            for (label, v) in class_entries(&g.ambient, c) {
                out.push(
                    Record::new("tau_D", v)
                        .with("beta", format_class(beta))
                        .with("z_exp", *k)
                        .with("class", label),
                );
            }
        }
    }
    Ok(out)
}

fn contact_records(series: &str, entries: &[ContactEntry]) -> Vec<Record> {
    entries
        .iter()
        .map(|e| {
            Record::new(series, e.unit.clone())
                .with("beta", format_class(&e.beta))
                .with("contact", e.contact)
                .with("class", e.class.clone())
        })
        .collect()
}

fn mirror_map(g: &PairGeometry) -> Result<Vec<Record>> {
    let data = mirror_data(g)?;
    let e = &data.extraction;
    let mut out: Vec<Record> = e
        .g
        .terms()
        .iter()
        .map(|(beta, c)| Record::new("g", c.clone()).with("beta", format_class(beta)))
        .collect();
    out.extend(contact_records("contact_minus_one", &e.contact_minus_one));
    out.extend(contact_records("contact_nonnegative", &e.nonnegative));
    let y = invert_mirror_map(&MirrorChange::new(e.g.clone(), g.m_vector.clone(), Direction::Forward)?)?;
    for (i, s) in y.iter().enumerate() {
        for (beta, c) in s.terms() {
            out.push(
                Record::new("y_of_q", c.clone())
                    .with("variable", g.novikov[i].clone())
                    .with("beta", format_class(beta)),
            );
        }
    }
    Ok(out)
}

fn period_records(series: &str, p: &PeriodSeries, g: &PairGeometry, per_beta: bool) -> Vec<Record> {
    if per_beta {
        return p
            .per_beta
            .iter()
            .map(|(beta, c)| {
                Record::new(series, c.clone())
                    .with("beta", format_class(beta))
                    .with("t_deg", g.degree(beta))
            })
            .collect();
    }
    p.nonzero()
        .into_iter()
        .map(|(d, c)| Record::new(series, c).with("t_deg", d))
        .collect()
}

fn potential_records(g: &PairGeometry, per_beta: bool) -> Result<Vec<Record>> {
    let w = proper_potential(g)?;
    if per_beta {
        return Ok(w
            .w
            .entries()
            .into_iter()
            .map(|(k, beta, c)| Record::new("W", c).with("x_exp", k).with("beta", format_class(&beta)))
            .collect());
    }
    Ok(w.aggregated()
        .into_iter()
        .map(|(k, d, c)| Record::new("W", c).with("x_exp", k).with("t_deg", d))
        .collect())
}

fn write_invariants(g: &PairGeometry, path: &Path) -> Result<()> {
    let table = point_invariants(g)?;
    let text = if path.extension().is_some_and(|e| e == "csv") {
        table.to_csv()?
    } else {
        table.to_json()?
    };
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn metadata(g: &PairGeometry) -> Value {
    json!({
        "tool": "relmirror",
        "version": env!("CARGO_PKG_VERSION"),
        "geometry": g.name,
        "novikov": g.novikov,
        "weights": g.policy.weights,
        "order": g.policy.max_weight,
        "z_min": g.policy.z_min,
        "m_vector": g.m_vector,
        "negative_m": g.negative_m(),
        "invariant_rows": g.invariants.as_ref().map_or(0, |t| t.len()),
        "divisor_rows": g.invariants.as_ref().map_or(0, |t| t.rows(InvariantKind::D, relmirror::catalog::POINT).count()),
        "conventions": {
            "state_space_product": "[a]_i [b]_j = [ab]_(i+j), times D when i < 0 or j < 0 and i + j > 0",
            "contact_minus_one": "[1]_-1 components are reported separately and excluded from g",
            "g": "unit coefficients of [1]_n with n <= -2 in the z^0 part of J",
            "m_vector_signs": "m_i = D.beta_i; negative entries are allowed and listed in negative_m",
            "truncation": "series keep exponents with weighted total at most order",
            "rationals": "exact strings p/q",
        },
    })
}

fn verify(g: &PairGeometry, negative_control: bool, format: Format, out: &mut impl Write) -> Result<bool> {
    let period = verify_period_theorem(g, negative_control)?;
    let delta = delta_d_check(g)?;
    let roundtrip = roundtrip_g_w(&mirror_data(g)?.extraction.g, &g.m_vector)?;
    let period_ok = if negative_control { period.first_mismatch.is_some() } else { period.passed() };
    let passed = period_ok && delta.passed() && roundtrip.holds;
    match format {
        Format::Json => {
            let mut meta = metadata(g);
            meta["negative_control"] = negative_control.into();
            let report = json!({
                "metadata": meta,
                "period": period,
                "delta_d": delta,
                "roundtrip": roundtrip,
                "passed": passed,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Format::Csv | Format::Pretty => {
            let header: Vec<String> = ["check", "selector", "lhs", "rhs", "holds"].map(String::from).into();
            let mut body: Vec<Vec<String>> = period
                .rows
                .iter()
                .map(|r| {
                    vec![
                        "period".into(),
                        format!("t^{}", r.degree),
                        format_rational(&r.classical),
                        format_rational(&r.regularized_quantum),
                        r.matches.to_string(),
                    ]
                })
                .collect();
            for c in delta.checks.iter().chain([&roundtrip]) {
                let (sel, l, r) = match &c.first_difference {
                    Some((e, l, r)) => (format_class(e), l.clone(), r.clone()),
                    None => (String::new(), String::new(), String::new()),
                };
                body.push(vec![c.name.clone(), sel, l, r, c.holds.to_string()]);
            }
            if format == Format::Csv {
                write_csv(out, &header, &body)?;
            } else {
                write_table(out, &header, &body)?;
                if let Some(p) = &period.perturbed {
                    writeln!(out, "perturbed: {p}")?;
                }
                match period.first_mismatch {
                    Some(d) => writeln!(out, "first period mismatch at t^{d}")?,
                    None => writeln!(out, "classical period = regularized quantum period through t^{}", period.rows.len().saturating_sub(1))?,
                }
                writeln!(out, "{}", if passed { "PASS" } else { "FAIL" })?;
            }
        }
    }
    Ok(passed)
}

fn identities(seed: u64, cases: usize, order: Option<u32>, format: Format, out: &mut impl Write) -> Result<bool> {
    check_order(order)?;
    let suites: Vec<SuiteReport> = vec![
        lagrange_suite(seed, cases, order.unwrap_or(10))?,
        bell_suite(seed, cases, order.unwrap_or(12))?,
    ];
    let passed = suites.iter().all(SuiteReport::passed);
    match format {
        Format::Json => {
            let report = json!({
                "metadata": {
                    "tool": "relmirror",
                    "version": env!("CARGO_PKG_VERSION"),
                    "seed": seed,
                    "cases": cases,
                    "rng": "ChaCha8, rationals n/d with n in -9..=9 and d in 1..=6",
                },
                "suites": suites,
                "passed": passed,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Format::Csv | Format::Pretty => {
            let header: Vec<String> = ["suite", "seed", "cases", "order", "failures"].map(String::from).into();
            let body: Vec<Vec<String>> = suites
                .iter()
                .map(|s| {
                    vec![
                        s.name.clone(),
                        s.seed.to_string(),
                        s.cases.to_string(),
                        s.order.to_string(),
                        s.failures.len().to_string(),
                    ]
                })
                .collect();
            if format == Format::Csv {
                write_csv(out, &header, &body)?;
            } else {
                write_table(out, &header, &body)?;
                for s in &suites {
                    for f in &s.failures {
                        writeln!(out, "{} failure: {f}", s.name)?;
                    }
                }
                writeln!(out, "{}", if passed { "PASS" } else { "FAIL" })?;
            }
        }
    }
    Ok(passed)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<bool> {
    let (common, records) = match cli.command {
        Command::IFunction { common, extended } => {
            let g = load(&common)?;
            (common.clone(), i_function(&g, extended)?)
        }
        Command::TauD { common } => {
            let g = load(&common)?;
            (common.clone(), tau_d_records(&g)?)
        }
        Command::MirrorMap { common } => {
            let g = load(&common)?;
            (common.clone(), mirror_map(&g)?)
        }
        Command::QuantumPeriod {
            common,
            per_beta,
            write_invariants: path,
        } => {
            let g = load(&common)?;
            if let Some(p) = path {
                write_invariants(&g, &p)?;
            }
            (common.clone(), period_records("G", &quantum_period(&g)?, &g, per_beta))
        }
        Command::RegularizedPeriod { common, per_beta } => {
            let g = load(&common)?;
            let p = regularize(&quantum_period(&g)?)?;
            (common.clone(), period_records("G_hat", &p, &g, per_beta))
        }
        Command::ProperPotential { common, per_beta } => {
            let g = load(&common)?;
            (common.clone(), potential_records(&g, per_beta)?)
        }
        Command::ClassicalPeriod { common, per_beta } => {
            let g = load(&common)?;
            let p = classical_period(&proper_potential(&g)?)?;
            (common.clone(), period_records("pi_W", &p, &g, per_beta))
        }
        Command::Verify {
            common,
            negative_control,
        } => {
            let g = load(&common)?;
            return verify(&g, negative_control, common.format, out);
        }
        Command::Identities {
            seed,
            cases,
            order,
            format,
        } => return identities(seed, cases, order, format, out),
    };
    emit(out, common.format, &records)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
