//! The `ulrich` command line.
//!
//! Every subcommand prints either a human-readable summary or, with
//! `--json`, a single line of JSON. Exit codes: 0 success, 1 usage or parse
//! error, 2 unsupported input, 3 internal inconsistency.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Parser, Subcommand};
use itertools::Itertools;
use serde::Serialize;

use crate::cohomology::oracle::toric_cech_oracle;
use crate::cohomology::{cohomology, euler_characteristic, line_cohomology, CohomologyTable};
use crate::enumerate::{
    parse_box, pullback_ulrich_line_search, ulrich_line_bundles, zero_cohomology_line_bundles, ScanResult,
};
use crate::error::{Error, Result};
use crate::grammar::{parse_bundle, parse_divisor, parse_variety};
use crate::kernelbundle::{
    kernel_cohomology, lemma_conditions_check, prop61_builder, KernelBundlePresentation, Prop61Report,
};
use crate::picard::{
    canonical_class, is_ample, is_very_ample, very_ample_threshold, DivisorClass, SplitBundle, Variety,
};
use crate::ulrich::{
    direct_ulrich_check, is_ulrich, pullback_ulrich_criterion, semiorthogonality_probe, serre_partner,
    Polarisation, UlrichReport,
};

#[derive(Debug, Parser)]
#[command(name = "ulrich", version, about = "Cohomology and Ulrich tests for split bundles")]
struct Cli {
    /// Print one line of JSON instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cohomology table of a split bundle.
    Coh { variety: String, bundle: String },
    /// Euler characteristic of a split bundle.
    Chi { variety: String, bundle: String },
    /// Ampleness and very ampleness of a divisor class.
    Ample { variety: String, divisor: String },
    /// Canonical class.
    Canonical { variety: String },
    /// Least t with pi^*(t * direction) + H very ample on a projective bundle.
    Threshold {
        bundle_variety: String,
        direction: Option<String>,
    },
    /// Ulrich test by definition.
    Ulrich {
        variety: String,
        bundle: String,
        #[arg(long)]
        pol: String,
    },
    /// Serre partner F^v(K + (dim+1)A).
    Partner {
        variety: String,
        bundle: String,
        #[arg(long)]
        pol: String,
    },
    /// Base criterion for pi^*F(pi^*A + H) on a projective bundle.
    Criterion {
        bundle_variety: String,
        sheaf: String,
        #[arg(long)]
        pol: String,
    },
    /// Direct test of pi^*F(pi^*A + H) on the projective bundle.
    Direct {
        bundle_variety: String,
        sheaf: String,
        #[arg(long)]
        pol: String,
    },
    /// Hom(pi^*L1, pi^*L2(-pH)).
    Probe {
        bundle_variety: String,
        l1: String,
        l2: String,
        #[arg(short, allow_hyphen_values = true)]
        p: i64,
    },
    /// Line bundles without cohomology in a box.
    EnumZero {
        variety: String,
        #[arg(long = "box")]
        search_box: String,
    },
    /// Ulrich line bundles in a box.
    EnumUlrich {
        variety: String,
        #[arg(long)]
        pol: String,
        #[arg(long = "box")]
        search_box: String,
    },
    /// Base line bundles F with pi^*F(pi^*A + H) Ulrich.
    SearchPb {
        bundle_variety: String,
        #[arg(long)]
        pol: String,
        #[arg(long = "box")]
        search_box: String,
    },
    /// Kernel bundle presentation on P^n and its cohomology.
    Kernel {
        n: u32,
        d: u32,
        /// Symmetric-Euler matrix instead of the staircase.
        #[arg(long, conflicts_with = "random")]
        sym: bool,
        /// Staircase-shaped matrix with seeded random coefficients.
        #[arg(long, value_name = "SEED")]
        random: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<i64>,
    },
    /// Rank-n Ulrich candidates on P(O(1) + O^d) over P^n.
    Prop61 { n: u32, d: u32 },
    /// Toric Čech cohomology compared with the engine.
    Oracle { variety: String, divisor: String },
}

/// Successful command output.
struct Output {
    json: String,
    human: String,
    /// Exit code 3 after printing, for detected disagreements.
    inconsistent: bool,
}

impl Output {
    fn new<T: Serialize>(value: &T, human: String) -> Self {
        Output {
            json: serde_json::to_string(value).expect("serializable output"),
            human,
            inconsistent: false,
        }
    }
}

#[derive(Serialize)]
struct ErrorPayload<'a> {
    error: &'a str,
    detail: String,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 1,
        e if e.is_internal() => 3,
        _ => 2,
    }
}

/// Runs the command line, writing to `out` and `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(o) => {
            let _ = if cli.json {
                writeln!(out, "{}", o.json)
            } else {
                write!(out, "{}", o.human)
            };
            if o.inconsistent {
                3
            } else {
                0
            }
        }
        Err(e) => {
            let detail = e.to_string();
            if cli.json {
                let payload = ErrorPayload { error: e.code(), detail };
                let _ = writeln!(out, "{}", serde_json::to_string(&payload).expect("serializable"));
            } else {
                let _ = writeln!(err, "error [{}]: {detail}", e.code());
            }
            exit_code(&e)
        }
    }
}

fn pb_parts(s: &str) -> Result<(Variety, Variety, SplitBundle)> {
    let v = parse_variety(s)?;
    let pb = v
        .as_proj_bundle()
        .ok_or_else(|| Error::UnsupportedVariety(format!("{v} is not a projective bundle")))?;
    let (base, e) = (pb.base().clone(), pb.bundle().clone());
    Ok((v, base, e))
}

fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Coh { variety, bundle } => {
            let v = parse_variety(variety)?;
            let e = parse_bundle(&v, bundle)?;
            let t = cohomology(&v, &e)?;
            Ok(Output::new(&t, format!("H^*({e}) on {v}: {}\n", table_line(&t))))
        }
        Command::Chi { variety, bundle } => {
            let v = parse_variety(variety)?;
            let e = parse_bundle(&v, bundle)?;
            let chi = euler_characteristic(&v, &e)?;
            #[derive(Serialize)]
            struct Chi {
                #[serde(serialize_with = "crate::bigjson::int")]
                chi: num_bigint::BigInt,
            }
            let human = format!("chi({e}) on {v} = {chi}\n");
            Ok(Output::new(&Chi { chi }, human))
        }
        Command::Ample { variety, divisor } => {
            let v = parse_variety(variety)?;
            let d = parse_divisor(&v, divisor)?;
            let ample = is_ample(&v, &d)?;
            let va = is_very_ample(&v, &d)?;
            #[derive(Serialize)]
            struct Ample {
                divisor: DivisorClass,
                ample: bool,
                very_ample: bool,
                sufficient_only: bool,
            }
            let mut human = format!("{d} on {v}: ample {ample}, very ample {}\n", va.very_ample);
            if va.sufficient_only {
                human.push_str("(sufficient test only: false may be inconclusive)\n");
            }
            Ok(Output::new(
                &Ample {
                    divisor: d,
                    ample,
                    very_ample: va.very_ample,
                    sufficient_only: va.sufficient_only,
                },
                human,
            ))
        }
        Command::Canonical { variety } => {
            let v = parse_variety(variety)?;
            let k = canonical_class(&v);
            #[derive(Serialize)]
            struct Canonical {
                canonical: DivisorClass,
            }
            let human = format!("K = {k} on {v}\n");
            Ok(Output::new(&Canonical { canonical: k }, human))
        }
        Command::Threshold {
            bundle_variety,
            direction,
        } => {
            let (v, base, _) = pb_parts(bundle_variety)?;
            let dir = match direction {
                Some(s) => parse_divisor(&base, s)?,
                None => base.unit_class(),
            };
            let m = very_ample_threshold(&v, &dir)?;
            #[derive(Serialize)]
            struct Threshold {
                direction: DivisorClass,
                threshold: i64,
            }
            let human = format!("pi^*({m} * {dir}) + H is very ample on {v}, and {m} is least\n");
            Ok(Output::new(
                &Threshold {
                    direction: dir,
                    threshold: m,
                },
                human,
            ))
        }
        Command::Ulrich { variety, bundle, pol } => {
            let v = parse_variety(variety)?;
            let f = parse_bundle(&v, bundle)?;
            let a = Polarisation::new(&v, parse_divisor(&v, pol)?)?;
            let r = is_ulrich(&v, &f, &a)?;
            Ok(report_output(&r))
        }
        Command::Partner { variety, bundle, pol } => {
            let v = parse_variety(variety)?;
            let f = parse_bundle(&v, bundle)?;
            let a = Polarisation::new(&v, parse_divisor(&v, pol)?)?;
            let (partner, special) = serre_partner(&v, &f, &a)?;
            #[derive(Serialize)]
            struct Partner {
                partner: SplitBundle,
                special: bool,
            }
            let human = format!(
                "partner of {f}: {partner}{}\n",
                if special { " (special)" } else { "" }
            );
            Ok(Output::new(&Partner { partner, special }, human))
        }
        Command::Criterion { bundle_variety, sheaf, pol } => {
            let (_, base, e) = pb_parts(bundle_variety)?;
            let f = parse_bundle(&base, sheaf)?;
            let a = parse_divisor(&base, pol)?;
            Ok(report_output(&pullback_ulrich_criterion(&base, &e, &f, &a)?))
        }
        Command::Direct { bundle_variety, sheaf, pol } => {
            let (v, base, _) = pb_parts(bundle_variety)?;
            let f = parse_bundle(&base, sheaf)?;
            let a = parse_divisor(&base, pol)?;
            Ok(report_output(&direct_ulrich_check(&v, &f, &a)?))
        }
        Command::Probe { bundle_variety, l1, l2, p } => {
            let (v, base, _) = pb_parts(bundle_variety)?;
            let l1 = parse_divisor(&base, l1)?;
            let l2 = parse_divisor(&base, l2)?;
            let t = semiorthogonality_probe(&v, &l1, &l2, *p)?;
            let human = format!("Hom^*(pi^*{l1}, pi^*{l2}(-{p}H)): {}\n", table_line(&t));
            Ok(Output::new(&t, human))
        }
        Command::EnumZero { variety, search_box } => {
            let v = parse_variety(variety)?;
            let b = parse_box(&v, search_box)?;
            Ok(scan_output(&zero_cohomology_line_bundles(&v, &b)?))
        }
        Command::EnumUlrich { variety, pol, search_box } => {
            let v = parse_variety(variety)?;
            let a = Polarisation::new(&v, parse_divisor(&v, pol)?)?;
            let b = parse_box(&v, search_box)?;
            Ok(scan_output(&ulrich_line_bundles(&v, &a, &b)?))
        }
        Command::SearchPb { bundle_variety, pol, search_box } => {
            let (v, base, _) = pb_parts(bundle_variety)?;
            let a = parse_divisor(&base, pol)?;
            let b = parse_box(&base, search_box)?;
            Ok(scan_output(&pullback_ulrich_line_search(&v, &a, &b)?))
        }
        Command::Kernel { n, d, sym, random, twist } => {
            let p = match (sym, random) {
                (true, _) => KernelBundlePresentation::sym_euler(*n, *d)?,
                (false, Some(seed)) => KernelBundlePresentation::random(*n, *d, *seed)?,
                (false, None) => KernelBundlePresentation::staircase(*n, *d)?,
            };
            kernel_output(&p, *twist)
        }
        Command::Prop61 { n, d } => Ok(prop61_output(&prop61_builder(*n, *d)?)),
        Command::Oracle { variety, divisor } => {
            let v = parse_variety(variety)?;
            let d = parse_divisor(&v, divisor)?;
            let oracle = toric_cech_oracle(&v, &d)?;
            let engine = line_cohomology(&v, &d)?;
            let agree = oracle.table == engine;
            #[derive(Serialize)]
            struct Oracle<'a> {
                divisor: &'a DivisorClass,
                oracle: &'a CohomologyTable,
                engine: &'a CohomologyTable,
                agree: bool,
                scan_bound: i64,
                characters: u64,
            }
            let human = format!(
                "O({d}) on {v}\n  oracle: {}\n  engine: {}\n  {}\n",
                table_line(&oracle.table),
                table_line(&engine),
                if agree { "agree" } else { "MISMATCH" }
            );
            let mut o = Output::new(
                &Oracle {
                    divisor: &d,
                    oracle: &oracle.table,
                    engine: &engine,
                    agree,
                    scan_bound: oracle.scan_bound,
                    characters: oracle.characters,
                },
                human,
            );
            o.inconsistent = !agree;
            Ok(o)
        }
    }
}

fn table_line(t: &CohomologyTable) -> String {
    format!(
        "h = ({})  chi = {}{}",
        t.h().iter().join(", "),
        t.chi(),
        if t.is_generic() { "  [general member]" } else { "" }
    )
}

fn report_human(r: &UlrichReport) -> String {
    let mut s = format!(
        "{} with respect to {} (method: {})\n",
        if r.verdict { "Ulrich" } else { "not Ulrich" },
        r.polarisation.divisor(),
        serde_json::to_value(r.method).expect("method").as_str().unwrap_or_default()
    );
    for c in &r.checks {
        let h = c.table.h().iter().join(", ");
        let _ = writeln!(s, "  {:<36} ({h}) {}", c.twist, if c.ok { "ok" } else { "FAIL" });
    }
    if let Some(dp) = &r.d_prime {
        let _ = writeln!(s, "  D' = {}, very ample: {}", dp.divisor, dp.very_ample.very_ample);
    }
    for n in &r.notes {
        let _ = writeln!(s, "  note: {n}");
    }
    s
}

fn report_output(r: &UlrichReport) -> Output {
    Output::new(r, report_human(r))
}

fn scan_output(r: &ScanResult) -> Output {
    let mut s = format!("{} classes found on {} in box {}\n", r.results.len(), r.variety, r.search_box);
    for d in &r.results {
        let _ = writeln!(s, "  {d}");
    }
    if let Some(cf) = &r.closed_form {
        let _ = writeln!(
            s,
            "closed form {}: {}",
            cf.description,
            if cf.agrees_with_scan { "agrees" } else { "DISAGREES" }
        );
    }
    for n in r.erratum_notes.iter().chain(&r.notes) {
        let _ = writeln!(s, "note: {n}");
    }
    Output::new(r, s)
}

fn kernel_output(p: &KernelBundlePresentation, twist: Option<i64>) -> Result<Output> {
    #[derive(Serialize)]
    struct Kernel<'a> {
        presentation: &'a KernelBundlePresentation,
        #[serde(skip_serializing_if = "Option::is_none")]
        twist: Option<i64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        table: Option<CohomologyTable>,
        lemma: crate::kernelbundle::VanishingReport,
    }
    let table = twist.map(|t| kernel_cohomology(p, t));
    let lemma = lemma_conditions_check(p);
    let m = &p.matrix;
    let mut s = format!(
        "{} matrix on P{}: O({})^{} -> O({})^{}, kernel rank {}\n",
        m.family,
        m.n,
        m.d,
        m.cols,
        m.d + 1,
        m.rows,
        p.rank
    );
    if let Some(seed) = m.seed {
        let _ = writeln!(s, "seed {seed}");
    }
    let _ = writeln!(
        s,
        "sections onto from twist {}; full rank at {} sign points",
        p.certificate.surjective_from_twist, p.certificate.sign_points
    );
    if let (Some(t), Some(table)) = (twist, &table) {
        let _ = writeln!(s, "H^*(F({t})): {}", table_line(table));
    }
    let _ = writeln!(s, "lemma conditions: {}", if lemma.passed { "pass" } else { "fail" });
    for c in &lemma.checks {
        let _ = writeln!(s, "  {:<8} ({})", c.twist, c.table.h().iter().join(", "));
    }
    Ok(Output::new(
        &Kernel {
            presentation: p,
            twist,
            table,
            lemma,
        },
        s,
    ))
}

fn prop61_output(r: &Prop61Report) -> Output {
    let mut s = format!(
        "{} on {} with D = {}: {} candidate(s) out of {} tested\n",
        if r.results.is_empty() { "no Ulrich candidate" } else { "Ulrich candidate found" },
        r.variety,
        r.polarisation,
        r.results.len(),
        r.candidates_tested
    );
    let _ = writeln!(s, "vanishing twists: {:?}", r.conditions);
    if let Some(d) = &r.direct {
        s.push_str(&report_human(d));
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    Output::new(r, s)
}
