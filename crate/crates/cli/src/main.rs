//! ecbound: analyze curves, emit bound reports and constant ledgers, run
//! enumeration and verification batches, and run the lemma self-tests.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ecbound_core::arithmetic::FactorBudget;
use ecbound_core::curve::WeierstrassCurve;
use ecbound_core::enumerate::{
    enumerate_by_canonical_height, enumerate_by_x_height, points_csv, verify_curve,
    EnumerationBudget,
};
use ecbound_core::heights::HeightsConfig;
use ecbound_core::pipeline::{field_constants, parse_log_b, theorem_bound};
use ecbound_core::rank::FieldParams;
use ecbound_core::selftest::run_all;
use ecbound_core::torsion::{torsion_field_degree, torsion_subgroup};

/// Uniform bounds for rational points of bounded height on elliptic curves
/// over Q with a rational prime-order torsion point, verified empirically.
/// The ECBOUND_PRECISION environment variable sets the ledger precision in
/// decimal digits (default 50).
#[derive(Parser)]
#[command(name = "ecbound", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CurveInput {
    /// Curve literal "a,b,c" with rational entries like "0,-1,1/4".
    #[arg(long, value_name = "a,b,c")]
    curve: Option<String>,
    /// CSV file of curves: lines "a,b,c[,label]", '#' comments.
    #[arg(long, value_name = "FILE", conflicts_with = "curve")]
    corpus: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Field degree d = [k : Q].
    #[arg(long, default_value_t = 1)]
    field_d: u32,
    /// Complex embeddings up to conjugation.
    #[arg(long, default_value_t = 0)]
    field_s: u32,
    /// |Delta_k|.
    #[arg(long, default_value_t = 1)]
    field_absdisc: u64,
    /// rank Cl_k[ell].
    #[arg(long, default_value_t = 0)]
    field_clrank: u32,
    /// rank Cl_{k'}[ell] when known exactly.
    #[arg(long)]
    field_clrank_kprime: Option<u32>,
    /// Whether k contains a primitive ell-th root of unity.
    #[arg(long)]
    field_has_zeta_ell: Option<bool>,
}

#[derive(Args, Clone)]
struct HeightsArgs {
    /// David-floor constant c6 (no published value; placeholder default).
    #[arg(long, default_value_t = 1e-7)]
    david_c6: f64,
    /// Height-gap constant C1.
    #[arg(long = "gap-C1", default_value_t = 2.0)]
    gap_c1: f64,
    /// Height-gap constant C2.
    #[arg(long = "gap-C2", default_value_t = 3.0)]
    gap_c2: f64,
    /// Lower-gap constant kappa: scan radius is exp(2(log B + kappa)).
    #[arg(long = "gap-kappa", default_value_t = 2.0)]
    gap_kappa: f64,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Scales the factoring/sieving effort caps.
    #[arg(long, default_value_t = 1.0)]
    budget_factor: f64,
    /// Enumeration candidate cap.
    #[arg(long, default_value_t = 6e9)]
    budget_enum: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Notion {
    Canonical,
    X,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants, torsion and torsion-field info for curves.
    Analyze {
        #[command(flatten)]
        input: CurveInput,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Theorem bound report with the full constant ledger.
    Bound {
        #[command(flatten)]
        input: CurveInput,
        /// Prime ell of the torsion hypothesis.
        #[arg(long)]
        ell: u32,
        /// Emit the naive-height corollary exponent instead.
        #[arg(long)]
        corollary: bool,
        /// Height cutoffs: decimals or "e^x", comma separated.
        #[arg(long = "B", value_name = "LIST")]
        b_list: String,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        heights: HeightsArgs,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Enumerate rational points of bounded height.
    Enumerate {
        #[command(flatten)]
        input: CurveInput,
        #[arg(long = "B", value_name = "LIST")]
        b_list: String,
        /// Which height gates the count.
        #[arg(long, value_enum, default_value_t = Notion::Canonical)]
        notion: Notion,
        #[command(flatten)]
        heights: HeightsArgs,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check counts against bounds and floors; exit 1 on any failure.
    Verify {
        #[command(flatten)]
        input: CurveInput,
        #[arg(long)]
        ell: u32,
        #[arg(long = "B", value_name = "LIST")]
        b_list: String,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        heights: HeightsArgs,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Field-level constant ledger for given ell.
    Constants {
        #[arg(long, default_value_t = 2)]
        ell: u32,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        heights: HeightsArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the lemma sweeps; exit 1 on any violation.
    Selftest {
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn field_params(args: &FieldArgs, ell: u32) -> Result<FieldParams> {
    let mut f = FieldParams::rationals(ell);
    f.d = args.field_d;
    f.s = args.field_s;
    f.abs_disc = args.field_absdisc.into();
    f.cl_rank = args.field_clrank;
    if args.field_clrank_kprime.is_some() {
        f.cl_rank_kprime = args.field_clrank_kprime;
    }
    if let Some(z) = args.field_has_zeta_ell {
        f.contains_zeta_ell = z;
    }
    f.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(f)
}

fn heights_config(args: &HeightsArgs) -> HeightsConfig {
    HeightsConfig {
        david_c6: args.david_c6,
        gap_c1: args.gap_c1,
        gap_c2: args.gap_c2,
        kappa_low: args.gap_kappa,
    }
}

fn budgets(args: &BudgetArgs) -> (FactorBudget, EnumerationBudget) {
    (
        FactorBudget::scaled(args.budget_factor),
        EnumerationBudget {
            max_candidates: args.budget_enum,
        },
    )
}

fn load_curves(input: &CurveInput) -> Result<Vec<(String, WeierstrassCurve)>> {
    if let Some(lit) = &input.curve {
        let e = WeierstrassCurve::parse(lit).map_err(|e| anyhow::anyhow!("{e}"))?;
        return Ok(vec![(lit.clone(), e)]);
    }
    let path = input
        .corpus
        .as_ref()
        .context("need --curve or --corpus")?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading corpus {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 3 {
            bail!("corpus line {}: need a,b,c[,label]", lineno + 1);
        }
        let literal = format!("{},{},{}", fields[0], fields[1], fields[2]);
        let label = fields
            .get(3)
            .map(|s| s.to_string())
            .unwrap_or_else(|| literal.clone());
        let e = WeierstrassCurve::parse(&literal)
            .map_err(|e| anyhow::anyhow!("corpus line {}: {e}", lineno + 1))?;
        out.push((label, e));
    }
    if out.is_empty() {
        bail!("corpus {} contained no curves", path.display());
    }
    Ok(out)
}

fn parse_b_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| parse_log_b(tok).map_err(|e| anyhow::anyhow!("{e}")))
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze {
            input,
            budgets: b,
            format,
        } => {
            let (fb, _) = budgets(&b);
            for (label, curve) in load_curves(&input)? {
                let inv = ecbound_core::local::global_invariants(&curve, &fb)
                    .map_err(|e| anyhow::anyhow!("{label}: {e}"))?;
                let tors = torsion_subgroup(&curve, &fb).map_err(|e| anyhow::anyhow!("{e}"))?;
                let mut fields = Vec::new();
                for ell in [2u32, 3] {
                    if let Ok(info) = torsion_field_degree(&curve, ell, &fb) {
                        fields.push(info);
                    }
                }
                match format {
                    Format::Json => {
                        let doc = serde_json::json!({
                            "label": label,
                            "curve": ecbound_core::pipeline::curve_label(&curve),
                            "disc": curve.discriminant().to_string(),
                            "j_invariant": curve.j_invariant().to_string(),
                            "h_E": ecbound_core::heights::curve_height(&curve).value,
                            "disc_min_norm": inv.disc_norm.to_string(),
                            "conductor_norm": inv.conductor_norm.to_string(),
                            "szpiro_ratio": inv.szpiro_ratio,
                            "kodaira": inv.locals.iter().map(|l| {
                                serde_json::json!({
                                    "p": l.prime.to_string(),
                                    "type": l.kodaira.to_string(),
                                    "v_disc_min": l.v_disc_min,
                                    "f_p": l.conductor_exp,
                                })
                            }).collect::<Vec<_>>(),
                            "torsion_order": tors.order,
                            "torsion_structure": format!("{:?}", tors.structure),
                            "torsion_fields": fields.iter().map(|i| serde_json::json!({
                                "ell": i.ell,
                                "degree": i.degree,
                                "base_field": i.base_field,
                                "witness": i.witness,
                            })).collect::<Vec<_>>(),
                        });
                        println!("{}", serde_json::to_string_pretty(&doc)?);
                    }
                    _ => {
                        println!(
                            "curve {label}: y^2 = x^3 + ({})x^2 + ({})x + ({})",
                            curve.a(),
                            curve.b(),
                            curve.c()
                        );
                        println!(
                            "  disc = {}, j = {}",
                            curve.discriminant(),
                            curve.j_invariant()
                        );
                        println!(
                            "  N(D) = {}, N(F) = {}, szpiro = {:.6}",
                            inv.disc_norm, inv.conductor_norm, inv.szpiro_ratio
                        );
                        for l in &inv.locals {
                            println!(
                                "  p = {}: {} with v(D) = {}, f = {}",
                                l.prime, l.kodaira, l.v_disc_min, l.conductor_exp
                            );
                        }
                        println!(
                            "  torsion: order {} ({:?})",
                            tors.order, tors.structure
                        );
                        for i in &fields {
                            println!(
                                "  K_{} degree over {}: {} ({})",
                                i.ell, i.base_field, i.degree, i.witness
                            );
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound {
            input,
            ell,
            corollary,
            b_list,
            field,
            heights,
            budgets: b,
            format,
        } => {
            let (fb, _) = budgets(&b);
            let fp = field_params(&field, ell)?;
            let cfg = heights_config(&heights);
            let bs = parse_b_list(&b_list)?;
            let mut reports = Vec::new();
            for (label, curve) in load_curves(&input)? {
                for &log_b in &bs {
                    let report = if corollary {
                        ecbound_core::pipeline::corollary_bound(&curve, ell, &fp, log_b, &cfg, &fb)
                    } else {
                        theorem_bound(&curve, ell, &fp, log_b, &cfg, &fb)
                    }
                    .map_err(|e| anyhow::anyhow!("{label} at log B = {log_b}: {e}"))?;
                    reports.push(report);
                }
            }
            match format {
                Format::Text => {
                    for r in &reports {
                        println!(
                            "{} ell={} logB={:.4}: branch {:?}, C = {:.6}, bound = {}",
                            r.curve, r.ell, r.log_b, r.branch, r.exponent, r.bound_value_hp
                        );
                    }
                }
                _ => println!("{}", serde_json::to_string_pretty(&reports)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate {
            input,
            b_list,
            notion,
            heights,
            budgets: b,
            format,
        } => {
            let (fb, eb) = budgets(&b);
            let cfg = heights_config(&heights);
            let bs = parse_b_list(&b_list)?;
            for (label, curve) in load_curves(&input)? {
                for &log_b in &bs {
                    let result = match notion {
                        Notion::Canonical => {
                            enumerate_by_canonical_height(&curve, log_b, &cfg, &eb, &fb)
                        }
                        Notion::X => enumerate_by_x_height(&curve, log_b.exp(), &eb, &fb),
                    }
                    .map_err(|e| anyhow::anyhow!("{label} at log B = {log_b}: {e}"))?;
                    match format {
                        Format::Csv => print!("{}", points_csv(&result)),
                        Format::Json => println!("{}", serde_json::to_string_pretty(&result)?),
                        Format::Text => {
                            println!(
                                "{label} logB={log_b:.4}: count = {} (complete = {}, radius_log = {:.3})",
                                result.count, result.complete, result.radius_log
                            );
                            for p in &result.points {
                                if p.point.is_identity() {
                                    println!("  O");
                                } else {
                                    println!(
                                        "  ({}/{}, {}/{})  hx = {:.6}{}",
                                        p.x_num,
                                        p.x_den,
                                        p.y_num,
                                        p.y_den,
                                        p.hx,
                                        p.hhat
                                            .map(|h| format!(", hhat = {h:.9}"))
                                            .unwrap_or_default()
                                    );
                                }
                            }
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            input,
            ell,
            b_list,
            field,
            heights,
            budgets: b,
            format,
        } => {
            let (fb, eb) = budgets(&b);
            let fp = field_params(&field, ell)?;
            let cfg = heights_config(&heights);
            let bs = parse_b_list(&b_list)?;
            let mut all_pass = true;
            let mut docs = Vec::new();
            for (label, curve) in load_curves(&input)? {
                for &log_b in &bs {
                    let doc = verify_curve(&curve, ell, &fp, log_b, &cfg, &eb, &fb)
                        .map_err(|e| anyhow::anyhow!("{label} at log B = {log_b}: {e}"))?;
                    if !doc.all_pass {
                        all_pass = false;
                        for a in doc.assertions.iter().filter(|a| !a.pass) {
                            eprintln!("FAIL {label} logB={log_b:.4} {}: {}", a.name, a.detail);
                        }
                    }
                    docs.push((label.clone(), doc));
                }
            }
            match format {
                Format::Json => {
                    let v: Vec<_> = docs.iter().map(|(_, d)| d).collect();
                    println!("{}", serde_json::to_string_pretty(&v)?);
                }
                _ => {
                    for (label, d) in &docs {
                        println!(
                            "{label} logB={:.4}: {} (count = {}, complete = {})",
                            d.log_b,
                            if d.all_pass { "ok" } else { "FAILED" },
                            d.empirical_count,
                            d.enumeration_complete
                        );
                        for a in &d.assertions {
                            println!(
                                "  [{}] {}: {}",
                                if a.pass { "ok" } else { "FAIL" },
                                a.name,
                                a.detail
                            );
                        }
                    }
                }
            }
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Constants {
            ell,
            field,
            heights,
            format,
        } => {
            let fp = field_params(&field, ell)?;
            let cfg = heights_config(&heights);
            let ledger = field_constants(&fp, &cfg);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&ledger)?),
                _ => {
                    for e in &ledger.entries {
                        println!(
                            "{:<10} = {:<24.16e} [{}] {}",
                            e.name,
                            e.value,
                            format!("{:?}", e.provenance).to_lowercase(),
                            e.formula
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { seed, format } => {
            let outcomes = run_all(seed);
            let pass = outcomes.iter().all(|o| o.pass());
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&outcomes)?),
                _ => {
                    for o in &outcomes {
                        println!(
                            "[{}] {}: {}/{} cases clean {}",
                            if o.pass() { "ok" } else { "FAIL" },
                            o.name,
                            o.cases - o.violations,
                            o.cases,
                            o.detail
                        );
                    }
                }
            }
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
