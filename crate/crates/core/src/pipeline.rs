//! The constant ledger and the assembled point-count bounds: the three
//! proof branches (everywhere good reduction, small conductor, main), the
//! polylog-to-exponent helper, the ball-covering count, and the f(x)
//! envelope. Every ledger value is computed in high-precision reals with
//! an f64 mirror and explicit dependencies, so reports can be audited and
//! recomputed mechanically.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arithmetic::{FactorBudget, PRIME_PAIR_C, ROBIN_C};
use crate::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::heights::{curve_height, HeightsConfig};
use crate::ledger_real::{Real, RealCtx};
use crate::local::GlobalInvariants;
use crate::rank::{assemble_rank_bound, ramified_prime_bound, FieldParams, RankBoundBreakdown};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Paper,
    Config,
    Input,
    Derived,
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    pub name: String,
    pub formula: String,
    pub value: f64,
    pub value_hp: String,
    pub dependencies: Vec<String>,
    pub provenance: Provenance,
}

/// Ordered named constants with dependencies; acyclic by construction
/// (entries may only depend on earlier entries).
#[derive(Debug, Clone, Default)]
pub struct ConstantLedger {
    pub entries: Vec<LedgerEntry>,
}

impl ConstantLedger {
    pub fn get(&self, name: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).map(|e| e.value)
    }

    /// Transitive dependency closure of a ledger node, itself included.
    pub fn dependency_closure(&self, root: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![root.to_string()];
        while let Some(name) = stack.pop() {
            if !out.insert(name.clone()) {
                continue;
            }
            if let Some(e) = self.get(&name) {
                for d in &e.dependencies {
                    stack.push(d.clone());
                }
            }
        }
        out
    }
}

impl Serialize for ConstantLedger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for e in &self.entries {
            map.serialize_entry(
                &e.name,
                &serde_json::json!({
                    "formula": e.formula,
                    "value": e.value,
                    "value_hp": e.value_hp,
                    "dependencies": e.dependencies,
                    "provenance": format!("{:?}", e.provenance).to_lowercase(),
                }),
            )?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundBranch {
    GoodReduction,
    BoundedRank,
    Main,
}

/// Final output of the bound pipeline for one (curve, ell, B) triple.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub curve: String,
    pub ell: u32,
    pub log_b: f64,
    pub branch: BoundBranch,
    /// Exponent C of the bound B^(C / log log B).
    pub exponent: f64,
    pub exponent_hp: String,
    /// Natural log of the bound value.
    pub bound_ln: f64,
    pub bound_value_hp: String,
    pub rank_bound: f64,
    pub torsion_pair_bound: f64,
    pub torsion_envelope: f64,
    pub conductor_norm: String,
    pub disc_norm: String,
    pub szpiro_ratio: f64,
    pub integral_regime: bool,
    pub zeta_in_field: bool,
    /// True when the David constant is the unpublished placeholder default.
    pub c6_placeholder: bool,
    pub empirical_count: Option<u64>,
    pub ledger: ConstantLedger,
}

struct LedgerBuilder {
    ledger: ConstantLedger,
}

impl LedgerBuilder {
    fn new(_ctx: &RealCtx) -> Self {
        LedgerBuilder {
            ledger: ConstantLedger::default(),
        }
    }

    fn push(
        &mut self,
        name: &str,
        formula: &str,
        deps: &[&str],
        provenance: Provenance,
        value: Real,
    ) -> Real {
        debug_assert!(
            deps.iter().all(|d| self.ledger.get(d).is_some()),
            "dependency of {name} not yet in ledger"
        );
        self.ledger.entries.push(LedgerEntry {
            name: name.into(),
            formula: formula.into(),
            value: value.to_f64(),
            value_hp: value.to_decimal_string(),
            dependencies: deps.iter().map(|s| s.to_string()).collect(),
            provenance,
        });
        value
    }
}


struct CoreConsts {
    c1_eff: Real,
    c4: Real,
    c11: Real,
}

/// Pushes the model, Petsche-aggregate and torsion-envelope constants
/// shared by every branch: c1/c1~, c2..c5, c8..c11.
fn push_core_constants(
    lb: &mut LedgerBuilder,
    ctx: &RealCtx,
    field: &FieldParams,
    integral: bool,
) -> CoreConsts {
    let r_d = ctx.from_u64(field.d as u64);
    let e_real = ctx.e();
    let ln864 = ctx.from_u64(864).ln(&ctx);

    // c1 / c1~ and the effective model constant
    let mk = field.minkowski_constant();
    let _ = lb.push(
        "m_k",
        "d!/d^d (4/pi)^s sqrt|Delta_k|",
        &["d"],
        Provenance::Input,
        ctx.from_f64(mk),
    );
    let c1_full = {
        let term = ctx.add(
            &ctx.mul(&r_d, &ln864),
            &ctx.mul(&ctx.from_u64(12), &ctx.from_f64(mk).ln(&ctx)),
        );
        ctx.add(&ctx.div(&term, &e_real), &ctx.mul(&ctx.from_u64(12), &r_d))
    };
    let c1_full = lb.push(
        "c1",
        "(1/e)(d log(2^4 54) + 12 log m_k) + 12 d",
        &["d", "m_k"],
        Provenance::Derived,
        c1_full,
    );
    let c1_t = {
        let inner = ctx.add(&ctx.div(&ln864, &e_real), &ctx.from_u64(4));
        ctx.mul(&inner, &r_d)
    };
    let c1_t = lb.push(
        "c1_tilde",
        "((1/e) log(2^4 54) + 4) d",
        &["d"],
        Provenance::Derived,
        c1_t,
    );
    let (c1_eff, c1_dep) = if integral {
        (c1_t, "c1_tilde")
    } else {
        (c1_full, "c1")
    };
    let c1_eff = lb.push(
        "c1_eff",
        if integral {
            "c1_tilde (integral coefficients)"
        } else {
            "c1 (general model)"
        },
        &[c1_dep],
        Provenance::Derived,
        c1_eff,
    );

    // Petsche constants and the lattice-gap aggregate c4
    let c2 = lb.push(
        "c2",
        "10^15 d^3",
        &["d"],
        Provenance::Paper,
        ctx.mul(&ctx.from_f64(1e15), &r_d.pow(&ctx.from_u64(3), &ctx)),
    );
    let c3 = lb.push(
        "c3",
        "104613 d",
        &["d"],
        Provenance::Paper,
        ctx.mul(&ctx.from_u64(104613), &r_d),
    );
    let c5 = lb.push(
        "c5",
        "c2 sqrt(c3)",
        &["c2", "c3"],
        Provenance::Derived,
        ctx.mul(&c2, &c3.sqrt(&ctx)),
    );
    let c4 = {
        let t1 = c1_eff.pow(&ctx.div(&ctx.from_u64(7), &ctx.from_u64(2)), &ctx);
        let t2 = ctx.mul(
            &ctx.mul(&ctx.from_u64(2), &c1_eff.pow(&ctx.from_u64(3), &ctx)),
            &c5.sqrt(&ctx),
        );
        ctx.add(&t1, &t2)
            .pow(&ctx.div(&ctx.from_u64(2), &ctx.from_u64(7)), &ctx)
    };
    let c4 = lb.push(
        "c4",
        "(c1^(7/2) + 2 c1^3 sqrt(c5))^(2/7)",
        &["c1_eff", "c5"],
        Provenance::Derived,
        c4,
    );

    // torsion envelope constants
    let c8 = lb.push("c8", "6.2", &[], Provenance::Paper, ctx.from_f64(PRIME_PAIR_C));
    let _c9 = lb.push("c9", "1.3841", &[], Provenance::Paper, ctx.from_f64(ROBIN_C));
    let c10 = {
        let base = ctx.mul(&c8, &c1_eff).pow(&r_d, &ctx);
        let inv_ed = ctx.div(&ctx.from_u64(1), &e_real.pow(&r_d, &ctx));
        ctx.add(&ctx.mul(&ctx.from_u64(2), &base), &inv_ed)
            .pow(&ctx.from_u64(2), &ctx)
    };
    let c10 = lb.push(
        "c10",
        "(2 (c8 c1)^d + 1/e^d)^2",
        &["c8", "c1_eff", "d"],
        Provenance::Derived,
        c10,
    );
    let c11 = {
        let t1 = ctx.div(&c10.ln(&ctx), &e_real);
        let t2 = ctx.div(
            &ctx.mul(&ctx.from_u64(8), &r_d),
            &ctx.mul(&e_real, &e_real),
        );
        ctx.add(&t1, &t2)
    };
    let c11 = lb.push(
        "c11",
        "(1/e) log c10 + (4/e^2) 2d",
        &["c10", "d"],
        Provenance::Derived,
        c11,
    );

    CoreConsts { c1_eff, c4, c11 }
}

/// c1(k) = (1/e)(d log(2^4 * 54) + 12 log m_k) + 12 d, the model-lemma
/// constant with the Minkowski constant in place of the stray symbol.
pub fn c1_of_field(field: &FieldParams) -> f64 {
    let d = field.d as f64;
    let e = std::f64::consts::E;
    (d * 864f64.ln() + 12.0 * field.minkowski_constant().ln()) / e + 12.0 * d
}

/// c1~(d) = ((1/e) log 864 + 4) d for integral-coefficient inputs.
pub fn c1_tilde(d: u32) -> f64 {
    (864f64.ln() / std::f64::consts::E + 4.0) * d as f64
}

/// Minimal C3 with C1 (log B)^C2 <= B^(C3/log log B) for all B >= e^e:
/// C3 = (1/e) log C1 + (4/e^2) C2.
pub fn polylog_to_exponent(c_mult: f64, c_exp: f64) -> Result<f64> {
    if c_mult <= 0.0 {
        return Err(Error::Domain(format!(
            "polylog multiplier must be positive, got {c_mult}"
        )));
    }
    if c_exp < 0.0 {
        return Err(Error::Domain(format!(
            "polylog exponent must be nonnegative, got {c_exp}"
        )));
    }
    let e = std::f64::consts::E;
    Ok(c_mult.ln() / e + 4.0 / (e * e) * c_exp)
}

/// Ball covering count ceil((1 + 2R/rho)^r).
pub fn covering_count(radius: f64, rho: f64, rank: u32) -> Result<u64> {
    if radius <= 0.0 || rho <= 0.0 {
        return Err(Error::Domain("covering needs R, rho > 0".into()));
    }
    let v = (1.0 + 2.0 * radius / rho).powi(rank as i32);
    if v > u64::MAX as f64 {
        return Err(Error::Resource("covering count exceeds u64".into()));
    }
    // snap near-integers before the ceiling
    let snapped = if (v - v.round()).abs() < 1e-9 * v.max(1.0) {
        v.round()
    } else {
        v.ceil()
    };
    Ok(snapped as u64)
}

/// f(x) = (x / log x) log(log B / x) and its envelope (16/e^2) log B / log log B.
pub fn f_bound_check(x: f64, log_b: f64) -> Result<(f64, f64)> {
    let e = std::f64::consts::E;
    if x < e || log_b < e {
        return Err(Error::Domain(format!(
            "f-bound needs x >= e and log B >= e, got x = {x}, log B = {log_b}"
        )));
    }
    let f = x / x.ln() * (log_b / x).ln();
    let envelope = 16.0 / (e * e) * log_b / log_b.ln();
    Ok((f, envelope))
}

/// The assembled bound for one curve at one B typically goes through
/// `theorem_bound`; this variant takes precomputed invariants so callers
/// can batch or stub them.
#[allow(clippy::too_many_arguments)]
pub fn theorem_bound_with_invariants(
    curve_label: &str,
    e_curve: &WeierstrassCurve,
    ell: u32,
    field: &FieldParams,
    log_b: f64,
    cfg: &HeightsConfig,
    inv: &GlobalInvariants,
    budget: &FactorBudget,
) -> Result<BoundReport> {
    field.validate()?;
    let h_e = curve_height(e_curve).value;
    let e_const = std::f64::consts::E;
    if log_b < h_e.max(e_const) {
        return Err(Error::Domain(format!(
            "precondition log B >= max(h(E), e) violated: log B = {log_b}, h(E) = {h_e}"
        )));
    }
    let (has, _) = crate::torsion::has_rational_ell_torsion(e_curve, ell, budget)?;
    if !has {
        return Err(Error::Domain(format!(
            "hypothesis E(Q) cap E[{ell}] != O violated: no rational point of exact order {ell}"
        )));
    }

    let integral = e_curve.is_integral();
    let ctx = RealCtx::from_env();
    let mut lb = LedgerBuilder::new(&ctx);
    let d = field.d;
    let df = d as f64;

    // inputs
    let r_d = lb.push("d", "[k : Q]", &[], Provenance::Input, ctx.from_u64(d as u64));
    let _ = lb.push("ell", "prime with E(k)[ell] != O", &[], Provenance::Input, ctx.from_u64(ell as u64));
    let _ = lb.push("h_E", "h(1 : a : b : c)", &[], Provenance::Input, ctx.from_f64(h_e));
    let r_logb = lb.push("log_B", "log of the height cutoff", &[], Provenance::Input, ctx.from_f64(log_b));
    let _ = lb.push(
        "N_disc",
        "norm of the minimal discriminant",
        &[],
        Provenance::Input,
        ctx.from_bigint(&inv.disc_norm),
    );
    let _ = lb.push(
        "N_cond",
        "norm of the conductor",
        &[],
        Provenance::Input,
        ctx.from_bigint(&inv.conductor_norm),
    );
    let _ = lb.push(
        "sigma",
        "Szpiro ratio log N(D)/log N(F)",
        &[],
        Provenance::Input,
        ctx.from_f64(inv.szpiro_ratio),
    );
    let omega_d = inv.bad_primes.len() as u64;
    let _ = lb.push(
        "omega_D",
        "number of bad primes",
        &[],
        Provenance::Input,
        ctx.from_u64(omega_d),
    );
    let _ = lb.push(
        "cl_rank",
        "rank Cl_k[ell]",
        &[],
        Provenance::Input,
        ctx.from_u64(field.cl_rank as u64),
    );

    let core = push_core_constants(&mut lb, &ctx, field, integral);
    let c4 = core.c4.clone();
    let c11 = core.c11.clone();
    let c1_eff = core.c1_eff.clone();
    let e_real = ctx.e();

    // rank-bound constants (branch on zeta_ell membership)
    let breakdown: RankBoundBreakdown = {
        let t_bound = ramified_prime_bound(inv, ell, field, budget)?;
        assemble_rank_bound(field, omega_d, t_bound)?
    };
    if !field.contains_zeta_ell {
        let _ = lb.push(
            "c17",
            if field.cl_rank_kprime.is_some() {
                "exact rank Cl_{k'}[ell] (known field data)"
            } else {
                "(1/log ell) log(c14 ell^(ell d/2) |Delta_k|^(ell/2))"
            },
            &["d", "ell"],
            Provenance::if_exact(field.cl_rank_kprime.is_some()),
            ctx.from_f64(breakdown.cl_term),
        );
    }
    let c18 = lb.push(
        "c18",
        if field.contains_zeta_ell {
            "2 ell (4d + rank Cl_k[ell])"
        } else {
            "2 ell (4 (ell - 1) d + c17)"
        },
        if field.contains_zeta_ell {
            &["ell", "d", "cl_rank"]
        } else {
            &["ell", "d", "c17"]
        },
        Provenance::Derived,
        ctx.from_f64(breakdown.c18),
    );
    let c19 = lb.push(
        "c19",
        if field.contains_zeta_ell {
            "4 ell"
        } else {
            "4 ell (ell - 1)"
        },
        &["ell"],
        Provenance::Derived,
        ctx.from_u64(breakdown.c19),
    );
    let _rank = lb.push(
        "rank_bound",
        "c18 + c19 omega(D)",
        &["c18", "c19", "omega_D"],
        Provenance::Derived,
        ctx.from_f64(breakdown.r_max),
    );

    let c20 = lb.push(
        "c20",
        "1.3841 d",
        &["d"],
        Provenance::Paper,
        ctx.mul(&ctx.from_f64(ROBIN_C), &r_d),
    );

    // torsion pair bound for the report
    let tors = crate::torsion::torsion_cardinality_bound(e_curve, log_b, budget)?;

    // branch selection on the conductor norm
    let n_cond = &inv.conductor_norm;
    let branch = if *n_cond == BigInt::from(1) {
        BoundBranch::GoodReduction
    } else if *n_cond <= BigInt::from(15) {
        BoundBranch::BoundedRank
    } else {
        BoundBranch::Main
    };

    let four_e2 = 4.0 / (e_const * e_const);
    let c_final = match branch {
        BoundBranch::GoodReduction => {
            let _ = lb.push(
                "c6",
                "effective constant of the David floor (configured)",
                &[],
                Provenance::Config,
                ctx.from_f64(cfg.david_c6),
            );
            let c7 = {
                let num = 2.0 * df.powf(1.5) * (1.0 + df.ln());
                ctx.from_f64((1.0 + num / cfg.david_c6.sqrt()).powi(2))
            };
            let c7 = lb.push(
                "c7",
                "(1 + 2 d^(3/2)(1 + log d)/sqrt(c6))^2",
                &["d", "c6"],
                Provenance::Derived,
                c7,
            );
            let c23 = {
                let poly = ctx.from_f64(c7.to_f64().ln() / e_const + four_e2);
                ctx.add(&c11, &ctx.mul(&ctx.div(&c18, &ctx.from_u64(2)), &poly))
            };
            lb.push(
                "c23",
                "c11 + (c18/2)((1/e) log c7 + 4/e^2)",
                &["c11", "c18", "c7"],
                Provenance::Derived,
                c23,
            )
        }
        BoundBranch::BoundedRank => {
            let c26 = lb.push(
                "c26",
                "c18 + c19",
                &["c18", "c19"],
                Provenance::Derived,
                ctx.add(&c18, &c19),
            );
            let c12 = lb.push(
                "c12",
                "2 d c26 (omega(N(F)) <= 2 when N(F) <= 15)",
                &["d", "c26"],
                Provenance::Derived,
                ctx.mul(&ctx.mul(&ctx.from_u64(2), &r_d), &c26),
            );
            let c13 = {
                let ln_term = (c4.to_f64() / 2f64.ln()).ln() / e_const + four_e2;
                let scale = ctx.mul(&ctx.div(&ctx.from_u64(7), &ctx.from_u64(2)), &c12);
                ctx.add(&c11, &ctx.mul(&scale, &ctx.from_f64(ln_term)))
            };
            lb.push(
                "c13",
                "c11 + (7 c12 / 2)((1/e) log(c4/log 2) + 4/e^2)",
                &["c11", "c12", "c4"],
                Provenance::Derived,
                c13,
            )
        }
        BoundBranch::Main => {
            let c21 = lb.push(
                "c21",
                "c20 c1",
                &["c20", "c1_eff"],
                Provenance::Derived,
                ctx.mul(&c20, &c1_eff),
            );
            let c22 = lb.push(
                "c22",
                "c18 + c19 c21",
                &["c18", "c19", "c21"],
                Provenance::Derived,
                ctx.add(&c18, &ctx.mul(&c19, &c21)),
            );
            let c24 = lb.push(
                "c24",
                "(7/2) c22 log c4",
                &["c22", "c4"],
                Provenance::Derived,
                ctx.mul(
                    &ctx.div(&ctx.from_u64(7), &ctx.from_u64(2)),
                    &ctx.mul(&c22, &c4.ln(&ctx)),
                ),
            );
            let c25 = lb.push(
                "c25",
                "c11 + c24",
                &["c11", "c24"],
                Provenance::Derived,
                ctx.add(&c11, &c24),
            );
            let c26 = lb.push(
                "c26",
                "c18 + c19",
                &["c18", "c19"],
                Provenance::Derived,
                ctx.add(&c18, &c19),
            );
            let c27 = lb.push(
                "c27",
                "16/e^2",
                &[],
                Provenance::Paper,
                ctx.div(&ctx.from_u64(16), &ctx.mul(&e_real, &e_real)),
            );
            let c28 = {
                let t = ctx.mul(
                    &ctx.div(&ctx.from_u64(7), &ctx.from_u64(2)),
                    &ctx.mul(&c26, &ctx.mul(&c20, &c27)),
                );
                ctx.add(&c25, &t)
            };
            lb.push(
                "c28",
                "c25 + (7/2) c26 c20 c27",
                &["c25", "c26", "c20", "c27"],
                Provenance::Derived,
                c28,
            )
        }
    };

    let c_final = lb.push(
        "C_final",
        "exponent of B^(C/log log B) on the taken branch",
        &[match branch {
            BoundBranch::GoodReduction => "c23",
            BoundBranch::BoundedRank => "c13",
            BoundBranch::Main => "c28",
        }],
        Provenance::Derived,
        c_final,
    );

    // bound value B^(C / log log B) = exp(C log B / log log B)
    let bound_ln_real = ctx.div(
        &ctx.mul(&c_final, &r_logb),
        &r_logb.ln(&ctx),
    );
    let bound_value = bound_ln_real.exp(&ctx);
    let bound_ln = lb.push(
        "bound_ln",
        "C log B / log log B",
        &["C_final", "log_B"],
        Provenance::Derived,
        bound_ln_real,
    );
    let _ = lb.push(
        "bound_value",
        "B^(C / log log B)",
        &["bound_ln"],
        Provenance::Derived,
        bound_value.clone(),
    );

    Ok(BoundReport {
        curve: curve_label.to_string(),
        ell,
        log_b,
        branch,
        exponent: c_final.to_f64(),
        exponent_hp: c_final.to_decimal_string(),
        bound_ln: bound_ln.to_f64(),
        bound_value_hp: bound_value.to_decimal_string(),
        rank_bound: breakdown.r_max,
        torsion_pair_bound: tors
            .product_bound
            .to_string()
            .parse::<f64>()
            .unwrap_or(f64::INFINITY),
        torsion_envelope: tors.envelope,
        conductor_norm: inv.conductor_norm.to_string(),
        disc_norm: inv.disc_norm.to_string(),
        szpiro_ratio: inv.szpiro_ratio,
        integral_regime: integral,
        zeta_in_field: field.contains_zeta_ell,
        c6_placeholder: branch == BoundBranch::GoodReduction
            && (cfg.david_c6 - HeightsConfig::default().david_c6).abs() < f64::EPSILON,
        empirical_count: None,
        ledger: lb.ledger,
    })
}

impl Provenance {
    fn if_exact(exact: bool) -> Provenance {
        if exact {
            Provenance::Input
        } else {
            Provenance::Derived
        }
    }
}

/// Theorem bound: computes the global invariants, then assembles the
/// branch bound and the full ledger.
pub fn theorem_bound(
    e_curve: &WeierstrassCurve,
    ell: u32,
    field: &FieldParams,
    log_b: f64,
    cfg: &HeightsConfig,
    budget: &FactorBudget,
) -> Result<BoundReport> {
    let inv = crate::local::global_invariants(e_curve, budget)?;
    let label = curve_label(e_curve);
    theorem_bound_with_invariants(&label, e_curve, ell, field, log_b, cfg, &inv, budget)
}

/// Field-level constant ledger (no curve data): everything derivable from
/// (d, s, |Delta_k|, ell, class ranks) plus the configured constants.
pub fn field_constants(field: &FieldParams, cfg: &HeightsConfig) -> ConstantLedger {
    let ctx = RealCtx::from_env();
    let mut lb = LedgerBuilder::new(&ctx);
    let r_d = lb.push("d", "[k : Q]", &[], Provenance::Input, ctx.from_u64(field.d as u64));
    let _ = lb.push("ell", "prime of the torsion hypothesis", &[], Provenance::Input, ctx.from_u64(field.ell as u64));
    let core = push_core_constants(&mut lb, &ctx, field, false);
    let e_const = std::f64::consts::E;
    let _ = lb.push("c6", "David constant (configured)", &[], Provenance::Config, ctx.from_f64(cfg.david_c6));
    let c7 = (1.0
        + 2.0 * (field.d as f64).powf(1.5) * (1.0 + (field.d as f64).ln()) / cfg.david_c6.sqrt())
    .powi(2);
    let _ = lb.push(
        "c7",
        "(1 + 2 d^(3/2)(1 + log d)/sqrt(c6))^2",
        &["d", "c6"],
        Provenance::Derived,
        ctx.from_f64(c7),
    );
    let _ = lb.push(
        "c20",
        "1.3841 d",
        &["d"],
        Provenance::Paper,
        ctx.mul(&ctx.from_f64(ROBIN_C), &r_d),
    );
    let _ = lb.push(
        "c27",
        "16/e^2",
        &[],
        Provenance::Paper,
        ctx.from_f64(16.0 / (e_const * e_const)),
    );
    if let Ok(breakdown) = assemble_rank_bound(field, 0, 0) {
        if !field.contains_zeta_ell {
            let _ = lb.push(
                "c17",
                "rank envelope for Cl_{k'}[ell]",
                &["d", "ell"],
                Provenance::if_exact(field.cl_rank_kprime.is_some()),
                ctx.from_f64(breakdown.cl_term),
            );
        }
        let _ = lb.push(
            "c18",
            if field.contains_zeta_ell {
                "2 ell (4d + rank Cl_k[ell])"
            } else {
                "2 ell (4 (ell - 1) d + c17)"
            },
            &["ell", "d"],
            Provenance::Derived,
            ctx.from_f64(breakdown.c18),
        );
        let _ = lb.push(
            "c19",
            if field.contains_zeta_ell {
                "4 ell"
            } else {
                "4 ell (ell - 1)"
            },
            &["ell"],
            Provenance::Derived,
            ctx.from_u64(breakdown.c19),
        );
    }
    let _ = core;
    lb.ledger
}

/// Bounded-rank bound with an explicitly supplied rank cap c12; unlike the
/// theorem bound this needs no torsion hypothesis, only rank E(k) <= c12.
/// Used for rank-known fixtures such as the trivial-torsion rank-1 curve.
pub fn proposition_bound(
    e_curve: &WeierstrassCurve,
    field: &FieldParams,
    log_b: f64,
    c12: f64,
    cfg: &HeightsConfig,
    budget: &FactorBudget,
) -> Result<BoundReport> {
    field.validate()?;
    let h_e = curve_height(e_curve).value;
    let e_const = std::f64::consts::E;
    if log_b < h_e.max(e_const) {
        return Err(Error::Domain(format!(
            "precondition log B >= max(h(E), e) violated: log B = {log_b}, h(E) = {h_e}"
        )));
    }
    let inv = crate::local::global_invariants(e_curve, budget)?;
    let integral = e_curve.is_integral();
    let ctx = RealCtx::from_env();
    let mut lb = LedgerBuilder::new(&ctx);
    let _ = lb.push("d", "[k : Q]", &[], Provenance::Input, ctx.from_u64(field.d as u64));
    let r_logb = lb.push("log_B", "log of the height cutoff", &[], Provenance::Input, ctx.from_f64(log_b));
    let core = push_core_constants(&mut lb, &ctx, field, integral);
    let c12_real = lb.push(
        "c12",
        "supplied rank cap",
        &[],
        Provenance::Input,
        ctx.from_f64(c12),
    );
    let four_e2 = 4.0 / (e_const * e_const);
    let good = inv.conductor_norm.is_one();
    let c13 = if good {
        let c7 = (1.0
            + 2.0 * (field.d as f64).powf(1.5) * (1.0 + (field.d as f64).ln())
                / cfg.david_c6.sqrt())
        .powi(2);
        let _ = lb.push("c6", "David constant (configured)", &[], Provenance::Config, ctx.from_f64(cfg.david_c6));
        let _ = lb.push("c7", "(1 + 2 d^(3/2)(1 + log d)/sqrt(c6))^2", &["c6", "d"], Provenance::Derived, ctx.from_f64(c7));
        let poly = ctx.from_f64(c7.ln() / e_const + four_e2);
        ctx.add(
            &core.c11,
            &ctx.mul(&ctx.div(&c12_real, &ctx.from_u64(2)), &poly),
        )
    } else {
        let ln_term = (core.c4.to_f64() / 2f64.ln()).ln() / e_const + four_e2;
        let scale = ctx.mul(
            &ctx.div(&ctx.from_u64(7), &ctx.from_u64(2)),
            &c12_real,
        );
        ctx.add(&core.c11, &ctx.mul(&scale, &ctx.from_f64(ln_term)))
    };
    let c13 = lb.push(
        "c13",
        if good {
            "c11 + (c12/2)((1/e) log c7 + 4/e^2)"
        } else {
            "c11 + (7 c12 / 2)((1/e) log(c4/log 2) + 4/e^2)"
        },
        &["c11", "c12"],
        Provenance::Derived,
        c13,
    );
    let c_final = lb.push(
        "C_final",
        "bounded-rank exponent",
        &["c13"],
        Provenance::Derived,
        c13,
    );
    let bound_ln_real = ctx.div(&ctx.mul(&c_final, &r_logb), &r_logb.ln(&ctx));
    let bound_value = bound_ln_real.exp(&ctx);
    let bound_ln = lb.push("bound_ln", "C log B / log log B", &["C_final", "log_B"], Provenance::Derived, bound_ln_real);
    Ok(BoundReport {
        curve: curve_label(e_curve),
        ell: 0,
        log_b,
        branch: BoundBranch::BoundedRank,
        exponent: c_final.to_f64(),
        exponent_hp: c_final.to_decimal_string(),
        bound_ln: bound_ln.to_f64(),
        bound_value_hp: bound_value.to_decimal_string(),
        rank_bound: c12,
        torsion_pair_bound: f64::NAN,
        torsion_envelope: f64::NAN,
        conductor_norm: inv.conductor_norm.to_string(),
        disc_norm: inv.disc_norm.to_string(),
        szpiro_ratio: inv.szpiro_ratio,
        integral_regime: integral,
        zeta_in_field: field.contains_zeta_ell,
        c6_placeholder: good,
        empirical_count: None,
        ledger: lb.ledger,
    })
}

/// Corollary bound for the naive-height count: C'' = C (1 + C1 h(E) + C2/e).
pub fn corollary_bound(
    e_curve: &WeierstrassCurve,
    ell: u32,
    field: &FieldParams,
    log_b: f64,
    cfg: &HeightsConfig,
    budget: &FactorBudget,
) -> Result<BoundReport> {
    let mut report = theorem_bound(e_curve, ell, field, log_b, cfg, budget)?;
    let h_e = curve_height(e_curve).value;
    let e_const = std::f64::consts::E;
    let factor = 1.0 + cfg.gap_c1 * h_e + cfg.gap_c2 / e_const;
    let ctx = RealCtx::from_env();
    let c_pp = ctx.mul(
        &ctx.parse(&report.exponent_hp)?,
        &ctx.from_f64(factor),
    );
    let bound_ln = c_pp.to_f64() * log_b / log_b.ln();
    let bound_value = ctx
        .div(
            &ctx.mul(&c_pp, &ctx.from_f64(log_b)),
            &ctx.from_f64(log_b).ln(&ctx),
        )
        .exp(&ctx);
    report.ledger.entries.push(LedgerEntry {
        name: "gap_C1".into(),
        formula: "height-gap constant C1 (configured)".into(),
        value: cfg.gap_c1,
        value_hp: format!("{}", cfg.gap_c1),
        dependencies: vec![],
        provenance: Provenance::Config,
    });
    report.ledger.entries.push(LedgerEntry {
        name: "gap_C2".into(),
        formula: "height-gap constant C2 (configured)".into(),
        value: cfg.gap_c2,
        value_hp: format!("{}", cfg.gap_c2),
        dependencies: vec![],
        provenance: Provenance::Config,
    });
    report.ledger.entries.push(LedgerEntry {
        name: "C_corollary".to_string(),
        formula: "C (1 + C1 h(E) + C2/e)".into(),
        value: c_pp.to_f64(),
        value_hp: c_pp.to_decimal_string(),
        dependencies: vec!["C_final".into(), "gap_C1".into(), "gap_C2".into(), "h_E".into()],
        provenance: Provenance::Derived,
    });
    report.exponent = c_pp.to_f64();
    report.exponent_hp = c_pp.to_decimal_string();
    report.bound_ln = bound_ln;
    report.bound_value_hp = bound_value.to_decimal_string();
    Ok(report)
}

pub fn curve_label(e: &WeierstrassCurve) -> String {
    let (a, b, c) = e.coefficients();
    format!("{a},{b},{c}")
}

/// Parse "e^x" or a decimal into log B.
pub fn parse_log_b(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("e^") {
        if rest.trim() == "e" {
            return Ok(std::f64::consts::E);
        }
        let x: f64 = rest
            .parse()
            .map_err(|_| Error::Domain(format!("bad exponent in {s:?}")))?;
        return Ok(x);
    }
    let b: f64 = s
        .parse()
        .map_err(|_| Error::Domain(format!("bad B literal {s:?}")))?;
    if b <= 0.0 {
        return Err(Error::Domain(format!("B must be positive, got {s:?}")));
    }
    Ok(b.ln())
}
