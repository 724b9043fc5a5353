use std::fmt::Write as _;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use icelattice::derived::{coaisle_witness_search, theta, TiltedHeart};
use icelattice::iceseq::{
    enumerate_full_sequences, mmi_from_seq, narrow_iff_ice_scan, seq_from_mmi, thick_correspondence, SCAN_BIT_CAP,
};
use icelattice::{
    BoundQuiverAlgebra, DerivedCalc, Error, IndCatalog, Interval, Result, Subcat, SubcatCalc, TorsLattice,
    WindowedAisle,
};

#[derive(Parser)]
#[command(name = "icelattice", version, about = "Torsion lattices, ICE sequences and windowed t-structures")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Builtin algebra (`lineA:n`, `paperNakayama`) or path to an algebra JSON file.
    #[arg(long, global = true, default_value = "lineA:3")]
    algebra: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Indecomposable modules with dimension vectors, Hom and Ext tables.
    Ind,
    /// Torsion classes.
    Tors {
        /// Print only the number of torsion classes.
        #[arg(long)]
        count: bool,
    },
    /// Wide subcategories.
    Wide {
        #[arg(long)]
        count: bool,
    },
    /// ICE-closed subcategories.
    Ice {
        #[arg(long)]
        count: bool,
    },
    /// The wide subcategory alpha(C) of an ICE-closed subcategory.
    Alpha {
        /// Comma-separated member labels, e.g. `2,21,32`.
        #[arg(long)]
        subcat: String,
    },
    /// Hasse quiver of the torsion lattice.
    Hasse,
    /// Decreasing sequences of maximal meet intervals.
    Mmi {
        #[arg(long, default_value_t = 1)]
        length: usize,
        #[arg(long)]
        count: bool,
    },
    /// Full ICE sequences with C(0) everything and C(n+1) = 0.
    Iceseq {
        #[arg(long, default_value_t = 1)]
        length: usize,
        #[arg(long)]
        count: bool,
    },
    /// Aisles of bounded t-structures on a window `a..b`.
    Aisles {
        #[arg(long, allow_hyphen_values = true, default_value = "-1..0")]
        window: String,
        #[arg(long)]
        count: bool,
    },
    /// Runs a verification suite; exits with 1 on any falsification.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Scan window width for `narrow-iff-ice`.
        #[arg(long, default_value_t = 2)]
        width: usize,
        /// Longest sequence length for `mmi-roundtrip` and `t-structure`.
        #[arg(long, default_value_t = 2)]
        length: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    NarrowIffIce,
    IntervalIso,
    MmiRoundtrip,
    TStructure,
    ThickWide,
    CoaisleRemark,
}

struct Ctx {
    calc: Arc<SubcatCalc>,
    format: Format,
}

impl Ctx {
    fn cat(&self) -> &IndCatalog {
        self.calc.catalog()
    }

    fn lattice(&self) -> Result<TorsLattice> {
        TorsLattice::build(self.calc.clone())
    }

    fn derived(&self) -> Result<DerivedCalc> {
        DerivedCalc::new(self.calc.clone())
    }

    fn labels(&self, s: Subcat) -> Vec<String> {
        s.labels(self.cat())
    }

    fn braces(&self, s: Subcat) -> String {
        format!("{{{}}}", self.labels(s).join(","))
    }
}

fn load(source: &str) -> Result<Arc<SubcatCalc>> {
    let alg = Arc::new(BoundQuiverAlgebra::load(source)?);
    let cat = Arc::new(IndCatalog::build(alg)?);
    Ok(Arc::new(SubcatCalc::new(cat)?))
}

fn sorted_by_labels(ctx: &Ctx, mut family: Vec<Subcat>) -> Vec<Subcat> {
    family.sort_by_key(|&s| ctx.labels(s));
    family
}

/// Renders a family of subcategories: count first, then one per line.
fn family_output(ctx: &Ctx, family: Vec<Subcat>, count_only: bool) -> Result<String> {
    let family = sorted_by_labels(ctx, family);
    match ctx.format {
        Format::Json if count_only => Ok(json!({ "count": family.len() }).to_string()),
        Format::Json => {
            let items: Vec<Vec<String>> = family.iter().map(|&s| ctx.labels(s)).collect();
            Ok(json!({ "count": family.len(), "items": items }).to_string())
        }
        Format::Dot => Err(Error::Usage("DOT output is available for `hasse` and `aisles`".into())),
        Format::Text => {
            let mut out = format!("{}\n", family.len());
            if !count_only {
                for s in family {
                    writeln!(out, "{}", ctx.braces(s)).unwrap();
                }
            }
            Ok(out)
        }
    }
}

fn subset_family(ctx: &Ctx, keep: impl Fn(Subcat) -> Result<bool>) -> Result<Vec<Subcat>> {
    let n = ctx.cat().len();
    if n > SCAN_BIT_CAP {
        return Err(Error::CapExceeded(format!("subset scan over {n} members (limit {SCAN_BIT_CAP})")));
    }
    let mut out = Vec::new();
    for bits in 0..1u64 << n {
        let s = Subcat::from_bits(bits);
        if keep(s)? {
            out.push(s);
        }
    }
    Ok(out)
}

fn cmd_ind(ctx: &Ctx) -> Result<String> {
    let cat = ctx.cat();
    let members: Vec<Value> = (0..cat.len())
        .map(|i| {
            json!({
                "label": cat.label(i),
                "dims": cat.member(i).dims(),
                "projective": cat.is_projective(i),
                "injective": cat.is_injective(i),
            })
        })
        .collect();
    match ctx.format {
        Format::Json => Ok(json!({
            "count": cat.len(),
            "members": members,
            "hom": cat.hom_table(),
            "ext": cat.ext_table(),
        })
        .to_string()),
        Format::Dot => Err(Error::Usage("DOT output is available for `hasse` and `aisles`".into())),
        Format::Text => {
            let mut out = format!("{}\n", cat.len());
            for i in 0..cat.len() {
                let mut tags = Vec::new();
                if cat.is_projective(i) {
                    tags.push("projective");
                }
                if cat.is_injective(i) {
                    tags.push("injective");
                }
                writeln!(out, "{} {:?} {}", cat.label(i), cat.member(i).dims(), tags.join(" ")).unwrap();
            }
            Ok(out.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n")
        }
    }
}

fn cmd_alpha(ctx: &Ctx, subcat: &str) -> Result<String> {
    let s = Subcat::parse(ctx.cat(), subcat)?;
    let a = ctx.calc.alpha(s)?;
    match ctx.format {
        Format::Json => Ok(json!({ "subcat": ctx.labels(s), "alpha": ctx.labels(a) }).to_string()),
        Format::Dot => Err(Error::Usage("DOT output is available for `hasse` and `aisles`".into())),
        Format::Text => Ok(format!("{}\n", ctx.labels(a).join(","))),
    }
}

fn cmd_hasse(ctx: &Ctx) -> Result<String> {
    let lat = ctx.lattice()?;
    match ctx.format {
        Format::Dot => Ok(lat.hasse_dot()),
        Format::Json => Ok(lat.to_json().to_string()),
        Format::Text => {
            let mut edges: Vec<(String, String)> = lat
                .covers()
                .iter()
                .map(|&(a, b)| (ctx.braces(lat.elements()[a]), ctx.braces(lat.elements()[b])))
                .collect();
            edges.sort();
            let mut out = format!("{} {}\n", lat.len(), edges.len());
            for (a, b) in edges {
                writeln!(out, "{a} -> {b}").unwrap();
            }
            Ok(out)
        }
    }
}

fn interval_json(ctx: &Ctx, i: &Interval) -> Value {
    json!({ "lower": ctx.labels(i.lower), "upper": ctx.labels(i.upper), "heart": ctx.labels(i.heart) })
}

fn cmd_mmi(ctx: &Ctx, length: usize, count: bool) -> Result<String> {
    let lat = ctx.lattice()?;
    let mut chains = lat.enumerate_mmi_sequences(length)?;
    chains.sort_by_key(|c| c.iter().map(|i| (ctx.labels(i.upper), ctx.labels(i.lower))).collect::<Vec<_>>());
    match ctx.format {
        Format::Json if count => Ok(json!({ "count": chains.len() }).to_string()),
        Format::Json => {
            let items: Vec<Vec<Value>> =
                chains.iter().map(|c| c.iter().map(|i| interval_json(ctx, i)).collect()).collect();
            Ok(json!({ "count": chains.len(), "items": items }).to_string())
        }
        Format::Dot => Err(Error::Usage("DOT output is available for `hasse` and `aisles`".into())),
        Format::Text => {
            let mut out = format!("{}\n", chains.len());
            if !count {
                for c in chains {
                    let parts: Vec<String> =
                        c.iter().map(|i| format!("[{}, {}]", ctx.braces(i.lower), ctx.braces(i.upper))).collect();
                    writeln!(out, "{}", parts.join(" > ")).unwrap();
                }
            }
            Ok(out)
        }
    }
}

fn cmd_iceseq(ctx: &Ctx, length: usize, count: bool) -> Result<String> {
    let seqs = enumerate_full_sequences(&ctx.calc, length)?;
    let mut rows: Vec<(Vec<Vec<String>>, usize)> =
        seqs.iter().enumerate().map(|(i, s)| (s.entries().iter().map(|&e| ctx.labels(e)).collect(), i)).collect();
    rows.sort();
    match ctx.format {
        Format::Json if count => Ok(json!({ "count": seqs.len() }).to_string()),
        Format::Json => {
            let items: Vec<Value> = rows.iter().map(|&(_, i)| seqs[i].to_json(ctx.cat())).collect();
            Ok(json!({ "count": seqs.len(), "items": items }).to_string())
        }
        Format::Dot => Err(Error::Usage("DOT output is available for `hasse` and `aisles`".into())),
        Format::Text => {
            let mut out = format!("{}\n", seqs.len());
            if !count {
                for (_, i) in rows {
                    writeln!(out, "{}", seqs[i].display(ctx.cat())).unwrap();
                }
            }
            Ok(out)
        }
    }
}

fn parse_window(text: &str) -> Result<(i32, i32)> {
    let bad = || Error::Usage(format!("window `{text}` is not of the form a..b with a < b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: i32 = a.trim().parse().map_err(|_| bad())?;
    let b: i32 = b.trim().parse().map_err(|_| bad())?;
    if a >= b {
        return Err(bad());
    }
    Ok((a, b))
}

/// Aisles everything below `a`, nothing above `b`, one per full ICE sequence.
fn window_aisles(ctx: &Ctx, a: i32, b: i32) -> Result<Vec<WindowedAisle>> {
    let width = b - a;
    let seqs = enumerate_full_sequences(&ctx.calc, width as usize)?;
    let mut aisles = seqs
        .iter()
        .map(|s| Ok(theta(ctx.cat(), &s.reindexed(width), -width)?.shifted(-b)))
        .collect::<Result<Vec<_>>>()?;
    aisles.sort_by_key(|u| u.layers().iter().map(|&l| ctx.labels(l)).collect::<Vec<_>>());
    Ok(aisles)
}

fn cmd_aisles(ctx: &Ctx, window: &str, count: bool) -> Result<String> {
    let (a, b) = parse_window(window)?;
    if !ctx.cat().algebra().is_hereditary() {
        return Err(Error::UnsupportedAlgebra("aisles are computed for hereditary algebras only".into()));
    }
    let aisles = window_aisles(ctx, a, b)?;
    match ctx.format {
        Format::Json if count => Ok(json!({ "count": aisles.len() }).to_string()),
        Format::Json => {
            let items: Vec<Value> = aisles.iter().map(|u| u.to_json(ctx.cat())).collect();
            Ok(json!({ "count": aisles.len(), "items": items }).to_string())
        }
        Format::Dot => Ok(aisles.iter().map(|u| u.to_dot(ctx.cat())).collect()),
        Format::Text => {
            let mut out = format!("{}\n", aisles.len());
            if !count {
                for u in aisles {
                    let parts: Vec<String> =
                        (u.lo()..=u.hi()).map(|k| format!("S({k})={}", ctx.braces(u.layer(k)))).collect();
                    writeln!(out, "{}", parts.join(" ")).unwrap();
                }
            }
            Ok(out)
        }
    }
}

/// Outcome of a suite: summary fields, or a falsification with its report.
fn cmd_verify(ctx: &Ctx, suite: Suite, width: usize, length: usize) -> Result<(Value, bool)> {
    let (name, report, ok) = match suite {
        Suite::NarrowIffIce => {
            let r = narrow_iff_ice_scan(&ctx.calc, width)?;
            let bad: Vec<String> = r.disagreements.iter().map(|s| s.display(ctx.cat())).collect();
            let report = json!({
                "window": r.window, "tuples": r.tuples, "decreasing": r.decreasing,
                "narrow": r.narrow, "ice": r.ice, "disagreements": bad,
            });
            ("narrow-iff-ice", report, bad.is_empty())
        }
        Suite::IntervalIso => {
            let lat = ctx.lattice()?;
            let mut checked = 0;
            for w in lat.intervals() {
                if lat.is_wide_interval(&w)? {
                    lat.interval_tors_iso_check(&w)?;
                    checked += 1;
                }
            }
            ("interval-iso", json!({ "wide_intervals": checked }), true)
        }
        Suite::MmiRoundtrip => {
            let lat = ctx.lattice()?;
            let mut counts = Vec::new();
            let mut ok = true;
            for n in 1..=length {
                let chains = lat.enumerate_mmi_sequences(n)?;
                let seqs = enumerate_full_sequences(&ctx.calc, n)?;
                for chain in &chains {
                    ok &= &mmi_from_seq(&lat, &seq_from_mmi(&lat, chain)?)? == chain;
                }
                for seq in &seqs {
                    ok &= seq_from_mmi(&lat, &mmi_from_seq(&lat, seq)?)?.entries() == seq.entries();
                }
                ok &= chains.len() == seqs.len();
                counts.push(json!({ "length": n, "chains": chains.len(), "sequences": seqs.len() }));
            }
            ("mmi-roundtrip", json!({ "lengths": counts }), ok)
        }
        Suite::TStructure => {
            let d = ctx.derived()?;
            let mut failures = Vec::new();
            let mut checked = 0;
            for n in 1..=length as i32 {
                for aisle in window_aisles(ctx, -n, 0)? {
                    checked += 1;
                    if !d.verify_t_structure(&aisle)?.passes() {
                        failures.push(aisle.to_json(ctx.cat()));
                    }
                }
            }
            let ok = failures.is_empty();
            ("t-structure", json!({ "aisles": checked, "failures": failures }), ok)
        }
        Suite::ThickWide => {
            let r = thick_correspondence(&ctx.lattice()?)?;
            let report = json!({
                "wide_by_scan": r.wide_by_scan.len(),
                "wide_as_hearts": r.wide_as_hearts.len(),
                "constant_ice": r.constant_ice.len(),
            });
            ("thick-wide", report, r.agrees())
        }
        Suite::CoaisleRemark => {
            let (report, ok) = coaisle_witness(ctx)?;
            ("coaisle-remark", report, ok)
        }
    };
    let status = if ok { "ok" } else { "falsified" };
    Ok((json!({ "suite": name, "status": status, "report": report }), ok))
}

/// The tilting module `1 ⊕ 3 ⊕ 321` over `lineA:3`, whose endomorphism
/// algebra is `paperNakayama`, with the aisle of the sequence
/// `C(-1) = {2,21,32,3}`, `C(0) = {3}` over the latter.
fn coaisle_witness(ctx: &Ctx) -> Result<(Value, bool)> {
    if ctx.cat().algebra().name() != "lineA:3" {
        return Err(Error::Usage("the coaisle-remark suite runs over --algebra lineA:3".into()));
    }
    let d = ctx.derived()?;
    let lambda = load("paperNakayama")?;
    let lam = lambda.catalog();
    let heart = TiltedHeart::new(&d, Subcat::parse(ctx.cat(), "1,3,321")?, lam)?;
    let seq = icelattice::IceSequence::full_sequence(
        lam,
        -1,
        vec![Subcat::parse(lam, "2,21,32,3")?, Subcat::parse(lam, "3")?],
    )?;
    let lam_aisle = theta(lam, &seq, -1)?;
    let simple = lam.index_of("3").ok_or_else(|| Error::Contract("paperNakayama has no simple 3".into()))?;
    let witnesses = coaisle_witness_search(&d, &heart, &lam_aisle, (-3, 3))?;
    let found: Vec<Value> = witnesses
        .iter()
        .filter(|w| w.h0_member == simple)
        .map(|w| {
            json!({
                "object": format!("{}[{}]", ctx.cat().label(w.object.0), -w.object.1),
                "h0": lam.label(w.h0_member),
            })
        })
        .collect();
    let ok = !found.is_empty();
    Ok((json!({ "witnesses": found }), ok))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Falsification(_) => 1,
        Error::CapExceeded(_) | Error::IncompleteCatalog(_) | Error::Io(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(String, bool)> {
    if let Some(jobs) = cli.opts.jobs {
        if jobs == 0 {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot configure {jobs} worker threads: {e}")))?;
    }
    let ctx = Ctx { calc: load(&cli.opts.algebra)?, format: cli.opts.format };
    let calc = ctx.calc.clone();
    let text = match cli.command {
        Command::Ind => cmd_ind(&ctx)?,
        Command::Tors { count } => family_output(&ctx, ctx.lattice()?.elements().to_vec(), count)?,
        Command::Wide { count } => family_output(&ctx, subset_family(&ctx, |s| calc.is_wide(s))?, count)?,
        Command::Ice { count } => family_output(&ctx, subset_family(&ctx, |s| calc.is_ice_closed(s))?, count)?,
        Command::Alpha { subcat } => cmd_alpha(&ctx, &subcat)?,
        Command::Hasse => cmd_hasse(&ctx)?,
        Command::Mmi { length, count } => cmd_mmi(&ctx, length, count)?,
        Command::Iceseq { length, count } => cmd_iceseq(&ctx, length, count)?,
        Command::Aisles { window, count } => cmd_aisles(&ctx, &window, count)?,
        Command::Verify { suite, width, length } => {
            let (report, ok) = cmd_verify(&ctx, suite, width, length)?;
            let text = match ctx.format {
                Format::Json => report.to_string(),
                _ => serde_json::to_string_pretty(&report)?,
            };
            return Ok((text + "\n", ok));
        }
    };
    let text = if text.ends_with('\n') { text } else { text + "\n" };
    Ok((text, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.opts.out.clone();
    let result = run(cli).and_then(|(text, ok)| {
        match &out {
            Some(path) => std::fs::write(path, &text)?,
            None => print!("{text}"),
        }
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            if let Error::Falsification(msg) = &e {
                println!("{}", json!({ "status": "falsified", "detail": msg }));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
