use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use fbcyclic::morse::{ascending_link, descending_link, heights, kernel_rank, MorseError};
use fbcyclic::presentations::{
    abelianization, abelianized_endo, direct_limit, make_gs, one_relator_form, parse, replay_tietze, FreeEndo,
    PresentationFile, TietzeScript,
};
use fbcyclic::smallcancel::{check_metric, fmt_ratio};
use fbcyclic::stallings::{analyze_endomorphism, separability_witness, SubgroupGraph};
use fbcyclic::verify::{
    cmd_report, cmd_verify_prop1, cmd_verify_prop2, cmd_verify_prop3, cmd_verify_prop4, Prop1Options,
    Prop2Options, Prop3Options, Prop4Options, VerificationReport,
};
use fbcyclic::{Alphabet, Generator, WeightMap, Word};

#[derive(Parser)]
#[command(name = "fbcyclic", version, about = "Checks for free-by-cyclic presentations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a presentation file and print its canonical form.
    Parse { file: PathBuf },
    /// Abelianize a presentation, or iterate an abelianized endomorphism.
    Abelianize {
        file: Option<PathBuf>,
        /// Endomorphism such as "a=b;b=abA"; prints its matrix and direct limit.
        #[arg(long)]
        endo: Option<String>,
    },
    /// Stallings graph of a subgroup, or image analysis of an endomorphism.
    Stallings {
        /// Comma-separated generators, e.g. "b,abA".
        #[arg(long)]
        subgroup: Option<String>,
        #[arg(long, default_value = "a b")]
        gens: String,
        #[arg(long)]
        member: Vec<String>,
        #[arg(long)]
        rank: bool,
        #[arg(long)]
        endo: Option<String>,
        /// With --endo: emit the non-separability witness for this stable letter.
        #[arg(long)]
        witness: Option<char>,
    },
    /// Piece analysis and the metric condition C'(lambda).
    Smallcancel {
        file: PathBuf,
        #[arg(long, default_value = "1/7")]
        lambda: String,
        #[arg(long)]
        brute_force: bool,
    },
    /// Heights, links and the kernel certificate for a height map.
    Morse {
        file: PathBuf,
        /// Name of a `hom:` in the file, or inline weights "a=1 b=1 t=1".
        #[arg(long, default_value = "psi")]
        hom: String,
        #[arg(long)]
        check_kernel: bool,
    },
    /// Replay a Tietze script, printing every state.
    Tietze {
        file: PathBuf,
        script: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Emit the presentation of G_s or its one-relator form.
    Gs {
        #[arg(long)]
        s: i64,
        #[arg(long, value_enum, default_value = "pres")]
        emit: Emit,
    },
    /// Run one of the proposition-level verifications.
    Verify {
        which: Which,
        #[arg(long, default_value_t = 9)]
        s: i64,
        #[arg(long)]
        require_hyperbolic: bool,
        #[arg(long)]
        brute_force: bool,
        /// prop1: replace the presentation.
        #[arg(long)]
        pres: Option<PathBuf>,
        /// prop1: replace the height map, e.g. "a=0 b=0 t=1".
        #[arg(long)]
        weights: Option<String>,
        /// prop2: replace the Tietze script.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run every verification and render one combined report.
    Report {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, default_value_t = 9)]
        s: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Pres,
    Onerel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Prop1,
    Prop2,
    Prop3,
    Prop4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

/// Exit 2: bad input or usage.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<u8, InputError>;

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<PresentationFile, InputError> {
    let pf = parse(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    for w in &pf.warnings {
        eprintln!("warning: {w}");
    }
    Ok(pf)
}

fn stable() -> Generator {
    Generator::new('t').expect("static name")
}

fn emit(report: &VerificationReport, format: Format) -> u8 {
    match format {
        Format::Text => print!("{}", report.render_text()),
        Format::Structured => print!("{}", report.render_structured()),
    }
    report.exit_status() as u8
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Parse { file } => {
            let pf = load(&file)?;
            print!("{}", pf.presentation);
            for (name, w) in &pf.homs {
                println!("hom {name}: {w}");
            }
            Ok(0)
        }
        Cmd::Abelianize { file, endo } => {
            if let Some(file) = &file {
                let pf = load(file)?;
                println!("abelianization: {}", abelianization(&pf.presentation));
            }
            if let Some(e) = endo {
                let e = FreeEndo::parse(&e)?;
                let m = abelianized_endo(&e);
                let d = direct_limit(&m).map_err(InputError)?;
                println!("matrix: {m}");
                println!("stable rank: {}", d.stable_rank);
                println!("dilation: {}", d.dilation);
                println!("stabilized at power: {}", d.stabilized_at);
                println!("direct limit: {}", d.classification);
            } else if file.is_none() {
                return Err(InputError("give a presentation file or --endo".into()));
            }
            Ok(0)
        }
        Cmd::Stallings { subgroup, gens, member, rank, endo, witness } => stallings(subgroup, &gens, &member, rank, endo, witness),
        Cmd::Smallcancel { file, lambda, brute_force } => {
            let pf = load(&file)?;
            let lambda: Ratio<i64> = lambda.parse().map_err(|e| InputError(format!("lambda {lambda}: {e}")))?;
            let p = &pf.presentation;
            let m = check_metric(p.alphabet(), p.relators(), lambda, brute_force)?;
            println!("symmetrized elements: {}", m.pieces.element_count);
            for (i, r) in p.relators().iter().enumerate() {
                println!(
                    "relator {i}: L = {}, max piece {}, threshold {}",
                    r.len(),
                    m.pieces.per_relator_max[i],
                    fmt_ratio(&m.thresholds[i])
                );
            }
            println!("max piece: {}", m.pieces.max_piece_length);
            if let Some(w) = &m.pieces.witness {
                println!("witness: {} at {} and {}", w.piece, w.first, w.second);
            }
            println!("search: {}", if brute_force { "brute force" } else { "sorted rotations" });
            println!("C'({}): {}", fmt_ratio(&lambda), if m.holds { "holds" } else { "fails" });
            Ok(if m.holds { 0 } else { 1 })
        }
        Cmd::Morse { file, hom, check_kernel } => morse(&file, &hom, check_kernel),
        Cmd::Tietze { file, script, target } => {
            let pf = load(&file)?;
            let script = TietzeScript::parse(&read(&script)?)?;
            let states = match replay_tietze(&pf.presentation, &script) {
                Ok(s) => s,
                Err(e) => {
                    println!("replay failed: {e}");
                    return Ok(1);
                }
            };
            for (i, s) in states.iter().enumerate() {
                let label = if i == 0 { "start".to_string() } else { format!("after {}", script.moves[i - 1]) };
                println!("# state {i} ({label})");
                print!("{s}");
            }
            if let Some(t) = target {
                let target = load(&t)?.presentation;
                let ok = states.last() == Some(&target);
                println!("target: {}", if ok { "reached" } else { "not reached" });
                return Ok(if ok { 0 } else { 1 });
            }
            Ok(0)
        }
        Cmd::Gs { s, emit } => {
            if s < 3 {
                return Err(InputError(format!("s = {s} is below 3")));
            }
            let p = make_gs(s)?;
            match emit {
                Emit::Pres => {
                    print!("{p}");
                    println!("hom: psi");
                    println!("weight: a=1 b=1 t=1");
                }
                Emit::Onerel => print!("{}", one_relator_form(&p, stable())?),
            }
            Ok(0)
        }
        Cmd::Verify { which, s, require_hyperbolic, brute_force, pres, weights, script, format } => {
            let report = match which {
                Which::Prop1 => {
                    let mut opts = Prop1Options::default();
                    if let Some(f) = pres {
                        opts.presentation = load(&f)?.presentation;
                    }
                    if let Some(w) = weights {
                        opts.heights = Some(WeightMap::parse(opts.presentation.alphabet(), &w)?);
                    }
                    cmd_verify_prop1(&opts)
                }
                Which::Prop2 => {
                    let mut opts = Prop2Options::default();
                    if let Some(f) = script {
                        opts.script = read(&f)?;
                    }
                    cmd_verify_prop2(&opts)
                }
                Which::Prop3 => cmd_verify_prop3(&Prop3Options { s, require_hyperbolic, brute_force }).map_err(InputError)?,
                Which::Prop4 => cmd_verify_prop4(&Prop4Options { s, ..Default::default() }).map_err(InputError)?,
            };
            Ok(emit(&report, format))
        }
        Cmd::Report { format, s } => Ok(emit(&cmd_report(s).map_err(InputError)?, format)),
    }
}

fn stallings(
    subgroup: Option<String>,
    gens: &str,
    member: &[String],
    rank: bool,
    endo: Option<String>,
    witness: Option<char>,
) -> Outcome {
    if let Some(sub) = subgroup {
        let alphabet = Alphabet::parse(gens)?;
        let words = sub
            .split(',')
            .map(|w| Word::parse(w.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        let g = SubgroupGraph::from_generators(&words, &alphabet)?;
        println!("vertices: {}", g.vertex_count());
        print!("{g}");
        if rank {
            println!("rank: {}", g.rank()?);
        }
        for m in member {
            let w = Word::parse(m)?;
            println!("member {w}: {}", if g.contains(&w)? { "yes" } else { "no" });
        }
    }
    if let Some(e) = endo {
        let e = FreeEndo::parse(&e)?;
        let r = analyze_endomorphism(&e)?;
        println!("image graph:");
        print!("{}", r.image);
        println!("image rank: {} of {}", r.image_rank, r.domain_rank);
        println!("injective: {}", r.injective);
        println!("proper: {}", r.proper);
        if let Some(m) = &r.missing_generator {
            println!("missing generator: {m}");
        }
        println!("justification: {}", r.justification);
        if let Some(t) = witness {
            let t = Generator::new(t)?;
            match separability_witness(&e, t) {
                Ok(w) => {
                    let checks = w.replay(&e)?;
                    println!("L1: <{}>", w.inner.alphabet());
                    println!("conjugator: {}", w.conjugator);
                    println!("outside element: {}", w.outside_element);
                    println!("replay: {}", if checks.all() { "confirmed" } else { "rejected" });
                    println!("justification: {}", w.justification);
                    return Ok(if checks.all() { 0 } else { 1 });
                }
                Err(e) => {
                    println!("witness: {e}");
                    return Ok(3);
                }
            }
        }
    }
    Ok(0)
}

fn morse(file: &Path, hom: &str, check_kernel: bool) -> Outcome {
    let pf = load(file)?;
    let p = &pf.presentation;
    let w = match pf.hom(hom) {
        Some(w) => w.clone(),
        None if hom.contains('=') => WeightMap::parse(p.alphabet(), hom)?,
        None => return Err(InputError(format!("no hom named `{hom}` in {}", file.display()))),
    };
    let refused = |e: MorseError| {
        println!("refused: {e}");
        Ok(3)
    };
    for (i, r) in p.relators().iter().enumerate() {
        match heights(r, &w) {
            Ok(c) => {
                let hs: Vec<String> = c.heights.iter().map(i64::to_string).collect();
                println!("cell {i} {r}: heights {} (min {}, max {})", hs.join(" "), c.min, c.max);
            }
            Err(e) => return refused(e),
        }
    }
    let (asc, desc) = match (ascending_link(p, &w), descending_link(p, &w)) {
        (Ok(a), Ok(d)) => (a, d),
        (Err(e), _) | (_, Err(e)) => return refused(e),
    };
    println!("ascending link ({}):", if asc.is_tree() { "tree" } else { "not a tree" });
    print!("{asc}");
    println!("descending link ({}):", if desc.is_tree() { "tree" } else { "not a tree" });
    print!("{desc}");
    if check_kernel {
        match kernel_rank(p, &w) {
            Ok(cert) => {
                for (i, a) in cert.areas.iter().enumerate() {
                    println!("cell {i} area: {a}");
                }
                println!("kernel rank: {}", cert.rank);
                println!("conclusion: {}", cert.conclusion());
            }
            Err(e) => return refused(e),
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
