//! End-to-end verification runs with pass/fail/refused checks and
//! deterministic text or line-delimited JSON rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::morse::{gs_kernel_rank_formula, kernel_rank, MorseError};
use crate::presentations::{
    abelianized_endo, direct_limit, gs_endo, make_gs, make_prop1, make_prop2_target, one_relator_form,
    prop1_endo, recognize_ascending_hnn, replay_tietze, theta, theta_inverse, FreeAuto, FreeEndo,
    Presentation, SemidirectElement, TietzeScript, PROP2_SCRIPT,
};
use crate::smallcancel::{check_metric, fmt_ratio, gs_bound_check};
use crate::stallings::{analyze_endomorphism, separability_witness, StallingsError};
use crate::words::{w_length, Generator, WeightMap, Word};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Refused,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Refused => "refused",
        }
    }

    fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub details: String,
    pub provenance: String,
}

fn check(name: &str, verdict: Verdict, details: impl Into<String>, provenance: &str) -> Check {
    Check { name: name.into(), verdict, details: details.into(), provenance: provenance.into() }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct VerificationReport {
    pub command: String,
    /// `key=value` lines describing every input.
    pub inputs: Vec<String>,
    /// SHA-256 of the input lines.
    pub digest: String,
    pub checks: Vec<Check>,
}

#[derive(Serialize)]
struct Header<'a> {
    command: &'a str,
    inputs: &'a [String],
    digest: &'a str,
}

#[derive(Serialize)]
struct Footer {
    exit_status: i32,
}

impl VerificationReport {
    pub fn new(command: &str, inputs: Vec<String>) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for line in &inputs {
            h.update(b"\n");
            h.update(line.as_bytes());
        }
        let digest = hex::encode(h.finalize());
        VerificationReport { command: command.into(), inputs, digest, checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 all pass, 1 some check failed, 3 some check refused and none failed.
    pub fn exit_status(&self) -> i32 {
        if self.checks.iter().any(|c| c.verdict == Verdict::Fail) {
            1
        } else if self.checks.iter().any(|c| c.verdict == Verdict::Refused) {
            3
        } else {
            0
        }
    }

    pub fn merge(reports: &[VerificationReport]) -> VerificationReport {
        let mut inputs = Vec::new();
        for r in reports {
            inputs.push(format!("{}={}", r.command, r.digest));
        }
        let mut out = VerificationReport::new("report", inputs);
        for r in reports {
            for c in &r.checks {
                let mut c = c.clone();
                c.name = format!("{}/{}", r.command.trim_start_matches("verify "), c.name);
                out.push(c);
            }
        }
        out
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "command: {}", self.command).unwrap();
        for i in &self.inputs {
            writeln!(s, "input: {i}").unwrap();
        }
        writeln!(s, "digest: {}", self.digest).unwrap();
        for c in &self.checks {
            writeln!(s, "[{}] {}: {}", c.verdict.as_str(), c.name, c.details).unwrap();
            writeln!(s, "    provenance: {}", c.provenance).unwrap();
        }
        writeln!(s, "exit status: {}", self.exit_status()).unwrap();
        s
    }

    /// One JSON record per line: a header, one per check, a footer.
    pub fn render_structured(&self) -> String {
        let mut s = String::new();
        let header = Header { command: &self.command, inputs: &self.inputs, digest: &self.digest };
        s.push_str(&serde_json::to_string(&header).unwrap());
        s.push('\n');
        for c in &self.checks {
            s.push_str(&serde_json::to_string(c).unwrap());
            s.push('\n');
        }
        s.push_str(&serde_json::to_string(&Footer { exit_status: self.exit_status() }).unwrap());
        s.push('\n');
        s
    }
}

fn stable() -> Generator {
    Generator::new('t').expect("static name")
}

fn morse_verdict(e: &MorseError) -> Verdict {
    match e {
        MorseError::Word(_) => Verdict::Fail,
        _ => Verdict::Refused,
    }
}

/// Inputs for the first verification run. Defaults reproduce the stock
/// presentation and the height map with every weight 1.
#[derive(Clone, Debug)]
pub struct Prop1Options {
    pub presentation: Presentation,
    pub heights: Option<WeightMap>,
}

impl Default for Prop1Options {
    fn default() -> Self {
        Prop1Options { presentation: make_prop1(), heights: None }
    }
}

pub fn cmd_verify_prop1(opts: &Prop1Options) -> VerificationReport {
    let p = &opts.presentation;
    let psi = opts.heights.clone().unwrap_or_else(|| WeightMap::uniform(p.alphabet(), 1));
    let mut rep = VerificationReport::new(
        "verify prop1",
        vec![format!("presentation={}", p.to_string().trim_end().replace('\n', "; ")), format!("heights={psi}")],
    );
    rep.push(check(
        "euler characteristic",
        Verdict::of(p.euler_characteristic() == 0),
        format!("1 - {} + {} = {}", p.alphabet().len(), p.relators().len(), p.euler_characteristic()),
        "plumbing",
    ));
    endo_checks(&mut rep, p, true);
    match kernel_rank(p, &psi) {
        Ok(cert) => {
            let areas: Vec<String> = cert.areas.iter().map(u64::to_string).collect();
            rep.push(check(
                "kernel rank",
                Verdict::of(cert.rank == 3),
                format!("links are trees; areas {}; kernel free of rank {}", areas.join(" + "), cert.rank),
                "rank(ker) = 3",
            ));
        }
        Err(e) => rep.push(check("kernel rank", morse_verdict(&e), e.to_string(), "rank(ker) = 3")),
    }
    rep
}

/// HNN recognition, injectivity, properness and (optionally) the direct
/// limit of the abelianized base endomorphism.
fn endo_checks(rep: &mut VerificationReport, p: &Presentation, with_limit: bool) -> Option<FreeEndo> {
    let hnn = match recognize_ascending_hnn(p, stable()) {
        Ok(h) => h,
        Err(e) => {
            rep.push(check("ascending hnn", Verdict::Fail, e.to_string(), "t^-1 x t = endo(x)"));
            return None;
        }
    };
    rep.push(check("ascending hnn", Verdict::Pass, format!("endo {}", hnn.endo), "t^-1 x t = endo(x)"));
    match analyze_endomorphism(&hnn.endo) {
        Ok(r) => {
            rep.push(check(
                "endo injective",
                Verdict::of(r.injective),
                format!("image rank {} of {}", r.image_rank, r.domain_rank),
                "rank(image) = rank(base)",
            ));
            let missing = r.missing_generator.as_ref().map_or("none".to_string(), Word::to_string);
            rep.push(check(
                "endo proper",
                Verdict::of(r.proper),
                format!("generator outside the image: {missing}"),
                "a not in image",
            ));
        }
        Err(e) => rep.push(check("endo injective", Verdict::Fail, e.to_string(), "rank(image) = rank(base)")),
    }
    if !with_limit {
        return Some(hnn.endo);
    }
    let m = abelianized_endo(&hnn.endo);
    match direct_limit(&m) {
        Ok(d) => rep.push(check(
            "kernel abelianization",
            Verdict::of(d.stable_rank == 1 && d.dilation == 1),
            format!("matrix {:?}; {}", m.to_rows(), d.classification),
            "H1(K) = Z",
        )),
        Err(e) => rep.push(check("kernel abelianization", Verdict::Fail, e, "H1(K) = Z")),
    }
    Some(hnn.endo)
}

#[derive(Clone, Debug)]
pub struct Prop2Options {
    pub script: String,
    pub inverse: FreeEndo,
}

impl Default for Prop2Options {
    fn default() -> Self {
        Prop2Options { script: PROP2_SCRIPT.to_string(), inverse: theta_inverse() }
    }
}

pub fn cmd_verify_prop2(opts: &Prop2Options) -> VerificationReport {
    let mut h = Sha256::new();
    h.update(opts.script.as_bytes());
    let mut rep = VerificationReport::new(
        "verify prop2",
        vec![
            format!("automorphism={}", theta()),
            format!("inverse={}", opts.inverse),
            format!("script_sha256={}", hex::encode(h.finalize())),
        ],
    );
    let auto = match FreeAuto::verify(theta(), opts.inverse.clone()) {
        Ok(a) => {
            rep.push(check("automorphism", Verdict::Pass, "both composites are the identity", "theta o theta^-1 = id"));
            Some(a)
        }
        Err(e) => {
            rep.push(check("automorphism", Verdict::Fail, e.to_string(), "theta o theta^-1 = id"));
            None
        }
    };

    let states = TietzeScript::parse(&opts.script).and_then(|s| replay_tietze(&make_prop1(), &s));
    match &states {
        Ok(states) => {
            let last = states.last().expect("replay yields the input state");
            let target = make_prop2_target();
            rep.push(check(
                "tietze replay",
                Verdict::of(*last == target),
                format!("{} moves validated; final {}", states.len() - 1, last.to_string().trim_end().replace('\n', "; ")),
                "plumbing",
            ));
            let wanted = ["TTattaTAtA", "TTxtttxTXX", "ztxYYT"];
            let missing: Vec<&str> = wanted
                .iter()
                .copied()
                .filter(|w| !states.iter().any(|s| s.contains_relator(&Word::parse(w).unwrap())))
                .collect();
            rep.push(check(
                "intermediate states",
                Verdict::of(missing.is_empty()),
                if missing.is_empty() {
                    format!("found {}", wanted.join(", "))
                } else {
                    format!("missing {}", missing.join(", "))
                },
                "TTattaTAtA; TTxtttxTXX; ztxYYT",
            ));
        }
        Err(e) => {
            let at = e.move_index().map_or(String::new(), |i| format!(" at move {i}"));
            rep.push(check("tietze replay", Verdict::Fail, format!("failed{at}: {e}"), "plumbing"));
        }
    }

    if let Some(auto) = auto {
        let mut dead = Vec::new();
        let mut alive = Vec::new();
        for r in make_prop2_target().relator_words() {
            match SemidirectElement::eval(&r, stable(), &auto) {
                Ok(v) if v.is_identity() => dead.push(r.to_string()),
                Ok(v) => alive.push(format!("{r} -> {v}")),
                Err(e) => alive.push(format!("{r}: {e}")),
            }
        }
        // the one-relator form, rewritten with a = x t
        let one = one_relator_form(&make_prop1(), stable()).expect("stock presentation");
        let images: BTreeMap<Generator, Word> =
            [(Generator::new('a').unwrap(), Word::parse("xt").unwrap()), (stable(), stable().word())].into();
        for r in one.relator_words() {
            let rw = r.substitute(&images).expect("total substitution");
            match SemidirectElement::eval(&rw, stable(), &auto) {
                Ok(v) if v.is_identity() => dead.push(rw.to_string()),
                Ok(v) => alive.push(format!("{rw} -> {v}")),
                Err(e) => alive.push(format!("{rw}: {e}")),
            }
        }
        rep.push(check(
            "relators in semidirect product",
            Verdict::of(alive.is_empty()),
            if alive.is_empty() { format!("{} relators evaluate to 1", dead.len()) } else { alive.join("; ") },
            "F(x,y,z) x|theta Z",
        ));
    }
    rep
}

#[derive(Clone, Copy, Debug)]
pub struct Prop3Options {
    pub s: i64,
    pub require_hyperbolic: bool,
    pub brute_force: bool,
}

impl Default for Prop3Options {
    fn default() -> Self {
        Prop3Options { s: 9, require_hyperbolic: false, brute_force: false }
    }
}

pub fn cmd_verify_prop3(opts: &Prop3Options) -> Result<VerificationReport, String> {
    let s = opts.s;
    if s < 3 {
        return Err(format!("s = {s} is below 3"));
    }
    let mut rep = VerificationReport::new(
        "verify prop3",
        vec![
            format!("s={s}"),
            format!("require_hyperbolic={}", opts.require_hyperbolic),
            format!("brute_force={}", opts.brute_force),
        ],
    );
    let p = make_gs(s).map_err(|e| e.to_string())?;
    endo_checks(&mut rep, &p, false);

    let wl = w_length(s);
    let want_w = (s + 2) + (s + 1) * (s + 8) / 2;
    rep.push(check("word length", Verdict::of(wl == want_w), format!("|W| = {wl}, formula {want_w}"), "|W| = (s+2)+(s+1)(s+8)/2"));

    let one = match one_relator_form(&p, stable()) {
        Ok(q) => q,
        Err(e) => {
            rep.push(check("one-relator length", Verdict::Fail, e.to_string(), "L = 8+(14+s)(s+1)"));
            return Ok(rep);
        }
    };
    let l = one.relators()[0].len() as i64;
    let want_l = 8 + (14 + s) * (s + 1);
    rep.push(check("one-relator length", Verdict::of(l == want_l), format!("L = {l}, formula {want_l}"), "L = 8+(14+s)(s+1)"));

    let n_formula = gs_kernel_rank_formula(s);
    match kernel_rank(&p, &WeightMap::uniform(p.alphabet(), 1)) {
        Ok(cert) => {
            let areas: Vec<String> = cert.areas.iter().map(u64::to_string).collect();
            rep.push(check(
                "kernel rank",
                Verdict::of(cert.rank as i64 == n_formula),
                format!("areas {} = {}; formula {n_formula}", areas.join(" + "), cert.rank),
                "n = s+4+(8+s)(s+1)/2",
            ));
        }
        Err(e) => rep.push(check("kernel rank", morse_verdict(&e), e.to_string(), "n = s+4+(8+s)(s+1)/2")),
    }

    let bound = gs_bound_check(s).map_err(|e| e.to_string())?;
    let bound_verdict = if bound.satisfied == (s >= 9) {
        if !bound.satisfied && opts.require_hyperbolic { Verdict::Fail } else { Verdict::Pass }
    } else {
        Verdict::Fail
    };
    rep.push(check(
        "sufficient inequality",
        bound_verdict,
        format!(
            "{} <= {}: {}",
            fmt_ratio(&bound.lhs),
            fmt_ratio(&bound.rhs),
            if bound.satisfied { "satisfied" } else { "not satisfied" }
        ),
        "2s+15 <= (8+(14+s)(s+1))/7",
    ));

    let metric = check_metric(one.alphabet(), one.relators(), Ratio::new(1, 7), false).expect("lambda in range");
    let max = metric.pieces.max_piece_length as i64;
    let witness = metric
        .pieces
        .witness
        .as_ref()
        .map_or(String::new(), |w| format!("; witness {} at {} and {}", w.piece, w.first, w.second));
    rep.push(check(
        "max piece",
        Verdict::of(max <= 2 * s + 14),
        format!("max piece {max} <= 2s+14 = {}{witness}", 2 * s + 14),
        "piece <= 2s+14",
    ));
    if opts.brute_force {
        let bf = check_metric(one.alphabet(), one.relators(), Ratio::new(1, 7), true).expect("lambda in range");
        rep.push(check(
            "brute force agreement",
            Verdict::of(bf == metric),
            format!("brute force max piece {}", bf.pieces.max_piece_length),
            "plumbing",
        ));
    }
    let (hyp_verdict, status) = match (metric.holds, opts.require_hyperbolic) {
        (true, _) => (Verdict::Pass, "established"),
        (false, true) => (Verdict::Fail, "not established"),
        (false, false) => (Verdict::Pass, "not established (the condition is only sufficient)"),
    };
    rep.push(check(
        "hyperbolicity",
        hyp_verdict,
        format!(
            "C'(1/7): max piece {max} vs threshold {}: {status}",
            fmt_ratio(&metric.thresholds[0])
        ),
        "C'(1/7) => hyperbolic",
    ));
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct Prop4Options {
    pub s: i64,
    /// Replaces the base endomorphism of the first group (test hook).
    pub prop1_endo: Option<FreeEndo>,
    /// Replaces the base endomorphism of `G_s` (test hook).
    pub gs_endo: Option<FreeEndo>,
}

impl Default for Prop4Options {
    fn default() -> Self {
        Prop4Options { s: 9, prop1_endo: None, gs_endo: None }
    }
}

pub fn cmd_verify_prop4(opts: &Prop4Options) -> Result<VerificationReport, String> {
    if opts.s < 3 {
        return Err(format!("s = {} is below 3", opts.s));
    }
    let e1 = opts.prop1_endo.clone().unwrap_or_else(prop1_endo);
    let e2 = match &opts.gs_endo {
        Some(e) => e.clone(),
        None => gs_endo(opts.s).map_err(|e| e.to_string())?,
    };
    let mut rep = VerificationReport::new(
        "verify prop4",
        vec![format!("s={}", opts.s), format!("prop1_endo={e1}"), format!("gs_endo_sha256={}", digest(&e2.to_string()))],
    );
    for (name, e) in [("witness prop1", &e1), (&*format!("witness G_{}", opts.s), &e2)] {
        match separability_witness(e, stable()) {
            Ok(w) => {
                let replay = w.replay(e);
                let ok = matches!(replay, Ok(c) if c.all());
                rep.push(check(
                    name,
                    Verdict::of(ok),
                    format!(
                        "L1 = <{}>; conjugator {}; outside element {}; replay {}; {}",
                        w.inner.alphabet(),
                        w.conjugator,
                        w.outside_element,
                        if ok { "confirms" } else { "rejects" },
                        w.justification
                    ),
                    "t a t^-1 in t L1 t^-1 \\ L1",
                ));
            }
            Err(StallingsError::Refused(why)) => {
                rep.push(check(name, Verdict::Refused, why, "t a t^-1 in t L1 t^-1 \\ L1"))
            }
            Err(e) => rep.push(check(name, Verdict::Fail, e.to_string(), "t a t^-1 in t L1 t^-1 \\ L1")),
        }
    }
    Ok(rep)
}

fn digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

/// All four runs at the given `s`, merged.
pub fn cmd_report(s: i64) -> Result<VerificationReport, String> {
    let reports = [
        cmd_verify_prop1(&Prop1Options::default()),
        cmd_verify_prop2(&Prop2Options::default()),
        cmd_verify_prop3(&Prop3Options { s, ..Default::default() })?,
        cmd_verify_prop4(&Prop4Options { s, ..Default::default() })?,
    ];
    Ok(VerificationReport::merge(&reports))
}
