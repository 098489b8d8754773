//! Command implementations for the `chist` binary.
//!
//! Every command produces an [`Outcome`]: the rendered output plus whether
//! all verdicts passed. Errors are input errors and map to exit status 2.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_3;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use chist::consistency::{
    check_c1_family, check_linear_positivity, check_medium_decoherence, check_ordered_consistency,
    check_sum_rule, check_weak_decoherence, probability, ConsistencyReport, Notion,
};
use chist::histories::{chain_operator, HistoryFamily, HistoryId};
use chist::io::{ProblemFile, ReportFile, SelfDecoherenceSummary};
use chist::mirror::{
    check_self_decoherence, contrary_bound_check, occurrence_probability, proposition1_check,
    proposition1_check_mixed, search_mirror, verify_mirror, MirrorCertificate, SearchOptions,
};
use chist::scenarios::{
    build_example1, build_example2, example1_expected, linear_positivity_closed_form,
};
use chist::{individuality::mixture, DensityOperator, Error, Result, ToleranceConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "chist",
    version,
    about = "Consistency checks for quantum history families"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Tolerance for operator identities.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_op: f64,
    /// Tolerance for eigenvalue classification.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_eig: f64,
    /// Tolerance for probability equalities.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_prob: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Report,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run consistency checks on a problem file.
    Check {
        input: PathBuf,
        /// Comma-separated notions; `self-decoherence` is accepted as well.
        #[arg(long, value_delimiter = ',')]
        notions: Vec<String>,
    },
    /// Reproduce the single-qubit example.
    Example1 {
        #[arg(long, default_value_t = FRAC_PI_3)]
        theta: f64,
        #[arg(long)]
        alpha: Option<f64>,
        /// rho, rho1 or rho2.
        #[arg(long, default_value = "rho")]
        state: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// Reproduce the two-slit which-path example.
    Example2 {
        #[arg(long, default_value_t = 3)]
        spatial_dim: usize,
        /// 1-based spatial basis indices of the screen region.
        #[arg(long, value_delimiter = ',', default_value = "1,3")]
        delta: Vec<usize>,
    },
    /// Sweep one parameter of the single-qubit example and emit CSV.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = FRAC_PI_3)]
        theta: f64,
        #[arg(long)]
        alpha: Option<f64>,
        /// State for theta and alpha sweeps: rho, rho1 or rho2.
        #[arg(long, default_value = "rho1")]
        state: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// Verify or search for a mirror projection.
    Mirror {
        #[command(subcommand)]
        action: MirrorAction,
    },
    /// Check the orthogonality relations of two mirrored histories.
    Prop1 {
        input: PathBuf,
        /// 1-based index of the first history, e.g. `1,1`.
        #[arg(long)]
        h1: String,
        #[arg(long)]
        h2: String,
        /// Operator name of the mirror of the first history.
        #[arg(long)]
        t: String,
        #[arg(long)]
        u: String,
        /// Check each spectral component of a mixed state separately.
        #[arg(long)]
        mixed: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum MirrorAction {
    Verify {
        input: PathBuf,
        #[arg(long)]
        history: String,
        /// Operator name of the candidate mirror.
        #[arg(long)]
        mirror: String,
    },
    Search {
        input: PathBuf,
        #[arg(long)]
        history: String,
        #[arg(long, default_value_t = 256)]
        max_candidates: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Theta,
    Alpha,
    Lambda,
}

/// Rendered output and the overall verdict.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

impl GlobalArgs {
    pub fn tolerances(&self) -> Result<ToleranceConfig> {
        ToleranceConfig::new(self.tol_op, self.tol_eig, self.tol_prob)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let tol = g.tolerances()?;
    let options = SearchOptions {
        seed: g.seed,
        ..SearchOptions::default()
    };
    let report = match &cli.command {
        Command::Check { input, notions } => cmd_check(input, notions, &options, &tol, g.seed)?,
        Command::Example1 {
            theta,
            alpha,
            state,
            dim,
        } => cmd_example1(*theta, *alpha, state, *dim, &options, &tol, g.seed)?,
        Command::Example2 { spatial_dim, delta } => {
            cmd_example2(*spatial_dim, delta, &tol, g.seed)?
        }
        Command::Sweep {
            param,
            from,
            to,
            steps,
            theta,
            alpha,
            state,
            dim,
        } => {
            let spec = SweepSpec {
                param: *param,
                from: *from,
                to: *to,
                steps: *steps,
                theta: *theta,
                alpha: *alpha,
                state: state.clone(),
                dim: *dim,
            };
            return Ok(Outcome {
                text: cmd_sweep(&spec, &tol)?,
                pass: true,
            });
        }
        Command::Mirror { action } => match action {
            MirrorAction::Verify {
                input,
                history,
                mirror,
            } => cmd_mirror_verify(input, history, mirror, &tol, g.seed)?,
            MirrorAction::Search {
                input,
                history,
                max_candidates,
            } => {
                let options = SearchOptions {
                    max_candidates: *max_candidates,
                    ..options
                };
                cmd_mirror_search(input, history, &options, &tol)?
            }
        },
        Command::Prop1 {
            input,
            h1,
            h2,
            t,
            u,
            mixed,
        } => cmd_prop1(input, h1, h2, t, u, *mixed, &tol, g.seed)?,
    };
    let pass = report.all_pass();
    let text = match g.format {
        Format::Table => render_table(&report),
        Format::Report => report.to_canonical_string()?,
    };
    Ok(Outcome { text, pass })
}

/// Which checks `cmd_check` runs.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Selection {
    notions: Vec<Notion>,
    self_decoherence: bool,
    explicit: bool,
}

fn parse_selection(names: &[String]) -> Result<Selection> {
    if names.is_empty() {
        return Ok(Selection {
            notions: Notion::ALL.to_vec(),
            self_decoherence: true,
            explicit: false,
        });
    }
    let mut sel = Selection {
        notions: Vec::new(),
        self_decoherence: false,
        explicit: true,
    };
    for name in names {
        let name = name.trim();
        if name.eq_ignore_ascii_case("self-decoherence") || name.eq_ignore_ascii_case("self") {
            sel.self_decoherence = true;
        } else {
            let n = Notion::from_str(name)?;
            if !sel.notions.contains(&n) {
                sel.notions.push(n);
            }
        }
    }
    Ok(sel)
}

fn failed_precondition(notion: Notion, message: String) -> ConsistencyReport {
    ConsistencyReport {
        notion,
        verdict: false,
        worst_pair: None,
        worst_residual: 0.0,
        worst_value: 0.0,
        pair_count: 0,
        notes: vec![message],
    }
}

fn run_notion(
    notion: Notion,
    family: &HistoryFamily,
    rho: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<ConsistencyReport> {
    match notion {
        Notion::Weak => check_weak_decoherence(family, rho, tol),
        Notion::Medium => check_medium_decoherence(family, rho, tol),
        Notion::LinearPositive => check_linear_positivity(family, rho, tol),
        Notion::SumRule => check_sum_rule(family, rho, tol),
        Notion::C1Compat => check_c1_family(family, rho, tol),
        Notion::Ordered => match check_ordered_consistency(family, rho, &[], tol) {
            Err(Error::PreconditionFailed(msg)) => Ok(failed_precondition(notion, msg)),
            other => other,
        },
    }
}

/// Runs the selected notions; with the default selection, checks that do
/// not apply (too many members, not 2-event) are skipped with a note.
fn run_selection(
    report: &mut ReportFile,
    sel: &Selection,
    family: &HistoryFamily,
    rho: &DensityOperator,
    mirrors: Option<&BTreeMap<HistoryId, chist::Projection>>,
    options: &SearchOptions,
    tol: &ToleranceConfig,
) -> Result<()> {
    for &notion in &sel.notions {
        match run_notion(notion, family, rho, tol) {
            Ok(r) => report.reports.push(r),
            Err(e @ Error::FamilyTooLarge { .. }) if !sel.explicit => {
                report.notes.push(format!("{} skipped: {e}", notion.name()));
            }
            Err(e) => return Err(e),
        }
    }
    if sel.self_decoherence {
        if family.len() != 2 && !sel.explicit {
            report
                .notes
                .push("self-decoherence skipped: family is not made of 2-event histories".into());
        } else {
            let sd = check_self_decoherence(family, rho, mirrors, options, tol)?;
            report.self_decoherence = Some(SelfDecoherenceSummary::from_report(&sd));
        }
    }
    Ok(())
}

pub fn cmd_check(
    input: &std::path::Path,
    notions: &[String],
    options: &SearchOptions,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ReportFile> {
    let sel = parse_selection(notions)?;
    let problem = ProblemFile::load(input)?.resolve(tol)?;
    let mut report = ReportFile::new(*tol, seed);
    run_selection(
        &mut report,
        &sel,
        &problem.family,
        &problem.state,
        problem.mirrors.as_ref(),
        options,
        tol,
    )?;
    Ok(report)
}

pub fn cmd_example1(
    theta: f64,
    alpha: Option<f64>,
    state: &str,
    dim: usize,
    options: &SearchOptions,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ReportFile> {
    let ex = build_example1(dim, theta, alpha)?;
    let rho = ex.state(state)?;
    let mut report = ReportFile::new(*tol, seed);
    let sel = parse_selection(&[])?;
    run_selection(&mut report, &sel, &ex.family, rho, None, options, tol)?;
    if let Some(sd) = report.self_decoherence.as_mut() {
        sd.informational = true;
    }
    for r in report.reports.iter_mut() {
        if r.notion == Notion::LinearPositive {
            *r = ex.linear_positivity_report(rho, tol)?;
        }
    }
    let p_h1 = probability(&ex.h1, rho)?;
    let p_h2 = probability(&ex.h2, rho)?;
    let p_coarse = probability(&ex.h_coarse, rho)?;
    let v = &mut report.values;
    v.insert("computed.p_h1".into(), p_h1);
    v.insert("computed.p_h2".into(), p_h2);
    v.insert("computed.p_coarse".into(), p_coarse);
    v.insert(
        "computed.weak_residual".into(),
        (p_coarse - p_h1 - p_h2) / 2.0,
    );
    if alpha.is_none() && state == "rho1" {
        let e = example1_expected(theta);
        v.insert("expected.p_h1".into(), e.p_h1);
        v.insert("expected.p_h2".into(), e.p_h2);
        v.insert("expected.p_coarse".into(), e.p_coarse);
        v.insert("expected.weak_residual".into(), e.weak_residual_rho1);
    }
    if let (Some(a), "rho1") = (alpha, state) {
        v.insert(
            "expected.linear_positivity".into(),
            linear_positivity_closed_form(theta, a).re,
        );
    }
    Ok(report)
}

pub fn cmd_example2(
    spatial_dim: usize,
    delta: &[usize],
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ReportFile> {
    let ex = build_example2(spatial_dim, delta)?;
    let mut report = ReportFile::new(*tol, seed);
    let c1 = verify_mirror(&ex.t, &ex.h1, &ex.rho, tol)?;
    let c2 = verify_mirror(&ex.u, &ex.h2, &ex.rho, tol)?;
    report.checks.insert("mirror.T".into(), c1.verified);
    report.checks.insert("mirror.U".into(), c2.verified);
    report
        .values
        .insert("mirror.T.max_residual".into(), c1.max_residual());
    report
        .values
        .insert("mirror.U.max_residual".into(), c2.max_residual());
    for notion in [Notion::Weak, Notion::Medium] {
        report
            .reports
            .push(run_notion(notion, &ex.family, &ex.rho, tol)?);
    }
    let sd = check_self_decoherence(
        &ex.family,
        &ex.rho,
        Some(&ex.mirrors()),
        &SearchOptions::default(),
        tol,
    )?;
    report.self_decoherence = Some(SelfDecoherenceSummary::from_report(&sd));

    let p1 = proposition1_check(&ex.t, &ex.u, &ex.h1, &ex.h2, &ex.big_psi, tol)?;
    report.checks.insert("prop1".into(), p1.passed);
    report.values.insert("prop1.overlap".into(), p1.overlap);
    report
        .values
        .insert("prop1.join_residual".into(), p1.join_residual);
    report
        .values
        .insert("prop1.interference".into(), p1.interference);

    let bound = contrary_bound_check(&ex.h1, &ex.h2, &c1, &c2, &ex.rho, tol)?;
    report.checks.insert("contrary_bound".into(), bound.passed);
    report.values.insert("p_h1".into(), bound.p_h1);
    report.values.insert("p_h2".into(), bound.p_h2);
    report.values.insert("p_e2".into(), bound.p_e2);
    match bound.conditional_sum {
        Some(s) => {
            report.values.insert("conditional_sum".into(), s);
        }
        None => report
            .notes
            .push("Tr(E2 rho) = 0, conditional probabilities undefined".into()),
    }
    Ok(report)
}

fn parse_history(text: &str) -> Result<HistoryId> {
    text.parse().map_err(|e| Error::Invalid {
        name: format!("history {text:?}"),
        cause: Box::new(e),
    })
}

fn load_problem(
    input: &std::path::Path,
    tol: &ToleranceConfig,
) -> Result<(ProblemFile, chist::io::Problem)> {
    let file = ProblemFile::load(input)?;
    let problem = file.resolve(tol)?;
    Ok((file, problem))
}

fn named_projection(
    file: &ProblemFile,
    name: &str,
    tol: &ToleranceConfig,
) -> Result<chist::Projection> {
    let m = file
        .operators
        .get(name)
        .ok_or_else(|| Error::Invalid {
            name: format!("operator {name:?}"),
            cause: Box::new(Error::BadParameters("not defined".into())),
        })?
        .to_matrix()?;
    chist::matcore::validate_projection(&m, tol).map_err(|e| Error::Invalid {
        name: format!("operator {name:?}"),
        cause: Box::new(e),
    })
}

fn record_certificate(report: &mut ReportFile, prefix: &str, cert: &MirrorCertificate) {
    let v = &mut report.values;
    v.insert(format!("{prefix}.m1.e1"), cert.residual_m1.0);
    v.insert(format!("{prefix}.m1.e2"), cert.residual_m1.1);
    v.insert(format!("{prefix}.m2.t"), cert.residual_m2.0);
    v.insert(format!("{prefix}.m2.e1"), cert.residual_m2.1);
    report
        .checks
        .insert(format!("{prefix}.verified"), cert.verified);
}

pub fn cmd_mirror_verify(
    input: &std::path::Path,
    history: &str,
    mirror: &str,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ReportFile> {
    let (file, problem) = load_problem(input, tol)?;
    let id = parse_history(history)?;
    let h = problem.family.elementary(&id)?;
    let t = named_projection(&file, mirror, tol)?;
    let cert = verify_mirror(&t, &h, &problem.state, tol)?;
    let mut report = ReportFile::new(*tol, seed);
    record_certificate(&mut report, "mirror", &cert);
    if cert.verified {
        let occ = occurrence_probability(&h, &t, &problem.state, tol)?;
        report
            .values
            .insert("occurrence_probability".into(), occ.probability);
    }
    Ok(report)
}

pub fn cmd_mirror_search(
    input: &std::path::Path,
    history: &str,
    options: &SearchOptions,
    tol: &ToleranceConfig,
) -> Result<ReportFile> {
    let (_, problem) = load_problem(input, tol)?;
    let id = parse_history(history)?;
    let h = problem.family.elementary(&id)?;
    let mut report = ReportFile::new(*tol, options.seed);
    match search_mirror(&h, &problem.state, options, tol)? {
        Some(cert) => {
            record_certificate(&mut report, "mirror", &cert);
            report
                .values
                .insert("mirror.rank".into(), cert.t.rank() as f64);
        }
        None => {
            report.checks.insert("mirror.found".into(), false);
            report
                .notes
                .push("not found; the search does not prove that no mirror exists".into());
        }
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_prop1(
    input: &std::path::Path,
    h1: &str,
    h2: &str,
    t: &str,
    u: &str,
    mixed: bool,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<ReportFile> {
    let (file, problem) = load_problem(input, tol)?;
    let h1 = problem.family.elementary(&parse_history(h1)?)?;
    let h2 = problem.family.elementary(&parse_history(h2)?)?;
    let t = named_projection(&file, t, tol)?;
    let u = named_projection(&file, u, tol)?;
    let rho = &problem.state;
    let mut report = ReportFile::new(*tol, seed);
    if mixed {
        let parts = proposition1_check_mixed(&t, &u, &h1, &h2, rho, tol)?;
        for (k, (w, r)) in parts.iter().enumerate() {
            let prefix = format!("component{}", k + 1);
            report.values.insert(format!("{prefix}.weight"), *w);
            report.values.insert(format!("{prefix}.overlap"), r.overlap);
            report
                .values
                .insert(format!("{prefix}.join_residual"), r.join_residual);
            report
                .values
                .insert(format!("{prefix}.interference"), r.interference);
            report.checks.insert(format!("{prefix}.prop1"), r.passed);
        }
        report
            .notes
            .push("experimental: mixed state checked per spectral component".into());
        return Ok(report);
    }
    let psi = rho.state_vector(tol).ok_or_else(|| {
        Error::PreconditionFailed(
            "state is not pure; pass --mixed for the per-component check".into(),
        )
    })?;
    let r = proposition1_check(&t, &u, &h1, &h2, &psi, tol)?;
    report.checks.insert("prop1".into(), r.passed);
    report.values.insert("prop1.overlap".into(), r.overlap);
    report
        .values
        .insert("prop1.join_residual".into(), r.join_residual);
    report
        .values
        .insert("prop1.interference".into(), r.interference);
    let c1 = verify_mirror(&t, &h1, rho, tol)?;
    let c2 = verify_mirror(&u, &h2, rho, tol)?;
    let bound = contrary_bound_check(&h1, &h2, &c1, &c2, rho, tol)?;
    report.checks.insert("contrary_bound".into(), bound.passed);
    report.values.insert("p_h1".into(), bound.p_h1);
    report.values.insert("p_h2".into(), bound.p_h2);
    report.values.insert("p_e2".into(), bound.p_e2);
    if let Some(s) = bound.conditional_sum {
        report.values.insert("conditional_sum".into(), s);
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub theta: f64,
    pub alpha: Option<f64>,
    pub state: String,
    pub dim: usize,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    parameter: &'static str,
    value: f64,
    theta: f64,
    alpha: Option<f64>,
    lambda: Option<f64>,
    weak: bool,
    medium: bool,
    linear_positive: bool,
    p_h1: f64,
    p_h2: f64,
    p_coarse: f64,
    weak_residual: f64,
    medium_residual: f64,
    linear_positivity_min: f64,
    /// `Re Tr(C_h1 rho)`.
    trace_h1: f64,
}

fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Error::BadParameters(
            "sweep needs finite bounds and at least one step".into(),
        ));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps)
        .map(|k| from + (to - from) * k as f64 / (steps - 1) as f64)
        .collect())
}

/// One CSV row per grid point, in grid order.
pub fn cmd_sweep(spec: &SweepSpec, tol: &ToleranceConfig) -> Result<String> {
    let points = grid(spec.from, spec.to, spec.steps)?;
    let mut out = csv::Writer::from_writer(Vec::new());
    for &x in &points {
        let (theta, alpha, lambda) = match spec.param {
            SweepParam::Theta => (x, spec.alpha, None),
            SweepParam::Alpha => (spec.theta, Some(x), None),
            SweepParam::Lambda => (spec.theta, spec.alpha, Some(x)),
        };
        let ex = build_example1(spec.dim, theta, alpha)?;
        let rho = match lambda {
            Some(l) => mixture(&ex.rho1, &ex.rho2, l)?,
            None => ex.state(&spec.state)?.clone(),
        };
        let weak = check_weak_decoherence(&ex.family, &rho, tol)?;
        let medium = check_medium_decoherence(&ex.family, &rho, tol)?;
        let lp = check_linear_positivity(&ex.family, &rho, tol)?;
        let p_h1 = probability(&ex.h1, &rho)?;
        let p_h2 = probability(&ex.h2, &rho)?;
        let p_coarse = probability(&ex.h_coarse, &rho)?;
        out.serialize(SweepRow {
            parameter: match spec.param {
                SweepParam::Theta => "theta",
                SweepParam::Alpha => "alpha",
                SweepParam::Lambda => "lambda",
            },
            value: x,
            theta,
            alpha,
            lambda,
            weak: weak.verdict,
            medium: medium.verdict,
            linear_positive: lp.verdict,
            p_h1,
            p_h2,
            p_coarse,
            weak_residual: (p_coarse - p_h1 - p_h2) / 2.0,
            medium_residual: medium.worst_residual,
            linear_positivity_min: lp.worst_value,
            trace_h1: (chain_operator(&ex.h1).as_matrix() * rho.matrix().as_matrix())
                .trace()
                .re,
        })
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = out.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Fixed-width human-readable rendering of a report.
pub fn render_table(report: &ReportFile) -> String {
    let mut s = String::new();
    let t = &report.tolerances;
    let _ = writeln!(
        s,
        "{} {}  seed {}  eps_op {:.1e}  eps_eig {:.1e}  eps_prob {:.1e}",
        report.tool, report.version, report.seed, t.eps_op, t.eps_eig, t.eps_prob
    );
    if !report.reports.is_empty() {
        let _ = writeln!(
            s,
            "\n{:<16} {:<7} {:>14} {:>14} {:>6}  worst pair",
            "notion", "verdict", "residual", "value", "pairs"
        );
        for r in &report.reports {
            let pair = r
                .worst_pair
                .as_ref()
                .map(|(a, b)| format!("{a} / {b}"))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{:<16} {:<7} {:>14.6e} {:>14.6e} {:>6}  {}",
                r.notion.name(),
                pass_fail(r.verdict),
                r.worst_residual,
                r.worst_value,
                r.pair_count,
                pair
            );
            for note in &r.notes {
                let _ = writeln!(s, "    note: {note}");
            }
        }
    }
    if let Some(sd) = &report.self_decoherence {
        let tag = if sd.informational {
            "  (informational)"
        } else {
            ""
        };
        let _ = writeln!(s, "\nself-decoherence {}{tag}", pass_fail(sd.verdict));
        for h in &sd.histories {
            match h.max_residual {
                Some(r) => {
                    let _ = writeln!(s, "  {:<12} mirror found, max residual {r:.3e}", h.history);
                }
                None => {
                    let _ = writeln!(s, "  {:<12} not found", h.history);
                }
            }
        }
        for c in &sd.coarse {
            let _ = writeln!(
                s,
                "  summed mirror {} + {}: {}",
                c.first,
                c.second,
                if c.verified {
                    "verified"
                } else {
                    "not verified"
                }
            );
        }
        for note in &sd.notes {
            let _ = writeln!(s, "  note: {note}");
        }
    }
    if !report.checks.is_empty() {
        s.push('\n');
        for (name, ok) in &report.checks {
            let _ = writeln!(s, "{name:<32} {}", pass_fail(*ok));
        }
    }
    if !report.values.is_empty() {
        s.push('\n');
        for (name, value) in &report.values {
            let _ = writeln!(s, "{name:<32} {value:.12}");
        }
    }
    for note in &report.notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}
