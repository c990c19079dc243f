//! `schlicht`: coefficients, Grunsky tables, bound checks, searches and the
//! verification suite from the command line.

mod function;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use schlicht::bounds::{report_convex, report_s, BoundReport, Functional};
use schlicht::extremal::{
    grid_refine_search, schwarz_restart_search, Direction, FamilyTemplate, SchwarzClass, SearchSpec,
};
use schlicht::families::{random_schwarz, Class};
use schlicht::grunsky::{grunsky_odd_table, grunsky_table, verify_structural, GrunskyTable};
use schlicht::invert::{inverse_log_coefficients, log_coefficients, revert};
use schlicht::scalar::{CRat, Scalar, ScalarMode, C64};
use schlicht::suite::{self, SuiteConfig};

use function::{parse_complex, CliScalar, FunctionArgs};
use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "schlicht",
    version,
    about = "Logarithmic and Grunsky coefficient toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scalar arithmetic: exact rationals or f64.
    #[arg(long, global = true, value_enum, default_value = "exact")]
    mode: ModeArg,

    /// Tolerance for bound checks.
    #[arg(long, global = true, env = "SCHLICHT_TOLERANCE", default_value_t = schlicht::DEFAULT_TOLERANCE)]
    tolerance: f64,

    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for ScalarMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => ScalarMode::Exact,
            ModeArg::Float => ScalarMode::Float,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    S,
    Convex,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a_n, the inverse coefficients A_n, gamma_n and Gamma_n.
    Coeffs {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Print the Grunsky table and the structural identity residuals.
    Grunsky {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Table size; defaults to the largest the order determines.
        #[arg(long)]
        max_index: Option<usize>,
        /// Table of the odd transform instead of the full table.
        #[arg(long)]
        odd: bool,
    },
    /// Check the sharp bounds for the class of the function.
    Check {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Bound set to check; defaults to the class the family is known to lie in,
        /// and to S for inline input.
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
    },
    /// Grid-refine search of a functional over a one-parameter family.
    Search(SearchArgs),
    /// Run the full verification battery.
    Suite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SearchFamily {
    Koebe,
    ConvexLambda,
    ConvexSchwarz,
    StarlikeSchwarz,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    family: SearchFamily,
    /// G1, G2, G3, G2minusG1, G3minusG2 or a3minusa2sq.
    #[arg(long)]
    functional: Functional,
    #[arg(long, conflicts_with = "minimize")]
    maximize: bool,
    #[arg(long)]
    minimize: bool,
    /// Search interval `lo,hi`; defaults to the family's natural range.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    interval: Option<Vec<f64>>,
    #[arg(long, default_value_t = 64)]
    grid_points: usize,
    #[arg(long, default_value_t = 6)]
    refine: usize,
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// Fixed Schwarz polynomial `c1,c2,...` (entries `re` or `re:im`), scaled by the parameter.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    schwarz: Option<Vec<String>>,
    #[arg(long, default_value_t = 3)]
    schwarz_degree: usize,
    /// Random restarts over Schwarz polynomials (Schwarz families only).
    #[arg(long)]
    restarts: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Runs the command and returns whether every check passed.
fn run(cli: &Cli) -> Result<bool> {
    if !(cli.tolerance > 0.0 && cli.tolerance.is_finite()) {
        bail!("tolerance must be positive, got {}", cli.tolerance);
    }
    let (report, ok) = match (&cli.command, cli.mode) {
        (Command::Coeffs { function, order }, ModeArg::Exact) => {
            (coeffs::<CRat>(cli, function, *order)?, true)
        }
        (Command::Coeffs { function, order }, ModeArg::Float) => {
            (coeffs::<C64>(cli, function, *order)?, true)
        }
        (
            Command::Grunsky {
                function,
                order,
                max_index,
                odd,
            },
            ModeArg::Exact,
        ) => (
            grunsky::<CRat>(cli, function, *order, *max_index, *odd)?,
            true,
        ),
        (
            Command::Grunsky {
                function,
                order,
                max_index,
                odd,
            },
            ModeArg::Float,
        ) => (
            grunsky::<C64>(cli, function, *order, *max_index, *odd)?,
            true,
        ),
        (
            Command::Check {
                function,
                order,
                class,
            },
            ModeArg::Exact,
        ) => check::<CRat>(cli, function, *order, *class)?,
        (
            Command::Check {
                function,
                order,
                class,
            },
            ModeArg::Float,
        ) => check::<C64>(cli, function, *order, *class)?,
        (Command::Search(args), _) => (search(cli, args)?, true),
        (Command::Suite, _) => run_suite(cli),
    };
    report.emit(cli.format, cli.out.as_deref())?;
    Ok(ok)
}

fn mode_str<S: Scalar>() -> &'static str {
    S::MODE.as_str()
}

fn scalar_json<S: CliScalar>(c: &S) -> Value {
    let z = c.to_c64();
    let mut v = json!([z.re, z.im]);
    if let Some(exact) = c.exact_text() {
        v = json!({ "value": [z.re, z.im], "exact": exact });
    }
    v
}

fn scalar_text<S: CliScalar>(c: &S) -> String {
    c.exact_text().unwrap_or_else(|| {
        let z = c.to_c64();
        if z.im == 0.0 {
            format!("{}", z.re)
        } else {
            format!("{}{:+}i", z.re, z.im)
        }
    })
}

fn scalar_cells<S: CliScalar>(c: &S) -> [String; 3] {
    let z = c.to_c64();
    [
        z.re.to_string(),
        z.im.to_string(),
        c.exact_text().unwrap_or_default(),
    ]
}

fn build<S: CliScalar>(function: &FunctionArgs, order: usize) -> Result<function::Built<S>> {
    if order == 0 {
        bail!("order must be at least 1");
    }
    function.build::<S>(order)
}

fn coeffs<S: CliScalar>(cli: &Cli, function: &FunctionArgs, order: usize) -> Result<Report> {
    let built = build::<S>(function, order)?;
    let f = &built.series;
    let g = revert(f)?;
    let gamma = log_coefficients(f)?;
    let big = inverse_log_coefficients(f)?;

    let list = |name: &'static str,
                items: Vec<(usize, &S)>,
                text: &mut String,
                rows: &mut Vec<Vec<String>>| {
        text.push_str(&format!("{name}:\n"));
        let mut arr = Vec::new();
        for (n, c) in items {
            text.push_str(&format!("  {n:>3}  {}\n", scalar_text(c)));
            let [re, im, exact] = scalar_cells(c);
            rows.push(vec![name.to_string(), n.to_string(), re, im, exact]);
            arr.push(json!({ "n": n, "value": scalar_json(c) }));
        }
        Value::Array(arr)
    };
    let mut text = format!("function {} (order {order})\n", built.id);
    let mut rows = Vec::new();
    let mut body = Map::new();
    body.insert("functionId".into(), json!(built.id));
    body.insert("order".into(), json!(order));
    let a = list(
        "a",
        f.coeffs().iter().enumerate().skip(1).collect(),
        &mut text,
        &mut rows,
    );
    let big_a = list(
        "A",
        g.coeffs().iter().enumerate().skip(1).collect(),
        &mut text,
        &mut rows,
    );
    let gm = list("gamma", gamma.iter().collect(), &mut text, &mut rows);
    let big_g = list("Gamma", big.iter().collect(), &mut text, &mut rows);
    body.insert("a".into(), a);
    body.insert("A".into(), big_a);
    body.insert("gamma".into(), gm);
    body.insert("Gamma".into(), big_g);
    Ok(Report {
        command: "coeffs",
        mode: mode_str::<S>(),
        tolerance: cli.tolerance,
        body,
        csv_header: vec!["sequence", "n", "re", "im", "exact"],
        csv_rows: rows,
        text,
    })
}

fn grunsky<S: CliScalar>(
    cli: &Cli,
    function: &FunctionArgs,
    order: usize,
    max_index: Option<usize>,
    odd: bool,
) -> Result<Report> {
    let built = build::<S>(function, order)?;
    let f = &built.series;
    let table: GrunskyTable<S> = if odd {
        grunsky_odd_table(f, max_index.unwrap_or(order.saturating_sub(1)))?
    } else {
        grunsky_table(f, max_index.unwrap_or(order.saturating_sub(1) / 2))?
    };
    let p_max = table.max_index();
    let mut text = format!(
        "function {} (order {order}), {} table up to index {p_max}\n",
        built.id,
        if odd { "odd" } else { "full" }
    );
    let mut rows = Vec::new();
    for p in 0..=p_max {
        for q in 0..=p_max {
            if odd && (p % 2 == 0 || q % 2 == 0) {
                continue;
            }
            let w = table.omega(p, q);
            text.push_str(&format!("  w[{p},{q}] = {}\n", scalar_text(w)));
            let [re, im, exact] = scalar_cells(w);
            rows.push(vec![p.to_string(), q.to_string(), re, im, exact]);
        }
    }
    let mut body = Map::new();
    body.insert("functionId".into(), json!(built.id));
    body.insert("order".into(), json!(order));
    body.insert("parity".into(), json!(if odd { "odd" } else { "full" }));
    body.insert("maxIndex".into(), json!(p_max));
    body.insert("table".into(), serde_json::to_value(&table)?);
    body.insert("maxAsymmetry".into(), json!(table.max_asymmetry()));

    if order >= 6 {
        let r = verify_structural(f)?;
        let labels = [
            "a2 - 2w11",
            "a3 - 2w13 - 3w11^2",
            "a4 - 2w33 - 8w11w13 - (10/3)w11^3",
            "3w15 - 3w11w13 + w11^3 - 3w33",
        ];
        text.push_str("structural residuals:\n");
        let mut res = Vec::new();
        for (label, value) in labels.iter().zip(r.residuals.iter()) {
            text.push_str(&format!("  {label} = {}\n", scalar_text(value)));
            res.push(json!({ "identity": label, "residual": scalar_json(value) }));
        }
        text.push_str(&format!(
            "|2w13 - w11^2| = {} (bound 1)\n",
            r.second_coeff_functional
        ));
        body.insert(
            "structural".into(),
            json!({
                "omega11": scalar_json(&r.omega11),
                "omega13": scalar_json(&r.omega13),
                "omega33": scalar_json(&r.omega33),
                "omega15": scalar_json(&r.omega15),
                "residuals": res,
                "maxResidual": r.max_residual(),
                "secondCoeffFunctional": r.second_coeff_functional,
                "secondCoeffBoundHolds": r.second_coeff_bound_holds(cli.tolerance),
            }),
        );
    } else {
        text.push_str("structural residuals need order >= 6\n");
        body.insert("structural".into(), Value::Null);
    }
    Ok(Report {
        command: "grunsky",
        mode: mode_str::<S>(),
        tolerance: cli.tolerance,
        body,
        csv_header: vec!["p", "q", "re", "im", "exact"],
        csv_rows: rows,
        text,
    })
}

fn bound_text(r: &BoundReport) -> String {
    let mut text = format!("function {}\n", r.function_id);
    for (k, v) in &r.quantities {
        text.push_str(&format!("  {k} = {v}\n"));
    }
    for c in &r.checks {
        text.push_str(&format!(
            "  [{}] {}: value {} bound {} margin {:e}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.bound,
            c.margin
        ));
    }
    text
}

fn check<S: CliScalar>(
    cli: &Cli,
    function: &FunctionArgs,
    order: usize,
    class: Option<ClassArg>,
) -> Result<(Report, bool)> {
    if order < 4 {
        bail!("check needs --order >= 4, got {order}");
    }
    let built = build::<S>(function, order)?;
    let class = match (class, built.class) {
        (Some(ClassArg::S), _) => Class::S,
        (Some(ClassArg::Convex), _) => Class::Convex,
        (None, Some(c)) => c,
        (None, None) => Class::S,
    };
    let report = match class {
        Class::S => report_s(&built.series, &built.id, cli.tolerance)?,
        Class::Convex => report_convex(&built.series, &built.id, cli.tolerance)?,
    };
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                report.function_id.clone(),
                c.name.clone(),
                c.value.to_string(),
                c.bound.to_string(),
                c.margin.to_string(),
                c.pass.to_string(),
            ]
        })
        .collect();
    let ok = report.passed();
    let mut body = Map::new();
    body.insert("class".into(), json!(format!("{class:?}").to_lowercase()));
    body.insert("order".into(), json!(order));
    body.insert("passed".into(), json!(ok));
    body.insert("report".into(), serde_json::to_value(&report)?);
    Ok((
        Report {
            command: "check",
            mode: mode_str::<S>(),
            tolerance: cli.tolerance,
            body,
            csv_header: vec![
                "functionId",
                "checkName",
                "value",
                "bound",
                "margin",
                "pass",
            ],
            csv_rows: rows,
            text: bound_text(&report),
        },
        ok,
    ))
}

fn search(cli: &Cli, args: &SearchArgs) -> Result<Report> {
    if args.order < 4 {
        bail!("search needs --order >= 4, got {}", args.order);
    }
    let direction = if args.minimize {
        Direction::Minimize
    } else {
        Direction::Maximize
    };
    let mut body = Map::new();
    body.insert("functional".into(), serde_json::to_value(args.functional)?);
    body.insert("direction".into(), serde_json::to_value(direction)?);

    if let Some(restarts) = args.restarts {
        let class = match args.family {
            SearchFamily::ConvexSchwarz => SchwarzClass::Convex,
            SearchFamily::StarlikeSchwarz => SchwarzClass::Starlike,
            _ => bail!("--restarts only applies to the Schwarz families"),
        };
        let best = schwarz_restart_search(class, args.functional, direction, restarts, cli.seed)?;
        let text = format!(
            "best over {restarts} restarts (seed {}): {} = {} at r = {} (Schwarz seed {})\n",
            cli.seed, args.functional, best.result.value, best.result.argbest, best.seed
        );
        let rows = vec![vec![
            best.seed.to_string(),
            best.result.argbest.to_string(),
            best.result.value.to_string(),
        ]];
        body.insert("restarts".into(), json!(restarts));
        body.insert("result".into(), serde_json::to_value(&best)?);
        return Ok(Report {
            command: "search",
            mode: ScalarMode::Float.as_str(),
            tolerance: cli.tolerance,
            body,
            csv_header: vec!["schwarzSeed", "argbest", "value"],
            csv_rows: rows,
            text,
        });
    }

    let schwarz_pairs = || -> Result<Vec<[f64; 2]>> {
        match &args.schwarz {
            Some(list) => list
                .iter()
                .map(|t| parse_complex::<C64>(t).map(|z| [z.re, z.im]))
                .collect(),
            None => Ok(random_schwarz(args.schwarz_degree.max(1), cli.seed).to_pairs()),
        }
    };
    let family = match args.family {
        SearchFamily::Koebe => FamilyTemplate::KoebeRotation,
        SearchFamily::ConvexLambda => FamilyTemplate::ConvexLambda,
        SearchFamily::ConvexSchwarz => FamilyTemplate::ConvexSchwarzScale {
            schwarz: schwarz_pairs()?,
        },
        SearchFamily::StarlikeSchwarz => FamilyTemplate::StarlikeSchwarzScale {
            schwarz: schwarz_pairs()?,
        },
    };
    let mut spec = SearchSpec::new(family, args.functional, direction);
    if let Some(iv) = &args.interval {
        spec.interval = (iv[0], iv[1]);
    }
    spec.grid_points = args.grid_points;
    spec.refine_iterations = args.refine;
    spec.order = args.order;
    let result = grid_refine_search(&spec)?;
    let mut text = format!(
        "{} {} over [{}, {}]: argbest {} value {}\n",
        direction_word(direction),
        args.functional,
        spec.interval.0,
        spec.interval.1,
        result.argbest,
        result.value
    );
    let mut rows = Vec::new();
    for (i, round) in result.trace.iter().enumerate() {
        text.push_str(&format!(
            "  round {i}: [{}, {}] best {} -> {}\n",
            round.interval.0, round.interval.1, round.best_param, round.best_value
        ));
        rows.push(vec![
            i.to_string(),
            round.interval.0.to_string(),
            round.interval.1.to_string(),
            round.best_param.to_string(),
            round.best_value.to_string(),
        ]);
    }
    body.insert("spec".into(), serde_json::to_value(&spec)?);
    body.insert("result".into(), serde_json::to_value(&result)?);
    Ok(Report {
        command: "search",
        mode: ScalarMode::Float.as_str(),
        tolerance: cli.tolerance,
        body,
        csv_header: vec!["round", "lo", "hi", "bestParam", "bestValue"],
        csv_rows: rows,
        text,
    })
}

fn direction_word(d: Direction) -> &'static str {
    match d {
        Direction::Maximize => "maximize",
        Direction::Minimize => "minimize",
    }
}

fn run_suite(cli: &Cli) -> (Report, bool) {
    let cfg = SuiteConfig {
        seed: cli.seed,
        tolerance: cli.tolerance,
    };
    let report = suite::run(&cfg);
    let mut text = String::new();
    let mut rows = Vec::new();
    for c in &report.criteria {
        text.push_str(&format!(
            "criterion {:>2} [{}] {}\n",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.title
        ));
        rows.push(vec![
            c.id.to_string(),
            c.title.to_string(),
            c.pass.to_string(),
        ]);
    }
    text.push_str(&format!(
        "smallest observed |G2|-|G1| over class-S samples: {}\n",
        report.best_observed_s_difference_minimum
    ));
    let ok = report.passed();
    let mut body = Map::new();
    body.insert("seed".into(), json!(report.seed));
    body.insert("modesUsed".into(), json!(["exact", "float"]));
    body.insert("passed".into(), json!(ok));
    body.insert(
        "criteria".into(),
        serde_json::to_value(&report.criteria).unwrap_or(Value::Null),
    );
    body.insert(
        "bestObservedSDifferenceMinimum".into(),
        json!(report.best_observed_s_difference_minimum),
    );
    (
        Report {
            command: "suite",
            mode: ScalarMode::Float.as_str(),
            tolerance: cli.tolerance,
            body,
            csv_header: vec!["criterion", "title", "pass"],
            csv_rows: rows,
            text,
        },
        ok,
    )
}
