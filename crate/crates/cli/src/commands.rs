//! Subcommand implementations and the exit-code contract.

use crate::report::{ConfigEcho, Constants, ExtendReport, LoopDescription, RunContext, RunReport};
use crate::{Command, ConfigArgs, LoopArgs, ModelArgs, ModelsCommand};
use frameloop::extension::{build_extension, default_anchors, verify_extension, BoundaryData};
use frameloop::linalg::axis_angle;
use frameloop::models::{builtin, format_model, format_real, parse_model, HamiltonianModel, BUILTINS};
use frameloop::topology::{classify_with_transport, reduce_so4, verdict_from_transport};
use frameloop::transport::{transport, LoopSpec, TransportConfig, TransportResult};
use frameloop::Error;
use serde::Serialize;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_GAP_COLLAPSE: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_REFINEMENT: u8 = 4;
pub const EXIT_NOT_TRIVIAL: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    /// Errors raised while reading model or loop files.
    fn input(e: Error) -> Self {
        Self::new(EXIT_PARSE, e.to_string())
    }
}

/// Errors raised during computation.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GapCollapse { .. } => EXIT_GAP_COLLAPSE,
            Error::RefinementExhausted { .. } => EXIT_REFINEMENT,
            Error::NotTrivial => EXIT_NOT_TRIVIAL,
            Error::Syntax { .. } | Error::Asymmetry { .. } => EXIT_PARSE,
            _ => EXIT_OTHER,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::new(EXIT_OTHER, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::new(EXIT_OTHER, format!("cannot write {}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::new(EXIT_OTHER, e.to_string()))
}

fn load_model(args: &ModelArgs) -> CliResult<HamiltonianModel> {
    match (&args.builtin, &args.model_file) {
        (Some(name), _) => Ok(builtin(name, args.k, args.g, args.coupling)?),
        (None, Some(path)) => parse_model(&read(path)?).map_err(CliError::input),
        (None, None) => Err(CliError::new(EXIT_OTHER, "either --builtin or --model-file is required")),
    }
}

fn load_loops(args: &LoopArgs, d: usize) -> CliResult<Vec<(LoopDescription, LoopSpec)>> {
    if let Some(radius) = args.circle {
        let lp = LoopSpec::circle(d, radius, args.samples)?;
        let desc = LoopDescription::Circle { radius, samples: args.samples };
        return Ok(vec![(desc, lp)]);
    }
    args.loop_file
        .iter()
        .map(|path| {
            let lp = LoopSpec::parse(&read(path)?).map_err(CliError::input)?;
            if lp.dim() != d {
                return Err(CliError::new(
                    EXIT_PARSE,
                    format!("{} has {} parameters but the model takes {d}", path.display(), lp.dim()),
                ));
            }
            let desc = LoopDescription::File { path: path.display().to_string(), samples: lp.len() };
            Ok((desc, lp))
        })
        .collect()
}

fn load_config(args: &ConfigArgs) -> CliResult<TransportConfig> {
    let cfg = TransportConfig {
        overlap_floor: args.overlap_floor,
        max_refinement_depth: args.max_depth,
        gap_floor: args.gap_floor,
    };
    cfg.validate()?;
    Ok(cfg)
}

struct Input {
    model: HamiltonianModel,
    loops: Vec<(LoopDescription, LoopSpec)>,
    config: TransportConfig,
}

impl Input {
    fn load(model: &ModelArgs, loops: &LoopArgs, config: &ConfigArgs) -> CliResult<Self> {
        let config = load_config(config)?;
        let model = load_model(model)?;
        let loops = load_loops(loops, model.dim_params())?;
        Ok(Self { model, loops, config })
    }

    /// The only loop, for commands that take exactly one.
    fn single(&self) -> CliResult<&(LoopDescription, LoopSpec)> {
        match self.loops.as_slice() {
            [one] => Ok(one),
            _ => Err(CliError::new(EXIT_OTHER, "this command takes exactly one loop")),
        }
    }

    fn context(&self, desc: &LoopDescription) -> RunContext {
        RunContext {
            model: self.model.name().to_string(),
            constants: Constants(self.model.constants()),
            loop_desc: desc.clone(),
            n: self.model.dim_matrix(),
            d: self.model.dim_params(),
            config: ConfigEcho::from(&self.config),
        }
    }

    fn transport(&self, lp: &LoopSpec) -> CliResult<TransportResult> {
        Ok(transport(&self.model, lp, &self.config)?)
    }
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Classify { model, loops, config, jobs } => classify(&Input::load(&model, &loops, &config)?, jobs),
        Command::Figure { model, loops, config, output } => {
            figure(&Input::load(&model, &loops, &config)?, output.as_deref())
        }
        Command::Transport { model, loops, config, output } => {
            transport_trace(&Input::load(&model, &loops, &config)?, output.as_deref())
        }
        Command::Extend { model, loops, config, anchors, rho_slices, output, report } => extend(
            &Input::load(&model, &loops, &config)?,
            anchors,
            rho_slices,
            &output,
            report.as_deref(),
        ),
        Command::Models { action: ModelsCommand::List } => {
            print!("{}", models_table());
            Ok(())
        }
        Command::Models { action: ModelsCommand::Check { path } } => {
            let model = parse_model(&read(&path)?).map_err(CliError::input)?;
            print!("{}", format_model(&model).unwrap_or_default());
            Ok(())
        }
    }
}

fn classify_one(input: &Input, desc: &LoopDescription, lp: &LoopSpec) -> CliResult<RunReport> {
    let start = Instant::now();
    let (verdict, _) = classify_with_transport(&input.model, lp, &input.config)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunReport::new(input.context(desc), &verdict, ms))
}

/// Classifies every loop, on up to `jobs` threads, keeping input order. The
/// first failing loop (in input order) decides the exit code.
fn classify(input: &Input, jobs: usize) -> CliResult<()> {
    let count = input.loops.len();
    let results: Vec<Mutex<Option<CliResult<RunReport>>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, count.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let (desc, lp) = &input.loops[i];
                let r = classify_one(input, desc, lp);
                *results[i].lock().expect("no worker panics") = Some(r);
            });
        }
    });
    let reports = results
        .into_iter()
        .map(|m| m.into_inner().expect("no worker panics").expect("every loop was processed"))
        .collect::<CliResult<Vec<_>>>()?;
    let text = match reports.as_slice() {
        [one] => print_json(one)?,
        many => print_json(&many)?,
    };
    print!("{text}");
    Ok(())
}

fn figure(input: &Input, output: Option<&Path>) -> CliResult<()> {
    let (_, lp) = input.single()?;
    let r = input.transport(lp)?;
    let frames = match r.dim() {
        3 => r.frames.clone(),
        4 => reduce_so4(&r.frames)?,
        n => return Err(CliError::new(EXIT_OTHER, format!("figure needs n = 3 or 4, the model has n = {n}"))),
    };
    let mut csv = String::from("theta,phi,v1,v2,v3\n");
    for (t, f) in r.ts.iter().zip(&frames) {
        let a = axis_angle(f)?;
        let fields = [*t, a.phi, a.axis[0], a.axis[1], a.axis[2]];
        csv.push_str(&join(&fields));
    }
    emit(output, &csv)
}

fn join(values: &[f64]) -> String {
    // adding zero turns -0 into 0
    let mut line = values.iter().map(|v| format_real(v + 0.0)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

fn transport_trace(input: &Input, output: Option<&Path>) -> CliResult<()> {
    let (_, lp) = input.single()?;
    let r = input.transport(lp)?;
    let n = r.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("lambda_{i}")));
    for i in 1..=n {
        header.extend((1..=n).map(|j| format!("f_{i}_{j}")));
    }
    header.push("min_overlap".into());
    let mut csv = header.join(",") + "\n";
    for (k, t) in r.ts.iter().enumerate() {
        let mut row = vec![*t];
        row.extend(&r.eigenvalues[k]);
        row.extend(r.frames[k].as_slice());
        // overlap of each frame with its predecessor; the first frame with itself
        row.push(if k == 0 { 1.0 } else { r.step_overlaps[k - 1] });
        csv.push_str(&join(&row));
    }
    emit(output, &csv)?;
    let summary = format!(
        "D = {}\nmin_gap = {}\nsamples = {}\nrefinements = {}\n",
        r.sign,
        format_real(r.min_gap),
        r.frames.len(),
        r.refinements
    );
    if output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

fn extend(
    input: &Input,
    anchors: Option<Vec<f64>>,
    rho_slices: usize,
    output: &Path,
    report: Option<&Path>,
) -> CliResult<()> {
    let (desc, lp) = input.single()?;
    let r = input.transport(lp)?;
    let verdict = verdict_from_transport(&r)?;
    if verdict.degeneracy_implied {
        return Err(CliError::new(
            EXIT_NOT_TRIVIAL,
            format!(
                "the loop encloses a degeneracy (evidence {}); no gap-open extension exists",
                verdict.evidence.as_str()
            ),
        ));
    }
    let boundary = BoundaryData::from_transport(&r)?;
    let anchors = anchors.unwrap_or_else(|| default_anchors(boundary.dim()));
    let ext = build_extension(&boundary, &anchors, rho_slices)?;
    write(output, &ext.to_csv())?;
    let rep = verify_extension(&ext, &boundary);
    let doc = ExtendReport::new(
        input.context(desc),
        &rep,
        (rho_slices, boundary.len()),
        anchors,
        output.display().to_string(),
    );
    emit(report, &print_json(&doc)?)
}

fn models_table() -> String {
    let mut out = format!("{:<10} {:>2} {:>2}  {}\n", "name", "n", "d", "constants");
    for (name, n, d) in BUILTINS {
        let model = builtin(name, 1.0, 1.0, 1.0).expect("built-in exists");
        let constants: Vec<&str> = model.constants().iter().map(|(k, _)| *k).collect();
        let constants = if constants.is_empty() { "-".to_string() } else { constants.join(", ") };
        out.push_str(&format!("{name:<10} {n:>2} {d:>2}  {constants}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_normalizes_negative_zero() {
        assert_eq!(join(&[-0.0, 1.5]), "0,1.5\n");
    }

    #[test]
    fn models_table_lists_every_builtin() {
        let table = models_table();
        assert_eq!(table.lines().count(), BUILTINS.len() + 1);
        assert!(table.contains("coupling"));
    }

    #[test]
    fn error_codes_follow_the_contract() {
        assert_eq!(CliError::from(Error::NotTrivial).code, EXIT_NOT_TRIVIAL);
        assert_eq!(CliError::input(Error::NotTrivial).code, EXIT_PARSE);
    }
}
