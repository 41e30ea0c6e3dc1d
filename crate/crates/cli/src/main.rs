use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use hamdec_core::classic::{bipartite_hamilton_decompose, walecki_decompose};
use hamdec_core::graph::{multigraph_to_dot, verify_hamilton_cycle, ClusterCycle, Multigraph, PartitionMode};
use hamdec_core::pipeline::{
    check_hypotheses, decompose, generate_instance, verify_certificate, DecompositionCertificate, Instance,
    InstanceConfig, PipelineParams,
};

const SEED_VAR: &str = "HAMDEC_SEED";

#[derive(Parser)]
#[command(name = "hamdec", version, about = "Approximate Hamilton decompositions with exceptional systems")]
struct Cli {
    /// Worker threads for parallel stages; defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    TwoCliques,
    Bipartite,
}

impl From<Mode> for PartitionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::TwoCliques => PartitionMode::TwoCliques,
            Mode::Bipartite => PartitionMode::Bipartite,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance and write it as JSON.
    Gen {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// JSON object overriding fields of the instance configuration.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decompose an instance and write the certificate as JSON.
    Decompose {
        instance: PathBuf,
        /// JSON object overriding fields of the run parameters.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Drop unused edges outside the dense core before decomposing.
        #[arg(long)]
        trim: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate against its instance; exit code 1 on failure.
    Verify {
        instance: PathBuf,
        certificate: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check the hypotheses of an instance without decomposing it.
    Check { instance: PathBuf },
    /// Run the built-in invariant suites.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Write the graph of an instance, or one slot of a certificate, as DOT.
    ExportDot {
        instance: PathBuf,
        #[arg(long, requires = "slot")]
        certificate: Option<PathBuf>,
        #[arg(long)]
        slot: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_VAR) {
        Ok(s) => Ok(Some(s.trim().parse().with_context(|| format!("{SEED_VAR}={s} is not a u64"))?)),
        Err(_) => Ok(None),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Applies the keys of a JSON object file on top of `base`.
fn overlay<T: serde::Serialize + serde::de::DeserializeOwned>(base: &T, file: Option<&Path>) -> Result<T> {
    let Some(path) = file else {
        return Ok(serde_json::from_value(serde_json::to_value(base)?)?);
    };
    let mut merged = serde_json::to_value(base)?;
    let Value::Object(patch) = read_json::<Value>(path)? else {
        bail!("{} must hold a JSON object", path.display());
    };
    merged.as_object_mut().expect("structs serialize to objects").extend(patch);
    serde_json::from_value(merged).with_context(|| format!("applying {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let inst: Instance = read_json(path)?;
    inst.check_schema()?;
    Ok(inst)
}

fn gen(mode: Mode, k: Option<usize>, m: Option<usize>, seed: Option<u64>, params: Option<&Path>) -> Result<Instance> {
    let mode = PartitionMode::from(mode);
    let (dk, dm) = match mode {
        PartitionMode::Bipartite => (4, 40),
        _ => (5, 40),
    };
    let base = InstanceConfig::for_mode(mode, k.unwrap_or(dk), m.unwrap_or(dm), seed.unwrap_or(0))?;
    let mut cfg: InstanceConfig = overlay(&base, params)?;
    if let Some(s) = env_seed()? {
        cfg.seed = s;
    }
    Ok(generate_instance(&cfg)?)
}

fn run_params(inst: &Instance, params: Option<&Path>, seed: Option<u64>, trim: bool) -> Result<PipelineParams> {
    let mut p: PipelineParams = overlay(&PipelineParams::from_config(&inst.config), params)?;
    if let Some(s) = seed {
        p.seed = s;
    }
    if let Some(s) = env_seed()? {
        p.seed = s;
    }
    p.trim |= trim;
    Ok(p)
}

fn suite_line(name: &str, ok: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn decomposes_complete(cycles: &[ClusterCycle], vertices: usize, complete: &Multigraph) -> bool {
    let all: Vec<usize> = (0..vertices).collect();
    let mut union = Multigraph::new(vertices);
    for c in cycles {
        let Ok(g) = Multigraph::from_edges(vertices, c.edges()) else {
            return false;
        };
        if !verify_hamilton_cycle(&g, &all) {
            return false;
        }
        union = union.sum(&g);
    }
    union.is_submultigraph_of(complete) && complete.is_submultigraph_of(&union)
}

fn selftest(seed: u64) -> Result<bool> {
    let mut ok = true;

    let walecki = (3..=21).step_by(2).all(|k| {
        let complete = Multigraph::from_edges(k, (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v)))).unwrap();
        walecki_decompose(k).is_ok_and(|c| c.len() == (k - 1) / 2 && decomposes_complete(&c, k, &complete))
    });
    ok &= suite_line("walecki", walecki, "odd K from 3 to 21".into());

    let bipartite = (2..=20).step_by(2).all(|k| {
        let complete = Multigraph::from_edges(2 * k, (0..k).flat_map(|u| (k..2 * k).map(move |v| (u, v)))).unwrap();
        bipartite_hamilton_decompose(k).is_ok_and(|c| c.len() == k / 2 && decomposes_complete(&c, 2 * k, &complete))
    });
    ok &= suite_line("bipartite-cycles", bipartite, "even K from 2 to 20".into());

    for cfg in [
        InstanceConfig { eps0: 0.02, ..InstanceConfig::two_cliques(3, 40, seed) },
        InstanceConfig { eps0: 0.04, ..InstanceConfig::bipartite(2, 30, seed) },
    ] {
        let name = format!("{:?} K={} m={}", cfg.mode, cfg.k, cfg.m);
        let inst = generate_instance(&cfg)?;
        let params = PipelineParams::from_config(&cfg);
        let hyp = check_hypotheses(&inst, &params);
        ok &= suite_line(&format!("{name} hypotheses"), hyp.holds(), format!("{} checks", hyp.checks.len()));
        match decompose(&inst, &params) {
            Ok(cert) => {
                let again = verify_certificate(&inst, &cert);
                let good = again.passed() && again == cert.verdicts;
                ok &= suite_line(
                    &format!("{name} decomposition"),
                    good,
                    format!("{} slots, coverage {:.3}", cert.slots.len(), again.coverage),
                );
                let repeat = decompose(&inst, &params)?;
                ok &= suite_line(
                    &format!("{name} determinism"),
                    repeat.to_json() == cert.to_json(),
                    "two runs compared byte for byte".into(),
                );
            }
            Err(e) => ok &= suite_line(&format!("{name} decomposition"), false, e.to_string()),
        }
    }
    Ok(ok)
}

fn export_dot(inst: &Instance, cert: Option<&DecompositionCertificate>, slot: Option<usize>) -> Result<String> {
    let n = inst.partition.n();
    let g = match (cert, slot) {
        (Some(c), Some(i)) => {
            let rec = c.slots.get(i).with_context(|| format!("certificate has {} slots", c.slots.len()))?;
            Multigraph::from_edges(n, rec.edges.iter().copied())?
        }
        _ => inst.graph()?,
    };
    Ok(multigraph_to_dot(&g, Some(&inst.partition)))
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    match cli.command {
        Command::Gen { mode, k, m, seed, params, out } => {
            let inst = gen(mode, k, m, seed, params.as_deref())?;
            emit(&serde_json::to_string(&inst)?, out.as_deref())?;
        }
        Command::Decompose { instance, params, seed, trim, out } => {
            let inst = load_instance(&instance)?;
            let p = run_params(&inst, params.as_deref(), seed, trim)?;
            let cert = decompose(&inst, &p)?;
            emit(&cert.to_json(), out.as_deref())?;
            if !cert.verdicts.passed() {
                eprintln!("certificate failed verification: {}", cert.verdicts.failures.join("; "));
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Verify { instance, certificate, out } => {
            let inst = load_instance(&instance)?;
            let cert: DecompositionCertificate = read_json(&certificate)?;
            let report = verify_certificate(&inst, &cert);
            emit(&serde_json::to_string_pretty(&report)?, out.as_deref())?;
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Check { instance } => {
            let inst = load_instance(&instance)?;
            let report = check_hypotheses(&inst, &PipelineParams::from_config(&inst.config));
            for c in &report.checks {
                println!("{} {}: {}", if c.holds { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            if !report.holds() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Selftest { seed } => {
            if !selftest(seed)? {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::ExportDot { instance, certificate, slot, out } => {
            let inst = load_instance(&instance)?;
            let cert = certificate.as_deref().map(read_json::<DecompositionCertificate>).transpose()?;
            emit(&export_dot(&inst, cert.as_ref(), slot)?, out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
