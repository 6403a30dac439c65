use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use legrack::census::{
    census_counts_from, census_csv, census_mismatches, enumerate_racks_with, export_rack_set,
    import_rack_set, RackFamily,
};
use legrack::coloring::{
    count_colorings, count_colorings_brute_force, verify_indistinguishability, VerifyInput,
};
use legrack::fourleg::{classify_structures, FourLegRack};
use legrack::front::{
    builtin_fixtures, classical_invariants, fundamental_presentation, parse_fixture, Fixture,
};
use legrack::{Exec, Permutation};

/// Exit status when `verify` or `census --check` finds a disagreement.
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "legrack",
    version,
    about = "Racks, 4-Legendrian structures and front colorings"
)]
struct Cli {
    #[command(flatten)]
    run: RunOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "LEGRACK_THREADS", default_value_t = 0)]
    threads: usize,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Omit the timestamp line from report headers.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Counts racks and 4-Legendrian structure classes per order and family.
    Census {
        #[arg(long)]
        max_order: usize,
        /// Restrict output to one family.
        #[arg(long)]
        family: Option<RackFamily>,
        /// Also write the rack representatives of each order to this directory.
        #[arg(long)]
        export_racks: Option<PathBuf>,
        /// Read the racks of order N from DIR/orderN.racks instead of searching.
        #[arg(long)]
        import_racks: Option<PathBuf>,
        /// Compare against the known counts and fail on disagreement.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lists the structure classes of every rack in a rack file.
    Classify {
        #[arg(long)]
        rack: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prints the classical invariants of a front.
    Invariants {
        #[arg(long)]
        front: PathBuf,
    },
    /// Prints the generators and relations of a front's fundamental rack.
    Presentation {
        #[arg(long)]
        front: PathBuf,
    },
    /// Counts colorings of a front by a rack with cusp maps `ul`, `ur`.
    Colorings {
        #[arg(long)]
        front: PathBuf,
        #[arg(long)]
        rack: PathBuf,
        /// Cycle notation, e.g. "(0 1)(2 3)"; "()" is the identity.
        #[arg(long, default_value = "()")]
        ul: String,
        #[arg(long, default_value = "()")]
        ur: String,
        /// Scan every assignment instead of propagating.
        #[arg(long)]
        brute_force: bool,
    },
    /// Checks that fronts with equal classical invariants get equal counts
    /// from every 4-Legendrian permutation rack up to the given order.
    Verify {
        /// Directory of `.front` files.
        #[arg(long)]
        fronts: PathBuf,
        #[arg(long)]
        max_order: usize,
        /// Skip the comparison with the closed-form count.
        #[arg(long)]
        no_fast_check: bool,
        /// Per-structure CSV report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the built-in front fixtures as `.front` files.
    Fixtures {
        #[arg(long)]
        out: PathBuf,
    },
}

fn header(opts: &RunOpts, config: &str) -> String {
    let mut h = format!("# legrack {} {config}\n", env!("CARGO_PKG_VERSION"));
    if !opts.no_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        h.push_str(&format!("# generated_unix={secs}\n"));
    }
    h
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_fixture(path: &Path) -> Result<Fixture> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut f = parse_fixture(&text).with_context(|| format!("parsing {}", path.display()))?;
    if f.name.is_empty() {
        f.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(f)
}

fn configure_threads(opts: &RunOpts) -> Result<Exec> {
    if opts.sequential {
        return Ok(Exec::Sequential);
    }
    #[cfg(feature = "parallel")]
    if opts.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    Ok(Exec::Parallel)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = configure_threads(&cli.run)?;
    let opts = &cli.run;
    match cli.command {
        Command::Census {
            max_order,
            family,
            export_racks,
            import_racks,
            check,
            out,
        } => {
            let mut rows = Vec::new();
            for n in 0..=max_order {
                let racks = match &import_racks {
                    Some(dir) => import_rack_set(&dir.join(format!("order{n}.racks")))?,
                    None => enumerate_racks_with(n, exec)?,
                };
                if let Some(dir) = &export_racks {
                    fs::create_dir_all(dir)?;
                    export_rack_set(&racks, &dir.join(format!("order{n}.racks")))?;
                }
                rows.extend(census_counts_from(n, &racks, exec));
            }
            if let Some(f) = family {
                rows.retain(|r| r.family == f);
            }
            let config = format!(
                "command=census max_order={max_order} family={}",
                family.map_or("all", |f| f.name())
            );
            emit(
                out.as_deref(),
                &(header(opts, &config) + &census_csv(&rows)),
            )?;
            if check {
                let bad = census_mismatches(&rows);
                for (row, want) in &bad {
                    eprintln!(
                        "mismatch: order {} {}: {} structure classes, expected {want}",
                        row.order,
                        row.family.name(),
                        row.structure_count
                    );
                }
                if !bad.is_empty() {
                    return Ok(ExitCode::from(EXIT_VIOLATION));
                }
            }
        }
        Command::Classify { rack, out } => {
            let racks = import_rack_set(&rack)?;
            let classes = exec.map(&racks, classify_structures);
            let mut text = header(opts, &format!("command=classify rack={}", rack.display()));
            text.push_str("rack_id,class_index,ul,ur,orbit_size\n");
            for (i, c) in classes.iter().enumerate() {
                for (k, cls) in c.classes.iter().enumerate() {
                    text.push_str(&format!(
                        "{i},{k},{},{},{}\n",
                        cls.ul, cls.ur, cls.orbit_size
                    ));
                }
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Invariants { front } => {
            let f = read_fixture(&front)?;
            println!("{}", classical_invariants(&f.code));
        }
        Command::Presentation { front } => {
            let f = read_fixture(&front)?;
            print!("{}", fundamental_presentation(&f.code));
        }
        Command::Colorings {
            front,
            rack,
            ul,
            ur,
            brute_force,
        } => {
            let f = read_fixture(&front)?;
            let racks = import_rack_set(&rack)?;
            let [table] = <[_; 1]>::try_from(racks).map_err(|r| {
                anyhow::anyhow!("{} holds {} racks, expected 1", rack.display(), r.len())
            })?;
            let n = table.order();
            let ul = Permutation::parse_cycles(&ul, n).context("parsing --ul")?;
            let ur = Permutation::parse_cycles(&ur, n).context("parsing --ur")?;
            let x = FourLegRack::new(table, ul, ur)?;
            let p = fundamental_presentation(&f.code);
            let count = if brute_force {
                count_colorings_brute_force(&p, &x)
            } else {
                count_colorings(&p, &x)
            };
            println!("{count}");
        }
        Command::Verify {
            fronts,
            max_order,
            no_fast_check,
            out,
        } => {
            let mut paths: Vec<PathBuf> = fs::read_dir(&fronts)
                .with_context(|| format!("reading {}", fronts.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "front"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                bail!("no .front files in {}", fronts.display());
            }
            let fixtures = paths
                .iter()
                .map(|p| read_fixture(p))
                .collect::<Result<Vec<_>>>()?;
            let inputs: Vec<VerifyInput> = fixtures
                .iter()
                .map(|f| (f.name.as_str(), f.knot.as_deref(), &f.code))
                .collect();
            let report = verify_indistinguishability(&inputs, max_order, !no_fast_check, exec);
            let config = format!(
                "command=verify fronts={} max_order={max_order} fast_check={}",
                fronts.display(),
                !no_fast_check
            );
            let head = header(opts, &config);
            if let Some(path) = &out {
                emit(Some(path), &(head.clone() + &report.csv()))?;
            }
            print!("{head}{}", report.summary());
            for v in report.violations.iter().take(20) {
                let counts: Vec<String> =
                    v.counts.iter().map(|(c, n)| format!("{c}={n}")).collect();
                println!(
                    "violation tb={} rot={} rack={} ul={} ur={} {}",
                    v.tb,
                    v.rot,
                    v.rack_id,
                    v.ul,
                    v.ur,
                    counts.join(" ")
                );
            }
            for m in report.fast_mismatches.iter().take(20) {
                println!(
                    "fast-path mismatch code={} rack={} ul={} ur={} generic={} fast={}",
                    m.code, m.rack_id, m.ul, m.ur, m.generic, m.fast
                );
            }
            if !report.passed() {
                return Ok(ExitCode::from(EXIT_VIOLATION));
            }
        }
        Command::Fixtures { out } => {
            fs::create_dir_all(&out)?;
            for f in builtin_fixtures() {
                let path = out.join(format!("{}.front", f.name));
                fs::write(&path, f.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
