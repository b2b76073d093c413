//! Command-line front end. `run` parses arguments, executes one command and
//! returns the process exit code: 0 on success, 1 for domain errors (bad
//! grammar, no admissible model, unstable configuration...), 2 for I/O and
//! usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derive::{derive_plan, DerivationLimits};
use crate::emit::{emit_json, emit_xml, load_json, render_svg, BlockMapping, XmlMapping, XmlPreamble};
use crate::enumerate::{count_closed_form, enumerate_levels, RuleSet, RuleSetError};
use crate::fixed::Centi;
use crate::grammar::{parse_grammar, validate_grammar, Grammar};
use crate::layout::{check_support, layout, GeometryConfig, Level, Provenance};
use crate::style::{assign_styles, load_catalog, ModelCatalog, StyleMode};

/// Environment variable naming a default catalog file; `--catalog` wins.
pub const CATALOG_ENV: &str = "BCG_CATALOG";

pub const BATCH_MANIFEST: &str = "manifest.json";

#[derive(Parser, Debug)]
#[command(name = "bcg", version, about = "Building construction grammar toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and check a grammar file
    Validate { grammar: PathBuf },
    /// Derive, style and lay out one level
    Generate {
        grammar: PathBuf,
        #[arg(long, default_value = "chinese")]
        style: StyleMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; each format replaces the extension
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "format", value_enum, default_values_t = [Format::Json])]
        formats: Vec<Format>,
        #[command(flatten)]
        opts: SharedOpts,
    },
    /// Count the styled levels a rule set can produce
    Count {
        ruleset: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// List every styled level of a rule set
    Enumerate {
        ruleset: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Generate N levels round-robin over a rule set's rules
    Batch {
        ruleset: PathBuf,
        #[arg(long, default_value_t = 10)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "format", value_enum, default_values_t = [Format::Json])]
        formats: Vec<Format>,
        /// Worker threads; 0 uses all cores
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        opts: SharedOpts,
    },
    /// Convert a level JSON file to SVG or XML
    Render {
        level: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "format", value_enum, default_values_t = [Format::Svg])]
        formats: Vec<Format>,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        xml_mapping: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Format {
    Json,
    Xml,
    Svg,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Xml => "xml",
            Format::Svg => "svg",
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SharedOpts {
    /// Model catalog JSON (default: $BCG_CATALOG, then the bundled catalog)
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// XML mapping JSON: {"preamble": {...}, "models": {"id": {"type", "material"}}}
    #[arg(long)]
    xml_mapping: Option<PathBuf>,
    #[arg(long)]
    ground_y: Option<f64>,
    #[arg(long)]
    unit_scale: Option<f64>,
    #[arg(long)]
    roof_taper: Option<f64>,
    #[arg(long)]
    overlap_ratio: Option<f64>,
    #[arg(long)]
    max_expansions: Option<usize>,
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    dampening: Option<f64>,
}

/// Fully resolved settings for level generation.
#[derive(Clone, Debug)]
pub struct CliConfig {
    pub catalog: ModelCatalog,
    pub mapping: XmlMapping,
    pub geometry: GeometryConfig,
    pub limits: DerivationLimits,
}

#[derive(Debug)]
enum Failure {
    Domain(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Io(m) => m,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_catalog_opt(path: Option<&Path>) -> Result<ModelCatalog, Failure> {
    let env = std::env::var_os(CATALOG_ENV).map(PathBuf::from);
    match path.map(Path::to_path_buf).or(env) {
        None => Ok(ModelCatalog::bundled()),
        Some(p) => load_catalog(&read(&p)?).map_err(|e| Failure::Domain(format!("{}: {e}", p.display()))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingDoc {
    #[serde(default)]
    preamble: Option<XmlPreamble>,
    #[serde(default)]
    models: BTreeMap<String, BlockMapping>,
}

fn load_mapping(path: Option<&Path>, catalog: &ModelCatalog) -> Result<XmlMapping, Failure> {
    let mut mapping = XmlMapping::from_catalog(catalog);
    if let Some(p) = path {
        let doc: MappingDoc =
            serde_json::from_str(&read(p)?).map_err(|e| Failure::Domain(format!("{}: {e}", p.display())))?;
        if let Some(pre) = doc.preamble {
            mapping.preamble = pre;
        }
        mapping.models.extend(doc.models);
    }
    Ok(mapping)
}

impl SharedOpts {
    fn resolve(&self) -> Result<CliConfig, Failure> {
        let catalog = load_catalog_opt(self.catalog.as_deref())?;
        let mapping = load_mapping(self.xml_mapping.as_deref(), &catalog)?;
        let mut geometry = GeometryConfig::default();
        if let Some(v) = self.ground_y {
            geometry.ground_y =
                Centi::from_f64(v).ok_or_else(|| Failure::Domain(format!("ground-y {v} out of range")))?;
        }
        if let Some(v) = self.unit_scale {
            geometry.unit_scale = v;
        }
        if let Some(v) = self.roof_taper {
            geometry.roof_taper = v;
        }
        if let Some(v) = self.overlap_ratio {
            geometry.overlap_ratio = v;
        }
        geometry.validate().map_err(domain)?;
        let mut limits = DerivationLimits::default();
        if let Some(v) = self.max_expansions {
            limits.max_expansions = v;
        }
        if let Some(v) = self.max_length {
            limits.max_sequence_length = v;
        }
        if let Some(v) = self.dampening {
            limits.recursion_dampening = v;
        }
        limits.validate().map_err(domain)?;
        Ok(CliConfig {
            catalog,
            mapping,
            geometry,
            limits,
        })
    }
}

fn load_grammar(path: &Path) -> Result<Grammar, Failure> {
    let text = read(path)?;
    let g = parse_grammar(&text).map_err(|e| Failure::Domain(format!("{}:{e}", path.display())))?;
    if let Some(d) = validate_grammar(&g).into_iter().find(|d| d.is_error()) {
        return Err(Failure::Domain(format!("{}: {d}", path.display())));
    }
    Ok(g)
}

fn load_ruleset(dir: &Path) -> Result<RuleSet, Failure> {
    RuleSet::load_dir(dir).map_err(|e: RuleSetError| {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    })
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Derive, style and lay out one level.
pub fn build_level(
    g: &Grammar,
    source: &str,
    seed: u64,
    mode: StyleMode,
    cfg: &CliConfig,
) -> Result<Level, String> {
    let plan = derive_plan(g, seed, &cfg.limits).map_err(|e| e.to_string())?;
    let a = assign_styles(&plan, &cfg.catalog, mode, seed).map_err(|e| e.to_string())?;
    let prov = Provenance {
        source: source.to_string(),
        seed,
        mode,
        catalog: cfg.catalog.name.clone(),
    };
    layout(&plan, &a, &cfg.geometry, prov).map_err(|e| e.to_string())
}

fn encode(level: &Level, f: Format, cfg: &CliConfig) -> Result<Vec<u8>, String> {
    match f {
        Format::Json => Ok(emit_json(level)),
        Format::Xml => emit_xml(level, &cfg.mapping).map_err(|e| e.to_string()),
        Format::Svg => render_svg(level, &cfg.catalog).map_err(|e| e.to_string()),
    }
}

fn dedup(formats: &[Format]) -> Vec<Format> {
    let mut v = formats.to_vec();
    v.sort();
    v.dedup();
    v
}

fn cmd_validate(path: &Path, _out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let text = read(path)?;
    let p = path.display();
    let g = match parse_grammar(&text) {
        Ok(g) => g,
        Err(e) => {
            match e.pos() {
                Some(_) => writeln!(err, "{p}:{e}").ok(),
                None => writeln!(err, "{p}: {e}").ok(),
            };
            return Err(Failure::Domain(String::new()));
        }
    };
    let diags = validate_grammar(&g);
    for d in &diags {
        match d.pos {
            Some(pos) => writeln!(err, "{p}:{pos}: {d}").ok(),
            None => writeln!(err, "{p}: {d}").ok(),
        };
    }
    if diags.iter().any(|d| d.is_error()) {
        Err(Failure::Domain(String::new()))
    } else {
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    grammar: &Path,
    style: StyleMode,
    seed: u64,
    out_path: &Path,
    formats: &[Format],
    opts: &SharedOpts,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let cfg = opts.resolve()?;
    let g = load_grammar(grammar)?;
    let level = build_level(&g, &file_label(grammar), seed, style, &cfg).map_err(Failure::Domain)?;
    let mut files = Vec::new();
    for f in dedup(formats) {
        files.push((out_path.with_extension(f.ext()), encode(&level, f, &cfg).map_err(Failure::Domain)?));
    }
    for (path, bytes) in files {
        write(&path, &bytes)?;
        writeln!(out, "{}", path.display()).ok();
    }
    Ok(())
}

fn cmd_count(dir: &Path, catalog: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let catalog = load_catalog_opt(catalog)?;
    let rs = load_ruleset(dir)?;
    let count = count_closed_form(&rs, &catalog).map_err(domain)?;
    writeln!(out, "rule set: {} (mode {}, catalog {})", rs.name, rs.mode.as_str(), catalog.name).ok();
    for (id, n) in &count.per_rule {
        writeln!(out, "  {id}: {n}").ok();
    }
    writeln!(out, "computed total: {}", count.total).ok();
    match rs.reference_total {
        Some(r) => {
            writeln!(out, "reference total: {r}").ok();
            let marker = if r == count.total { "MATCHES" } else { "DIVERGES" };
            writeln!(out, "{marker}: computed {} vs reference {r}", count.total).ok();
        }
        None => {
            writeln!(out, "reference total: none").ok();
        }
    }
    Ok(())
}

fn cmd_enumerate(dir: &Path, cap: usize, catalog: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let catalog = load_catalog_opt(catalog)?;
    let rs = load_ruleset(dir)?;
    for item in enumerate_levels(&rs, &catalog, cap) {
        let (rule, a) = item.map_err(domain)?;
        writeln!(out, "{rule}\t{}", a.summary()).ok();
    }
    Ok(())
}

#[derive(Serialize)]
struct BatchEntry {
    file: String,
    rule: String,
    seed: u64,
    stable: bool,
}

#[derive(Serialize)]
struct BatchManifest {
    ruleset: String,
    mode: StyleMode,
    seed: u64,
    n: u64,
    levels: Vec<BatchEntry>,
}

struct BatchItem {
    entry: BatchEntry,
    files: Vec<(String, Vec<u8>)>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_batch(
    dir: &Path,
    n: u64,
    seed: u64,
    out_dir: &Path,
    formats: &[Format],
    jobs: usize,
    opts: &SharedOpts,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let cfg = opts.resolve()?;
    let rs = load_ruleset(dir)?;
    let formats = dedup(formats);
    let width = n.saturating_sub(1).to_string().len().max(4);
    let one = |i: u64| -> Result<BatchItem, String> {
        let rule = &rs.rules[(i % rs.rules.len() as u64) as usize];
        let s = seed.wrapping_add(i);
        let source = rule.file.clone().unwrap_or_else(|| rule.id.clone());
        let level = build_level(&rule.grammar, &source, s, rs.mode, &cfg).map_err(|e| format!("{}: {e}", rule.id))?;
        let stable = check_support(&level, &cfg.geometry).stable;
        let stem = format!("level_{i:0width$}");
        let mut files = Vec::new();
        for &f in &formats {
            files.push((format!("{stem}.{}", f.ext()), encode(&level, f, &cfg)?));
        }
        Ok(BatchItem {
            entry: BatchEntry {
                file: files[0].0.clone(),
                rule: rule.id.clone(),
                seed: s,
                stable,
            },
            files,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Io(e.to_string()))?;
    let items: Vec<BatchItem> = pool
        .install(|| (0..n).into_par_iter().map(one).collect::<Result<_, _>>())
        .map_err(Failure::Domain)?;

    fs::create_dir_all(out_dir).map_err(|e| Failure::Io(format!("{}: {e}", out_dir.display())))?;
    let mut levels = Vec::with_capacity(items.len());
    for item in items {
        for (name, bytes) in &item.files {
            write(&out_dir.join(name), bytes)?;
        }
        levels.push(item.entry);
    }
    let unstable = levels.iter().filter(|e| !e.stable).count();
    let manifest = BatchManifest {
        ruleset: rs.name.clone(),
        mode: rs.mode,
        seed,
        n,
        levels,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    let mpath = out_dir.join(BATCH_MANIFEST);
    write(&mpath, &bytes)?;
    writeln!(out, "{n} levels ({unstable} unstable) -> {}", mpath.display()).ok();
    Ok(())
}

fn cmd_render(
    level_path: &Path,
    out_path: &Path,
    formats: &[Format],
    catalog: Option<&Path>,
    xml_mapping: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let catalog = load_catalog_opt(catalog)?;
    let mapping = load_mapping(xml_mapping, &catalog)?;
    let bytes = fs::read(level_path).map_err(|e| Failure::Io(format!("{}: {e}", level_path.display())))?;
    let level = load_json(&bytes).map_err(|e| Failure::Domain(format!("{}: {e}", level_path.display())))?;
    let cfg = CliConfig {
        catalog,
        mapping,
        geometry: GeometryConfig::default(),
        limits: DerivationLimits::default(),
    };
    for f in dedup(formats) {
        let path = out_path.with_extension(f.ext());
        write(&path, &encode(&level, f, &cfg).map_err(Failure::Domain)?)?;
        writeln!(out, "{}", path.display()).ok();
    }
    Ok(())
}

/// Runs one command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                write!(err, "{text}").ok();
            } else {
                write!(out, "{text}").ok();
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Validate { grammar } => cmd_validate(grammar, out, err),
        Command::Generate {
            grammar,
            style,
            seed,
            out: path,
            formats,
            opts,
        } => cmd_generate(grammar, *style, *seed, path, formats, opts, out),
        Command::Count { ruleset, catalog } => cmd_count(ruleset, catalog.as_deref(), out),
        Command::Enumerate { ruleset, cap, catalog } => cmd_enumerate(ruleset, *cap, catalog.as_deref(), out),
        Command::Batch {
            ruleset,
            n,
            seed,
            out: dir,
            formats,
            jobs,
            opts,
        } => cmd_batch(ruleset, *n, *seed, dir, formats, *jobs, opts, out),
        Command::Render {
            level,
            out: path,
            formats,
            catalog,
            xml_mapping,
        } => cmd_render(level, path, formats, catalog.as_deref(), xml_mapping.as_deref(), out),
    };
    out.flush().ok();
    match result {
        Ok(()) => 0,
        Err(f) => {
            if !f.message().is_empty() {
                writeln!(err, "error: {}", f.message()).ok();
            }
            f.code()
        }
    }
}
