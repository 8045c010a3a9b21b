//! Subcommand bodies. Each one loads and validates its inputs, computes every
//! output in memory, and only then creates the output directory and files.

use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::json;

use metldpc::analysis::{mc_density_evolution, pexit_run, EdgeDensitySchedule};
use metldpc::channel::{run_fer, write_results_csv, ChannelParams, DecoderKind, SimConfig};
use metldpc::code::{code_stats, lift_protograph, parse_protograph, read_code_csv, write_code_csv, LiftOptions, Protograph};
use metldpc::decoder::{BpDecoder, CheckRule, DecodeOptions};
use metldpc::lut::{
    build_raw_lut, compress_lut, heatmap_rows, read_lut, write_heatmap_csv, write_lut, write_lut_csv, GridPolicy,
    NormalizationMode,
};

use crate::manifest::RunManifest;
use crate::{usage, AnalyzeArgs, BuildCodeArgs, BuildLutArgs, Cli, CliError, Command, SimulateArgs};

/// Files produced by a run, held in memory until everything has succeeded.
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, name: String, bytes: Vec<u8>) {
        self.files.push((name, bytes));
    }

    /// Writes every file plus the manifest; returns the written paths.
    fn commit(self, cli: &Cli, stem: &str, mut manifest: RunManifest) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(&cli.out_dir).with_context(|| format!("creating {}", cli.out_dir.display()))?;
        let mut paths = Vec::new();
        for (name, bytes) in &self.files {
            let path = cli.out_dir.join(name);
            std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            paths.push(path);
        }
        manifest.add_outputs(&paths)?;
        let mpath = cli
            .manifest
            .clone()
            .unwrap_or_else(|| cli.out_dir.join(format!("{stem}.{}.manifest.json", manifest.subcommand)));
        manifest.write(&mpath)?;
        paths.push(mpath);
        Ok(paths)
    }
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    match &cli.command {
        Command::BuildCode(a) => build_code(cli, a),
        Command::Analyze(a) => analyze(cli, a),
        Command::BuildLut(a) => build_lut(cli, a),
        Command::Simulate(a) => simulate(cli, a),
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_proto(path: &Path) -> Result<Protograph, CliError> {
    let mut proto = parse_protograph(&read_input(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if proto.name.is_empty() {
        proto.name = path.file_stem().map_or("code".into(), |s| s.to_string_lossy().into_owned());
    }
    Ok(proto)
}

fn channel(esn0_db: f64) -> Result<ChannelParams, CliError> {
    ChannelParams::from_esn0_db(esn0_db).map_err(|e| usage(format!("--esn0-db: {e}")))
}

fn build_code(cli: &Cli, a: &BuildCodeArgs) -> Result<Vec<PathBuf>, CliError> {
    let proto = load_proto(&a.proto)?;
    let code = lift_protograph(&proto, a.z, cli.seed, LiftOptions { girth_retries: a.girth_retries })
        .map_err(|e| usage(format!("--z {}: {e}", a.z)))?;
    let stem = a.name.clone().unwrap_or_else(|| proto.name.clone());

    let mut csv = Vec::new();
    write_code_csv(&code, &mut csv).context("serializing code")?;

    let stats = code_stats(&code);
    let punctured = code.punctured().iter().filter(|&&p| p).count();
    let mut s = String::from("metric,value\n");
    s += &format!("name,{}\nn,{}\nm,{}\nz,{}\n", code.name(), code.n(), code.m(), code.lifting_factor());
    s += &format!("rate,{}\ndesign_rate,{}\n", code.rate(), proto.design_rate());
    s += &format!("edge_types,{}\npunctured,{punctured}\nedges,{}\n", code.num_edge_types(), code.edges().len());
    s += &format!("frac_cns_touching_deg1_vns,{}\n", stats.frac_cns_touching_deg1_vns);
    for (d, count) in &stats.vn_degree_histogram {
        s += &format!("vn_degree_{d},{count}\n");
    }
    for (d, count) in &stats.cn_degree_histogram {
        s += &format!("cn_degree_{d},{count}\n");
    }

    let mut out = Outputs::new();
    out.add(format!("{stem}.code.csv"), csv);
    out.add(format!("{stem}.stats.csv"), s.into_bytes());
    let params = json!({ "proto": a.proto, "z": a.z, "girth_retries": a.girth_retries, "name": stem });
    let mut manifest = RunManifest::new("build-code", params, cli.seed);
    manifest.add_input(&a.proto)?;
    out.commit(cli, &stem, manifest)
}

fn analyze(cli: &Cli, a: &AnalyzeArgs) -> Result<Vec<PathBuf>, CliError> {
    let proto = load_proto(&a.proto)?;
    let ch = channel(a.esn0_db)?;
    if a.iterations == 0 {
        return Err(usage("--iterations must be at least 1"));
    }
    let schedule = match a.mode.as_str() {
        "pexit" => pexit_run(&proto, &ch, a.iterations),
        "mc" => mc_density_evolution(&proto, &ch, a.iterations, a.samples, cli.seed),
        other => return Err(usage(format!("--mode `{other}`: expected pexit or mc"))),
    }
    .map_err(|e| usage(e.to_string()))?;
    let stem = a.name.clone().unwrap_or_else(|| proto.name.clone());

    let mut table = String::from("t,edge_type,mean,mutual_information\n");
    for t in 1..=schedule.iterations {
        for i in 1..=schedule.edge_types {
            let d = schedule.get(t, i);
            table += &format!("{t},{i},{},{}\n", d.mean(), d.mutual_information());
        }
    }
    let mut out = Outputs::new();
    out.add(format!("{stem}.schedule.json"), schedule.to_json().context("serializing schedule")?.into_bytes());
    out.add(format!("{stem}.densities.csv"), table.into_bytes());
    let params = json!({
        "proto": a.proto, "esn0_db": a.esn0_db, "iterations": a.iterations,
        "mode": a.mode, "samples": a.samples, "name": stem,
    });
    let mut manifest = RunManifest::new("analyze", params, cli.seed);
    manifest.add_input(&a.proto)?;
    out.commit(cli, &stem, manifest)
}

pub fn parse_grid(s: &str) -> Result<GridPolicy, String> {
    match s {
        "channel" => Ok(GridPolicy::ChannelQuantile),
        "message" => Ok(GridPolicy::MessageQuantile),
        _ => {
            let max = s
                .strip_prefix("uniform:")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| format!("--grid `{s}`: expected channel, message or uniform:<max>"))?;
            if !(max > 0.0 && max.is_finite()) {
                return Err(format!("--grid uniform maximum must be positive, got {max}"));
            }
            Ok(GridPolicy::Uniform { max })
        }
    }
}

fn parse_normalization(s: &str) -> Result<NormalizationMode, String> {
    match s {
        "normalized" => Ok(NormalizationMode::Normalized),
        "paper-literal" => Ok(NormalizationMode::PaperLiteral),
        _ => Err(format!("--normalization `{s}`: expected normalized or paper-literal")),
    }
}

fn build_lut(cli: &Cli, a: &BuildLutArgs) -> Result<Vec<PathBuf>, CliError> {
    let proto = load_proto(&a.proto)?;
    let grid = parse_grid(&a.grid).map_err(usage)?;
    let normalization = parse_normalization(&a.normalization).map_err(usage)?;
    let schedule = match (&a.schedule, a.esn0_db) {
        (Some(path), _) => {
            let s = EdgeDensitySchedule::from_json(&read_input(path)?)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            if s.edge_types != proto.num_edge_types() {
                return Err(usage(format!(
                    "schedule has {} edge types, protograph has {}",
                    s.edge_types,
                    proto.num_edge_types()
                )));
            }
            s
        }
        (None, Some(db)) => {
            let t = a.iterations.unwrap_or(500);
            if t == 0 {
                return Err(usage("--iterations must be at least 1"));
            }
            pexit_run(&proto, &channel(db)?, t).map_err(|e| usage(e.to_string()))?
        }
        (None, None) => return Err(usage("build-lut needs --schedule or --esn0-db")),
    };
    let iterations = a.iterations.unwrap_or(schedule.iterations);
    let raw = build_raw_lut(&proto, &schedule, iterations, a.levels, grid, normalization)
        .map_err(|e| usage(e.to_string()))?;
    let (lut, report) = compress_lut(&raw, a.clusters, cli.seed).map_err(|e| usage(e.to_string()))?;
    let stem = a.name.clone().unwrap_or_else(|| proto.name.clone());

    let mut bin = Vec::new();
    write_lut(&lut, &mut bin).context("serializing LUT")?;
    let mut csv = Vec::new();
    write_lut_csv(&lut, &mut csv).context("serializing LUT")?;
    let mut heat = Vec::new();
    write_heatmap_csv(&heatmap_rows(&raw), &mut heat).context("serializing heatmap")?;
    let summary = json!({
        "iterations": raw.iterations,
        "edge_types": raw.edge_types,
        "levels": raw.levels(),
        "raw_entries": raw.values.len(),
        "clamped_entries": raw.clamped_entries,
        "max_monotonicity_violation": raw.max_monotonicity_violation(),
        "grid": raw.grid,
        "compression": report,
    });

    let mut out = Outputs::new();
    out.add(format!("{stem}.lut"), bin);
    out.add(format!("{stem}.lut.csv"), csv);
    out.add(format!("{stem}.heatmap.csv"), heat);
    out.add(format!("{stem}.lut_report.json"), (serde_json::to_string_pretty(&summary).context("report")? + "\n").into_bytes());
    let params = json!({
        "proto": a.proto, "schedule": a.schedule, "esn0_db": schedule.channel_esn0_db,
        "iterations": iterations, "levels": a.levels, "clusters": a.clusters,
        "grid": a.grid, "normalization": a.normalization, "name": stem,
    });
    let mut manifest = RunManifest::new("build-lut", params, cli.seed);
    manifest.add_input(&a.proto)?;
    if let Some(p) = &a.schedule {
        manifest.add_input(p)?;
    }
    eprintln!(
        "LUT: {} raw entries, {} stored, max reconstruction error {:.3e}",
        raw.values.len(),
        report.entry_count,
        report.max_abs_error
    );
    out.commit(cli, &stem, manifest)
}

/// Expands `start:stop:step` into points, rounding away float drift.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("--range `{s}`: expected start:stop:step"))?;
    let [start, stop, step] = parts[..] else {
        return Err(format!("--range `{s}`: expected start:stop:step"));
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(format!("--range `{s}`: need start <= stop and step > 0"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9).collect())
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<Vec<PathBuf>, CliError> {
    let kind: DecoderKind = a.decoder.parse().map_err(usage)?;
    let file = std::fs::File::open(&a.code).map_err(|e| usage(format!("cannot read {}: {e}", a.code.display())))?;
    let code = read_code_csv(BufReader::new(file)).map_err(|e| usage(format!("{}: {e}", a.code.display())))?;

    let mut points = a.esn0_db.clone();
    if let Some(r) = &a.range {
        points.extend(parse_range(r).map_err(usage)?);
    }
    if points.is_empty() {
        return Err(usage("simulate needs --esn0-db or --range"));
    }
    let params: Vec<ChannelParams> = points.iter().map(|&db| channel(db)).collect::<Result<_, _>>()?;

    let lut = match (kind, &a.lut) {
        (DecoderKind::IdMsa, None) => return Err(usage("--decoder idmsa requires --lut")),
        (DecoderKind::IdMsa, Some(p)) => {
            let f = std::fs::File::open(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            Some(read_lut(BufReader::new(f)).map_err(|e| usage(format!("{}: {e}", p.display())))?)
        }
        _ => None,
    };
    let rule = match kind {
        DecoderKind::Spa => CheckRule::SumProduct,
        DecoderKind::Msa => CheckRule::MinSum { factor: a.msa_factor },
        DecoderKind::IdMsa => CheckRule::IdMinSum { lut: lut.as_ref().expect("loaded above") },
    };
    let cfg = SimConfig {
        max_iterations: a.max_iterations,
        max_frames: a.max_frames,
        target_frame_errors: a.target_errors,
        seed: cli.seed,
        workers: a.workers,
        batch_size: a.batch_size,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    if a.batch_size == 0 {
        return Err(usage("--batch-size must be at least 1"));
    }
    // surfaces factor and LUT/code mismatches before any frame is run
    BpDecoder::new(&code, rule, DecodeOptions::new(cfg.max_iterations)).map_err(|e| usage(e.to_string()))?;

    let mut rows = Vec::with_capacity(params.len());
    for p in &params {
        let r = run_fer(&code, rule, p, &cfg).context("simulation")?;
        eprintln!("{:>8.3} dB  {}/{} frames  fer {:.4e}", r.esn0_db, r.frame_errors, r.frames_run, r.fer);
        rows.push(r);
    }
    let stem = code.name().to_string();
    let mut csv = Vec::new();
    write_results_csv(&rows, kind.label(), &stem, cli.seed, &mut csv).context("serializing results")?;

    let mut out = Outputs::new();
    out.add(format!("{stem}.{}.results.csv", kind.label()), csv);
    let params = json!({
        "code": a.code, "decoder": kind.label(),
        "msa_factor": (kind == DecoderKind::Msa).then_some(a.msa_factor),
        "lut": a.lut, "esn0_db": points, "config": cfg,
    });
    let mut manifest = RunManifest::new("simulate", params, cli.seed);
    manifest.add_input(&a.code)?;
    if let Some(p) = &a.lut {
        manifest.add_input(p)?;
    }
    out.commit(cli, &format!("{stem}.{}", kind.label()), manifest)
}
