//! Command-line interface. Exit codes: 0 success, 2 validation failure,
//! 3 processing failure, 4 service failure.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::graph::{infer_relations, resolve_collisions};
use crate::layout::{parse_scene, ParsedScene};
use crate::material::{paint_objects, MaterialDb};
use crate::model::{validate_scan, ScanDocument};
use crate::pipeline::{run_pipeline, sha256_hex, PipelineInput};
use crate::retrieval::{retrieve_assets, AssetDb};
use crate::services::build_services;

#[derive(Parser)]
#[command(name = "scenesmith", version, about = "Indoor scan to simulator-ready scene")]
struct Cli {
    /// Pipeline configuration JSON; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Service response cache directory (also: SCENESMITH_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Never touch the network; only stubs and cached responses.
    #[arg(long, global = true)]
    offline: bool,
    /// Override every stage seed (stage seeds become n, n+1, n+2).
    #[arg(long, global = true)]
    seed_override: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArg {
    /// Run directory holding stage artifacts.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Close walls, snap, align and pull objects inside.
    Parse {
        #[arg(long)]
        scan: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Infer relations and resolve collisions over parsed.json.
    Graph {
        #[command(flatten)]
        out: OutArg,
    },
    /// Retrieve assets for resolved.json.
    Retrieve {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        assets: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Paint materials for resolved.json.
    Paint {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        materials: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Build the final scene description from stage artifacts.
    Assemble {
        #[arg(long)]
        assets: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Full pipeline: parse, graph, retrieve, paint, assemble.
    Run {
        #[arg(long)]
        scan: PathBuf,
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long)]
        materials: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Mesh/image similarity benchmark over a CSV of pairs.
    Bench {
        #[arg(long)]
        pairs: PathBuf,
        /// Base directory for paths inside the CSV; defaults to the CSV's
        /// directory.
        #[arg(long)]
        base: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

pub fn cli_main() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(cache) = &cli.cache {
        cfg.cache_dir = Some(cache.display().to_string());
    } else if let Ok(env) = std::env::var("SCENESMITH_CACHE") {
        if !env.is_empty() {
            cfg.cache_dir.get_or_insert(env);
        }
    }
    if cli.offline {
        cfg.offline = true;
    }
    if let Some(seed) = cli.seed_override {
        cfg.seeds.sampling = seed;
        cfg.seeds.kmeans = seed.wrapping_add(1);
        cfg.seeds.stub = seed.wrapping_add(2);
    }
    Ok(cfg)
}

fn write_json<T: serde::Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).map_err(|e| Error::file(path, e))
}

fn read_json<T: for<'de> serde::Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn services_for(cfg: &PipelineConfig) -> Result<crate::services::Services> {
    build_services(
        &cfg.services,
        cfg.retrieval.embed_dim,
        cfg.seeds.stub,
        cfg.cache_dir.as_deref().map(std::path::Path::new),
        cfg.offline,
    )
}

fn dispatch(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Parse { scan, out } => {
            std::fs::create_dir_all(&out.out).map_err(|e| Error::file(&out.out, e))?;
            let doc: ScanDocument = read_json(scan)?;
            let scene = validate_scan(&doc)?;
            let (parsed, log) = parse_scene(&scene, &cfg.snap)?;
            write_json(&out.out.join("parsed.json"), &parsed)?;
            for l in log {
                println!("parse: {l}");
            }
            println!(
                "parsed {} walls, {} objects -> {}",
                parsed.walls.len(),
                parsed.objects.len(),
                out.out.join("parsed.json").display()
            );
            Ok(())
        }
        Command::Graph { out } => {
            let parsed: ParsedScene = read_json(&out.out.join("parsed.json"))?;
            let graph = infer_relations(&parsed, &cfg.graph);
            graph.validate()?;
            let (objects, report) =
                resolve_collisions(&parsed.objects, &graph, &parsed.walls, &cfg.snap);
            let resolved = ParsedScene { objects, ..parsed };
            write_json(&out.out.join("graph.json"), &graph)?;
            write_json(&out.out.join("collisions.json"), &report)?;
            write_json(&out.out.join("resolved.json"), &resolved)?;
            println!(
                "graph: {} edges; collisions resolved={} in {} iterations",
                graph.edges.len(),
                report.resolved,
                report.iterations_used
            );
            Ok(())
        }
        Command::Retrieve {
            frames,
            assets,
            out,
        } => {
            let resolved: ParsedScene = read_json(&out.out.join("resolved.json"))?;
            let db = AssetDb::load(assets)?;
            let services = services_for(&cfg)?;
            let result = retrieve_assets(
                &resolved.objects,
                &resolved.frames,
                frames,
                &db,
                &services,
                &cfg.retrieval,
            )?;
            write_json(&out.out.join("retrieval.json"), &result)?;
            println!("retrieve: {} clusters", result.traces.len());
            Ok(())
        }
        Command::Paint {
            frames,
            materials,
            out,
        } => {
            let resolved: ParsedScene = read_json(&out.out.join("resolved.json"))?;
            let db = MaterialDb::load(materials)?;
            let services = services_for(&cfg)?;
            let (painted, skipped) = paint_objects(
                &resolved.objects,
                &resolved.frames,
                frames,
                &db,
                &services,
                &cfg.material,
                &out.out.join("albedo"),
            )?;
            write_json(&out.out.join("paint.json"), &painted)?;
            println!("paint: {} painted, {} skipped", painted.len(), skipped.len());
            Ok(())
        }
        Command::Assemble { assets, out } => {
            let resolved: ParsedScene = read_json(&out.out.join("resolved.json"))?;
            let graph = read_json(&out.out.join("graph.json"))?;
            let retrieval: Option<crate::retrieval::RetrievalResult> =
                read_json(&out.out.join("retrieval.json")).ok();
            let painted: Vec<crate::material::PaintedObject> =
                read_json(&out.out.join("paint.json")).unwrap_or_default();
            let empty = BTreeMap::new();
            let assignments = retrieval.as_ref().map(|r| &r.assignments).unwrap_or(&empty);
            let materials = crate::material::assignment_map(&painted);
            let db = match assets {
                Some(p) => Some(AssetDb::load(p)?),
                None => None,
            };
            let (scene, log) = crate::assemble::assemble_scene(
                &crate::assemble::AssembleInput {
                    room: &resolved.room,
                    segments: &resolved.walls,
                    objects: &resolved.objects,
                    graph: &graph,
                    assignments,
                    materials: &materials,
                    db: db.as_ref(),
                },
                &cfg.assemble,
                &cfg.hash(),
                &cfg.seeds,
            )?;
            write_json(&out.out.join("scene.json"), &scene)?;
            for l in log {
                println!("assemble: {l}");
            }
            println!("scene -> {}", out.out.join("scene.json").display());
            Ok(())
        }
        Command::Run {
            scan,
            frames,
            assets,
            materials,
            out,
        } => {
            let manifest = run_pipeline(
                &PipelineInput {
                    scan_path: scan.clone(),
                    frame_dir: frames.clone(),
                    asset_db: assets.clone(),
                    material_db: materials.clone(),
                    out_dir: out.out.clone(),
                },
                &cfg,
            )?;
            for l in &manifest.log {
                println!("{l}");
            }
            println!("run complete -> {}", out.out.display());
            Ok(())
        }
        Command::Bench { pairs, base, out } => {
            std::fs::create_dir_all(&out.out).map_err(|e| Error::file(&out.out, e))?;
            let rows = crate::evalbench::read_pairs_csv(pairs)?;
            let base = base
                .clone()
                .or_else(|| pairs.parent().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            let report =
                crate::evalbench::run_benchmark(&rows, &base, &cfg.bench, cfg.seeds.sampling)?;
            write_json(&out.out.join("report.json"), &report)?;
            let md = crate::evalbench::report_markdown(&report);
            std::fs::write(out.out.join("report.md"), &md)
                .map_err(|e| Error::file(&out.out, e))?;
            print!("{md}");
            println!(
                "report hash {}",
                sha256_hex(serde_json::to_string(&report)?.as_bytes())
            );
            Ok(())
        }
    }
}
