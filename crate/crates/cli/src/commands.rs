use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use rayon::ThreadPool;

use cervix_core::classify::{
    cross_validate, read_cohort_csv, reports_csv, reports_text, write_cohort_csv, ClassifierSpec,
    FeatureView, Hyperparams,
};
use cervix_core::evalmetrics::{linreg, RegressionFit};
use cervix_core::geometry::{write_points_csv, SkeletonParams};
use cervix_core::markers::{
    collect_batch, markers_for_mask, mask_centerline, parse_mask_name, write_markers_csv,
    AcaParams, AnteriorConvention, ClParams, MarkerParams, Trimester,
};
use cervix_core::raster::io::{load_hsv_ranges, read_mask, read_rgb, write_mask, write_rgb};
use cervix_core::raster::{
    dilate, inpaint, mask_by_hsv_ranges, resize_bilinear, HsvRange, InpaintParams,
};
use cervix_core::synth::{gen_cohort, oracle_suite, rasterize, CohortParams};

use crate::config::Config;
use crate::{ClassifyArgs, EvaluateArgs, ExtractArgs, PreprocessArgs, SynthArgs};

pub fn pool(jobs: Option<usize>) -> Result<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            bail!("--jobs must be at least 1");
        }
        b = b.num_threads(j);
    }
    Ok(b.build()?)
}

/// Regular files in `dir` with one of `exts` (case-insensitive), sorted by
/// file name.
fn list_files(dir: &Path, exts: &[&str]) -> Result<Vec<PathBuf>> {
    let rd = fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?;
    let mut out = Vec::new();
    for entry in rd {
        let p = entry?.path();
        let ok = p.is_file()
            && p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| exts.contains(&e.to_ascii_lowercase().as_str()));
        if ok {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(out)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn preprocess(a: &PreprocessArgs, cfg: &Config, pool: &ThreadPool) -> Result<()> {
    let ranges = match cfg.pick(a.ranges.clone().map(|p| p.display().to_string()), "ranges")? {
        Some(p) => load_hsv_ranges(Path::new(&p))?,
        None => HsvRange::default_annotation_ranges(),
    };
    let radius: usize = cfg.get(a.dilate, "dilate", 2)?;
    let size: usize = cfg.get(a.size, "size", 256)?;
    if size == 0 {
        bail!("output size must be positive");
    }
    let files = list_files(&a.input, &["png", "ppm", "pnm"])?;
    if files.is_empty() {
        bail!("no input images in {}", a.input.display());
    }
    create_dir(&a.out)?;
    let results: Vec<Result<()>> = pool.install(|| {
        files
            .par_iter()
            .map(|p| -> Result<()> {
                let img = read_rgb(p)?;
                let hole = dilate(&mask_by_hsv_ranges(&img, &ranges)?, radius);
                let clean = inpaint(&img, &hole, InpaintParams::default())?;
                let out = resize_bilinear(&clean, size, size)?;
                let stem = p.file_stem().unwrap_or_default();
                write_rgb(&out, &a.out.join(stem).with_extension("png"))?;
                Ok(())
            })
            .collect()
    });
    let mut ok = 0;
    for (p, r) in files.iter().zip(results) {
        match r {
            Ok(()) => ok += 1,
            Err(e) => warn!("{}: {e:#}", p.display()),
        }
    }
    info!("preprocessed {ok} of {} images", files.len());
    if ok == 0 {
        bail!("all {} input images failed", files.len());
    }
    Ok(())
}

fn marker_params(a: &ExtractArgs, cfg: &Config) -> Result<MarkerParams> {
    let conv = AnteriorConvention {
        anterior_side: cfg.get(
            a.anterior.as_deref().map(str::parse).transpose()?,
            "anterior_side",
            Default::default(),
        )?,
        proximal_end: cfg.get(
            a.proximal.as_deref().map(str::parse).transpose()?,
            "proximal_end",
            Default::default(),
        )?,
    };
    let defaults = ClParams::default();
    let cl = ClParams {
        skeleton: SkeletonParams {
            spacing: cfg.get(
                a.sample_spacing,
                "sample_spacing",
                defaults.skeleton.spacing,
            )?,
            arc_ratio: cfg.get(None, "arc_ratio", defaults.skeleton.arc_ratio)?,
        },
        prune_frac: cfg.get(None, "prune_frac", defaults.prune_frac)?,
        smooth_window: cfg.get(a.smooth_window, "smooth_window", defaults.smooth_window)?,
    };
    let aca = AcaParams {
        window_frac: cfg.get(
            a.window_frac,
            "window_frac",
            AcaParams::default().window_frac,
        )?,
    };
    Ok(MarkerParams {
        cl,
        aca,
        conv,
        pixel_spacing: cfg.pick(a.spacing, "pixel_spacing")?,
    })
}

pub fn extract(a: &ExtractArgs, cfg: &Config, pool: &ThreadPool) -> Result<()> {
    let params = marker_params(a, cfg)?;
    let files = list_files(&a.masks, &["png", "pgm", "pbm", "pnm"])?;
    if files.is_empty() {
        bail!("no mask files in {}", a.masks.display());
    }
    if let Some(dir) = &a.centerlines {
        create_dir(dir)?;
    }
    let results = pool.install(|| {
        files
            .par_iter()
            .map(|p| {
                let m = read_mask(p)?;
                let rec = markers_for_mask(&m, p, &params)?;
                if let Some(dir) = &a.centerlines {
                    let cl = mask_centerline(&m, &params.cl)?;
                    let stem = p.file_stem().unwrap_or_default();
                    let f = fs::File::create(dir.join(stem).with_extension("csv"))?;
                    write_points_csv(cl.points(), BufWriter::new(f))?;
                }
                Ok(rec)
            })
            .collect::<Vec<_>>()
    });
    let batch = collect_batch(&files, results)?;
    let f = fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_markers_csv(&batch.records, BufWriter::new(f))?;
    info!(
        "{} records, {} failures",
        batch.records.len(),
        batch.failures.len()
    );
    Ok(())
}

type JoinKey = (String, Trimester);

fn read_estimates(path: &Path) -> Result<BTreeMap<JoinKey, (f64, f64)>> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let h = rdr.headers()?.clone();
    let col = |name: &str| {
        h.iter()
            .position(|c| c == name)
            .ok_or_else(|| anyhow!("{}: missing column {name}", path.display()))
    };
    let (id, tri, cl, aca) = (
        col("subject_id")?,
        col("trimester")?,
        col("cl")?,
        col("aca_deg")?,
    );
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let ctx = || format!("{}:{}", path.display(), i + 2);
        let field = |j: usize| rec.get(j).unwrap_or("").trim().to_string();
        let key = (
            field(id),
            field(tri).parse::<Trimester>().with_context(ctx)?,
        );
        let v = (
            field(cl).parse::<f64>().with_context(ctx)?,
            field(aca).parse::<f64>().with_context(ctx)?,
        );
        if out.insert(key.clone(), v).is_some() {
            bail!("{}: duplicate subject {} trimester {}", ctx(), key.0, key.1);
        }
    }
    Ok(out)
}

fn read_ground_truth(path: &Path) -> Result<BTreeMap<JoinKey, (f64, Option<f64>)>> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let h = rdr.headers()?.clone();
    let col = |name: &str| {
        h.iter()
            .position(|c| c == name)
            .ok_or_else(|| anyhow!("{}: missing column {name}", path.display()))
    };
    let (p, cl, aca) = (col("path")?, col("cl_true_px")?, col("aca_true_deg")?);
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let ctx = || format!("{}:{}", path.display(), i + 2);
        let field = |j: usize| rec.get(j).unwrap_or("").trim().to_string();
        let key = parse_mask_name(Path::new(&field(p)));
        let cl_v = field(cl).parse::<f64>().with_context(ctx)?;
        let aca_s = field(aca);
        let aca_v = if aca_s.is_empty() || aca_s.eq_ignore_ascii_case("NA") {
            None
        } else {
            Some(aca_s.parse::<f64>().with_context(ctx)?)
        };
        out.insert(key, (cl_v, aca_v));
    }
    Ok(out)
}

fn fit_line(name: &str, est: &[f64], gt: &[f64]) -> String {
    let fit: Option<RegressionFit> = if est.len() >= 2 {
        match linreg(gt, est) {
            Ok(f) => Some(f),
            Err(e) => {
                warn!("{name}: {e}");
                None
            }
        }
    } else {
        None
    };
    match fit {
        Some(f) => format!(
            "{name},{},{:.6},{:.6},{:.6},{:.6}\n",
            est.len(),
            f.slope,
            f.intercept,
            f.rmse,
            f.pearson_r
        ),
        None => format!("{name},{},NA,NA,NA,NA\n", est.len()),
    }
}

/// Regression of estimates on ground truth per marker:
/// `est ~ slope * truth + intercept`, with the RMS residual and Pearson r.
pub fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let est = read_estimates(&a.est)?;
    let gt = read_ground_truth(&a.gt)?;
    let (mut cl_e, mut cl_t, mut aca_e, mut aca_t) = (vec![], vec![], vec![], vec![]);
    for (key, &(cl, aca)) in &est {
        let Some(&(t_cl, t_aca)) = gt.get(key) else {
            continue;
        };
        cl_e.push(cl);
        cl_t.push(t_cl);
        if let Some(t) = t_aca {
            aca_e.push(aca);
            aca_t.push(t);
        }
    }
    if cl_e.len() < 2 {
        bail!("need ≥ 2 joined rows, found {}", cl_e.len());
    }
    let mut s = String::from("marker,n,slope,intercept,rmse,pearson_r\n");
    s.push_str(&fit_line("cl", &cl_e, &cl_t));
    s.push_str(&fit_line("aca", &aca_e, &aca_t));
    write_file(&a.out, &s)
}

pub fn classify(a: &ClassifyArgs, cfg: &Config, pool: &ThreadPool) -> Result<()> {
    let d = Hyperparams::default();
    let hp = Hyperparams {
        k: cfg.get(a.k, "k", d.k)?,
        max_depth: cfg.get(a.max_depth, "max_depth", d.max_depth)?,
        min_leaf: cfg.get(a.min_leaf, "min_leaf", d.min_leaf)?,
        lambda: cfg.get(a.lambda, "lambda", d.lambda)?,
        epochs: cfg.get(a.epochs, "epochs", d.epochs)?,
    };
    let folds: usize = cfg.get(a.folds, "folds", 5)?;
    let seed: u64 = cfg.get(a.seed, "seed", 0)?;
    let views: Vec<FeatureView> = if a.view.eq_ignore_ascii_case("all") {
        FeatureView::ALL.to_vec()
    } else {
        vec![a.view.parse()?]
    };
    let models: Vec<ClassifierSpec> = if a.model.eq_ignore_ascii_case("all") {
        hp.all().to_vec()
    } else {
        vec![hp.by_name(&a.model)?]
    };
    let f = fs::File::open(&a.data).with_context(|| format!("reading {}", a.data.display()))?;
    let samples = read_cohort_csv(f, &a.data.display().to_string())?;
    let jobs: Vec<(ClassifierSpec, FeatureView)> = models
        .iter()
        .flat_map(|&m| views.iter().map(move |&v| (m, v)))
        .collect();
    let reports = pool.install(|| {
        jobs.par_iter()
            .map(|&(m, v)| cross_validate(&samples, v, m, folds, seed))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let (text_path, csv_path) = if a.out.extension().is_some_and(|e| e == "csv") {
        (a.out.with_extension("txt"), a.out.clone())
    } else {
        (a.out.clone(), a.out.with_extension("csv"))
    };
    write_file(&text_path, &reports_text(&reports, samples.len()))?;
    write_file(&csv_path, &reports_csv(&reports))
}

pub fn synth(a: &SynthArgs, cfg: &Config) -> Result<()> {
    let seed: u64 = cfg.get(a.seed, "seed", 0)?;
    match a.suite.as_str() {
        "shapes" => {
            create_dir(&a.out)?;
            let mut gt = String::from("path,cl_true_px,aca_true_deg\n");
            for (name, spec) in oracle_suite() {
                let (mask, truth) = rasterize(&spec)?;
                let file = format!("{name}.png");
                write_mask(&mask, &a.out.join(&file))?;
                let aca = truth.aca_true.map_or(String::new(), |v| format!("{v:.4}"));
                gt.push_str(&format!("{file},{:.4},{aca}\n", truth.cl_true));
            }
            write_file(&a.out.join("ground_truth.csv"), &gt)
        }
        "cohort" => {
            let n: usize = cfg.get(a.n, "n", 380)?;
            let balance: f64 = cfg.get(a.balance, "balance", 0.5)?;
            let samples = gen_cohort(n, &CohortParams::default(), balance, seed)?;
            create_dir(&a.out)?;
            let path = a.out.join("cohort.csv");
            let f =
                fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_cohort_csv(&samples, BufWriter::new(f))?;
            Ok(())
        }
        "" => bail!("empty suite name"),
        other => bail!("unknown suite {other:?} (expected shapes or cohort)"),
    }
}
