//! Command-line front end for the circulant graph sampling toolkit.
//!
//! Exit codes: 0 success, 2 input error, 3 mathematical infeasibility
//! (Bezout / invertibility / model mismatch), 4 precondition violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::json;

use gfri_core::{
    analyze, build_hcgeswt, build_hgeswt, build_hgswt, build_path_hgswt, check_invertibility,
    condition_number_bipartite, factorization_residual, factorize_gft, filterbank_json,
    fmt_float, graph_json, graph_product, kron_reduce_graph, max_levels, nearest_circulant,
    nearest_kronecker_circulant, parse_graph_json, prony_dct_reconstruct, prony_reconstruct,
    read_matrix_csv, read_samples_csv, read_signal_csv, read_sparse_csv, same_generating_set_coarsen,
    sample_dct, sample_gft, sample_via_pipeline, spectral_reduce, tol_from_env,
    write_coefficients_csv, write_matrix_csv, write_samples_csv, write_signal_csv,
    write_sparse_csv, BasisKind, CoarseningScheme, FilterBank, GfriError, GraphDescription,
    GraphSignal, plan_mrt, ProductKind, Result, SparseSignal, Verdict, C64,
};

#[derive(Parser)]
#[command(name = "gfri", about = "Sparse sampling and wavelets on circulant graphs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Hgswt,
    Hgeswt,
    Hcgeswt,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Dft,
    Dct,
}

impl From<BasisArg> for BasisKind {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Dft => BasisKind::Dft,
            BasisArg::Dct => BasisKind::DctIii,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Spectral,
    SameGeneratingSet,
    Kron,
}

impl From<SchemeArg> for CoarseningScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Spectral => CoarseningScheme::Spectral,
            SchemeArg::SameGeneratingSet => CoarseningScheme::SameGeneratingSet,
            SchemeArg::Kron => CoarseningScheme::Kron,
        }
    }
}

/// Exponential frequencies, either literal or as DFT indices `2 pi t / n`.
#[derive(Args, Clone)]
struct AlphaArgs {
    /// Comma-separated frequencies in radians.
    #[arg(long)]
    alphas: Option<String>,
    /// Comma-separated integers t, mapped to 2*pi*t/n.
    #[arg(long)]
    alpha_indices: Option<String>,
}

impl AlphaArgs {
    fn resolve(&self, n: usize) -> Result<Vec<f64>> {
        if let Some(list) = &self.alphas {
            return list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| GfriError::InvalidGraph(format!("bad frequency '{s}'")))
                })
                .collect();
        }
        if let Some(list) = &self.alpha_indices {
            return list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map(|t| 2.0 * std::f64::consts::PI * t as f64 / n as f64)
                        .map_err(|_| GfriError::InvalidGraph(format!("bad frequency index '{s}'")))
                })
                .collect();
        }
        Ok(Vec::new())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a graph: adjacency, Laplacian, spectrum, bipartiteness.
    Graph {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Build a wavelet filterbank and report its invertibility.
    Filterbank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "hgswt")]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[command(flatten)]
        alphas: AlphaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multilevel wavelet analysis of a signal.
    Mrt {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[command(flatten)]
        alphas: AlphaArgs,
        #[arg(long, value_enum, default_value = "spectral")]
        scheme: SchemeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral samples of a sparse signal (or a seeded demo signal).
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sparse: Option<PathBuf>,
        /// Generate a random K-sparse demo signal instead of reading one.
        #[arg(long)]
        demo_sparsity: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        rows: usize,
        #[arg(long, value_enum, default_value = "dft")]
        basis: BasisArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to store the generated demo signal.
        #[arg(long)]
        demo_out: Option<PathBuf>,
    },
    /// Prony reconstruction of a sparse signal from spectral samples.
    Reconstruct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sparsity: usize,
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, value_enum, default_value = "dft")]
        basis: BasisArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coarsened sampling pipeline: factorized GFT, then Prony-ready samples.
    Pipeline {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        sparse: PathBuf,
        #[arg(long)]
        rows: usize,
        /// Levels; defaults to the deepest admissible value.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Graph coarsening by the selected scheme.
    Coarsen {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "spectral")]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Product of two graphs.
    Product {
        #[arg(long)]
        graph1: PathBuf,
        #[arg(long)]
        graph2: PathBuf,
        #[arg(long, default_value = "cartesian")]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nearest circulant, or nearest Kronecker product of circulants.
    Approx {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &GfriError) -> u8 {
    match e {
        GfriError::InvalidGraph(_) | GfriError::DimensionMismatch { .. } => 2,
        GfriError::NotInvertible(_)
        | GfriError::Bezout(_)
        | GfriError::Singular(_)
        | GfriError::ModelMismatch(_)
        | GfriError::Numerical(_) => 3,
        GfriError::Precondition(_) => 4,
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| GfriError::InvalidGraph(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| GfriError::InvalidGraph(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| GfriError::InvalidGraph(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<GraphDescription> {
    parse_graph_json(&read_file(path)?)
}

fn circulant_of(desc: &GraphDescription) -> Result<&gfri_core::CirculantGraph> {
    match desc {
        GraphDescription::Circulant(g) => Ok(g),
        GraphDescription::Path(_) => Err(GfriError::Precondition(
            "this command needs a circulant graph".into(),
        )),
    }
}

/// splitmix64; the 64-bit state/seed contract keeps demo runs reproducible.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    fn next_signed(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

fn demo_sparse(n: usize, k: usize, seed: u64) -> Result<SparseSignal> {
    if k > n {
        return Err(GfriError::Precondition(format!("sparsity {k} exceeds n = {n}")));
    }
    let mut rng = SplitMix64(seed);
    let mut support = Vec::with_capacity(k);
    while support.len() < k {
        let c = (rng.next_u64() % n as u64) as usize;
        if !support.contains(&c) {
            support.push(c);
        }
    }
    support.sort_unstable();
    let amplitudes = (0..k)
        .map(|_| C64::new(rng.next_signed(), rng.next_signed()))
        .collect();
    SparseSignal::new(n, support, amplitudes)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Graph { graph, out_dir } => cmd_graph(&graph, out_dir.as_deref()),
        Command::Filterbank {
            graph,
            kind,
            order,
            alphas,
            out,
        } => cmd_filterbank(&graph, kind, order, &alphas, out.as_deref()),
        Command::Mrt {
            graph,
            signal,
            order,
            levels,
            alphas,
            scheme,
            out,
        } => cmd_mrt(&graph, &signal, order, levels, &alphas, scheme, out.as_deref()),
        Command::Sample {
            n,
            sparse,
            demo_sparsity,
            seed,
            rows,
            basis,
            out,
            demo_out,
        } => cmd_sample(n, sparse.as_deref(), demo_sparsity, seed, rows, basis, out.as_deref(), demo_out.as_deref()),
        Command::Reconstruct {
            n,
            sparsity,
            samples,
            basis,
            out,
        } => cmd_reconstruct(n, sparsity, &samples, basis, out.as_deref()),
        Command::Pipeline {
            graph,
            sparse,
            rows,
            levels,
            out_dir,
        } => cmd_pipeline(&graph, &sparse, rows, levels, out_dir.as_deref()),
        Command::Coarsen {
            graph,
            scheme,
            levels,
            out,
        } => cmd_coarsen(&graph, scheme, levels, out.as_deref()),
        Command::Product {
            graph1,
            graph2,
            kind,
            out,
        } => cmd_product(&graph1, &graph2, &kind, out.as_deref()),
        Command::Approx {
            matrix,
            n1,
            n2,
            out_dir,
        } => cmd_approx(&matrix, n1, n2, out_dir.as_deref()),
    }
}

fn cmd_graph(graph: &Path, out_dir: Option<&Path>) -> Result<()> {
    let desc = load_graph(graph)?;
    let n = desc.n();
    let spectrum: Vec<f64> = match &desc {
        GraphDescription::Circulant(g) => {
            let rep = g.laplacian_representer();
            (0..n).map(|k| rep.eval_at_frequency(k, n)).collect()
        }
        GraphDescription::Path(p) => {
            let mut ev: Vec<f64> = p
                .laplacian()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ev
        }
    };
    let report = match &desc {
        GraphDescription::Circulant(g) => json!({
            "n": n,
            "type": "circulant",
            "generators": g.generators().iter().map(|&(s, w)| json!([s, w])).collect::<Vec<_>>(),
            "degree": g.degree(),
            "bandwidth": g.bandwidth(),
            "bipartite": g.is_bipartite(),
        }),
        GraphDescription::Path(_) => json!({ "n": n, "type": "path", "bipartite": true }),
    };
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    if let Some(dir) = out_dir {
        write_file(&dir.join("adjacency.csv"), &write_matrix_csv(&desc.adjacency()))?;
        write_file(&dir.join("laplacian.csv"), &write_matrix_csv(&desc.laplacian()))?;
        let mut spec_csv = String::from("k,lambda\n");
        for (k, v) in spectrum.iter().enumerate() {
            spec_csv.push_str(&format!("{k},{}\n", fmt_float(*v)));
        }
        write_file(&dir.join("spectrum.csv"), &spec_csv)?;
    }
    Ok(())
}

fn build_bank(desc: &GraphDescription, kind: KindArg, order: usize, alphas: &[f64]) -> Result<FilterBank> {
    match desc {
        GraphDescription::Path(p) => build_path_hgswt(p, order),
        GraphDescription::Circulant(g) => match kind {
            KindArg::Hgswt => build_hgswt(g, order),
            KindArg::Hgeswt => build_hgeswt(g, order, alphas),
            KindArg::Hcgeswt => build_hcgeswt(g, order, alphas),
        },
    }
}

fn cmd_filterbank(
    graph: &Path,
    kind: KindArg,
    order: usize,
    alphas: &AlphaArgs,
    out: Option<&Path>,
) -> Result<()> {
    let desc = load_graph(graph)?;
    let freqs = alphas.resolve(desc.n())?;
    let fb = build_bank(&desc, kind, order, &freqs)?;
    let verdict = check_invertibility(&fb, &fb.sampling)?;
    let cond = if fb.bipartite {
        condition_number_bipartite(&fb).ok()
    } else {
        None
    };
    let mut report: serde_json::Value = serde_json::from_str(&filterbank_json(&fb)).unwrap();
    report["verdict"] = match &verdict {
        Verdict::Invertible => json!("invertible"),
        Verdict::NotInvertible(why) => json!({ "not_invertible": why }),
    };
    if let Some(c) = cond {
        report["condition_number"] = json!(c);
    }
    let text = serde_json::to_string_pretty(&report).unwrap();
    println!("{text}");
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    if let Verdict::NotInvertible(why) = verdict {
        return Err(GfriError::NotInvertible(why));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_mrt(
    graph: &Path,
    signal: &Path,
    order: usize,
    levels: usize,
    alphas: &AlphaArgs,
    scheme: SchemeArg,
    out: Option<&Path>,
) -> Result<()> {
    let desc = load_graph(graph)?;
    let g = circulant_of(&desc)?;
    let mut freqs = alphas.resolve(g.n())?;
    if freqs.is_empty() {
        freqs.push(0.0);
    }
    let plan = plan_mrt(g, order, &freqs, levels, scheme.into())?;
    let x = GraphSignal::new(read_signal_csv(&read_file(signal)?)?);
    let w = analyze(&x, &plan)?;
    println!("levels: {}", plan.j_levels());
    println!("sparsity: {}", w.sparsity());
    let csv = write_coefficients_csv(&w);
    if let Some(path) = out {
        write_file(path, &csv)?;
    } else {
        print!("{csv}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    n: usize,
    sparse: Option<&Path>,
    demo_sparsity: Option<usize>,
    seed: u64,
    rows: usize,
    basis: BasisArg,
    out: Option<&Path>,
    demo_out: Option<&Path>,
) -> Result<()> {
    let x = match (sparse, demo_sparsity) {
        (Some(path), None) => read_sparse_csv(&read_file(path)?, n)?,
        (None, Some(k)) => demo_sparse(n, k, seed)?,
        _ => {
            return Err(GfriError::InvalidGraph(
                "provide exactly one of --sparse and --demo-sparsity".into(),
            ))
        }
    };
    if let Some(path) = demo_out {
        write_file(path, &write_sparse_csv(&x))?;
    }
    let samples = match basis {
        BasisArg::Dft => sample_gft(&x, rows)?,
        BasisArg::Dct => sample_dct(&x, rows)?,
    };
    let csv = write_samples_csv(&samples);
    if let Some(path) = out {
        write_file(path, &csv)?;
    } else {
        print!("{csv}");
    }
    Ok(())
}

fn cmd_reconstruct(
    n: usize,
    sparsity: usize,
    samples: &Path,
    basis: BasisArg,
    out: Option<&Path>,
) -> Result<()> {
    let kind: BasisKind = basis.into();
    let y = read_samples_csv(&read_file(samples)?, n, kind)?;
    let x = match kind {
        BasisKind::Dft => prony_reconstruct(&y, sparsity)?,
        BasisKind::DctIii => prony_dct_reconstruct(&y, sparsity)?,
    };
    let resampled = match kind {
        BasisKind::Dft => sample_gft(&x, y.m_rows())?,
        BasisKind::DctIii => sample_dct(&x, y.m_rows())?,
    };
    let resid = (&resampled.y - &y.y)
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    println!("residual: {}", fmt_float(resid));
    let tol = tol_from_env(1e-8);
    let csv = write_sparse_csv(&x);
    if let Some(path) = out {
        write_file(path, &csv)?;
    } else {
        print!("{csv}");
    }
    if resid > tol {
        return Err(GfriError::ModelMismatch(format!(
            "reconstruction residual {resid:.2e} exceeds tolerance {tol:.2e}"
        )));
    }
    Ok(())
}

fn cmd_pipeline(
    graph: &Path,
    sparse: &Path,
    rows: usize,
    levels: Option<usize>,
    out_dir: Option<&Path>,
) -> Result<()> {
    let desc = load_graph(graph)?;
    let g = circulant_of(&desc)?;
    let n = g.n();
    let x = read_sparse_csv(&read_file(sparse)?, n)?;
    let j = match levels {
        Some(j) => j,
        None => max_levels(n, rows, false)?.0,
    };
    let fact = factorize_gft(g, rows, j)?;
    let resid = factorization_residual(&fact)?;
    let coarse = spectral_reduce(g, j)?;
    let (filtered, y) = sample_via_pipeline(&GraphSignal::new(x.dense()), &fact)?;
    let direct = sample_gft(&x, rows)?;
    let dev = (&y.y - &direct.y)
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    println!("levels: {j}");
    println!("coarse_n: {}", coarse.n());
    println!("factorization_residual: {}", fmt_float(resid));
    println!("pipeline_vs_direct: {}", fmt_float(dev));
    if let Some(dir) = out_dir {
        write_file(
            &dir.join("coarse_graph.json"),
            &graph_json(&GraphDescription::Circulant(coarse)),
        )?;
        write_file(&dir.join("filtered.csv"), &write_signal_csv(filtered.values()))?;
        write_file(&dir.join("samples.csv"), &write_samples_csv(&y))?;
    }
    let tol = tol_from_env(1e-8);
    if resid > tol || dev > tol {
        return Err(GfriError::Numerical(format!(
            "pipeline deviates by {:.2e} (tolerance {tol:.2e})",
            resid.max(dev)
        )));
    }
    Ok(())
}

fn cmd_coarsen(graph: &Path, scheme: SchemeArg, levels: usize, out: Option<&Path>) -> Result<()> {
    let desc = load_graph(graph)?;
    let g = circulant_of(&desc)?;
    match scheme {
        SchemeArg::Spectral | SchemeArg::SameGeneratingSet => {
            let mut cur = g.clone();
            for _ in 0..levels {
                cur = match scheme {
                    SchemeArg::Spectral => spectral_reduce(&cur, 1)?,
                    _ => same_generating_set_coarsen(&cur)?,
                };
            }
            let text = graph_json(&GraphDescription::Circulant(cur));
            println!("{text}");
            if let Some(path) = out {
                write_file(path, &text)?;
            }
        }
        SchemeArg::Kron => {
            let mut result = None;
            let mut cur = g.clone();
            for _ in 0..levels {
                let keep: Vec<usize> = (0..cur.n()).step_by(2).collect();
                let r = kron_reduce_graph(&cur, &keep)?;
                cur = r.graph.clone().ok_or_else(|| {
                    GfriError::Numerical("Kron reduction left the circulant family".into())
                })?;
                result = Some(r);
            }
            let r = result.ok_or_else(|| GfriError::Precondition("levels must be positive".into()))?;
            let text = graph_json(&GraphDescription::Circulant(cur));
            println!("{text}");
            if let Some(path) = out {
                write_file(path, &text)?;
                let lap = path.with_extension("laplacian.csv");
                write_file(&lap, &write_matrix_csv(&r.laplacian))?;
            }
        }
    }
    Ok(())
}

fn cmd_product(graph1: &Path, graph2: &Path, kind: &str, out: Option<&Path>) -> Result<()> {
    let a1 = load_graph(graph1)?.adjacency();
    let a2 = load_graph(graph2)?.adjacency();
    let kind: ProductKind = kind.parse()?;
    let prod = graph_product(&a1, &a2, kind)?;
    println!("n: {}", prod.n());
    let csv = write_matrix_csv(&prod.adjacency);
    if let Some(path) = out {
        write_file(path, &csv)?;
    } else {
        print!("{csv}");
    }
    Ok(())
}

fn cmd_approx(matrix: &Path, n1: Option<usize>, n2: Option<usize>, out_dir: Option<&Path>) -> Result<()> {
    let a = read_matrix_csv(&read_file(matrix)?)?;
    match (n1, n2) {
        (Some(n1), Some(n2)) => {
            let r = nearest_kronecker_circulant(&a, n1, n2)?;
            let final_resid = r.residuals.last().copied().unwrap_or(0.0);
            println!("iterations: {}", r.residuals.len());
            println!("residual: {}", fmt_float(final_resid));
            if let Some(dir) = out_dir {
                write_file(&dir.join("factor1.csv"), &write_matrix_csv(&r.factor1))?;
                write_file(&dir.join("factor2.csv"), &write_matrix_csv(&r.factor2))?;
                let log = DVector::from_vec(r.residuals.clone());
                let mut csv = String::from("iteration,residual\n");
                for (i, v) in log.iter().enumerate() {
                    csv.push_str(&format!("{i},{}\n", fmt_float(*v)));
                }
                write_file(&dir.join("residuals.csv"), &csv)?;
            }
        }
        (None, None) => {
            let p = nearest_circulant(&a)?;
            println!("residual: {}", fmt_float((&a - &p).norm()));
            if let Some(dir) = out_dir {
                write_file(&dir.join("circulant.csv"), &write_matrix_csv(&p))?;
            }
        }
        _ => {
            return Err(GfriError::InvalidGraph(
                "provide both --n1 and --n2, or neither".into(),
            ))
        }
    }
    Ok(())
}
