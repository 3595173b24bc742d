use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qmsa_core::combinatorics::{count_report, count_report_for_lengths};
use qmsa_core::{
    build_cost_qubo, build_index_map, decode_bitstring, encode_alignment, oracle_report,
    p_sweep_with, qubo_to_ising, run_qaoa_with, sweep_series, AlignmentMatrix, Bitstring,
    CountReport, Decoded, QaoaResult, SequenceSet, Violation,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{histogram_rows, to_json, top_rows, write_csv, write_json};
use crate::{Format, Invalid, ModelKind};

/// Where results go: files under `--out`, and a summary on stdout.
pub struct Sink {
    out: Option<PathBuf>,
    format: Format,
}

impl Sink {
    pub fn new(out: Option<&Path>, format: Format) -> anyhow::Result<Self> {
        if let Some(dir) = out {
            std::fs::create_dir_all(dir)?;
        }
        Ok(Sink {
            out: out.map(Path::to_path_buf),
            format,
        })
    }

    fn json<T: Serialize>(&self, file: &str, cfg: &RunConfig, result: &T) -> anyhow::Result<()> {
        match &self.out {
            Some(dir) => write_json(&dir.join(file), cfg, result),
            None if self.format == Format::Json => {
                print!("{}", to_json(cfg, result)?);
                Ok(())
            }
            None => Ok(()),
        }
    }

    fn csv<T: Serialize>(&self, file: &str, cfg: &RunConfig, rows: &[T]) -> anyhow::Result<()> {
        match &self.out {
            Some(dir) => write_csv(&dir.join(file), cfg, rows),
            None => Ok(()),
        }
    }

    /// Text goes to stdout unless raw JSON was requested there.
    fn text(&self, summary: impl FnOnce() -> String) {
        if self.format == Format::Text || self.out.is_some() {
            print!("{}", summary());
        }
    }
}

#[derive(Debug, Serialize)]
struct QubitEntry {
    qubit: usize,
    string: usize,
    letter: usize,
    symbol: char,
    column: usize,
}

#[derive(Debug, Serialize)]
struct DecodedView {
    bitstring: Bitstring,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    alignment: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violations: Option<Vec<Violation>>,
}

#[derive(Debug, Serialize)]
struct EncodeReport {
    qubits: usize,
    strings: usize,
    columns: usize,
    lengths: Vec<usize>,
    reference: usize,
    index_map: Vec<QubitEntry>,
    /// Every string placed from column 0 without gaps in between.
    reference_alignment: Vec<String>,
    reference_bitstring: Bitstring,
    #[serde(skip_serializing_if = "Option::is_none")]
    encoded: Option<Bitstring>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decoded: Option<DecodedView>,
}

pub fn encode(
    cfg: &RunConfig,
    sink: &Sink,
    alignment: Option<&[String]>,
    bits: Option<&str>,
) -> anyhow::Result<()> {
    let seqs = cfg.sequences()?;
    let map = build_index_map(&seqs);
    let index_map = (0..map.total_qubits())
        .map(|k| {
            let (s, n, i) = map.triple(k).expect("index in range");
            QubitEntry {
                qubit: k,
                string: s,
                letter: n,
                symbol: seqs.string(s)[n].as_char(),
                column: i,
            }
        })
        .collect();
    let reference = AlignmentMatrix::left_justified(&seqs);
    let encoded = alignment
        .map(|rows| -> anyhow::Result<Bitstring> {
            let a = AlignmentMatrix::parse(rows)?;
            a.check_against(&seqs)?;
            Ok(encode_alignment(&a, &map)?)
        })
        .transpose()?;
    let decoded = bits
        .map(|text| -> anyhow::Result<DecodedView> {
            let b: Bitstring = text.parse()?;
            Ok(match decode_bitstring(&b, &seqs)? {
                Decoded::Alignment(a) => DecodedView {
                    bitstring: b,
                    feasible: true,
                    alignment: Some(a.to_strings()),
                    violations: None,
                },
                Decoded::Infeasible(r) => DecodedView {
                    bitstring: b,
                    feasible: false,
                    alignment: None,
                    violations: Some(r.violations),
                },
            })
        })
        .transpose()?;
    let report = EncodeReport {
        qubits: map.total_qubits(),
        strings: seqs.len(),
        columns: map.columns(),
        lengths: seqs.lengths(),
        reference: seqs.reference_index(),
        index_map,
        reference_bitstring: encode_alignment(&reference, &map)?,
        reference_alignment: reference.to_strings(),
        encoded,
        decoded,
    };
    sink.json("encode.json", cfg, &report)?;
    sink.text(|| encode_text(&seqs, &report));
    Ok(())
}

fn encode_text(seqs: &SequenceSet, r: &EncodeReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sequences: {}", seqs.to_strings().join(", "));
    let _ = writeln!(
        s,
        "n = {} qubits ({} strings, {} columns, reference string {})",
        r.qubits, r.strings, r.columns, r.reference
    );
    let _ = writeln!(s, "qubit  string  letter  symbol  column");
    for q in &r.index_map {
        let _ = writeln!(
            s,
            "{:>5}  {:>6}  {:>6}  {:>6}  {:>6}",
            q.qubit, q.string, q.letter, q.symbol, q.column
        );
    }
    let _ = writeln!(s, "reference placement: {}", r.reference_alignment.join(" / "));
    let _ = writeln!(s, "reference bitstring: {}", r.reference_bitstring);
    if let Some(b) = &r.encoded {
        let _ = writeln!(s, "encoded: {b}");
    }
    if let Some(d) = &r.decoded {
        match (&d.alignment, &d.violations) {
            (Some(a), _) => {
                let _ = writeln!(s, "decoded {}: {}", d.bitstring, a.join(" / "));
            }
            (None, Some(v)) => {
                let _ = writeln!(s, "decoded {}: infeasible, {} violation(s)", d.bitstring, v.len());
                for x in v {
                    let _ = writeln!(s, "  {x:?}");
                }
            }
            (None, None) => {}
        }
    }
    s
}

fn write_run(
    cfg: &RunConfig,
    sink: &Sink,
    seqs: &SequenceSet,
    r: &QaoaResult,
    json_name: &str,
    csv_suffix: &str,
) -> anyhow::Result<()> {
    let model = build_cost_qubo(seqs, &cfg.weights(seqs)?, &r.penalties);
    sink.json(json_name, cfg, r)?;
    sink.csv(&format!("histogram{csv_suffix}.csv"), cfg, &histogram_rows(r, seqs, &model)?)?;
    sink.csv(&format!("top10{csv_suffix}.csv"), cfg, &top_rows(r))?;
    Ok(())
}

fn solve_text(r: &QaoaResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "p = {}  qubits = {}  <H> = {:.6} (uniform {:.6})",
        r.p, r.qubits, r.best_expectation, r.uniform_expectation
    );
    let _ = writeln!(
        s,
        "global minimum {} (energy {}), probability {:.6}",
        r.global_min.bitstring, r.global_min.energy, r.probability_of_global_min
    );
    let _ = writeln!(s, "betas  = {:?}", r.best_params_wrapped.betas);
    let _ = writeln!(s, "gammas = {:?}", r.best_params_wrapped.gammas);
    let _ = writeln!(s, "rank  bitstring  count  probability  energy  alignment");
    for (k, t) in r.top.iter().enumerate() {
        let shown = t
            .alignment
            .as_ref()
            .map_or_else(|| "infeasible".to_string(), |a| a.join("/"));
        let _ = writeln!(
            s,
            "{:>4}  {}  {:>5}  {:>11.6}  {:>6}  {}",
            k + 1,
            t.bitstring,
            t.count,
            t.probability,
            t.energy,
            shown
        );
    }
    s
}

pub fn solve(cfg: &RunConfig, sink: &Sink) -> anyhow::Result<()> {
    let seqs = cfg.sequences()?;
    let weights = cfg.weights(&seqs)?;
    let r = run_qaoa_with(&seqs, &weights, cfg.p, &cfg.penalties, cfg.shots, &cfg.optimizer, None)?;
    write_run(cfg, sink, &seqs, &r, "result.json", "")?;
    sink.text(|| solve_text(&r));
    Ok(())
}

pub fn sweep(cfg: &RunConfig, sink: &Sink) -> anyhow::Result<()> {
    if cfg.p_list.is_empty() {
        return Err(Invalid("the p list is empty; pass --p-list 1,2,3".into()).into());
    }
    let seqs = cfg.sequences()?;
    let weights = cfg.weights(&seqs)?;
    let results = p_sweep_with(&seqs, &weights, &cfg.p_list, &cfg.penalties, cfg.shots, &cfg.optimizer)?;
    for r in &results {
        let suffix = format!("_p{}", r.p);
        write_run(cfg, sink, &seqs, r, &format!("result{suffix}.json"), &suffix)?;
    }
    let series = sweep_series(&results);
    match &sink.out {
        Some(_) => sink.csv("series.csv", cfg, &series)?,
        None => sink.json("series.json", cfg, &series)?,
    }
    sink.text(|| {
        let mut s = String::from("p  best_expectation  probability_of_global_min  sampled_frequency\n");
        for pt in &series {
            let _ = writeln!(
                s,
                "{}  {:.6}  {:.6}  {:.4}",
                pt.p, pt.best_expectation, pt.probability_of_global_min, pt.sampled_frequency_of_global_min
            );
        }
        s
    });
    Ok(())
}

pub fn count(cfg: &RunConfig, sink: &Sink) -> anyhow::Result<()> {
    let report: CountReport = match &cfg.lengths {
        Some(lengths) => count_report_for_lengths(lengths)?,
        None => count_report(&cfg.sequences()?),
    };
    sink.json("count.json", cfg, &report)?;
    sink.text(|| {
        let mut s = String::new();
        let _ = writeln!(s, "N = {}  L = {}  n = {} qubits", report.strings, report.columns, report.qubits);
        let _ = writeln!(
            s,
            "feasible alignments |S| = {} (log10 {:.6})",
            report.feasible_count, report.log10_feasible_count
        );
        let _ = writeln!(s, "log10 |H| = {:.6}", report.log10_hilbert_dim);
        let _ = writeln!(
            s,
            "fraction |S|/|H| = {:e} (log10 {:.6})",
            report.fraction, report.log10_fraction
        );
        let _ = writeln!(
            s,
            "upper bound = {:e} (log10 {:.6}), respected: {}",
            report.bound, report.log10_bound, report.fraction_within_bound
        );
        s
    });
    Ok(())
}

pub fn oracle(cfg: &RunConfig, sink: &Sink) -> anyhow::Result<()> {
    if cfg.scoring.is_some() {
        return Err(Invalid("the oracle uses the native scores; drop --scoring".into()).into());
    }
    let seqs = cfg.sequences()?;
    let report = oracle_report(&seqs, &cfg.penalties, cfg.top_k)?;
    sink.json("oracle.json", cfg, &report)?;
    sink.text(|| {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "global minimum {} energy {}",
            report.global_min_bitstring, report.global_min_energy
        );
        let _ = writeln!(
            s,
            "best feasible {} SP score {}",
            report.feasible_min_bitstring, report.feasible_min_sp_score
        );
        let cv = &report.cross_validation;
        let _ = writeln!(s, "consistent: {}", cv.consistent);
        for f in &cv.findings {
            let _ = writeln!(s, "  {f}");
        }
        let _ = writeln!(s, "lowest energies:");
        for e in &report.energy_histogram {
            let _ = writeln!(
                s,
                "  {}  {:>8}  {}",
                e.bitstring,
                e.energy,
                if e.feasible { "feasible" } else { "infeasible" }
            );
        }
        s
    });
    Ok(())
}

pub fn export(cfg: &RunConfig, sink: &Sink, kind: ModelKind) -> anyhow::Result<()> {
    let seqs = cfg.sequences()?;
    let qubo = build_cost_qubo(&seqs, &cfg.weights(&seqs)?, &cfg.penalties);
    let (file, json) = match kind {
        ModelKind::Qubo => ("qubo.json", qubo.to_json()),
        ModelKind::Ising => ("ising.json", qubo_to_ising(&qubo).to_json()),
    };
    sink.json(file, cfg, &json)?;
    sink.text(|| {
        format!(
            "{} model: {} variables, {} quadratic terms, constant {}\n",
            file.trim_end_matches(".json"),
            json.n,
            json.quadratic.len(),
            json.constant
        )
    });
    Ok(())
}
