#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpcag/clustering.hpp"
#include "cpcag/decoders.hpp"
#include "cpcag/frpcag.hpp"
#include "cpcag/graph.hpp"
#include "cpcag/io.hpp"
#include "cpcag/sampling.hpp"
#include "cpcag/synth.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

enum class Task { lowrank, cluster, both };
enum class SynthKind { none, lowrank, blobs };

struct SynthSpec {
  SynthKind kind = SynthKind::none;
  Index p = 0;
  Index n = 0;
  Index k_r = 0;       // lowrank: planted row components
  Index k_c = 0;       // lowrank: planted column components
  double eta = 0.0;    // lowrank: inter-component bridge weight (0 = exact)
  Index k = 0;         // blobs: cluster count
  double separation = 10.0;
  double spread = 1.0;
};

// Full description of one end-to-end run. Downsampling follows the (a, b)
// factor convention: a divides the columns, b divides the rows, i.e.
// rho_r = ceil(p / b) and rho_c = ceil(n / a) unless overridden.
struct PipelineConfig {
  std::string input_path;  // matrix file; unused when synth.kind != none
  MatrixFormat input_format = MatrixFormat::csv;
  SynthSpec synth;
  std::string graph_r_path;  // optional prebuilt adjacency (GLR1 CSR)
  std::string graph_c_path;

  Index knn = 10;
  LaplacianKind laplacian = LaplacianKind::combinatorial;
  double sigma2 = 0.0;  // 0 = automatic bandwidth

  Index a = 1;
  Index b = 1;
  Index rho_r_override = 0;  // raw sample-count overrides (0 = use factors)
  Index rho_c_override = 0;
  double delta = 0.5;
  double epsilon = 0.1;
  double kron_pcg_tol = 1e-11;

  FrpcagConfig frpcag;
  DecoderConfig decoder;
  Task task = Task::lowrank;
  Index n_clusters = 0;
  Index kmeans_restarts = 10;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  std::string out_dir;  // empty = no artifacts written by run_pipeline
};

std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& text);

struct StageTiming {
  std::string name;
  double ms = 0.0;
};

struct PipelineReport {
  PipelineConfig config;
  Index p = 0;
  Index n = 0;
  Index rho_r = 0;
  Index rho_c = 0;
  Index detected_rank = 0;
  double rel_fro_error = -1.0;    // vs ground truth; -1 when unavailable
  double cluster_error = -1.0;    // vs ground-truth labels; -1 when unavailable
  double uncompressed_ratio = 0.0;
  SolveTrace trace;
  std::vector<StageTiming> stages;

  SamplingPlan plan;
  Matrix Xt;               // compressed low-rank solution
  Matrix X;                // decoded matrix (lowrank/both tasks)
  std::vector<int> labels; // decoded labels (cluster/both tasks)
  LowRankFactors factors;  // approximate decoder only
  bool has_factors = false;

  double stage_ms(const std::string& name) const;
};

// Runs: input -> noise -> graphs -> plan -> subsample -> Kron reduction ->
// FISTA -> decode (task-dependent) -> metrics. Any stage failure raises a
// runtime_error tagged with the stage name. Artifacts land in
// config.out_dir when set.
PipelineReport run_pipeline(const PipelineConfig& cfg);

// Everything except wall-clock timings is a pure function of config+seed;
// serializing without timings gives a byte-stable reproducibility witness.
std::string report_to_json(const PipelineReport& rep, bool include_timings);

// report.json, plan.json, compressed + decoded matrices, labels, and the
// objective-vs-iteration series.
void emit_report(const PipelineReport& rep, const std::string& out_dir);

struct GridCell {
  Index a = 0;
  Index b = 0;
  double cluster_error = -1.0;
  double rel_fro_error = -1.0;
  Index detected_rank = 0;
  double solve_ms = 0.0;
  double total_ms = 0.0;
};

// One pipeline run per (a, b) pair; per-cell seeds derived from the base
// seed so cells are order-independent.
std::vector<GridCell> run_grid(const PipelineConfig& base, const std::vector<Index>& a_values,
                               const std::vector<Index>& b_values);

// grid.csv plus one error-vs-a series file per b value.
void emit_grid(const std::vector<GridCell>& cells, const std::string& out_dir);

}  // namespace cpcag
