#include "cpcag/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "cpcag/eigs.hpp"
#include "cpcag/rng.hpp"

namespace cpcag {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Tag any stage failure with the stage name so the CLI can abort usefully.
template <class F>
auto run_stage(PipelineReport& rep, const char* name, F&& body) {
  const auto t0 = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      rep.stages.push_back({name, ms_since(t0)});
    } else {
      auto out = body();
      rep.stages.push_back({name, ms_since(t0)});
      return out;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
  }
}

const char* kind_name(LaplacianKind k) {
  return k == LaplacianKind::combinatorial ? "combinatorial" : "normalized";
}
LaplacianKind kind_from_name(const std::string& s) {
  if (s == "combinatorial") return LaplacianKind::combinatorial;
  if (s == "normalized") return LaplacianKind::normalized;
  throw std::runtime_error("unknown laplacian kind: " + s);
}

const char* task_name(Task t) {
  switch (t) {
    case Task::lowrank: return "lowrank";
    case Task::cluster: return "cluster";
    default: return "both";
  }
}
Task task_from_name(const std::string& s) {
  if (s == "lowrank") return Task::lowrank;
  if (s == "cluster") return Task::cluster;
  if (s == "both") return Task::both;
  throw std::runtime_error("unknown task: " + s);
}

const char* noise_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::laplacian: return "laplacian";
    default: return "sparse";
  }
}
NoiseKind noise_from_name(const std::string& s) {
  if (s == "none") return NoiseKind::none;
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "laplacian") return NoiseKind::laplacian;
  if (s == "sparse") return NoiseKind::sparse;
  throw std::runtime_error("unknown noise kind: " + s);
}

const char* variant_name(DecoderVariant v) {
  switch (v) {
    case DecoderVariant::ideal: return "ideal";
    case DecoderVariant::alternate: return "alternate";
    case DecoderVariant::approx: return "approx";
    case DecoderVariant::approx2: return "approx2";
    default: return "approx3";
  }
}
DecoderVariant variant_from_name(const std::string& s) {
  if (s == "ideal") return DecoderVariant::ideal;
  if (s == "alternate") return DecoderVariant::alternate;
  if (s == "approx") return DecoderVariant::approx;
  if (s == "approx2") return DecoderVariant::approx2;
  if (s == "approx3") return DecoderVariant::approx3;
  throw std::runtime_error("unknown decoder variant: " + s);
}

const char* synth_name(SynthKind k) {
  switch (k) {
    case SynthKind::none: return "none";
    case SynthKind::lowrank: return "lowrank";
    default: return "blobs";
  }
}
SynthKind synth_from_name(const std::string& s) {
  if (s == "none") return SynthKind::none;
  if (s == "lowrank") return SynthKind::lowrank;
  if (s == "blobs") return SynthKind::blobs;
  throw std::runtime_error("unknown synthetic kind: " + s);
}

}  // namespace

std::string config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["input_path"] = c.input_path;
  j["input_format"] = c.input_format == MatrixFormat::csv ? "csv" : "glr1";
  j["synth"] = {
      {"kind", synth_name(c.synth.kind)}, {"p", c.synth.p},     {"n", c.synth.n},
      {"k_r", c.synth.k_r},               {"k_c", c.synth.k_c}, {"eta", c.synth.eta},
      {"k", c.synth.k},                   {"separation", c.synth.separation},
      {"spread", c.synth.spread}};
  j["graph_r_path"] = c.graph_r_path;
  j["graph_c_path"] = c.graph_c_path;
  j["knn"] = c.knn;
  j["laplacian"] = kind_name(c.laplacian);
  j["sigma2"] = c.sigma2;
  j["a"] = c.a;
  j["b"] = c.b;
  j["rho_r_override"] = c.rho_r_override;
  j["rho_c_override"] = c.rho_c_override;
  j["delta"] = c.delta;
  j["epsilon"] = c.epsilon;
  j["kron_pcg_tol"] = c.kron_pcg_tol;
  j["frpcag"] = {{"gamma_r", c.frpcag.gamma_r},
                 {"gamma_c", c.frpcag.gamma_c},
                 {"loss", c.frpcag.loss == Loss::l1 ? "l1" : "l2"},
                 {"tol", c.frpcag.tol},
                 {"max_iter", c.frpcag.max_iter},
                 {"step", c.frpcag.step}};
  j["decoder"] = {{"variant", variant_name(c.decoder.variant)},
                  {"gamma", c.decoder.gamma},
                  {"gammap_r", c.decoder.gammap_r},
                  {"gammap_c", c.decoder.gammap_c},
                  {"delta_for_scaling", c.decoder.delta_for_scaling},
                  {"rank_threshold", c.decoder.rank_threshold},
                  {"pcg_tol", c.decoder.pcg_tol},
                  {"pcg_max_iter", c.decoder.pcg_max_iter}};
  j["task"] = task_name(c.task);
  j["n_clusters"] = c.n_clusters;
  j["kmeans_restarts"] = c.kmeans_restarts;
  j["noise"] = {{"kind", noise_name(c.noise.kind)}, {"level", c.noise.level}, {"seed", c.noise.seed}};
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  return j.dump(2);
}

PipelineConfig config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  PipelineConfig c;
  c.input_path = j.value("input_path", std::string{});
  c.input_format = j.value("input_format", std::string{"csv"}) == "glr1" ? MatrixFormat::glr1
                                                                         : MatrixFormat::csv;
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    c.synth.kind = synth_from_name(s.value("kind", std::string{"none"}));
    c.synth.p = s.value("p", Index{0});
    c.synth.n = s.value("n", Index{0});
    c.synth.k_r = s.value("k_r", Index{0});
    c.synth.k_c = s.value("k_c", Index{0});
    c.synth.eta = s.value("eta", 0.0);
    c.synth.k = s.value("k", Index{0});
    c.synth.separation = s.value("separation", 10.0);
    c.synth.spread = s.value("spread", 1.0);
  }
  c.graph_r_path = j.value("graph_r_path", std::string{});
  c.graph_c_path = j.value("graph_c_path", std::string{});
  c.knn = j.value("knn", Index{10});
  c.laplacian = kind_from_name(j.value("laplacian", std::string{"combinatorial"}));
  c.sigma2 = j.value("sigma2", 0.0);
  c.a = j.value("a", Index{1});
  c.b = j.value("b", Index{1});
  c.rho_r_override = j.value("rho_r_override", Index{0});
  c.rho_c_override = j.value("rho_c_override", Index{0});
  c.delta = j.value("delta", 0.5);
  c.epsilon = j.value("epsilon", 0.1);
  c.kron_pcg_tol = j.value("kron_pcg_tol", 1e-11);
  if (j.contains("frpcag")) {
    const auto& f = j.at("frpcag");
    c.frpcag.gamma_r = f.value("gamma_r", 1.0);
    c.frpcag.gamma_c = f.value("gamma_c", 1.0);
    c.frpcag.loss = f.value("loss", std::string{"l1"}) == "l2" ? Loss::l2 : Loss::l1;
    c.frpcag.tol = f.value("tol", 1e-10);
    c.frpcag.max_iter = f.value("max_iter", Index{500});
    c.frpcag.step = f.value("step", 0.0);
  }
  if (j.contains("decoder")) {
    const auto& d = j.at("decoder");
    c.decoder.variant = variant_from_name(d.value("variant", std::string{"approx"}));
    c.decoder.gamma = d.value("gamma", 1.0);
    c.decoder.gammap_r = d.value("gammap_r", 0.0);
    c.decoder.gammap_c = d.value("gammap_c", 0.0);
    c.decoder.delta_for_scaling = d.value("delta_for_scaling", 0.0);
    c.decoder.rank_threshold = d.value("rank_threshold", 0.1);
    c.decoder.pcg_tol = d.value("pcg_tol", 1e-10);
    c.decoder.pcg_max_iter = d.value("pcg_max_iter", Index{5000});
  }
  c.task = task_from_name(j.value("task", std::string{"lowrank"}));
  c.n_clusters = j.value("n_clusters", Index{0});
  c.kmeans_restarts = j.value("kmeans_restarts", Index{10});
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    c.noise.kind = noise_from_name(n.value("kind", std::string{"none"}));
    c.noise.level = n.value("level", 0.0);
    c.noise.seed = n.value("seed", std::uint64_t{0});
  }
  c.seed = j.value("seed", std::uint64_t{0});
  c.out_dir = j.value("out_dir", std::string{});
  return c;
}

double PipelineReport::stage_ms(const std::string& name) const {
  for (const StageTiming& s : stages)
    if (s.name == name) return s.ms;
  return 0.0;
}

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  PipelineReport rep;
  rep.config = cfg;

  // ---- input ------------------------------------------------------------
  Matrix truth_matrix;
  std::vector<int> truth_labels;
  bool have_truth_matrix = false;
  bool synth_graphs = false;
  GraphModel graph_r, graph_c;

  Matrix Y = run_stage(rep, "input", [&]() -> Matrix {
    switch (cfg.synth.kind) {
      case SynthKind::lowrank: {
        SynthLowRank s = synth_lowrank(cfg.synth.p, cfg.synth.n, cfg.synth.k_r, cfg.synth.k_c,
                                       cfg.synth.eta, cfg.seed, cfg.laplacian);
        truth_matrix = s.Y;
        have_truth_matrix = true;
        truth_labels = s.col_labels;
        graph_r = std::move(s.row_graph);
        graph_c = std::move(s.col_graph);
        synth_graphs = true;
        return truth_matrix;
      }
      case SynthKind::blobs: {
        SynthBlobs s = synth_blobs(cfg.synth.p, cfg.synth.n, cfg.synth.k, cfg.synth.separation,
                                   cfg.synth.spread, cfg.seed);
        truth_labels = s.labels;
        return s.Y;
      }
      case SynthKind::none:
        if (cfg.input_path.empty())
          throw std::invalid_argument("no input path and no synthetic spec");
        return load_matrix(cfg.input_path, cfg.input_format);
    }
    throw std::logic_error("unreachable");
  });

  rep.p = Y.rows();
  rep.n = Y.cols();

  if (cfg.noise.kind != NoiseKind::none)
    Y = run_stage(rep, "noise", [&] { return add_noise(Y, cfg.noise); });

  // ---- graphs -------------------------------------------------------------
  run_stage(rep, "graphs", [&] {
    if (synth_graphs) return;
    if (!cfg.graph_r_path.empty())
      graph_r = graph_from_adjacency(load_sparse(cfg.graph_r_path), cfg.laplacian);
    else
      graph_r = build_knn_graph(Y, Axis::rows, cfg.knn, cfg.laplacian, cfg.sigma2);
    if (!cfg.graph_c_path.empty())
      graph_c = graph_from_adjacency(load_sparse(cfg.graph_c_path), cfg.laplacian);
    else
      graph_c = build_knn_graph(Y, Axis::cols, cfg.knn, cfg.laplacian, cfg.sigma2);
    if (graph_r.n_nodes != rep.p || graph_c.n_nodes != rep.n)
      throw std::invalid_argument("graph sizes do not match the data matrix");
  });

  // ---- sampling plan ------------------------------------------------------
  rep.plan = run_stage(rep, "plan", [&] {
    if (cfg.a < 1 || cfg.b < 1)
      throw std::invalid_argument("downsampling factors must be integers >= 1");
    Index rho_r = cfg.rho_r_override > 0
                      ? cfg.rho_r_override
                      : static_cast<Index>((rep.p + cfg.b - 1) / cfg.b);
    Index rho_c = cfg.rho_c_override > 0
                      ? cfg.rho_c_override
                      : static_cast<Index>((rep.n + cfg.a - 1) / cfg.a);
    rho_r = std::min(rho_r, rep.p);
    rho_c = std::min(rho_c, rep.n);
    return draw_plan(rep.p, rep.n, rho_r, rho_c, cfg.delta, cfg.epsilon, cfg.seed);
  });
  rep.rho_r = rep.plan.rho_r();
  rep.rho_c = rep.plan.rho_c();
  const bool full_sampling = rep.rho_r == rep.p && rep.rho_c == rep.n;

  const Matrix Yt = run_stage(rep, "subsample", [&] { return subsample(Y, rep.plan); });

  // ---- Kron reduction -----------------------------------------------------
  SparseMatrix Lr_small, Lc_small;
  run_stage(rep, "kron", [&] {
    Lr_small = kron_reduce(graph_r.laplacian, rep.plan.omega_r, cfg.kron_pcg_tol);
    Lc_small = kron_reduce(graph_c.laplacian, rep.plan.omega_c, cfg.kron_pcg_tol);
  });

  // ---- compressed solve -----------------------------------------------------
  rep.Xt = run_stage(rep, "solve", [&] {
    auto [X, trace] = fista_solve(Yt, Lr_small, Lc_small, cfg.frpcag);
    rep.trace = std::move(trace);
    return X;
  });
  const SvdResult xt_svd = thin_svd(rep.Xt);
  rep.detected_rank = detect_rank(xt_svd.sigma, cfg.decoder.rank_threshold);

  // ---- decode ---------------------------------------------------------------
  if (cfg.task == Task::lowrank || cfg.task == Task::both) {
    rep.X = run_stage(rep, "decode", [&]() -> Matrix {
      if (full_sampling) {
        // No compression: scatter the solution back through the sampling
        // permutation; there is nothing to decode.
        Matrix X(rep.p, rep.n);
        for (Index j = 0; j < rep.rho_c; ++j)
          for (Index i = 0; i < rep.rho_r; ++i)
            X(rep.plan.omega_r[static_cast<std::size_t>(i)],
              rep.plan.omega_c[static_cast<std::size_t>(j)]) = rep.Xt(i, j);
        return X;
      }
      switch (cfg.decoder.variant) {
        case DecoderVariant::ideal: {
          const Index k = std::max<Index>(1, rep.detected_rank);
          const EigenPairs Pk = sym_eig(graph_r.laplacian, k);
          const EigenPairs Qk = sym_eig(graph_c.laplacian, k);
          return ideal_decode(rep.Xt, rep.plan, Pk, Qk).X;
        }
        case DecoderVariant::alternate: {
          const Index k = std::max<Index>(1, rep.detected_rank);
          const SpectralGap gr = spectral_gap(sym_eig(graph_r.laplacian, k + 1), k);
          const SpectralGap gc = spectral_gap(sym_eig(graph_c.laplacian, k + 1), k);
          return alternate_decode(rep.Xt, rep.plan, graph_r.laplacian, graph_c.laplacian, gr, gc,
                                  cfg.decoder)
              .X;
        }
        case DecoderVariant::approx: {
          ApproxDecodeResult r = approx_decode(rep.Xt, rep.plan, graph_r.laplacian,
                                               graph_c.laplacian, cfg.decoder);
          rep.factors = std::move(r.factors);
          rep.has_factors = true;
          return std::move(r.X);
        }
        case DecoderVariant::approx2:
          return approx_decode_onesided(rep.Xt, rep.plan, graph_r.laplacian, Y, Side::U,
                                        cfg.decoder);
        case DecoderVariant::approx3:
          return approx_decode_onesided(rep.Xt, rep.plan, graph_c.laplacian, Y, Side::V,
                                        cfg.decoder);
      }
      throw std::logic_error("unreachable");
    });
    if (have_truth_matrix && truth_matrix.norm() > 0.0)
      rep.rel_fro_error = (rep.X - truth_matrix).norm() / truth_matrix.norm();
  }

  // ---- clustering -----------------------------------------------------------
  if (cfg.task == Task::cluster || cfg.task == Task::both) {
    run_stage(rep, "cluster", [&] {
      const Index k = cfg.n_clusters > 0 ? cfg.n_clusters : std::max<Index>(1, rep.detected_rank);
      const ClusterLabels sampled =
          kmeans(rep.Xt, k, cfg.kmeans_restarts, CounterRng::mix(cfg.seed ^ 0x6b6d65616eULL));
      const ClusterLabels full = decode_labels(sampled, rep.plan, graph_c.laplacian,
                                               cfg.decoder.pcg_tol, cfg.decoder.pcg_max_iter);
      rep.labels = full.assignments;
      if (!truth_labels.empty()) {
        const int kt = 1 + *std::max_element(truth_labels.begin(), truth_labels.end());
        if (kt == static_cast<int>(k))
          rep.cluster_error =
              clustering_error(full, ClusterLabels::from_assignments(truth_labels, k));
      }
    });
  }

  if (!cfg.out_dir.empty()) emit_report(rep, cfg.out_dir);
  return rep;
}

std::string report_to_json(const PipelineReport& rep, bool include_timings) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_to_json(rep.config));
  j["p"] = rep.p;
  j["n"] = rep.n;
  j["rho_r"] = rep.rho_r;
  j["rho_c"] = rep.rho_c;
  j["seed"] = rep.config.seed;
  j["detected_rank"] = rep.detected_rank;
  if (rep.rel_fro_error >= 0.0) j["rel_fro_error"] = rep.rel_fro_error;
  if (rep.cluster_error >= 0.0) j["cluster_error"] = rep.cluster_error;
  j["solve"] = {{"iterations", rep.trace.iterations},
                {"converged", rep.trace.converged},
                {"final_rel_change", rep.trace.final_rel_change},
                {"step", rep.trace.step},
                {"objective", rep.trace.objective}};
  if (include_timings) {
    nlohmann::json t = nlohmann::json::object();
    for (const StageTiming& s : rep.stages) t[s.name] = s.ms;
    j["timings_ms"] = t;
  }
  return j.dump(2);
}

void emit_report(const PipelineReport& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  write_text_file((dir / "report.json").string(), report_to_json(rep, true) + "\n");
  save_plan(rep.plan, (dir / "plan.json").string());
  save_matrix(rep.Xt, (dir / "solution_compressed.glr1").string(), MatrixFormat::glr1);
  if (rep.X.size() > 0) {
    save_matrix(rep.X, (dir / "decoded.glr1").string(), MatrixFormat::glr1);
    save_matrix(rep.X, (dir / "decoded.csv").string(), MatrixFormat::csv);
  }
  if (rep.has_factors) save_factors(rep.factors, (dir / "factors.glr1").string());
  if (!rep.labels.empty()) save_labels_csv(rep.labels, (dir / "labels.csv").string());

  std::string series = "iteration,objective\n";
  for (std::size_t i = 0; i < rep.trace.objective.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, rep.trace.objective[i]);
    series += buf;
  }
  write_text_file((dir / "objective.csv").string(), series);
}

std::vector<GridCell> run_grid(const PipelineConfig& base, const std::vector<Index>& a_values,
                               const std::vector<Index>& b_values) {
  if (a_values.empty() || b_values.empty())
    throw std::invalid_argument("grid: empty factor list");
  std::vector<GridCell> cells;
  cells.reserve(a_values.size() * b_values.size());
  for (const Index b : b_values) {
    for (const Index a : a_values) {
      PipelineConfig cfg = base;
      cfg.a = a;
      cfg.b = b;
      cfg.out_dir.clear();
      cfg.seed = CounterRng::mix(base.seed ^ CounterRng::mix(static_cast<std::uint64_t>(a) << 32 |
                                                             static_cast<std::uint64_t>(b)));
      const PipelineReport rep = run_pipeline(cfg);
      GridCell cell;
      cell.a = a;
      cell.b = b;
      cell.cluster_error = rep.cluster_error;
      cell.rel_fro_error = rep.rel_fro_error;
      cell.detected_rank = rep.detected_rank;
      cell.solve_ms = rep.stage_ms("solve");
      cell.total_ms = 0.0;
      for (const StageTiming& s : rep.stages) cell.total_ms += s.ms;
      cells.push_back(cell);
    }
  }
  return cells;
}

void emit_grid(const std::vector<GridCell>& cells, const std::string& out_dir) {
  if (cells.empty()) throw std::invalid_argument("grid: nothing to emit");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  std::string csv = "a,b,cluster_error,rel_fro_error,detected_rank,solve_ms,total_ms\n";
  for (const GridCell& c : cells) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%lld,%lld,%.6g,%.6g,%lld,%.3f,%.3f\n",
                  static_cast<long long>(c.a), static_cast<long long>(c.b), c.cluster_error,
                  c.rel_fro_error, static_cast<long long>(c.detected_rank), c.solve_ms,
                  c.total_ms);
    csv += buf;
  }
  write_text_file((dir / "grid.csv").string(), csv);

  // Plot-ready error-vs-a series, one file per b.
  std::vector<Index> bs;
  for (const GridCell& c : cells)
    if (std::find(bs.begin(), bs.end(), c.b) == bs.end()) bs.push_back(c.b);
  for (const Index b : bs) {
    std::string series = "a,error\n";
    for (const GridCell& c : cells) {
      if (c.b != b) continue;
      const double err = c.cluster_error >= 0.0 ? c.cluster_error : c.rel_fro_error;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%lld,%.6g\n", static_cast<long long>(c.a), err);
      series += buf;
    }
    write_text_file((dir / ("error_vs_a_b" + std::to_string(b) + ".csv")).string(), series);
  }
}

}  // namespace cpcag
