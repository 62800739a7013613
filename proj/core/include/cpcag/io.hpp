#pragma once

#include <string>

#include "cpcag/decoders.hpp"
#include "cpcag/graph.hpp"
#include "cpcag/sampling.hpp"
#include "cpcag/sparse.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

enum class MatrixFormat { csv, glr1 };

// CSV layout: first line "rows,cols", then one line per row with 17
// significant digits (lossless for doubles). The GLR1 container is binary
// and bit-exact: magic "GLR1", a u64 block kind, little-endian u64
// dimensions, then raw arrays.
void save_matrix(const Matrix& m, const std::string& path, MatrixFormat format);
Matrix load_matrix(const std::string& path, MatrixFormat format);

// CSR block in the GLR1 container.
void save_sparse(const SparseMatrix& m, const std::string& path);
SparseMatrix load_sparse(const std::string& path);

// Debug edge list: one "i,j,w" line per stored entry.
void save_edge_list_csv(const SparseMatrix& m, const std::string& path);

// Factors block in the GLR1 container (U, sigma, V, k, scale flag).
void save_factors(const LowRankFactors& f, const std::string& path);
LowRankFactors load_factors(const std::string& path);

// Plan JSON: {seed, p, n, omega_r, omega_c, delta, epsilon}.
std::string plan_to_json(const SamplingPlan& plan);
SamplingPlan plan_from_json(const std::string& text);
void save_plan(const SamplingPlan& plan, const std::string& path);
SamplingPlan load_plan(const std::string& path);

void save_labels_csv(const std::vector<int>& labels, const std::string& path);
std::vector<int> load_labels_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cpcag
