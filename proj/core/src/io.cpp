#include "cpcag/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace cpcag {

namespace {

// GLR1 block kinds.
constexpr std::uint64_t kDenseBlock = 1;
constexpr std::uint64_t kCsrBlock = 2;
constexpr std::uint64_t kFactorsBlock = 3;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!f) fail(path, "cannot open for writing");
  return f;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) fail(path, "cannot open for reading");
  return f;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) fail(path, "truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_doubles(std::ostream& out, const double* data, std::size_t count) {
  static_assert(sizeof(double) == 8);
  // Little-endian host assumed (checked at load time via the magic).
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
}

void get_doubles(std::istream& in, double* data, std::size_t count, const std::string& path) {
  if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8)))
    fail(path, "truncated data section");
}

std::uint64_t open_glr1(std::istream& in, const std::string& path) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GLR1", 4) != 0)
    fail(path, "not a GLR1 container (bad magic)");
  return get_u64(in, path);
}

void write_glr1_header(std::ostream& out, std::uint64_t kind) {
  out.write("GLR1", 4);
  put_u64(out, kind);
}

double parse_double(const std::string& token, const std::string& path, Index line) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    fail(path, "malformed number '" + token + "' at line " + std::to_string(line));
  return v;
}

}  // namespace

void save_matrix(const Matrix& m, const std::string& path, MatrixFormat format) {
  if (format == MatrixFormat::glr1) {
    std::ofstream f = open_out(path, true);
    write_glr1_header(f, kDenseBlock);
    put_u64(f, static_cast<std::uint64_t>(m.rows()));
    put_u64(f, static_cast<std::uint64_t>(m.cols()));
    put_doubles(f, m.data(), static_cast<std::size_t>(m.size()));
    if (!f) fail(path, "write failed");
    return;
  }
  std::ofstream f = open_out(path, false);
  f << m.rows() << "," << m.cols() << "\n";
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      f << (j ? "," : "") << buf;
    }
    f << "\n";
  }
  if (!f) fail(path, "write failed");
}

Matrix load_matrix(const std::string& path, MatrixFormat format) {
  if (format == MatrixFormat::glr1) {
    std::ifstream f = open_in(path, true);
    if (open_glr1(f, path) != kDenseBlock) fail(path, "not a dense-matrix block");
    const auto rows = static_cast<Index>(get_u64(f, path));
    const auto cols = static_cast<Index>(get_u64(f, path));
    Matrix m(rows, cols);
    get_doubles(f, m.data(), static_cast<std::size_t>(m.size()), path);
    return m;
  }

  std::ifstream f = open_in(path, false);
  std::string line;
  if (!std::getline(f, line)) fail(path, "empty file");
  Index rows = 0, cols = 0;
  {
    std::istringstream head(line);
    std::string a, b;
    if (!std::getline(head, a, ',') || !std::getline(head, b))
      fail(path, "malformed dimension header at line 1");
    rows = static_cast<Index>(parse_double(a, path, 1));
    cols = static_cast<Index>(parse_double(b, path, 1));
    if (rows < 0 || cols < 0) fail(path, "negative dimensions in header");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(f, line)) fail(path, "missing row " + std::to_string(i + 1));
    std::istringstream row(line);
    std::string token;
    for (Index j = 0; j < cols; ++j) {
      if (!std::getline(row, token, ','))
        fail(path, "row " + std::to_string(i + 1) + " has fewer than " + std::to_string(cols) +
                       " columns");
      m(i, j) = parse_double(token, path, i + 2);
    }
    if (std::getline(row, token, ','))
      fail(path, "row " + std::to_string(i + 1) + " has more than " + std::to_string(cols) +
                     " columns (dimension header mismatch)");
  }
  return m;
}

void save_sparse(const SparseMatrix& m, const std::string& path) {
  std::ofstream f = open_out(path, true);
  write_glr1_header(f, kCsrBlock);
  put_u64(f, static_cast<std::uint64_t>(m.rows()));
  put_u64(f, static_cast<std::uint64_t>(m.cols()));
  put_u64(f, static_cast<std::uint64_t>(m.nonzeros()));
  for (const Index v : m.row_ptr()) put_u64(f, static_cast<std::uint64_t>(v));
  for (const Index v : m.col_idx()) put_u64(f, static_cast<std::uint64_t>(v));
  put_doubles(f, m.values().data(), m.values().size());
  if (!f) fail(path, "write failed");
}

SparseMatrix load_sparse(const std::string& path) {
  std::ifstream f = open_in(path, true);
  if (open_glr1(f, path) != kCsrBlock) fail(path, "not a CSR block");
  const auto rows = static_cast<Index>(get_u64(f, path));
  const auto cols = static_cast<Index>(get_u64(f, path));
  const auto nnz = static_cast<Index>(get_u64(f, path));

  std::vector<Index> row_ptr(static_cast<std::size_t>(rows) + 1);
  for (auto& v : row_ptr) v = static_cast<Index>(get_u64(f, path));
  std::vector<Index> col_idx(static_cast<std::size_t>(nnz));
  for (auto& v : col_idx) v = static_cast<Index>(get_u64(f, path));
  std::vector<double> values(static_cast<std::size_t>(nnz));
  get_doubles(f, values.data(), values.size(), path);

  if (row_ptr.front() != 0 || row_ptr.back() != nnz) fail(path, "inconsistent row pointers");
  std::vector<Triplet> trips;
  trips.reserve(values.size());
  for (Index r = 0; r < rows; ++r) {
    if (row_ptr[static_cast<std::size_t>(r)] > row_ptr[static_cast<std::size_t>(r) + 1])
      fail(path, "row pointers not monotone");
    for (Index k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
      trips.push_back({r, col_idx[static_cast<std::size_t>(k)], values[static_cast<std::size_t>(k)]});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(trips));
}

void save_edge_list_csv(const SparseMatrix& m, const std::string& path) {
  std::ofstream f = open_out(path, false);
  char buf[64];
  for (Index r = 0; r < m.rows(); ++r)
    for (Index k = m.row_ptr()[static_cast<std::size_t>(r)];
         k < m.row_ptr()[static_cast<std::size_t>(r) + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", m.values()[static_cast<std::size_t>(k)]);
      f << r << "," << m.col_idx()[static_cast<std::size_t>(k)] << "," << buf << "\n";
    }
  if (!f) fail(path, "write failed");
}

void save_factors(const LowRankFactors& fac, const std::string& path) {
  std::ofstream f = open_out(path, true);
  write_glr1_header(f, kFactorsBlock);
  put_u64(f, static_cast<std::uint64_t>(fac.U.rows()));
  put_u64(f, static_cast<std::uint64_t>(fac.V.rows()));
  put_u64(f, static_cast<std::uint64_t>(fac.k));
  put_u64(f, fac.scale_applied ? 1 : 0);
  put_doubles(f, fac.U.data(), static_cast<std::size_t>(fac.U.size()));
  put_doubles(f, fac.sigma.data(), static_cast<std::size_t>(fac.sigma.size()));
  put_doubles(f, fac.V.data(), static_cast<std::size_t>(fac.V.size()));
  if (!f) fail(path, "write failed");
}

LowRankFactors load_factors(const std::string& path) {
  std::ifstream f = open_in(path, true);
  if (open_glr1(f, path) != kFactorsBlock) fail(path, "not a factors block");
  LowRankFactors fac;
  const auto p = static_cast<Index>(get_u64(f, path));
  const auto n = static_cast<Index>(get_u64(f, path));
  fac.k = static_cast<Index>(get_u64(f, path));
  fac.scale_applied = get_u64(f, path) != 0;
  fac.U.resize(p, fac.k);
  fac.sigma.resize(fac.k);
  fac.V.resize(n, fac.k);
  get_doubles(f, fac.U.data(), static_cast<std::size_t>(fac.U.size()), path);
  get_doubles(f, fac.sigma.data(), static_cast<std::size_t>(fac.sigma.size()), path);
  get_doubles(f, fac.V.data(), static_cast<std::size_t>(fac.V.size()), path);
  return fac;
}

std::string plan_to_json(const SamplingPlan& plan) {
  nlohmann::json j;
  j["seed"] = plan.seed;
  j["p"] = plan.p;
  j["n"] = plan.n;
  j["omega_r"] = plan.omega_r;
  j["omega_c"] = plan.omega_c;
  j["delta"] = plan.delta;
  j["epsilon"] = plan.epsilon;
  return j.dump(2);
}

SamplingPlan plan_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SamplingPlan plan;
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.p = j.at("p").get<Index>();
  plan.n = j.at("n").get<Index>();
  plan.omega_r = j.at("omega_r").get<IndexList>();
  plan.omega_c = j.at("omega_c").get<IndexList>();
  plan.delta = j.at("delta").get<double>();
  plan.epsilon = j.at("epsilon").get<double>();

  for (const Index i : plan.omega_r)
    if (i < 0 || i >= plan.p) throw std::runtime_error("plan: omega_r index out of range");
  for (const Index i : plan.omega_c)
    if (i < 0 || i >= plan.n) throw std::runtime_error("plan: omega_c index out of range");
  return plan;
}

void save_plan(const SamplingPlan& plan, const std::string& path) {
  write_text_file(path, plan_to_json(plan) + "\n");
}

SamplingPlan load_plan(const std::string& path) { return plan_from_json(read_text_file(path)); }

void save_labels_csv(const std::vector<int>& labels, const std::string& path) {
  std::ofstream f = open_out(path, false);
  f << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) f << i << "," << labels[i] << "\n";
  if (!f) fail(path, "write failed");
}

std::vector<int> load_labels_csv(const std::string& path) {
  std::ifstream f = open_in(path, false);
  std::string line;
  if (!std::getline(f, line)) fail(path, "empty file");
  std::vector<int> labels;
  Index lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(path, "missing comma at line " + std::to_string(lineno));
    labels.push_back(static_cast<int>(parse_double(line.substr(comma + 1), path, lineno)));
  }
  return labels;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f = open_in(path, true);
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f = open_out(path, false);
  f << content;
  if (!f) fail(path, "write failed");
}

}  // namespace cpcag
