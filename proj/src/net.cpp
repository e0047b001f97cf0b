#include "linkpred/net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "linkpred/error.hpp"

namespace linkpred {

namespace {

bool is_binary(const Matrix& m) {
  return (m.array() == 0.0 || m.array() == 1.0).all();
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

// Strips a trailing '#' comment and surrounding whitespace.
std::string_view strip(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  const auto first = line.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = line.find_last_not_of(" \t\r\n");
  return line.substr(first, last - first + 1);
}

struct PairLine {
  long long i;
  long long j;
};

std::optional<PairLine> parse_pair_line(const std::string& raw,
                                        const std::filesystem::path& path,
                                        std::size_t line_no) {
  const auto line = strip(raw);
  if (line.empty()) return std::nullopt;
  std::istringstream fields{std::string(line)};
  PairLine p{};
  std::string rest;
  if (!(fields >> p.i >> p.j) || (fields >> rest)) {
    throw InputError(path.string() + ":" + std::to_string(line_no) +
                     ": expected 'i j', got '" + std::string(line) + "'");
  }
  return p;
}

template <typename Visit>
void for_each_pair(const std::filesystem::path& path, Index n, Visit&& visit) {
  auto in = open_for_read(path);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto p = parse_pair_line(raw, path, line_no);
    if (!p) continue;
    if (p->i < 0 || p->j < 0 || p->i >= n || p->j >= n) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": node index out of range [0, " + std::to_string(n) +
                       ")");
    }
    visit(static_cast<Index>(p->i), static_cast<Index>(p->j));
  }
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
}

}  // namespace

AdjacencyMatrix::AdjacencyMatrix(Index n, bool directed)
    : entries_(Matrix::Zero(n, n)), directed_(directed) {
  if (n < 0) throw DomainError("node count must be nonnegative");
}

AdjacencyMatrix::AdjacencyMatrix(Matrix entries, bool directed)
    : entries_(std::move(entries)), directed_(directed) {
  if (entries_.rows() != entries_.cols()) {
    throw InputError("adjacency matrix must be square");
  }
  if (!is_binary(entries_)) throw InputError("adjacency entries must be 0 or 1");
  if ((entries_.diagonal().array() != 0.0).any()) {
    throw InputError("adjacency matrix must have a zero diagonal");
  }
  if (!directed_ && entries_ != entries_.transpose()) {
    throw InputError("undirected adjacency matrix must be symmetric");
  }
}

void AdjacencyMatrix::set_edge(Index i, Index j, bool present) {
  if (i == j) throw DomainError("self-loops are not representable");
  const double v = present ? 1.0 : 0.0;
  entries_(i, j) = v;
  if (!directed_) entries_(j, i) = v;
}

std::size_t AdjacencyMatrix::edge_count() const {
  const double total = entries_.sum();
  return static_cast<std::size_t>(directed_ ? total : total / 2.0);
}

std::vector<NodePair> AdjacencyMatrix::edges() const {
  std::vector<NodePair> out;
  const Index n = size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = directed_ ? 0 : i + 1; j < n; ++j) {
      if (entries_(i, j) != 0.0) out.push_back({i, j});
    }
  }
  return out;
}

ObservationMask::ObservationMask(Index n, bool value)
    : entries_(Matrix::Constant(n, n, value ? 1.0 : 0.0)) {}

ObservationMask::ObservationMask(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw InputError("observation mask must be square");
  }
  if (!is_binary(entries_)) throw InputError("mask entries must be 0 or 1");
}

double ObservationMask::count_known(bool directed) const {
  double total = 0.0;
  const Index n = size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = directed ? 0 : i + 1; j < n; ++j) {
      if (i != j) total += entries_(i, j);
    }
  }
  return total;
}

CovariateTable::CovariateTable(Matrix values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw InputError("covariates must be finite");
}

EdgeListRead read_edge_list(const std::filesystem::path& path, Index n,
                            bool directed) {
  EdgeListRead result{AdjacencyMatrix(n, directed), 0};
  for_each_pair(path, n, [&](Index i, Index j) {
    if (i == j) {
      ++result.self_loops_skipped;
      return;
    }
    result.adjacency.set_edge(i, j);
  });
  return result;
}

Index infer_node_count(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string raw;
  std::size_t line_no = 0;
  long long max_index = -1;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto p = parse_pair_line(raw, path, line_no)) {
      if (p->i < 0 || p->j < 0) {
        throw InputError(path.string() + ":" + std::to_string(line_no) +
                         ": negative node index");
      }
      max_index = std::max({max_index, p->i, p->j});
    }
  }
  return static_cast<Index>(max_index + 1);
}

void write_edge_list(const AdjacencyMatrix& a, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& e : a.edges()) out << e.i << ' ' << e.j << '\n';
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

ObservationMask read_mask(const std::filesystem::path& path, Index n,
                          bool symmetric) {
  ObservationMask mask(n, false);
  for_each_pair(path, n, [&](Index i, Index j) {
    mask.set(i, j, true);
    if (symmetric) mask.set(j, i, true);
  });
  return mask;
}

void write_mask(const ObservationMask& mask, bool directed,
                const std::filesystem::path& path) {
  auto out = open_for_write(path);
  const Index n = mask.size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = directed ? 0 : i + 1; j < n; ++j) {
      if (i != j && mask.known(i, j)) out << i << ' ' << j << '\n';
    }
  }
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

CovariateTable read_covariates(const std::filesystem::path& path,
                               bool skip_header) {
  auto in = open_for_read(path);
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    const auto line = strip(raw);
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto comma = line.find(',', start);
      if (comma == std::string_view::npos) comma = line.size();
      auto field = strip(line.substr(start, comma - start));
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc{} ||
          ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw InputError(path.string() + ":" + std::to_string(line_no) +
                         ": non-numeric covariate '" + std::string(field) + "'");
      }
      row.push_back(v);
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(rows.front().size()) +
                       " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("no covariate rows in '" + path.string() + "'");
  Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index k = 0; k < x.cols(); ++k) x(i, k) = rows[i][k];
  }
  return CovariateTable(std::move(x));
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

}  // namespace linkpred
