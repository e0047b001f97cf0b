#include "linkpred/scores.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "linkpred/error.hpp"

namespace linkpred {

ScoreMatrix::ScoreMatrix(Matrix entries, bool directed)
    : entries_(std::move(entries)), directed_(directed) {
  if (entries_.rows() != entries_.cols()) {
    throw InputError("score matrix must be square");
  }
  entries_.diagonal().setZero();
}

void write_scores(const ScoreMatrix& scores, const ObservationMask* mask,
                  const std::filesystem::path& path) {
  const Index n = scores.size();
  if (mask && mask->size() != n) {
    throw DomainError("score matrix and mask sizes differ");
  }
  struct Row {
    Index i;
    Index j;
    double score;
  };
  std::vector<Row> rows;
  for (Index i = 0; i < n; ++i) {
    for (Index j = scores.directed() ? 0 : i + 1; j < n; ++j) {
      if (i == j || (mask && !mask->known(i, j))) continue;
      if (!std::isfinite(scores(i, j))) {
        throw DomainError("non-finite score for pair (" + std::to_string(i) +
                          ", " + std::to_string(j) + ")");
      }
      rows.push_back({i, j, scores(i, j)});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "i,j,score\n";
  for (const auto& r : rows) {
    out << r.i << ',' << r.j << ',' << format_double(r.score) << '\n';
  }
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

ScoreMatrix read_scores(const std::filesystem::path& path, Index n, bool directed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  Matrix f = Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("i,j", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    long long i = 0;
    long long j = 0;
    double v = 0.0;
    if (!(fields >> i >> j >> v)) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 'i,j,score'");
    }
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": node index out of range [0, " + std::to_string(n) + ")");
    }
    f(i, j) = v;
    if (!directed) f(j, i) = v;
  }
  return ScoreMatrix(std::move(f), directed);
}

}  // namespace linkpred
