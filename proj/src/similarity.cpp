#include "linkpred/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "linkpred/error.hpp"

namespace linkpred {

SimilarityMatrix::SimilarityMatrix(Matrix dense)
    : n_(dense.rows()), dense_(std::move(dense)) {
  if (dense_->rows() != dense_->cols()) {
    throw InputError("similarity matrix must be square");
  }
  validate();
}

SimilarityMatrix::SimilarityMatrix(SparseMatrix sparse)
    : n_(sparse.rows()), sparse_(std::move(sparse)) {
  if (sparse_->rows() != sparse_->cols()) {
    throw InputError("similarity matrix must be square");
  }
  sparse_->makeCompressed();
  validate();
}

SimilarityMatrix SimilarityMatrix::identity(Index n) {
  return SimilarityMatrix(Matrix(Matrix::Identity(n, n)));
}

void SimilarityMatrix::validate() const {
  for (Index i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 1.0) {
      throw InputError("similarity diagonal must be 1 (row " +
                       std::to_string(i) + ")");
    }
    for (const auto& e : row_nonzeros(i)) {
      if (!(e.value >= 0.0 && e.value <= 1.0)) {
        throw InputError("similarity entries must lie in [0, 1]");
      }
      if ((*this)(e.col, i) != e.value) {
        throw InputError("similarity matrix must be symmetric");
      }
    }
  }
}

double SimilarityMatrix::operator()(Index i, Index j) const {
  return dense_ ? (*dense_)(i, j) : sparse_->coeff(i, j);
}

Matrix SimilarityMatrix::to_dense() const {
  if (dense_) return *dense_;
  return Matrix(*sparse_);
}

std::vector<SimilarityMatrix::Entry> SimilarityMatrix::row_nonzeros(Index i) const {
  std::vector<Entry> out;
  if (dense_) {
    for (Index j = 0; j < n_; ++j) {
      const double v = (*dense_)(i, j);
      if (v != 0.0) out.push_back({j, v});
    }
  } else {
    for (SparseMatrix::InnerIterator it(*sparse_, i); it; ++it) {
      if (it.value() != 0.0) out.push_back({it.col(), it.value()});
    }
  }
  return out;
}

std::size_t SimilarityMatrix::offdiag_nonzeros() const {
  std::size_t count = 0;
  for (Index i = 0; i < n_; ++i) {
    for (const auto& e : row_nonzeros(i)) count += (e.col != i) ? 1 : 0;
  }
  return count;
}

SimilarityMatrix SimilarityMatrix::with_auto_storage(double max_density) const {
  const double offdiag = static_cast<double>(n_) * static_cast<double>(n_ - 1);
  const bool go_sparse =
      offdiag > 0 && static_cast<double>(offdiag_nonzeros()) <= max_density * offdiag;
  if (go_sparse == is_sparse()) return *this;
  if (go_sparse) return SimilarityMatrix(SparseMatrix(dense_->sparseView()));
  return SimilarityMatrix(to_dense());
}

double median_pairwise_distance(const CovariateTable& x) {
  const Index n = x.size();
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index k = i + 1; k < n; ++k) d.push_back((x.row(i) - x.row(k)).norm());
  }
  if (d.empty()) throw DomainError("median distance needs at least two nodes");
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(d.begin(), mid);
  return 0.5 * (lower + upper);
}

SimilarityMatrix covariate_kernel(const CovariateTable& x,
                                  std::optional<double> sigma) {
  const Index n = x.size();
  if (n < 2) throw DomainError("covariate kernel needs at least two nodes");
  double s = 0.0;
  if (sigma) {
    s = *sigma;
    if (!(s > 0.0)) throw DomainError("sigma must be positive");
  } else {
    s = 0.25 * median_pairwise_distance(x);
    if (!(s > 0.0)) {
      throw DomainError("automatic sigma is zero: median pairwise distance is 0");
    }
  }
  Matrix w = Matrix::Identity(n, n);
  const double inv_s2 = 1.0 / (s * s);
  for (Index i = 0; i < n; ++i) {
    for (Index k = i + 1; k < n; ++k) {
      const double v = std::exp(-(x.row(i) - x.row(k)).squaredNorm() * inv_s2);
      w(i, k) = v;
      w(k, i) = v;
    }
  }
  return SimilarityMatrix(std::move(w));
}

namespace {

// Agreement fraction between rows of `m` (binary), over all n columns.
Matrix row_agreement(const Matrix& m) {
  const Index n = m.rows();
  const Matrix inter = m * m.transpose();
  const Eigen::VectorXd deg = m.rowwise().sum();
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) {
      const double hamming = deg(i) + deg(k) - 2.0 * inter(i, k);
      out(i, k) = (static_cast<double>(n) - hamming) / static_cast<double>(n);
    }
  }
  return out;
}

Matrix row_jaccard(const Matrix& m) {
  const Index n = m.rows();
  const Matrix inter = m * m.transpose();
  const Eigen::VectorXd deg = m.rowwise().sum();
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) {
      const double uni = deg(i) + deg(k) - inter(i, k);
      out(i, k) = uni > 0.0 ? inter(i, k) / uni : 0.0;
    }
  }
  return out;
}

SimilarityMatrix finish_topology(Matrix w) {
  w.diagonal().setOnes();
  // Mirror the upper triangle so rounding cannot break exact symmetry.
  w.triangularView<Eigen::StrictlyLower>() = w.transpose();
  return SimilarityMatrix(std::move(w));
}

}  // namespace

SimilarityMatrix fraction_match(const AdjacencyMatrix& a) {
  const Matrix& m = a.entries();
  if (!a.directed()) return finish_topology(row_agreement(m));
  return finish_topology(0.5 * row_agreement(m) +
                         0.5 * row_agreement(m.transpose()));
}

SimilarityMatrix jaccard(const AdjacencyMatrix& a) {
  const Matrix& m = a.entries();
  if (!a.directed()) return finish_topology(row_jaccard(m));
  return finish_topology(0.5 * row_jaccard(m) + 0.5 * row_jaccard(m.transpose()));
}

SimilarityMatrix truncate(const SimilarityMatrix& w, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw DomainError("truncation threshold must lie in [0, 1]");
  }
  const Index n = w.size();
  std::vector<Eigen::Triplet<double>> kept;
  for (Index i = 0; i < n; ++i) {
    for (const auto& e : w.row_nonzeros(i)) {
      if (e.col == i || e.value >= threshold) kept.emplace_back(i, e.col, e.value);
    }
  }
  SparseMatrix s(n, n);
  s.setFromTriplets(kept.begin(), kept.end());
  return SimilarityMatrix(std::move(s)).with_auto_storage();
}

SimilarityMatrix power(const SimilarityMatrix& w, int q) {
  if (q < 1) throw DomainError("power exponent must be a positive integer");
  if (w.is_sparse()) {
    const Index n = w.size();
    std::vector<Eigen::Triplet<double>> t;
    for (Index i = 0; i < n; ++i) {
      for (const auto& e : w.row_nonzeros(i)) {
        t.emplace_back(i, e.col, std::pow(e.value, q));
      }
    }
    SparseMatrix s(n, n);
    s.setFromTriplets(t.begin(), t.end());
    return SimilarityMatrix(std::move(s));
  }
  Matrix d = w.to_dense();
  d = d.array().pow(static_cast<double>(q)).matrix();
  return SimilarityMatrix(std::move(d));
}

SimilarityMatrix block_indicator(const std::vector<int>& labels) {
  const auto n = static_cast<Index>(labels.size());
  Matrix w(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) w(i, k) = labels[i] == labels[k] ? 1.0 : 0.0;
  }
  return SimilarityMatrix(std::move(w)).with_auto_storage();
}

SimilarityMatrix read_similarity(const std::filesystem::path& path, Index n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  std::size_t line_no = 0;
  if (path.extension() == ".csv") {
    Matrix w(n, n);
    Index row = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      if (row >= n) throw InputError(path.string() + ": more than n rows");
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream fields(line);
      for (Index k = 0; k < n; ++k) {
        if (!(fields >> w(row, k))) {
          throw InputError(path.string() + ":" + std::to_string(line_no) +
                           ": expected " + std::to_string(n) + " values");
        }
      }
      ++row;
    }
    if (row != n) throw InputError(path.string() + ": expected n rows");
    return SimilarityMatrix(std::move(w)).with_auto_storage();
  }
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    long long i = 0;
    long long k = 0;
    double v = 0.0;
    if (!(fields >> i)) continue;
    if (!(fields >> k >> v)) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 'i j w'");
    }
    if (i < 0 || k < 0 || i >= n || k >= n) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": node index out of range");
    }
    if (i == k) continue;
    t.emplace_back(i, k, v);
    t.emplace_back(k, i, v);
  }
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end(), [](double, double b) { return b; });
  return SimilarityMatrix(std::move(s)).with_auto_storage();
}

void write_similarity(const SimilarityMatrix& w, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const Index n = w.size();
  if (path.extension() == ".csv") {
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < n; ++k) {
        if (k > 0) out << ',';
        out << format_double(w(i, k));
      }
      out << '\n';
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      for (const auto& e : w.row_nonzeros(i)) {
        if (e.col > i) out << i << ' ' << e.col << ' ' << format_double(e.value) << '\n';
      }
    }
  }
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

}  // namespace linkpred
