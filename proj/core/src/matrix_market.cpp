#include "fracrk/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fracrk::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("matrix market: " + path + ": " + what);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_matrix_market(const std::string& path,
                         const linalg::SparseMatrix& A) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::vector<std::string> lines;
  Eigen::Index nnz_lower = 0;
  std::ostringstream body;
  body << std::setprecision(17);
  for (Eigen::Index k = 0; k < A.outerSize(); ++k) {
    for (linalg::SparseMatrix::InnerIterator it(A, k); it; ++it) {
      if (it.row() < it.col()) continue;  // keep lower triangle only
      body << (it.row() + 1) << ' ' << (it.col() + 1) << ' ' << it.value()
           << '\n';
      ++nnz_lower;
    }
  }
  out << A.rows() << ' ' << A.cols() << ' ' << nnz_lower << '\n';
  out << body.str();
  if (!out) fail(path, "write failed");
}

linalg::SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::string header;
  if (!std::getline(in, header)) fail(path, "empty file");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    fail(path, "not a matrix market file");
  if (lower(format) != "coordinate")
    fail(path, "expected coordinate format");
  if (lower(field) != "real") fail(path, "expected real entries");
  const bool symmetric = lower(symmetry) == "symmetric";
  if (!symmetric && lower(symmetry) != "general")
    fail(path, "unsupported symmetry kind: " + symmetry);

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream ds(line);
  Eigen::Index rows = 0, cols = 0, nnz = 0;
  if (!(ds >> rows >> cols >> nnz)) fail(path, "bad size line");
  if (rows != cols) fail(path, "matrix must be square");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(2 * nnz));
  for (Eigen::Index e = 0; e < nnz; ++e) {
    Eigen::Index i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) fail(path, "truncated entry list");
    if (i < 1 || i > rows || j < 1 || j > cols)
      fail(path, "index out of range");
    trips.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) trips.emplace_back(j - 1, i - 1, v);
  }
  linalg::SparseMatrix A(rows, cols);
  A.setFromTriplets(trips.begin(), trips.end());
  if (!symmetric) {
    // Accept general files only when they are numerically symmetric.
    linalg::SparseMatrix D = linalg::SparseMatrix(A.transpose()) - A;
    double mx = 0.0;
    for (Eigen::Index k = 0; k < D.outerSize(); ++k)
      for (linalg::SparseMatrix::InnerIterator it(D, k); it; ++it)
        mx = std::max(mx, std::abs(it.value()));
    if (mx > 0.0) fail(path, "general file is not symmetric");
  }
  return A;
}

void write_operator_pair(const std::string& stem,
                         const linalg::OperatorPair& op) {
  write_matrix_market(stem + ".A.mtx", op.A);
  write_matrix_market(stem + ".M.mtx", op.M);
}

linalg::OperatorPair read_operator_pair(const std::string& stem) {
  linalg::OperatorPair op;
  op.A = read_matrix_market(stem + ".A.mtx");
  op.M = read_matrix_market(stem + ".M.mtx");
  // Detect an identity mass so downstream solvers can skip mass solves.
  op.identity_mass = true;
  if (op.M.rows() != op.M.cols() ||
      op.M.nonZeros() != op.M.rows()) {
    op.identity_mass = false;
  } else {
    for (Eigen::Index k = 0; k < op.M.outerSize() && op.identity_mass; ++k)
      for (linalg::SparseMatrix::InnerIterator it(op.M, k); it; ++it)
        if (it.row() != it.col() || it.value() != 1.0) {
          op.identity_mass = false;
          break;
        }
  }
  if (op.A.rows() != op.M.rows())
    throw std::runtime_error("matrix market: A and M dimensions differ");
  return op;
}

void write_vector(const std::string& path, const linalg::Vector& v) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << std::setprecision(17);
  if (ends_with(path, ".mtx")) {
    out << "%%MatrixMarket matrix array real general\n";
    out << v.size() << " 1\n";
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << '\n';
  if (!out) fail(path, "write failed");
}

linalg::Vector read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::vector<double> vals;
  std::string line;
  bool array_header = false;
  Eigen::Index declared = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '%') {
      if (line.rfind("%%MatrixMarket", 0) == 0) {
        if (lower(line).find("array") == std::string::npos)
          fail(path, "vector files must use array format");
        array_header = true;
      }
      continue;
    }
    std::istringstream ls(line);
    if (array_header && declared < 0) {
      Eigen::Index r = 0, c = 0;
      if (!(ls >> r >> c) || c != 1) fail(path, "bad array size line");
      declared = r;
      continue;
    }
    double v = 0.0;
    while (ls >> v) vals.push_back(v);
  }
  if (declared >= 0 && declared != static_cast<Eigen::Index>(vals.size()))
    fail(path, "entry count does not match header");
  if (vals.empty()) fail(path, "no values found");
  return Eigen::Map<const linalg::Vector>(vals.data(),
                                          static_cast<Eigen::Index>(vals.size()));
}

}  // namespace fracrk::io
