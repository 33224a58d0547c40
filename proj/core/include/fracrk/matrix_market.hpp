#pragma once

#include <string>

#include "fracrk/linalg.hpp"

namespace fracrk::io {

// Matrix-market coordinate format, symmetric storage (lower triangle kept).
void write_matrix_market(const std::string& path,
                         const linalg::SparseMatrix& A);
linalg::SparseMatrix read_matrix_market(const std::string& path);

// Operator pairs are stored as <stem>.A.mtx / <stem>.M.mtx.
void write_operator_pair(const std::string& stem,
                         const linalg::OperatorPair& op);
linalg::OperatorPair read_operator_pair(const std::string& stem);

// Vectors: matrix-market array format when the path ends in .mtx, otherwise
// plain text with one value per line.
void write_vector(const std::string& path, const linalg::Vector& v);
linalg::Vector read_vector(const std::string& path);

}  // namespace fracrk::io
