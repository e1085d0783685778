#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "spmi/errors.hpp"

namespace spmi {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// A real matrix together with a missing-entry mask (true = missing).
// Used for the empirical shifted PMI, whose zero-count cells are -inf in
// exact arithmetic and are represented as missing instead.
struct MaskedMatrix {
  Matrix values;
  MaskMatrix missing;
  int shift_k = 1;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  Index observed_count() const {
    return static_cast<Index>(missing.size()) -
           static_cast<Index>(missing.cast<int>().sum());
  }
};

// Rank-d singular value decomposition: M ~= U * diag(sigma) * Vt.
struct SvdResult {
  Matrix u;      // V x d, orthonormal columns
  Vector sigma;  // length d, nonincreasing, nonnegative
  Matrix vt;     // d x V, orthonormal rows

  Index rank() const { return sigma.size(); }
};

// Word and context embedding matrices, both V x d.
struct EmbeddingPair {
  Matrix w;
  Matrix c;
};

// Rank-d reconstruction U * diag(sigma) * Vt as an evaluated matrix.
inline Matrix reconstruction(const SvdResult& s) {
  return s.u * s.sigma.asDiagonal() * s.vt;
}

}  // namespace spmi
