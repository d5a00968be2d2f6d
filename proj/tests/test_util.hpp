#pragma once

#include <cstdint>

#include "latinia/channel.hpp"
#include "latinia/linalg.hpp"
#include "latinia/rng.hpp"

namespace latinia::testing {

inline ComplexMatrix random_matrix(int rows, int cols, std::uint64_t key) {
  RandomStream s(key);
  return random_gaussian_matrix(rows, cols, s);
}

inline ComplexVector random_vector(int n, std::uint64_t key) {
  RandomStream s(key);
  return awgn(n, s);
}

/// Haar-ish unitary from the QR of a Gaussian matrix.
inline ComplexMatrix random_unitary(int n, std::uint64_t key) {
  const ComplexMatrix g = random_matrix(n, n, key);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

}  // namespace latinia::testing
