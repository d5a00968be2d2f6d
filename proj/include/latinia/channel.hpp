#pragma once

// i.i.d. flat-Rayleigh channel state for the K x 3 X network.

#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "latinia/error.hpp"
#include "latinia/latin.hpp"
#include "latinia/linalg.hpp"
#include "latinia/rng.hpp"

namespace latinia {

/// One fading draw: 3 x K grid of 2K x 2K matrices, H(i, j) from
/// transmitter j to receiver i.
struct ChannelRealization {
  int k = 0;
  std::uint64_t seed = 0;
  std::uint64_t draw_index = 0;
  std::vector<ComplexMatrix> h;  // receiver-major, 3 * k entries

  int antennas() const { return 2 * k; }
  const ComplexMatrix& operator()(int receiver, int transmitter) const {
    return h[static_cast<std::size_t>(receiver * k + transmitter)];
  }
  ComplexMatrix& operator()(int receiver, int transmitter) {
    return h[static_cast<std::size_t>(receiver * k + transmitter)];
  }
};

inline ComplexMatrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                            RandomStream& stream) {
  ComplexMatrix m(rows, cols);
  // Fill row by row so the draw order matches the CSV layout.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = stream.complex_gaussian();
  return m;
}

inline ChannelRealization draw_channel(int k, std::uint64_t seed, std::uint64_t draw_index) {
  if (k < 3) throw Error(Errc::invalid_argument, "K must be at least 3");
  ChannelRealization ch;
  ch.k = k;
  ch.seed = seed;
  ch.draw_index = draw_index;
  RandomStream stream(seed, draw_index, StreamPurpose::channel);
  const int m = 2 * k;
  ch.h.reserve(static_cast<std::size_t>(kReceivers * k));
  for (int i = 0; i < kReceivers; ++i)
    for (int j = 0; j < k; ++j) ch.h.push_back(random_gaussian_matrix(m, m, stream));
  return ch;
}

/// Channel with every H(i, j) equal to the identity.
inline ChannelRealization identity_channel(int k) {
  ChannelRealization ch;
  ch.k = k;
  const int m = 2 * k;
  for (int n = 0; n < kReceivers * k; ++n) ch.h.push_back(ComplexMatrix::Identity(m, m));
  return ch;
}

/// Unit-variance circularly symmetric noise vector.
inline ComplexVector awgn(int dim, RandomStream& stream) {
  if (dim < 1) throw Error(Errc::invalid_argument, "noise dimension must be >= 1");
  ComplexVector n(dim);
  for (int r = 0; r < dim; ++r) n(r) = stream.complex_gaussian();
  return n;
}

/// CSV dump: a `# H i j` line (1-based) per matrix, then one line per matrix
/// row holding `re,im` pairs.
inline void write_channel_csv(std::ostream& os, const ChannelRealization& ch) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (int i = 0; i < kReceivers; ++i) {
    for (int j = 0; j < ch.k; ++j) {
      os << "# H " << (i + 1) << ' ' << (j + 1) << '\n';
      const auto& m = ch(i, j);
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          if (c) os << ',';
          os << m(r, c).real() << ',' << m(r, c).imag();
        }
        os << '\n';
      }
    }
  }
}

inline ChannelRealization read_channel_csv(std::istream& is) {
  std::vector<std::pair<std::pair<int, int>, std::vector<std::vector<Complex>>>> blocks;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# H ", 0) == 0) {
      std::istringstream hs(line.substr(4));
      int i = 0, j = 0;
      if (!(hs >> i >> j)) throw Error(Errc::invalid_argument, "bad channel block header");
      blocks.push_back({{i - 1, j - 1}, {}});
      continue;
    }
    if (line[0] == '#') continue;
    if (blocks.empty()) throw Error(Errc::invalid_argument, "channel row before any header");
    std::vector<double> vals;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() % 2) throw Error(Errc::invalid_argument, "odd number of channel values");
    std::vector<Complex> row;
    for (std::size_t n = 0; n < vals.size(); n += 2) row.emplace_back(vals[n], vals[n + 1]);
    blocks.back().second.push_back(std::move(row));
  }
  if (blocks.empty() || blocks.size() % kReceivers) {
    throw Error(Errc::invalid_argument, "channel CSV must hold 3K blocks");
  }
  ChannelRealization ch;
  ch.k = static_cast<int>(blocks.size()) / kReceivers;
  ch.h.assign(blocks.size(), ComplexMatrix());
  const int m = 2 * ch.k;
  for (auto& [ij, rows] : blocks) {
    const auto [i, j] = ij;
    if (i < 0 || i >= kReceivers || j < 0 || j >= ch.k || static_cast<int>(rows.size()) != m) {
      throw Error(Errc::invalid_argument, "channel block has wrong index or shape");
    }
    ComplexMatrix mat(m, m);
    for (int r = 0; r < m; ++r) {
      if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != m) {
        throw Error(Errc::invalid_argument, "channel row has wrong length");
      }
      for (int c = 0; c < m; ++c) mat(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    ch(i, j) = std::move(mat);
  }
  return ch;
}

}  // namespace latinia
