#pragma once

// Latin squares with a fixed first row, the K x 3 alignment schemes cut
// from them, and the pairing/chain structure each scheme induces.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "latinia/error.hpp"

namespace latinia {

inline constexpr int kReceivers = 3;
inline constexpr int kMaxLatinOrder = 6;

struct LatinSquare {
  int k = 0;
  std::array<std::uint8_t, kMaxLatinOrder * kMaxLatinOrder> cells{};

  int at(int row, int col) const { return cells[static_cast<std::size_t>(row * k + col)]; }
  void set(int row, int col, int symbol) {
    cells[static_cast<std::size_t>(row * k + col)] = static_cast<std::uint8_t>(symbol);
  }

  bool operator==(const LatinSquare& other) const {
    return k == other.k && cells == other.cells;
  }
};

inline bool is_latin(const LatinSquare& sq) {
  const int k = sq.k;
  if (k < 1 || k > kMaxLatinOrder) return false;
  for (int r = 0; r < k; ++r) {
    unsigned row_seen = 0, col_seen = 0;
    for (int c = 0; c < k; ++c) {
      const int a = sq.at(r, c);
      const int b = sq.at(c, r);
      if (a >= k || b >= k) return false;
      row_seen |= 1u << a;
      col_seen |= 1u << b;
    }
    if (row_seen != (1u << k) - 1 || col_seen != (1u << k) - 1) return false;
  }
  return true;
}

inline bool has_identity_first_row(const LatinSquare& sq) {
  for (int c = 0; c < sq.k; ++c) {
    if (sq.at(0, c) != c) return false;
  }
  return true;
}

/// Rows as symbol digits joined by commas, e.g. "012,120,201".
inline std::string to_string(const LatinSquare& sq) {
  std::string out;
  for (int r = 0; r < sq.k; ++r) {
    if (r) out.push_back(',');
    for (int c = 0; c < sq.k; ++c) out.push_back(static_cast<char>('0' + sq.at(r, c)));
  }
  return out;
}

namespace detail {

inline void check_latin_order(int k) {
  if (k < 3) throw Error(Errc::invalid_argument, "Latin order must be at least 3");
  if (k > kMaxLatinOrder) {
    throw Error(Errc::budget_exceeded, "Latin enumeration is limited to K <= 6");
  }
}

// Cell-by-cell fill of rows 1..k-1 in row-major order, smallest symbol first,
// so squares are visited in lexicographic order of their cells.
template <typename Visit>
bool fill_cell(LatinSquare& sq, int pos, std::array<unsigned, kMaxLatinOrder>& row_used,
               std::array<unsigned, kMaxLatinOrder>& col_used, Visit& visit) {
  const int k = sq.k;
  if (pos == k * k) return visit(static_cast<const LatinSquare&>(sq));
  const int r = pos / k;
  const int c = pos % k;
  const unsigned blocked = row_used[static_cast<std::size_t>(r)] | col_used[static_cast<std::size_t>(c)];
  for (int s = 0; s < k; ++s) {
    const unsigned bit = 1u << s;
    if (blocked & bit) continue;
    sq.set(r, c, s);
    row_used[static_cast<std::size_t>(r)] |= bit;
    col_used[static_cast<std::size_t>(c)] |= bit;
    const bool keep_going = fill_cell(sq, pos + 1, row_used, col_used, visit);
    row_used[static_cast<std::size_t>(r)] &= ~bit;
    col_used[static_cast<std::size_t>(c)] &= ~bit;
    if (!keep_going) return false;
  }
  return true;
}

}  // namespace detail

/// Calls `visit(square)` for every K x K Latin square whose first row is
/// (0, 1, ..., K-1), in lexicographic order. `visit` returns false to stop.
template <typename Visit>
void for_each_fixed_first_row(int k, Visit&& visit) {
  detail::check_latin_order(k);
  LatinSquare sq;
  sq.k = k;
  std::array<unsigned, kMaxLatinOrder> row_used{};
  std::array<unsigned, kMaxLatinOrder> col_used{};
  for (int c = 0; c < std::min(k, kMaxLatinOrder); ++c) {
    sq.set(0, c, c);
    row_used[0] |= 1u << c;
    col_used[static_cast<std::size_t>(c)] |= 1u << c;
  }
  detail::fill_cell(sq, k, row_used, col_used, visit);
}

inline std::vector<LatinSquare> enumerate_fixed_first_row(int k) {
  std::vector<LatinSquare> out;
  for_each_fixed_first_row(k, [&](const LatinSquare& sq) {
    out.push_back(sq);
    return true;
  });
  return out;
}

inline std::uint64_t count_fixed_first_row(int k) {
  std::uint64_t n = 0;
  for_each_fixed_first_row(k, [&](const LatinSquare&) {
    ++n;
    return true;
  });
  return n;
}

/// The first `limit` squares in enumeration order.
inline std::vector<LatinSquare> first_fixed_first_row(int k, std::size_t limit) {
  std::vector<LatinSquare> out;
  if (limit == 0) return out;
  for_each_fixed_first_row(k, [&](const LatinSquare& sq) {
    out.push_back(sq);
    return out.size() < limit;
  });
  return out;
}

/// Beamformer v_{receiver+1, transmitter+1}. Ordering is receiver-major, so
/// the smallest member of a chain is always its receiver-1 beamformer.
struct BeamformerId {
  int receiver = 0;
  int transmitter = 0;

  auto operator<=>(const BeamformerId&) const = default;
};

inline std::string to_string(BeamformerId id) {
  return "v" + std::to_string(id.receiver + 1) + std::to_string(id.transmitter + 1);
}

using ColumnTriple = std::array<int, kReceivers>;

/// K x 3 symbol array: row j is transmitter j, column i is receiver i.
/// symbol(j, i) is the Latin label of beamformer v_{i,j}.
struct AlignmentScheme {
  int k = 0;
  std::vector<std::uint8_t> symbols;  // row-major, k x 3
  std::size_t square_index = 0;
  ColumnTriple triple{0, 1, 2};

  int symbol(int transmitter, int receiver) const {
    return symbols[static_cast<std::size_t>(transmitter * kReceivers + receiver)];
  }
  int symbol(BeamformerId id) const { return symbol(id.transmitter, id.receiver); }

  /// Transmitter whose column-`receiver` entry carries `sym`, or -1.
  int row_of(int receiver, int sym) const {
    for (int j = 0; j < k; ++j) {
      if (symbol(j, receiver) == sym) return j;
    }
    return -1;
  }
};

inline std::string scheme_id(const AlignmentScheme& s) {
  std::ostringstream os;
  os << s.square_index << ':' << s.triple[0] << s.triple[1] << s.triple[2];
  return os.str();
}

/// Columns are permutations of the K symbols and no row repeats a symbol.
inline bool is_valid_scheme(const AlignmentScheme& s) {
  if (s.k < 3 || s.symbols.size() != static_cast<std::size_t>(s.k * kReceivers)) return false;
  const unsigned full = (1u << s.k) - 1;
  for (int i = 0; i < kReceivers; ++i) {
    unsigned seen = 0;
    for (int j = 0; j < s.k; ++j) {
      const int sym = s.symbol(j, i);
      if (sym < 0 || sym >= s.k) return false;
      seen |= 1u << sym;
    }
    if (seen != full) return false;
  }
  for (int j = 0; j < s.k; ++j) {
    if (s.symbol(j, 0) == s.symbol(j, 1) || s.symbol(j, 0) == s.symbol(j, 2) ||
        s.symbol(j, 1) == s.symbol(j, 2)) {
      return false;
    }
  }
  return true;
}

inline AlignmentScheme scheme_from_columns(const LatinSquare& square, ColumnTriple triple,
                                           std::size_t square_index = 0) {
  const int k = square.k;
  for (int c : triple) {
    if (c < 0 || c >= k) throw Error(Errc::invalid_triple, "column index out of range");
  }
  if (triple[0] == triple[1] || triple[0] == triple[2] || triple[1] == triple[2]) {
    throw Error(Errc::invalid_triple, "column indices must be distinct");
  }
  AlignmentScheme s;
  s.k = k;
  s.square_index = square_index;
  s.triple = triple;
  s.symbols.resize(static_cast<std::size_t>(k * kReceivers));
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < kReceivers; ++i) {
      s.symbols[static_cast<std::size_t>(j * kReceivers + i)] =
          static_cast<std::uint8_t>(square.at(j, triple[static_cast<std::size_t>(i)]));
    }
  }
  return s;
}

/// All ordered triples of distinct columns, lexicographic.
inline std::vector<ColumnTriple> ordered_triples(int k) {
  std::vector<ColumnTriple> out;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c)
        if (a != b && a != c && b != c) out.push_back({a, b, c});
  return out;
}

/// Two interference beamformers aligned at `receiver`; first < second.
struct AlignmentPair {
  int receiver = 0;
  int symbol = 0;
  BeamformerId first;
  BeamformerId second;
};

/// The K aligned pairs at `receiver`, ordered by their first member.
inline std::vector<AlignmentPair> alignment_pairs(const AlignmentScheme& scheme, int receiver) {
  if (receiver < 0 || receiver >= kReceivers) {
    throw Error(Errc::out_of_range, "receiver index must be 0, 1 or 2");
  }
  int other[2];
  int n = 0;
  for (int i = 0; i < kReceivers; ++i) {
    if (i != receiver) other[n++] = i;
  }
  std::vector<AlignmentPair> pairs;
  pairs.reserve(static_cast<std::size_t>(scheme.k));
  for (int sym = 0; sym < scheme.k; ++sym) {
    const int ja = scheme.row_of(other[0], sym);
    const int jb = scheme.row_of(other[1], sym);
    if (ja < 0 || jb < 0) continue;
    AlignmentPair p{receiver, sym, {other[0], ja}, {other[1], jb}};
    if (p.second < p.first) std::swap(p.first, p.second);
    pairs.push_back(p);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const AlignmentPair& x, const AlignmentPair& y) { return x.first < y.first; });
  return pairs;
}

/// One 3-cycle of span equalities.
///
/// members[r] is the chain's receiver-r beamformer (so members[0] is the
/// anchor), and constraints[r] is the pair aligned at receiver r, which links
/// the two members other than members[r].
struct Chain {
  int symbol = 0;
  std::array<BeamformerId, kReceivers> members;
  std::array<AlignmentPair, kReceivers> constraints;

  BeamformerId anchor() const { return members[0]; }
};

/// Decompose the 3K alignment pairs into K vertex-disjoint 3-cycles with one
/// constraint per receiver. Chains are returned ordered by anchor.
inline std::vector<Chain> extract_chains(const AlignmentScheme& scheme) {
  if (!is_valid_scheme(scheme)) {
    throw Error(Errc::chain_structure_violation,
                "scheme columns must be permutations with distinct symbols per row");
  }
  const int k = scheme.k;
  const auto index = [k](BeamformerId id) { return id.receiver * k + id.transmitter; };

  // Each beamformer is interference at exactly two receivers, so the pair
  // graph is 2-regular; walk it and demand every component be a triangle.
  std::vector<std::vector<AlignmentPair>> incident(static_cast<std::size_t>(kReceivers * k));
  for (int r = 0; r < kReceivers; ++r) {
    for (const auto& p : alignment_pairs(scheme, r)) {
      incident[static_cast<std::size_t>(index(p.first))].push_back(p);
      incident[static_cast<std::size_t>(index(p.second))].push_back(p);
    }
  }
  for (const auto& edges : incident) {
    if (edges.size() != 2) {
      throw Error(Errc::chain_structure_violation, "beamformer not covered by exactly two pairs");
    }
  }

  std::vector<char> visited(static_cast<std::size_t>(kReceivers * k), 0);
  std::vector<Chain> chains;
  for (int j = 0; j < k; ++j) {
    const BeamformerId start{0, j};
    if (visited[static_cast<std::size_t>(index(start))]) continue;

    std::vector<BeamformerId> cycle{start};
    std::vector<AlignmentPair> edges;
    BeamformerId cur = start;
    const AlignmentPair* via = &incident[static_cast<std::size_t>(index(start))][0];
    while (true) {
      edges.push_back(*via);
      const BeamformerId next = (via->first == cur) ? via->second : via->first;
      if (next == start) break;
      if (cycle.size() > static_cast<std::size_t>(kReceivers)) break;
      cycle.push_back(next);
      cur = next;
      const auto& inc = incident[static_cast<std::size_t>(index(cur))];
      via = (inc[0].receiver == via->receiver) ? &inc[1] : &inc[0];
    }
    if (cycle.size() != static_cast<std::size_t>(kReceivers) ||
        edges.size() != static_cast<std::size_t>(kReceivers)) {
      throw Error(Errc::chain_structure_violation, "pair graph component is not a 3-cycle");
    }

    Chain chain;
    chain.symbol = scheme.symbol(start);
    std::array<bool, kReceivers> member_seen{};
    std::array<bool, kReceivers> receiver_seen{};
    for (const auto& id : cycle) {
      if (member_seen[static_cast<std::size_t>(id.receiver)]) {
        throw Error(Errc::chain_structure_violation, "chain has two beamformers for one receiver");
      }
      member_seen[static_cast<std::size_t>(id.receiver)] = true;
      chain.members[static_cast<std::size_t>(id.receiver)] = id;
      visited[static_cast<std::size_t>(index(id))] = 1;
    }
    for (const auto& e : edges) {
      if (receiver_seen[static_cast<std::size_t>(e.receiver)]) {
        throw Error(Errc::chain_structure_violation, "chain has two constraints at one receiver");
      }
      receiver_seen[static_cast<std::size_t>(e.receiver)] = true;
      chain.constraints[static_cast<std::size_t>(e.receiver)] = e;
    }
    chains.push_back(chain);
  }
  if (chains.size() != static_cast<std::size_t>(k)) {
    throw Error(Errc::chain_structure_violation, "expected K chains");
  }
  return chains;
}

}  // namespace latinia
