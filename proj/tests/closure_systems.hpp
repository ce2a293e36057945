#pragma once

// Random closure systems for the trdeg oracle: monomials in the
// algebraically independent tower {e, e^e, ...}, whose algebraic matroid is
// the linear matroid of their exponent vectors.

#include "schanuel/proofs.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <random>
#include <vector>

namespace schanuel::testing {

struct ClosureSystem {
  std::vector<Term> elements;
  std::vector<std::vector<long>> vectors;  ///< exponent of each atom
};

inline std::vector<Term> tower_atoms(unsigned count) {
  std::vector<Term> out;
  for (unsigned k = 1; k <= count; ++k) out.push_back(iterated_exp(k));
  return out;
}

inline ClosureSystem random_system(std::mt19937& rng, unsigned atoms = 4, unsigned max_elements = 8) {
  const auto g = tower_atoms(atoms);
  ClosureSystem s;
  const std::size_t dim = 1 + rng() % atoms;
  std::size_t distinct = 1;
  for (std::size_t i = 0; i < dim; ++i) distinct *= 5;
  const std::size_t n = std::min<std::size_t>(1 + rng() % max_elements, distinct - 1);
  while (s.elements.size() < n) {
    std::vector<long> v(dim);
    bool zero = true;
    for (auto& x : v) {
      x = static_cast<long>(rng() % 5) - 2;
      zero = zero && x == 0;
    }
    if (zero) continue;
    std::vector<Term> factors;
    for (std::size_t i = 0; i < dim; ++i)
      if (v[i]) factors.push_back(pow(g[i], v[i]));
    Term t = product(factors);
    if (std::find(s.elements.begin(), s.elements.end(), t) != s.elements.end()) continue;
    s.elements.push_back(t);
    s.vectors.push_back(v);
  }
  return s;
}

/// Rank over Q of the chosen rows, by fraction-free elimination.
inline std::size_t rank_of(const ClosureSystem& s, unsigned mask) {
  std::vector<std::vector<mpq_class>> rows;
  for (std::size_t i = 0; i < s.vectors.size(); ++i)
    if (mask >> i & 1u) rows.emplace_back(s.vectors[i].begin(), s.vectors[i].end());
  std::size_t r = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    for (std::size_t q = r + 1; q < rows.size(); ++q) {
      mpq_class f = rows[q][c] / rows[r][c];
      for (std::size_t j = c; j < cols; ++j) rows[q][j] -= f * rows[r][j];
    }
    ++r;
  }
  return r;
}

inline bool independent(const ClosureSystem& s, unsigned mask) {
  return rank_of(s, mask) == static_cast<std::size_t>(__builtin_popcount(mask));
}

/// Exhaustive oracle: the largest independent subset of `mask`.
inline std::size_t brute_force_rank(const ClosureSystem& s, unsigned mask) {
  std::size_t best = 0;
  for (unsigned sub = mask;; sub = (sub - 1) & mask) {
    if (independent(s, sub)) best = std::max<std::size_t>(best, __builtin_popcount(sub));
    if (sub == 0) break;
  }
  return best;
}

inline std::vector<Term> pick(const ClosureSystem& s, unsigned mask) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < s.elements.size(); ++i)
    if (mask >> i & 1u) out.push_back(s.elements[i]);
  return out;
}

/// Records independent subsets as AI facts and circuits as AlgebraicOver
/// facts; each fact is kept with probability `keep`.
inline void feed(KnowledgeBase& kb, FactId atoms_free, const ClosureSystem& s, std::mt19937& rng, double keep = 1.0) {
  std::uniform_real_distribution<double> coin(0, 1);
  const unsigned full = (1u << s.elements.size()) - 1;
  for (unsigned mask = 1; mask <= full; ++mask) {
    if (coin(rng) >= keep) continue;
    if (independent(s, mask)) {
      kb.derive("monomial-independence", {atoms_free}, stmt::ai(pick(s, mask)));
      continue;
    }
    bool circuit = true;
    for (std::size_t i = 0; i < s.elements.size() && circuit; ++i)
      if ((mask >> i & 1u) && !independent(s, mask & ~(1u << i))) circuit = false;
    if (!circuit) continue;
    for (std::size_t i = 0; i < s.elements.size(); ++i)
      if (mask >> i & 1u)
        kb.derive("monomial-dependence", {}, stmt::algebraic_over({s.elements[i]}, pick(s, mask & ~(1u << i))));
  }
}

}  // namespace schanuel::testing
