//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace ggalg::detail {

// Vertex- and edge-coloured directed graph on vertices 0..n-1. Edge colour 0
// means "no edge". Every labelled structure in the library (graphs, rules,
// host states) is reduced to this form for canonicalization.
struct ColouredDigraph {
  std::size_t n = 0;
  std::vector<std::uint32_t> colour;
  std::vector<std::uint8_t> adj;

  explicit ColouredDigraph(std::size_t size = 0)
      : n(size), colour(size, 0), adj(size * size, 0) {}

  std::uint8_t edge(std::size_t from, std::size_t to) const { return adj[from * n + to]; }
  void set_edge(std::size_t from, std::size_t to, std::uint8_t c) { adj[from * n + to] = c; }
};

struct CanonicalLabelling {
  // order[k] is the vertex placed at canonical position k.
  std::vector<std::size_t> order;
  std::string code;
};

namespace canon_impl {

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Re-rank vertices by (primary, secondary) keys into dense colours 0..k-1.
// Returns k.
inline std::size_t rank_by(std::vector<std::uint32_t>& colours,
                           const std::vector<std::pair<std::uint64_t, std::uint64_t>>& keys,
                           std::vector<std::size_t>& scratch) {
  const std::size_t n = colours.size();
  scratch.resize(n);
  std::iota(scratch.begin(), scratch.end(), std::size_t{0});
  std::sort(scratch.begin(), scratch.end(),
            [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::size_t cells = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && keys[scratch[i]] != keys[scratch[i - 1]]) ++cells;
    colours[scratch[i]] = static_cast<std::uint32_t>(cells);
  }
  return n == 0 ? 0 : cells + 1;
}

class Search {
 public:
  explicit Search(const ColouredDigraph& g) : g_(g), n_(g.n), keys_(g.n) {}

  CanonicalLabelling run() {
    std::vector<std::uint32_t> colours(n_);
    for (std::size_t v = 0; v < n_; ++v) {
      std::uint64_t in = 0, out = 0;
      for (std::size_t w = 0; w < n_; ++w) {
        if (g_.edge(v, w) != 0) ++out;
        if (g_.edge(w, v) != 0) ++in;
      }
      keys_[v] = {g_.colour[v], (in << 32) | out};
    }
    std::size_t cells = rank_by(colours, keys_, scratch_);
    cells = refine(colours, cells);
    descend(colours, cells);
    return {std::move(best_order_), std::move(best_code_)};
  }

 private:
  bool are_twins(std::size_t u, std::size_t v) const {
    if (g_.colour[u] != g_.colour[v]) return false;
    if (g_.edge(u, u) != g_.edge(v, v) || g_.edge(u, v) != g_.edge(v, u)) return false;
    for (std::size_t w = 0; w < n_; ++w) {
      if (w == u || w == v) continue;
      if (g_.edge(u, w) != g_.edge(v, w) || g_.edge(w, u) != g_.edge(w, v)) return false;
    }
    return true;
  }

  // Colour refinement to a fixpoint. Cell order stays invariant because the
  // previous colour is the primary sort key and the signature only depends on
  // neighbouring colours.
  std::size_t refine(std::vector<std::uint32_t>& colours, std::size_t cells) {
    while (cells < n_) {
      for (std::size_t v = 0; v < n_; ++v) {
        std::uint64_t out = 0, in = 0;
        for (std::size_t w = 0; w < n_; ++w) {
          if (auto e = g_.edge(v, w); e != 0)
            out += mix((std::uint64_t{e} << 32) ^ colours[w] ^ 0x5bd1e995ULL);
          if (auto e = g_.edge(w, v); e != 0)
            in += mix((std::uint64_t{e} << 32) ^ colours[w] ^ 0xc2b2ae35ULL);
        }
        keys_[v] = {colours[v], mix(out) ^ (mix(in + 0x27d4eb2fULL) << 1)};
      }
      std::size_t next = rank_by(colours, keys_, scratch_);
      if (next == cells) break;
      cells = next;
    }
    return cells;
  }

  void descend(const std::vector<std::uint32_t>& colours, std::size_t cells) {
    if (cells == n_) {
      leaf(colours);
      return;
    }
    // Target: the first non-singleton cell.
    std::vector<std::size_t> size(cells, 0);
    for (auto c : colours) ++size[c];
    std::uint32_t target = 0;
    while (size[target] < 2) ++target;

    if (twin_.empty()) {
      twin_.assign(n_ * n_, 0);
      for (std::size_t u = 0; u < n_; ++u)
        for (std::size_t v = u + 1; v < n_; ++v)
          if (are_twins(u, v)) twin_[u * n_ + v] = twin_[v * n_ + u] = 1;
    }
    std::vector<std::size_t> tried;
    for (std::size_t v = 0; v < n_; ++v) {
      if (colours[v] != target) continue;
      bool redundant = std::any_of(tried.begin(), tried.end(),
                                   [&](std::size_t u) { return twin_[u * n_ + v] != 0; });
      if (redundant) continue;
      tried.push_back(v);

      std::vector<std::uint32_t> next = colours;
      for (std::size_t w = 0; w < n_; ++w) keys_[w] = {next[w], w == v ? 0 : 1};
      std::size_t next_cells = rank_by(next, keys_, scratch_);
      next_cells = refine(next, next_cells);
      descend(next, next_cells);
    }
  }

  void leaf(const std::vector<std::uint32_t>& colours) {
    order_.resize(n_);
    for (std::size_t v = 0; v < n_; ++v) order_[colours[v]] = v;

    std::string& code = code_;
    code.clear();
    auto put32 = [&code](std::uint32_t x) {
      for (int shift = 24; shift >= 0; shift -= 8) code.push_back(static_cast<char>((x >> shift) & 0xff));
    };
    put32(static_cast<std::uint32_t>(n_));
    for (std::size_t k = 0; k < n_; ++k) put32(g_.colour[order_[k]]);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) code.push_back(static_cast<char>(g_.edge(order_[a], order_[b])));

    if (!have_best_ || code < best_code_) {
      std::swap(best_code_, code_);
      best_order_ = order_;
      have_best_ = true;
    }
  }

  const ColouredDigraph& g_;
  std::size_t n_;
  std::vector<std::uint8_t> twin_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keys_;
  std::vector<std::size_t> scratch_;
  std::vector<std::size_t> order_;
  std::string code_;
  bool have_best_ = false;
  std::string best_code_;
  std::vector<std::size_t> best_order_;
};

}  // namespace canon_impl

// Canonical labelling by partition refinement (seeded with colour, in-degree
// and out-degree) plus exhaustive individualization over the remaining cells.
// Interchangeable twins are branched on once.
inline CanonicalLabelling canonicalize(const ColouredDigraph& g) {
  return canon_impl::Search(g).run();
}

}  // namespace ggalg::detail
