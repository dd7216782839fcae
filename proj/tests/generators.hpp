#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "galmod/fp_linalg.hpp"
#include "galmod/gmod.hpp"
#include "galmod/synth.hpp"

namespace galmod::testing {

// Hand-rolled generators for property tests. Every draw is a pure function of the seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t bound) { return static_cast<std::size_t>(rng_() % bound); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  unsigned prime() {
    static constexpr unsigned kPrimes[] = {2, 3, 5, 7};
    return kPrimes[below(4)];
  }
  std::uint64_t raw() { return rng_(); }

  Vec vec(unsigned p, std::size_t dim) {
    Vec v(dim);
    for (auto& x : v) x = static_cast<Scalar>(below(p));
    return v;
  }

  FpMatrix matrix(unsigned p, std::size_t rows, std::size_t cols) {
    FpMatrix m(p, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) m.set(r, c, static_cast<long long>(below(p)));
    }
    return m;
  }

  // Random matrix of rank at most r.
  FpMatrix low_rank(unsigned p, std::size_t rows, std::size_t cols, std::size_t r) {
    return matrix(p, rows, r) * matrix(p, r, cols);
  }

  FpSubspace subspace(unsigned p, std::size_t ambient, std::size_t generators) {
    std::vector<Vec> gens;
    for (std::size_t k = 0; k < generators; ++k) gens.push_back(vec(p, ambient));
    return FpSubspace::span(p, ambient, gens);
  }

  BlockMultiset blocks(unsigned p, unsigned n, std::size_t max_dim) {
    const std::size_t top = ipow(p, n);
    BlockMultiset out;
    std::size_t dim = 0;
    const std::size_t count = between(1, 5);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t b = between(1, top);
      if (dim + b > max_dim) continue;
      out.push_back(b);
      dim += b;
    }
    if (out.empty()) out.push_back(1);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }

  // Jordan module with the given blocks, in a random basis.
  GModule module(unsigned p, unsigned n, const BlockMultiset& blocks) {
    const GModule base = jordan_module(p, n, blocks);
    const FpMatrix change = random_invertible(p, base.dim(), raw());
    return GModule(p, n, change * base.sigma() * *change.inverse());
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace galmod::testing
