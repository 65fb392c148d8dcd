#include "otdual/random.hpp"

#include <algorithm>

namespace otdual {

namespace {

// Splits `total` units into `parts` counts, each at least `floor`.
std::vector<unsigned> composition(std::mt19937_64& rng, unsigned total, std::size_t parts, unsigned floor = 1) {
  std::vector<unsigned> counts(parts, floor);
  std::uniform_int_distribution<std::size_t> pick(0, parts - 1);
  for (unsigned u = static_cast<unsigned>(parts) * floor; u < total; ++u) ++counts[pick(rng)];
  return counts;
}

std::vector<Rational> weights(const std::vector<unsigned>& counts, unsigned denominator) {
  std::vector<Rational> w;
  for (unsigned c : counts) {
    w.emplace_back(c, denominator);
    w.back().canonicalize();
  }
  return w;
}

CostMatrix random_cost(std::mt19937_64& rng, std::size_t nx, std::size_t ny, unsigned cost_max) {
  std::uniform_int_distribution<unsigned> d(0, cost_max);
  Table<Rational> c(nx, ny);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) c(i, j) = d(rng);
  return CostMatrix(std::move(c));
}

}  // namespace

Instance random_instance(std::mt19937_64& rng, std::size_t nx, std::size_t ny, unsigned cost_max,
                         unsigned denominator) {
  denominator = std::max<unsigned>(denominator, static_cast<unsigned>(std::max(nx, ny)));
  Instance inst;
  inst.mu = DiscreteMeasure(weights(composition(rng, denominator, nx), denominator));
  inst.nu = DiscreteMeasure(weights(composition(rng, denominator, ny), denominator));
  inst.cost = random_cost(rng, nx, ny, cost_max);
  return inst;
}

Instance random_degenerate_instance(std::mt19937_64& rng, std::size_t nx, std::size_t ny, unsigned cost_max,
                                    unsigned denominator) {
  const std::size_t most = std::min(nx, ny);
  std::size_t blocks = most < 2 ? 1 : std::uniform_int_distribution<std::size_t>(2, most)(rng);
  auto assign = [&](std::size_t n) {
    std::vector<std::size_t> owner(n);
    std::uniform_int_distribution<std::size_t> pick(0, blocks - 1);
    for (std::size_t i = 0; i < n; ++i) owner[i] = i < blocks ? i : pick(rng);
    std::shuffle(owner.begin(), owner.end(), rng);
    return owner;
  };
  auto xo = assign(nx), yo = assign(ny);
  std::vector<std::size_t> xs(blocks, 0), ys(blocks, 0);
  for (auto b : xo) ++xs[b];
  for (auto b : yo) ++ys[b];
  unsigned needed = 0;
  for (std::size_t b = 0; b < blocks; ++b) needed += static_cast<unsigned>(std::max(xs[b], ys[b]));
  denominator = std::max(denominator, needed);

  std::vector<unsigned> block_units(blocks);
  {
    std::uniform_int_distribution<std::size_t> pick(0, blocks - 1);
    for (std::size_t b = 0; b < blocks; ++b) block_units[b] = static_cast<unsigned>(std::max(xs[b], ys[b]));
    for (unsigned u = needed; u < denominator; ++u) ++block_units[pick(rng)];
  }
  auto spread = [&](const std::vector<std::size_t>& owner, const std::vector<std::size_t>& sizes) {
    std::vector<unsigned> counts(owner.size());
    for (std::size_t b = 0; b < blocks; ++b) {
      auto part = composition(rng, block_units[b], sizes[b]);
      std::size_t k = 0;
      for (std::size_t i = 0; i < owner.size(); ++i)
        if (owner[i] == b) counts[i] = part[k++];
    }
    return counts;
  };
  Instance inst;
  inst.mu = DiscreteMeasure(weights(spread(xo, xs), denominator));
  inst.nu = DiscreteMeasure(weights(spread(yo, ys), denominator));
  inst.cost = random_cost(rng, nx, ny, cost_max);
  return inst;
}

std::vector<Rational> random_interior_weights(std::mt19937_64& rng, std::size_t n, unsigned denominator) {
  unsigned d = std::max<unsigned>(denominator, static_cast<unsigned>(8 * n));
  unsigned floor = d / static_cast<unsigned>(4 * n);
  return weights(composition(rng, d, n, floor), d);
}

}  // namespace otdual
