#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lqbsde/model.hpp"

namespace lqbsde {

// One realization of (w1, w2) on a grid: increments dw[k] = w(t_{k+1}) - w(t_k)
// and cumulative values w[k] = w(t_k), w[0] = 0.
struct BrownianPath {
  TimeGrid grid;
  std::vector<double> dw1, dw2;
  std::vector<double> w1, w2;

  BrownianPath(TimeGrid g, std::vector<double> inc1, std::vector<double> inc2);
};

// Independent substreams share a seed; stream 0 drives the main batches and
// stream 1 the inner samples of nested Monte Carlo.
enum class Substream : std::uint32_t { Main = 0, Inner = 1 };

// Path `index` under `seed`: for step k the Philox counter is
// (k, index_lo, index_hi, stream) and the key is the seed. The four output
// words give two 52-bit uniforms, mapped through normal_quantile and scaled by
// sqrt(dt) into dw1[k] and dw2[k].
BrownianPath sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t index,
                         Substream stream = Substream::Main);

// Path on `grid` whose increments are sums of `factor` consecutive increments
// of the same substream sampled on the grid with steps * factor.
BrownianPath sample_path_coarsened(const TimeGrid& grid, std::size_t factor, std::uint64_t seed,
                                   std::uint64_t index, Substream stream = Substream::Main);

BrownianPath coarsen(const BrownianPath& fine, std::size_t factor);

// Same fine path with w1 replaced by the w1 of a different path.
BrownianPath splice_w1(const BrownianPath& w2_source, const BrownianPath& w1_source);

struct BrownianPathBatch {
  TimeGrid grid;
  std::uint64_t seed;
  std::vector<BrownianPath> paths;
};

BrownianPathBatch sample_brownian(const TimeGrid& grid, std::uint64_t seed, std::size_t count);

// `path,t,w1,w2` rows for every path in the batch.
void write_paths_csv(std::ostream& out, const BrownianPathBatch& batch);

}  // namespace lqbsde
