#include "lqbsde/brownian.hpp"

#include <cmath>
#include <ostream>

#include "lqbsde/csv.hpp"
#include "lqbsde/errors.hpp"
#include "lqbsde/rng.hpp"

namespace lqbsde {

BrownianPath::BrownianPath(TimeGrid g, std::vector<double> inc1, std::vector<double> inc2)
    : grid(g), dw1(std::move(inc1)), dw2(std::move(inc2)) {
  if (dw1.size() != grid.steps() || dw2.size() != grid.steps())
    throw GridMismatch("increment count does not match grid");
  w1.assign(grid.points(), 0.0);
  w2.assign(grid.points(), 0.0);
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    w1[k + 1] = w1[k] + dw1[k];
    w2[k + 1] = w2[k] + dw2[k];
  }
}

BrownianPath sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t index,
                         Substream stream) {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  const double scale = std::sqrt(grid.dt());
  std::vector<double> dw1(grid.steps());
  std::vector<double> dw2(grid.steps());
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const auto bits = Philox4x32::block({static_cast<std::uint32_t>(k),
                                         static_cast<std::uint32_t>(index),
                                         static_cast<std::uint32_t>(index >> 32),
                                         static_cast<std::uint32_t>(stream)},
                                        key);
    const std::uint64_t u0 = (static_cast<std::uint64_t>(bits[0]) << 32) | bits[1];
    const std::uint64_t u1 = (static_cast<std::uint64_t>(bits[2]) << 32) | bits[3];
    dw1[k] = scale * normal_quantile(open_unit_interval(u0));
    dw2[k] = scale * normal_quantile(open_unit_interval(u1));
  }
  return {grid, std::move(dw1), std::move(dw2)};
}

BrownianPath coarsen(const BrownianPath& fine, std::size_t factor) {
  if (factor == 0 || fine.grid.steps() % factor != 0)
    throw GridMismatch("coarsening factor must divide the step count");
  const TimeGrid grid(fine.grid.horizon(), fine.grid.steps() / factor);
  std::vector<double> dw1(grid.steps(), 0.0);
  std::vector<double> dw2(grid.steps(), 0.0);
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    dw1[k] = fine.w1[(k + 1) * factor] - fine.w1[k * factor];
    dw2[k] = fine.w2[(k + 1) * factor] - fine.w2[k * factor];
  }
  return {grid, std::move(dw1), std::move(dw2)};
}

BrownianPath sample_path_coarsened(const TimeGrid& grid, std::size_t factor, std::uint64_t seed,
                                   std::uint64_t index, Substream stream) {
  const TimeGrid fine(grid.horizon(), grid.steps() * factor);
  return coarsen(sample_path(fine, seed, index, stream), factor);
}

BrownianPath splice_w1(const BrownianPath& w2_source, const BrownianPath& w1_source) {
  if (!(w2_source.grid == w1_source.grid)) throw GridMismatch("spliced paths differ in grid");
  return {w2_source.grid, w1_source.dw1, w2_source.dw2};
}

BrownianPathBatch sample_brownian(const TimeGrid& grid, std::uint64_t seed, std::size_t count) {
  BrownianPathBatch batch{grid, seed, {}};
  batch.paths.reserve(count);
  for (std::size_t p = 0; p < count; ++p) batch.paths.push_back(sample_path(grid, seed, p));
  return batch;
}

void write_paths_csv(std::ostream& out, const BrownianPathBatch& batch) {
  out << "path,t,w1,w2\n";
  for (std::size_t p = 0; p < batch.paths.size(); ++p) {
    const auto& path = batch.paths[p];
    for (std::size_t k = 0; k < batch.grid.points(); ++k) {
      out << p << ',' << format_real(batch.grid.time(k));
      write_field(out, path.w1[k]);
      write_field(out, path.w2[k]);
      out << '\n';
    }
  }
}

}  // namespace lqbsde
