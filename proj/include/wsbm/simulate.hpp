#pragma once

#include <cstdint>
#include <vector>

#include "wsbm/core.hpp"
#include "wsbm/rng.hpp"

namespace wsbm {

/// A simulated network together with the latent communities that produced
/// it. Labels are 0-based and exist for oracle checks only.
struct SimDraw {
  Network net;
  std::vector<std::size_t> z;
};

namespace stream_tag {
inline constexpr std::uint64_t label = 0x6C6162656CULL;  // "label"
inline constexpr std::uint64_t edge = 0x65646765ULL;     // "edge"
}  // namespace stream_tag

/// Community of node i: inverse-CDF draw from its own stream (seed, i).
inline std::size_t draw_label(const std::vector<double>& p, std::uint64_t seed, std::size_t i) {
  Stream s(seed, stream_tag::label, i);
  const double u = s.uniform();
  double c = 0.0;
  for (std::size_t z = 0; z + 1 < p.size(); ++z) {
    c += p[z];
    if (u < c) return z;
  }
  return p.size() - 1;
}

/// Draws labels i.i.d. from p, then every edge i < j from
/// edge_law(z_i, z_j) using the stream keyed by (seed, i, j).
inline SimDraw draw_network(const BlockModelParams& params, std::size_t n, std::uint64_t seed) {
  if (n < 4) throw Error(ErrorCode::too_few_nodes, "draw_network needs n >= 4");
  std::vector<std::size_t> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = draw_label(params.p(), seed, i);

  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Stream s(seed, stream_tag::edge, i, j);
      const double x = params.edge_law(z[i], z[j]).sample(s);
      w(i, j) = x;
      w(j, i) = x;
    }
  }
  return SimDraw{Network(std::move(w)), std::move(z)};
}

}  // namespace wsbm
