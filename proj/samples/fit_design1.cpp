// Simulates one network from the first binary design and prints the
// estimated community shares and success probabilities.

#include <cstdio>

#include "wsbm/wsbm.hpp"

int main() {
  const auto design = wsbm::binary_design(1);
  const auto draw = wsbm::draw_network(design.params, 400, 7);

  wsbm::FitOptions opt;
  opt.r = 2;
  opt.basis = design.basis;
  opt.functionals = {wsbm::FunctionalSpec::identity()};
  const auto res = wsbm::fit(draw.net, opt);

  std::printf("p_hat     = (%.3f, %.3f)   truth (0.300, 0.700)\n", res.block.p_hat[0], res.block.p_hat[1]);
  const auto& phi = res.functionals.front().phi_hat;
  std::printf("theta_hat = [%.3f %.3f; %.3f %.3f]   truth [0.200 0.000; 0.000 0.400]\n", phi(0, 0), phi(0, 1),
              phi(1, 0), phi(1, 1));
  std::printf("offdiag_final = %.3g after %d sweeps, cond(G_hat) = %.3g\n", res.block.offdiag_final,
              res.block.sweeps, res.block.condition_G);
}
