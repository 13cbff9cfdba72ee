#pragma once

#include "kgb/spectral.hpp"

namespace kgb {

// First-order variables of the coupled system at time t:
//   u_t = w_x,  (I - dxx) w_t = (alpha^2 u + f1)_x,  v_t = z,  z_t = v_xx - v + f2
// so w is the antiderivative of u_t and z = v_t. mean(u) is a constant of the
// motion (u_t = w_x has zero mean); all fields live on one grid.
struct EvolutionState {
  GridPtr grid;
  RealField u, w, v, z;
  double t = 0.0;
};

} // namespace kgb
