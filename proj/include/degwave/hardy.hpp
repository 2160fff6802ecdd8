#pragma once

#include <vector>

namespace degwave {

/// Best constants of the two weighted Hardy-Poincare inequalities, computed
/// on a ladder of refined meshes.  Discrete values approach the continuum
/// constants from below, so consumers that must not overtrust them (lambda
/// admissibility, the decay certificate) use the margin-inflated `*_safe`
/// values; the plain values are the sharp discrete constants on the finest
/// mesh (Richardson-corrected when the ladder has stabilized).
struct HardyConstants {
  double c_hp = 0.0;        ///< constant in  int u^2/(sigma d) <= C int eta u'^2
  double c_hp_tilde = 0.0;  ///< constant in  int u^2/sigma     <= C int u'^2
  double c_hp_safe = 0.0;
  double c_hp_tilde_safe = 0.0;
  double margin = 0.0;  ///< relative inflation: safe = value * (1 + margin)
  std::vector<double> c_hp_levels;
  std::vector<double> c_hp_tilde_levels;
  int mesh_size = 0;  ///< element count of the finest ladder mesh
  bool extrapolated = false;

  /// For tests and hand-built fixtures: constants taken as exact (margin 0).
  static HardyConstants exact(double chp, double chp_tilde) {
    HardyConstants h;
    h.c_hp = h.c_hp_safe = chp;
    h.c_hp_tilde = h.c_hp_tilde_safe = chp_tilde;
    h.c_hp_levels = {chp};
    h.c_hp_tilde_levels = {chp_tilde};
    h.extrapolated = true;
    return h;
  }
};

}  // namespace degwave
