#pragma once

#include <string>

#include "ibnls/dynamics.hpp"

namespace ibnls {

struct Checkpoint {
  GridSpec grid;
  double t = 0.0;
  double dt = 0.0;
  std::vector<cplx> values;
};

/// Binary layout: "IBNLS1\0", u32 N, u32 M, f64 L, f64 t, f64 dt, then M^N
/// (re, im) pairs, all little-endian. Throws IoError.
void write_checkpoint(const std::string& path, const ComplexField& u, double t, double dt);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace ibnls
