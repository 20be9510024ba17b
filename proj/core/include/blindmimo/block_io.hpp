#pragma once

#include <string>
#include <vector>

#include "blindmimo/txrx.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

/// Binary container shared by the CLI and tests. Layout (little-endian):
///   bytes 0..15   magic "BLINDMIMO.BLK.1" + NUL
///   u32           record kind (1 = rx block, 2 = estimate bundle)
/// Rx block record:
///   u32 flags (bit0 y_freq present, bit1 one-bit fields present)
///   u32 N, K, T, T_D; f64 rho
///   y_freq as T*N complex doubles (per bin m, antennas in order, re then im)
///   r_time and r_freq in the same layout when bit1 is set
/// Estimate record:
///   u32 P, K, T, N
///   S_hat as P*K complex doubles (row-major)
///   H_hat as T blocks of N*K complex doubles (row-major)
/// Readers throw std::runtime_error on truncated or malformed input.
void write_rxblock(const std::string& path, const RxBlock& block);
RxBlock read_rxblock(const std::string& path);

struct EstimateBundle {
  MatrixXcd S_hat;
  std::vector<MatrixXcd> H_hat;
};

void write_estimate(const std::string& path, const EstimateBundle& est);
EstimateBundle read_estimate(const std::string& path);

}  // namespace blindmimo
