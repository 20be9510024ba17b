#include "blindmimo/rng.hpp"

#include <cmath>

namespace blindmimo {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t master, std::uint64_t realization, std::uint64_t purpose) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ (realization * 0x9e3779b97f4a7c15ULL));
  s = splitmix64(s ^ (purpose * 0xd6e8feb86659fd93ULL));
  return Rng(s);
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  return 1.0 - uniform();
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::complex<double> Rng::cgaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return {re * 0.70710678118654752440, im * 0.70710678118654752440};
}

}  // namespace blindmimo
