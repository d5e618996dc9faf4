#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dlab {

using cplx = std::complex<double>;
using Eigen::Vector3d;
using Vector3c = Eigen::Vector3<cplx>;
using Index3 = std::array<int, 3>;

inline constexpr double pi = 3.14159265358979323846;

/// Side length of the computational box Omega = [pi/2, 3pi/2]^3.
inline constexpr double omega_side = pi;
inline constexpr double omega_lo = pi / 2.0;
inline constexpr double omega_hi = 3.0 * pi / 2.0;
/// Period of the synthesis cell hosting Omega.
inline constexpr double cell_period = 2.0 * pi;

inline double omega_volume() { return pi * pi * pi; }

struct invalid_config : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct solver_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares slope of log|y| against log(x). Requires xs, ys > 0.
double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// FNV-1a 64-bit hash, used for cache keys and config fingerprints.
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string hash_hex(std::uint64_t h);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to disjoint slots; completion order is not deterministic but any
/// reduction done afterwards in index order is.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

inline int sq(int k) { return k * k; }

inline double norm3(const Index3& l) {
  return std::sqrt(double(sq(l[0]) + sq(l[1]) + sq(l[2])));
}

inline bool is_zero(const Index3& l) { return l[0] == 0 && l[1] == 0 && l[2] == 0; }

std::string format_double(double v);

}  // namespace dlab
