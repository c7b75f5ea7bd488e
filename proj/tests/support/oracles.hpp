#pragma once

// Test-side reference computations. None of these call into the library's
// quadrature, alpha or classification code.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

namespace optcbf::testing {

// Exact peak of b for a double integrator braking at u_max from (b0, bdot0).
inline double braking_peak(double b0, double bdot0, double u_max) {
  return bdot0 > 0.0 ? b0 + bdot0 * bdot0 / (2.0 * u_max) : b0;
}

// integral_b^0 env(s) ds by 61-point Gauss-Kronrod.
inline double gk_integral(const std::function<double(double)>& env, double b) {
  if (b == 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      env, b, 0.0, 15, 1e-13);
}

// Upper bound on u from the ACC optimal CBF with a constant lead speed, in
// the hand-derived form -c1 (b' - sqrt(-2 u b)) - u_max b' / sqrt(-2 u b).
inline double acc_optimal_upper(double b, double bdot, double u_max, double c1) {
  const double a = std::sqrt(-2.0 * u_max * b);
  return -c1 * (bdot - a) - u_max * bdot / a;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("optcbf_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    const std::string p = file(name);
    std::ofstream(p) << text;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace optcbf::testing
