#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "lqbsde/brownian.hpp"

namespace lqbsde {

struct Mat2 {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

  double det() const noexcept { return a11 * a22 - a12 * a21; }
  Mat2 transpose() const noexcept { return {a11, a21, a12, a22}; }
  // Throws SingularMatrix when the determinant vanishes relative to the entries.
  Mat2 inverse() const;
  std::array<double, 2> apply(double x1, double x2) const noexcept {
    return {a11 * x1 + a12 * x2, a21 * x1 + a22 * x2};
  }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) noexcept {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
};

// max |sigma sigma^T - I| <= tol.
bool is_orthogonal(const Mat2& sigma, double tol = 1e-12);

// Observation models for a partially observed uncontrolled signal x:
//   single channel  dW2 = h(t, x) dt + dw2
//   two channels    dW  = hbar(t, x) dt + sigma dw
// cbar = sigma^-1 hbar. `orthogonal` asserts sigma sigma^T = I, which the
// measure-change reading of the two-channel model needs.
struct GirsanovScenario {
  using Function = std::function<double(double, double)>;
  Function h, hbar1, hbar2;
  Mat2 sigma;
  Mat2 sigmabar;
  bool orthogonal = false;
  double delta1 = 0.0, delta2 = 0.0;  // signal diffusion loadings

  std::array<double, 2> cbar(double t, double x) const {
    return sigmabar.apply(hbar1(t, x), hbar2(t, x));
  }
};

// Inverts sigma (SingularMatrix) and checks the orthogonality flag
// (AssumptionViolation when set but not satisfied).
GirsanovScenario make_girsanov_scenario(GirsanovScenario::Function h,
                                        GirsanovScenario::Function hbar1,
                                        GirsanovScenario::Function hbar2, const Mat2& sigma,
                                        bool orthogonal, double delta1 = 0.0, double delta2 = 0.0);

// Bounded observation drifts and a rotation-like sigma, for the test suite.
GirsanovScenario builtin_girsanov_scenario();

// x = delta1 w1 + delta2 w2 on the path's grid (signal with zero drift).
std::vector<double> driftless_signal(const GirsanovScenario& scenario, const BrownianPath& path);

struct DensityPath {
  std::vector<double> rho, rho_inv;
};

// rho1 = exp{-int h dw2 - 1/2 int h^2 ds}; the inverse is built from the
// observation, exp{int h dW2 - 1/2 int h^2 ds}. Left-endpoint sums.
DensityPath density_rho1(const GirsanovScenario& scenario, const BrownianPath& path,
                         std::span<const double> x);
// rho2 = exp{-int cbar . dw - 1/2 int |cbar|^2 ds}; the inverse as
// exp{int cbar . sigmabar dW - 1/2 int |cbar|^2 ds}.
DensityPath density_rho2(const GirsanovScenario& scenario, const BrownianPath& path,
                         std::span<const double> x);

// The linear maps between the original and the transformed BSDE integrands,
//   Z1 = sb11 z1 + sb21 z2,  Z2 = sb12 z1 + sb22 z2,
// and the drift terms the changes of measure add.
struct ObservationTransform {
  Mat2 forward;  // z -> Z
  Mat2 inverse;  // Z -> z, as printed: ((sb22 Z1 - sb21 Z2), (sb11 Z2 - sb12 Z1)) / det

  // Single channel: the BSDE drift gains h z2; the signal drift gains -delta2 h.
  double bsde_shift_single(const GirsanovScenario& s, double t, double x, double z2) const;
  double signal_shift_single(const GirsanovScenario& s, double t, double x) const;
  // Two channels: the BSDE drift gains cbar1 z1 + cbar2 z2 with z recovered
  // from Z; the signal drift gains -delta1 cbar1 - delta2 cbar2 and its
  // W-loadings are sigmabar^T delta.
  double bsde_shift_pair(const GirsanovScenario& s, double t, double x, double Z1, double Z2) const;
  double signal_shift_pair(const GirsanovScenario& s, double t, double x) const;
  std::array<double, 2> signal_loadings(const GirsanovScenario& s) const;

  std::array<double, 2> to_transformed(double z1, double z2) const noexcept {
    return forward.apply(z1, z2);
  }
  std::array<double, 2> to_original(double Z1, double Z2) const noexcept {
    return inverse.apply(Z1, Z2);
  }
};

// Throws SingularMatrix when sigma is not invertible.
ObservationTransform transform_observation(const GirsanovScenario& scenario);

struct MartingaleCheck {
  double rho1_mean = 0.0, rho1_se = 0.0;
  double rho2_mean = 0.0, rho2_se = 0.0;
  double reciprocal_error = 0.0;  // sup |rho rho_inv - 1| over paths and nodes
};

MartingaleCheck martingale_check(const GirsanovScenario& scenario, const TimeGrid& grid,
                                 std::uint64_t seed, std::size_t count, unsigned threads = 1);

// `path,t,rho1,rho2` for paths 0..count-1.
void write_girsanov_csv(std::ostream& out, const GirsanovScenario& scenario, const TimeGrid& grid,
                        std::uint64_t seed, std::size_t count);

}  // namespace lqbsde
