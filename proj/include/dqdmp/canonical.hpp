#pragma once

// Phase system, Gaussian kernel banks, forcing term and least-squares weight
// fitting shared by every DMP variant.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "dqdmp/types.hpp"

namespace dqdmp {

struct PhaseParams {
  double alpha_x;
  double tau;  // s

  /// Throws InvalidArgument unless alpha_x > 0 and tau > 0.
  void validate() const;
};

/// x(t) = exp(-alpha_x t / tau).
double phase(double t, const PhaseParams& params);

enum class KernelScheme {
  /// ψ_i(x) = exp(-h_i (x - c_i)²), c_i = exp(-α_x (i-1)/(N-1)),
  /// h_i = 1/(c_{i+1} - c_i)², h_N = h_{N-1}.
  A,
  /// ψ_i(x) = exp(-½ (x - c_i)² / h_i) / sqrt(2π h_i), centers
  /// c_i = exp(-α_x T i/(N+1)) and variances from the sampling grid.
  B,
};

const char* to_string(KernelScheme s);
KernelScheme kernel_scheme_from_string(const std::string& s);

class GaussianBasis {
 public:
  static GaussianBasis scheme_a(int n, double alpha_x);

  /// `duration` and `dt` are in the time units of the phase, i.e. the basis
  /// is laid out for x = exp(-alpha_x t). For a model with time scale tau,
  /// pass duration/tau and dt/tau.
  ///
  /// Width of kernel i (a variance):
  ///   h_i = [c_i - exp(-α_x (1 + (T-Δt)(N-i)/(Δt(N-1)) + sqrt(10 T/Δt)) Δt)]²
  /// with every term of the sum inside the parentheses multiplied by Δt.
  static GaussianBasis scheme_b(int n, double alpha_x, double duration, double dt);

  /// Rebuilds a basis from stored parameters; validates the invariants.
  static GaussianBasis from_parts(KernelScheme scheme, double alpha_x,
                                  std::vector<double> centers,
                                  std::vector<double> widths);

  KernelScheme scheme() const { return scheme_; }
  double alpha_x() const { return alpha_x_; }
  int size() const { return static_cast<int>(centers_.size()); }
  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& widths() const { return widths_; }

  /// ψ_i(x) for every kernel.
  Eigen::VectorXd activations(double x) const;

  /// Row of the design matrix: ψ_i(x) x / Σψ_j(x). All zeros when
  /// Σψ < 1e-300.
  Eigen::VectorXd design_row(double x) const;

 private:
  GaussianBasis(KernelScheme s, double a, std::vector<double> c, std::vector<double> h);
  void validate() const;

  KernelScheme scheme_;
  double alpha_x_;
  std::vector<double> centers_;
  std::vector<double> widths_;
};

/// f(x) = Σλ_i ψ_i(x) / Σψ_i(x) · x for one output dimension.
double forcing(double x, const GaussianBasis& basis, const Eigen::VectorXd& weights);

/// Forcing for every column of an N×D weight matrix.
Eigen::VectorXd forcing(double x, const GaussianBasis& basis,
                        const Eigen::MatrixXd& weights);

/// T×N design matrix, one design_row per phase sample.
Eigen::MatrixXd design_matrix(std::span<const double> xs, const GaussianBasis& basis);

struct WeightFit {
  Eigen::MatrixXd weights;         // N×D
  Eigen::VectorXd residual;        // ‖Aλ - f_d‖ per dimension
  Eigen::VectorXd target_norm;     // ‖f_d‖ per dimension

  /// residual / target_norm, 0 for an all-zero target.
  Eigen::VectorXd relative_residual() const;
};

/// Minimum-norm least-squares weights λ = A† f_d per column of `targets`
/// (T×D). Singular values below 1e-10 σ_max are discarded.
WeightFit fit_weights(std::span<const double> xs, const Eigen::MatrixXd& targets,
                      const GaussianBasis& basis);

/// Single-dimension convenience overload.
WeightFit fit_weights(std::span<const double> xs, std::span<const double> targets,
                      const GaussianBasis& basis);

}  // namespace dqdmp
