#include "dqdmp/canonical.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

namespace dqdmp {

void PhaseParams::validate() const {
  if (!(alpha_x > 0.0) || !std::isfinite(alpha_x)) {
    throw InvalidArgument("alpha_x must be positive");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("tau must be positive");
  }
}

double phase(double t, const PhaseParams& params) {
  return std::exp(-params.alpha_x * t / params.tau);
}

const char* to_string(KernelScheme s) { return s == KernelScheme::A ? "A" : "B"; }

KernelScheme kernel_scheme_from_string(const std::string& s) {
  if (s == "A" || s == "a") return KernelScheme::A;
  if (s == "B" || s == "b") return KernelScheme::B;
  throw InvalidArgument("unknown kernel scheme '" + s + "'");
}

GaussianBasis::GaussianBasis(KernelScheme s, double a, std::vector<double> c,
                             std::vector<double> h)
    : scheme_(s), alpha_x_(a), centers_(std::move(c)), widths_(std::move(h)) {
  validate();
}

void GaussianBasis::validate() const {
  if (centers_.size() < 2 || centers_.size() != widths_.size()) {
    throw InvalidArgument("a kernel bank needs N >= 2 matching centers and widths");
  }
  if (!(alpha_x_ > 0.0)) throw InvalidArgument("alpha_x must be positive");
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (!std::isfinite(centers_[i])) throw InvalidArgument("non-finite kernel center");
    if (!(widths_[i] > 0.0) || !std::isfinite(widths_[i])) {
      throw InvalidArgument("kernel width " + std::to_string(i + 1) +
                            " is not positive and finite");
    }
    if (i > 0 && !(centers_[i] < centers_[i - 1])) {
      throw InvalidArgument("kernel centers must be strictly decreasing");
    }
  }
}

GaussianBasis GaussianBasis::scheme_a(int n, double alpha_x) {
  if (n < 2) throw InvalidArgument("kernel count must be >= 2");
  if (!(alpha_x > 0.0)) throw InvalidArgument("alpha_x must be positive");
  std::vector<double> c(n), h(n);
  for (int i = 0; i < n; ++i) {
    c[i] = std::exp(-alpha_x * i / (n - 1));
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double d = c[i + 1] - c[i];
    h[i] = 1.0 / (d * d);
  }
  h[n - 1] = h[n - 2];
  return {KernelScheme::A, alpha_x, std::move(c), std::move(h)};
}

GaussianBasis GaussianBasis::scheme_b(int n, double alpha_x, double duration,
                                      double dt) {
  if (n < 2) throw InvalidArgument("kernel count must be >= 2");
  if (!(alpha_x > 0.0)) throw InvalidArgument("alpha_x must be positive");
  if (!(dt > 0.0) || !(duration > dt)) {
    throw InvalidArgument("scheme B needs duration > dt > 0");
  }
  std::vector<double> c(n), h(n);
  const double tail = std::sqrt(10.0 * duration / dt);
  for (int k = 0; k < n; ++k) {
    const double i = k + 1;
    c[k] = std::exp(-alpha_x * duration * i / (n + 1));
    const double steps = 1.0 + (duration - dt) * (n - i) / (dt * (n - 1)) + tail;
    const double d = c[k] - std::exp(-alpha_x * steps * dt);
    h[k] = d * d;
  }
  return {KernelScheme::B, alpha_x, std::move(c), std::move(h)};
}

GaussianBasis GaussianBasis::from_parts(KernelScheme scheme, double alpha_x,
                                        std::vector<double> centers,
                                        std::vector<double> widths) {
  return {scheme, alpha_x, std::move(centers), std::move(widths)};
}

Eigen::VectorXd GaussianBasis::activations(double x) const {
  const int n = size();
  Eigen::VectorXd psi(n);
  for (int i = 0; i < n; ++i) {
    const double d = x - centers_[i];
    if (scheme_ == KernelScheme::A) {
      psi[i] = std::exp(-widths_[i] * d * d);
    } else {
      psi[i] = std::exp(-0.5 * d * d / widths_[i]) /
               std::sqrt(2.0 * std::numbers::pi * widths_[i]);
    }
  }
  return psi;
}

Eigen::VectorXd GaussianBasis::design_row(double x) const {
  Eigen::VectorXd psi = activations(x);
  const double sum = psi.sum();
  if (!(sum >= 1e-300)) return Eigen::VectorXd::Zero(size());
  return psi * (x / sum);
}

double forcing(double x, const GaussianBasis& basis, const Eigen::VectorXd& weights) {
  return basis.design_row(x).dot(weights);
}

Eigen::VectorXd forcing(double x, const GaussianBasis& basis,
                        const Eigen::MatrixXd& weights) {
  return weights.transpose() * basis.design_row(x);
}

Eigen::MatrixXd design_matrix(std::span<const double> xs, const GaussianBasis& basis) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(xs.size()), basis.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    a.row(static_cast<Eigen::Index>(t)) = basis.design_row(xs[t]).transpose();
  }
  return a;
}

Eigen::VectorXd WeightFit::relative_residual() const {
  Eigen::VectorXd rel(residual.size());
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    rel[i] = target_norm[i] > 0.0 ? residual[i] / target_norm[i] : 0.0;
  }
  return rel;
}

WeightFit fit_weights(std::span<const double> xs, const Eigen::MatrixXd& targets,
                      const GaussianBasis& basis) {
  if (static_cast<Eigen::Index>(xs.size()) != targets.rows()) {
    throw InvalidArgument("phase samples and targets differ in length");
  }
  if (xs.empty()) throw InvalidArgument("no samples to fit");
  for (double x : xs) {
    if (!(x > 0.0 && x <= 1.0)) throw InvalidArgument("phase samples must lie in (0, 1]");
  }
  const Eigen::MatrixXd a = design_matrix(xs, basis);

  WeightFit fit;
  fit.target_norm = targets.colwise().norm().transpose();
  if (targets.isZero(0.0)) {
    fit.weights = Eigen::MatrixXd::Zero(basis.size(), targets.cols());
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    fit.weights = svd.solve(targets);
  }
  fit.residual = (a * fit.weights - targets).colwise().norm().transpose();
  return fit;
}

WeightFit fit_weights(std::span<const double> xs, std::span<const double> targets,
                      const GaussianBasis& basis) {
  const Eigen::Map<const Eigen::VectorXd> t(targets.data(),
                                            static_cast<Eigen::Index>(targets.size()));
  return fit_weights(xs, Eigen::MatrixXd(t), basis);
}

}  // namespace dqdmp
