#pragma once

#include <string_view>

namespace tvewd {

enum class KernelType { epanechnikov, gaussian, uniform };

/// Smoothing kernel on the real line. The Gaussian variant is truncated at
/// |z| = 4 and renormalised; every kernel integrates to one.
class Kernel {
 public:
  explicit Kernel(KernelType type = KernelType::epanechnikov);
  static Kernel from_name(std::string_view name);

  KernelType type() const noexcept { return type_; }
  std::string_view name() const noexcept;
  double operator()(double z) const noexcept;
  /// K(z) = 0 for |z| > support().
  double support() const noexcept;
  /// K_b(d) = K(d / b) / b.
  double scaled(double d, double b) const noexcept { return (*this)(d / b) / b; }

 private:
  KernelType type_;
  double gauss_norm_ = 1.0;
};

/// Smoothing half-width in rescaled-time units, 0 < b <= 1.
class Bandwidth {
 public:
  explicit Bandwidth(double b);
  double value() const noexcept { return b_; }

 private:
  double b_;
};

}  // namespace tvewd
