#include "tvewd/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tvewd/error.hpp"

namespace tvewd {
namespace {

constexpr double kGaussTruncation = 4.0;

// Composite Simpson rule on [-s, s].
template <class F>
double integrate_symmetric(F&& f, double s, int n = 20000) {
  const double h = 2.0 * s / n;
  double acc = f(-s) + f(s);
  for (int i = 1; i < n; ++i) acc += f(-s + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

Kernel::Kernel(KernelType type) : type_(type) {
  if (type_ == KernelType::gaussian) {
    gauss_norm_ = 1.0 / std::erf(kGaussTruncation / std::numbers::sqrt2);
  }
  const double mass = integrate_symmetric([this](double z) { return (*this)(z); }, support());
  if (std::abs(mass - 1.0) > 1e-6) {
    throw DomainError(std::string("kernel '") + std::string(name()) +
                      "' does not integrate to one (" + std::to_string(mass) + ")");
  }
}

Kernel Kernel::from_name(std::string_view name) {
  if (name == "epanechnikov") return Kernel(KernelType::epanechnikov);
  if (name == "gaussian") return Kernel(KernelType::gaussian);
  if (name == "uniform") return Kernel(KernelType::uniform);
  throw DomainError("unknown kernel '" + std::string(name) +
                    "' (expected epanechnikov, gaussian or uniform)");
}

std::string_view Kernel::name() const noexcept {
  switch (type_) {
    case KernelType::epanechnikov: return "epanechnikov";
    case KernelType::gaussian: return "gaussian";
    case KernelType::uniform: return "uniform";
  }
  return "?";
}

double Kernel::operator()(double z) const noexcept {
  const double a = std::abs(z);
  switch (type_) {
    case KernelType::epanechnikov: return a <= 1.0 ? 0.75 * (1.0 - z * z) : 0.0;
    case KernelType::uniform: return a <= 1.0 ? 0.5 : 0.0;
    case KernelType::gaussian:
      return a <= kGaussTruncation
                 ? gauss_norm_ * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi)
                 : 0.0;
  }
  return 0.0;
}

double Kernel::support() const noexcept {
  return type_ == KernelType::gaussian ? kGaussTruncation : 1.0;
}

Bandwidth::Bandwidth(double b) : b_(b) {
  if (!(b > 0.0 && b <= 1.0)) {
    throw DomainError("bandwidth must lie in (0,1], got " + std::to_string(b));
  }
}

}  // namespace tvewd
