#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "activecanvas/config.hpp"
#include "activecanvas/features.hpp"
#include "activecanvas/layout.hpp"

namespace activecanvas::svr {

struct SvrParams {
  double C = 10.0;
  double epsilon = 0.01;
  std::optional<double> gamma;  // default: 1 / (d * mean per-column variance)
  double tolerance = 1e-4;      // KKT violation at which SMO stops
  int max_iterations = 10'000;
};

/// One epsilon-SVR fit. A constant predictor stands in when every target is equal.
struct AxisFit {
  bool constant = false;
  double constant_value = 0.0;
  std::vector<double> dual;  // alpha_i - alpha*_i, each within [-C, C]
  double bias = 0.0;         // f(x) = sum dual_i K(x_i, x) + bias
  int iterations = 0;
};

/// Two independent RBF epsilon-SVR fits (x and y targets) sharing training rows.
class SvrModel {
 public:
  /// Rows are put into a canonical order and exact duplicates (same features,
  /// same targets) are dropped, so the fit does not depend on input order.
  static SvrModel train(std::vector<std::vector<double>> rows, std::span<const double> x_targets,
                        std::span<const double> y_targets, const SvrParams& params);

  /// Unclamped regression output.
  std::array<double, 2> predict_raw(std::span<const double> row) const;
  /// Output clamped into the unit square.
  std::array<double, 2> predict(std::span<const double> row) const;

  double gamma() const noexcept { return gamma_; }
  double C() const noexcept { return C_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t dims() const noexcept { return dims_; }
  const std::vector<std::vector<double>>& training_rows() const noexcept { return rows_; }
  const AxisFit& axis(int a) const { return axes_.at(static_cast<std::size_t>(a)); }

 private:
  double kernel(std::span<const double> a, std::span<const double> b) const;
  double eval_axis(const AxisFit& fit, std::span<const double> row) const;

  double gamma_ = 1.0;
  double C_ = 10.0;
  double epsilon_ = 0.01;
  std::size_t dims_ = 0;
  std::vector<std::vector<double>> rows_;
  std::array<AxisFit, 2> axes_{};
};

SvrParams params_from(const EngineConfig& config);

/// Fits on the touched rows of `reduced` against their layout positions.
SvrModel train(const features::FeatureMatrix& reduced, const Layout& layout,
               const EngineConfig& config);

struct PredictedPosition {
  std::size_t index = 0;  // item index in the layout
  double x = 0.0;
  double y = 0.0;
};

/// One clamped prediction per untouched item; touched items are left alone.
std::vector<PredictedPosition> predict_untouched(const SvrModel& model,
                                                 const features::FeatureMatrix& reduced,
                                                 const Layout& layout);

}  // namespace activecanvas::svr
