#include "activecanvas/extrapolator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "activecanvas/error.hpp"

namespace activecanvas::svr {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Dual of epsilon-SVR in the 2l-variable form:
//   min 0.5 b'Qb + p'b  s.t.  y'b = 0, 0 <= b <= C
// with b = [alpha; alpha*], y = [+1; -1], Q_ij = y_i y_j K(i mod l, j mod l).
class SmoSolver {
 public:
  SmoSolver(const std::vector<double>& kernel, std::size_t l, std::span<const double> targets,
            const SvrParams& params)
      : kernel_(kernel), l_(l), n_(2 * l), C_(params.C), tol_(params.tolerance),
        max_iter_(params.max_iterations), alpha_(n_, 0.0), grad_(n_), sign_(n_) {
    for (std::size_t i = 0; i < l_; ++i) {
      sign_[i] = 1.0;
      sign_[i + l_] = -1.0;
      grad_[i] = params.epsilon - targets[i];
      grad_[i + l_] = params.epsilon + targets[i];
    }
  }

  AxisFit solve() {
    AxisFit fit;
    int iter = 0;
    for (; iter < max_iter_; ++iter) {
      std::size_t i = 0;
      std::size_t j = 0;
      if (!select_working_set(i, j)) break;
      update_pair(i, j);
    }
    fit.iterations = iter;
    fit.dual.resize(l_);
    for (std::size_t i = 0; i < l_; ++i) fit.dual[i] = alpha_[i] - alpha_[i + l_];
    fit.bias = -rho();
    return fit;
  }

 private:
  double q(std::size_t i, std::size_t j) const {
    return sign_[i] * sign_[j] * kernel_[(i % l_) * l_ + (j % l_)];
  }
  double qd(std::size_t i) const { return kernel_[(i % l_) * l_ + (i % l_)]; }
  bool at_upper(std::size_t i) const { return alpha_[i] >= C_; }
  bool at_lower(std::size_t i) const { return alpha_[i] <= 0.0; }

  // Maximal-violating first index, second-order gain for the second.
  bool select_working_set(std::size_t& out_i, std::size_t& out_j) const {
    double gmax = -kInf;
    double gmax2 = -kInf;
    std::ptrdiff_t gmax_idx = -1;
    std::ptrdiff_t gmin_idx = -1;
    double obj_diff_min = kInf;

    for (std::size_t t = 0; t < n_; ++t) {
      if (sign_[t] > 0) {
        if (!at_upper(t) && -grad_[t] >= gmax) {
          gmax = -grad_[t];
          gmax_idx = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!at_lower(t) && grad_[t] >= gmax) {
        gmax = grad_[t];
        gmax_idx = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (gmax_idx < 0) return false;
    const auto i = static_cast<std::size_t>(gmax_idx);

    for (std::size_t j = 0; j < n_; ++j) {
      if (sign_[j] > 0) {
        if (at_lower(j)) continue;
        const double grad_diff = gmax + grad_[j];
        gmax2 = std::max(gmax2, grad_[j]);
        if (grad_diff > 0) {
          double quad = qd(i) + qd(j) - 2.0 * sign_[i] * q(i, j);
          if (quad <= 0) quad = kTau;
          const double obj_diff = -(grad_diff * grad_diff) / quad;
          if (obj_diff <= obj_diff_min) {
            gmin_idx = static_cast<std::ptrdiff_t>(j);
            obj_diff_min = obj_diff;
          }
        }
      } else {
        if (at_upper(j)) continue;
        const double grad_diff = gmax - grad_[j];
        gmax2 = std::max(gmax2, -grad_[j]);
        if (grad_diff > 0) {
          double quad = qd(i) + qd(j) + 2.0 * sign_[i] * q(i, j);
          if (quad <= 0) quad = kTau;
          const double obj_diff = -(grad_diff * grad_diff) / quad;
          if (obj_diff <= obj_diff_min) {
            gmin_idx = static_cast<std::ptrdiff_t>(j);
            obj_diff_min = obj_diff;
          }
        }
      }
    }
    if (gmax + gmax2 < tol_ || gmin_idx < 0) return false;
    out_i = i;
    out_j = static_cast<std::size_t>(gmin_idx);
    return true;
  }

  void update_pair(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    const double qij = q(i, j);

    if (sign_[i] != sign_[j]) {
      double quad = qd(i) + qd(j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) { aj = 0; ai = diff; }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > C_) { ai = C_; aj = C_ - diff; }
      } else if (aj > C_) {
        aj = C_;
        ai = C_ + diff;
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C_) {
        if (ai > C_) { ai = C_; aj = sum - C_; }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > C_) {
        if (aj > C_) { aj = C_; ai = sum - C_; }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }

    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (std::size_t t = 0; t < n_; ++t) grad_[t] += q(i, t) * di + q(j, t) * dj;
  }

  double rho() const {
    double ub = kInf;
    double lb = -kInf;
    double sum_free = 0.0;
    int nr_free = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double yg = sign_[i] * grad_[i];
      if (at_upper(i)) {
        if (sign_[i] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (at_lower(i)) {
        if (sign_[i] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++nr_free;
        sum_free += yg;
      }
    }
    return nr_free > 0 ? sum_free / nr_free : (ub + lb) / 2.0;
  }

  const std::vector<double>& kernel_;
  std::size_t l_;
  std::size_t n_;
  double C_;
  double tol_;
  int max_iter_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<double> sign_;
};

double default_gamma(const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.front().size();
  const double n = static_cast<double>(rows.size());
  double mean_var = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[c];
    mean /= n;
    double var = 0.0;
    for (const auto& r : rows) var += (r[c] - mean) * (r[c] - mean);
    mean_var += var / n;
  }
  mean_var /= static_cast<double>(d);
  if (!(mean_var > 0.0)) mean_var = 1.0;
  return 1.0 / (static_cast<double>(d) * mean_var);
}

}  // namespace

SvrModel SvrModel::train(std::vector<std::vector<double>> rows, std::span<const double> x_targets,
                         std::span<const double> y_targets, const SvrParams& params) {
  if (rows.size() != x_targets.size() || rows.size() != y_targets.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "training rows and targets differ in count");
  }
  if (rows.size() < 2) {
    throw Error(ErrorCode::kTooFewTouched, "need >= 2 training rows, got " + std::to_string(rows.size()));
  }
  const std::size_t d = rows.front().size();
  if (d == 0) throw Error(ErrorCode::kNoFeatures, "training rows have no feature columns");
  for (const auto& r : rows) {
    if (r.size() != d) throw Error(ErrorCode::kDimensionMismatch, "ragged training rows");
  }
  if (!(params.C > 0.0) || !(params.epsilon >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "SVR needs C > 0 and epsilon >= 0");
  }

  // Canonical order: lexicographic on (features, x target, y target).
  struct Sample {
    std::vector<double> row;
    double x;
    double y;
  };
  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    samples.push_back({std::move(rows[i]), x_targets[i], y_targets[i]});
  }
  auto key_less = [](const Sample& a, const Sample& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  };
  std::sort(samples.begin(), samples.end(), key_less);
  samples.erase(std::unique(samples.begin(), samples.end(),
                            [](const Sample& a, const Sample& b) {
                              return a.row == b.row && a.x == b.x && a.y == b.y;
                            }),
                samples.end());

  SvrModel model;
  model.C_ = params.C;
  model.epsilon_ = params.epsilon;
  model.dims_ = d;
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto& s : samples) {
    model.rows_.push_back(std::move(s.row));
    xs.push_back(s.x);
    ys.push_back(s.y);
  }
  model.gamma_ = params.gamma ? *params.gamma : default_gamma(model.rows_);

  const std::size_t l = model.rows_.size();
  std::vector<double> kernel(l * l);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i; j < l; ++j) {
      const double k = model.kernel(model.rows_[i], model.rows_[j]);
      kernel[i * l + j] = k;
      kernel[j * l + i] = k;
    }
  }

  const std::array<const std::vector<double>*, 2> targets{&xs, &ys};
  for (std::size_t a = 0; a < 2; ++a) {
    const auto& t = *targets[a];
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    if (*lo == *hi) {
      model.axes_[a].constant = true;
      model.axes_[a].constant_value = *lo;
      continue;
    }
    model.axes_[a] = SmoSolver(kernel, l, t, params).solve();
  }
  return model;
}

double SvrModel::kernel(std::span<const double> a, std::span<const double> b) const {
  double d2 = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    d2 += d * d;
  }
  return std::exp(-gamma_ * d2);
}

double SvrModel::eval_axis(const AxisFit& fit, std::span<const double> row) const {
  if (fit.constant) return fit.constant_value;
  double f = fit.bias;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (fit.dual[i] != 0.0) f += fit.dual[i] * kernel(rows_[i], row);
  }
  return f;
}

std::array<double, 2> SvrModel::predict_raw(std::span<const double> row) const {
  if (row.size() != dims_) {
    throw Error(ErrorCode::kDimensionMismatch, "query has " + std::to_string(row.size()) +
                                                   " features, model expects " + std::to_string(dims_));
  }
  return {eval_axis(axes_[0], row), eval_axis(axes_[1], row)};
}

std::array<double, 2> SvrModel::predict(std::span<const double> row) const {
  const auto raw = predict_raw(row);
  return {clamp_unit(raw[0]), clamp_unit(raw[1])};
}

SvrParams params_from(const EngineConfig& config) {
  SvrParams p;
  p.C = config.C;
  p.epsilon = config.epsilon;
  p.gamma = config.gamma_override;
  return p;
}

SvrModel train(const features::FeatureMatrix& reduced, const Layout& layout,
               const EngineConfig& config) {
  if (reduced.rows() != layout.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "layout and feature matrix disagree on item count");
  }
  const auto touched = layout.touched_indices();
  std::vector<std::vector<double>> rows;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i : touched) {
    rows.push_back(reduced.row(i));
    xs.push_back(layout[i].x);
    ys.push_back(layout[i].y);
  }
  return SvrModel::train(std::move(rows), xs, ys, params_from(config));
}

std::vector<PredictedPosition> predict_untouched(const SvrModel& model,
                                                 const features::FeatureMatrix& reduced,
                                                 const Layout& layout) {
  if (reduced.rows() != layout.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "layout and feature matrix disagree on item count");
  }
  if (reduced.cols() != model.dims()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature column count differs from training");
  }
  std::vector<PredictedPosition> out;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].touched) continue;
    const auto p = model.predict(reduced.row(i));
    out.push_back({i, p[0], p[1]});
  }
  return out;
}

}  // namespace activecanvas::svr
