#include "pcparam/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace pcparam {

void RmsPropConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
}

RmsPropState RmsPropState::fresh(Eigen::Index n, const RmsPropConfig& config) {
  config.validate();
  return {config, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

void rmsprop_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, RmsPropState& state) {
  if (params.size() != grads.size() || params.size() != state.square_avg.size())
    throw std::invalid_argument("rmsprop_step: parameter, gradient and state lengths differ");
  for (Eigen::Index i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads(i)))
      throw NumericError("non-finite gradient at parameter " + std::to_string(i));
  const RmsPropConfig& c = state.config;
  state.square_avg = c.rho * state.square_avg + (1.0 - c.rho) * grads.cwiseAbs2();
  state.momentum_buf = c.momentum * state.momentum_buf +
                       (grads.array() / (state.square_avg.array() + c.eps).sqrt()).matrix();
  params -= c.lr * state.momentum_buf;
  for (Eigen::Index i = 0; i < params.size(); ++i)
    if (!std::isfinite(params(i)))
      throw NumericError("update made parameter " + std::to_string(i) + " non-finite");
}

void StageConfig::validate() const {
  if (epochs < 1 || batch_x < 1 || batch_w < 1 || epochs_min < 1)
    throw std::invalid_argument("stage epochs and batch sizes must be positive");
  if (!(sigma > 0.0) || !(sigma_min > 0.0)) throw std::invalid_argument("sigma values must be positive");
  if (!(alpha_initial > 0.0) || !(alpha_final > 0.0) || !(alpha_max > 0.0))
    throw std::invalid_argument("alpha values must be positive");
}

double alpha_schedule(int epoch, int epochs, double alpha_initial, double alpha_final) {
  if (epochs <= 1) return alpha_initial;
  return alpha_initial + (epoch - 1) * (alpha_final - alpha_initial) / (epochs - 1);
}

StageConfig advance_stage(const StageConfig& cfg, std::size_t n_points, std::size_t n_domain_points) {
  StageConfig next = cfg;
  next.sigma = std::max(cfg.sigma / std::sqrt(2.0), cfg.sigma_min);
  next.alpha_initial = cfg.alpha_final;
  next.alpha_final = std::min(2.0 * cfg.alpha_final, cfg.alpha_max);
  next.epochs = std::max(cfg.epochs / 2, cfg.epochs_min);
  const auto cap = [](int b, std::size_t n) {
    return static_cast<int>(std::min<std::size_t>(2 * static_cast<std::size_t>(b), n));
  };
  next.batch_x = cap(cfg.batch_x, n_points);
  next.batch_w = cap(cfg.batch_w, n_domain_points);
  return next;
}

int expected_stage_count(std::size_t n_points, int batch_x) {
  int stages = 1;
  for (std::size_t b = static_cast<std::size_t>(batch_x); b < n_points; b *= 2) ++stages;
  return stages;
}

}  // namespace pcparam
