#pragma once

#include "pcparam/losses.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace pcparam {

struct RmsPropConfig {
  double lr = 1e-4;
  double rho = 0.99;
  double momentum = 0.9;
  double eps = 1e-8;

  void validate() const;
};

/// RMSprop with momentum applied to the preconditioned gradient:
///   v <- rho v + (1 - rho) g^2
///   m <- mu m + g / sqrt(v + eps)
///   theta <- theta - lr m
struct RmsPropState {
  RmsPropConfig config;
  Eigen::VectorXd square_avg;
  Eigen::VectorXd momentum_buf;

  static RmsPropState fresh(Eigen::Index n, const RmsPropConfig& config);
};

/// Updates `params` and `state` in place. Throws NumericError naming the
/// first non-finite gradient entry.
void rmsprop_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, RmsPropState& state);

/// Hyperparameters of one stage of the staged optimization.
struct StageConfig {
  int epochs = 10000;
  int batch_x = 1024;
  int batch_w = 1024;
  double sigma = 0.5;
  double alpha_initial = 2.0;
  double alpha_final = 20.0;
  double sigma_min = 0.001;
  double alpha_max = 100.0;
  int epochs_min = 1000;

  void validate() const;
  bool operator==(const StageConfig&) const = default;
};

/// alpha at epoch i (1-based) of an E-epoch stage: linear from
/// alpha_initial at i = 1 to alpha_final at i = E.
double alpha_schedule(int epoch, int epochs, double alpha_initial, double alpha_final);

/// Configuration of the next stage: sigma / sqrt 2, alpha doubled, epochs
/// halved (floor), batch sizes doubled, each subject to its cap.
StageConfig advance_stage(const StageConfig& cfg, std::size_t n_points, std::size_t n_domain_points);

/// Number of stages the staged loop runs for a cloud of `n_points`
/// starting from batch size `batch_x`: ceil(log2(n / B)) + 1.
int expected_stage_count(std::size_t n_points, int batch_x);

/// Summary of one completed stage.
struct StageRecord {
  int stage = 0;
  double sigma = 0.0;
  double alpha_initial = 0.0;
  double alpha_final = 0.0;
  int batch_x = 0;
  int batch_w = 0;
  int epochs = 0;
  LossBreakdown loss;  // mean over the stage's last epoch
  double hausdorff = std::numeric_limits<double>::quiet_NaN();
  double mean_abs_angle = std::numeric_limits<double>::quiet_NaN();
  double landmark_hausdorff = std::numeric_limits<double>::quiet_NaN();
};

struct TrainLog {
  std::vector<StageRecord> stages;
};

}  // namespace pcparam
