#pragma once

#include "pcparam/domains.hpp"
#include "pcparam/losses.hpp"
#include "pcparam/neural.hpp"
#include "pcparam/optimizer.hpp"

#include <functional>
#include <optional>
#include <string>

namespace pcparam {

enum class TrainMode { ShapeMatching, FreeBoundary, FixedBoundary, Landmark };

std::string to_string(TrainMode m);
TrainMode train_mode_from_string(const std::string& s);

/// Objective weights after applying the mode contract: free boundary drops
/// the domain and landmark terms, fixed boundary drops landmarks, shape
/// matching keeps only the domain term.
ObjectiveConfig effective_objective(TrainMode mode, ObjectiveConfig cfg);

struct TrainInputs {
  const Points* cloud = nullptr;              // 3D (2D in shape-matching mode)
  const DomainSpec* domain = nullptr;         // required when the domain term is active
  const LandmarkSet* landmarks = nullptr;     // optional
  const TriangleMesh* reference = nullptr;    // optional, vertices follow the cloud
};

/// One optimization step as seen by observers.
struct BatchRecord {
  int stage = 0;
  int epoch = 0;
  int batch = 0;
  double alpha = 0.0;
  double sigma = 0.0;
  std::vector<int> rows;  // cloud indices: batch first, then appended landmark points
  Eigen::Index batch_rows = 0;
  const Points* domain_sample = nullptr;
  const NetworkParams* map_before = nullptr;
  const NetworkParams* lambda_before = nullptr;  // null when lambda_inv is fixed
  LossBreakdown loss;
};

struct TrainOptions {
  TrainMode mode = TrainMode::FixedBoundary;
  ObjectiveConfig objective;
  StageConfig stages;
  RmsPropConfig optimizer;
  NetworkSpec map_net = parametrization_net_spec();
  std::optional<NetworkSpec> lambda_net = inverse_lambda_net_spec();
  double fixed_lambda_inv = 0.5;   // used when lambda_net is empty
  Eigen::Index domain_pool = 0;    // 0: fresh domain sample per batch; otherwise a fixed pool of this size
  Eigen::Index domain_points = 0;  // cap on the domain batch size; 0 means |X|
  Eigen::Index eval_samples = 4000;
  std::uint64_t seed = 0;
  std::optional<NetworkParams> initial_map;
  std::optional<NetworkParams> initial_lambda;

  std::function<void(const BatchRecord&)> on_batch;
  std::function<void(const StageRecord&, const NetworkParams&, const NetworkParams*)> on_stage;
};

struct TrainResult {
  NetworkParams map_net;
  std::optional<NetworkParams> lambda_net;
  TrainLog log;
};

/// Staged minibatch optimization. Each stage runs its epochs over a fresh
/// permutation of the cloud split into ceil(|X| / B_X) batches; stages repeat
/// until and including the first one whose batch covers the whole cloud.
/// Shape-matching mode runs a single full-batch stage.
TrainResult train(const TrainInputs& inputs, const TrainOptions& options);

}  // namespace pcparam
