#pragma once

#include "pcparam/types.hpp"

#include <vector>

namespace pcparam {

struct HandConfig {
  double alpha = 20.0;

  void validate() const;
};

/// eta = 1 / sigma is derived where needed.
struct LegConfig {
  double sigma = 0.5;

  void validate() const;
};

/// Weights of the three objective terms. beta1 weighs the distortion energy,
/// beta2 the domain-matching term, beta3 the landmark term. A zero weight
/// disables its term (free-boundary, shape-matching and no-landmark runs).
struct ObjectiveConfig {
  double beta1 = 5.0;
  double beta2 = 1.0;
  double beta3 = 1.0;
  HandConfig hand;
  LegConfig leg;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Soft Hausdorff (HAND)

/// Soft-max over points of y of the soft-min distance to w, plus the same
/// with the roles swapped. Tends to the modified Hausdorff distance as
/// alpha grows.
double hand(const Points& y, const Points& w, const HandConfig& cfg);

struct HandEval {
  double value = 0.0;
  Points grad_y;
  Points grad_w;
};

HandEval hand_with_gradient(const Points& y, const Points& w, const HandConfig& cfg);

// ---------------------------------------------------------------------------
// Localized distortion energy (LEG)

/// (1/N^2) sum_{i,j} (exp(-|x_i-x_j|^2/s^2) - exp(-|y_i-y_j|^2/(s^2 l_ij^2)))^2
/// with an explicit symmetric matrix of pair scales l_ij.
double leg(const Points& original, const Points& mapped, const Eigen::MatrixXd& lambda_pair,
           const LegConfig& cfg);

/// l_ij = 1 / (v_i + v_j) from per-point inverse scales v.
Eigen::MatrixXd lambda_pair_from_inverse(const Eigen::VectorXd& lambda_inv);

struct LegEval {
  double value = 0.0;
  Points grad_mapped;
  Eigen::VectorXd grad_lambda_inv;
};

/// LEG with pair scales factored through per-point inverse scales, with
/// gradients for the mapped coordinates and the inverse scales.
LegEval leg_with_gradient(const Points& original, const Points& mapped,
                          const Eigen::VectorXd& lambda_inv, const LegConfig& cfg);

// ---------------------------------------------------------------------------
// Landmarks and the combined objective

/// Sum of HAND over matched (landmark image, target) pairs.
double landmark_energy(const std::vector<Points>& mapped_landmarks,
                       const std::vector<Points>& targets, const HandConfig& cfg);

struct LossBreakdown {
  double total = 0.0;
  double leg = 0.0;
  double hand = 0.0;
  double landmark = 0.0;
};

/// One evaluation of the combined objective on a batch.
///
/// `original` / `mapped` / `lambda_inv` cover the batch points followed by
/// any appended landmark points; only the first `batch_rows` rows enter the
/// domain term. `landmark_rows[k]` lists the rows of `mapped` forming the
/// k-th landmark region, matched against `targets[k]`.
struct ObjectiveInputs {
  const Points& original;
  const Points& mapped;
  const Eigen::VectorXd& lambda_inv;
  Eigen::Index batch_rows;
  const Points& domain_sample;
  const std::vector<std::vector<int>>& landmark_rows;
  const std::vector<Points>& targets;
};

struct ObjectiveEval {
  LossBreakdown loss;
  Points grad_mapped;
  Eigen::VectorXd grad_lambda_inv;
};

/// beta1 * LEG + beta2 * HAND(batch image, domain sample) + beta3 * landmark energy.
ObjectiveEval total_loss(const ObjectiveInputs& in, const ObjectiveConfig& cfg);

// ---------------------------------------------------------------------------
// Distortion / angle bound audit

struct BoundAuditReport {
  double R = 0.0;          // bound on edge lengths
  double lambda0 = 0.0;    // lower bound on the pair scales over mesh edges
  double LambdaT = 0.0;    // upper bound on the observed length ratios over mesh edges
  double r_lambda = 0.0;   // LambdaT / lambda0
  double leg = 0.0;        // distortion energy over all vertices
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Evaluates both sides of the inequality bounding area-weighted squared
/// angle distortion of `mesh` under `mapped` by the distortion energy plus a
/// mesh-size slack term. Bounds R, lambda0 and LambdaT are derived from the
/// instance's edges and widened by a relative 1e-9 so the strict hypotheses hold.
BoundAuditReport audit_theorem_bound(const TriangleMesh& mesh, const Points& mapped,
                                     const Eigen::MatrixXd& lambda_pair, const LegConfig& cfg);

}  // namespace pcparam
