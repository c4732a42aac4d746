#include "pcparam/losses.hpp"

#include "pcparam/boltzmann.hpp"
#include "pcparam/geometry.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

namespace pcparam {

void HandConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("HAND alpha must be positive and finite");
}

void LegConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("LEG sigma must be positive and finite");
}

void ObjectiveConfig::validate() const {
  if (!(beta1 >= 0.0) || !(beta2 >= 0.0) || !(beta3 >= 0.0))
    throw std::invalid_argument("objective weights must be non-negative");
  if (beta1 == 0.0 && beta2 == 0.0 && beta3 == 0.0)
    throw std::invalid_argument("at least one objective weight must be positive");
  hand.validate();
  leg.validate();
}

// ---------------------------------------------------------------------------

namespace {

// Row-wise soft-min of `d` and the gradient of each row's soft-min with
// respect to that row's entries.
void row_soft_min(const Eigen::ArrayXXd& d, double alpha, Eigen::VectorXd& value,
                  Eigen::ArrayXXd& grad) {
  const Eigen::ArrayXd lo = d.rowwise().minCoeff();
  Eigen::ArrayXXd w = (-alpha * (d.colwise() - lo)).exp();
  const Eigen::ArrayXd total = w.rowwise().sum();
  w.colwise() /= total;
  value = (w * d).rowwise().sum().matrix();
  grad = w * (1.0 - alpha * (d.colwise() - value.array()));
}

}  // namespace

HandEval hand_with_gradient(const Points& y, const Points& w, const HandConfig& cfg) {
  cfg.validate();
  if (y.rows() == 0 || w.rows() == 0) throw std::invalid_argument("HAND of an empty point set");
  const Eigen::ArrayXXd d = pairwise_distances(y, w).array();

  Eigen::VectorXd r, c;
  Eigen::ArrayXXd grad_r, grad_c_t;
  row_soft_min(d, cfg.alpha, r, grad_r);
  row_soft_min(d.transpose(), cfg.alpha, c, grad_c_t);

  const auto outer_r = boltzmann_with_gradient(r, cfg.alpha);
  const auto outer_c = boltzmann_with_gradient(c, cfg.alpha);

  HandEval out;
  out.value = outer_r.value + outer_c.value;

  Eigen::ArrayXXd dh = grad_r.colwise() * outer_r.gradient.array();
  dh += (grad_c_t.colwise() * outer_c.gradient.array()).transpose();
  // d|y_i - w_k| / dy_i = (y_i - w_k) / |y_i - w_k|; zero at coincident points.
  const Eigen::MatrixXd e = (d > 0.0).select(dh / d, 0.0).matrix();
  out.grad_y = e.rowwise().sum().asDiagonal() * y - e * w;
  out.grad_w = e.colwise().sum().transpose().asDiagonal() * w - e.transpose() * y;
  return out;
}

double hand(const Points& y, const Points& w, const HandConfig& cfg) {
  cfg.validate();
  if (y.rows() == 0 || w.rows() == 0) throw std::invalid_argument("HAND of an empty point set");
  const Eigen::ArrayXXd d = pairwise_distances(y, w).array();
  Eigen::VectorXd r(d.rows()), c(d.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i) r(i) = boltzmann(d.row(i), -cfg.alpha);
  for (Eigen::Index k = 0; k < d.cols(); ++k) c(k) = boltzmann(d.col(k), -cfg.alpha);
  return boltzmann(r, cfg.alpha) + boltzmann(c, cfg.alpha);
}

// ---------------------------------------------------------------------------

namespace {

void check_leg_shapes(const Points& original, const Points& mapped, Eigen::Index n_scales) {
  if (original.rows() != mapped.rows() || original.rows() != n_scales)
    throw std::invalid_argument("LEG size mismatch: " + std::to_string(original.rows()) +
                                " original, " + std::to_string(mapped.rows()) + " mapped, " +
                                std::to_string(n_scales) + " scales");
  if (original.rows() == 0) throw std::invalid_argument("LEG of an empty point set");
}

}  // namespace

double leg(const Points& original, const Points& mapped, const Eigen::MatrixXd& lambda_pair,
           const LegConfig& cfg) {
  cfg.validate();
  check_leg_shapes(original, mapped, lambda_pair.rows());
  if (lambda_pair.cols() != lambda_pair.rows())
    throw std::invalid_argument("pair-scale matrix must be square");
  if (!(lambda_pair.array() > 0.0).all())
    throw std::invalid_argument("pair scales must be positive");
  const Eigen::Index n = original.rows();
  const double inv_s2 = 1.0 / (cfg.sigma * cfg.sigma);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dx2 = (original.row(i) - original.row(j)).squaredNorm();
      const double dy2 = (mapped.row(i) - mapped.row(j)).squaredNorm();
      const double l = lambda_pair(i, j);
      const double diff = std::exp(-dx2 * inv_s2) - std::exp(-dy2 * inv_s2 / (l * l));
      row += diff * diff;
    }
    sum += row;
  }
  return sum / static_cast<double>(n * n);
}

Eigen::MatrixXd lambda_pair_from_inverse(const Eigen::VectorXd& lambda_inv) {
  if ((lambda_inv.array() < 0.0).any() || !lambda_inv.allFinite())
    throw std::invalid_argument("inverse scales must be finite and non-negative");
  const Eigen::Index n = lambda_inv.size();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = lambda_inv(i) + lambda_inv(j);
      if (!(s > 0.0))
        throw std::invalid_argument("pair scale undefined for points " + std::to_string(i) +
                                    " and " + std::to_string(j));
      out(i, j) = 1.0 / s;
    }
  return out;
}

LegEval leg_with_gradient(const Points& original, const Points& mapped,
                          const Eigen::VectorXd& lambda_inv, const LegConfig& cfg) {
  cfg.validate();
  check_leg_shapes(original, mapped, lambda_inv.size());
  if ((lambda_inv.array() < 0.0).any() || !lambda_inv.allFinite())
    throw std::invalid_argument("inverse scales must be finite and non-negative");
  const Eigen::Index n = original.rows();
  const double inv_s2 = 1.0 / (cfg.sigma * cfg.sigma);
  const double norm = 1.0 / static_cast<double>(n * n);

  // Symmetric pairs are visited once; diagonal terms vanish identically.
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);  // dLEG/d|y_i-y_j|^2 per ordered pair
  Eigen::VectorXd grad_l = Eigen::VectorXd::Zero(n);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double s = lambda_inv(i) + lambda_inv(j);
      if (!(s > 0.0))
        throw std::invalid_argument("pair scale undefined for points " + std::to_string(i) +
                                    " and " + std::to_string(j));
      const double dx2 = (original.row(i) - original.row(j)).squaredNorm();
      const double dy2 = (mapped.row(i) - mapped.row(j)).squaredNorm();
      const double a = std::exp(-dx2 * inv_s2);
      const double b = std::exp(-dy2 * s * s * inv_s2);
      const double diff = a - b;
      sum += diff * diff;
      const double db = -2.0 * diff * norm;  // dLEG/db for one ordered pair
      e(i, j) = db * (-b * s * s * inv_s2);
      e(j, i) = e(i, j);
      const double ds = db * (-2.0 * b * dy2 * s * inv_s2);
      grad_l(i) += 2.0 * ds;
      grad_l(j) += 2.0 * ds;
    }
  }
  LegEval out;
  out.value = 2.0 * sum * norm;
  // Each unordered pair appears twice in the full sum, and d|y_i-y_j|^2/dy_i = 2(y_i-y_j).
  out.grad_mapped = 4.0 * (e.rowwise().sum().asDiagonal() * mapped - e * mapped);
  out.grad_lambda_inv = std::move(grad_l);
  return out;
}

// ---------------------------------------------------------------------------

double landmark_energy(const std::vector<Points>& mapped_landmarks,
                       const std::vector<Points>& targets, const HandConfig& cfg) {
  if (mapped_landmarks.size() != targets.size())
    throw std::invalid_argument("landmark/target list length mismatch: " +
                                std::to_string(mapped_landmarks.size()) + " vs " +
                                std::to_string(targets.size()));
  double sum = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) sum += hand(mapped_landmarks[k], targets[k], cfg);
  return sum;
}

ObjectiveEval total_loss(const ObjectiveInputs& in, const ObjectiveConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = in.mapped.rows();
  if (in.original.rows() != n) throw std::invalid_argument("original/mapped row mismatch");
  if (in.batch_rows < 1 || in.batch_rows > n) throw std::invalid_argument("invalid batch row count");
  if (in.landmark_rows.size() != in.targets.size())
    throw std::invalid_argument("landmark/target list length mismatch: " +
                                std::to_string(in.landmark_rows.size()) + " vs " +
                                std::to_string(in.targets.size()));

  ObjectiveEval out;
  out.grad_mapped = Points::Zero(n, in.mapped.cols());
  out.grad_lambda_inv = Eigen::VectorXd::Zero(n);

  if (cfg.beta1 > 0.0) {
    const LegEval l = leg_with_gradient(in.original, in.mapped, in.lambda_inv, cfg.leg);
    out.loss.leg = l.value;
    out.grad_mapped += cfg.beta1 * l.grad_mapped;
    out.grad_lambda_inv += cfg.beta1 * l.grad_lambda_inv;
  }
  if (cfg.beta2 > 0.0) {
    if (in.domain_sample.rows() == 0)
      throw std::invalid_argument("domain term enabled but the domain sample is empty");
    const HandEval h = hand_with_gradient(in.mapped.topRows(in.batch_rows), in.domain_sample, cfg.hand);
    out.loss.hand = h.value;
    out.grad_mapped.topRows(in.batch_rows) += cfg.beta2 * h.grad_y;
  }
  if (cfg.beta3 > 0.0) {
    for (std::size_t k = 0; k < in.targets.size(); ++k) {
      const Points image = gather_rows(in.mapped, in.landmark_rows[k]);
      const HandEval h = hand_with_gradient(image, in.targets[k], cfg.hand);
      out.loss.landmark += h.value;
      for (std::size_t r = 0; r < in.landmark_rows[k].size(); ++r)
        out.grad_mapped.row(in.landmark_rows[k][r]) += cfg.beta3 * h.grad_y.row(static_cast<Eigen::Index>(r));
    }
  }
  out.loss.total = cfg.beta1 * out.loss.leg + cfg.beta2 * out.loss.hand + cfg.beta3 * out.loss.landmark;
  if (!std::isfinite(out.loss.total)) throw NumericError("objective evaluated to a non-finite value");
  return out;
}

// ---------------------------------------------------------------------------

BoundAuditReport audit_theorem_bound(const TriangleMesh& mesh, const Points& mapped,
                                     const Eigen::MatrixXd& lambda_pair, const LegConfig& cfg) {
  cfg.validate();
  mesh.validate();
  const Points& x = mesh.vertices;
  if (mapped.rows() != x.rows()) throw std::invalid_argument("mapped cloud size mismatch");

  double max_edge = 0.0;
  double min_scale = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    for (int c = 0; c < 3; ++c) {
      const int i = mesh.triangles(t, c), j = mesh.triangles(t, (c + 1) % 3);
      const double dx = (x.row(i) - x.row(j)).norm();
      if (dx == 0.0)
        throw std::invalid_argument("zero-length edge in triangle " + std::to_string(t));
      max_edge = std::max(max_edge, dx);
      min_scale = std::min(min_scale, lambda_pair(i, j));
      max_ratio = std::max(max_ratio, (mapped.row(i) - mapped.row(j)).norm() / dx);
    }
  }
  if (!(min_scale > 0.0)) throw std::invalid_argument("pair scales must be positive on mesh edges");

  constexpr double widen = 1e-9;
  BoundAuditReport r;
  r.R = max_edge * (1.0 + widen);
  r.lambda0 = min_scale * (1.0 - widen);
  r.LambdaT = std::max(max_ratio, r.lambda0) * (1.0 + widen);
  r.r_lambda = r.LambdaT / r.lambda0;
  r.leg = leg(x, mapped, lambda_pair, cfg);

  const double n2 = static_cast<double>(x.rows()) * static_cast<double>(x.rows());
  const double eta2 = 1.0 / (cfg.sigma * cfg.sigma);
  const double rl2 = r.r_lambda * r.r_lambda;
  const double r2 = r.R * r.R;
  const double factor = std::exp(eta2 * rl2 * r2) / eta2;
  r.lhs = factor * factor * r.leg +
          84.0 * static_cast<double>(mesh.num_triangles()) / n2 * rl2 * rl2 * r2 * r2;

  const Eigen::VectorXd areas = triangle_areas(mesh);
  double weighted = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto tri = mesh.triangles.row(t);
    const Eigen::Vector3d theta = triangle_angles(x.row(tri(0)).transpose(), x.row(tri(1)).transpose(),
                                                  x.row(tri(2)).transpose(), static_cast<int>(t));
    const Eigen::Vector3d phi =
        triangle_angles(mapped.row(tri(0)).transpose(), mapped.row(tri(1)).transpose(),
                        mapped.row(tri(2)).transpose(), static_cast<int>(t));
    weighted += areas(t) * areas(t) * (theta - phi).squaredNorm();
  }
  r.rhs = 4.0 / (std::numbers::pi * std::numbers::pi) / n2 * weighted;
  r.holds = r.lhs >= r.rhs;
  return r;
}

}  // namespace pcparam
