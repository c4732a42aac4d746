#include "pcparam/train.hpp"

#include "pcparam/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace pcparam {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string where(int stage, int epoch, int batch) {
  return "stage " + std::to_string(stage) + ", epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch);
}

struct Evaluator {
  const TrainInputs& in;
  Points dense;

  void fill(StageRecord& rec, const NetworkParams& map) const {
    const Points mapped = forward(map, *in.cloud);
    if (dense.rows() > 0) rec.hausdorff = hausdorff_exact(mapped, dense);
    if (in.reference) rec.mean_abs_angle = angle_distortion(*in.reference, mapped).mean_abs;
    if (in.landmarks && !in.landmarks->empty()) {
      double sum = 0.0;
      for (std::size_t k = 0; k < in.landmarks->size(); ++k)
        sum += hausdorff_exact(gather_rows(mapped, in.landmarks->regions[k]), in.landmarks->targets[k]);
      rec.landmark_hausdorff = sum;
    }
  }
};

}  // namespace

std::string to_string(TrainMode m) {
  switch (m) {
    case TrainMode::ShapeMatching: return "shape_matching";
    case TrainMode::FreeBoundary: return "free_boundary";
    case TrainMode::FixedBoundary: return "fixed_boundary";
    case TrainMode::Landmark: return "landmark";
  }
  return "?";
}

TrainMode train_mode_from_string(const std::string& s) {
  for (TrainMode m : {TrainMode::ShapeMatching, TrainMode::FreeBoundary, TrainMode::FixedBoundary, TrainMode::Landmark})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

ObjectiveConfig effective_objective(TrainMode mode, ObjectiveConfig cfg) {
  switch (mode) {
    case TrainMode::ShapeMatching:
      cfg.beta1 = 0.0;
      cfg.beta3 = 0.0;
      break;
    case TrainMode::FreeBoundary:
      cfg.beta2 = 0.0;
      cfg.beta3 = 0.0;
      break;
    case TrainMode::FixedBoundary:
      cfg.beta3 = 0.0;
      break;
    case TrainMode::Landmark:
      break;
  }
  return cfg;
}

TrainResult train(const TrainInputs& in, const TrainOptions& opt) {
  if (!in.cloud) throw std::invalid_argument("train: no point cloud");
  const Points& cloud = *in.cloud;
  PointCloud checked(cloud);
  const auto n = static_cast<std::size_t>(cloud.rows());
  const ObjectiveConfig objective = effective_objective(opt.mode, opt.objective);
  objective.validate();
  opt.stages.validate();
  opt.optimizer.validate();
  opt.map_net.validate();

  if (opt.map_net.input_dim != cloud.cols())
    throw std::invalid_argument("map network expects " + std::to_string(opt.map_net.input_dim) +
                                "D input but the cloud is " + std::to_string(cloud.cols()) + "D");
  if (opt.map_net.output_dim != 2) throw std::invalid_argument("map network must output 2D coordinates");
  if (objective.beta2 > 0.0 && !in.domain) throw std::invalid_argument("the domain term needs a parameter domain");
  const bool use_landmarks = objective.beta3 > 0.0 && in.landmarks && !in.landmarks->empty();
  if (objective.beta3 > 0.0 && !use_landmarks) throw std::invalid_argument("landmark mode needs landmark regions");
  if (use_landmarks) in.landmarks->validate(cloud.rows());
  if (in.reference && in.reference->num_vertices() != cloud.rows())
    throw std::invalid_argument("reference mesh vertex count differs from the cloud size");
  const bool learn_lambda = objective.beta1 > 0.0 && opt.lambda_net.has_value();
  if (learn_lambda) {
    opt.lambda_net->validate();
    if (opt.lambda_net->input_dim != cloud.cols() || opt.lambda_net->output_dim != 1)
      throw std::invalid_argument("inverse-scale network must map the cloud dimension to one value");
  }
  if (!learn_lambda && !(opt.fixed_lambda_inv > 0.0))
    throw std::invalid_argument("fixed inverse scale must be positive");

  std::mt19937_64 rng(splitmix(opt.seed));
  TrainResult result;
  result.map_net = opt.initial_map ? *opt.initial_map : init_params(opt.map_net, splitmix(opt.seed + 1));
  if (result.map_net.spec != opt.map_net) throw std::invalid_argument("initial map parameters do not match the spec");
  if (learn_lambda) {
    result.lambda_net = opt.initial_lambda ? *opt.initial_lambda : init_params(*opt.lambda_net, splitmix(opt.seed + 2));
    if (result.lambda_net->spec != *opt.lambda_net)
      throw std::invalid_argument("initial inverse-scale parameters do not match the spec");
  }
  RmsPropState map_state = RmsPropState::fresh(result.map_net.values.size(), opt.optimizer);
  RmsPropState lambda_state =
      RmsPropState::fresh(learn_lambda ? result.lambda_net->values.size() : 0, opt.optimizer);

  std::size_t w_cap = opt.domain_points > 0 ? static_cast<std::size_t>(opt.domain_points) : n;
  if (opt.domain_pool > 0) w_cap = std::min(w_cap, static_cast<std::size_t>(opt.domain_pool));
  Points pool;
  if (in.domain && opt.domain_pool > 0) pool = sample_area(*in.domain, opt.domain_pool, splitmix(opt.seed + 3));

  Evaluator eval{in, {}};
  if (in.domain && opt.eval_samples > 0) eval.dense = sample_area(*in.domain, opt.eval_samples, splitmix(opt.seed + 4));

  StageConfig cfg = opt.stages;
  cfg.batch_x = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_x), n));
  cfg.batch_w = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_w), w_cap));
  if (opt.mode == TrainMode::ShapeMatching) cfg.batch_x = static_cast<int>(n);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> empty_rows;
  std::vector<Points> empty_targets;
  const std::vector<Points>& targets = use_landmarks ? in.landmarks->targets : empty_targets;
  Points no_domain;

  for (int stage = 1;; ++stage) {
    const bool last = static_cast<std::size_t>(cfg.batch_x) >= n;
    const auto bx = static_cast<std::size_t>(cfg.batch_x);
    const std::size_t batches = (n + bx - 1) / bx;
    LossBreakdown epoch_sum;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
      ObjectiveConfig step_cfg = objective;
      step_cfg.hand.alpha = alpha_schedule(epoch, cfg.epochs, cfg.alpha_initial, cfg.alpha_final);
      step_cfg.leg.sigma = cfg.sigma;
      std::shuffle(perm.begin(), perm.end(), rng);
      epoch_sum = {};

      for (std::size_t b = 0; b < batches; ++b) {
        const int batch_id = static_cast<int>(b) + 1;
        std::vector<int> rows(perm.begin() + static_cast<std::ptrdiff_t>(b * bx),
                              perm.begin() + static_cast<std::ptrdiff_t>(std::min(n, (b + 1) * bx)));
        const auto batch_rows = static_cast<Eigen::Index>(rows.size());
        std::vector<std::vector<int>> landmark_rows;
        if (use_landmarks) {
          std::vector<int> position(n, -1);
          for (std::size_t r = 0; r < rows.size(); ++r) position[rows[r]] = static_cast<int>(r);
          for (const auto& region : in.landmarks->regions) {
            std::vector<int> local;
            for (int idx : region) {
              if (position[idx] < 0) {
                position[idx] = static_cast<int>(rows.size());
                rows.push_back(idx);
              }
              local.push_back(position[idx]);
            }
            landmark_rows.push_back(std::move(local));
          }
        }

        Points w_batch;
        if (objective.beta2 > 0.0) {
          if (opt.domain_pool > 0) {
            std::vector<int> pick(static_cast<std::size_t>(pool.rows()));
            std::iota(pick.begin(), pick.end(), 0);
            std::shuffle(pick.begin(), pick.end(), rng);
            pick.resize(static_cast<std::size_t>(cfg.batch_w));
            w_batch = gather_rows(pool, pick);
          } else {
            w_batch = sample_area(*in.domain, cfg.batch_w, rng());
          }
        }

        const Points x_batch = gather_rows(cloud, rows);
        const ForwardCache map_cache = forward_cached(result.map_net, x_batch);
        std::optional<ForwardCache> lambda_cache;
        Eigen::VectorXd lambda_inv;
        if (learn_lambda) {
          lambda_cache = forward_cached(*result.lambda_net, x_batch);
          lambda_inv = lambda_cache->output.col(0);
        } else {
          lambda_inv = Eigen::VectorXd::Constant(x_batch.rows(), opt.fixed_lambda_inv);
        }

        ObjectiveEval ev;
        try {
          ev = total_loss({x_batch, map_cache.output, lambda_inv, batch_rows,
                           objective.beta2 > 0.0 ? w_batch : no_domain,
                           use_landmarks ? landmark_rows : empty_rows, targets},
                          step_cfg);
        } catch (const NumericError& e) {
          throw NumericError(std::string(e.what()) + " at " + where(stage, epoch, batch_id));
        }

        if (opt.on_batch) {
          BatchRecord rec;
          rec.stage = stage;
          rec.epoch = epoch;
          rec.batch = batch_id;
          rec.alpha = step_cfg.hand.alpha;
          rec.sigma = step_cfg.leg.sigma;
          rec.rows = rows;
          rec.batch_rows = batch_rows;
          rec.domain_sample = &w_batch;
          rec.map_before = &result.map_net;
          rec.lambda_before = learn_lambda ? &*result.lambda_net : nullptr;
          rec.loss = ev.loss;
          opt.on_batch(rec);
        }

        try {
          const NetworkGradient gm = backward(result.map_net, map_cache, ev.grad_mapped);
          if (learn_lambda) {
            const NetworkGradient gl = backward(*result.lambda_net, *lambda_cache, Points(ev.grad_lambda_inv));
            rmsprop_step(result.lambda_net->values, gl.params, lambda_state);
          }
          rmsprop_step(result.map_net.values, gm.params, map_state);
        } catch (const NumericError& e) {
          throw NumericError(std::string(e.what()) + " at " + where(stage, epoch, batch_id));
        }

        epoch_sum.total += ev.loss.total;
        epoch_sum.leg += ev.loss.leg;
        epoch_sum.hand += ev.loss.hand;
        epoch_sum.landmark += ev.loss.landmark;
      }
    }

    StageRecord rec;
    rec.stage = stage;
    rec.sigma = cfg.sigma;
    rec.alpha_initial = cfg.alpha_initial;
    rec.alpha_final = cfg.alpha_final;
    rec.batch_x = cfg.batch_x;
    rec.batch_w = cfg.batch_w;
    rec.epochs = cfg.epochs;
    const double nb = static_cast<double>(batches);
    rec.loss = {epoch_sum.total / nb, epoch_sum.leg / nb, epoch_sum.hand / nb, epoch_sum.landmark / nb};
    eval.fill(rec, result.map_net);
    result.log.stages.push_back(rec);
    if (opt.on_stage) opt.on_stage(rec, result.map_net, learn_lambda ? &*result.lambda_net : nullptr);

    if (last) break;
    cfg = advance_stage(cfg, n, w_cap);
  }
  return result;
}

}  // namespace pcparam
