#include "gazeintent/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gazeintent/random.hpp"

namespace gazeintent {
namespace {

constexpr std::array<FeatureMask, 5> kMasks = {
    FeatureMask::kAll, FeatureMask::kNo1stFixation, FeatureMask::kNo2ndFixation,
    FeatureMask::kNoSaccade, FeatureMask::kObservationData};

constexpr std::array<std::string_view, 5> kMaskNames = {
    "All", "No1stFixation", "No2ndFixation", "NoSaccade", "ObservationData"};

std::vector<ObservationVector> gather(std::span<const ObservationVector> rows,
                                      std::span<const std::size_t> idx) {
  std::vector<ObservationVector> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(rows[i]);
  return out;
}

}  // namespace

std::span<const FeatureMask> all_masks() { return kMasks; }

std::string_view mask_name(FeatureMask mask) { return kMaskNames[static_cast<std::size_t>(mask)]; }

FeatureMask parse_mask(std::string_view name) {
  for (std::size_t i = 0; i < kMasks.size(); ++i) {
    if (kMaskNames[i] == name) return kMasks[i];
  }
  throw Error(ErrorCode::kUnknownMask, "unknown mask '" + std::string(name) + "'");
}

bool mask_keeps(FeatureMask mask, Feature f) {
  const FeatureGroup g = group_of(f);
  switch (mask) {
    case FeatureMask::kNo1stFixation: return g != FeatureGroup::kFirstFixation;
    case FeatureMask::kNo2ndFixation: return g != FeatureGroup::kSecondFixation;
    case FeatureMask::kNoSaccade: return g != FeatureGroup::kSaccade;
    case FeatureMask::kAll:
    case FeatureMask::kObservationData: break;
  }
  return true;
}

bool uses_posterior(FeatureMask mask) { return mask != FeatureMask::kObservationData; }

Encoder::Encoder(const BayesianModel& model, FeatureMask mask) : model_(&model), mask_(mask) {
  for (std::size_t i = 0; i < model.densities.size(); ++i) {
    if (mask_keeps(mask, model.densities[i].feature)) slots_.push_back(i);
  }
  if (slots_.empty()) {
    throw Error(ErrorCode::kUnknownMask,
                "mask " + std::string(mask_name(mask)) + " leaves no features of the model");
  }
}

void Encoder::encode(const ObservationVector& obs, Eigen::Ref<Eigen::VectorXd> out) const {
  if (out.size() != dim()) throw Error(ErrorCode::kDimensionMismatch, "encoder output size");
  const auto m = static_cast<Eigen::Index>(slots_.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    const DensityPair& pair = model_->densities[slots_[static_cast<std::size_t>(k)]];
    const auto& value = obs[pair.feature];
    if (uses_posterior(mask_)) {
      out(k) = feature_density(pair, value, true);
      out(m + k) = feature_density(pair, value, false);
    } else {
      if (value && !std::isfinite(*value)) {
        throw Error(ErrorCode::kInvalidObservation,
                    "non-finite value for " + std::string(feature_name(pair.feature)));
      }
      out(k) = value ? *value : std::numeric_limits<double>::quiet_NaN();
    }
  }
}

Eigen::VectorXd Encoder::encode(const ObservationVector& obs) const {
  Eigen::VectorXd v(dim());
  encode(obs, v);
  return v;
}

Eigen::MatrixXd Encoder::encode_rows(std::span<const ObservationVector> rows) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), dim());
  Eigen::VectorXd v(dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    encode(rows[i], v);
    x.row(static_cast<Eigen::Index>(i)) = v.transpose();
  }
  return x;
}

Prediction classify(const IntentModel& model, const ObservationVector& obs) {
  const Encoder enc(model.bayes, model.mask);
  return predict(model.svm, enc.encode(obs));
}

Eigen::VectorXd labels_of(std::span<const ObservationVector> rows) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].label == Label::kUnlabeled) {
      throw Error(ErrorCode::kIncompleteData, "row " + std::to_string(i) + " has no label");
    }
    y(static_cast<Eigen::Index>(i)) = rows[i].label == Label::kTrue ? 1.0 : -1.0;
  }
  return y;
}

SplitIndices sample_and_split(const std::vector<bool>& is_true, std::uint64_t seed, int ratio_true,
                              int ratio_false, std::array<int, 3> split) {
  if (ratio_true <= 0 || ratio_false <= 0 || split[0] < 0 || split[1] < 0 || split[2] < 0 ||
      split[0] + split[1] + split[2] <= 0) {
    throw Error(ErrorCode::kConfiguration, "ratios and split weights must be positive");
  }
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < is_true.size(); ++i) (is_true[i] ? pos : neg).push_back(i);
  const std::size_t want_neg = pos.size() * static_cast<std::size_t>(ratio_false) /
                               static_cast<std::size_t>(ratio_true);
  if (neg.size() < want_neg) {
    throw Error(ErrorCode::kInsufficientRows,
                "need " + std::to_string(want_neg) + " False rows for " + std::to_string(pos.size()) +
                    " True rows, have " + std::to_string(neg.size()) + " (short by " +
                    std::to_string(want_neg - neg.size()) + ")");
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(pos));
  rng.shuffle(std::span<std::size_t>(neg));
  neg.resize(want_neg);

  const int total = split[0] + split[1] + split[2];
  SplitIndices out;
  for (auto* cls : {&pos, &neg}) {
    const std::size_t n = cls->size();
    const std::size_t n_train = n * static_cast<std::size_t>(split[0]) / static_cast<std::size_t>(total);
    const std::size_t n_val = n * static_cast<std::size_t>(split[1]) / static_cast<std::size_t>(total);
    out.train.insert(out.train.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(n_train));
    out.val.insert(out.val.end(), cls->begin() + static_cast<std::ptrdiff_t>(n_train),
                   cls->begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.insert(out.test.end(), cls->begin() + static_cast<std::ptrdiff_t>(n_train + n_val), cls->end());
  }
  rng.shuffle(std::span<std::size_t>(out.train));
  rng.shuffle(std::span<std::size_t>(out.val));
  rng.shuffle(std::span<std::size_t>(out.test));
  return out;
}

std::vector<std::size_t> stratified_folds(const Eigen::VectorXd& y, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorCode::kConfiguration, "k must be positive");
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (Eigen::Index i = 0; i < y.size(); ++i) (y(i) > 0 ? pos : neg).push_back(static_cast<std::size_t>(i));
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(pos));
  rng.shuffle(std::span<std::size_t>(neg));
  std::vector<std::size_t> fold(static_cast<std::size_t>(y.size()));
  std::size_t next = 0;
  for (const auto* cls : {&pos, &neg}) {
    for (std::size_t idx : *cls) fold[idx] = next++ % k;
  }
  return fold;
}

GridResult cross_validate_grid(const Dataset& data, std::span<const double> sigma_grid,
                               std::span<const double> c_grid, std::size_t k, std::uint64_t seed,
                               const SmoOptions& base) {
  if (sigma_grid.empty() || c_grid.empty()) throw Error(ErrorCode::kEmptyGrid, "empty (sigma, C) grid");
  if (static_cast<std::size_t>(data.size()) < 5 * k) {
    throw Error(ErrorCode::kInsufficientRows, "cross-validation needs at least 5 k rows");
  }
  GridResult result;
  result.fold_of = stratified_folds(data.y, k, seed);
  std::vector<std::vector<std::size_t>> train_idx(k);
  std::vector<std::vector<std::size_t>> val_idx(k);
  for (std::size_t i = 0; i < result.fold_of.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) (f == result.fold_of[i] ? val_idx : train_idx)[f].push_back(i);
  }

  const GridCell* best = nullptr;
  for (double c : c_grid) {
    for (double sigma : sigma_grid) {
      GridCell cell{sigma, c, 0.0, {}};
      for (std::size_t f = 0; f < k; ++f) {
        SmoOptions opt = base;
        opt.c = c;
        opt.sigma = sigma;
        const TrainedSVM m = train_smo(data.subset(train_idx[f]), opt);
        const Dataset val = data.subset(val_idx[f]);
        std::size_t correct = 0;
        for (Eigen::Index i = 0; i < val.size(); ++i) {
          if (predict(m, val.x.row(i).transpose()).label == (val.y(i) > 0)) ++correct;
        }
        cell.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(val.size()));
      }
      cell.mean_accuracy = std::accumulate(cell.fold_accuracy.begin(), cell.fold_accuracy.end(), 0.0) /
                           static_cast<double>(k);
      result.cells.push_back(std::move(cell));
    }
  }
  for (const GridCell& cell : result.cells) {
    if (!best || cell.mean_accuracy > best->mean_accuracy ||
        (cell.mean_accuracy == best->mean_accuracy &&
         (cell.c < best->c || (cell.c == best->c && cell.sigma < best->sigma)))) {
      best = &cell;
    }
  }
  result.sigma = best->sigma;
  result.c = best->c;
  return result;
}

Metrics evaluate(const IntentModel& model, std::span<const ObservationVector> test, bool with_timing) {
  if (test.empty()) throw Error(ErrorCode::kIncompleteData, "empty test set");
  const Eigen::VectorXd y = labels_of(test);
  const Encoder enc(model.bayes, model.mask);
  Eigen::VectorXd input(enc.dim());
  std::vector<double> scores;
  std::vector<double> latency;
  scores.reserve(test.size());
  std::vector<bool> truth(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    enc.encode(test[i], input);
    const double d = predict(model.svm, input).decision_value;
    const auto t1 = std::chrono::steady_clock::now();
    scores.push_back(d);
    if (with_timing) latency.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    truth[i] = y(static_cast<Eigen::Index>(i)) > 0;
  }
  return compute_metrics(scores, truth, latency);
}

IntentModel train_intent_model(std::span<const ObservationVector> train,
                               std::span<const ObservationVector> val, const Condition& condition,
                               std::span<const Feature> features, FeatureMask mask,
                               const TrainOptions& options, std::uint64_t seed, GridResult* grid) {
  IntentModel model;
  const LabeledFeatureTable table(train.begin(), train.end());
  model.bayes = build_bayes_model(table, condition, features);
  model.mask = mask;
  const Encoder enc(model.bayes, mask);

  SmoOptions smo = options.smo;
  if (options.sigma_grid.size() * options.c_grid.size() > 1) {
    std::vector<ObservationVector> pool(train.begin(), train.end());
    pool.insert(pool.end(), val.begin(), val.end());
    const Dataset cv{enc.encode_rows(pool), labels_of(pool)};
    GridResult g = cross_validate_grid(cv, options.sigma_grid, options.c_grid, options.folds, seed, smo);
    smo.sigma = g.sigma;
    smo.c = g.c;
    if (grid) *grid = std::move(g);
  } else if (options.sigma_grid.size() == 1 && options.c_grid.size() == 1) {
    smo.sigma = options.sigma_grid.front();
    smo.c = options.c_grid.front();
  }
  const Dataset data{enc.encode_rows(train), labels_of(train)};
  model.svm = train_smo(data, smo);
  return model;
}

std::vector<AblationRow> ablation_run(std::span<const ObservationVector> rows,
                                      const Condition& condition, std::span<const Feature> features,
                                      std::span<const FeatureMask> masks, const TrainOptions& options,
                                      std::uint64_t seed) {
  std::vector<bool> is_true(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].condition != condition) {
      throw Error(ErrorCode::kConfiguration, "ablation rows must share condition " + to_string(condition));
    }
    is_true[i] = rows[i].label == Label::kTrue;
  }
  const SplitIndices split = sample_and_split(is_true, seed);
  const auto train = gather(rows, split.train);
  const auto val = gather(rows, split.val);
  const auto test = gather(rows, split.test);

  std::vector<AblationRow> out;
  for (FeatureMask mask : masks) {
    const IntentModel model = train_intent_model(train, val, condition, features, mask, options, seed);
    out.push_back({mask, evaluate(model, test), static_cast<std::size_t>(model.svm.support_vectors.rows())});
  }
  return out;
}

}  // namespace gazeintent
