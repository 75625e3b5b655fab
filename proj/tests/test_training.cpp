#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "gazeintent/synth.hpp"
#include "gazeintent/training.hpp"

using namespace gazeintent;

namespace {

std::vector<bool> flags(std::size_t n_true, std::size_t n_false) {
  std::vector<bool> v(n_true, true);
  v.resize(n_true + n_false, false);
  return v;
}

Dataset blobs(int n, double gap, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.x.resize(n, 2);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    d.y(i) = i % 3 == 0 ? 1 : -1;
    d.x(i, 0) = rng.normal(d.y(i) * gap / 2, 1);
    d.x(i, 1) = rng.normal();
  }
  return d;
}

}  // namespace

TEST(Masks, NamesAndGroups) {
  ASSERT_EQ(all_masks().size(), 5u);
  for (FeatureMask m : all_masks()) EXPECT_EQ(parse_mask(mask_name(m)), m);
  EXPECT_THROW(parse_mask("NoCoefficientK"), Error);
  for (FeatureMask m : all_masks()) EXPECT_TRUE(mask_keeps(m, Feature::kCoefficientK));
  EXPECT_FALSE(mask_keeps(FeatureMask::kNo1stFixation, Feature::kFix1Velocity));
  EXPECT_TRUE(mask_keeps(FeatureMask::kNo1stFixation, Feature::kFix2Velocity));
  EXPECT_FALSE(mask_keeps(FeatureMask::kNo2ndFixation, Feature::kFix2StdY));
  EXPECT_FALSE(mask_keeps(FeatureMask::kNoSaccade, Feature::kSacAmplitudeHead));
  EXPECT_TRUE(mask_keeps(FeatureMask::kObservationData, Feature::kSacAmplitudeHead));
  EXPECT_FALSE(uses_posterior(FeatureMask::kObservationData));
  EXPECT_TRUE(uses_posterior(FeatureMask::kNoSaccade));
}

TEST(Split, HundredTrueEightHundredFalse) {
  const auto s = sample_and_split(flags(100, 800), 1);
  EXPECT_EQ(s.train.size(), 240u);
  EXPECT_EQ(s.val.size(), 80u);
  EXPECT_EQ(s.test.size(), 80u);
  auto count_true = [](const std::vector<std::size_t>& idx) {
    return std::count_if(idx.begin(), idx.end(), [](std::size_t i) { return i < 100; });
  };
  EXPECT_EQ(count_true(s.train), 60);
  EXPECT_EQ(count_true(s.val), 20);
  EXPECT_EQ(count_true(s.test), 20);
}

TEST(Split, PartitionsAreDisjointAndDeterministic) {
  const auto fl = flags(37, 200);
  const auto a = sample_and_split(fl, 9);
  const auto b = sample_and_split(fl, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::set<std::size_t> seen;
  for (const auto* part : {&a.train, &a.val, &a.test}) {
    for (std::size_t i : *part) EXPECT_TRUE(seen.insert(i).second);
  }
  // Every True row is kept; False rows are capped at 3 per True row.
  EXPECT_EQ(seen.size(), 37u + 111u);
  for (std::size_t i = 0; i < 37; ++i) EXPECT_TRUE(seen.count(i));
  EXPECT_NE(sample_and_split(fl, 10).train, a.train);
}

TEST(Split, DeficitIsNamed) {
  try {
    sample_and_split(flags(100, 250), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientRows);
    EXPECT_NE(std::string(e.what()).find("short by 50"), std::string::npos) << e.what();
  }
  EXPECT_THROW(sample_and_split(flags(1, 3), 1, 0, 3), Error);
}

TEST(Folds, StratifiedAndBalanced) {
  Eigen::VectorXd y(103);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = i < 23 ? 1 : -1;
  const auto fold = stratified_folds(y, 5, 4);
  std::array<int, 5> pos{};
  std::array<int, 5> all{};
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    ++all[fold[static_cast<std::size_t>(i)]];
    if (y(i) > 0) ++pos[fold[static_cast<std::size_t>(i)]];
  }
  for (int f = 0; f < 5; ++f) {
    EXPECT_GE(pos[f], 4);
    EXPECT_LE(pos[f], 5);
    EXPECT_GE(all[f], 20);
    EXPECT_LE(all[f], 21);
  }
  EXPECT_THROW(stratified_folds(y, 0, 1), Error);
}

TEST(Grid, TiesPreferSmallerCThenSigma) {
  // Well separated data: every cell is perfect, so the tie-break decides.
  const Dataset d = blobs(90, 12, 2);
  const std::vector<double> sigmas{2, 1};
  const std::vector<double> cs{30, 10};
  const GridResult g = cross_validate_grid(d, sigmas, cs, 3, 7);
  EXPECT_EQ(g.cells.size(), 4u);
  for (const auto& cell : g.cells) EXPECT_DOUBLE_EQ(cell.mean_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(g.c, 10);
  EXPECT_DOUBLE_EQ(g.sigma, 1);
}

TEST(Grid, PicksTheBestMeanAccuracy) {
  const Dataset d = blobs(150, 1.5, 3);
  const std::vector<double> sigmas{0.05, 2};
  const std::vector<double> cs{1};
  const GridResult g = cross_validate_grid(d, sigmas, cs, 5, 7);
  const auto best = std::max_element(g.cells.begin(), g.cells.end(), [](auto& a, auto& b) {
    return a.mean_accuracy < b.mean_accuracy;
  });
  EXPECT_DOUBLE_EQ(g.sigma, best->sigma);
  for (const auto& cell : g.cells) EXPECT_EQ(cell.fold_accuracy.size(), 5u);
}

TEST(Grid, InputErrors) {
  const Dataset d = blobs(20, 3, 1);
  const std::vector<double> one{1};
  EXPECT_THROW(cross_validate_grid(d, {}, one, 2, 1), Error);
  EXPECT_THROW(cross_validate_grid(d, one, one, 5, 1), Error);
}

TEST(Encoder, PosteriorLayoutFollowsMask) {
  const Condition c;
  const auto rows = gen_features(default_generative_spec(), c, 60, 180, 3);
  const auto features = published_feature_selection();
  const auto bayes = build_bayes_model(rows, c, features);
  const Encoder all(bayes, FeatureMask::kAll);
  EXPECT_EQ(all.dim(), 2 * static_cast<Eigen::Index>(features.size()));
  EXPECT_EQ(all.encode(rows[0]), posterior_vector(bayes, rows[0]));

  const Encoder no_sac(bayes, FeatureMask::kNoSaccade);
  std::size_t kept = 0;
  for (Feature f : features) kept += mask_keeps(FeatureMask::kNoSaccade, f);
  EXPECT_EQ(no_sac.dim(), 2 * static_cast<Eigen::Index>(kept));

  const Encoder raw(bayes, FeatureMask::kObservationData);
  EXPECT_EQ(raw.dim(), static_cast<Eigen::Index>(features.size()));
  const Eigen::VectorXd v = raw.encode(rows[1]);
  for (std::size_t i = 0; i < features.size(); ++i) {
    EXPECT_EQ(v(static_cast<Eigen::Index>(i)), *rows[1][features[i]]);
  }
  ObservationVector missing = rows[1];
  missing[features[0]].reset();
  EXPECT_TRUE(std::isnan(raw.encode(missing)(0)));
}

TEST(Encoder, EmptyMaskIsRejected) {
  const Condition c;
  const auto rows = gen_features(default_generative_spec(), c, 30, 90, 3);
  const std::vector<Feature> only_sac{Feature::kSacVelocityHead};
  const auto bayes = build_bayes_model(rows, c, only_sac);
  EXPECT_THROW(Encoder(bayes, FeatureMask::kNoSaccade), Error);
}

TEST(Training, LabelsRequireLabeledRows) {
  std::vector<ObservationVector> rows(3);
  rows[0].label = Label::kTrue;
  rows[1].label = Label::kFalse;
  rows[2].label = Label::kUnlabeled;
  EXPECT_THROW(labels_of(rows), Error);
  rows.pop_back();
  EXPECT_EQ(labels_of(rows), Eigen::Vector2d(1, -1));
}

TEST(Training, EndToEndOnSyntheticFeatures) {
  const Condition c;
  const auto rows = gen_features(default_generative_spec(), c, 250, 750, 41);
  std::vector<bool> is_true(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) is_true[i] = rows[i].label == Label::kTrue;
  const auto split = sample_and_split(is_true, 5);
  auto gather = [&](const std::vector<std::size_t>& idx) {
    std::vector<ObservationVector> out;
    for (std::size_t i : idx) out.push_back(rows[i]);
    return out;
  };
  const auto train = gather(split.train);
  const auto test = gather(split.test);
  const auto features = published_feature_selection();
  const IntentModel m = train_intent_model(train, {}, c, features, FeatureMask::kAll, {}, 5);
  const Metrics met = evaluate(m, test);
  EXPECT_GT(met.accuracy, 0.8);
  ASSERT_TRUE(met.auc.has_value());
  EXPECT_GT(*met.auc, 0.85);
  EXPECT_EQ(met.counts.total(), test.size());
  EXPECT_GT(met.latency.mean_us, 0);
  for (const auto& r : test) {
    EXPECT_EQ(classify(m, r).decision_value,
              predict(m.svm, Encoder(m.bayes, m.mask).encode(r)).decision_value);
  }
  EXPECT_THROW(evaluate(m, {}), Error);
}

TEST(Training, AblationCoversEveryMaskOnOneSplit) {
  const Condition c = all_conditions()[4];
  const auto rows = gen_features(default_generative_spec(), c, 120, 360, 77);
  const auto features = published_feature_selection();
  TrainOptions opt;
  const auto table = ablation_run(rows, c, features, all_masks(), opt, 3);
  ASSERT_EQ(table.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(table[i].mask, all_masks()[i]);
    EXPECT_EQ(table[i].metrics.counts.total(), table[0].metrics.counts.total());
    EXPECT_GT(table[i].support_vectors, 0u);
  }
  auto wrong = rows;
  wrong[0].condition = all_conditions()[0];
  EXPECT_THROW(ablation_run(wrong, c, features, all_masks(), opt, 3), Error);
}
