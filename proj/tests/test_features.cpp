#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gazeintent/features.hpp"
#include "gazeintent/synth.hpp"

using namespace gazeintent;

namespace {

constexpr double kDt = 1000.0 / 60.0;

Frame frame(double t, double az, double el, bool select = false) {
  Frame f;
  f.t_ms = t;
  f.gaze = {az, el, Source::kGaze};
  f.eye = {0.7 * az, 0.7 * el, Source::kEye};
  f.head = {0.3 * az, 0.3 * el, Source::kHead};
  f.selection_flag = select;
  return f;
}

// Fixation on (az, el) from t0 for n frames; frame i sits at t0 + (i+1) dt.
GazeEvent fixation(double t0, int n, double az, double el = 0) {
  GazeEvent e;
  e.kind = EventKind::kFixation;
  e.start_ms = t0;
  for (int i = 0; i < n; ++i) e.frames.push_back(frame(t0 + (i + 1) * kDt, az, el));
  e.end_ms = e.frames.back().t_ms;
  return e;
}

GazeEvent saccade(const GazeEvent& from, int n, double to_az) {
  GazeEvent e;
  e.kind = EventKind::kSaccade;
  e.lead_in = from.frames.back();
  e.start_ms = from.end_ms;
  const double a = from.frames.back().gaze.azimuth_deg;
  for (int i = 1; i <= n; ++i) e.frames.push_back(frame(e.start_ms + i * kDt, a + (to_az - a) * i / n, 0));
  e.end_ms = e.frames.back().t_ms;
  return e;
}

// F S F S ... F with `pairs` saccades; fixation i lasts (6 + i) frames.
std::vector<GazeEvent> chain(int pairs) {
  std::vector<GazeEvent> ev;
  ev.push_back(fixation(0, 6, 0));
  for (int i = 0; i < pairs; ++i) {
    ev.push_back(saccade(ev.back(), 3, 4.0 * (i + 1)));
    ev.push_back(fixation(ev.back().end_ms, 7 + i, 4.0 * (i + 1)));
  }
  return ev;
}

}  // namespace

TEST(Features, NamesRoundTripAndGroups) {
  ASSERT_EQ(all_features().size(), kFeatureCount);
  for (Feature f : all_features()) {
    EXPECT_EQ(feature_from_name(feature_name(f)), f);
  }
  EXPECT_FALSE(feature_from_name("nope").has_value());
  EXPECT_EQ(group_of(Feature::kFix1StdY), FeatureGroup::kFirstFixation);
  EXPECT_EQ(group_of(Feature::kFix2Duration), FeatureGroup::kSecondFixation);
  EXPECT_EQ(group_of(Feature::kSacVelocityGaze), FeatureGroup::kSaccade);
  EXPECT_EQ(group_of(Feature::kCoefficientK), FeatureGroup::kCoefficientK);
}

TEST(Features, ConditionsRoundTrip) {
  ASSERT_EQ(all_conditions().size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    const Condition& c = all_conditions()[i];
    EXPECT_EQ(index_of(c), i);
    EXPECT_EQ(parse_condition(to_string(c)), c);
  }
  EXPECT_EQ(to_string(all_conditions()[0]), "simple-large-dense");
  EXPECT_THROW(parse_condition("simple-huge-dense"), Error);
}

TEST(Features, CoefficientKMatchesHandComputation) {
  const CoeffKNorm norm;
  const std::vector<double> d{350, 150};
  const std::vector<double> a{2, 11};
  // ((1 - (-1)) + (-1 - 2)) / 2
  EXPECT_DOUBLE_EQ(*coefficient_k(d, a, norm), -0.5);
  EXPECT_FALSE(coefficient_k({}, {}, norm).has_value());
  EXPECT_THROW(coefficient_k(d, std::vector<double>{1}, norm), Error);
  CoeffKNorm bad;
  bad.sigma_a = 0;
  EXPECT_THROW(coefficient_k(d, a, bad), Error);
}

TEST(Features, CoefficientKIsPermutationInvariant) {
  const CoeffKNorm norm;
  const std::vector<double> d{100, 420, 260};
  const std::vector<double> a{3, 9, 1.5};
  const std::vector<double> dp{260, 100, 420};
  const std::vector<double> ap{1.5, 3, 9};
  EXPECT_NEAR(*coefficient_k(d, a, norm), *coefficient_k(dp, ap, norm), 1e-12);
}

TEST(Features, FixationStatsOracle) {
  GazeEvent e;
  e.start_ms = 0;
  e.frames = {frame(10, 1, 0), frame(20, 3, 2), frame(30, 1, 2), frame(40, 3, 0)};
  e.end_ms = 40;
  const auto s = fixation_stats(e);
  EXPECT_DOUBLE_EQ(s.duration_ms, 40);
  EXPECT_NEAR(s.std_x, 1.0, 1e-12);
  EXPECT_NEAR(s.std_y, 1.0, 1e-12);
  const double v = (angular_distance(e.frames[0].gaze, e.frames[1].gaze) +
                    angular_distance(e.frames[1].gaze, e.frames[2].gaze) +
                    angular_distance(e.frames[2].gaze, e.frames[3].gaze)) /
                   3.0 / 10.0;  // deg per ms
  EXPECT_NEAR(s.mean_velocity, v, 1e-12);
  EXPECT_THROW(fixation_stats(GazeEvent{}), Error);
}

TEST(Features, SaccadeStatsUseLaunchPoint) {
  const GazeEvent f = fixation(0, 6, 0);
  const GazeEvent s = saccade(f, 4, 8);
  const auto st = saccade_stats(s);
  EXPECT_NEAR(st.duration_ms, 4 * kDt, 1e-9);
  EXPECT_NEAR(st.amplitude_of(Source::kGaze), 8, 1e-9);
  EXPECT_NEAR(st.amplitude_of(Source::kEye), 5.6, 1e-9);
  EXPECT_NEAR(st.amplitude_of(Source::kHead), 2.4, 1e-9);
  EXPECT_NEAR(st.velocity_of(Source::kGaze), 2.0 / kDt, 1e-9);
}

TEST(Features, WindowPopulatesAllGroups) {
  const auto ev = chain(3);
  const auto obs = extract_window(ev, Trigger::kFixationEnded, all_conditions()[2]);
  EXPECT_EQ(obs.label, Label::kFalse);
  EXPECT_EQ(obs.condition, all_conditions()[2]);
  for (Feature f : all_features()) EXPECT_TRUE(obs[f].has_value()) << feature_name(f);
  EXPECT_NEAR(*obs[Feature::kFix2Duration], 9 * kDt, 1e-9);
  EXPECT_NEAR(*obs[Feature::kFix1Duration], 8 * kDt, 1e-9);
  EXPECT_NEAR(*obs[Feature::kSacAmplitudeGaze], 4, 1e-9);
  EXPECT_DOUBLE_EQ(*obs[Feature::kFix2StdX], 0);
}

TEST(Features, CoefficientKUsesMostRecentPairs) {
  const auto ev = chain(5);
  const auto obs = extract_window(ev, Trigger::kFixationDetected, Condition{});
  EXPECT_EQ(obs.label, Label::kUnlabeled);
  // Fixations 2, 3, 4 (lasting 8, 9, 10 frames) each followed by a 4 deg saccade.
  const std::vector<double> d{10 * kDt, 9 * kDt, 8 * kDt};
  const std::vector<double> a{4, 4, 4};
  EXPECT_NEAR(*obs[Feature::kCoefficientK], *coefficient_k(d, a, CoeffKNorm{}), 1e-12);

  WindowOptions one;
  one.k_pairs = 1;
  const auto o1 = extract_window(ev, Trigger::kFixationDetected, Condition{}, one);
  EXPECT_NEAR(*o1[Feature::kCoefficientK], (10 * kDt - 250) / 100 - (4 - 5) / 3.0, 1e-12);
}

TEST(Features, MissingContextLeavesFeaturesEmpty) {
  const std::vector<GazeEvent> lone{fixation(0, 5, 0)};
  const auto obs = extract_window(lone, Trigger::kFixationDetected, Condition{});
  EXPECT_TRUE(obs[Feature::kFix2Duration].has_value());
  EXPECT_FALSE(obs[Feature::kFix1Duration].has_value());
  EXPECT_FALSE(obs[Feature::kSacDuration].has_value());
  EXPECT_FALSE(obs[Feature::kCoefficientK].has_value());

  // Back-to-back fixations: no saccade, no K pair.
  const std::vector<GazeEvent> two{fixation(0, 5, 0), fixation(5 * kDt, 5, 0.8)};
  const auto o2 = extract_window(two, Trigger::kFixationDetected, Condition{});
  EXPECT_TRUE(o2[Feature::kFix1Duration].has_value());
  EXPECT_FALSE(o2[Feature::kSacAmplitudeGaze].has_value());
  EXPECT_FALSE(o2[Feature::kCoefficientK].has_value());
}

TEST(Features, WindowNeedsCurrentFixation) {
  auto ev = chain(1);
  ev.pop_back();
  EXPECT_THROW(extract_window(ev, Trigger::kFixationEnded, Condition{}), Error);
  EXPECT_THROW(extract_window(std::span<const GazeEvent>{}, Trigger::kFixationEnded, Condition{}),
               Error);
}

TEST(Features, LabeledWindowsTruncateAtSelection) {
  auto ev = chain(2);
  ev.back().frames[4].selection_flag = true;
  const auto rows = labeled_windows(ev, Condition{});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].label, Label::kFalse);
  EXPECT_EQ(rows[1].label, Label::kFalse);
  EXPECT_EQ(rows[2].label, Label::kTrue);
  EXPECT_NEAR(*rows[2][Feature::kFix2Duration], 5 * kDt, 1e-9);
  EXPECT_NEAR(*rows[1][Feature::kFix2Duration], 7 * kDt, 1e-9);
}

TEST(Features, LabeledWindowsIgnoreDistantHistory) {
  // A window depends only on the last 2 k + 2 events before its fixation.
  const auto ev = chain(8);
  const auto rows = labeled_windows(ev, Condition{});
  const std::span<const GazeEvent> all(ev);
  const std::size_t last = ev.size() - 1;
  const auto tail = all.subspan(last - 8, 9);
  const auto obs = extract_window(tail, Trigger::kFixationEnded, Condition{});
  EXPECT_EQ(rows.back(), obs);
}

TEST(Features, WindowsFromScriptedStreamAreLabeledBySelection) {
  ScenarioConfig sc;
  const std::vector<ScheduleEntry> schedule{{31, 300, false}, {33, 400, true}, {22, 300, false},
                                            {40, 500, true}};
  const auto stream = gen_stream(sc, schedule, 9);
  const auto rows = labeled_windows(segment(stream.samples), sc.condition);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].label, Label::kFalse);
  EXPECT_EQ(rows[1].label, Label::kTrue);
  EXPECT_EQ(rows[2].label, Label::kFalse);
  EXPECT_EQ(rows[3].label, Label::kTrue);
  // The selection sits mid-fixation, so the True window is about half as long.
  EXPECT_NEAR(*rows[1][Feature::kFix2Duration], 200, 2 * kDt);
  EXPECT_NEAR(*rows[3][Feature::kFix2Duration], 250, 2 * kDt);
}
