#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gazeintent/event_detector.hpp"
#include "gazeintent/random.hpp"
#include "gazeintent/synth.hpp"

using namespace gazeintent;

namespace {

constexpr double kDt = 1000.0 / 60.0;

GazeSample at(double t_ms, double az, double el, bool select = false) {
  GazeSample s;
  s.t_ms = t_ms;
  s.eye_q = from_angles(az, el);
  s.selection_flag = select;
  return s;
}

std::vector<GazeEvent> fold(std::span<const GazeSample> stream, const DetectorConfig& cfg = {}) {
  IvdtDetector d(cfg);
  std::vector<GazeEvent> out;
  for (const auto& s : stream) {
    for (auto& e : d.step(s).completed) out.push_back(std::move(e));
  }
  for (auto& e : d.flush()) out.push_back(std::move(e));
  return out;
}

// Stable on a, three fast frames, stable on b.
std::vector<GazeSample> fix_sac_fix(double a_az, double b_az, int hold_frames) {
  std::vector<GazeSample> s;
  int k = 0;
  for (int i = 0; i < hold_frames; ++i) s.push_back(at(k++ * kDt, a_az, 0));
  for (int i = 1; i <= 3; ++i) s.push_back(at(k++ * kDt, a_az + (b_az - a_az) * i / 4.0, 0));
  for (int i = 0; i < hold_frames; ++i) s.push_back(at(k++ * kDt, b_az, 0));
  return s;
}

std::vector<GazeSample> jittered_stream(std::uint64_t seed, int frames) {
  Rng rng(seed);
  std::vector<GazeSample> s;
  double az = 0;
  double el = 0;
  for (int k = 0; k < frames; ++k) {
    const double u = rng.uniform();
    if (u < 0.04) {
      az += rng.uniform(-8, 8);
      el += rng.uniform(-4, 4);
    } else if (u < 0.07) {
      az += rng.uniform(-0.8, 0.8);
    } else {
      az += rng.normal(0, 0.05);
      el += rng.normal(0, 0.05);
    }
    s.push_back(at(k * kDt, az, el));
  }
  return s;
}

}  // namespace

TEST(Detector, ConstantDirectionIsOneFixation) {
  std::vector<GazeSample> s;
  for (int k = 0; k * kDt <= 200.0 + 1e-9; ++k) s.push_back(at(k * kDt, 5, 2));
  const auto events = segment(s);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, EventKind::kFixation);
  EXPECT_NEAR(events[0].duration_ms(), 200, kDt);
}

TEST(Detector, FixationSaccadeFixation) {
  // 10 degrees over 4 frames is 150 deg/s per frame.
  const auto events = segment(fix_sac_fix(0, 10, 12));
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0].kind, EventKind::kFixation);
  EXPECT_EQ(events[1].kind, EventKind::kSaccade);
  EXPECT_EQ(events[2].kind, EventKind::kFixation);
  EXPECT_EQ(events[1].frames.size(), 4u);
  ASSERT_TRUE(events[1].lead_in.has_value());
  EXPECT_NEAR(events[1].lead_in->gaze.azimuth_deg, 0, 1e-9);
  EXPECT_DOUBLE_EQ(events[0].end_ms, events[1].start_ms);
  EXPECT_DOUBLE_EQ(events[1].end_ms, events[2].start_ms);
}

TEST(Detector, RecoversScriptedEventsWithinOneFrame) {
  ScenarioConfig sc;
  const std::vector<ScheduleEntry> schedule{{31, 300, false}, {33, 250, false}, {15, 400, true},
                                            {47, 200, false}, {31, 350, false}};
  const auto stream = gen_stream(sc, schedule, 3);
  ASSERT_EQ(stream.truth.events.size(), 9u);
  const auto events = segment(stream.samples);
  EXPECT_EQ(events.size(), 9u);
  EXPECT_EQ(event_recovery(stream.truth.events, events, kDt + 1e-6), 1.0);
}

TEST(Detector, SingleSampleYieldsNothing) {
  const std::vector<GazeSample> s{at(0, 0, 0)};
  EXPECT_TRUE(segment(s).empty());
}

TEST(Detector, EmptyStreamIsAnError) {
  try {
    segment(std::span<const GazeSample>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyStream);
  }
}

TEST(Detector, OutOfOrderTimestampIsAnError) {
  IvdtDetector d;
  d.step(at(10, 0, 0));
  try {
    d.step(at(10, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStreamOrder);
  }
  EXPECT_THROW(d.step(at(5, 0, 0)), Error);
}

TEST(Detector, ConfigValidation) {
  DetectorConfig bad;
  bad.saccade_velocity_thresh = 20;
  EXPECT_THROW(IvdtDetector{bad}, Error);
  bad = {};
  bad.fixation_dispersion_thresh = 0;
  EXPECT_THROW(bad.validate(), Error);
  EXPECT_NO_THROW(DetectorConfig{}.validate());
}

TEST(Detector, ShortCandidatesAreDiscarded) {
  // Two frames at rest (16.7 ms) between saccades never become a fixation.
  std::vector<GazeSample> s;
  int k = 0;
  for (int i = 0; i < 10; ++i) s.push_back(at(k++ * kDt, 0, 0));
  s.push_back(at(k++ * kDt, 5, 0));
  s.push_back(at(k++ * kDt, 10, 0));
  s.push_back(at(k++ * kDt, 10, 0));
  s.push_back(at(k++ * kDt, 15, 0));
  s.push_back(at(k++ * kDt, 20, 0));
  for (int i = 0; i < 10; ++i) s.push_back(at(k++ * kDt, 20, 0));
  const auto events = segment(s);
  for (const auto& e : events) {
    if (e.kind == EventKind::kFixation) {
      EXPECT_GE(e.duration_ms(), 30.0);
    }
  }
  int fixations = 0;
  for (const auto& e : events) fixations += e.kind == EventKind::kFixation;
  EXPECT_EQ(fixations, 2);
}

TEST(Detector, IntermediateVelocityClosesFixationWithoutStartingSaccade) {
  std::vector<GazeSample> s;
  int k = 0;
  for (int i = 0; i < 10; ++i) s.push_back(at(k++ * kDt, 0, 0));
  // 0.8 deg per frame = 48 deg/s.
  s.push_back(at(k++ * kDt, 0.8, 0));
  for (int i = 0; i < 10; ++i) s.push_back(at(k++ * kDt, 0.8, 0));
  const auto events = segment(s);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].kind, EventKind::kFixation);
  EXPECT_EQ(events[1].kind, EventKind::kFixation);
  EXPECT_DOUBLE_EQ(events[1].start_ms, 10 * kDt);
}

TEST(Detector, IntermediateVelocityExtendsOpenSaccadeWhenConfigured) {
  std::vector<GazeSample> s;
  int k = 0;
  for (int i = 0; i < 6; ++i) s.push_back(at(k++ * kDt, 0, 0));
  s.push_back(at(k++ * kDt, 3, 0));    // 180 deg/s
  s.push_back(at(k++ * kDt, 3.8, 0));  // 48 deg/s
  for (int i = 0; i < 6; ++i) s.push_back(at(k++ * kDt, 3.8, 0));
  const auto on = segment(s);
  ASSERT_EQ(on.size(), 3u);
  EXPECT_EQ(on[1].frames.size(), 2u);
  DetectorConfig cfg;
  cfg.pursuit_extends_saccade = false;
  const auto off = segment(s, cfg);
  ASSERT_EQ(off.size(), 3u);
  EXPECT_EQ(off[1].frames.size(), 1u);
}

TEST(Detector, FixationDetectedFiresOnceAtMinimumDuration) {
  IvdtDetector d;
  int fired = 0;
  for (int k = 0; k < 20; ++k) {
    const auto r = d.step(at(k * kDt, 1, 1));
    const bool long_enough = k * kDt >= 30.0;
    EXPECT_EQ(d.open_fixation() != nullptr, long_enough) << k;
    if (r.fixation_detected) {
      ++fired;
      EXPECT_EQ(k, 2);
    }
  }
  EXPECT_EQ(fired, 1);
}

TEST(Detector, StreamingEqualsBatchOnJitteredStreams) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = jittered_stream(seed, 600);
    EXPECT_EQ(segment(s), fold(s)) << seed;
    EXPECT_EQ(segment(s), segment(s)) << seed;
  }
}

TEST(Detector, EmittedEventsRespectInvariants) {
  const DetectorConfig cfg;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto events = segment(jittered_stream(seed, 800), cfg);
    for (std::size_t i = 0; i < events.size(); ++i) {
      const GazeEvent& e = events[i];
      EXPECT_GT(e.duration_ms(), 0);
      if (i + 1 < events.size()) {
        EXPECT_LE(e.end_ms, events[i + 1].start_ms);
      }
      if (e.kind != EventKind::kFixation) continue;
      EXPECT_GE(e.duration_ms(), cfg.fixation_min_duration_ms);
      std::vector<AngularPoint> pts;
      for (const auto& f : e.frames) pts.push_back(f.gaze);
      EXPECT_LT(dispersion<double>(pts), cfg.fixation_dispersion_thresh);
    }
  }
}

TEST(Detector, FlushAllowsContinuation) {
  IvdtDetector d;
  for (int k = 0; k < 5; ++k) d.step(at(k * kDt, 0, 0));
  const auto first = d.flush();
  ASSERT_EQ(first.size(), 1u);
  EXPECT_EQ(d.open_fixation(), nullptr);
  for (int k = 5; k < 10; ++k) d.step(at(k * kDt, 0, 0));
  const auto second = d.flush();
  ASSERT_EQ(second.size(), 1u);
  EXPECT_DOUBLE_EQ(second[0].start_ms, 4 * kDt);
}

TEST(Detector, MakeFrameRejectsBadSamples) {
  GazeSample s = at(0, 0, 0);
  s.head_q = UnitQuaternion<double>(2, 0, 0, 0);
  EXPECT_THROW(make_frame(s), Error);
  s = at(std::nan(""), 0, 0);
  EXPECT_THROW(make_frame(s), Error);
}

TEST(Detector, GazeComposesHeadAndEye) {
  GazeSample s;
  s.head_q = from_angles(20.0, 0.0);
  s.eye_q = from_angles(-5.0, 0.0);
  const Frame f = make_frame(s);
  EXPECT_NEAR(f.head.azimuth_deg, 20, 1e-9);
  EXPECT_NEAR(f.eye.azimuth_deg, -5, 1e-9);
  EXPECT_NEAR(f.gaze.azimuth_deg, 15, 1e-9);
}
