#pragma once

// Replay harness: selection policies scored against scripted ground truth.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gazeintent/engine.hpp"
#include "gazeintent/metrics.hpp"
#include "gazeintent/synth.hpp"

namespace gazeintent {

enum class Policy { kModel, kDwell, kOracle };

std::string_view to_string(Policy p);
/// "model", "dwell", "oracle"; throws kFormat otherwise.
Policy parse_policy(std::string_view name);

inline constexpr double kDwellThresholdMs = 600;

struct Click {
  double t_ms = 0;
  int object = -1;  // -1: pointing at nothing
  int trial = -1;   // -1: outside every trial
  bool correct = false;
};

struct PolicyReport {
  Policy policy = Policy::kOracle;
  std::vector<Click> clicks;
  std::size_t selections = 0;
  std::size_t correct_selections = 0;
  /// Unsuccessful clicks over all clicks; absent without clicks.
  std::optional<double> error_rate;
  /// First correct click minus trial start, per trial; absent when missed.
  std::vector<std::optional<double>> time_to_selection_ms;
  /// Model policy only: latency over every decision.
  LatencySummary latency;
};

struct ReplayReport {
  std::vector<PolicyReport> policies;
  const PolicyReport* find(Policy p) const;
};

/// Nearest object whose centre lies within the hit radius of the gaze ray, or -1.
int pointed_object(const AngularPoint& gaze, const GroundTruth& truth);

/// Selection times of the dwell policy: a run is one fixation held on one
/// object, and fires once when it has lasted threshold_ms. A run starts at the
/// fixation start, or at the frame where pointing moved to the object.
std::vector<Click> dwell_policy(std::span<const GazeSample> stream, const GroundTruth& truth,
                                double threshold_ms = kDwellThresholdMs, const DetectorConfig& detector = {});

std::vector<Click> oracle_policy(std::span<const GazeSample> stream, const GroundTruth& truth);

/// Select decisions of the engine become clicks. Latencies of every decision
/// are appended to latencies_us when given.
std::vector<Click> model_policy(std::span<const GazeSample> stream, const GroundTruth& truth,
                                const IntentModel& model, const EngineConfig& cfg = {},
                                std::vector<double>* latencies_us = nullptr);

/// Fills trial and correct on each click.
void score_clicks(std::span<Click> clicks, const GroundTruth& truth);

/// Throws kMissingGroundTruth without objects or trials, kConfiguration when
/// the model policy is requested without a model.
ReplayReport replay_eval(std::span<const GazeSample> stream, const GroundTruth& truth,
                         std::span<const Policy> policies, const IntentModel* model = nullptr,
                         const EngineConfig& cfg = {});

/// Stress script for dwell: a 650 ms distractor fixation then a 550 ms select
/// fixation on the target, per trial. Dwell clicks every distractor and never
/// a target.
std::vector<ScheduleEntry> dwell_stress_schedule(const ScenarioConfig& scenario, std::size_t trials,
                                                 std::uint64_t seed);

}  // namespace gazeintent
