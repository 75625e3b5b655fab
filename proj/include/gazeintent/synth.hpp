#pragma once

// Deterministic synthetic data: feature tables from class-conditional
// densities and scripted raw gaze streams with ground truth.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeintent/bayes_model.hpp"
#include "gazeintent/event_detector.hpp"

namespace gazeintent {

struct ClassDensities {
  FittedDistribution true_density;
  FittedDistribution false_density;

  friend bool operator==(const ClassDensities&, const ClassDensities&) = default;
};

struct Units {
  std::string duration = "ms";
  std::string angle = "deg";
  std::string velocity = "deg/ms";

  friend bool operator==(const Units&, const Units&) = default;
};

/// Per condition and feature, the generating density of each class.
struct GenerativeSpec {
  std::array<std::array<ClassDensities, kFeatureCount>, 8> cells{};
  /// False rows per True row.
  double class_imbalance = 3.0;
  CoeffKNorm coeffk_norm;
  Units units;

  ClassDensities& at(const Condition& c, Feature f) { return cells[index_of(c)][index_of(f)]; }
  const ClassDensities& at(const Condition& c, Feature f) const {
    return cells[index_of(c)][index_of(f)];
  }
  /// Throws kSpec on an invalid density.
  void validate() const;
  friend bool operator==(const GenerativeSpec&, const GenerativeSpec&) = default;
};

/// Reference per-condition density tables; untabled
/// features are uniform on [0, 1] for both classes.
GenerativeSpec default_generative_spec();

/// The reference 12-feature selection, in canonical order.
std::vector<Feature> published_feature_selection();

/// True if the default spec has a fitted (non-uniform) density for f in some condition.
bool has_fitted_table(Feature f);

/// n_true True rows followed by n_false False rows, every feature drawn
/// independently from its class density.
LabeledFeatureTable gen_features(const GenerativeSpec& spec, const Condition& condition,
                                 std::size_t n_true, std::size_t n_false, std::uint64_t seed);

/// A Bayes model whose densities are the generating densities themselves.
/// Each fallback range spans the 0.1% to 99.9% quantiles of both classes.
BayesianModel spec_model(const GenerativeSpec& spec, const Condition& condition,
                         std::span<const Feature> features);

/// Monte Carlo accuracy of the exact likelihood-ratio rule with prior
/// P(True) = 1 / (1 + class_imbalance), over all 16 features.
double bayes_optimal_rate(const GenerativeSpec& spec, const Condition& condition, std::size_t n_mc,
                          std::uint64_t seed);

/// Independent estimate of the same quantity: class-stratified draws scored
/// by E[max(posterior, 1 - posterior)].
double bayes_optimal_rate_smoothed(const GenerativeSpec& spec, const Condition& condition,
                                   std::size_t n_mc, std::uint64_t seed);

// Signal level.

struct ScenarioConfig {
  Condition condition;
  double sample_rate_hz = 60.0;
  double saccade_speed_deg_s = 300.0;
  /// Share of each gaze shift carried by the head.
  double head_ratio = 0.3;
  /// Truncated-Gaussian fixation jitter (deg), separately for select fixations.
  double jitter_sd_deg = 0.05;
  double select_jitter_sd_deg = 0.02;
  double jitter_max_deg = 0.08;
  /// Selection frame position within a select fixation, as a fraction of its length.
  double select_fraction = 0.5;

  double spacing_deg() const { return condition.density == Density::kDense ? 7.5 : 15.0; }
  double width_deg() const { return condition.width == Width::kSmall ? 3.0 : 6.0; }
  /// Throws kConfiguration outside 60-66 Hz or for non-positive parameters.
  void validate() const;
};

inline constexpr int kGridColumns = 9;
inline constexpr int kGridRows = 7;

struct SceneObject {
  int id = 0;
  int column = 0;  // -4 .. 4
  int row = 0;     // -3 .. 3
  AngularPoint position;
  bool target_slot = false;
};

/// All 63 grid objects; target slots are the 26 ring positions around the centre.
std::vector<SceneObject> scene_objects(const ScenarioConfig& scenario);
std::vector<int> target_slot_ids(const ScenarioConfig& scenario);

struct ScheduleEntry {
  int object = 0;
  double duration_ms = 300;
  bool select = false;
};

struct ScriptedEvent {
  EventKind kind = EventKind::kFixation;
  double start_ms = 0;
  double end_ms = 0;
  int object = -1;  // fixations only
};

struct Trial {
  int start_object = -1;
  int target_object = 0;
  double start_ms = 0;
  double end_ms = 0;
  double selection_ms = 0;
};

struct GroundTruth {
  Condition condition;
  double hit_radius_deg = 0;
  std::vector<SceneObject> objects;
  std::vector<ScriptedEvent> events;
  std::vector<Trial> trials;
};

struct SyntheticStream {
  std::vector<GazeSample> samples;
  GroundTruth truth;
};

/// Fixations hold a target with truncated-Gaussian jitter; saccades move at
/// the configured speed along the great circle. Throws kSchedule for fixations
/// shorter than 50 ms, unknown objects or an empty schedule.
SyntheticStream gen_stream(const ScenarioConfig& scenario, std::span<const ScheduleEntry> schedule,
                           std::uint64_t seed);

/// Random selection task. Each trial is a start fixation on the centre,
/// `distractors` non-select fixations on other random objects, then a select
/// fixation on a random target slot. Durations are uniform on [250, 700] ms.
std::vector<ScheduleEntry> random_task_schedule(const ScenarioConfig& scenario, std::size_t trials,
                                                std::uint64_t seed, std::size_t distractors = 0);

/// Fraction of scripted events matched by a detected event of the same kind
/// whose start and end are within tolerance_ms.
double event_recovery(std::span<const ScriptedEvent> scripted, std::span<const GazeEvent> detected,
                      double tolerance_ms);

}  // namespace gazeintent
