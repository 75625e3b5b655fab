#pragma once

// Real-time intent engine: samples in, select decisions out.

#include <optional>
#include <span>
#include <vector>

#include "gazeintent/training.hpp"

namespace gazeintent {

struct IntentDecision {
  double t_ms = 0;
  bool select = false;
  double decision_value = 0;
  double latency_us = 0;
  ObservationVector window;
};

struct EngineConfig {
  DetectorConfig detector;
  WindowOptions window;
};

/// One engine per stream. The model is borrowed and must outlive the engine;
/// several engines may share it.
class IntentEngine {
 public:
  /// Throws kConfiguration when the model was built for another condition.
  IntentEngine(const IntentModel& model, const Condition& condition, EngineConfig cfg = {});

  /// Evaluates the open fixation on every frame once it reaches the minimum
  /// duration, until it yields a Select; at most one Select per fixation.
  std::optional<IntentDecision> step(const GazeSample& sample);
  std::optional<IntentDecision> step(const Frame& frame);

  /// Closes the detector's open segment at end of stream.
  void finish();

  const IvdtDetector& detector() const { return detector_; }

 private:
  void remember(GazeEvent event);

  const IntentModel* model_;
  Condition condition_;
  EngineConfig cfg_;
  IvdtDetector detector_;
  Encoder encoder_;
  Eigen::VectorXd input_;
  std::vector<GazeEvent> context_;
  std::size_t history_limit_;
  std::optional<double> selected_fixation_start_;
};

/// Decisions recomputed offline from the fully segmented stream; equal to the
/// engine's output apart from latency.
std::vector<IntentDecision> batch_decisions(const IntentModel& model, std::span<const GazeSample> stream,
                                            const Condition& condition, const EngineConfig& cfg = {});

/// Runs the engine over a whole stream and returns every decision.
std::vector<IntentDecision> stream_decisions(const IntentModel& model, std::span<const GazeSample> stream,
                                             const Condition& condition, const EngineConfig& cfg = {});

}  // namespace gazeintent
