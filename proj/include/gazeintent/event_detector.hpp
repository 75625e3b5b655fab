#pragma once

// Streaming I-VDT segmentation of the gaze signal into fixations and saccades.

#include <optional>
#include <span>
#include <vector>

#include "gazeintent/geometry.hpp"

namespace gazeintent {

/// One tracker frame as recorded: eye-in-head and head-in-world orientations.
struct GazeSample {
  double t_ms = 0;
  UnitQuaternion<double> eye_q = UnitQuaternion<double>::Identity();
  UnitQuaternion<double> head_q = UnitQuaternion<double>::Identity();
  bool selection_flag = false;
};

/// A sample converted to angular coordinates for every source.
struct Frame {
  double t_ms = 0;
  AngularPoint eye{0, 0, Source::kEye};
  AngularPoint head{0, 0, Source::kHead};
  AngularPoint gaze{0, 0, Source::kGaze};
  bool selection_flag = false;

  const AngularPoint& point(Source source) const {
    return source == Source::kEye ? eye : (source == Source::kHead ? head : gaze);
  }
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Throws kInvalidSample for non-unit quaternions or a non-finite timestamp.
Frame make_frame(const GazeSample& sample);

enum class EventKind { kFixation, kSaccade };

/// A detected segment. Frame i covers (t_{i-1}, t_i], so an event spans from
/// the timestamp of the frame before its first frame to its last frame.
/// Saccades keep that preceding frame as lead_in so their tracks start at
/// the launch point.
struct GazeEvent {
  EventKind kind = EventKind::kFixation;
  double start_ms = 0;
  double end_ms = 0;
  std::vector<Frame> frames;
  std::optional<Frame> lead_in;

  double duration_ms() const { return end_ms - start_ms; }
  friend bool operator==(const GazeEvent&, const GazeEvent&) = default;
};

struct DetectorConfig {
  double saccade_velocity_thresh = 70.0;     // deg/s
  double fixation_velocity_thresh = 30.0;    // deg/s
  double fixation_dispersion_thresh = 1.0;   // deg
  double fixation_min_duration_ms = 30.0;
  /// Intermediate-velocity frames extend an open saccade; they always close
  /// an open fixation and never start a new segment.
  bool pursuit_extends_saccade = true;

  /// Throws kConfiguration unless all thresholds are positive and ordered.
  void validate() const;
};

struct StepResult {
  std::vector<GazeEvent> completed;
  /// True on the frame where the open fixation first reaches the minimum duration.
  bool fixation_detected = false;
};

class IvdtDetector {
 public:
  explicit IvdtDetector(DetectorConfig cfg = {});

  /// Throws kStreamOrder when timestamps do not strictly increase.
  StepResult step(const GazeSample& sample);
  StepResult step(const Frame& frame);

  /// Closes any open segment; the detector can then continue with later frames.
  std::vector<GazeEvent> flush();

  /// The candidate fixation, only once it has reached the minimum duration.
  const GazeEvent* open_fixation() const;

  const DetectorConfig& config() const { return cfg_; }
  /// Gaze speed of the last frame in deg/s (0 for the first frame of a stream).
  double last_velocity() const { return last_velocity_; }

 private:
  void close_fixation(std::vector<GazeEvent>& out);
  void close_saccade(std::vector<GazeEvent>& out);

  DetectorConfig cfg_;
  std::optional<Frame> prev_;
  std::optional<GazeEvent> fixation_;
  DispersionBounds<double> bounds_;
  bool fixation_announced_ = false;
  std::optional<GazeEvent> saccade_;
  double last_velocity_ = 0;
};

/// Folds the detector over the stream and flushes. Throws kEmptyStream.
std::vector<GazeEvent> segment(std::span<const GazeSample> stream, const DetectorConfig& cfg = {});
std::vector<GazeEvent> segment(std::span<const Frame> frames, const DetectorConfig& cfg = {});

}  // namespace gazeintent
