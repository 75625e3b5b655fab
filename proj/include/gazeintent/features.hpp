#pragma once

// Decision-window features: previous fixation, intervening saccade, current
// fixation and Coefficient K.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazeintent/event_detector.hpp"

namespace gazeintent {

/// The 16 window features, in canonical (table) order.
enum class Feature {
  kFix1Duration,
  kFix1StdX,
  kFix1StdY,
  kFix1Velocity,
  kFix2Duration,
  kFix2StdX,
  kFix2StdY,
  kFix2Velocity,
  kSacDuration,
  kSacAmplitudeEye,
  kSacAmplitudeHead,
  kSacAmplitudeGaze,
  kSacVelocityEye,
  kSacVelocityHead,
  kSacVelocityGaze,
  kCoefficientK,
};

inline constexpr std::size_t kFeatureCount = 16;

std::span<const Feature> all_features();
std::size_t index_of(Feature f);
std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);

enum class FeatureGroup { kFirstFixation, kSecondFixation, kSaccade, kCoefficientK };
FeatureGroup group_of(Feature f);

enum class Task { kSimple, kComplex };
enum class Width { kLarge, kSmall };
enum class Density { kDense, kWide };

struct Condition {
  Task task = Task::kSimple;
  Width width = Width::kLarge;
  Density density = Density::kDense;

  friend bool operator==(const Condition&, const Condition&) = default;
};

/// The 8 conditions, ordered by task, then width, then density.
std::span<const Condition> all_conditions();
std::size_t index_of(const Condition& c);
/// "simple-large-dense" style.
std::string to_string(const Condition& c);
/// Throws kFormat on an unknown name.
Condition parse_condition(std::string_view name);

enum class Label { kTrue, kFalse, kUnlabeled };
std::string_view to_string(Label label);

struct ObservationVector {
  std::array<std::optional<double>, kFeatureCount> values{};
  Condition condition;
  Label label = Label::kUnlabeled;

  std::optional<double>& operator[](Feature f) { return values[index_of(f)]; }
  const std::optional<double>& operator[](Feature f) const { return values[index_of(f)]; }
  friend bool operator==(const ObservationVector&, const ObservationVector&) = default;
};

/// Coefficient K normalization constants: durations in ms, amplitudes in deg.
struct CoeffKNorm {
  double mu_d = 250.0;
  double sigma_d = 100.0;
  double mu_a = 5.0;
  double sigma_a = 3.0;

  /// Throws kConfiguration unless both sigmas are positive and finite.
  void validate() const;
  friend bool operator==(const CoeffKNorm&, const CoeffKNorm&) = default;
};

/// Velocities below are in deg/ms; std and amplitude in deg.
struct FixationStats {
  double duration_ms = 0;
  double std_x = 0;
  double std_y = 0;
  double mean_velocity = 0;
};

struct SaccadeStats {
  double duration_ms = 0;
  std::array<double, 3> amplitude{};  // indexed by Source
  std::array<double, 3> velocity{};

  double amplitude_of(Source s) const { return amplitude[static_cast<std::size_t>(s)]; }
  double velocity_of(Source s) const { return velocity[static_cast<std::size_t>(s)]; }
};

/// Population std of gaze azimuth/elevation; mean gaze speed between
/// consecutive frames of the event. Throws kEmptyWindow for an empty event.
FixationStats fixation_stats(const GazeEvent& fixation);

/// Per-source amplitude between the launch point and the last frame, and
/// mean per-frame speed over the same track.
SaccadeStats saccade_stats(const GazeEvent& saccade);

/// Mean over pairs of z(d_i) - z(a_i), where a_i is the amplitude of the
/// saccade following fixation i. Empty input gives no value. Throws
/// kDimensionMismatch when the lists differ in length.
std::optional<double> coefficient_k(std::span<const double> fix_durations_ms,
                                    std::span<const double> sac_amplitudes_deg,
                                    const CoeffKNorm& norm);

enum class Trigger { kFixationDetected, kFixationEnded, kSelectionConfirmed };

struct WindowOptions {
  CoeffKNorm norm;
  /// Most recent (fixation, following saccade) pairs used for Coefficient K.
  std::size_t k_pairs = 3;
};

/// Assembles the window whose current fixation is events.back(); earlier
/// events are the trailing context. Throws kNoWindow when the last event is
/// not a fixation.
ObservationVector extract_window(std::span<const GazeEvent> events, Trigger trigger,
                                 const Condition& condition, const WindowOptions& options = {});

/// Offline labeling: one window per fixation. A fixation containing a
/// selection frame yields a True window truncated at that frame; any other
/// fixation yields a False window over its full length.
std::vector<ObservationVector> labeled_windows(std::span<const GazeEvent> events,
                                               const Condition& condition,
                                               const WindowOptions& options = {});

}  // namespace gazeintent
