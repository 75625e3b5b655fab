#include "gazeintent/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gazeintent {
namespace {

constexpr std::array<Feature, kFeatureCount> kFeatures = {
    Feature::kFix1Duration,    Feature::kFix1StdX,         Feature::kFix1StdY,
    Feature::kFix1Velocity,    Feature::kFix2Duration,     Feature::kFix2StdX,
    Feature::kFix2StdY,        Feature::kFix2Velocity,     Feature::kSacDuration,
    Feature::kSacAmplitudeEye, Feature::kSacAmplitudeHead, Feature::kSacAmplitudeGaze,
    Feature::kSacVelocityEye,  Feature::kSacVelocityHead,  Feature::kSacVelocityGaze,
    Feature::kCoefficientK,
};

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "fix1_duration_ms",       "fix1_std_x_deg",         "fix1_std_y_deg",
    "fix1_velocity",          "fix2_duration_ms",       "fix2_std_x_deg",
    "fix2_std_y_deg",         "fix2_velocity",          "sac_duration_ms",
    "sac_amplitude_eye_deg",  "sac_amplitude_head_deg", "sac_amplitude_gaze_deg",
    "sac_velocity_eye",       "sac_velocity_head",      "sac_velocity_gaze",
    "coefficient_k",
};

constexpr std::array<Condition, 8> kConditions = {
    Condition{Task::kSimple, Width::kLarge, Density::kDense},
    Condition{Task::kSimple, Width::kLarge, Density::kWide},
    Condition{Task::kSimple, Width::kSmall, Density::kDense},
    Condition{Task::kSimple, Width::kSmall, Density::kWide},
    Condition{Task::kComplex, Width::kLarge, Density::kDense},
    Condition{Task::kComplex, Width::kLarge, Density::kWide},
    Condition{Task::kComplex, Width::kSmall, Density::kDense},
    Condition{Task::kComplex, Width::kSmall, Density::kWide},
};

constexpr double kMsPerSecond = 1000.0;

GazeEvent truncated(const GazeEvent& fixation, std::size_t last_frame) {
  GazeEvent e = fixation;
  e.frames.resize(last_frame + 1);
  e.end_ms = e.frames.back().t_ms;
  return e;
}

}  // namespace

std::span<const Feature> all_features() { return kFeatures; }

std::size_t index_of(Feature f) { return static_cast<std::size_t>(f); }

std::string_view feature_name(Feature f) { return kFeatureNames[index_of(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return kFeatures[i];
  }
  return std::nullopt;
}

FeatureGroup group_of(Feature f) {
  const std::size_t i = index_of(f);
  if (i < 4) return FeatureGroup::kFirstFixation;
  if (i < 8) return FeatureGroup::kSecondFixation;
  if (i < 15) return FeatureGroup::kSaccade;
  return FeatureGroup::kCoefficientK;
}

std::span<const Condition> all_conditions() { return kConditions; }

std::size_t index_of(const Condition& c) {
  return static_cast<std::size_t>(c.task) * 4 + static_cast<std::size_t>(c.width) * 2 +
         static_cast<std::size_t>(c.density);
}

std::string to_string(const Condition& c) {
  std::string s = c.task == Task::kSimple ? "simple" : "complex";
  s += c.width == Width::kLarge ? "-large" : "-small";
  s += c.density == Density::kDense ? "-dense" : "-wide";
  return s;
}

Condition parse_condition(std::string_view name) {
  for (const Condition& c : kConditions) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::kFormat, "unknown condition '" + std::string(name) + "'");
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kTrue: return "true";
    case Label::kFalse: return "false";
    case Label::kUnlabeled: break;
  }
  return "unlabeled";
}

void CoeffKNorm::validate() const {
  const bool ok = std::isfinite(mu_d) && std::isfinite(mu_a) && std::isfinite(sigma_d) &&
                  std::isfinite(sigma_a) && sigma_d > 0 && sigma_a > 0;
  if (!ok) throw Error(ErrorCode::kConfiguration, "coefficient K norm needs sigma_d, sigma_a > 0");
}

FixationStats fixation_stats(const GazeEvent& fixation) {
  if (fixation.frames.empty()) throw Error(ErrorCode::kEmptyWindow, "fixation without frames");
  const auto& frames = fixation.frames;
  const double n = static_cast<double>(frames.size());
  double mx = 0.0;
  double my = 0.0;
  for (const Frame& f : frames) {
    mx += f.gaze.azimuth_deg;
    my += f.gaze.elevation_deg;
  }
  mx /= n;
  my /= n;
  double vx = 0.0;
  double vy = 0.0;
  for (const Frame& f : frames) {
    vx += (f.gaze.azimuth_deg - mx) * (f.gaze.azimuth_deg - mx);
    vy += (f.gaze.elevation_deg - my) * (f.gaze.elevation_deg - my);
  }
  double speed = 0.0;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    speed += angular_velocity(frames[i - 1].gaze, frames[i].gaze, frames[i].t_ms - frames[i - 1].t_ms);
  }
  if (frames.size() > 1) speed /= static_cast<double>(frames.size() - 1);
  return {fixation.duration_ms(), std::sqrt(vx / n), std::sqrt(vy / n), speed / kMsPerSecond};
}

SaccadeStats saccade_stats(const GazeEvent& saccade) {
  if (saccade.frames.empty()) throw Error(ErrorCode::kEmptyWindow, "saccade without frames");
  std::vector<const Frame*> track;
  track.reserve(saccade.frames.size() + 1);
  if (saccade.lead_in) track.push_back(&*saccade.lead_in);
  for (const Frame& f : saccade.frames) track.push_back(&f);

  SaccadeStats s;
  s.duration_ms = saccade.duration_ms();
  for (Source src : {Source::kEye, Source::kHead, Source::kGaze}) {
    const auto k = static_cast<std::size_t>(src);
    s.amplitude[k] = angular_distance(track.front()->point(src), track.back()->point(src));
    double speed = 0.0;
    for (std::size_t i = 1; i < track.size(); ++i) {
      speed += angular_velocity(track[i - 1]->point(src), track[i]->point(src),
                                track[i]->t_ms - track[i - 1]->t_ms);
    }
    if (track.size() > 1) speed /= static_cast<double>(track.size() - 1);
    s.velocity[k] = speed / kMsPerSecond;
  }
  return s;
}

std::optional<double> coefficient_k(std::span<const double> fix_durations_ms,
                                    std::span<const double> sac_amplitudes_deg,
                                    const CoeffKNorm& norm) {
  norm.validate();
  if (fix_durations_ms.size() != sac_amplitudes_deg.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient K needs one saccade per fixation");
  }
  if (fix_durations_ms.empty()) return std::nullopt;
  double sum = 0.0;
  for (std::size_t i = 0; i < fix_durations_ms.size(); ++i) {
    sum += (fix_durations_ms[i] - norm.mu_d) / norm.sigma_d -
           (sac_amplitudes_deg[i] - norm.mu_a) / norm.sigma_a;
  }
  return sum / static_cast<double>(fix_durations_ms.size());
}

ObservationVector extract_window(std::span<const GazeEvent> events, Trigger trigger,
                                 const Condition& condition, const WindowOptions& options) {
  if (events.empty() || events.back().kind != EventKind::kFixation) {
    throw Error(ErrorCode::kNoWindow, "window requires a current fixation");
  }
  ObservationVector obs;
  obs.condition = condition;
  obs.label = trigger == Trigger::kSelectionConfirmed ? Label::kTrue
              : trigger == Trigger::kFixationEnded    ? Label::kFalse
                                                      : Label::kUnlabeled;

  const std::size_t n = events.size();
  const FixationStats fix2 = fixation_stats(events[n - 1]);
  obs[Feature::kFix2Duration] = fix2.duration_ms;
  obs[Feature::kFix2StdX] = fix2.std_x;
  obs[Feature::kFix2StdY] = fix2.std_y;
  obs[Feature::kFix2Velocity] = fix2.mean_velocity;

  const GazeEvent* sac = nullptr;
  const GazeEvent* fix1 = nullptr;
  if (n >= 2 && events[n - 2].kind == EventKind::kSaccade) {
    sac = &events[n - 2];
    if (n >= 3 && events[n - 3].kind == EventKind::kFixation) fix1 = &events[n - 3];
  } else if (n >= 2) {
    fix1 = &events[n - 2];
  }
  if (fix1) {
    const FixationStats s = fixation_stats(*fix1);
    obs[Feature::kFix1Duration] = s.duration_ms;
    obs[Feature::kFix1StdX] = s.std_x;
    obs[Feature::kFix1StdY] = s.std_y;
    obs[Feature::kFix1Velocity] = s.mean_velocity;
  }
  if (sac) {
    const SaccadeStats s = saccade_stats(*sac);
    obs[Feature::kSacDuration] = s.duration_ms;
    obs[Feature::kSacAmplitudeEye] = s.amplitude_of(Source::kEye);
    obs[Feature::kSacAmplitudeHead] = s.amplitude_of(Source::kHead);
    obs[Feature::kSacAmplitudeGaze] = s.amplitude_of(Source::kGaze);
    obs[Feature::kSacVelocityEye] = s.velocity_of(Source::kEye);
    obs[Feature::kSacVelocityHead] = s.velocity_of(Source::kHead);
    obs[Feature::kSacVelocityGaze] = s.velocity_of(Source::kGaze);
  }

  std::vector<double> durations;
  std::vector<double> amplitudes;
  for (std::size_t j = n - 1; j-- > 0 && durations.size() < options.k_pairs;) {
    if (events[j].kind == EventKind::kFixation &&
        events[j + 1].kind == EventKind::kSaccade) {
      durations.push_back(events[j].duration_ms());
      amplitudes.push_back(saccade_stats(events[j + 1]).amplitude_of(Source::kGaze));
    }
  }
  obs[Feature::kCoefficientK] = coefficient_k(durations, amplitudes, options.norm);
  return obs;
}

std::vector<ObservationVector> labeled_windows(std::span<const GazeEvent> events,
                                               const Condition& condition,
                                               const WindowOptions& options) {
  // Older events never reach the window; the live engine keeps the same horizon.
  const std::size_t limit = 2 * options.k_pairs + 2;
  std::vector<ObservationVector> out;
  std::vector<GazeEvent> context;
  for (std::size_t j = 0; j < events.size(); ++j) {
    if (events[j].kind != EventKind::kFixation) continue;
    const std::size_t first = j > limit ? j - limit : 0;
    const auto window = events.subspan(first, j + 1 - first);
    const auto& frames = events[j].frames;
    const auto hit = std::find_if(frames.begin(), frames.end(),
                                  [](const Frame& f) { return f.selection_flag; });
    if (hit != frames.end()) {
      context.assign(window.begin(), window.end());
      context.back() = truncated(events[j], static_cast<std::size_t>(hit - frames.begin()));
      out.push_back(extract_window(context, Trigger::kSelectionConfirmed, condition, options));
    } else {
      out.push_back(extract_window(window, Trigger::kFixationEnded, condition, options));
    }
  }
  return out;
}

}  // namespace gazeintent
