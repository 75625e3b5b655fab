#include <algorithm>
#include <cmath>
#include <string>

#include "gazeintent/synth.hpp"

namespace gazeintent {
namespace {

constexpr double kMinFixationMs = 50.0;

double truncated_normal(Rng& rng, double sd, double max_abs) {
  if (sd <= 0) return 0.0;
  for (;;) {
    const double v = rng.normal(0.0, sd);
    if (std::abs(v) <= max_abs) return v;
  }
}

GazeSample make_sample(double t_ms, const AngularPoint& gaze, const AngularPoint& head, bool flag) {
  const UnitQuaternion<double> head_q = from_angles(head.azimuth_deg, head.elevation_deg);
  const UnitQuaternion<double> gaze_q = from_angles(gaze.azimuth_deg, gaze.elevation_deg);
  GazeSample s;
  s.t_ms = t_ms;
  s.head_q = head_q;
  s.eye_q = canonical(UnitQuaternion<double>((head_q.conjugate() * gaze_q).normalized()));
  s.selection_flag = flag;
  return s;
}

AngularPoint lerp(const AngularPoint& a, const AngularPoint& b, double s, Source source) {
  return {a.azimuth_deg + s * (b.azimuth_deg - a.azimuth_deg),
          a.elevation_deg + s * (b.elevation_deg - a.elevation_deg), source};
}

/// Point at fraction s along the great circle from a to b.
AngularPoint slerp(const AngularPoint& a, const AngularPoint& b, double s) {
  const Eigen::Vector3d u = angles_to_direction(a);
  const Eigen::Vector3d v = angles_to_direction(b);
  const double omega = std::atan2(u.cross(v).norm(), u.dot(v));
  if (omega < 1e-12) return a;
  const Eigen::Vector3d w =
      (std::sin((1.0 - s) * omega) * u + std::sin(s * omega) * v) / std::sin(omega);
  return direction_to_angles<double>(w, Source::kGaze);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(sample_rate_hz >= 60.0 && sample_rate_hz <= 66.0)) {
    throw Error(ErrorCode::kConfiguration, "sample rate must lie in [60, 66] Hz");
  }
  const bool ok = saccade_speed_deg_s > 0 && head_ratio >= 0 && head_ratio <= 1 &&
                  jitter_sd_deg >= 0 && select_jitter_sd_deg >= 0 && jitter_max_deg >= 0 &&
                  select_fraction >= 0 && select_fraction <= 1;
  if (!ok) throw Error(ErrorCode::kConfiguration, "invalid scenario parameters");
}

std::vector<SceneObject> scene_objects(const ScenarioConfig& scenario) {
  std::vector<SceneObject> out;
  const double spacing = scenario.spacing_deg();
  int id = 0;
  for (int row = -(kGridRows / 2); row <= kGridRows / 2; ++row) {
    for (int col = -(kGridColumns / 2); col <= kGridColumns / 2; ++col) {
      SceneObject o;
      o.id = id++;
      o.column = col;
      o.row = row;
      o.position = {col * spacing, row * spacing, Source::kGaze};
      o.target_slot = std::abs(col) <= 3 && std::abs(row) <= 2 && std::max(std::abs(col), std::abs(row)) >= 2;
      out.push_back(o);
    }
  }
  return out;
}

std::vector<int> target_slot_ids(const ScenarioConfig& scenario) {
  std::vector<int> ids;
  for (const SceneObject& o : scene_objects(scenario)) {
    if (o.target_slot) ids.push_back(o.id);
  }
  return ids;
}

SyntheticStream gen_stream(const ScenarioConfig& scenario, std::span<const ScheduleEntry> schedule,
                           std::uint64_t seed) {
  scenario.validate();
  if (schedule.empty()) throw Error(ErrorCode::kSchedule, "empty schedule");
  const std::vector<SceneObject> objects = scene_objects(scenario);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScheduleEntry& e = schedule[i];
    if (e.object < 0 || e.object >= static_cast<int>(objects.size())) {
      throw Error(ErrorCode::kSchedule, "entry " + std::to_string(i) + " names an object outside the grid");
    }
    if (!(e.duration_ms >= kMinFixationMs)) {
      throw Error(ErrorCode::kSchedule, "entry " + std::to_string(i) + " is shorter than 50 ms");
    }
  }

  Rng rng(seed);
  const double dt = 1000.0 / scenario.sample_rate_hz;
  SyntheticStream out;
  out.truth.condition = scenario.condition;
  out.truth.hit_radius_deg = 0.5 * scenario.width_deg();
  out.truth.objects = objects;

  std::size_t k = 0;  // frame index; t = k dt
  const auto t_of = [&](std::size_t idx) { return static_cast<double>(idx) * 1000.0 / scenario.sample_rate_hz; };
  AngularPoint head{0, 0, Source::kHead};
  std::size_t trial_begin_entry = 0;

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScheduleEntry& e = schedule[i];
    const AngularPoint target = objects[static_cast<std::size_t>(e.object)].position;

    if (i > 0) {
      // Saccade from the previous target; its last frame lands on the new one.
      const AngularPoint from = objects[static_cast<std::size_t>(schedule[i - 1].object)].position;
      const double amplitude = angular_distance(from, target);
      const double per_frame = scenario.saccade_speed_deg_s * dt / 1000.0;
      const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(amplitude / per_frame)));
      const AngularPoint head_from = head;
      const AngularPoint head_to{head.azimuth_deg + scenario.head_ratio * (target.azimuth_deg - from.azimuth_deg),
                                 head.elevation_deg + scenario.head_ratio * (target.elevation_deg - from.elevation_deg),
                                 Source::kHead};
      const double start = t_of(k);
      for (std::size_t s = 1; s <= n; ++s) {
        const double frac = static_cast<double>(s) / static_cast<double>(n);
        head = lerp(head_from, head_to, frac, Source::kHead);
        ++k;
        out.samples.push_back(make_sample(t_of(k), slerp(from, target, frac), head, false));
      }
      out.truth.events.push_back({EventKind::kSaccade, start, t_of(k), -1});
    }

    // Fixation frames; the first stream frame opens the first fixation.
    const auto n_fix = static_cast<std::size_t>(std::llround(e.duration_ms / dt));
    const double sd = e.select ? scenario.select_jitter_sd_deg : scenario.jitter_sd_deg;
    const std::size_t select_frame =
        e.select ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scenario.select_fraction * n_fix)))
                 : 0;
    const double start = t_of(k);
    const std::size_t first = i == 0 ? 0 : 1;
    double selection_ms = 0;
    for (std::size_t f = first; f <= n_fix; ++f) {
      if (f > 0) ++k;
      const AngularPoint p{target.azimuth_deg + truncated_normal(rng, sd, scenario.jitter_max_deg),
                           target.elevation_deg + truncated_normal(rng, sd, scenario.jitter_max_deg),
                           Source::kGaze};
      const bool flag = e.select && f == select_frame;
      if (flag) selection_ms = t_of(k);
      out.samples.push_back(make_sample(t_of(k), p, head, flag));
    }
    out.truth.events.push_back({EventKind::kFixation, start, t_of(k), e.object});

    if (e.select) {
      Trial trial;
      trial.target_object = e.object;
      trial.start_object = i > 0 ? schedule[i - 1].object : -1;
      // The trial opens with the first fixation after the previous trial;
      // fixation j is scripted event 2 j.
      trial.start_ms = out.truth.events[2 * trial_begin_entry].start_ms;
      trial.end_ms = t_of(k);
      trial.selection_ms = selection_ms;
      out.truth.trials.push_back(trial);
      trial_begin_entry = i + 1;
    }
  }
  return out;
}

std::vector<ScheduleEntry> random_task_schedule(const ScenarioConfig& scenario, std::size_t trials,
                                                std::uint64_t seed, std::size_t distractors) {
  Rng rng(seed);
  const std::vector<int> slots = target_slot_ids(scenario);
  const int centre = kGridColumns * kGridRows / 2;
  constexpr int kObjects = kGridColumns * kGridRows;
  std::vector<ScheduleEntry> out;
  for (std::size_t t = 0; t < trials; ++t) {
    out.push_back({centre, rng.uniform(250.0, 700.0), false});
    const int target = slots[rng.index(slots.size())];
    for (std::size_t d = 0; d < distractors; ++d) {
      int object = target;
      while (object == target) object = static_cast<int>(rng.index(kObjects));
      out.push_back({object, rng.uniform(250.0, 700.0), false});
    }
    out.push_back({target, rng.uniform(250.0, 700.0), true});
  }
  return out;
}

double event_recovery(std::span<const ScriptedEvent> scripted, std::span<const GazeEvent> detected,
                      double tolerance_ms) {
  if (scripted.empty()) return 1.0;
  std::size_t hits = 0;
  std::size_t from = 0;
  for (const ScriptedEvent& s : scripted) {
    for (std::size_t j = from; j < detected.size(); ++j) {
      const GazeEvent& d = detected[j];
      if (d.start_ms > s.end_ms + tolerance_ms) break;
      if (d.kind == s.kind && std::abs(d.start_ms - s.start_ms) <= tolerance_ms &&
          std::abs(d.end_ms - s.end_ms) <= tolerance_ms) {
        ++hits;
        from = j + 1;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(scripted.size());
}

}  // namespace gazeintent
