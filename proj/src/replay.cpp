#include "gazeintent/replay.hpp"

#include <algorithm>
#include <string>

#include "gazeintent/random.hpp"

namespace gazeintent {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kModel:
      return "model";
    case Policy::kDwell:
      return "dwell";
    case Policy::kOracle:
      return "oracle";
  }
  return "unknown";
}

Policy parse_policy(std::string_view name) {
  for (Policy p : {Policy::kModel, Policy::kDwell, Policy::kOracle}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::kFormat, "unknown policy '" + std::string(name) + "'");
}

const PolicyReport* ReplayReport::find(Policy p) const {
  for (const PolicyReport& r : policies) {
    if (r.policy == p) return &r;
  }
  return nullptr;
}

int pointed_object(const AngularPoint& gaze, const GroundTruth& truth) {
  int best = -1;
  double best_distance = truth.hit_radius_deg;
  for (const SceneObject& o : truth.objects) {
    const double d = angular_distance(gaze, o.position);
    if (d <= best_distance) {
      best = o.id;
      best_distance = d;
    }
  }
  return best;
}

std::vector<Click> dwell_policy(std::span<const GazeSample> stream, const GroundTruth& truth,
                                double threshold_ms, const DetectorConfig& detector) {
  IvdtDetector ivdt(detector);
  std::vector<Click> clicks;
  std::optional<double> fixation_start;
  int run_object = -1;
  double run_start = 0;
  bool fired = false;
  double prev_t = 0;
  for (const GazeSample& s : stream) {
    const Frame frame = make_frame(s);
    ivdt.step(frame);
    const GazeEvent* open = ivdt.open_fixation();
    if (!open) {
      fixation_start.reset();
    } else {
      const int object = pointed_object(frame.gaze, truth);
      if (fixation_start != open->start_ms) {
        fixation_start = open->start_ms;
        run_object = object;
        run_start = open->start_ms;
        fired = false;
      } else if (object != run_object) {
        run_object = object;
        run_start = prev_t;
        fired = false;
      }
      if (!fired && run_object >= 0 && frame.t_ms - run_start >= threshold_ms) {
        clicks.push_back({frame.t_ms, run_object, -1, false});
        fired = true;
      }
    }
    prev_t = frame.t_ms;
  }
  score_clicks(clicks, truth);
  return clicks;
}

std::vector<Click> oracle_policy(std::span<const GazeSample> stream, const GroundTruth& truth) {
  std::vector<Click> clicks;
  for (const GazeSample& s : stream) {
    if (!s.selection_flag) continue;
    clicks.push_back({s.t_ms, pointed_object(make_frame(s).gaze, truth), -1, false});
  }
  score_clicks(clicks, truth);
  return clicks;
}

std::vector<Click> model_policy(std::span<const GazeSample> stream, const GroundTruth& truth,
                                const IntentModel& model, const EngineConfig& cfg,
                                std::vector<double>* latencies_us) {
  IntentEngine engine(model, truth.condition, cfg);
  std::vector<Click> clicks;
  for (const GazeSample& s : stream) {
    const Frame frame = make_frame(s);
    const auto d = engine.step(frame);
    if (!d) continue;
    if (latencies_us) latencies_us->push_back(d->latency_us);
    if (d->select) clicks.push_back({frame.t_ms, pointed_object(frame.gaze, truth), -1, false});
  }
  score_clicks(clicks, truth);
  return clicks;
}

void score_clicks(std::span<Click> clicks, const GroundTruth& truth) {
  for (Click& c : clicks) {
    c.trial = -1;
    c.correct = false;
    for (std::size_t i = 0; i < truth.trials.size(); ++i) {
      const Trial& tr = truth.trials[i];
      if (c.t_ms >= tr.start_ms && c.t_ms <= tr.end_ms) {
        c.trial = static_cast<int>(i);
        c.correct = c.object == tr.target_object;
        break;
      }
    }
  }
}

ReplayReport replay_eval(std::span<const GazeSample> stream, const GroundTruth& truth,
                         std::span<const Policy> policies, const IntentModel* model, const EngineConfig& cfg) {
  if (truth.objects.empty() || truth.trials.empty()) {
    throw Error(ErrorCode::kMissingGroundTruth, "replay needs scene objects and trial annotations");
  }
  if (stream.empty()) throw Error(ErrorCode::kEmptyStream, "replay of an empty stream");
  ReplayReport report;
  for (Policy p : policies) {
    PolicyReport r;
    r.policy = p;
    std::vector<double> latencies;
    switch (p) {
      case Policy::kModel:
        if (!model) throw Error(ErrorCode::kConfiguration, "model policy requested without a model");
        r.clicks = model_policy(stream, truth, *model, cfg, &latencies);
        break;
      case Policy::kDwell:
        r.clicks = dwell_policy(stream, truth, kDwellThresholdMs, cfg.detector);
        break;
      case Policy::kOracle:
        r.clicks = oracle_policy(stream, truth);
        break;
    }
    r.latency = summarize_latency(latencies);
    r.selections = r.clicks.size();
    r.time_to_selection_ms.assign(truth.trials.size(), std::nullopt);
    for (const Click& c : r.clicks) {
      if (!c.correct) continue;
      ++r.correct_selections;
      auto& ttc = r.time_to_selection_ms[static_cast<std::size_t>(c.trial)];
      if (!ttc) ttc = c.t_ms - truth.trials[static_cast<std::size_t>(c.trial)].start_ms;
    }
    if (r.selections > 0) {
      r.error_rate = static_cast<double>(r.selections - r.correct_selections) / static_cast<double>(r.selections);
    }
    report.policies.push_back(std::move(r));
  }
  return report;
}

std::vector<ScheduleEntry> dwell_stress_schedule(const ScenarioConfig& scenario, std::size_t trials,
                                                 std::uint64_t seed) {
  const std::vector<int> slots = target_slot_ids(scenario);
  Rng rng(seed);
  std::vector<ScheduleEntry> out;
  out.reserve(2 * trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const int target = slots[rng.index(slots.size())];
    int distractor = target;
    while (distractor == target) distractor = slots[rng.index(slots.size())];
    out.push_back({distractor, 650, false});
    out.push_back({target, 550, true});
  }
  return out;
}

}  // namespace gazeintent
