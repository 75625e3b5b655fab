#include "gazeintent/engine.hpp"

#include <chrono>
#include <utility>

namespace gazeintent {
namespace {

std::size_t history_limit(const WindowOptions& w) { return 2 * w.k_pairs + 2; }

IntentDecision decide(const Encoder& encoder, const TrainedSVM& svm, std::span<const GazeEvent> context,
                      const Condition& condition, const WindowOptions& window, Eigen::VectorXd& input) {
  IntentDecision d;
  const auto t0 = std::chrono::steady_clock::now();
  d.window = extract_window(context, Trigger::kFixationDetected, condition, window);
  encoder.encode(d.window, input);
  d.decision_value = predict(svm, input).decision_value;
  const auto t1 = std::chrono::steady_clock::now();
  d.select = d.decision_value > 0;
  d.latency_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
  d.t_ms = context.back().end_ms;
  return d;
}

}  // namespace

IntentEngine::IntentEngine(const IntentModel& model, const Condition& condition, EngineConfig cfg)
    : model_(&model),
      condition_(condition),
      cfg_(cfg),
      detector_(cfg.detector),
      encoder_(model.bayes, model.mask),
      input_(encoder_.dim()),
      history_limit_(history_limit(cfg.window)) {
  if (model.bayes.condition != condition) {
    throw Error(ErrorCode::kConfiguration, "model condition " + to_string(model.bayes.condition) +
                                               " does not match stream condition " + to_string(condition));
  }
  if (encoder_.dim() != model.svm.dim()) {
    throw Error(ErrorCode::kConfiguration, "SVM input size does not match the Bayes model and mask");
  }
  context_.reserve(history_limit_ + 1);
}

void IntentEngine::remember(GazeEvent event) {
  if (context_.size() == history_limit_) context_.erase(context_.begin());
  context_.push_back(std::move(event));
}

std::optional<IntentDecision> IntentEngine::step(const GazeSample& sample) { return step(make_frame(sample)); }

std::optional<IntentDecision> IntentEngine::step(const Frame& frame) {
  StepResult r = detector_.step(frame);
  for (GazeEvent& e : r.completed) remember(std::move(e));
  const GazeEvent* open = detector_.open_fixation();
  if (!open) return std::nullopt;
  if (selected_fixation_start_ && *selected_fixation_start_ == open->start_ms) return std::nullopt;

  context_.push_back(*open);
  IntentDecision d = decide(encoder_, model_->svm, context_, condition_, cfg_.window, input_);
  context_.pop_back();
  if (d.select) selected_fixation_start_ = open->start_ms;
  return d;
}

void IntentEngine::finish() {
  for (GazeEvent& e : detector_.flush()) remember(std::move(e));
}

std::vector<IntentDecision> batch_decisions(const IntentModel& model, std::span<const GazeSample> stream,
                                            const Condition& condition, const EngineConfig& cfg) {
  if (model.bayes.condition != condition) {
    throw Error(ErrorCode::kConfiguration, "model condition does not match stream condition");
  }
  const std::vector<GazeEvent> events = segment(stream, cfg.detector);
  const Encoder encoder(model.bayes, model.mask);
  Eigen::VectorXd input(encoder.dim());
  const std::size_t limit = history_limit(cfg.window);
  std::vector<IntentDecision> out;
  std::vector<GazeEvent> context;
  for (std::size_t j = 0; j < events.size(); ++j) {
    const GazeEvent& fix = events[j];
    if (fix.kind != EventKind::kFixation) continue;
    context.assign(events.begin() + static_cast<std::ptrdiff_t>(j > limit ? j - limit : 0),
                   events.begin() + static_cast<std::ptrdiff_t>(j));
    GazeEvent prefix = fix;
    prefix.frames.clear();
    context.push_back(prefix);
    for (const Frame& f : fix.frames) {
      context.back().frames.push_back(f);
      context.back().end_ms = f.t_ms;
      if (context.back().duration_ms() < cfg.detector.fixation_min_duration_ms) continue;
      out.push_back(decide(encoder, model.svm, context, condition, cfg.window, input));
      if (out.back().select) break;
    }
  }
  return out;
}

std::vector<IntentDecision> stream_decisions(const IntentModel& model, std::span<const GazeSample> stream,
                                             const Condition& condition, const EngineConfig& cfg) {
  IntentEngine engine(model, condition, cfg);
  std::vector<IntentDecision> out;
  for (const GazeSample& s : stream) {
    if (auto d = engine.step(s)) out.push_back(std::move(*d));
  }
  engine.finish();
  return out;
}

}  // namespace gazeintent
