#include "gazeintent/event_detector.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace gazeintent {

Frame make_frame(const GazeSample& sample) {
  if (!std::isfinite(sample.t_ms)) throw Error(ErrorCode::kInvalidSample, "non-finite timestamp");
  if (!is_unit(sample.eye_q) || !is_unit(sample.head_q)) {
    throw Error(ErrorCode::kInvalidSample,
                "quaternions must be unit-norm at t_ms=" + std::to_string(sample.t_ms));
  }
  const UnitQuaternion<double> gaze_q = compose_gaze(sample.head_q, sample.eye_q);
  Frame f;
  f.t_ms = sample.t_ms;
  f.eye = to_angles(sample.eye_q, Source::kEye);
  f.head = to_angles(sample.head_q, Source::kHead);
  f.gaze = to_angles(gaze_q, Source::kGaze);
  f.selection_flag = sample.selection_flag;
  return f;
}

void DetectorConfig::validate() const {
  const bool positive = saccade_velocity_thresh > 0 && fixation_velocity_thresh > 0 &&
                        fixation_dispersion_thresh > 0 && fixation_min_duration_ms > 0;
  if (!positive || !(saccade_velocity_thresh > fixation_velocity_thresh)) {
    throw Error(ErrorCode::kConfiguration,
                "detector thresholds must be positive with saccade > fixation velocity");
  }
}

IvdtDetector::IvdtDetector(DetectorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

StepResult IvdtDetector::step(const GazeSample& sample) { return step(make_frame(sample)); }

void IvdtDetector::close_fixation(std::vector<GazeEvent>& out) {
  if (!fixation_) return;
  if (fixation_->duration_ms() >= cfg_.fixation_min_duration_ms) out.push_back(std::move(*fixation_));
  fixation_.reset();
  bounds_ = {};
  fixation_announced_ = false;
}

void IvdtDetector::close_saccade(std::vector<GazeEvent>& out) {
  if (!saccade_) return;
  out.push_back(std::move(*saccade_));
  saccade_.reset();
}

StepResult IvdtDetector::step(const Frame& frame) {
  StepResult result;
  if (!prev_) {
    prev_ = frame;
    last_velocity_ = 0;
    // The first frame has no velocity; it can only open a fixation candidate.
    fixation_ = GazeEvent{EventKind::kFixation, frame.t_ms, frame.t_ms, {frame}, std::nullopt};
    bounds_ = {};
    bounds_.add(frame.gaze);
    return result;
  }
  if (!(frame.t_ms > prev_->t_ms)) {
    throw Error(ErrorCode::kStreamOrder, "timestamp " + std::to_string(frame.t_ms) +
                                             " does not follow " + std::to_string(prev_->t_ms));
  }
  const double v = angular_velocity(prev_->gaze, frame.gaze, frame.t_ms - prev_->t_ms);
  last_velocity_ = v;

  if (v > cfg_.saccade_velocity_thresh) {
    close_fixation(result.completed);
    if (saccade_) {
      saccade_->frames.push_back(frame);
      saccade_->end_ms = frame.t_ms;
    } else {
      saccade_ = GazeEvent{EventKind::kSaccade, prev_->t_ms, frame.t_ms, {frame}, *prev_};
    }
  } else if (v < cfg_.fixation_velocity_thresh) {
    close_saccade(result.completed);
    if (fixation_ && bounds_.with(frame.gaze).dispersion() < cfg_.fixation_dispersion_thresh) {
      fixation_->frames.push_back(frame);
      fixation_->end_ms = frame.t_ms;
      bounds_.add(frame.gaze);
    } else {
      close_fixation(result.completed);
      fixation_ = GazeEvent{EventKind::kFixation, prev_->t_ms, frame.t_ms, {frame}, std::nullopt};
      bounds_ = {};
      bounds_.add(frame.gaze);
    }
  } else {
    close_fixation(result.completed);
    if (saccade_ && cfg_.pursuit_extends_saccade) {
      saccade_->frames.push_back(frame);
      saccade_->end_ms = frame.t_ms;
    } else {
      close_saccade(result.completed);
    }
  }

  if (fixation_ && !fixation_announced_ &&
      fixation_->duration_ms() >= cfg_.fixation_min_duration_ms) {
    fixation_announced_ = true;
    result.fixation_detected = true;
  }
  prev_ = frame;
  return result;
}

std::vector<GazeEvent> IvdtDetector::flush() {
  std::vector<GazeEvent> out;
  // At most one of the two is open at any time.
  close_saccade(out);
  close_fixation(out);
  return out;
}

const GazeEvent* IvdtDetector::open_fixation() const {
  return fixation_announced_ ? &*fixation_ : nullptr;
}

std::vector<GazeEvent> segment(std::span<const Frame> frames, const DetectorConfig& cfg) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyStream, "segment requires a non-empty stream");
  IvdtDetector detector(cfg);
  std::vector<GazeEvent> events;
  for (const Frame& f : frames) {
    auto r = detector.step(f);
    for (auto& e : r.completed) events.push_back(std::move(e));
  }
  for (auto& e : detector.flush()) events.push_back(std::move(e));
  return events;
}

std::vector<GazeEvent> segment(std::span<const GazeSample> stream, const DetectorConfig& cfg) {
  if (stream.empty()) throw Error(ErrorCode::kEmptyStream, "segment requires a non-empty stream");
  std::vector<Frame> frames;
  frames.reserve(stream.size());
  for (const GazeSample& s : stream) frames.push_back(make_frame(s));
  return segment(std::span<const Frame>(frames), cfg);
}

}  // namespace gazeintent
