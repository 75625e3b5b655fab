#pragma once

// File formats: JSONL for streams, feature tables and ground truth; JSON for
// models and specs; CSV for metrics. Every record carries schema_version.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gazeintent/replay.hpp"
#include "gazeintent/synth.hpp"
#include "gazeintent/training.hpp"

namespace gazeintent::io {

inline constexpr int kSchemaVersion = 1;

/// Parse failures and schema mismatches throw kFormat naming the line.
std::vector<GazeSample> read_samples(std::istream& in);
void write_samples(std::ostream& out, std::span<const GazeSample> samples);

void write_events(std::ostream& out, std::span<const GazeEvent> events);

LabeledFeatureTable read_features(std::istream& in);
void write_features(std::ostream& out, std::span<const ObservationVector> rows);

GroundTruth read_ground_truth(std::istream& in);
void write_ground_truth(std::ostream& out, const GroundTruth& truth);

GenerativeSpec read_spec(std::istream& in);
void write_spec(std::ostream& out, const GenerativeSpec& spec);

BayesianModel read_bayes_model(std::istream& in);
void write_bayes_model(std::ostream& out, const BayesianModel& model);

/// Saving a loaded model reproduces the input bytes.
IntentModel read_model(std::istream& in);
void write_model(std::ostream& out, const IntentModel& model);

void write_metrics_csv(std::ostream& out, std::span<const AblationRow> rows);
void write_replay_csv(std::ostream& out, const ReplayReport& report);
void write_replay_json(std::ostream& out, const ReplayReport& report);

/// Label names as written by to_string(Label); throws kFormat otherwise.
Label parse_label(std::string_view name);

/// Environment variable naming the directory searched for relative model paths.
inline constexpr const char* kModelDirEnv = "GAZEINTENT_MODEL_DIR";

/// A relative path that does not exist is looked up under $GAZEINTENT_MODEL_DIR.
std::filesystem::path resolve_model_path(const std::filesystem::path& path);

/// File helpers; throw kFormat when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace gazeintent::io
