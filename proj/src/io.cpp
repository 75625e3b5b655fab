#include "gazeintent/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace gazeintent::io {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::kFormat, what); }

// JSON has no infinities; unbounded support ends are written as strings.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) format_error("cannot serialize NaN");
  return v > 0 ? "inf" : "-inf";
}

double number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  format_error("expected a number, got " + j.dump());
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) format_error(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) format_error(std::string("missing field '") + key + "'");
  return *it;
}

void check_schema(const Json& j) {
  const Json& v = field(j, "schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    format_error("unsupported schema_version " + v.dump());
  }
}

Json quaternion(const Eigen::Quaterniond& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

Eigen::Quaterniond quaternion(const Json& j) {
  if (!j.is_array() || j.size() != 4) format_error("quaternion must be [w, x, y, z]");
  return {number(j[0]), number(j[1]), number(j[2]), number(j[3])};
}

Json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Eigen::VectorXd vector_from(const Json& j) {
  if (!j.is_array()) format_error("expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i]);
  return v;
}

Json distribution_json(const FittedDistribution& d) {
  Json j;
  j["family"] = family_name(d.family);
  j["p1"] = number(d.p1);
  j["p2"] = number(d.p2);
  j["support"] = Json::array({number(d.support.lo), number(d.support.hi)});
  j["ks_p"] = d.ks_p ? Json(*d.ks_p) : Json(nullptr);
  return j;
}

FittedDistribution distribution_from(const Json& j) {
  const auto name = field(j, "family").get<std::string>();
  const auto family = family_from_name(name);
  if (!family) format_error("unknown distribution family '" + name + "'");
  FittedDistribution d;
  d.family = *family;
  d.p1 = number(field(j, "p1"));
  d.p2 = number(field(j, "p2"));
  const Json& s = field(j, "support");
  if (!s.is_array() || s.size() != 2) format_error("support must be [lo, hi]");
  d.support = {number(s[0]), number(s[1])};
  const Json& ks = field(j, "ks_p");
  if (!ks.is_null()) d.ks_p = number(ks);
  try {
    validate(d);
  } catch (const Error& e) {
    format_error(std::string("invalid distribution: ") + e.what());
  }
  return d;
}

Json norm_json(const CoeffKNorm& n) {
  return Json{{"mu_d", n.mu_d}, {"sigma_d", n.sigma_d}, {"mu_a", n.mu_a}, {"sigma_a", n.sigma_a}};
}

CoeffKNorm norm_from(const Json& j) {
  CoeffKNorm n{number(field(j, "mu_d")), number(field(j, "sigma_d")), number(field(j, "mu_a")),
               number(field(j, "sigma_a"))};
  n.validate();
  return n;
}

Feature feature_from(const Json& j) {
  const auto name = j.get<std::string>();
  const auto f = feature_from_name(name);
  if (!f) format_error("unknown feature '" + name + "'");
  return *f;
}

Condition condition_from(const Json& j) {
  if (!j.is_string()) format_error("condition must be a string");
  return parse_condition(j.get<std::string>());
}

Json parse_json(const std::string& text, std::size_t line) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    format_error("line " + std::to_string(line) + ": " + e.what());
  }
}

Json parse_document(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  Json j = parse_json(buf.str(), 1);
  check_schema(j);
  return j;
}

// Calls fn(json, line) per non-blank line; wraps library errors with the line number.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Json j = parse_json(text, line);
      check_schema(j);
      fn(j);
    } catch (const Json::exception& e) {
      format_error("line " + std::to_string(line) + ": " + e.what());
    } catch (const Error& e) {
      // what() already starts with the code name; keep only the detail.
      std::string detail = e.what();
      const std::string prefix = std::string(to_string(e.code())) + ": ";
      if (detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
      throw Error(e.code(), "line " + std::to_string(line) + ": " + detail);
    }
  }
}

std::string_view kind_name(EventKind k) { return k == EventKind::kFixation ? "fixation" : "saccade"; }

EventKind kind_from(const Json& j) {
  const auto s = j.get<std::string>();
  if (s == "fixation") return EventKind::kFixation;
  if (s == "saccade") return EventKind::kSaccade;
  format_error("unknown event kind '" + s + "'");
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

Json bayes_json(const BayesianModel& model) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["ledger_version"] = kLedgerVersion;
  j["condition"] = to_string(model.condition);
  Json selected = Json::array();
  for (Feature f : model.selected_features()) selected.push_back(feature_name(f));
  j["selected_features"] = std::move(selected);
  j["coeffk_norm"] = norm_json(model.coeffk_norm);
  j["density_floor"] = model.density_floor;
  Json densities = Json::array();
  for (const DensityPair& p : model.densities) {
    densities.push_back({{"feature", feature_name(p.feature)},
                         {"true", distribution_json(p.true_density)},
                         {"false", distribution_json(p.false_density)},
                         {"fallback", Json::array({number(p.fallback.lo), number(p.fallback.hi)})},
                         {"warning", p.warning}});
  }
  j["densities"] = std::move(densities);
  return j;
}

BayesianModel bayes_from(const Json& j) {
  if (field(j, "ledger_version").get<int>() != kLedgerVersion) {
    format_error("model was written with another distribution ledger");
  }
  BayesianModel m;
  m.condition = condition_from(field(j, "condition"));
  m.coeffk_norm = norm_from(field(j, "coeffk_norm"));
  m.density_floor = number(field(j, "density_floor"));
  for (const Json& d : field(j, "densities")) {
    DensityPair p;
    p.feature = feature_from(field(d, "feature"));
    p.true_density = distribution_from(field(d, "true"));
    p.false_density = distribution_from(field(d, "false"));
    const Json& fb = field(d, "fallback");
    if (!fb.is_array() || fb.size() != 2) format_error("fallback must be [lo, hi]");
    p.fallback = {number(fb[0]), number(fb[1])};
    p.warning = field(d, "warning").get<bool>();
    m.densities.push_back(p);
  }
  const Json& selected = field(j, "selected_features");
  if (selected.size() != m.densities.size()) format_error("selected_features and densities disagree");
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (feature_from(selected[i]) != m.densities[i].feature) {
      format_error("selected_features and densities disagree");
    }
  }
  m.validate();
  return m;
}

}  // namespace

Label parse_label(std::string_view name) {
  for (Label l : {Label::kTrue, Label::kFalse, Label::kUnlabeled}) {
    if (to_string(l) == name) return l;
  }
  format_error("unknown label '" + std::string(name) + "'");
}

std::vector<GazeSample> read_samples(std::istream& in) {
  std::vector<GazeSample> out;
  for_each_record(in, [&](const Json& j) {
    GazeSample s;
    s.t_ms = number(field(j, "t_ms"));
    s.eye_q = quaternion(field(j, "eye_q"));
    s.head_q = quaternion(field(j, "head_q"));
    s.selection_flag = field(j, "selection").get<bool>();
    if (!out.empty() && !(s.t_ms > out.back().t_ms)) {
      throw Error(ErrorCode::kStreamOrder, "timestamps must strictly increase");
    }
    out.push_back(s);
  });
  return out;
}

void write_samples(std::ostream& out, std::span<const GazeSample> samples) {
  for (const GazeSample& s : samples) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["t_ms"] = s.t_ms;
    j["eye_q"] = quaternion(s.eye_q);
    j["head_q"] = quaternion(s.head_q);
    j["selection"] = s.selection_flag;
    out << j.dump() << '\n';
  }
}

void write_events(std::ostream& out, std::span<const GazeEvent> events) {
  for (const GazeEvent& e : events) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind_name(e.kind);
    j["start_ms"] = e.start_ms;
    j["end_ms"] = e.end_ms;
    j["frames"] = e.frames.size();
    if (e.kind == EventKind::kFixation) {
      const FixationStats s = fixation_stats(e);
      j["std_x_deg"] = s.std_x;
      j["std_y_deg"] = s.std_y;
      j["velocity"] = s.mean_velocity;
    } else {
      const SaccadeStats s = saccade_stats(e);
      j["amplitude_deg"] = {{"eye", s.amplitude[0]}, {"head", s.amplitude[1]}, {"gaze", s.amplitude[2]}};
      j["velocity"] = {{"eye", s.velocity[0]}, {"head", s.velocity[1]}, {"gaze", s.velocity[2]}};
    }
    out << j.dump() << '\n';
  }
}

LabeledFeatureTable read_features(std::istream& in) {
  LabeledFeatureTable rows;
  for_each_record(in, [&](const Json& j) {
    ObservationVector obs;
    obs.condition = condition_from(field(j, "condition"));
    obs.label = parse_label(field(j, "label").get<std::string>());
    const Json& values = field(j, "features");
    if (!values.is_object()) format_error("features must be an object");
    for (auto it = values.begin(); it != values.end(); ++it) {
      const auto f = feature_from_name(it.key());
      if (!f) format_error("unknown feature '" + it.key() + "'");
      if (!it.value().is_null()) {
        const double v = number(it.value());
        if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidObservation, "non-finite feature " + it.key());
        obs.values[index_of(*f)] = v;
      }
    }
    rows.push_back(obs);
  });
  return rows;
}

void write_features(std::ostream& out, std::span<const ObservationVector> rows) {
  for (const ObservationVector& obs : rows) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["condition"] = to_string(obs.condition);
    j["label"] = to_string(obs.label);
    Json values = Json::object();
    for (Feature f : all_features()) values[std::string(feature_name(f))] = optional_number(obs[f]);
    j["features"] = std::move(values);
    out << j.dump() << '\n';
  }
}

GroundTruth read_ground_truth(std::istream& in) {
  GroundTruth t;
  bool scene = false;
  for_each_record(in, [&](const Json& j) {
    const auto record = field(j, "record").get<std::string>();
    if (record == "scene") {
      if (scene) format_error("duplicate scene record");
      scene = true;
      t.condition = condition_from(field(j, "condition"));
      t.hit_radius_deg = number(field(j, "hit_radius_deg"));
      return;
    }
    if (!scene) format_error("ground truth must open with a scene record");
    if (record == "object") {
      SceneObject s;
      s.id = field(j, "id").get<int>();
      s.column = field(j, "column").get<int>();
      s.row = field(j, "row").get<int>();
      s.position = {number(field(j, "azimuth_deg")), number(field(j, "elevation_deg")), Source::kGaze};
      s.target_slot = field(j, "target_slot").get<bool>();
      t.objects.push_back(s);
    } else if (record == "event") {
      t.events.push_back({kind_from(field(j, "kind")), number(field(j, "start_ms")), number(field(j, "end_ms")),
                          field(j, "object").get<int>()});
    } else if (record == "trial") {
      t.trials.push_back({field(j, "start_object").get<int>(), field(j, "target_object").get<int>(),
                          number(field(j, "start_ms")), number(field(j, "end_ms")), number(field(j, "selection_ms"))});
    } else {
      format_error("unknown ground-truth record '" + record + "'");
    }
  });
  if (!scene) throw Error(ErrorCode::kMissingGroundTruth, "ground truth has no scene record");
  return t;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  auto line = [&](Json j) { out << j.dump() << '\n'; };
  line({{"schema_version", kSchemaVersion},
        {"record", "scene"},
        {"condition", to_string(truth.condition)},
        {"hit_radius_deg", truth.hit_radius_deg}});
  for (const SceneObject& o : truth.objects) {
    line({{"schema_version", kSchemaVersion},
          {"record", "object"},
          {"id", o.id},
          {"column", o.column},
          {"row", o.row},
          {"azimuth_deg", o.position.azimuth_deg},
          {"elevation_deg", o.position.elevation_deg},
          {"target_slot", o.target_slot}});
  }
  for (const ScriptedEvent& e : truth.events) {
    line({{"schema_version", kSchemaVersion},
          {"record", "event"},
          {"kind", kind_name(e.kind)},
          {"start_ms", e.start_ms},
          {"end_ms", e.end_ms},
          {"object", e.object}});
  }
  for (const Trial& t : truth.trials) {
    line({{"schema_version", kSchemaVersion},
          {"record", "trial"},
          {"start_object", t.start_object},
          {"target_object", t.target_object},
          {"start_ms", t.start_ms},
          {"end_ms", t.end_ms},
          {"selection_ms", t.selection_ms}});
  }
}

GenerativeSpec read_spec(std::istream& in) {
  const Json j = parse_document(in);
  try {
    GenerativeSpec spec;
    // Cells absent from the file keep the uniform placeholder.
    for (auto& row : spec.cells) {
      for (auto& cell : row) cell = {make_uniform(0, 1), make_uniform(0, 1)};
    }
    spec.class_imbalance = number(field(j, "class_imbalance"));
    spec.coeffk_norm = norm_from(field(j, "coeffk_norm"));
    const Json& units = field(j, "units");
    spec.units = {field(units, "duration").get<std::string>(), field(units, "angle").get<std::string>(),
                  field(units, "velocity").get<std::string>()};
    for (const Json& c : field(j, "conditions")) {
      const Condition cond = condition_from(field(c, "condition"));
      const Json& features = field(c, "features");
      for (auto it = features.begin(); it != features.end(); ++it) {
        const auto f = feature_from_name(it.key());
        if (!f) format_error("unknown feature '" + it.key() + "'");
        spec.at(cond, *f) = {distribution_from(field(it.value(), "true")),
                             distribution_from(field(it.value(), "false"))};
      }
    }
    spec.validate();
    return spec;
  } catch (const Json::exception& e) {
    format_error(std::string("spec: ") + e.what());
  }
}

void write_spec(std::ostream& out, const GenerativeSpec& spec) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["ledger_version"] = kLedgerVersion;
  j["class_imbalance"] = spec.class_imbalance;
  j["coeffk_norm"] = norm_json(spec.coeffk_norm);
  j["units"] = {{"duration", spec.units.duration}, {"angle", spec.units.angle}, {"velocity", spec.units.velocity}};
  Json conditions = Json::array();
  for (const Condition& c : all_conditions()) {
    Json features = Json::object();
    for (Feature f : all_features()) {
      const ClassDensities& d = spec.at(c, f);
      features[std::string(feature_name(f))] = {{"true", distribution_json(d.true_density)},
                                                {"false", distribution_json(d.false_density)}};
    }
    conditions.push_back({{"condition", to_string(c)}, {"features", std::move(features)}});
  }
  j["conditions"] = std::move(conditions);
  out << j.dump(2) << '\n';
}

BayesianModel read_bayes_model(std::istream& in) {
  const Json j = parse_document(in);
  try {
    return bayes_from(j);
  } catch (const Json::exception& e) {
    format_error(std::string("model: ") + e.what());
  }
}

void write_bayes_model(std::ostream& out, const BayesianModel& model) { out << bayes_json(model).dump(2) << '\n'; }

constexpr const char* kKernelForm = "exp(-|x-y|^2 / (2 sigma^2))";

IntentModel read_model(std::istream& in) {
  const Json j = parse_document(in);
  try {
    IntentModel m;
    m.bayes = bayes_from(j);
    const Json& s = field(j, "svm");
    if (field(s, "kernel").get<std::string>() != "gaussian") format_error("only the gaussian kernel is supported");
    // sigma is only meaningful under this exact parameterization.
    if (s.contains("kernel_form") && s["kernel_form"] != kKernelForm) format_error("unexpected kernel_form");
    m.mask = parse_mask(field(s, "mask").get<std::string>());
    m.svm.sigma = number(field(s, "sigma"));
    m.svm.c = number(field(s, "c"));
    m.svm.bias = number(field(s, "bias"));
    m.svm.scaler.mean = vector_from(field(field(s, "scaler"), "mean"));
    m.svm.scaler.scale = vector_from(field(field(s, "scaler"), "scale"));
    m.svm.coefficients = vector_from(field(s, "coefficients"));
    const Json& svs = field(s, "support_vectors");
    const Eigen::Index dim = m.svm.scaler.mean.size();
    if (static_cast<std::size_t>(m.svm.coefficients.size()) != svs.size()) {
      format_error("support vector and coefficient counts differ");
    }
    m.svm.support_vectors.resize(static_cast<Eigen::Index>(svs.size()), dim);
    for (std::size_t r = 0; r < svs.size(); ++r) {
      const Eigen::VectorXd row = vector_from(svs[r]);
      if (row.size() != dim) format_error("support vector has the wrong dimension");
      m.svm.support_vectors.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    const Json& diag = field(s, "diagnostics");
    m.svm.diagnostics.iterations = field(diag, "iterations").get<std::size_t>();
    m.svm.diagnostics.kkt_gap = number(field(diag, "kkt_gap"));
    m.svm.diagnostics.dual_objective = number(field(diag, "dual_objective"));
    if (field(s, "input_dim").get<Eigen::Index>() != dim || m.svm.scaler.scale.size() != dim) {
      format_error("SVM input dimension is inconsistent");
    }
    if (Encoder(m.bayes, m.mask).dim() != dim) format_error("SVM input dimension does not match the mask");
    return m;
  } catch (const Json::exception& e) {
    format_error(std::string("model: ") + e.what());
  }
}

void write_model(std::ostream& out, const IntentModel& model) {
  Json j = bayes_json(model.bayes);
  const TrainedSVM& svm = model.svm;
  Json s;
  s["kernel"] = "gaussian";
  s["kernel_form"] = kKernelForm;
  s["mask"] = mask_name(model.mask);
  s["input"] = uses_posterior(model.mask) ? "posterior_vector" : "observation";
  s["input_dim"] = svm.dim();
  s["sigma"] = svm.sigma;
  s["c"] = svm.c;
  s["bias"] = svm.bias;
  s["scaler"] = {{"mean", vector_json(svm.scaler.mean)}, {"scale", vector_json(svm.scaler.scale)}};
  Json svs = Json::array();
  for (Eigen::Index r = 0; r < svm.support_vectors.rows(); ++r) {
    svs.push_back(vector_json(svm.support_vectors.row(r).transpose()));
  }
  s["support_vectors"] = std::move(svs);
  s["coefficients"] = vector_json(svm.coefficients);
  s["diagnostics"] = {{"iterations", svm.diagnostics.iterations},
                      {"kkt_gap", number(svm.diagnostics.kkt_gap)},
                      {"dual_objective", number(svm.diagnostics.dual_objective)}};
  j["svm"] = std::move(s);
  out << j.dump(2) << '\n';
}

void write_metrics_csv(std::ostream& out, std::span<const AblationRow> rows) {
  out << "schema_version,mask,accuracy,f1,auc,mean_us,p99_us,max_us,tp,fp,fn,tn,support_vectors\n";
  out << std::setprecision(17);
  for (const AblationRow& r : rows) {
    const Metrics& m = r.metrics;
    out << kSchemaVersion << ',' << mask_name(r.mask) << ',' << m.accuracy << ',' << m.f1 << ',';
    if (m.auc) out << *m.auc;
    out << ',' << m.latency.mean_us << ',' << m.latency.p99_us << ',' << m.latency.max_us << ',' << m.counts.tp
        << ',' << m.counts.fp << ',' << m.counts.fn << ',' << m.counts.tn << ',' << r.support_vectors << '\n';
  }
}

void write_replay_csv(std::ostream& out, const ReplayReport& report) {
  out << "schema_version,policy,selections,correct_selections,error_rate,trials,trials_selected,mean_ttc_ms,"
         "mean_latency_us,p99_latency_us\n";
  out << std::setprecision(17);
  for (const PolicyReport& r : report.policies) {
    std::size_t hit = 0;
    double ttc_sum = 0;
    for (const auto& t : r.time_to_selection_ms) {
      if (!t) continue;
      ++hit;
      ttc_sum += *t;
    }
    out << kSchemaVersion << ',' << to_string(r.policy) << ',' << r.selections << ',' << r.correct_selections << ',';
    if (r.error_rate) out << *r.error_rate;
    out << ',' << r.time_to_selection_ms.size() << ',' << hit << ',';
    if (hit > 0) out << ttc_sum / static_cast<double>(hit);
    out << ',' << r.latency.mean_us << ',' << r.latency.p99_us << '\n';
  }
}

void write_replay_json(std::ostream& out, const ReplayReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json policies = Json::array();
  for (const PolicyReport& r : report.policies) {
    Json p;
    p["policy"] = to_string(r.policy);
    p["selections"] = r.selections;
    p["correct_selections"] = r.correct_selections;
    p["error_rate"] = optional_number(r.error_rate);
    Json ttc = Json::array();
    for (const auto& t : r.time_to_selection_ms) ttc.push_back(optional_number(t));
    p["time_to_selection_ms"] = std::move(ttc);
    p["latency_us"] = {{"mean", r.latency.mean_us}, {"p99", r.latency.p99_us}, {"max", r.latency.max_us}};
    Json clicks = Json::array();
    for (const Click& c : r.clicks) {
      clicks.push_back({{"t_ms", c.t_ms}, {"object", c.object}, {"trial", c.trial}, {"correct", c.correct}});
    }
    p["clicks"] = std::move(clicks);
    policies.push_back(std::move(p));
  }
  j["policies"] = std::move(policies);
  out << j.dump(2) << '\n';
}

std::filesystem::path resolve_model_path(const std::filesystem::path& path) {
  if (path.is_absolute() || std::filesystem::exists(path)) return path;
  if (const char* dir = std::getenv(kModelDirEnv); dir && *dir) {
    const std::filesystem::path candidate = std::filesystem::path(dir) / path;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return path;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) format_error("cannot write " + path.string());
  out << contents;
  if (!out) format_error("write failed for " + path.string());
}

}  // namespace gazeintent::io
