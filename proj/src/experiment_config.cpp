#include <cmath>
#include <fstream>
#include <set>

#include "orient/errors.hpp"
#include "orient/experiment.hpp"

namespace orient {

namespace {

using json = nlohmann::json;

const std::set<std::string> kKnownKeys{
    "experiment", "seed",      "L",              "trials",     "M",         "repeats",
    "sigma",      "relative_sigma", "snr",       "truth_prior", "estimation_priors", "phantom",
    "template_phantom", "polar", "projected",    "geometry",   "assignments", "max_iters",
    "rel_tol",    "interpolation", "align_samples", "output"};

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

bool is_nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("field '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!is_nonnegative_integer(v)) fail(std::string("field '") + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!is_nonnegative_integer(v)) fail(std::string("field '") + key + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

RotationPrior prior_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "uniform") return RotationPrior::uniform();
    fail("prior '" + j.get<std::string>() + "' needs an object with kind and eta");
  }
  if (!j.is_object()) fail("prior must be an object");
  const auto kind = get<std::string>(j, "kind");
  if (kind == "uniform") return RotationPrior::uniform();
  if (kind == "isotropic_gaussian" || kind == "ig") {
    const double eta = get<double>(j, "eta");
    if (!(eta > 0.0) || !std::isfinite(eta)) fail("isotropic_gaussian eta must be positive");
    return RotationPrior::isotropic_gaussian(eta);
  }
  fail("unknown prior kind '" + kind + "'");
}

json prior_to_json(const RotationPrior& p) {
  if (p.kind == RotationPrior::Kind::Uniform) return {{"kind", "uniform"}};
  return {{"kind", "isotropic_gaussian"}, {"eta", p.eta}};
}

PhantomSpec phantom_from_json(const json& j, PhantomSpec spec) {
  if (!j.is_object()) fail("phantom must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "n" && key != "seed" && key != "path") fail("unknown phantom field '" + key + "'");
  }
  try {
    if (j.contains("kind")) spec.kind = parse_phantom_kind(get<std::string>(j, "kind"));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (j.contains("n")) spec.n = get_count(j, "n");
  if (j.contains("seed")) spec.seed = get_seed(j, "seed");
  if (j.contains("path")) spec.path = get<std::string>(j, "path");
  return spec;
}

nlohmann::ordered_json phantom_to_json(const PhantomSpec& p) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(p.kind);
  j["n"] = p.n;
  j["seed"] = p.seed;
  if (!p.path.empty()) j["path"] = p.path;
  return j;
}

std::vector<double> number_list(const json& j, const char* key) {
  const json& v = j.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const json& x : v) {
      if (!x.is_number()) fail(std::string("field '") + key + "' must hold numbers");
      out.push_back(x.get<double>());
    }
  } else {
    fail(std::string("field '") + key + "' must be a number or a list of numbers");
  }
  return out;
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "snr_sweep") return ExperimentKind::SnrSweep;
  if (s == "prior_mismatch") return ExperimentKind::PriorMismatch;
  if (s == "grid_sweep") return ExperimentKind::GridSweep;
  if (s == "recover2d") return ExperimentKind::Recover2d;
  if (s == "recover3d") return ExperimentKind::Recover3d;
  if (s == "einstein_noise") return ExperimentKind::EinsteinNoise;
  throw ConfigError("unknown experiment '" + s + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SnrSweep:
      return "snr_sweep";
    case ExperimentKind::PriorMismatch:
      return "prior_mismatch";
    case ExperimentKind::GridSweep:
      return "grid_sweep";
    case ExperimentKind::Recover2d:
      return "recover2d";
    case ExperimentKind::Recover3d:
      return "recover3d";
    case ExperimentKind::EinsteinNoise:
      return "einstein_noise";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (grid_sizes.empty()) fail("L must list at least one grid size");
  for (std::size_t l : grid_sizes) {
    if (l == 0) fail("grid sizes must be positive");
  }
  if (trials == 0) fail("trials must be positive");
  if (observations == 0) fail("M must be positive");
  if (repeats == 0) fail("repeats must be positive");
  if (noise_levels.empty()) fail("noise level list (sigma, relative_sigma or snr) must be nonempty");
  for (double s : noise_levels) {
    if (!std::isfinite(s)) fail("noise levels must be finite");
    if (noise_scale == NoiseScale::Snr ? !(s > 0.0) : !(s >= 0.0)) {
      fail(noise_scale == NoiseScale::Snr ? "snr values must be positive" : "sigma values must be nonnegative");
    }
  }
  if (truth_prior.kind == RotationPrior::Kind::IsotropicGaussian && !(truth_prior.eta > 0.0)) {
    fail("truth prior eta must be positive");
  }
  for (const PhantomSpec* p : {&phantom, &template_phantom}) {
    if (p->kind == PhantomKind::Loaded) {
      if (p->path.empty()) fail("loaded phantom needs a path");
    } else if (p->n < 8) {
      fail("phantom edge n must be at least 8");
    }
  }
  if (polar.d_radial == 0 || polar.l_angular == 0) fail("polar geometry needs positive d_radial and l_angular");
  if (assignments.empty()) fail("assignments must be nonempty");
  if (max_iters < 1) fail("max_iters must be at least 1");
  if (!(rel_tol > 0.0)) fail("rel_tol must be positive");
  if (align_samples == 0) fail("align_samples must be positive");
  if (output.empty()) fail("output path must be nonempty");

  switch (experiment) {
    case ExperimentKind::PriorMismatch:
      if (estimation_priors.empty()) fail("prior_mismatch needs at least one estimation prior");
      break;
    case ExperimentKind::GridSweep: {
      const std::set<std::size_t> distinct(grid_sizes.begin(), grid_sizes.end());
      if (distinct.size() < 4) fail("grid_sweep needs at least 4 distinct L values");
      break;
    }
    case ExperimentKind::Recover3d:
    case ExperimentKind::Recover2d:
    case ExperimentKind::EinsteinNoise:
      if (projected) fail("reconstruction experiments use the unprojected model");
      break;
    default:
      break;
  }
  if (experiment == ExperimentKind::Recover3d && phantom.kind != PhantomKind::Loaded &&
      template_phantom.kind != PhantomKind::Loaded && phantom.n != template_phantom.n) {
    fail("truth and template phantoms must share the edge length");
  }
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(experiment);
  j["seed"] = seed;
  j["L"] = grid_sizes;
  j["trials"] = trials;
  j["M"] = observations;
  j["repeats"] = repeats;
  const char* key = noise_scale == NoiseScale::Absolute ? "sigma"
                    : noise_scale == NoiseScale::Relative ? "relative_sigma"
                                                          : "snr";
  j[key] = noise_levels;
  j["truth_prior"] = prior_to_json(truth_prior);
  j["estimation_priors"] = nlohmann::ordered_json::array();
  for (const auto& p : estimation_priors) j["estimation_priors"].push_back(nlohmann::ordered_json(prior_to_json(p)));
  j["phantom"] = phantom_to_json(phantom);
  j["template_phantom"] = phantom_to_json(template_phantom);
  j["polar"] = {{"d_radial", polar.d_radial},
                {"l_angular", polar.l_angular},
                {"truth_seed", polar.truth_seed},
                {"template_seed", polar.template_seed}};
  j["projected"] = projected;
  j["geometry"] = polar_geometry ? "polar" : "volume";
  j["assignments"] = nlohmann::ordered_json::array();
  for (Assignment a : assignments) j["assignments"].push_back(to_string(a));
  j["max_iters"] = max_iters;
  j["rel_tol"] = rel_tol;
  j["interpolation"] = to_string(interpolation);
  j["align_samples"] = align_samples;
  j["output"] = output;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.count(key)) fail("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  if (!j.contains("experiment")) fail("config needs an 'experiment' field");
  c.experiment = parse_experiment_kind(get<std::string>(j, "experiment"));

  // Recovery and pure-noise runs default to the dissimilar phantom pair.
  if (c.experiment == ExperimentKind::Recover3d || c.experiment == ExperimentKind::EinsteinNoise) {
    c.phantom.kind = PhantomKind::GaussianBlobs;
    c.template_phantom.kind = PhantomKind::AsymmetricL;
  }

  if (j.contains("seed")) c.seed = get_seed(j, "seed");
  if (j.contains("L")) {
    c.grid_sizes.clear();
    const json& v = j.at("L");
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!is_nonnegative_integer(v[i])) fail("L entries must be positive integers");
        c.grid_sizes.push_back(v[i].get<std::size_t>());
      }
    } else {
      c.grid_sizes.push_back(get_count(j, "L"));
    }
  }
  if (j.contains("trials")) c.trials = get_count(j, "trials");
  if (j.contains("M")) c.observations = get_count(j, "M");
  if (j.contains("repeats")) c.repeats = get_count(j, "repeats");

  int noise_keys = 0;
  for (const auto& [key, scale] : {std::pair{"sigma", NoiseScale::Absolute},
                                   std::pair{"relative_sigma", NoiseScale::Relative},
                                   std::pair{"snr", NoiseScale::Snr}}) {
    if (!j.contains(key)) continue;
    ++noise_keys;
    c.noise_scale = scale;
    c.noise_levels = number_list(j, key);
  }
  if (noise_keys != 1) fail("exactly one of sigma, relative_sigma or snr must be given");

  if (j.contains("truth_prior")) c.truth_prior = prior_from_json(j.at("truth_prior"));
  if (j.contains("estimation_priors")) {
    const json& v = j.at("estimation_priors");
    if (!v.is_array()) fail("estimation_priors must be a list");
    for (const json& p : v) c.estimation_priors.push_back(prior_from_json(p));
  }
  if (j.contains("phantom")) c.phantom = phantom_from_json(j.at("phantom"), c.phantom);
  if (j.contains("template_phantom")) c.template_phantom = phantom_from_json(j.at("template_phantom"), c.template_phantom);
  if (j.contains("polar")) {
    const json& p = j.at("polar");
    if (!p.is_object()) fail("polar must be an object");
    for (const auto& [key, value] : p.items()) {
      if (key != "d_radial" && key != "l_angular" && key != "truth_seed" && key != "template_seed") {
        fail("unknown polar field '" + key + "'");
      }
    }
    if (p.contains("d_radial")) c.polar.d_radial = get_count(p, "d_radial");
    if (p.contains("l_angular")) c.polar.l_angular = get_count(p, "l_angular");
    if (p.contains("truth_seed")) c.polar.truth_seed = get_seed(p, "truth_seed");
    if (p.contains("template_seed")) c.polar.template_seed = get_seed(p, "template_seed");
  }
  if (j.contains("projected")) c.projected = get<bool>(j, "projected");
  if (j.contains("geometry")) {
    const auto g = get<std::string>(j, "geometry");
    if (g != "polar" && g != "volume") fail("geometry must be 'polar' or 'volume'");
    c.polar_geometry = g == "polar";
  }
  if (j.contains("assignments")) {
    const json& v = j.at("assignments");
    if (!v.is_array()) fail("assignments must be a list");
    c.assignments.clear();
    for (const json& a : v) {
      if (!a.is_string()) fail("assignments must be strings");
      try {
        c.assignments.push_back(parse_assignment(a.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    }
  }
  if (j.contains("max_iters")) {
    const json& v = j.at("max_iters");
    if (!v.is_number_integer()) fail("max_iters must be an integer");
    c.max_iters = v.get<int>();
  }
  if (j.contains("rel_tol")) c.rel_tol = get<double>(j, "rel_tol");
  if (j.contains("interpolation")) {
    try {
      c.interpolation = parse_interpolation(get<std::string>(j, "interpolation"));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (j.contains("align_samples")) c.align_samples = get_count(j, "align_samples");
  if (j.contains("output")) c.output = get<std::string>(j, "output");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const nlohmann::json& overrides) {
  std::ifstream is(path);
  if (!is) throw FileError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config '" + path.string() + "' must be a JSON object");
  j.merge_patch(overrides);
  return ExperimentConfig::from_json(j);
}

}  // namespace orient
