// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace echopost {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + " is not key=value: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key on config line " + std::to_string(line_no));
    kv.set(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, false};
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> KeyValueConfig::get_string(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  it->second.consumed = true;
  return it->second.value;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) {
  return get_string(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
  return get_double_opt(key).value_or(fallback);
}

std::optional<double> KeyValueConfig::get_double_opt(const std::string& key) {
  auto raw = get_string(key);
  if (!raw.has_value()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("value of '" + key + "' is not a number: " + *raw);
  }
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) {
  auto raw = get_string(key);
  if (!raw.has_value()) return fallback;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("value of '" + key + "' is not an integer: " + *raw);
  }
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) {
  auto raw = get_string(key);
  if (!raw.has_value()) return fallback;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("value of '" + key + "' is not an unsigned integer: " + *raw);
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
  auto raw = get_string(key);
  if (!raw.has_value()) return fallback;
  std::string v = *raw;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("value of '" + key + "' is not a boolean: " + *raw);
}

std::vector<std::string> KeyValueConfig::unconsumed_keys() const {
  std::vector<std::string> keys;
  for (const auto& [key, entry] : entries_) {
    if (!entry.consumed) keys.push_back(key);
  }
  return keys;
}

void reject_unknown_keys(const KeyValueConfig& kv) {
  const auto keys = kv.unconsumed_keys();
  if (keys.empty()) return;
  std::string msg = "unknown config keys:";
  for (const auto& k : keys) msg += " " + k;
  throw ConfigError(msg);
}

namespace {

AirSpec parse_air(KeyValueConfig& kv, const std::string& prefix, const AirSpec& defaults) {
  AirSpec air = defaults;
  air.t60_s = kv.get_double(prefix + ".t60", air.t60_s);
  air.direct_delay = static_cast<std::size_t>(
      kv.get_uint(prefix + ".direct_delay", air.direct_delay));
  air.length = static_cast<std::size_t>(kv.get_uint(prefix + ".length", air.length));
  return air;
}

ScenarioConfig parse_scenario(KeyValueConfig& kv) {
  ScenarioConfig sc;
  sc.seed = kv.get_uint("scenario.seed", sc.seed);
  sc.duration_s = kv.get_double("scenario.duration_s", sc.duration_s);
  sc.sample_rate = static_cast<int>(kv.get_int("scenario.sample_rate", sc.sample_rate));
  sc.far_end = source_kind_from_string(kv.get_string("scenario.far_end", to_string(sc.far_end)));
  sc.near_end =
      source_kind_from_string(kv.get_string("scenario.near_end", to_string(sc.near_end)));
  sc.echo_air = parse_air(kv, "scenario.echo_air", sc.echo_air);
  sc.echo_air_sparse = kv.get_bool("scenario.echo_air.sparse", sc.echo_air_sparse);
  sc.sparse_active_taps = static_cast<std::size_t>(
      kv.get_uint("scenario.echo_air.active_taps", sc.sparse_active_taps));
  sc.echo_path_gain = kv.get_double("scenario.echo_path_gain", sc.echo_path_gain);
  if (kv.get_bool("scenario.near_air.enabled", false)) {
    sc.near_air = parse_air(kv, "scenario.near_air", AirSpec{0.5, 32, 8192});
  }
  sc.snr_db = kv.get_double_opt("scenario.snr_db");
  const std::string nl = kv.get_string("scenario.nonlinearity", "none");
  if (nl == "none") sc.nonlinearity = NonlinearityModel::none;
  else if (nl == "hard_clip") sc.nonlinearity = NonlinearityModel::hard_clip;
  else if (nl == "soft_saturation") sc.nonlinearity = NonlinearityModel::soft_saturation;
  else throw ConfigError("unknown nonlinearity: " + nl);
  sc.nonlinearity_level = kv.get_double("scenario.nonlinearity_level", sc.nonlinearity_level);
  sc.sner_db = kv.get_double_opt("scenario.sner_db");
  if (auto t = kv.get_double_opt("scenario.tail_change.time_s")) {
    TailChange tc;
    tc.time_s = *t;
    tc.amount = kv.get_double("scenario.tail_change.amount", tc.amount);
    tc.start_fraction = kv.get_double("scenario.tail_change.start_fraction", tc.start_fraction);
    sc.tail_change = tc;
  }
  return sc;
}

AdaptiveFilterConfig parse_aec(KeyValueConfig& kv) {
  AdaptiveFilterConfig fc;
  fc.variant = filter_variant_from_string(kv.get_string("aec.variant", to_string(fc.variant)));
  fc.taps = static_cast<std::size_t>(kv.get_uint("aec.taps", fc.taps));
  fc.mu = kv.get_double("aec.mu", fc.mu);
  fc.delta = kv.get_double("aec.delta", fc.delta);
  fc.rho = kv.get_double("aec.rho", fc.rho);
  fc.delta_p = kv.get_double("aec.delta_p", fc.delta_p);
  fc.mu_law = kv.get_double("aec.mu_law", fc.mu_law);
  fc.alpha = kv.get_double("aec.alpha", fc.alpha);
  fc.apa_order = static_cast<int>(kv.get_int("aec.apa_order", fc.apa_order));
  fc.apa_delta = kv.get_double("aec.apa_delta", fc.apa_delta);
  fc.lms_power_norm = kv.get_double("aec.lms_power_norm", fc.lms_power_norm);
  fc.fblms_power_smooth = kv.get_double("aec.fblms_power_smooth", fc.fblms_power_smooth);
  fc.fblms_delta = kv.get_double("aec.fblms_delta", fc.fblms_delta);
  return fc;
}

}  // namespace

PipelineConfig parse_pipeline_config(KeyValueConfig& kv) {
  PipelineConfig c;
  c.scenario = parse_scenario(kv);

  c.stft.frame_len = static_cast<std::size_t>(kv.get_uint("stft.frame_len", c.stft.frame_len));
  c.stft.hop = static_cast<std::size_t>(kv.get_uint("stft.hop", c.stft.hop));
  c.stft.fft_len = static_cast<std::size_t>(kv.get_uint("stft.fft_len", c.stft.fft_len));

  c.aec_enabled = kv.get_bool("aec.enabled", c.aec_enabled);
  c.aec = parse_aec(kv);

  c.dtd_enabled = kv.get_bool("dtd.enabled", c.dtd_enabled);
  c.dtd.threshold = kv.get_double("dtd.threshold", c.dtd.threshold);
  c.dtd.window = static_cast<std::size_t>(kv.get_uint("dtd.window", c.dtd.window));
  c.dtd.hangover = static_cast<int>(kv.get_int("dtd.hangover", c.dtd.hangover));

  c.postfilter_enabled = kv.get_bool("postfilter.enabled", c.postfilter_enabled);
  c.postfilter.beta = kv.get_double("postfilter.beta", c.postfilter.beta);
  if (auto v = kv.get_double_opt("postfilter.xi_min_db")) {
    c.postfilter.xi_min = db_to_linear_power(*v);
  }
  if (auto v = kv.get_double_opt("postfilter.g_min_db")) {
    c.postfilter.g_min = db_to_linear_power(*v);
  }
  c.postfilter.q_absent = kv.get_double("postfilter.q_absent", c.postfilter.q_absent);
  if (auto stages = kv.get_string("postfilter.stages")) {
    c.stages = stage_mask_from_string(*stages);
  }

  c.t60_fallback_s = kv.get_double("reverb.t60_fallback_s", c.t60_fallback_s);
  c.t60_override_s = kv.get_double("reverb.t60_override_s", c.t60_override_s);
  c.rs_overestimate = kv.get_double("reverb.rs_overestimate", c.rs_overestimate);
  c.w0_per_bin = kv.get_bool("reverb.w0_per_bin", c.w0_per_bin);
  c.early_late_frames = static_cast<int>(kv.get_int("reverb.early_late_frames",
                                                    c.early_late_frames));
  c.reverb_smoothing = kv.get_double("reverb.smoothing", c.reverb_smoothing);
  c.dpc_factor = kv.get_double("reverb.dpc_factor", c.dpc_factor);

  c.noise.alpha = kv.get_double("noise.alpha", c.noise.alpha);
  c.noise.init_frames = static_cast<int>(kv.get_int("noise.init_frames", c.noise.init_frames));
  c.noise.presence_freeze = kv.get_double("noise.presence_freeze", c.noise.presence_freeze);

  c.segmental.frame_s = kv.get_double("metrics.segmental_frame_s", c.segmental.frame_s);
  c.segmental.clamp_min_db = kv.get_double("metrics.clamp_min_db", c.segmental.clamp_min_db);
  c.segmental.clamp_max_db = kv.get_double("metrics.clamp_max_db", c.segmental.clamp_max_db);
  c.segmental.activity_threshold_db =
      kv.get_double("metrics.activity_threshold_db", c.segmental.activity_threshold_db);
  c.erle_window_s = kv.get_double("metrics.erle_window_s", c.erle_window_s);

  c.outputs.processed_wav = kv.get_string("outputs.processed_wav", "");
  c.outputs.residual_wav = kv.get_string("outputs.residual_wav", "");
  c.outputs.metrics_csv = kv.get_string("outputs.metrics_csv", "");
  c.outputs.trace_csv = kv.get_string("outputs.trace_csv", "");
  const std::string enc = kv.get_string("outputs.wav_encoding", "float32");
  if (enc == "float32") c.outputs.wav_encoding = WavEncoding::float32;
  else if (enc == "pcm16") c.outputs.wav_encoding = WavEncoding::pcm16;
  else throw ConfigError("unknown wav encoding: " + enc);

  return c;
}

BenchSuiteConfig parse_bench_config(KeyValueConfig& kv) {
  BenchSuiteConfig c;
  const std::string variants = kv.get_string(
      "bench.variants", "lms,nlms,fblms,pnlms,mpnlms,ipnlms,apa");
  std::stringstream vs(variants);
  std::string token;
  while (std::getline(vs, token, ',')) {
    token = trim(token);
    if (!token.empty()) c.variants.push_back(filter_variant_from_string(token));
  }
  std::string envs = kv.get_string("bench.environments", "");
  if (envs.empty()) {
    c.environments = bench_environment_names();
  } else {
    std::stringstream es(envs);
    while (std::getline(es, token, ',')) {
      token = trim(token);
      if (!token.empty()) c.environments.push_back(token);
    }
  }
  c.seeds = static_cast<int>(kv.get_int("bench.seeds", c.seeds));
  c.base_seed = kv.get_uint("bench.base_seed", c.base_seed);
  c.duration_s = kv.get_double("bench.duration_s", c.duration_s);
  c.taps = static_cast<std::size_t>(kv.get_uint("bench.taps", c.taps));
  c.mu = kv.get_double("bench.mu", c.mu);
  c.threads = static_cast<int>(kv.get_int("bench.threads", c.threads));
  c.csv_path = kv.get_string("bench.csv", "");
  return c;
}

}  // namespace echopost
