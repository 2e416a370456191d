// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_SCENARIO_HPP
#define ECHOPOST_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "echopost/audio.hpp"
#include "echopost/synth.hpp"

namespace echopost {

struct AirSpec {
  double t60_s = 0.3;
  std::size_t direct_delay = 32;
  std::size_t length = 4096;
};

struct TailChange {
  double time_s = 10.0;
  double amount = 0.5;
  double start_fraction = 0.25;
};

enum class SourceKind { speech, white_noise, silence };

SourceKind source_kind_from_string(const std::string& name);
const char* to_string(SourceKind k);

/// Everything that defines the synthetic signals of one run. All randomness
/// derives from the seed.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  double duration_s = 20.0;
  int sample_rate = 16000;

  SourceKind far_end = SourceKind::speech;
  SourceKind near_end = SourceKind::silence;

  AirSpec echo_air;
  bool echo_air_sparse = false;    // sparse identification path instead of decay model
  std::size_t sparse_active_taps = 8;
  // Overall loudspeaker-to-microphone coupling; the synthetic paths carry a
  // unit direct tap, so this sets the echo return loss.
  double echo_path_gain = 0.1;
  std::optional<AirSpec> near_air; // absent = anechoic near end

  std::optional<double> snr_db;    // absent = no background noise

  NonlinearityModel nonlinearity = NonlinearityModel::none;
  double nonlinearity_level = 1.0;
  std::optional<double> sner_db;   // when set, level is calibrated to approach it

  std::optional<TailChange> tail_change;
};

/// Ground-truth decomposition of one synthesized scene. All signals share
/// the configured length; mic = near_early + near_late + echo + noise.
struct ScenarioSignals {
  AudioSignal far_src;       // echo canceller reference
  AudioSignal loudspeaker;   // far_src after the nonlinearity
  AudioSignal echo;          // loudspeaker through the (possibly changing) echo path
  AudioSignal near_src;
  AudioSignal near_early;
  AudioSignal near_late;
  AudioSignal noise;
  AudioSignal mic;

  ImpulseResponse echo_air;        // initial path
  ImpulseResponse echo_air_after;  // post tail-change path (equals echo_air if none)
  std::optional<std::size_t> tail_change_sample;

  double achieved_sner_db = 0.0;   // NaN when no nonlinearity
};

/// early_split_taps: taps after the near-path direct peak counted as early
/// reflections when splitting the reverberant near signal.
ScenarioSignals synthesize_scenario(const ScenarioConfig& config,
                                    std::size_t early_split_taps = 768);

/// 10 log10(P_linear_echo / P(nonlinear_echo - linear_echo)) for a given
/// distortion level.
double measure_sner_db(const AudioSignal& far_src, const ImpulseResponse& air,
                       NonlinearityModel model, double level);

/// Bisects the distortion level to approach the requested ratio.
double calibrate_nonlinearity_level(const AudioSignal& far_src, const ImpulseResponse& air,
                                    NonlinearityModel model, double target_sner_db);

}  // namespace echopost

#endif  // ECHOPOST_SCENARIO_HPP
