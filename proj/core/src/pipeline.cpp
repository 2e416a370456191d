// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "echopost/csv.hpp"
#include "echopost/fft.hpp"

namespace echopost {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMisalignProbeStep = 256;

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Applies a recorded gain matrix to a signal's spectrogram and resynthesizes.
AudioSignal apply_gain_matrix(const AudioSignal& signal, const FrameParams& params,
                              const std::vector<double>& gains, std::size_t n_frames,
                              std::size_t bins) {
  Spectrogram spec = stft(signal, params);
  const std::size_t frames = std::min(spec.n_frames, n_frames);
  for (std::size_t l = 0; l < frames; ++l) {
    const double* g = gains.data() + l * bins;
    auto* row = spec.frame(l);
    for (std::size_t k = 0; k < bins; ++k) row[k] *= g[k];
  }
  return istft(spec);
}

struct MisalignmentTrace {
  std::vector<double> values_db;
  std::vector<double> times_s;
};

double final_quarter_mean(const std::vector<double>& xs) {
  if (xs.empty()) return kNan;
  const std::size_t from = (xs.size() * 3) / 4;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = from; i < xs.size(); ++i) {
    if (std::isnan(xs[i])) continue;
    acc += xs[i];
    ++count;
  }
  return count ? acc / static_cast<double>(count) : kNan;
}

}  // namespace

StageMask stage_mask_from_string(const std::string& csv_list) {
  StageMask mask{false, false, false, false};
  std::string token;
  std::stringstream ss(csv_list);
  while (std::getline(ss, token, ',')) {
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    token = lowercase(token);
    if (token.empty() || token == "none") continue;
    if (token == "ns") mask.ns = true;
    else if (token == "rs") mask.rs = true;
    else if (token == "revs") mask.revs = true;
    else if (token == "dpc") mask.dpc = true;
    else if (token == "all") mask = {true, true, true, true};
    else throw ConfigError("unknown postfilter stage: " + token);
  }
  return mask;
}

std::string to_string(const StageMask& mask) {
  std::string out;
  auto add = [&out](const char* name) {
    if (!out.empty()) out += ',';
    out += name;
  };
  if (mask.ns) add("ns");
  if (mask.rs) add("rs");
  if (mask.revs) add("revs");
  if (mask.dpc) add("dpc");
  return out.empty() ? "none" : out;
}

const char* to_string(T60Source s) {
  switch (s) {
    case T60Source::estimated: return "estimated";
    case T60Source::override_config: return "override";
    case T60Source::fallback: return "fallback";
    case T60Source::none: return "none";
  }
  return "none";
}

void PipelineConfig::validate() const {
  if (scenario.duration_s <= 0.0) throw ConfigError("scenario.duration_s must be positive");
  if (scenario.sample_rate <= 0) throw ConfigError("scenario.sample_rate must be positive");
  if ((stages.rs || stages.revs) && postfilter_enabled && !aec_enabled) {
    throw ConfigError("rs/revs stages require the echo canceller");
  }
  if (stft.hop == 0 || stft.frame_len == 0 || stft.fft_len < stft.frame_len) {
    throw ConfigError("bad stft frame parameters");
  }
  if (rs_overestimate < 0.0) throw ConfigError("rs_overestimate must be >= 0");
  if (early_late_frames < 0) throw ConfigError("early_late_frames must be >= 0");
  const double total_samples = scenario.duration_s * scenario.sample_rate;
  if (total_samples < static_cast<double>(stft.frame_len)) {
    throw ConfigError("scenario shorter than one stft frame");
  }
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();

  const int fs = config.scenario.sample_rate;
  const std::size_t early_split_taps =
      static_cast<std::size_t>(config.early_late_frames) * config.stft.hop;
  ScenarioSignals scene = synthesize_scenario(config.scenario, early_split_taps);
  const std::size_t n = scene.mic.samples.size();

  PipelineResult result;
  result.achieved_sner_db = scene.achieved_sner_db;

  // --- Echo cancellation with double-talk gating ---------------------------
  result.echo_estimate.sample_rate = fs;
  result.echo_estimate.samples.assign(n, 0.0);
  result.aec_error = scene.mic;

  MisalignmentTrace mis_trace;
  std::optional<AdaptiveFilter> filter;

  if (config.aec_enabled) {
    filter.emplace(config.aec);
    GeigelDetector dtd(config.dtd);
    const std::size_t L = filter->length();

    auto probe = [&](std::size_t sample_idx) {
      if (sample_idx % kMisalignProbeStep != 0) return;
      const ImpulseResponse& truth =
          (scene.tail_change_sample.has_value() && sample_idx >= *scene.tail_change_sample)
              ? scene.echo_air_after
              : scene.echo_air;
      mis_trace.values_db.push_back(misalignment_db(*filter, truth));
      mis_trace.times_s.push_back(static_cast<double>(sample_idx) / fs);
    };

    if (config.aec.variant == FilterVariant::fblms) {
      std::size_t pos = 0;
      std::vector<double> echo_blk(L), err_blk(L);
      while (pos + L <= n) {
        bool any_dt = false;
        if (config.dtd_enabled) {
          for (std::size_t i = pos; i < pos + L; ++i) {
            any_dt |= dtd.update(scene.far_src.samples[i], scene.mic.samples[i]);
          }
        }
        filter->set_adaptation(!any_dt);
        filter->process_block({scene.far_src.samples.data() + pos, L},
                              {scene.mic.samples.data() + pos, L}, echo_blk, err_blk);
        std::copy(echo_blk.begin(), echo_blk.end(), result.echo_estimate.samples.begin() + pos);
        std::copy(err_blk.begin(), err_blk.end(), result.aec_error.samples.begin() + pos);
        probe(pos);
        pos += L;
      }
      // Trailing partial block: frozen weights, direct filtering.
      if (pos < n) {
        const auto w = filter->weights();
        for (std::size_t i = pos; i < n; ++i) {
          double acc = 0.0;
          const std::size_t mmax = std::min(L - 1, i);
          for (std::size_t m = 0; m <= mmax; ++m) acc += w[m] * scene.far_src.samples[i - m];
          result.echo_estimate.samples[i] = acc;
          result.aec_error.samples[i] = scene.mic.samples[i] - acc;
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        bool dt = false;
        if (config.dtd_enabled) dt = dtd.update(scene.far_src.samples[i], scene.mic.samples[i]);
        filter->set_adaptation(!dt);
        const auto r = filter->process_sample(scene.far_src.samples[i], scene.mic.samples[i]);
        result.echo_estimate.samples[i] = r.echo_estimate;
        result.aec_error.samples[i] = r.error;
        probe(i);
      }
    }
    result.aec_status = filter->status();
  }

  // Ground-truth residual echo at the canceller output.
  AudioSignal residual_echo;
  residual_echo.sample_rate = fs;
  residual_echo.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    residual_echo.samples[i] = scene.echo.samples[i] - result.echo_estimate.samples[i];
  }

  // --- Reverberation model from the identified path -------------------------
  std::optional<ReverbModel> model;
  result.t60_source = T60Source::none;
  ImpulseResponse estimated_path;
  if (config.aec_enabled && filter.has_value()) {
    estimated_path.taps = filter->weights();
    estimated_path.sample_rate = fs;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < estimated_path.taps.size(); ++i) {
      if (std::abs(estimated_path.taps[i]) > std::abs(estimated_path.taps[peak])) peak = i;
    }
    estimated_path.direct_delay = peak;
  }

  if (config.t60_override_s > 0.0) {
    model = make_reverb_model(config.t60_override_s, config.stft.hop, fs);
    result.t60_source = T60Source::override_config;
  } else if (config.aec_enabled) {
    if (auto est = estimate_t60(estimated_path, config.stft.hop, fs)) {
      model = est->model;
      result.t60_source = T60Source::estimated;
    }
  }
  if (!model.has_value() && config.t60_fallback_s > 0.0) {
    model = make_reverb_model(config.t60_fallback_s, config.stft.hop, fs);
    result.t60_source = T60Source::fallback;
  }
  result.t60_used_s = model.has_value() ? model->t60_s : 0.0;

  // --- Postfilter ------------------------------------------------------------
  const bool any_stage = config.stages.ns || config.stages.rs || config.stages.revs;
  const bool run_postfilter = config.postfilter_enabled;

  std::vector<double> gains;  // n_frames x bins, only when the postfilter ran
  std::size_t pf_frames = 0;
  const std::size_t bins = config.stft.bins();

  if (run_postfilter) {
    Spectrogram err_spec = stft(result.aec_error, config.stft);
    pf_frames = err_spec.n_frames;
    gains.assign(pf_frames * bins, 1.0);

    const bool rs_active = config.stages.rs && model.has_value() && config.aec_enabled;
    const bool revs_active = config.stages.revs && model.has_value() && config.aec_enabled;

    std::optional<Spectrogram> echo_spec;
    std::vector<double> w0_bins;
    double w0_scalar = 0.0;
    std::optional<LateEchoEstimator> late_echo;
    std::optional<LateReverbEstimator> late_reverb;
    if (rs_active) {
      echo_spec = stft(result.echo_estimate, config.stft);
      w0_scalar = estimate_tail_power(estimated_path, *model) * config.rs_overestimate;
      late_echo.emplace(*model, bins);
      if (config.w0_per_bin) {
        // Spectral shape of the path tail, normalized so the bin mean stays
        // at the scalar estimate.
        const std::size_t L = estimated_path.taps.size();
        const std::size_t quarter = std::max<std::size_t>(L / 4, 1);
        std::vector<double> tail_section(estimated_path.taps.end() - static_cast<std::ptrdiff_t>(quarter),
                                         estimated_path.taps.end());
        auto shape = fft::rfft(tail_section, config.stft.fft_len);
        w0_bins.resize(bins);
        double mean = 0.0;
        for (std::size_t k = 0; k < bins; ++k) {
          w0_bins[k] = std::norm(shape[k]);
          mean += w0_bins[k];
        }
        mean /= static_cast<double>(bins);
        const double scale = mean > 0.0 ? w0_scalar / mean : 0.0;
        for (auto& v : w0_bins) v *= scale;
      }
    }
    if (revs_active) {
      late_reverb.emplace(*model, bins, config.early_late_frames, config.reverb_smoothing,
                          config.stages.dpc ? config.dpc_factor : 1.0);
    }

    NoiseTracker noise_tracker(config.noise, bins);
    Postfilter postfilter(config.postfilter, bins);
    InterferenceEstimates estimates;
    estimates.resize(bins);

    std::vector<double> err_power(bins), echo_power(bins), prev_presence;
    for (std::size_t l = 0; l < pf_frames; ++l) {
      frame_power(err_spec, l, err_power);

      if (config.stages.ns) {
        noise_tracker.update(err_power, prev_presence);
        std::copy(noise_tracker.lambda().begin(), noise_tracker.lambda().end(),
                  estimates.lambda_noise.begin());
      }
      if (rs_active) {
        frame_power(*echo_spec, l, echo_power);
        if (config.w0_per_bin) {
          late_echo->update(echo_power, w0_bins);
        } else {
          late_echo->update(echo_power, w0_scalar);
        }
        std::copy(late_echo->lambda().begin(), late_echo->lambda().end(),
                  estimates.lambda_echo_late.begin());
      }
      if (revs_active) {
        late_reverb->update(err_power);
        std::copy(late_reverb->lambda().begin(), late_reverb->lambda().end(),
                  estimates.lambda_rev_late.begin());
      }
      estimates.accumulate_total();

      std::span<double> gain_row(gains.data() + l * bins, bins);
      postfilter.process_frame({err_spec.frame(l), bins}, estimates.lambda_total, gain_row);
      if (prev_presence.empty()) prev_presence.resize(bins);
      std::copy(postfilter.last_presence().begin(), postfilter.last_presence().end(),
                prev_presence.begin());
    }

    result.output = istft(err_spec);
    result.output_reference_part =
        apply_gain_matrix(scene.near_early, config.stft, gains, pf_frames, bins);
    result.output_echo_residual =
        apply_gain_matrix(residual_echo, config.stft, gains, pf_frames, bins);
  } else {
    result.output = result.aec_error;
    result.output_reference_part = scene.near_early;
    result.output_echo_residual = residual_echo;
  }
  (void)any_stage;

  result.output_interference.sample_rate = fs;
  result.output_interference.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.output_interference.samples[i] =
        result.output.samples[i] - result.output_reference_part.samples[i];
  }

  // --- Metrics ----------------------------------------------------------------
  MetricsReport& report = result.metrics;
  report.erle_window_s = config.erle_window_s;
  report.misalignment_probe_s = static_cast<double>(kMisalignProbeStep) / fs;

  const ErleResult erle_aec = erle(scene.echo, residual_echo, config.erle_window_s);
  const ErleResult erle_out = erle(scene.echo, result.output_echo_residual, config.erle_window_s);
  report.aec_mean_erle_db = erle_aec.mean_db;
  report.mean_erle_db = erle_out.mean_db;
  report.erle_trace_db = erle_out.trace_db;

  report.misalignment_trace_db = mis_trace.values_db;
  report.ss_misalignment_db = final_quarter_mean(mis_trace.values_db);
  report.t20_s = kNan;
  for (std::size_t i = 0; i < mis_trace.values_db.size(); ++i) {
    if (mis_trace.values_db[i] <= -20.0) {
      report.t20_s = mis_trace.times_s[i];
      break;
    }
  }

  const bool near_active = signal_power(scene.near_early.samples) > 0.0;
  report.seg_snr_db = kNan;
  report.seg_sir_db = kNan;
  report.lsd_db = kNan;
  if (near_active) {
    try {
      report.seg_snr_db = segmental_snr(scene.near_early, result.output, config.segmental);
      report.seg_sir_db = segmental_sir(scene.near_early, result.output,
                                        result.output_interference, config.segmental);
      report.lsd_db = lsd(scene.near_early, result.output, config.stft);
    } catch (const std::exception&) {
      // metrics stay NaN when no frame qualifies
    }
  }

  // --- Outputs ----------------------------------------------------------------
  const OutputConfig& outs = config.outputs;
  if (!outs.processed_wav.empty()) write_wav(outs.processed_wav, result.output, outs.wav_encoding);
  if (!outs.residual_wav.empty()) write_wav(outs.residual_wav, result.aec_error, outs.wav_encoding);
  if (!outs.metrics_csv.empty()) {
    const std::vector<std::string> header = {
        "seed",          "variant",     "stages",       "aec_status",
        "mean_erle_db",  "aec_mean_erle_db", "t20_s",   "ss_misalign_db",
        "seg_snr_db",    "seg_sir_db",  "lsd_db",       "t60_used_s",
        "t60_source",    "sner_db"};
    std::vector<std::vector<std::string>> rows;
    rows.push_back({std::to_string(config.scenario.seed),
                    to_string(config.aec.variant),
                    config.postfilter_enabled ? to_string(config.stages) : std::string("off"),
                    result.aec_status == FilterStatus::ok ? "ok" : "diverged",
                    format_number(report.mean_erle_db),
                    format_number(report.aec_mean_erle_db),
                    format_number(report.t20_s),
                    format_number(report.ss_misalignment_db),
                    format_number(report.seg_snr_db),
                    format_number(report.seg_sir_db),
                    format_number(report.lsd_db),
                    format_number(result.t60_used_s),
                    to_string(result.t60_source),
                    format_number(result.achieved_sner_db)});
    write_csv(outs.metrics_csv, header, rows);
  }
  if (!outs.trace_csv.empty()) {
    const std::vector<std::string> header = {"window", "t_s", "erle_aec_db", "erle_out_db"};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t w = 0; w < erle_out.trace_db.size(); ++w) {
      rows.push_back({std::to_string(w),
                      format_number(static_cast<double>(w) * config.erle_window_s),
                      format_number(w < erle_aec.trace_db.size() ? erle_aec.trace_db[w] : kNan),
                      format_number(erle_out.trace_db[w])});
    }
    write_csv(outs.trace_csv, header, rows);
  }

  return result;
}

}  // namespace echopost
