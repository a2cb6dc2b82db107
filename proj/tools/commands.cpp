/*
 * Copyright 2026 The evdet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evdet/compression.hpp"
#include "evdet/engine.hpp"
#include "evdet/evaluation.hpp"
#include "evdet/event_io.hpp"
#include "evdet/ingestion.hpp"
#include "evdet/synth.hpp"
#include "json.hpp"

namespace evdet::cli {
namespace {

using nlohmann::ordered_json;
using SystemClock = std::chrono::system_clock;

// Non-zero exit with a message for the caller to print.
struct Failure {
  int code;
  std::string message;
};

std::string iso_time(SystemClock::time_point t) {
  const std::time_t seconds = SystemClock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct EngineFlags {
  EngineConfig config;
  std::string algorithm = "deflate-raw";
  std::string overlap = "distinct";
  std::string stoplist_path;

  void attach(CLI::App* app) {
    app->add_option("--cluster-limit", config.cluster_limit, "Candidate clusters per tweet")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--tweet-limit", config.tweet_limit, "Recent tweets per cluster")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--distance-threshold", config.distance_threshold, "Max distance for joining a cluster")
        ->capture_default_str();
    app->add_option("--diversity-threshold", config.diversity_threshold,
                    "User diversity (bits) needed for an event")
        ->capture_default_str();
    app->add_option("--default-timeout", config.default_timeout,
                    "Expiry timeout (s) before enough gaps are seen")
        ->capture_default_str();
    app->add_option("--timeout-multiplier", config.timeout_multiplier,
                    "Scale applied to the mean inter-arrival gap")
        ->capture_default_str();
    app->add_option("--compression-level", config.compressor.level, "Compressor level")
        ->capture_default_str();
    app->add_option("--compressor", algorithm, "deflate-raw | gzip | lz-fast")->capture_default_str();
    app->add_option("--min-gap-samples", config.min_inter_arrival_samples,
                    "Gaps required before the mean gap drives expiry")
        ->capture_default_str();
    app->add_option("--allowed-disorder", config.allowed_disorder,
                    "Seconds a tweet may lag the stream clock")
        ->capture_default_str();
    app->add_option("--overlap", overlap, "Candidate overlap: distinct | frequency")
        ->capture_default_str();
    app->add_option("--threads", config.threads, "Workers for distance evaluation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--stoplist", stoplist_path, "Stoplist file (default: built-in)")
        ->check(CLI::ExistingFile);
  }

  // Throws ConfigError.
  void finish() {
    config.compressor.algorithm = parse_algorithm(algorithm);
    if (overlap == "distinct") {
      config.overlap = OverlapWeighting::kDistinctTokens;
    } else if (overlap == "frequency") {
      config.overlap = OverlapWeighting::kTokenFrequency;
    } else {
      throw ConfigError("--overlap must be 'distinct' or 'frequency'");
    }
    validate(config);
  }
};

ordered_json config_json(const EngineConfig& c) {
  return {{"cluster_limit", c.cluster_limit},
          {"tweet_limit", c.tweet_limit},
          {"distance_threshold", c.distance_threshold},
          {"diversity_threshold", c.diversity_threshold},
          {"compressor",
           {{"algorithm", std::string(to_string(c.compressor.algorithm))},
            {"level", c.compressor.level},
            {"deterministic", c.compressor.deterministic}}},
          {"min_inter_arrival_samples", c.min_inter_arrival_samples},
          {"default_timeout", c.default_timeout},
          {"timeout_multiplier", c.timeout_multiplier},
          {"allowed_disorder", c.allowed_disorder},
          {"overlap", c.overlap == OverlapWeighting::kDistinctTokens ? "distinct" : "frequency"},
          {"threads", c.threads},
          {"entropy_log_base", EngineConfig::kEntropyLogBase}};
}

ordered_json counters_json(const EngineCounters& c) {
  return {{"tweets_processed", c.tweets_processed},
          {"assigned", c.assigned},
          {"clusters_created", c.clusters_created},
          {"clusters_evicted", c.clusters_evicted},
          {"events_promoted", c.events_promoted},
          {"events_closed", c.events_closed},
          {"distance_calls", c.distance_calls},
          {"max_distance_calls_per_tweet", c.max_distance_calls_per_tweet},
          {"max_candidates_per_tweet", c.max_candidates_per_tweet},
          {"peak_active_clusters", c.peak_active_clusters}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content) || !out.flush()) {
    throw Failure{kIo, "cannot write '" + path + "'"};
  }
}

// Result of replaying a stream through the engine.
struct Replay {
  EngineCounters counters;
  ReaderStats reader;
  std::uint64_t out_of_order = 0;
  std::vector<std::string> errors;
  double wall_seconds = 0.0;
  std::optional<Timestamp> first_ts;
  Timestamp last_ts = 0;
};

Replay replay(std::istream& in, const EngineFlags& flags, EventSink* sink) {
  Stoplist custom;
  const Stoplist* stoplist = &Stoplist::builtin();
  if (!flags.stoplist_path.empty()) {
    custom = Stoplist::load(flags.stoplist_path);
    stoplist = &custom;
  }
  Engine engine(flags.config, sink);
  StreamReader reader(in, *stoplist);
  Replay result;
  const auto start = std::chrono::steady_clock::now();
  while (auto tweet = reader.next()) {
    try {
      engine.process(*tweet);
      if (!result.first_ts) result.first_ts = tweet->timestamp;
      result.last_ts = std::max(result.last_ts, tweet->timestamp);
    } catch (const OrderingError& e) {
      ++result.out_of_order;
      if (result.errors.size() < StreamReader::kMaxKeptErrors) {
        result.errors.push_back("line " + std::to_string(reader.stats().lines) + ": " + e.what());
      }
    }
  }
  engine.finalize();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.counters = engine.counters();
  result.reader = reader.stats();
  std::vector<std::string> parse_errors;
  for (const auto& e : reader.errors()) parse_errors.emplace_back(e.what());
  parse_errors.insert(parse_errors.end(), result.errors.begin(), result.errors.end());
  result.errors = std::move(parse_errors);
  return result;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot read '" + path + "'"};
  return in;
}

int cmd_detect(const std::string& input, EngineFlags& flags, std::uint64_t seed,
               const std::string& events_out, std::string manifest_out, std::ostream& out,
               std::ostream& err) {
  flags.finish();
  auto in = open_input(input);
  if (manifest_out.empty()) manifest_out = events_out + ".manifest.json";

  std::ofstream events(events_out, std::ios::binary | std::ios::trunc);
  if (!events) throw Failure{kIo, "cannot write '" + events_out + "'"};
  JsonLinesSink sink(events);

  const auto started = SystemClock::now();
  const Replay run = replay(in, flags, &sink);
  const auto finished = SystemClock::now();
  events.flush();
  if (!events) throw Failure{kIo, "error writing '" + events_out + "'"};

  const std::uint64_t rejected = run.reader.rejected + run.out_of_order;
  ordered_json manifest;
  manifest["command"] = "detect";
  manifest["config"] = config_json(flags.config);
  manifest["inputs"] = {input};
  manifest["seed"] = seed;
  manifest["start_time"] = iso_time(started);
  manifest["end_time"] = iso_time(finished);
  manifest["wall_seconds"] = run.wall_seconds;
  manifest["counters"] = counters_json(run.counters);
  manifest["reader"] = {{"lines", run.reader.lines},
                        {"skipped", run.reader.skipped},
                        {"parsed", run.reader.parsed},
                        {"rejected", run.reader.rejected},
                        {"truncated", run.reader.truncated},
                        {"out_of_order", run.out_of_order}};
  manifest["errors"] = run.errors;
  manifest["outputs"] = {{"events", events_out}, {"manifest", manifest_out}};
  write_file(manifest_out, manifest.dump(2) + "\n");

  out << "tweets " << run.counters.tweets_processed << " events " << sink.closures()
      << " rejected " << rejected << " truncated " << run.reader.truncated << '\n';
  for (const auto& e : run.errors) err << "warning: " << e << '\n';
  return rejected > 0 ? kRejectedLines : kOk;
}

int cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed,
              const std::string& stream_out, const std::string& truth_out, std::ostream& out) {
  std::ifstream probe(spec_path);
  if (!probe) throw Failure{kIo, "cannot read '" + spec_path + "'"};
  SyntheticSpec spec = load_synthetic_spec(spec_path);
  if (seed) spec.seed = *seed;
  const SyntheticStream stream = generate_stream(spec);

  std::string records;
  for (const auto& r : stream.records) {
    records += serialize_record(r);
    records += '\n';
  }
  write_file(stream_out, records);
  std::ostringstream truth;
  write_ground_truth(truth, stream.truth);
  write_file(truth_out, truth.str());
  out << "records " << stream.records.size() << " events " << stream.truth.size() << " seed "
      << spec.seed << '\n';
  return kOk;
}

int cmd_eval(const std::string& events_path, const std::string& truth_path,
             const MatchPolicy& policy, const std::string& manifest_path,
             const std::string& report_out, const std::string& json_out, std::ostream& out,
             std::ostream& err) {
  validate(policy);
  auto events_in = open_input(events_path);
  auto truth_in = open_input(truth_path);
  const auto detected = read_detected_events(events_in);
  const auto truth = read_ground_truth(truth_in);

  DetectionReport report;
  report.match = match_events(detected, truth, policy);

  if (!manifest_path.empty()) {
    auto manifest_in = open_input(manifest_path);
    const auto manifest = nlohmann::json::parse(manifest_in, nullptr, false);
    if (manifest.is_discarded()) throw Failure{kUsage, "manifest is not valid JSON"};
    try {
      EngineCounters counters;
      const auto& c = manifest.at("counters");
      counters.tweets_processed = c.at("tweets_processed").get<std::uint64_t>();
      counters.distance_calls = c.at("distance_calls").get<std::uint64_t>();
      counters.max_distance_calls_per_tweet = c.at("max_distance_calls_per_tweet").get<std::uint64_t>();
      counters.peak_active_clusters = c.at("peak_active_clusters").get<std::uint64_t>();
      EngineConfig config;
      config.cluster_limit = manifest.at("config").at("cluster_limit").get<std::size_t>();
      config.tweet_limit = manifest.at("config").at("tweet_limit").get<std::size_t>();
      const double wall = manifest.at("wall_seconds").get<double>();
      if (counters.tweets_processed > 0 && wall > 0.0) {
        report.throughput = throughput_report(counters, wall, config);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Failure{kUsage, std::string("manifest is missing fields: ") + e.what()};
    }
  }

  std::set<std::string_view> truth_ids;
  for (const auto& t : truth) truth_ids.insert(t.members.begin(), t.members.end());
  bool any_shared = false;
  for (const auto& d : detected) {
    for (const auto& id : d.members) any_shared = any_shared || truth_ids.count(id) > 0;
  }
  if (!detected.empty() && !truth.empty() && !any_shared) {
    err << "warning: detected events share no member ids with the ground truth\n";
  }
  if (report.match.recall_degenerate) err << "warning: ground truth is empty; recall undefined\n";

  const std::string text = format_report_text(report);
  if (report_out.empty() || report_out == "-") {
    out << text;
  } else {
    write_file(report_out, text);
  }
  if (!json_out.empty()) write_file(json_out, format_report_json(report));
  return kOk;
}

std::vector<std::string> read_corpus(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::string> corpus;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    try {
      corpus.push_back(parse_stream_line(view).text);
    } catch (const ParseError&) {
      corpus.emplace_back(view);  // plain-text corpora are accepted as-is
    }
  }
  return corpus;
}

int cmd_bench(const std::string& corpus_path, const std::vector<std::string>& algorithms,
              int level, bool engine_mode, EngineFlags& flags, std::ostream& out) {
  if (!engine_mode) {
    std::vector<CompressorSpec> specs;
    for (const auto& name : algorithms) {
      CompressorSpec spec;
      spec.algorithm = parse_algorithm(name);
      spec.level = level;
      validate(spec);
      specs.push_back(spec);
    }
    const auto corpus = read_corpus(corpus_path);
    if (corpus.empty()) throw Failure{kUsage, "corpus '" + corpus_path + "' has no texts"};
    out << format_bench_report(compressor_benchmark(corpus, specs));
    return kOk;
  }

  flags.finish();
  auto in = open_input(corpus_path);
  const Replay run = replay(in, flags, nullptr);
  if (run.counters.tweets_processed == 0) throw Failure{kUsage, "stream has no valid tweets"};
  ThroughputReport report = throughput_report(run.counters, run.wall_seconds, flags.config);
  if (run.first_ts && run.last_ts > *run.first_ts) {
    report.collection_per_minute = static_cast<double>(run.counters.tweets_processed) /
                                   (static_cast<double>(run.last_ts - *run.first_ts) / 60.0);
  }
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "tweets total_processing_min collection_rate_per_min processing_rate_per_min\n";
  out << report.tweets << ' ';
  out.precision(4);
  out << report.minutes << ' ';
  out.precision(2);
  if (report.collection_per_minute) {
    out << *report.collection_per_minute;
  } else {
    out << "na";
  }
  out << ' ' << report.tweets_per_minute << '\n';
  out << "distance_calls_mean " << report.mean_distance_calls << '\n';
  out << "distance_calls_max " << report.max_distance_calls << '\n';
  out << "distance_call_bound " << report.distance_call_bound << '\n';
  out << "within_bound " << (report.within_bound ? "true" : "false") << '\n';
  out << "peak_active_clusters " << report.peak_active_clusters << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming event detection over short text messages"};
  app.require_subcommand(1);

  EngineFlags detect_flags;
  std::string detect_input;
  std::uint64_t detect_seed = 0;
  std::string events_out = "events.jsonl";
  std::string manifest_out;
  auto* detect = app.add_subcommand("detect", "Cluster a tweet stream and emit events");
  detect->add_option("input", detect_input, "Stream file (one JSON record per line)")
      ->required()
      ->check(CLI::ExistingFile);
  detect_flags.attach(detect);
  detect->add_option("--seed", detect_seed, "Recorded in the manifest")->capture_default_str();
  detect->add_option("--events-out", events_out, "Events file")->capture_default_str();
  detect->add_option("--manifest-out", manifest_out,
                     "Run manifest (default: <events-out>.manifest.json)");

  std::string spec_path;
  std::optional<std::uint64_t> synth_seed;
  std::string stream_out = "stream.jsonl";
  std::string truth_out = "truth.txt";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic stream with planted events");
  synth->add_option("spec", spec_path, "Synthetic spec (JSON)")->required();
  synth->add_option("--seed", synth_seed, "Override the spec's seed");
  synth->add_option("--out", stream_out, "Stream file")->capture_default_str();
  synth->add_option("--truth-out", truth_out, "Ground-truth file")->capture_default_str();

  std::string eval_events;
  std::string eval_truth;
  MatchPolicy policy;
  bool one_to_one = false;
  std::string eval_manifest;
  std::string report_out;
  std::string json_out;
  auto* eval = app.add_subcommand("eval", "Score detected events against ground truth");
  eval->add_option("events", eval_events, "Events file from detect")->required();
  eval->add_option("truth", eval_truth, "Ground-truth file")->required();
  eval->add_option("--jaccard-min", policy.jaccard_min, "Member-id Jaccard needed for a match")
      ->capture_default_str();
  eval->add_flag("--one-to-one", one_to_one, "At most one detected event per truth event");
  eval->add_option("--manifest", eval_manifest, "Detect manifest; adds throughput fields");
  eval->add_option("--report-out", report_out, "Text report (default: stdout)");
  eval->add_option("--json-out", json_out, "JSON report");

  EngineFlags bench_flags;
  std::string corpus_path;
  std::vector<std::string> algorithms;
  int bench_level = 9;
  bool engine_mode = false;
  auto* bench = app.add_subcommand("bench", "Compressor or engine throughput benchmark");
  bench->add_option("corpus", corpus_path, "Corpus or stream file")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--algorithm", algorithms, "Algorithm to compare (repeatable)");
  bench->add_option("--level", bench_level, "Level for the compressor comparison")
      ->capture_default_str();
  bench->add_flag("--engine", engine_mode, "Replay the stream through the engine");
  bench_flags.attach(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*detect) {
      return cmd_detect(detect_input, detect_flags, detect_seed, events_out, manifest_out, out,
                        err);
    }
    if (*synth) return cmd_synth(spec_path, synth_seed, stream_out, truth_out, out);
    if (*eval) {
      policy.allow_many_to_one = !one_to_one;
      return cmd_eval(eval_events, eval_truth, policy, eval_manifest, report_out, json_out, out,
                      err);
    }
    if (*bench) {
      if (algorithms.empty()) algorithms.push_back("deflate-raw");
      return cmd_bench(corpus_path, algorithms, bench_level, engine_mode, bench_flags, out);
    }
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}

}  // namespace evdet::cli
