#pragma once

#include <string>

#include "recur/sample.hpp"

namespace recur {

enum class SampleFormat { json, csv };

/// JSON schema:
///   { "d": int, "subjects": [ { "T": number, "delta": 0|1,
///                               "Z": [number x d], "events": [number...] } ] }
/// Times round-trip exactly (shortest-representation doubles).
/// Loaded samples pass through validate_sample with the given options.
Sample load_sample_json(const std::string& path, const ValidationOptions& opts = {});
void save_sample_json(const Sample& sample, const std::string& path);

/// Long CSV format, two files: subjects with header id,T,delta,z1..zd and
/// events with header id,event_time. Every event id must match a subject id.
Sample load_sample_csv(const std::string& subjects_path, const std::string& events_path,
                       const ValidationOptions& opts = {});
void save_sample_csv(const Sample& sample, const std::string& subjects_path,
                     const std::string& events_path);

/// Dispatcher. For csv the events file is derived from `path` by inserting
/// "_events" before the extension (data.csv -> data_events.csv).
Sample load_sample(const std::string& path, SampleFormat format,
                   const ValidationOptions& opts = {});

/// Derived events-file name used by the csv dispatcher.
std::string default_events_path(const std::string& subjects_path);

}  // namespace recur
