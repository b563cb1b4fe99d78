#include "recur/sample_io.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "recur/errors.hpp"

namespace recur {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& field, const std::string& what, std::size_t line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": bad " + what + " value '" + field +
                     "'");
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

Sample load_sample_json(const std::string& path, const ValidationOptions& opts) {
  std::ifstream in = open_for_read(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("'") + path + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("d") || !doc.contains("subjects")) {
    throw SchemaError("'" + path + "': expected object with fields d, subjects");
  }
  if (!doc["d"].is_number_integer() || !doc["subjects"].is_array()) {
    throw SchemaError("'" + path + "': d must be an integer, subjects an array");
  }
  const std::size_t d = doc["d"].get<std::size_t>();

  Sample s;
  std::size_t idx = 0;
  for (const json& js : doc["subjects"]) {
    for (const char* key : {"T", "delta", "Z", "events"}) {
      if (!js.contains(key)) {
        throw SchemaError("subject " + std::to_string(idx) + ": missing field '" + key + "'");
      }
    }
    Subject sub;
    if (!js["T"].is_number()) {
      throw SchemaError("subject " + std::to_string(idx) + ": T must be a number");
    }
    sub.T = js["T"].get<double>();
    const json& del = js["delta"];
    if (!(del.is_number_integer() && (del.get<int>() == 0 || del.get<int>() == 1)) &&
        !del.is_boolean()) {
      throw SchemaError("subject " + std::to_string(idx) + ": delta must be 0 or 1");
    }
    sub.delta = del.is_boolean() ? del.get<bool>() : (del.get<int>() == 1);
    if (!js["Z"].is_array() || js["Z"].size() != d) {
      throw SchemaError("subject " + std::to_string(idx) + ": Z must hold " +
                        std::to_string(d) + " numbers");
    }
    for (const json& z : js["Z"]) sub.Z.push_back(z.get<double>());
    if (!js["events"].is_array()) {
      throw SchemaError("subject " + std::to_string(idx) + ": events must be an array");
    }
    for (const json& e : js["events"]) sub.events.push_back(e.get<double>());
    s.subjects.push_back(std::move(sub));
    ++idx;
  }
  return validate_sample(s, opts);
}

void save_sample_json(const Sample& sample, const std::string& path) {
  json doc;
  doc["d"] = sample.d();
  doc["subjects"] = json::array();
  for (const Subject& sub : sample.subjects) {
    json js;
    js["T"] = sub.T;
    js["delta"] = sub.delta ? 1 : 0;
    js["Z"] = sub.Z;
    js["events"] = sub.events;
    doc["subjects"].push_back(std::move(js));
  }
  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << '\n';
}

Sample load_sample_csv(const std::string& subjects_path, const std::string& events_path,
                       const ValidationOptions& opts) {
  std::ifstream subj_in = open_for_read(subjects_path);

  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(subj_in, line)) throw ParseError("'" + subjects_path + "': empty file");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "T" || header[2] != "delta") {
    throw SchemaError("'" + subjects_path + "': header must be id,T,delta,z1..zd");
  }
  const std::size_t d = header.size() - 3;
  for (std::size_t k = 0; k < d; ++k) {
    if (header[3 + k] != "z" + std::to_string(k + 1)) {
      throw SchemaError("'" + subjects_path + "': covariate column " + std::to_string(k + 1) +
                        " must be named z" + std::to_string(k + 1));
    }
  }

  Sample s;
  std::map<long long, std::size_t> by_id;
  while (std::getline(subj_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 3 + d) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(3 + d) + " fields, got " + std::to_string(f.size()));
    }
    long long id = 0;
    try {
      id = std::stoll(f[0]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": bad id '" + f[0] + "'");
    }
    if (by_id.count(id)) {
      throw SchemaError("line " + std::to_string(lineno) + ": duplicate id " +
                        std::to_string(id));
    }
    Subject sub;
    sub.T = parse_double(f[1], "T", lineno);
    const double del = parse_double(f[2], "delta", lineno);
    if (del != 0.0 && del != 1.0) {
      throw SchemaError("line " + std::to_string(lineno) + ": delta must be 0 or 1");
    }
    sub.delta = del == 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      sub.Z.push_back(parse_double(f[3 + k], "covariate", lineno));
    }
    by_id[id] = s.subjects.size();
    s.subjects.push_back(std::move(sub));
  }

  std::ifstream ev_in = open_for_read(events_path);
  lineno = 1;
  if (!std::getline(ev_in, line)) throw ParseError("'" + events_path + "': empty file");
  std::vector<std::string> ev_header = split_csv_line(line);
  if (ev_header.size() != 2 || ev_header[0] != "id" || ev_header[1] != "event_time") {
    throw SchemaError("'" + events_path + "': header must be id,event_time");
  }
  while (std::getline(ev_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 2) {
      throw ParseError("line " + std::to_string(lineno) + ": expected id,event_time");
    }
    long long id = 0;
    try {
      id = std::stoll(f[0]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": bad id '" + f[0] + "'");
    }
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw SchemaError("line " + std::to_string(lineno) + ": event id " + std::to_string(id) +
                        " has no subject row");
    }
    s.subjects[it->second].events.push_back(parse_double(f[1], "event_time", lineno));
  }
  return validate_sample(s, opts);
}

void save_sample_csv(const Sample& sample, const std::string& subjects_path,
                     const std::string& events_path) {
  const std::size_t d = sample.d();
  std::ofstream subj = open_for_write(subjects_path);
  subj << "id,T,delta";
  for (std::size_t k = 1; k <= d; ++k) subj << ",z" << k;
  subj << '\n';
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const Subject& sub = sample.subjects[i];
    subj << (i + 1) << ',' << format_double(sub.T) << ',' << (sub.delta ? 1 : 0);
    for (double z : sub.Z) subj << ',' << format_double(z);
    subj << '\n';
  }

  std::ofstream ev = open_for_write(events_path);
  ev << "id,event_time\n";
  for (std::size_t i = 0; i < sample.n(); ++i) {
    for (double e : sample.subjects[i].events) {
      ev << (i + 1) << ',' << format_double(e) << '\n';
    }
  }
}

std::string default_events_path(const std::string& subjects_path) {
  const std::size_t dot = subjects_path.find_last_of('.');
  const std::size_t slash = subjects_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return subjects_path + "_events";
  }
  return subjects_path.substr(0, dot) + "_events" + subjects_path.substr(dot);
}

Sample load_sample(const std::string& path, SampleFormat format, const ValidationOptions& opts) {
  if (format == SampleFormat::json) return load_sample_json(path, opts);
  return load_sample_csv(path, default_events_path(path), opts);
}

}  // namespace recur
