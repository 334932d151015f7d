#include "fraclab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "fraclab/errors.hpp"
#include "json.hpp"

namespace fraclab {

using nlohmann::ordered_json;

namespace {

std::string coords(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_number(v[i]);
  }
  return out;
}

std::string witness_text(const ReportRecord& r) {
  if (r.witness_kind.empty()) return "";
  std::string out = r.witness_kind + ":";
  for (std::size_t i = 0; i < r.witness.size(); ++i) {
    if (i) out += '|';
    out += coords(r.witness[i]);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json num_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double json_num(const ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

ordered_json vec_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num_json(v[i]));
  return a;
}

Vector json_vec(const ordered_json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = json_num(a[i]);
  return v;
}

std::string render_text(const Report& r) {
  std::ostringstream os;
  os << "command: " << r.command << "\n";
  os << "seed: " << r.seed << "\n";
  if (r.wall_time) os << "wall_time_s: " << format_number(*r.wall_time) << "\n";
  os << "records: " << r.records.size() << "\n";
  for (const auto& rec : r.records) {
    os << "[" << rec.index << "] x = (" << coords(rec.x) << ")";
    if (rec.value) os << " value = " << format_number(*rec.value);
    if (rec.lo && rec.hi) os << " bracket = [" << format_number(*rec.lo) << ", " << format_number(*rec.hi) << "]";
    if (!rec.verdict.empty()) os << " verdict = " << rec.verdict;
    os << "\n";
    if (!rec.witness_kind.empty()) os << "    witness " << witness_text(rec) << "\n";
    if (!rec.detail.empty()) os << "    " << rec.detail << "\n";
  }
  os << "summary:\n";
  for (const auto& [k, v] : r.summary) os << "  " << k << ": " << v << "\n";
  return os.str();
}

std::string render_json(const Report& r) {
  ordered_json j;
  j["command"] = r.command;
  j["seed"] = r.seed;
  if (r.wall_time) j["wall_time_s"] = *r.wall_time;
  ordered_json recs = ordered_json::array();
  for (const auto& rec : r.records) {
    ordered_json o;
    o["index"] = rec.index;
    o["x"] = vec_json(rec.x);
    o["value"] = rec.value ? num_json(*rec.value) : ordered_json(nullptr);
    o["lo"] = rec.lo ? num_json(*rec.lo) : ordered_json(nullptr);
    o["hi"] = rec.hi ? num_json(*rec.hi) : ordered_json(nullptr);
    o["verdict"] = rec.verdict;
    o["witness_kind"] = rec.witness_kind;
    ordered_json w = ordered_json::array();
    for (const auto& v : rec.witness) w.push_back(vec_json(v));
    o["witness"] = w;
    o["detail"] = rec.detail;
    recs.push_back(o);
  }
  j["records"] = recs;
  ordered_json sum = ordered_json::array();
  for (const auto& [k, v] : r.summary) sum.push_back({k, v});
  j["summary"] = sum;
  return j.dump(2) + "\n";
}

std::string render_csv(const Report& r) {
  std::ostringstream os;
  os << "index,x,value,lo,hi,verdict,witness\n";
  for (const auto& rec : r.records) {
    os << rec.index << ',' << csv_field(coords(rec.x)) << ',' << (rec.value ? format_number(*rec.value) : "") << ','
       << (rec.lo ? format_number(*rec.lo) : "") << ',' << (rec.hi ? format_number(*rec.hi) : "") << ','
       << csv_field(rec.verdict) << ',' << csv_field(witness_text(rec)) << "\n";
  }
  return os.str();
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw Error(ErrorKind::ValidationError, "unknown report format '" + name + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string render_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: return render_text(report);
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::Csv: return render_csv(report);
  }
  return {};
}

void emit_report(const Report& report, ReportFormat format, const std::string& path) {
  const std::string text = render_report(report, format);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

Report report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  Report r;
  try {
    r.command = j.at("command").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("wall_time_s")) r.wall_time = j["wall_time_s"].get<double>();
    for (const auto& o : j.at("records")) {
      ReportRecord rec;
      rec.index = o.at("index").get<std::size_t>();
      rec.x = json_vec(o.at("x"));
      if (!o.at("value").is_null()) rec.value = json_num(o["value"]);
      if (!o.at("lo").is_null()) rec.lo = json_num(o["lo"]);
      if (!o.at("hi").is_null()) rec.hi = json_num(o["hi"]);
      rec.verdict = o.at("verdict").get<std::string>();
      rec.witness_kind = o.at("witness_kind").get<std::string>();
      for (const auto& w : o.at("witness")) rec.witness.push_back(json_vec(w));
      rec.detail = o.at("detail").get<std::string>();
      r.records.push_back(std::move(rec));
    }
    for (const auto& kv : j.at("summary")) r.add_summary(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("report structure: ") + e.what());
  }
  return r;
}

}  // namespace fraclab
