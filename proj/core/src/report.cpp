#include "bitwidth/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <stdexcept>

namespace bw {

using ordered_json = nlohmann::ordered_json;

BitwidthReport make_report(const Pipeline& p) {
  BitwidthReport r;
  r.pipeline = p.name();
  for (const auto& s : p.stages()) r.stages.push_back(s.name);
  return r;
}

void BitwidthReport::add(const AnalysisResult& result) {
  ReportRow row;
  row.method = result.method;
  for (const auto& s : result.stages) {
    row.ranges.emplace_back(s.range);
    row.alpha.push_back(s.alpha);
    row.fallback.push_back(s.fallback);
    row.notes.push_back(s.note);
  }
  rows.push_back(std::move(row));
}

void BitwidthReport::add(const ProfileStats& stats) {
  ReportRow mx, avg;
  mx.method = "maxP";
  avg.method = "avgP";
  for (const auto& s : stats.stages) {
    mx.ranges.emplace_back(s.observed_hull());
    mx.alpha.push_back(s.alpha_max);
    avg.ranges.emplace_back(std::nullopt);
    avg.alpha.push_back(s.alpha_avg);
    for (auto* r : {&mx, &avg}) {
      r->fallback.push_back(false);
      r->notes.emplace_back();
    }
  }
  rows.push_back(std::move(mx));
  rows.push_back(std::move(avg));
}

void BitwidthReport::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata)
    if (k == key) {
      v = value;
      return;
    }
  metadata.emplace_back(key, value);
}

const ReportRow* BitwidthReport::row(const std::string& method) const {
  for (const auto& r : rows)
    if (r.method == method) return &r;
  return nullptr;
}

namespace {

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string render_text(const BitwidthReport& r) {
  std::vector<std::string> header{"alpha"};
  for (const auto& s : r.stages) header.push_back(s);
  std::vector<std::vector<std::string>> table{header};
  for (const auto& row : r.rows) {
    std::vector<std::string> line{row.method};
    for (size_t k = 0; k < row.alpha.size(); ++k)
      line.push_back(std::to_string(row.alpha[k]) + (row.fallback[k] ? "*" : ""));
    table.push_back(std::move(line));
  }
  if (r.beta) {
    std::vector<std::string> line{"beta"};
    for (int b : *r.beta) line.push_back(std::to_string(b));
    table.push_back(std::move(line));
  }
  std::vector<size_t> width(header.size(), 0);
  for (const auto& line : table)
    for (size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());

  std::string out = "pipeline: " + r.pipeline + "\n";
  for (const auto& [k, v] : r.metadata) out += k + ": " + v + "\n";
  out += "\n";
  for (const auto& line : table) {
    std::string text;
    for (size_t c = 0; c < line.size(); ++c) text += (c ? "  " : "") + pad(line[c], width[c]);
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + "\n";
  }
  bool any_range = false;
  for (const auto& row : r.rows)
    for (const auto& x : row.ranges) any_range = any_range || x.has_value();
  if (any_range) {
    out += "\nranges\n";
    for (const auto& row : r.rows) {
      for (size_t k = 0; k < row.ranges.size(); ++k) {
        if (!row.ranges[k]) continue;
        out += "  " + pad(row.method, 9) + pad(r.stages[k], 12) + "[" + to_decimal(row.ranges[k]->lo) +
               ", " + to_decimal(row.ranges[k]->hi) + "]";
        if (!row.notes[k].empty()) out += "  (" + row.notes[k] + ")";
        out += "\n";
      }
    }
  }
  bool any_fallback = false;
  for (const auto& row : r.rows)
    for (bool f : row.fallback) any_fallback = any_fallback || f;
  if (any_fallback) out += "\n* fallback range used for this stage\n";
  return out;
}

ordered_json range_json(const Interval& x) {
  return {{"lo", to_string(x.lo)}, {"hi", to_string(x.hi)}, {"lo_approx", to_decimal(x.lo)},
          {"hi_approx", to_decimal(x.hi)}};
}

std::string render_json(const BitwidthReport& r) {
  ordered_json doc;
  doc["pipeline"] = r.pipeline;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = v;
  doc["metadata"] = meta;
  doc["stages"] = r.stages;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json jr;
    jr["method"] = row.method;
    ordered_json entries = ordered_json::array();
    for (size_t k = 0; k < row.alpha.size(); ++k) {
      ordered_json e;
      e["stage"] = r.stages[k];
      e["alpha"] = row.alpha[k];
      if (row.ranges[k]) e["range"] = range_json(*row.ranges[k]);
      if (row.fallback[k]) e["fallback"] = true;
      if (!row.notes[k].empty()) e["note"] = row.notes[k];
      entries.push_back(std::move(e));
    }
    jr["stages"] = std::move(entries);
    rows.push_back(std::move(jr));
  }
  doc["methods"] = std::move(rows);
  if (r.beta) doc["beta"] = *r.beta;
  return doc.dump(2) + "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string render_csv(const BitwidthReport& r) {
  std::string out = "stage,method,alpha,lo,hi,lo_approx,hi_approx,fallback\n";
  for (const auto& row : r.rows) {
    for (size_t k = 0; k < row.alpha.size(); ++k) {
      out += csv_field(r.stages[k]) + "," + csv_field(row.method) + "," + std::to_string(row.alpha[k]) + ",";
      if (row.ranges[k])
        out += to_string(row.ranges[k]->lo) + "," + to_string(row.ranges[k]->hi) + "," +
               to_decimal(row.ranges[k]->lo) + "," + to_decimal(row.ranges[k]->hi);
      else
        out += ",,,";
      out += std::string(",") + (row.fallback[k] ? "1" : "0") + "\n";
    }
  }
  if (r.beta)
    for (size_t k = 0; k < r.beta->size(); ++k)
      out += csv_field(r.stages[k]) + ",beta," + std::to_string((*r.beta)[k]) + ",,,,,0\n";
  return out;
}

}  // namespace

std::string render(const BitwidthReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: return render_text(r);
    case ReportFormat::Json: return render_json(r);
    case ReportFormat::Csv: return render_csv(r);
  }
  return "";
}

BitwidthReport parse_report(const std::string& json_text) {
  try {
    auto doc = nlohmann::json::parse(json_text);
    BitwidthReport r;
    r.pipeline = doc.at("pipeline").get<std::string>();
    // nlohmann::json sorts object keys; walk the ordered variant for metadata.
    auto ordered = ordered_json::parse(json_text);
    for (auto& [k, v] : ordered.at("metadata").items()) r.metadata.emplace_back(k, v.get<std::string>());
    r.stages = doc.at("stages").get<std::vector<std::string>>();
    for (const auto& jr : doc.at("methods")) {
      ReportRow row;
      row.method = jr.at("method").get<std::string>();
      const auto& entries = jr.at("stages");
      if (entries.size() != r.stages.size())
        throw std::invalid_argument("method '" + row.method + "' does not cover every stage");
      for (const auto& e : entries) {
        row.alpha.push_back(e.at("alpha").get<int>());
        if (e.contains("range"))
          row.ranges.emplace_back(Interval(parse_rational(e["range"].at("lo").get<std::string>()),
                                           parse_rational(e["range"].at("hi").get<std::string>())));
        else
          row.ranges.emplace_back(std::nullopt);
        row.fallback.push_back(e.value("fallback", false));
        row.notes.push_back(e.value("note", std::string()));
      }
      r.rows.push_back(std::move(row));
    }
    if (doc.contains("beta")) r.beta = doc["beta"].get<std::vector<int>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

}  // namespace bw
