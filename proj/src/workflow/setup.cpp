// Copyright 2026 The kgxbench Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "workflow/setup.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "core/error.hpp"
#include "core/registry.hpp"
#include "workflow/store.hpp"

namespace kgxb {
namespace {

constexpr std::size_t kMaxRenderedLength = 120;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct CsvRecord {
  std::size_t line;
  std::vector<std::string> cells;
};

// RFC 4180 records. Outside quotes, commas nested in {} or [] stay in the
// cell so shorthand configs need no quoting.
std::vector<CsvRecord> read_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    CsvRecord rec{line, {}};
    std::string cell;
    bool quoted = false;
    int depth = 0;
    bool done = false;
    while (!done) {
      if (i >= text.size()) {
        if (quoted) throw ParseError(rec.line, "unterminated quoted cell");
        done = true;
        break;
      }
      const char c = text[i++];
      if (quoted) {
        if (c == '"') {
          if (i < text.size() && text[i] == '"') {
            cell += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          cell += c;
        }
        continue;
      }
      switch (c) {
        case '"':
          quoted = true;
          break;
        case '{':
        case '[':
          ++depth;
          cell += c;
          break;
        case '}':
        case ']':
          depth = std::max(0, depth - 1);
          cell += c;
          break;
        case ',':
          if (depth > 0) {
            cell += c;
          } else {
            rec.cells.push_back(std::move(cell));
            cell.clear();
          }
          break;
        case '\r':
          break;
        case '\n':
          ++line;
          done = true;
          break;
        default:
          cell += c;
      }
    }
    rec.cells.push_back(std::move(cell));
    const bool blank = rec.cells.size() == 1 && trim(rec.cells[0]).empty();
    const bool comment = !rec.cells.empty() && trim(rec.cells[0]).starts_with('#');
    if (!blank && !comment) records.push_back(std::move(rec));
  }
  return records;
}

nlohmann::json shorthand_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true") return true;
  if (v == "false") return false;
  std::int64_t n = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec == std::errc() && p == v.data() + v.size() && !v.empty()) return n;
  double d = 0;
  std::istringstream in(v);
  in >> d;
  if (!v.empty() && in && in.peek() == std::char_traits<char>::eof()) return d;
  return v;
}

int get_int(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return j.get<int>();
}

std::uint64_t get_seed(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw ConfigError("'" + key + "' must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

double get_double(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.get<double>();
}

bool get_bool(const nlohmann::json& j, const std::string& key) {
  if (!j.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return j.get<bool>();
}

std::string get_string(const nlohmann::json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("'" + key + "' must be a string");
  return j.get<std::string>();
}

std::string format_value(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string safe_name(const std::string& raw) {
  std::string out;
  for (unsigned char c : raw) {
    if (std::isalnum(c) || c == '.' || c == '_' || c == '=' || c == ',' || c == '+' ||
        c == '-') {
      out += static_cast<char>(c);
    } else {
      static constexpr char kHex[] = "0123456789ABCDEF";
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  if (out.size() > kMaxRenderedLength) return "cfg-" + sha256_hex(raw).substr(0, 16);
  return out;
}

std::string render_pairs(const std::vector<std::pair<std::string, nlohmann::json>>& fixed,
                         const nlohmann::json& full, const nlohmann::json& defaults) {
  std::string out;
  for (const auto& [k, v] : fixed) {
    if (!out.empty()) out += ',';
    out += k + "=" + format_value(v);
  }
  for (const auto& [k, v] : full.items()) {
    if (std::ranges::any_of(fixed, [&](const auto& f) { return f.first == k; })) continue;
    if (defaults.contains(k) && defaults.at(k) == v) continue;
    out += ',' + k + "=" + format_value(v);
  }
  return safe_name(out);
}

}  // namespace

std::string_view mode_name(Mode mode) {
  return mode == Mode::kValidation ? "validation" : "comparison";
}

nlohmann::json parse_config_cell(std::string_view cell) {
  const std::string text = trim(cell);
  if (text.empty()) return nlohmann::json::object();
  if (text.front() != '{' || text.back() != '}') {
    throw ConfigError("config cell must be enclosed in braces: " + text);
  }
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (!j.is_discarded()) {
    if (!j.is_object()) throw ConfigError("config cell is not an object");
    return j;
  }
  nlohmann::json out = nlohmann::json::object();
  const std::string body = text.substr(1, text.size() - 2);
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find(',', start);
    if (end == std::string::npos) end = body.size();
    const std::string item = trim(std::string_view(body).substr(start, end - start));
    start = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + item + "'");
    out[key] = shorthand_value(item.substr(eq + 1));
  }
  return out;
}

LpxConfig lpx_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("lpx_config must be an object");
  LpxConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "method") {
      const std::string raw = get_string(v, key);
      const std::string m = lower(raw);
      if (m == "kelpie") {
        c.method = "neighborhood";
      } else if (m == "kelpie++") {
        c.method = "neighborhood";
        c.summarize = true;
      } else if (m == "criage" || m == "dp" || m == "data_poisoning") {
        c.method = "single_triple";
      } else if (Registry::instance().has_explainer(m)) {
        c.method = m;
      } else if (Registry::instance().has_explainer(raw)) {
        c.method = raw;
      } else {
        throw ConfigError("unknown explanation method '" + raw + "'");
      }
    } else if (key == "mode") {
      const std::string m = lower(get_string(v, key));
      if (m == "necessary") {
        c.mode = RelevanceMode::kNecessary;
      } else if (m == "sufficient") {
        c.mode = RelevanceMode::kSufficient;
      } else {
        throw ConfigError("unknown relevance mode '" + m + "'");
      }
    } else if (key == "k") {
      c.k = get_int(v, key);
    } else if (key == "prefilter_size") {
      c.prefilter_size = get_int(v, key);
    } else if (key == "summarize") {
      c.summarize = get_bool(v, key);
    } else if (key == "comparison_limit") {
      c.comparison_limit = get_int(v, key);
    } else if (key == "seed") {
      c.seed = get_seed(v, key);
    } else if (key == "post_train_epochs") {
      c.post_train.epochs = get_int(v, key);
    } else if (key == "post_train_lr") {
      c.post_train.learning_rate = get_double(v, key);
    } else {
      throw ConfigError("unknown lpx_config key '" + key + "'");
    }
  }
  c.validate();
  if (c.post_train.epochs < 0 || !(c.post_train.learning_rate > 0)) {
    throw ConfigError("post-training needs epochs >= 0 and a positive learning rate");
  }
  return c;
}

EvalConfig eval_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("eval_config must be an object");
  EvalConfig c;
  bool constrained = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "prompting") {
      std::string p = lower(get_string(v, key));
      if (p.ends_with("_constrained")) {
        constrained = true;
        p.resize(p.size() - std::string_view("_constrained").size());
      }
      if (p == "zero_shot") {
        c.prompting = Prompting::kZeroShot;
      } else if (p == "few_shot") {
        c.prompting = Prompting::kFewShot;
      } else {
        throw ConfigError("unknown prompting '" + v.get<std::string>() + "'");
      }
    } else if (key == "constrained") {
      constrained = constrained || get_bool(v, key);
    } else if (key == "n_examples") {
      c.n_examples = get_int(v, key);
    } else if (key == "m" || key == "constraint_size") {
      c.constraint_size = get_int(v, key);
    } else if (key == "llm" || key == "llm_model") {
      c.llm_model = get_string(v, key);
    } else if (key == "batch_size") {
      c.batch_size = get_int(v, key);
    } else if (key == "seed") {
      c.seed = get_seed(v, key);
    } else {
      throw ConfigError("unknown eval_config key '" + key + "'");
    }
  }
  c.constrained = constrained;
  c.validate();
  return c;
}

nlohmann::json to_json(const LpxConfig& c) {
  return {{"method", c.method},
          {"mode", relevance_mode_name(c.mode)},
          {"k", c.k},
          {"prefilter_size", c.prefilter_size},
          {"summarize", c.summarize},
          {"comparison_limit", c.comparison_limit},
          {"seed", c.seed},
          {"post_train_epochs", c.post_train.epochs},
          {"post_train_lr", c.post_train.learning_rate}};
}

nlohmann::json to_json(const EvalConfig& c) {
  return {{"prompting", prompting_name(c.prompting)},
          {"constrained", c.constrained},
          {"n_examples", c.n_examples},
          {"m", c.constraint_size},
          {"llm", c.llm_model},
          {"batch_size", c.batch_size},
          {"seed", c.seed}};
}

std::string render_config(const LpxConfig& config) {
  nlohmann::json full = to_json(config);
  return render_pairs({{"method", full["method"]}}, full, to_json(LpxConfig{}));
}

std::string render_config(const EvalConfig& config) {
  nlohmann::json full = to_json(config);
  std::string prompting = full["prompting"].get<std::string>();
  if (config.constrained) prompting += "_constrained";
  full.erase("constrained");
  nlohmann::json defaults = to_json(EvalConfig{});
  return render_pairs({{"prompting", prompting}, {"llm", full["llm"]}}, full, defaults);
}

std::string render_metric_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += '+';
    out += n;
  }
  return safe_name(out);
}

std::vector<std::string> default_metric_names(Mode mode) {
  if (mode == Mode::kValidation) return {"classification_report"};
  return {"average_fsv", "fsv_distribution"};
}

bool is_known_metric(std::string_view name) {
  return name == "classification_report" || name == "average_fsv" ||
         name == "fsv_distribution" || name == "fsv_summary";
}

std::vector<SetupRow> parse_setup_text(std::string_view csv, Mode mode) {
  const std::vector<CsvRecord> records = read_csv(csv);
  if (records.empty()) throw ParseError(1, "setup file has no header row");
  std::map<std::string, std::size_t> columns;
  const CsvRecord& header = records.front();
  for (std::size_t c = 0; c < header.cells.size(); ++c) {
    const std::string name = lower(trim(header.cells[c]));
    if (name.empty()) throw ParseError(header.line, "empty column name");
    if (!columns.emplace(name, c).second) {
      throw ParseError(header.line, "duplicate column '" + name + "'");
    }
  }
  for (const auto& [name, _] : columns) {
    if (name != "kg_name" && name != "kge_name" && name != "lpx_config" &&
        name != "eval_config" && name != "metric_names") {
      throw ParseError(header.line, "unknown column '" + name + "'");
    }
  }
  for (const char* required : {"kg_name", "kge_name", "eval_config"}) {
    if (!columns.contains(required)) {
      throw ParseError(header.line, std::string("missing column '") + required + "'");
    }
  }
  const bool has_lpx = columns.contains("lpx_config");
  if (mode == Mode::kValidation && has_lpx) {
    throw ParseError(header.line, "validation setups take no lpx_config column");
  }
  if (mode == Mode::kComparison && !has_lpx) {
    throw ParseError(header.line, "comparison setups need an lpx_config column");
  }

  std::vector<SetupRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& rec = records[r];
    if (rec.cells.size() != header.cells.size()) {
      throw ParseError(rec.line, "expected " + std::to_string(header.cells.size()) +
                                     " cells, got " + std::to_string(rec.cells.size()));
    }
    auto cell = [&](const char* name) { return trim(rec.cells[columns.at(name)]); };
    SetupRow row;
    row.line = rec.line;
    try {
      row.kg_name = cell("kg_name");
      if (row.kg_name.empty() || row.kg_name.find_first_of("/\\") != std::string::npos ||
          row.kg_name == "." || row.kg_name == "..") {
        throw ConfigError("invalid kg_name '" + row.kg_name + "'");
      }
      row.kge_kind = parse_model_kind(cell("kge_name"));
      row.kge_name = std::string(model_kind_name(row.kge_kind));
      if (has_lpx) row.lpx_config = lpx_config_from_json(parse_config_cell(cell("lpx_config")));
      row.eval_config = eval_config_from_json(parse_config_cell(cell("eval_config")));
      std::string metrics = columns.contains("metric_names") ? cell("metric_names") : "";
      if (metrics.empty()) {
        row.metric_names = default_metric_names(mode);
      } else if (metrics.front() == '[') {
        const auto j = nlohmann::json::parse(metrics);
        for (const auto& m : j) row.metric_names.push_back(m.get<std::string>());
      } else {
        std::size_t start = 0;
        while (start <= metrics.size()) {
          std::size_t end = metrics.find_first_of(";|", start);
          if (end == std::string::npos) end = metrics.size();
          std::string m = trim(std::string_view(metrics).substr(start, end - start));
          if (!m.empty()) row.metric_names.push_back(std::move(m));
          start = end + 1;
        }
      }
      if (row.metric_names.empty()) throw ConfigError("empty metric_names");
      for (const auto& m : row.metric_names) {
        if (!is_known_metric(m)) throw ConfigError("unknown metric '" + m + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(rec.line, e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(rec.line, e.what());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(header.line, "setup file has no rows");
  return rows;
}

std::vector<SetupRow> parse_setup(const std::filesystem::path& csv_path, Mode mode) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot open setup file " + csv_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_setup_text(buf.str(), mode);
}

}  // namespace kgxb
