#pragma once

// JSON instance files. Adversarial instances carry explicit rounds;
// stochastic models carry a finite support with probabilities. Unknown keys
// are rejected unless ORA_BOB_SCHEMA_STRICT=0.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "ora/core.hpp"
#include "ora/environments.hpp"

namespace ora {

using json = nlohmann::json;

/// Schema violation located by a JSON pointer.
class SchemaError : public ValidationError {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : ValidationError(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Malformed JSON text, with the byte offset reported by the parser.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t byte, const std::string& what)
      : ValidationError("parse error at byte " + std::to_string(byte) + ": " + what),
        byte_(byte) {}
  std::size_t byte() const { return byte_; }

 private:
  std::size_t byte_;
};

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline bool schema_strict() {
  const char* v = std::getenv("ORA_BOB_SCHEMA_STRICT");
  return !(v != nullptr && std::string(v) == "0");
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ValidationError("not a number: '" + std::string(s) + "'");
  return v;
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json tuple_to_json(const InputTuple& t) {
  return {{"f", t.rewards}, {"g", matrix_to_json(t.general_costs)},
          {"h", matrix_to_json(t.consumptions)}};
}

inline void check_keys(const json& obj, const std::string& ptr,
                       std::initializer_list<const char*> allowed,
                       std::initializer_list<const char*> required) {
  if (!obj.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  for (const char* k : required)
    if (!obj.contains(k)) throw SchemaError(ptr + "/" + k, "missing required field");
  if (!schema_strict()) return;
  std::set<std::string> ok;
  for (const char* k : allowed) ok.insert(k);
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) throw SchemaError(ptr + "/" + it.key(), "unknown field");
}

inline std::size_t get_size(const json& obj, const std::string& ptr, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw SchemaError(ptr + "/" + key, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

inline double get_real(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw SchemaError(ptr, "expected a number");
  return v.get<double>();
}

inline std::vector<double> get_vector(const json& v, const std::string& ptr, std::size_t len) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  if (v.size() != len)
    throw SchemaError(ptr, "expected " + std::to_string(len) + " entries, got " +
                               std::to_string(v.size()));
  std::vector<double> out(len);
  for (std::size_t i = 0; i < len; ++i) out[i] = get_real(v[i], ptr + "/" + std::to_string(i));
  return out;
}

inline Matrix get_matrix(const json& v, const std::string& ptr, std::size_t rows,
                         std::size_t cols) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  if (v.size() != rows)
    throw SchemaError(ptr, "expected " + std::to_string(rows) + " rows, got " +
                               std::to_string(v.size()));
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = get_vector(v[r], ptr + "/" + std::to_string(r), cols);
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

inline InputTuple tuple_from_json(const json& v, const std::string& ptr, std::size_t K,
                                  std::size_t m, std::size_t n) {
  check_keys(v, ptr, {"f", "g", "h"}, {"f", "g", "h"});
  return {get_vector(v.at("f"), ptr + "/f", K), get_matrix(v.at("g"), ptr + "/g", m, K),
          get_matrix(v.at("h"), ptr + "/h", n, K)};
}

}  // namespace detail

inline json to_json(const Instance& inst) {
  json rounds = json::array();
  for (const auto& t : inst.rounds) rounds.push_back(detail::tuple_to_json(t));
  return {{"T", inst.horizon()},        {"K", inst.num_actions},
          {"m", inst.num_general},      {"n", inst.num_resources},
          {"void_index", inst.void_index}, {"beta", inst.beta},
          {"rounds", std::move(rounds)}};
}

inline json to_json(const StochasticModel& model, std::optional<std::size_t> T = std::nullopt) {
  json support = json::array();
  for (const auto& t : model.support) support.push_back(detail::tuple_to_json(t));
  json j = {{"K", model.num_actions},
            {"m", model.num_general},
            {"n", model.num_resources},
            {"void_index", model.void_index},
            {"beta", model.beta},
            {"support", std::move(support)},
            {"probs", model.probs}};
  if (T) j["T"] = *T;
  return j;
}

struct LoadedModel {
  StochasticModel model;
  std::optional<std::size_t> horizon;
  bool operator==(const LoadedModel&) const = default;
};

using LoadedInstance = std::variant<Instance, LoadedModel>;

inline LoadedInstance instance_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw SchemaError("/", "expected an object");
  const bool stochastic = j.contains("support");
  if (stochastic)
    check_keys(j, "", {"T", "K", "m", "n", "void_index", "beta", "support", "probs"},
               {"K", "m", "n", "void_index", "beta", "support", "probs"});
  else
    check_keys(j, "", {"T", "K", "m", "n", "void_index", "beta", "rounds"},
               {"T", "K", "m", "n", "void_index", "beta", "rounds"});

  const std::size_t K = get_size(j, "", "K");
  const std::size_t m = get_size(j, "", "m");
  const std::size_t n = get_size(j, "", "n");
  const std::size_t v = get_size(j, "", "void_index");
  if (K < 1) throw SchemaError("/K", "must be at least 1");
  if (v >= K) throw SchemaError("/void_index", "must be less than K");
  const auto beta = get_vector(j.at("beta"), "/beta", n);

  if (stochastic) {
    const auto& sup = j.at("support");
    if (!sup.is_array() || sup.empty()) throw SchemaError("/support", "expected a nonempty array");
    LoadedModel out;
    out.model = {K, m, n, v, beta, {}, get_vector(j.at("probs"), "/probs", sup.size())};
    for (std::size_t s = 0; s < sup.size(); ++s)
      out.model.support.push_back(tuple_from_json(sup[s], "/support/" + std::to_string(s), K, m, n));
    if (j.contains("T")) out.horizon = get_size(j, "", "T");
    out.model.validate();
    return out;
  }

  const std::size_t T = get_size(j, "", "T");
  const auto& rounds = j.at("rounds");
  if (!rounds.is_array()) throw SchemaError("/rounds", "expected an array");
  if (rounds.size() != T)
    throw SchemaError("/rounds", "expected T=" + std::to_string(T) + " rounds, got " +
                                     std::to_string(rounds.size()));
  Instance inst{K, m, n, v, beta, {}};
  inst.rounds.reserve(T);
  for (std::size_t t = 0; t < T; ++t)
    inst.rounds.push_back(tuple_from_json(rounds[t], "/rounds/" + std::to_string(t), K, m, n));
  const auto rep = validate_instance(inst);
  if (!rep.valid()) throw ValidationError("invalid instance: " + rep.summary());
  return inst;
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temp file, then renames over the destination.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string(), "cannot write file");
    out << contents;
    if (!out) throw IoError(tmp.string(), "write failed");
  }
  std::filesystem::rename(tmp, path);
}

inline LoadedInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(parse_json_text(read_file(path)));
}

inline std::string dump_instance(const LoadedInstance& inst) {
  if (const auto* a = std::get_if<Instance>(&inst)) return to_json(*a).dump(1) + "\n";
  const auto& lm = std::get<LoadedModel>(inst);
  return to_json(lm.model, lm.horizon).dump(1) + "\n";
}

inline void save_instance(const std::filesystem::path& path, const LoadedInstance& inst) {
  write_file_atomic(path, dump_instance(inst));
}

/// Content hash over the canonical (compact, key-sorted) JSON form.
inline std::string instance_hash(const Instance& inst) { return fnv1a_hex(to_json(inst).dump()); }

}  // namespace ora
