#ifndef CARNOT_TOOLS_MANIFEST_HPP
#define CARNOT_TOOLS_MANIFEST_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace carnot_cli {

/// Tool version baked in at build time; defined in cli_app.cpp so every
/// translation unit sees the same value.
const char* tool_version();

/// Every floating-point value in the output carries 17 significant digits so
/// a replayed run parses bit-identical doubles.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string format_int(long long x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", x);
  return buf;
}

inline std::string format_uint(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(x));
  return buf;
}

/// Order-preserving JSON tree with explicit number formatting. The vendored
/// parser emits floats in shortest-round-trip form, which is lossless but not
/// the fixed 17-digit format the output schema promises, so emission goes
/// through this type instead.
class JsonValue {
 public:
  JsonValue() = default;

  static JsonValue null() { return JsonValue(); }
  static JsonValue boolean(bool v) {
    JsonValue j;
    j.kind_ = Kind::boolean;
    j.bool_ = v;
    return j;
  }
  static JsonValue integer(long long v) {
    JsonValue j;
    j.kind_ = Kind::integer;
    j.int_ = v;
    return j;
  }
  static JsonValue unsigned_integer(std::uint64_t v) {
    JsonValue j;
    j.kind_ = Kind::unsigned_integer;
    j.uint_ = v;
    return j;
  }
  static JsonValue real(double v) {
    JsonValue j;
    j.kind_ = Kind::real;
    j.real_ = v;
    return j;
  }
  static JsonValue text(std::string v) {
    JsonValue j;
    j.kind_ = Kind::text;
    j.text_ = std::move(v);
    return j;
  }
  static JsonValue array() {
    JsonValue j;
    j.kind_ = Kind::array;
    return j;
  }
  static JsonValue object() {
    JsonValue j;
    j.kind_ = Kind::object;
    return j;
  }
  static JsonValue reals(const Eigen::VectorXd& v) {
    JsonValue j = array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push(real(v[i]));
    return j;
  }
  static JsonValue integers(const std::vector<int>& v) {
    JsonValue j = array();
    for (int x : v) j.push(integer(x));
    return j;
  }

  JsonValue& push(JsonValue v) {
    items_.push_back(std::move(v));
    return *this;
  }
  JsonValue& set(std::string key, JsonValue v) {
    fields_.emplace_back(std::move(key), std::move(v));
    return *this;
  }

  /// indent = 0 emits one compact line; otherwise pretty-printed.
  std::string dump(int indent = 2) const {
    std::ostringstream out;
    write(out, indent, 0);
    return out.str();
  }

 private:
  enum class Kind { null, boolean, integer, unsigned_integer, real, text, array, object };

  static void write_text(std::ostream& out, const std::string& s) {
    out << '"';
    for (unsigned char c : s) {
      switch (c) {
        case '"': out << "\\\""; break;
        case '\\': out << "\\\\"; break;
        case '\b': out << "\\b"; break;
        case '\f': out << "\\f"; break;
        case '\n': out << "\\n"; break;
        case '\r': out << "\\r"; break;
        case '\t': out << "\\t"; break;
        default:
          if (c < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out << buf;
          } else {
            out << c;
          }
      }
    }
    out << '"';
  }

  void write(std::ostream& out, int indent, int depth) const {
    const std::string pad(indent > 0 ? indent * (depth + 1) : 0, ' ');
    const std::string close_pad(indent > 0 ? indent * depth : 0, ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (kind_) {
      case Kind::null: out << "null"; break;
      case Kind::boolean: out << (bool_ ? "true" : "false"); break;
      case Kind::integer: out << format_int(int_); break;
      case Kind::unsigned_integer: out << format_uint(uint_); break;
      case Kind::real: out << format_real(real_); break;
      case Kind::text: write_text(out, text_); break;
      case Kind::array: {
        if (items_.empty()) {
          out << "[]";
          break;
        }
        out << '[' << nl;
        for (std::size_t i = 0; i < items_.size(); ++i) {
          out << pad;
          items_[i].write(out, indent, depth + 1);
          if (i + 1 < items_.size()) out << ',';
          out << nl;
        }
        out << close_pad << ']';
        break;
      }
      case Kind::object: {
        if (fields_.empty()) {
          out << "{}";
          break;
        }
        out << '{' << nl;
        for (std::size_t i = 0; i < fields_.size(); ++i) {
          out << pad;
          write_text(out, fields_[i].first);
          out << (indent > 0 ? ": " : ":");
          fields_[i].second.write(out, indent, depth + 1);
          if (i + 1 < fields_.size()) out << ',';
          out << nl;
        }
        out << close_pad << '}';
        break;
      }
    }
  }

  Kind kind_ = Kind::null;
  bool bool_ = false;
  long long int_ = 0;
  std::uint64_t uint_ = 0;
  double real_ = 0.0;
  std::string text_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> fields_;
};

/// Fully resolved description of one run: the subcommand, the group, and
/// every parameter after defaults and the environment have been applied.
/// The recorded argv replays the run exactly, so the manifest is sufficient
/// to reproduce the output bit for bit (wall time aside).
struct RunManifest {
  std::string command;
  std::string group;
  std::vector<std::string> argv;
  JsonValue params = JsonValue::object();
  bool uses_seed = false;
  std::uint64_t seed = 0;

  /// argv tokens use the --flag=value form so values that begin with a
  /// minus sign can never be mistaken for option names on replay.
  void start(std::string cmd, std::string group_descriptor) {
    command = std::move(cmd);
    group = std::move(group_descriptor);
    argv.push_back(command);
    if (!group.empty()) argv.push_back("--group=" + group);
  }

  void arg_real(const char* flag, const char* key, double v) {
    argv.push_back(std::string(flag) + "=" + format_real(v));
    params.set(key, JsonValue::real(v));
  }
  void arg_int(const char* flag, const char* key, long long v) {
    argv.push_back(std::string(flag) + "=" + format_int(v));
    params.set(key, JsonValue::integer(v));
  }
  void arg_text(const char* flag, const char* key, const std::string& v) {
    argv.push_back(std::string(flag) + "=" + v);
    params.set(key, JsonValue::text(v));
  }
  void arg_reals(const char* flag, const char* key, const Eigen::VectorXd& v) {
    std::string joined;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) joined += ',';
      joined += format_real(v[i]);
    }
    argv.push_back(std::string(flag) + "=" + joined);
    params.set(key, JsonValue::reals(v));
  }
  /// Presence-only switch: recorded in params either way, in argv when on.
  void arg_switch(const char* flag, const char* key, bool on) {
    if (on) argv.push_back(flag);
    params.set(key, JsonValue::boolean(on));
  }
  void arg_seed(std::uint64_t v) {
    uses_seed = true;
    seed = v;
    argv.push_back("--seed=" + format_uint(v));
  }

  JsonValue to_json(double wall_time_ms) const {
    JsonValue m = JsonValue::object();
    m.set("command", JsonValue::text(command));
    m.set("group", group.empty() ? JsonValue::null() : JsonValue::text(group));
    JsonValue args = JsonValue::array();
    for (const std::string& a : argv) args.push(JsonValue::text(a));
    m.set("argv", std::move(args));
    m.set("params", params);
    m.set("seed", uses_seed ? JsonValue::unsigned_integer(seed) : JsonValue::null());
    m.set("version", JsonValue::text(tool_version()));
    m.set("wall_time_ms", JsonValue::real(wall_time_ms));
    return m;
  }
};

/// The uniform output document: { "schema": 1, "manifest": ..., "result": ... }.
inline JsonValue output_document(const RunManifest& manifest, double wall_time_ms,
                                 JsonValue result) {
  JsonValue doc = JsonValue::object();
  doc.set("schema", JsonValue::integer(1));
  doc.set("manifest", manifest.to_json(wall_time_ms));
  doc.set("result", std::move(result));
  return doc;
}

/// Manifest header for CSV and plain-text outputs, one compact comment line.
inline std::string manifest_comment(const RunManifest& manifest, double wall_time_ms) {
  JsonValue doc = JsonValue::object();
  doc.set("schema", JsonValue::integer(1));
  doc.set("manifest", manifest.to_json(wall_time_ms));
  return "# " + doc.dump(0);
}

}  // namespace carnot_cli

#endif
