#include "carnot/group_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "carnot/errors.hpp"

namespace carnot {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw input_error(path + ": " + e.what());
  }
}

int require_positive_int(const json& j, const char* key,
                         const std::string& path) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw input_error(path + ": missing integer field \"" + key + "\"");
  const int v = j.at(key).get<int>();
  if (v <= 0) throw input_error(path + ": \"" + key + "\" must be positive");
  return v;
}

Eigen::MatrixXd rows_to_matrix(const json& rows, const std::string& path) {
  if (!rows.is_array() || rows.empty() || !rows.front().is_array())
    throw input_error(path + ": expected an array of row arrays");
  const std::size_t cols = rows.front().size();
  if (cols == 0) throw input_error(path + ": empty matrix row");
  Eigen::MatrixXd m(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows.at(r);
    if (!row.is_array() || row.size() != cols)
      throw input_error(path + ": ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row.at(c).is_number())
        throw input_error(path + ": matrix entries must be numbers");
      m(static_cast<int>(r), static_cast<int>(c)) = row.at(c).get<double>();
    }
  }
  return m;
}

int parse_family_param(const std::string& text, const std::string& descriptor) {
  int k = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, k);
  if (ec != std::errc() || ptr != last)
    throw input_error("group descriptor \"" + descriptor +
                      "\": expected an integer parameter");
  return k;
}

}  // namespace

StepTwoAlgebra load_group_spec(const std::string& path) {
  const json j = parse_file(path);
  if (!j.is_object()) throw input_error(path + ": expected a JSON object");
  if (!j.contains("name") || !j.at("name").is_string())
    throw input_error(path + ": missing string field \"name\"");
  const std::string name = j.at("name").get<std::string>();
  const int q1 = require_positive_int(j, "v1_dim", path);
  const int q2 = require_positive_int(j, "v2_dim", path);
  if (!j.contains("brackets") || !j.at("brackets").is_array())
    throw input_error(path + ": missing array field \"brackets\"");

  std::vector<BracketEntry> entries;
  std::set<std::pair<int, int>> seen;
  for (const json& b : j.at("brackets")) {
    if (!b.is_object())
      throw input_error(path + ": bracket entries must be objects");
    const int i = require_positive_int(b, "i", path);
    const int jj = require_positive_int(b, "j", path);
    if (i >= jj) throw input_error(path + ": bracket entries need i < j");
    if (i > q1 || jj > q1)
      throw input_error(path + ": bracket index exceeds v1_dim");
    if (!seen.insert({i, jj}).second)
      throw input_error(path + ": duplicate bracket entry (" +
                        std::to_string(i) + ", " + std::to_string(jj) + ")");
    if (!b.contains("coeffs") || !b.at("coeffs").is_array() ||
        b.at("coeffs").size() != static_cast<std::size_t>(q2))
      throw input_error(path + ": \"coeffs\" must hold v2_dim numbers");
    BracketEntry entry;
    entry.i = i - 1;
    entry.j = jj - 1;
    entry.coeffs.resize(q2);
    for (int a = 0; a < q2; ++a) {
      if (!b.at("coeffs").at(a).is_number())
        throw input_error(path + ": \"coeffs\" must hold numbers");
      entry.coeffs(a) = b.at("coeffs").at(a).get<double>();
    }
    entries.push_back(std::move(entry));
  }

  std::vector<std::vector<int>> blocks;
  if (j.contains("v1_blocks")) {
    if (!j.at("v1_blocks").is_array())
      throw input_error(path + ": \"v1_blocks\" must be an array of arrays");
    for (const json& blk : j.at("v1_blocks")) {
      if (!blk.is_array())
        throw input_error(path + ": \"v1_blocks\" must be an array of arrays");
      std::vector<int> indices;
      for (const json& e : blk) {
        if (!e.is_number_integer())
          throw input_error(path + ": block indices must be integers");
        const int idx = e.get<int>();
        if (idx < 1 || idx > q1)
          throw input_error(path + ": block index out of range");
        indices.push_back(idx - 1);
      }
      blocks.push_back(std::move(indices));
    }
  }

  StepTwoAlgebra alg = StepTwoAlgebra::from_brackets(q1, q2, entries, name,
                                                     std::move(blocks));
  const ValidationReport report = validate(alg);
  if (report.bracket_rank < q2)
    throw input_error(path + ": brackets generate only a rank " +
                      std::to_string(report.bracket_rank) +
                      " subspace of the " + std::to_string(q2) +
                      "-dimensional second layer");
  if (!report.ok) throw input_error(path + ": structure tensor failed validation");
  return alg;
}

PairingMatrix load_pairing_matrix(const std::string& path) {
  const json j = parse_file(path);
  if (j.is_object()) {
    if (!j.contains("A"))
      throw input_error(path + ": expected field \"A\" with row arrays");
    return PairingMatrix{rows_to_matrix(j.at("A"), path)};
  }
  return PairingMatrix{rows_to_matrix(j, path)};
}

GroupHandle parse_group_descriptor(const std::string& descriptor) {
  if (descriptor == "heisenberg")
    return GroupHandle{heisenberg(), std::nullopt, descriptor, "heisenberg", 1};
  const std::size_t colon = descriptor.find(':');
  if (colon != std::string::npos) {
    const std::string family = descriptor.substr(0, colon);
    const std::string rest = descriptor.substr(colon + 1);
    if (family == "free") {
      const int k = parse_family_param(rest, descriptor);
      return GroupHandle{free_step_two(k), std::nullopt, descriptor, family, k};
    }
    if (family == "star") {
      const int k = parse_family_param(rest, descriptor);
      return GroupHandle{star_graph(k), std::nullopt, descriptor, family, k};
    }
    if (family == "ga") {
      PairingMatrix pairing = load_pairing_matrix(rest);
      StepTwoAlgebra alg = pairing_group(pairing);
      const int k = pairing.cols();
      return GroupHandle{std::move(alg), std::move(pairing), descriptor,
                         family, k};
    }
    // A colon usually means a mistyped family name, not a file path.
    if (!std::filesystem::exists(descriptor))
      throw input_error("unknown group family \"" + family +
                        "\"; expected heisenberg, free:<k>, star:<k>, "
                        "ga:<file>, or a spec file path");
  }
  return GroupHandle{load_group_spec(descriptor), std::nullopt, descriptor,
                     "file", 0};
}

}  // namespace carnot
